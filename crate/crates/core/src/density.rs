//! Probability mass over a 1D grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

pub const MASS_TOLERANCE: f64 = 1e-9;

/// Nonnegative mass per grid cell summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    grid: Grid1D,
    mass: Vec<f64>,
}

impl DensityEstimate {
    /// Validates an already-normalized mass vector.
    pub fn new(grid: Grid1D, mass: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(grid, mass, MASS_TOLERANCE)
    }

    pub fn with_tolerance(grid: Grid1D, mass: Vec<f64>, tol: f64) -> Result<Self> {
        if mass.len() != grid.len() {
            return Err(Error::Input(format!("mass has {} cells, grid has {}", mass.len(), grid.len())));
        }
        if let Some(index) = mass.iter().position(|m| !m.is_finite()) {
            return Err(Error::Numeric { index, value: mass[index] });
        }
        if let Some(i) = mass.iter().position(|&m| m < 0.0) {
            return Err(Error::Input(format!("negative mass {} at cell {i}", mass[i])));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::Input(format!("mass sums to {total}, expected 1")));
        }
        Ok(Self { grid, mass })
    }

    /// Normalizes nonnegative weights to unit mass.
    pub fn from_weights(grid: Grid1D, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::Input("weights/grid length mismatch".into()));
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Numeric { index, value: weights[index] });
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Input("weights sum to zero".into()));
        }
        let mass = weights.into_iter().map(|w| w / total).collect();
        Self::new(grid, mass)
    }

    pub fn uniform(grid: Grid1D) -> Self {
        let n = grid.len();
        Self { mass: vec![1.0 / n as f64; n], grid }
    }

    /// Histogram of samples, each clipped into the domain and assigned to its nearest cell.
    pub fn from_samples(grid: Grid1D, samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Input("no samples to histogram".into()));
        }
        let mut counts = vec![0.0; grid.len()];
        for &x in samples {
            counts[grid.nearest_index(x)] += 1.0;
        }
        Self::from_weights(grid, counts)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Mass divided by cell width.
    pub fn density(&self) -> Vec<f64> {
        let h = self.grid.spacing();
        self.mass.iter().map(|m| m / h).collect()
    }

    /// Mass of the cell nearest to `x` (clipped into the domain).
    pub fn mass_at(&self, x: f64) -> f64 {
        self.mass[self.grid.nearest_index(x)]
    }

    pub fn argmax(&self) -> usize {
        self.mass.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0)
    }

    /// Interior strict local maxima (ties on the right allowed), as cell indices.
    pub fn local_maxima(&self) -> Vec<usize> {
        let m = &self.mass;
        (1..m.len().saturating_sub(1)).filter(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1]).collect()
    }

    pub fn l1_distance(&self, other: &DensityEstimate) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).sum())
    }

    pub fn check_same_grid(&self, other: &DensityEstimate) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::Input("densities live on different grids".into()))
        }
    }
}

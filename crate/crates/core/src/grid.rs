//! Uniform endpoint-inclusive grids with `2^n` points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_QUBITS: u32 = 3;
pub const MAX_QUBITS: u32 = 12;

/// Evenly spaced points on `[lower, upper]`, both endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    lower: f64,
    upper: f64,
    n_qubits: u32,
    points: Vec<f64>,
    spacing: f64,
}

impl Grid1D {
    pub fn new(lower: f64, upper: f64, n_qubits: u32) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(Error::Domain(format!("degenerate bounds [{lower}, {upper}]")));
        }
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Config(format!("n_qubits = {n_qubits} outside [{MIN_QUBITS}, {MAX_QUBITS}]")));
        }
        let n = 1usize << n_qubits;
        let spacing = (upper - lower) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lower + i as f64 * spacing).collect();
        points[n - 1] = upper;
        Ok(Self { lower, upper, n_qubits, points, spacing })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the grid point nearest to `x`, clipping `x` into the domain first.
    pub fn nearest_index(&self, x: f64) -> usize {
        let x = if x.is_nan() { self.lower } else { x.clamp(self.lower, self.upper) };
        let idx = ((x - self.lower) / self.spacing).round() as usize;
        idx.min(self.len() - 1)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n_qubits == other.n_qubits && self.lower == other.lower && self.upper == other.upper
    }
}

/// Convenience wrapper matching the operation name used by the CLI docs.
pub fn make_grid(lower: f64, upper: f64, n_qubits: u32) -> Result<Grid1D> {
    Grid1D::new(lower, upper, n_qubits)
}

/// Tensor product of two 1D grids, enumerated row-major (`x1` is the slow axis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x1: Grid1D,
    pub x2: Grid1D,
}

impl Grid2D {
    pub fn new(x1: Grid1D, x2: Grid1D) -> Self {
        Self { x1, x2 }
    }

    pub fn len(&self) -> usize {
        self.x1.len() * self.x2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.x2.len() + j
    }

    /// Iterates `(row, col, x1, x2)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        self.x1
            .points()
            .iter()
            .enumerate()
            .flat_map(move |(i, &a)| self.x2.points().iter().enumerate().map(move |(j, &b)| (i, j, a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_interval_three_qubits() {
        let g = make_grid(0.0, 1.0, 3).unwrap();
        assert_eq!(g.len(), 8);
        assert_relative_eq!(g.spacing(), 1.0 / 7.0, epsilon = 1e-15);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[7], 1.0);
    }

    #[test]
    fn nine_qubits_gives_512_points() {
        let g = make_grid(-3.0, 3.0, 9).unwrap();
        assert_eq!(g.len(), 512);
    }

    #[test]
    fn symmetric_midpoints() {
        let g = make_grid(-1.0, 1.0, 3).unwrap();
        let p = g.points();
        assert_relative_eq!(p[3], -p[4], epsilon = 1e-15);
        for i in 0..8 {
            assert_relative_eq!(p[i], -p[7 - i], epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_bounds_and_sizes() {
        assert!(matches!(make_grid(1.0, 1.0, 5), Err(Error::Domain(_))));
        assert!(matches!(make_grid(2.0, 1.0, 5), Err(Error::Domain(_))));
        assert!(matches!(make_grid(0.0, 1.0, 2), Err(Error::Config(_))));
        assert!(matches!(make_grid(0.0, 1.0, 13), Err(Error::Config(_))));
    }

    #[test]
    fn spacing_times_cells_is_width() {
        for n in MIN_QUBITS..=MAX_QUBITS {
            for &(a, b) in &[(-3.0, 3.0), (0.0, 1e-3), (-1e4, 2.5e4)] {
                let g = make_grid(a, b, n).unwrap();
                let w = g.spacing() * (g.len() - 1) as f64;
                assert!(((w - (b - a)) / (b - a)).abs() < 1e-12);
                assert!(g.points().windows(2).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn nearest_index_clips() {
        let g = make_grid(-3.0, 3.0, 7).unwrap();
        assert_eq!(g.nearest_index(-10.0), 0);
        assert_eq!(g.nearest_index(10.0), 127);
        assert_eq!(g.nearest_index(g.points()[40] + 0.1 * g.spacing()), 40);
    }

    #[test]
    fn grid2d_row_major() {
        let g = Grid2D::new(make_grid(0.0, 1.0, 3).unwrap(), make_grid(0.0, 2.0, 4).unwrap());
        assert_eq!(g.len(), 8 * 16);
        let v: Vec<_> = g.iter().collect();
        assert_eq!(v[1].1, 1);
        assert_eq!(v[16].0, 1);
        assert_eq!(g.index(1, 0), 16);
    }
}

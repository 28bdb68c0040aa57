//! Classical Fokker–Planck ground truth for gradient drifts `f = −V′`.

use serde::{Deserialize, Serialize};

use crate::density::DensityEstimate;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::potential::{eval_potential, gradient_fd, Potential, DEFAULT_FD_STEP};

/// Boltzmann density `∝ e^{−V/D}` on the grid.
pub fn stationary_analytic(p: &Potential, d_coeff: f64, g: &Grid1D) -> Result<DensityEstimate> {
    check_diffusion(d_coeff)?;
    let v = eval_potential(p, g)?;
    boltzmann(&v, d_coeff, g)
}

pub(crate) fn boltzmann(v: &[f64], d_coeff: f64, g: &Grid1D) -> Result<DensityEstimate> {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let weights = v.iter().map(|x| (-(x - min) / d_coeff).exp()).collect();
    DensityEstimate::from_weights(g.clone(), weights)
}

fn check_diffusion(d_coeff: f64) -> Result<()> {
    if d_coeff > 0.0 && d_coeff.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("diffusion coefficient must be positive, got {d_coeff}")))
    }
}

/// Density snapshots from an explicit time integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub grid: Grid1D,
    pub snapshots: Vec<DensityEstimate>,
    pub times: Vec<f64>,
    pub dt: f64,
    /// Set when the per-step L1 change fell below the convergence threshold
    /// before `t_end`.
    pub converged_early: bool,
}

impl EvolutionTrace {
    pub fn last(&self) -> &DensityEstimate {
        self.snapshots.last().expect("trace always holds the initial snapshot")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Snapshots recorded after the initial one, evenly spaced in time.
    pub snapshots: usize,
    /// Stop once a single step changes the density by less than this in L1.
    pub converge_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { snapshots: 50, converge_tol: 1e-10 }
    }
}

/// Face drifts `f(x_{i+½}) = −(V_{i+1} − V_i)/h` for the `n − 1` interior faces.
fn face_drifts(v: &[f64], h: f64) -> Vec<f64> {
    v.windows(2).map(|w| -(w[1] - w[0]) / h).collect()
}

/// Bernoulli function `z / (eᶻ − 1)`.
fn bernoulli(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        z / z.exp_m1()
    }
}

/// Per-face transfer rates `(i → i+1, i+1 → i)` per unit mass and time.
///
/// Exponentially fitted upwinding: at large cell Péclet number `f·h/D` this is
/// first-order upwind, at small Péclet number centered differencing, and the
/// discrete Boltzmann weights `e^{−Vᵢ/D}` have zero flux through every face.
fn face_rates(v: &[f64], d_coeff: f64, h: f64) -> Vec<(f64, f64)> {
    let diff = d_coeff / (h * h);
    face_drifts(v, h)
        .into_iter()
        .map(|f| {
            let pe = f * h / d_coeff;
            (diff * bernoulli(-pe), diff * bernoulli(pe))
        })
        .collect()
}

/// Largest stable explicit step: `0.4·h² / (2D + max|f|·h)`.
pub fn stable_dt(p: &Potential, d_coeff: f64, g: &Grid1D) -> Result<f64> {
    let h = g.spacing();
    let v = eval_potential(p, g)?;
    let fmax = face_drifts(&v, h).iter().fold(0.0f64, |m, f| m.max(f.abs()));
    Ok(0.4 * h * h / (2.0 * d_coeff + fmax * h))
}

/// Integrates `∂ρ/∂t = −∂ₓ(fρ) + D∂ₓ²ρ` with an explicit finite-volume scheme
/// (exponentially fitted upwind fluxes, zero-flux walls).
pub fn evolve_fp(
    p: &Potential,
    d_coeff: f64,
    g: &Grid1D,
    rho0: &DensityEstimate,
    t_end: f64,
) -> Result<EvolutionTrace> {
    evolve_fp_with(p, d_coeff, g, rho0, t_end, EvolveOptions::default())
}

pub fn evolve_fp_with(
    p: &Potential,
    d_coeff: f64,
    g: &Grid1D,
    rho0: &DensityEstimate,
    t_end: f64,
    opts: EvolveOptions,
) -> Result<EvolutionTrace> {
    check_diffusion(d_coeff)?;
    if !rho0.grid().same_as(g) {
        return Err(Error::Input("initial density lives on a different grid".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Input(format!("t_end must be positive, got {t_end}")));
    }
    let n = g.len();
    let dt_max = stable_dt(p, d_coeff, g)?;
    let n_steps = (t_end / dt_max).ceil().max(1.0) as usize;
    let dt = t_end / n_steps as f64;
    let snapshots_wanted = opts.snapshots.max(1).min(n_steps);

    let rates = face_rates(&eval_potential(p, g)?, d_coeff, g.spacing());

    let mut mass = rho0.mass().to_vec();
    let mut next = vec![0.0; n];
    let mut snapshots = vec![rho0.clone()];
    let mut times = vec![0.0];
    let mut converged_early = false;

    for step in 1..=n_steps {
        next.copy_from_slice(&mass);
        for (i, &(right, left)) in rates.iter().enumerate() {
            let flow = dt * (right * mass[i] - left * mass[i + 1]);
            next[i] -= flow;
            next[i + 1] += flow;
        }
        let change: f64 = next.iter().zip(&mass).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut mass, &mut next);

        let at_snapshot = step * snapshots_wanted / n_steps != (step - 1) * snapshots_wanted / n_steps;
        let converged = change < opts.converge_tol;
        if at_snapshot || converged || step == n_steps {
            snapshots.push(checked_snapshot(g, &mass, step as f64 * dt)?);
            times.push(step as f64 * dt);
        }
        if converged && step < n_steps {
            converged_early = true;
            break;
        }
    }
    times.dedup();
    snapshots.truncate(times.len());
    Ok(EvolutionTrace { grid: g.clone(), snapshots, times, dt, converged_early })
}

fn checked_snapshot(g: &Grid1D, mass: &[f64], t: f64) -> Result<DensityEstimate> {
    if let Some((i, &m)) = mass.iter().enumerate().find(|(_, m)| **m < -1e-8 || !m.is_finite()) {
        return Err(Error::Solver(format!("density {m} at cell {i}, t = {t}")));
    }
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > 1e-4 {
        return Err(Error::Solver(format!("mass drifted to {total} at t = {t}")));
    }
    let clean: Vec<f64> = mass.iter().map(|m| m.max(0.0)).collect();
    let clean_total: f64 = clean.iter().sum();
    DensityEstimate::with_tolerance(g.clone(), clean.into_iter().map(|m| m / clean_total).collect(), 1e-6)
}

/// Fixed point of the discrete scheme used by [`evolve_fp`]: the density with
/// zero net flux through every cell face, i.e. the solver's `t → ∞` limit.
pub fn solver_stationary(p: &Potential, d_coeff: f64, g: &Grid1D) -> Result<DensityEstimate> {
    check_diffusion(d_coeff)?;
    let mut log_mass = Vec::with_capacity(g.len());
    log_mass.push(0.0);
    for (right, left) in face_rates(&eval_potential(p, g)?, d_coeff, g.spacing()) {
        let prev = *log_mass.last().unwrap();
        log_mass.push(prev + right.ln() - left.ln());
    }
    let top = log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights = log_mass.into_iter().map(|l| (l - top).exp()).collect();
    DensityEstimate::from_weights(g.clone(), weights)
}

/// Values on a 2D grid, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Sum over `x₂` for each `x₁` row.
    pub fn marginal_x1(&self) -> Vec<f64> {
        self.values.chunks(self.grid.x2.len()).map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_x2(&self) -> Vec<f64> {
        let n2 = self.grid.x2.len();
        let mut out = vec![0.0; n2];
        for row in self.values.chunks(n2) {
            out.iter_mut().zip(row).for_each(|(o, v)| *o += v);
        }
        out
    }

    /// Interior cells strictly greater than their 8 neighbours.
    pub fn local_maxima(&self) -> Vec<(usize, usize)> {
        let (n1, n2) = (self.grid.x1.len(), self.grid.x2.len());
        let mut out = Vec::new();
        for i in 1..n1 - 1 {
            for j in 1..n2 - 1 {
                let c = self.at(i, j);
                let is_max = (-1i32..=1).all(|di| {
                    (-1i32..=1).all(|dj| {
                        (di == 0 && dj == 0) || c > self.at((i as i32 + di) as usize, (j as i32 + dj) as usize)
                    })
                });
                if is_max {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Drift components per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField2D {
    pub grid: Grid2D,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Stationary density of the separable potential `V(x₁, x₂) = p1(x₁) + p2(x₂)`.
pub fn stationary_2d(p1: &Potential, p2: &Potential, d_coeff: f64, g: &Grid2D) -> Result<Field2D> {
    let m1 = stationary_analytic(p1, d_coeff, &g.x1)?;
    let m2 = stationary_analytic(p2, d_coeff, &g.x2)?;
    let values = m1.mass().iter().flat_map(|a| m2.mass().iter().map(move |b| a * b)).collect();
    Ok(Field2D { grid: g.clone(), values })
}

/// `(u, v) = (−p1′(x₁), −p2′(x₂))` at every grid point.
pub fn drift_field_2d(p1: &Potential, p2: &Potential, g: &Grid2D) -> VectorField2D {
    let u1: Vec<f64> = g.x1.points().iter().map(|&x| -gradient_fd(p1, x, DEFAULT_FD_STEP)).collect();
    let v2: Vec<f64> = g.x2.points().iter().map(|&x| -gradient_fd(p2, x, DEFAULT_FD_STEP)).collect();
    let mut u = Vec::with_capacity(g.len());
    let mut v = Vec::with_capacity(g.len());
    for (i, j, _, _) in g.iter() {
        u.push(u1[i]);
        v.push(v2[j]);
    }
    VectorField2D { grid: g.clone(), u, v }
}

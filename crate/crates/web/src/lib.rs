//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every exported function takes plain numbers and returns a JSON string, so
//! the page needs no generated type bindings beyond the function names.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fpflow::agents::exploration_bonus;
use fpflow::density::DensityEstimate;
use fpflow::env::reward_along_x1;
use fpflow::fp::{evolve_fp_with, stationary_analytic, EvolveOptions};
use fpflow::metrics::mse;
use fpflow::potential::Potential;
use fpflow::qae::{annealed_qae, QaeConfig};
use fpflow::{Error, Result};

const LOWER: f64 = -3.0;
const UPPER: f64 = 3.0;

fn potential_named(name: &str) -> Result<Potential> {
    match name {
        "double_well" => Ok(Potential::double_well()),
        "symmetric_double_well" => Ok(Potential::symmetric_double_well()),
        "harmonic" => Ok(Potential::harmonic()),
        "reward_slice" => Ok(Potential::RewardSlice),
        other => Err(Error::Input(format!("unknown potential '{other}'"))),
    }
}

fn qae_config(beta: f64, n_qubits: u32) -> QaeConfig {
    QaeConfig { beta, n_qubits, lower: LOWER, upper: UPPER, ..QaeConfig::default() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityComparison {
    pub x: Vec<f64>,
    pub potential: Vec<f64>,
    pub estimate: Vec<f64>,
    pub analytic: Vec<f64>,
    /// In density units, against the Boltzmann density at `D = 1/β`.
    pub mse: f64,
}

/// Annealed amplitude estimate against the exact stationary density.
pub fn density_comparison(potential: &str, beta: f64, n_qubits: u32) -> Result<DensityComparison> {
    let pot = potential_named(potential)?;
    let cfg = qae_config(beta, n_qubits);
    let grid = cfg.grid()?;
    let estimate = annealed_qae(&pot, &grid, &cfg)?;
    let analytic = stationary_analytic(&pot, 1.0 / beta, &grid)?;
    Ok(DensityComparison {
        x: grid.points().to_vec(),
        potential: grid.points().iter().map(|&x| pot.value(x)).collect(),
        mse: mse(&estimate, &analytic)?,
        estimate: estimate.density(),
        analytic: analytic.density(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evolution {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// One density row per snapshot.
    pub snapshots: Vec<Vec<f64>>,
    pub analytic: Vec<f64>,
    pub l1_to_analytic: Vec<f64>,
}

/// Relaxation from a uniform start on the tilted double well.
pub fn fp_evolution(d_coeff: f64, t_end: f64, snapshots: usize, n_qubits: u32) -> Result<Evolution> {
    let pot = Potential::double_well();
    let grid = fpflow::grid::Grid1D::new(LOWER, UPPER, n_qubits)?;
    let analytic = stationary_analytic(&pot, d_coeff, &grid)?;
    let opts = EvolveOptions { snapshots, ..EvolveOptions::default() };
    let trace = evolve_fp_with(&pot, d_coeff, &grid, &DensityEstimate::uniform(grid.clone()), t_end, opts)?;
    let l1 = trace.snapshots.iter().map(|s| s.l1_distance(&analytic)).collect::<Result<Vec<_>>>()?;
    Ok(Evolution {
        x: grid.points().to_vec(),
        times: trace.times,
        snapshots: trace.snapshots.iter().map(DensityEstimate::density).collect(),
        analytic: analytic.density(),
        l1_to_analytic: l1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BonusLandscape {
    pub x: Vec<f64>,
    pub reward: Vec<f64>,
    pub rho_hat: Vec<f64>,
    pub bonus: Vec<f64>,
    pub augmented: Vec<f64>,
}

/// Reward along `x₁`, the estimated stationary mass and the resulting bonus.
pub fn bonus_landscape(alpha: f64, beta: f64, n_qubits: u32) -> Result<BonusLandscape> {
    let cfg = qae_config(beta, n_qubits);
    let grid = cfg.grid()?;
    let rho = annealed_qae(&Potential::RewardSlice, &grid, &cfg)?;
    let reward: Vec<f64> = grid.points().iter().map(|&x| reward_along_x1(x)).collect();
    let bonus: Vec<f64> = rho.mass().iter().map(|&m| exploration_bonus(m, alpha)).collect();
    Ok(BonusLandscape {
        x: grid.points().to_vec(),
        augmented: reward.iter().zip(&bonus).map(|(r, b)| r + b).collect(),
        rho_hat: rho.mass().to_vec(),
        reward,
        bonus,
    })
}

fn to_js<T: Serialize>(value: Result<T>) -> std::result::Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = densityComparison)]
pub fn density_comparison_js(potential: &str, beta: f64, n_qubits: u32) -> std::result::Result<String, JsError> {
    to_js(density_comparison(potential, beta, n_qubits))
}

#[wasm_bindgen(js_name = fpEvolution)]
pub fn fp_evolution_js(
    d_coeff: f64,
    t_end: f64,
    snapshots: usize,
    n_qubits: u32,
) -> std::result::Result<String, JsError> {
    to_js(fp_evolution(d_coeff, t_end, snapshots, n_qubits))
}

#[wasm_bindgen(js_name = bonusLandscape)]
pub fn bonus_landscape_js(alpha: f64, beta: f64, n_qubits: u32) -> std::result::Result<String, JsError> {
    to_js(bonus_landscape(alpha, beta, n_qubits))
}

//! Potential functions `V(x)` evaluated on grids.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::reward_along_x1;
use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Default finite-difference step for `dV/dx`, in domain units.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// A one-dimensional potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialSpec", into = "PotentialSpec")]
pub enum Potential {
    /// `½(x² − 2)² + amplitude·sin(3x)`.
    DoubleWellSine { amplitude: f64 },
    /// `½·stiffness·x²`.
    Harmonic { stiffness: f64 },
    /// Negated multimodal reward along `x₁`, other coordinates zero.
    /// Grid evaluations are shifted so the grid minimum is 0.
    RewardSlice,
    /// Piecewise-linear interpolation of `(x, V)` knots.
    Tabulated(Tabulated),
}

impl Potential {
    pub fn double_well() -> Self {
        Potential::DoubleWellSine { amplitude: 0.3 }
    }

    pub fn symmetric_double_well() -> Self {
        Potential::DoubleWellSine { amplitude: 0.0 }
    }

    pub fn harmonic() -> Self {
        Potential::Harmonic { stiffness: 1.0 }
    }

    /// Pointwise value, without any grid-dependent shift.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::DoubleWellSine { amplitude } => {
                let q = x * x - 2.0;
                0.5 * q * q + amplitude * (3.0 * x).sin()
            }
            Potential::Harmonic { stiffness } => 0.5 * stiffness * x * x,
            Potential::RewardSlice => -reward_along_x1(x),
            Potential::Tabulated(t) => t.interpolate(x),
        }
    }

    /// Closed-form derivative where one exists; used only by tests and
    /// diagnostics, the learning code goes through [`gradient_fd`].
    pub fn analytic_derivative(&self, x: f64) -> Option<f64> {
        match self {
            Potential::DoubleWellSine { amplitude } => {
                Some(2.0 * x * (x * x - 2.0) + 3.0 * amplitude * (3.0 * x).cos())
            }
            Potential::Harmonic { stiffness } => Some(stiffness * x),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Potential::DoubleWellSine { .. } => "double_well_sine",
            Potential::Harmonic { .. } => "harmonic",
            Potential::RewardSlice => "reward_slice",
            Potential::Tabulated(_) => "tabulated",
        }
    }
}

/// Evaluates `p` on every grid point.
pub fn eval_potential(p: &Potential, g: &Grid1D) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(g.len());
    for (index, &x) in g.points().iter().enumerate() {
        let value = p.value(x);
        if !value.is_finite() {
            return Err(Error::Numeric { index, value });
        }
        values.push(value);
    }
    if matches!(p, Potential::RewardSlice) {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        values.iter_mut().for_each(|v| *v -= min);
    }
    Ok(values)
}

/// Central difference `(V(x+h) − V(x−h)) / 2h`.
pub fn gradient_fd(p: &Potential, x: f64, h_fd: f64) -> f64 {
    debug_assert!(h_fd > 0.0);
    (p.value(x + h_fd) - p.value(x - h_fd)) / (2.0 * h_fd)
}

/// Knot table for [`Potential::Tabulated`]. Knots are sorted by `x`; values
/// outside the knot range take the nearest endpoint value.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    vs: Vec<f64>,
}

impl Tabulated {
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Input("tabulated potential needs at least 2 knots".into()));
        }
        if let Some((i, _)) = knots.iter().enumerate().find(|(_, (x, v))| !x.is_finite() || !v.is_finite()) {
            return Err(Error::Numeric { index: i, value: f64::NAN });
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Input("duplicate x in tabulated potential".into()));
        }
        let (xs, vs) = knots.into_iter().unzip();
        Ok(Self { xs, vs })
    }

    /// Reads a two-column `x,V` CSV. A non-numeric first row is treated as a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path.as_ref())?;
        let mut knots = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Input(format!("row {row}: expected two columns")));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(x), Ok(v)) => knots.push((x, v)),
                _ if row == 0 => continue,
                _ => return Err(Error::Input(format!("row {row}: not numeric"))),
            }
        }
        Self::new(knots)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.vs.iter().copied())
    }

    fn interpolate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.vs[0];
        }
        if x >= self.xs[n - 1] {
            return self.vs[n - 1];
        }
        let hi = self.xs.partition_point(|&k| k <= x);
        let lo = hi - 1;
        let t = (x - self.xs[lo]) / (self.xs[hi] - self.xs[lo]);
        self.vs[lo] + t * (self.vs[hi] - self.vs[lo])
    }
}

/// Config-file form: a kind string plus a parameter list.
///
/// `tabulated` takes either `path` (two-column CSV) or `params` as
/// interleaved `x0, V0, x1, V1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl TryFrom<PotentialSpec> for Potential {
    type Error = Error;

    fn try_from(spec: PotentialSpec) -> Result<Self> {
        let param = |i: usize, default: f64| spec.params.get(i).copied().unwrap_or(default);
        match spec.kind.as_str() {
            "double_well_sine" => Ok(Potential::DoubleWellSine { amplitude: param(0, 0.3) }),
            "harmonic" => Ok(Potential::Harmonic { stiffness: param(0, 1.0) }),
            "reward_slice" => Ok(Potential::RewardSlice),
            "tabulated" => {
                if let Some(path) = &spec.path {
                    return Tabulated::from_csv(path).map(Potential::Tabulated);
                }
                if !spec.params.len().is_multiple_of(2) {
                    return Err(Error::Config("tabulated params must be (x, V) pairs".into()));
                }
                let knots = spec.params.chunks(2).map(|c| (c[0], c[1])).collect();
                Tabulated::new(knots).map(Potential::Tabulated)
            }
            other => Err(Error::Config(format!("unknown potential kind `{other}`"))),
        }
    }
}

impl From<Potential> for PotentialSpec {
    fn from(p: Potential) -> Self {
        let kind = p.kind_name().to_string();
        let params = match p {
            Potential::DoubleWellSine { amplitude } => vec![amplitude],
            Potential::Harmonic { stiffness } => vec![stiffness],
            Potential::RewardSlice => vec![],
            Potential::Tabulated(t) => t.knots().flat_map(|(x, v)| [x, v]).collect(),
        };
        PotentialSpec { kind, params, path: None }
    }
}

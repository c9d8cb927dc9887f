//! Measured constants and small fitting utilities shared by the experiment
//! modules.

use std::fmt;

/// How a sum-space value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormMethod {
    Direct,
    PasteHeuristic,
    ConvexOracle,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Direct => "direct",
            NormMethod::PasteHeuristic => "paste-heuristic",
            NormMethod::ConvexOracle => "convex-oracle",
        }
    }
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(NormMethod::Direct),
            "paste-heuristic" | "heuristic" | "paste" => Ok(NormMethod::PasteHeuristic),
            "convex-oracle" | "oracle" => Ok(NormMethod::ConvexOracle),
            other => Err(format!("unknown norm method `{other}`")),
        }
    }
}

/// A norm value together with provenance.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub value: f64,
    pub method: NormMethod,
    /// Per-cell `(j, d, contribution)` breakdown, when the method produces one.
    pub per_cell: Option<Vec<(u32, u32, f64)>>,
    /// Set when an iterative method stopped before meeting its tolerance.
    pub converged: bool,
    /// Set when a weight had to be clamped to stay finite.
    pub saturated: bool,
}

impl NormReport {
    pub fn direct(value: f64) -> Self {
        NormReport { value, method: NormMethod::Direct, per_cell: None, converged: true, saturated: false }
    }
}

/// Empirical constant of one estimate: the largest observed LHS/RHS ratio.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub estimate: String,
    pub max_ratio: f64,
    /// Seed (or trial index) that produced `max_ratio`.
    pub argmax: Option<u64>,
    pub trials: usize,
    /// `(grid label, max ratio on that grid)`, coarsest first.
    pub refinement_trend: Vec<(String, f64)>,
    /// Free-form parameters the run used (offsets, cells, D, ...).
    pub params: Vec<(String, String)>,
}

impl RatioReport {
    pub fn single(estimate: impl Into<String>, ratio: f64) -> Self {
        RatioReport {
            estimate: estimate.into(),
            max_ratio: ratio,
            argmax: None,
            trials: 1,
            refinement_trend: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.len() < 2 {
        return (f64::NAN, y.first().copied().unwrap_or(f64::NAN));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

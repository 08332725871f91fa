//! Uniform residual reports.

use serde::{Deserialize, Serialize};

/// A named residual together with the tolerance it is judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub location: String,
    pub value: f64,
    pub tolerance: f64,
    /// Set for two-sided checks `|value - target| <= tolerance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub pass: bool,
}

impl ResidualReport {
    /// Passes when `value <= tolerance` (NaN fails).
    pub fn below(name: impl Into<String>, location: impl Into<String>, value: f64, tolerance: f64) -> Self {
        ResidualReport {
            name: name.into(),
            location: location.into(),
            value,
            tolerance,
            target: None,
            pass: value <= tolerance,
        }
    }

    /// Passes when `|value - target| <= tolerance`; `value` is stored as given.
    pub fn near(name: impl Into<String>, location: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        ResidualReport {
            name: name.into(),
            location: location.into(),
            value,
            tolerance,
            target: Some(target),
            pass: (value - target).abs() <= tolerance,
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.tolerance *= factor;
        self.pass = match self.target {
            Some(t) => (self.value - t).abs() <= self.tolerance,
            None => self.value <= self.tolerance,
        };
        self
    }
}

/// Worst case of a list of residuals, with every entry kept for output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub entries: Vec<ResidualReport>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport { suite: suite.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, r: ResidualReport) {
        self.entries.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = ResidualReport>) {
        self.entries.extend(rs);
    }

    pub fn pass(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualReport> {
        self.entries.iter().filter(|r| !r.pass)
    }

    /// Largest value among entries whose name starts with `prefix`.
    pub fn max_value(&self, prefix: &str) -> f64 {
        self.entries
            .iter()
            .filter(|r| r.name.starts_with(prefix))
            .fold(f64::NEG_INFINITY, |m, r| m.max(r.value))
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_slope(&lx, &ly)
}

pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

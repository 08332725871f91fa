//! Run configuration shared by the CLI and the verification harness.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::phase::PhaseContext;
use crate::rhp::rho_min;
use crate::scattering::z_of_lambda;
use crate::toda::Profile;
use crate::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Scatter,
    Gfun,
    Model,
    Parametrix,
    Verify,
    Suite,
}

/// All knobs of a run. Every field has a default, so `{}` is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    /// Left background `(a, b)`; the right one is `(1/2, 0)`.
    pub a_bg: f64,
    pub b_bg: f64,
    pub profile: Profile,
    /// Final time of simulations.
    pub t_end: f64,
    pub dt: f64,
    /// Lattice half-width; `None` uses `max(600, 6 T)`.
    pub half_width: Option<usize>,
    pub buffer_tol: f64,
    /// Region `eps t <= n <= (1 - eps) t`.
    pub eps: f64,
    /// Rays `n = xi t` probed by `verify` and used by the phase suites.
    pub xi: Vec<f64>,
    /// Disk parameter; `None` uses `0.4 Im z0` for each ray.
    pub rho: Option<f64>,
    /// `R(-1)`, `-1` (nonresonant) or `+1` (experimental).
    pub r_minus_one: f64,
    /// Times of the matching fit.
    pub matching_times: Vec<f64>,
    /// Constant `C` of the `C/t` error bound; `None` calibrates on the run.
    pub c_fixture: Option<f64>,
    /// Multiplies every residual tolerance.
    pub tol_scale: f64,
    pub seed: u64,
    /// Sign-grid resolution for `gfun`.
    pub grid: usize,
    /// Half-width of the lattice used for scattering data.
    pub scatter_half_width: usize,
    pub out: Option<PathBuf>,
    /// Test hook: replaces `S2` in the parametrix suite.
    #[serde(skip)]
    pub s2_override: Option<crate::cplx::Mat2C>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            a_bg: 0.5,
            b_bg: 2.5,
            profile: Profile::PureStep,
            t_end: 100.0,
            dt: 0.02,
            half_width: Some(600),
            buffer_tol: 1e-8,
            eps: 0.2,
            xi: vec![0.25, 0.5, 0.75],
            rho: None,
            r_minus_one: -1.0,
            matching_times: vec![25.0, 50.0, 100.0, 200.0],
            c_fixture: None,
            tol_scale: 1.0,
            seed: 0,
            grid: 200,
            scatter_half_width: 40,
            out: None,
            s2_override: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn half_width(&self) -> usize {
        self.half_width.unwrap_or_else(|| crate::toda::default_half_width(self.t_end))
    }

    /// Disk parameter for the ray through `ctx`.
    pub fn rho_for(&self, ctx: &PhaseContext) -> f64 {
        self.rho.unwrap_or(0.4 * ctx.z0.im)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if !(self.b_bg - 2.0 * self.a_bg > 1.0 && self.a_bg > 0.0) {
            return bad(format!("backgrounds need a > 0 and 1 < b - 2a, got a = {}, b = {}", self.a_bg, self.b_bg));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return bad(format!("eps = {} must lie in (0, 1/2)", self.eps));
        }
        if self.xi.is_empty() {
            return bad("xi list is empty".into());
        }
        for &xi in &self.xi {
            if !(xi >= self.eps && xi <= 1.0 - self.eps) {
                return bad(format!("xi = {xi} outside [eps, 1 - eps] = [{}, {}]", self.eps, 1.0 - self.eps));
            }
            let ctx = PhaseContext::new(xi)?;
            let rho = self.rho_for(&ctx);
            if !(rho > 0.0 && rho < 0.5 * ctx.z0.im) {
                return bad(format!("rho = {rho} must lie in (0, Im z0/2 = {}) at xi = {xi}", 0.5 * ctx.z0.im));
            }
            if rho < rho_min(self.eps) {
                return bad(format!("rho = {rho} is below sqrt(2 eps)/4 = {} at xi = {xi}", rho_min(self.eps)));
            }
        }
        if (self.r_minus_one.abs() - 1.0).abs() > 1e-12 {
            return bad(format!("r_minus_one = {} must be +1 or -1", self.r_minus_one));
        }
        if self.r_minus_one > 0.0 {
            if let Profile::ExpPerturbed { nu, .. } = self.profile {
                let need = -z_of_lambda(self.b_bg - 2.0 * self.a_bg).ln();
                if nu <= need {
                    return bad(format!("resonant runs need nu > -ln q1 = {need}, got {nu}"));
                }
            }
        }
        if !(self.t_end > 0.0 && self.dt > 0.0) {
            return bad(format!("t_end = {} and dt = {} must be positive", self.t_end, self.dt));
        }
        if self.matching_times.len() < 2 || self.matching_times.iter().any(|&t| !(t > 0.0)) {
            return bad("matching_times needs at least two positive times".into());
        }
        if !(self.tol_scale > 0.0) {
            return bad(format!("tol_scale = {} must be positive", self.tol_scale));
        }
        if self.grid < 4 {
            return bad(format!("grid = {} is too coarse", self.grid));
        }
        Ok(())
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{Mat2C, Side, I};
use crate::phase::{disk_boundary, g, g_boundary, leading_coefficient, w_inverse, w_map};
use crate::report::{loglog_slope, ResidualReport};
use crate::{LabError, Result, C64};

use super::airy_par::{m0, sector_of, AiryParametrix};
use super::model::ModelContext;

/// Local parametrix around `z0` at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametrixContext {
    pub model: ModelContext,
    pub t: f64,
    /// Disk parameter, `0 < rho < Im z0 / 2`.
    pub rho: f64,
    pub airy: AiryParametrix,
}

/// `0.4 Im z0`.
pub fn default_rho(model: &ModelContext) -> f64 {
    0.4 * model.ctx.z0.im
}

/// Lower bound `sqrt(2 eps) / 4` on the disk parameter.
pub fn rho_min(eps: f64) -> f64 {
    (2.0 * eps).sqrt() / 4.0
}

impl ParametrixContext {
    pub fn new(model: ModelContext, t: f64, rho: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(LabError::Config(format!("t = {t} must be positive")));
        }
        let cap = 0.5 * model.ctx.z0.im;
        if !(rho > 0.0 && rho < cap) {
            return Err(LabError::Config(format!("rho = {rho} must lie in (0, Im z0 / 2 = {cap})")));
        }
        Ok(ParametrixContext { model, t, rho, airy: AiryParametrix::new(model.r_minus_one) })
    }

    /// Also require `rho >= sqrt(2 eps) / 4`.
    pub fn with_eps(model: ModelContext, t: f64, rho: f64, eps: f64) -> Result<Self> {
        if rho < rho_min(eps) {
            return Err(LabError::Config(format!("rho = {rho} is below sqrt(2 eps)/4 = {}", rho_min(eps))));
        }
        Self::new(model, t, rho)
    }

    /// Radius of the disk in the w-plane, `t^{2/3} (3C/2)^{2/3} rho`.
    pub fn w_radius(&self) -> f64 {
        leading_coefficient(self.t, &self.model.ctx).norm() * self.rho
    }

    pub fn w(&self, z: C64) -> Result<C64> {
        w_map(z, self.t, &self.model.ctx)
    }

    pub fn in_disk(&self, z: C64) -> Result<bool> {
        Ok(self.w(z)?.norm() < self.w_radius())
    }

    /// `(w, sector, arg w)` at `z`.
    fn locate(&self, z: C64, side: Option<Side>) -> Result<(C64, u8, f64)> {
        let w = self.w(z)?;
        let (j, a) = sector_of(w, side)?;
        Ok((w, j, a))
    }

    /// `gamma(w) = beta(z) w^{1/4}` with `arg w` in `[0, 2pi]`.
    pub fn gamma(&self, z: C64, side: Option<Side>) -> Result<C64> {
        let (w, _, a) = self.locate(z, side)?;
        Ok(self.model.beta_side(z, side)? * C64::from_polar(w.norm().powf(0.25), 0.25 * a))
    }

    /// `gamma(0)`: the fourth root of `(1 - z0^2) c1` on the branch of `gamma`.
    pub fn gamma_leading(&self) -> Result<C64> {
        let ctx = &self.model.ctx;
        let g4 = (1.0 - ctx.z0 * ctx.z0) * leading_coefficient(self.t, ctx);
        let probe = w_inverse(C64::from_polar(1e-3 * self.w_radius(), PI), self.t, ctx)?;
        let near = self.gamma(probe, None)?;
        let root = C64::from_polar(g4.norm().powf(0.25), 0.25 * g4.arg());
        Ok((0..4).map(|k| root * I.powi(k)).min_by(|a, b| (a - near).norm().total_cmp(&(b - near).norm())).unwrap_or(root))
    }

    /// `M^par(z) = M0 gamma^{sigma3} A(w) e^{(2/3) w^{3/2} sigma3}`.
    pub fn matrix(&self, z: C64, side: Option<Side>) -> Result<Mat2C> {
        let (w, j, a) = self.locate(z, side)?;
        let gm = self.model.beta_side(z, side)? * C64::from_polar(w.norm().powf(0.25), 0.25 * a);
        let e = C64::from_polar(2.0 / 3.0 * w.norm().powf(1.5), 1.5 * a);
        Ok(m0() * Mat2C::diag(gm, gm.inv()) * self.airy.sector_matrix(j, w)? * Mat2C::exp_sigma3(e))
    }

    /// `(2/3) w^{3/2}` on the side given, which equals `t g`.
    pub fn exponent(&self, z: C64, side: Option<Side>) -> Result<C64> {
        let (w, _, a) = self.locate(z, side)?;
        Ok(C64::from_polar(2.0 / 3.0 * w.norm().powf(1.5), 1.5 * a))
    }

    /// Point of `Sigma_j` (the preimage of the ray `arg w = 2pi (j - 1)/3`) with `|w| = s`.
    pub fn contour_point(&self, j: u8, s: f64) -> Result<C64> {
        let w = C64::from_polar(s, 2.0 * PI * (j as f64 - 1.0) / 3.0);
        let z = w_inverse(w, self.t, &self.model.ctx)?;
        if j == 1 {
            // snap to the circle; Sigma_1 lies on Sigma
            return Ok(z / z.norm());
        }
        Ok(z)
    }

    /// `g` on the side given; on Sigma the one-sided boundary value.
    fn g_side(&self, z: C64, side: Side) -> Result<C64> {
        let ctx = &self.model.ctx;
        if ctx.on_sigma(z, 1e-9) {
            g_boundary(z, side, ctx)
        } else {
            g(z, ctx)
        }
    }

    /// `v^par = e^{-t g_- sigma3} S_j e^{t g_+ sigma3}` on `Sigma_j`.
    pub fn v_par(&self, j: u8, z: C64) -> Result<Mat2C> {
        let (gp, gm) = (self.g_side(z, Side::Plus)?, self.g_side(z, Side::Minus)?);
        let s = self.airy.s[(j - 1) as usize];
        Ok(Mat2C::exp_sigma3(-self.t * gm) * s * Mat2C::exp_sigma3(self.t * gp))
    }

    /// `max |M+ - M- v^par| / |M+|` over `per_ray` points of each `Sigma_j`
    /// with `|w|` spread over `(0, w_radius)`.
    pub fn jump_residual(&self, per_ray: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for j in 1..=3u8 {
            for k in 0..per_ray {
                let s = self.w_radius() * (k as f64 + 0.5) / per_ray as f64;
                let z = self.contour_point(j, s)?;
                let (mp, mm) = (self.matrix(z, Some(Side::Plus))?, self.matrix(z, Some(Side::Minus))?);
                let v = self.v_par(j, z)?;
                worst = worst.max((mm * v).dist(&mp) / mp.max_abs().max(1.0));
            }
        }
        Ok(worst)
    }

    /// `M^par (M^mod)^{-1} - I` at `z`.
    pub fn mismatch(&self, z: C64) -> Result<Mat2C> {
        Ok(self.matrix(z, None)? * self.model.matrix(z, None)?.inv()? - Mat2C::identity())
    }

    /// Derived next-order mismatch: `(1/(72 t g)) [[(p + q)/2, i(p - q)/2], [i(p - q)/2, -(p + q)/2]]`
    /// times `72 t g`, with `p = -5 beta^2`, `q = 7 beta^{-2}`.
    pub fn mismatch_leading(&self, z: C64) -> Result<Mat2C> {
        let b2 = self.model.beta(z)?.powi(2);
        let (p, q) = (-5.0 * b2, 7.0 * b2.inv());
        let off = 0.5 * I * (p - q);
        Ok(Mat2C::new(0.5 * (p + q), off, off, -0.5 * (p + q)))
    }

    /// Points of the disk boundary (independent of `t`).
    pub fn disk_points(&self, count: usize) -> Result<Vec<C64>> {
        disk_boundary(self.rho, count, &self.model.ctx)
    }
}

/// Matching estimate over a list of times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub times: Vec<f64>,
    /// `max |M^par (M^mod)^{-1} - I|` on the disk boundary.
    pub mismatch: Vec<f64>,
    pub slope: f64,
    /// At the last time: max entrywise `|72 t g W - derived| / |derived|`.
    pub derived_rel: f64,
    /// At the last time: max entrywise `|72 t g W - [[-7, 7], [5, -5]]| / 7`.
    pub stated_rel: f64,
}

pub fn matching_report(model: &ModelContext, rho: f64, times: &[f64], count: usize) -> Result<MatchingReport> {
    let base = ParametrixContext::new(*model, times[0], rho)?;
    let pts = base.disk_points(count)?;
    let gs: Vec<C64> = pts.iter().map(|&z| g(z, &model.ctx)).collect::<Result<_>>()?;
    let mut mismatch = Vec::with_capacity(times.len());
    let (mut derived_rel, mut stated_rel) = (0.0f64, 0.0f64);
    let stated = Mat2C::from_real([[-7.0, 7.0], [5.0, -5.0]]);
    for (i, &t) in times.iter().enumerate() {
        let par = ParametrixContext { t, ..base };
        let mut worst: f64 = 0.0;
        for (&z, &gz) in pts.iter().zip(&gs) {
            let w = par.mismatch(z)?;
            worst = worst.max(w.max_abs());
            if i + 1 == times.len() {
                let scaled = w.scale(72.0 * t * gz);
                let d = par.mismatch_leading(z)?;
                derived_rel = derived_rel.max(scaled.dist(&d) / d.max_abs());
                stated_rel = stated_rel.max(scaled.dist(&stated) / 7.0);
            }
        }
        mismatch.push(worst);
    }
    Ok(MatchingReport { times: times.to_vec(), slope: loglog_slope(times, &mismatch), mismatch, derived_rel, stated_rel })
}

/// Behaviour of `gamma` near `w = 0` at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub leading: C64,
    /// `2^{1/3} (sin theta0)^{1/3} (cos theta0/2)^{1/6} t^{1/6}`.
    pub modulus_formula: f64,
    /// Slope of `|gamma(w) - gamma(0)|` against `|w|`.
    pub slope: f64,
    /// Cauchy-Riemann residual of `gamma` as a function of `w`, across the cut of `beta`.
    pub cauchy_riemann: f64,
}

pub fn gamma_report(par: &ParametrixContext) -> Result<GammaReport> {
    let ctx = &par.model.ctx;
    let th = ctx.theta0;
    let leading = par.gamma_leading()?;
    let modulus_formula = 2f64.cbrt() * th.sin().cbrt() * (0.5 * th).cos().powf(1.0 / 6.0) * par.t.powf(1.0 / 6.0);
    let r = par.w_radius();
    let sizes: Vec<f64> = (0..4).map(|k| 0.01 * r * 2f64.powi(k)).collect();
    let mut devs = Vec::new();
    for &s in &sizes {
        let z = w_inverse(C64::from_polar(s, 2.5), par.t, ctx)?;
        devs.push((par.gamma(z, None)? - leading).norm());
    }
    let gamma_w = |w: C64| -> Result<C64> { par.gamma(w_inverse(w, par.t, ctx)?, None) };
    let h = 1e-4 * r;
    let mut cr: f64 = 0.0;
    for &(x, y) in &[(0.3, 0.3e-4), (0.5, -0.2e-4), (0.2, 0.1)] {
        let w = C64::new(x * r, y * r);
        let fx = (gamma_w(w + h)? - gamma_w(w - h)?) / (2.0 * h);
        let fy = (gamma_w(w + I * h)? - gamma_w(w - I * h)?) / (2.0 * h);
        cr = cr.max((fx + I * fy).norm() / fx.norm().max(1e-300));
    }
    Ok(GammaReport { leading, modulus_formula, slope: loglog_slope(&sizes, &devs), cauchy_riemann: cr })
}

/// Parametrix suite at one time: Airy pieces, jump on `Sigma_B`, `(2/3) w^{3/2} = t g`,
/// determinant, and the shape of `gamma`.
pub fn parametrix_report(par: &ParametrixContext) -> Result<Vec<ResidualReport>> {
    let ctx = &par.model.ctx;
    let loc = format!("xi={} t={}", ctx.xi, par.t);
    let mut out = vec![ResidualReport::below("M+ - M- v_par on Sigma_B", &loc, par.jump_residual(4)?, 1e-8)];
    let (mut tg, mut det): (f64, f64) = (0.0, 0.0);
    for z in par.disk_points(10)? {
        for f in [0.3, 0.7] {
            let zz = ctx.z0 + (z - ctx.z0) * f;
            let e = par.exponent(zz, None)?;
            tg = tg.max((e - par.t * g(zz, ctx)?).norm() / e.norm());
            det = det.max((par.matrix(zz, None)?.det() - 1.0).norm());
        }
    }
    out.push(ResidualReport::below("(2/3) w^{3/2} - t g (relative)", &loc, tg, 1e-8));
    out.push(ResidualReport::below("det M_par - 1", &loc, det, 1e-8));
    if !par.model.resonant_at_1 {
        let gr = gamma_report(par)?;
        out.push(ResidualReport::below(
            "|gamma(0)| vs closed form (relative)",
            &loc,
            (gr.leading.norm() / gr.modulus_formula - 1.0).abs(),
            1e-10,
        ));
        out.push(ResidualReport::near("gamma(w) - gamma(0) slope", &loc, gr.slope, 1.0, 0.15));
        out.push(ResidualReport::below("gamma Cauchy-Riemann", &loc, gr.cauchy_riemann, 1e-6));
    }
    Ok(out)
}

/// Argument of the leading `gamma`, in `(-pi, pi]`.
pub fn gamma_phase(par: &ParametrixContext) -> Result<f64> {
    Ok(par.gamma_leading()?.arg())
}

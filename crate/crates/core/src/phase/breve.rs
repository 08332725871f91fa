use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::quad::{integrate, QuadOptions};
use crate::cplx::{arg0, Side};
use crate::report::{loglog_slope, ResidualReport};
use crate::{LabError, Result, C64};

use super::gfun::sample_points;
use super::PhaseContext;

/// Number of Chebyshev intervals used to sample the reflection data on Sigma.
pub const SAMPLE_INTERVALS: usize = 512;

const OPTS: QuadOptions = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 };

/// `log(R(s)/R(-1))` on Sigma, sampled at Chebyshev-Lobatto nodes in the
/// angle and interpolated barycentrically. The logarithm is unwrapped
/// outward from `s = -1`, where it vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RSampler {
    pub theta0: f64,
    pub r_minus_one: C64,
    nodes: Vec<f64>,
    values: Vec<C64>,
}

impl RSampler {
    /// Sample `f` (the reflection data, already divided by `P^2`) on Sigma.
    pub fn from_fn<F: Fn(C64) -> Result<C64>>(theta0: f64, f: F) -> Result<Self> {
        let n = SAMPLE_INTERVALS;
        let r_minus_one = f(C64::new(-1.0, 0.0))?;
        if !(r_minus_one.norm() > 0.0) {
            return Err(LabError::InvalidData("reflection data vanish at -1".into()));
        }
        let nodes: Vec<f64> = (0..=n).map(|k| PI - (PI - theta0) * (PI * k as f64 / n as f64).cos()).collect();
        let mut values = nodes
            .iter()
            .map(|&phi| {
                let v = f(C64::from_polar(1.0, phi))? / r_minus_one;
                if !(v.norm() > 0.0) || !v.norm().is_finite() {
                    return Err(LabError::InvalidData(format!("reflection data vanish or blow up at angle {phi}")));
                }
                Ok(v.ln())
            })
            .collect::<Result<Vec<C64>>>()?;
        let mid = n / 2;
        for k in (0..mid).rev() {
            values[k] = unwrap_to(values[k], values[k + 1]);
        }
        for k in mid + 1..=n {
            values[k] = unwrap_to(values[k], values[k - 1]);
        }
        Ok(RSampler { theta0, r_minus_one, nodes, values })
    }

    /// `log(R/R(-1))` at angle `phi` in `[theta0, 2 pi - theta0]`.
    pub fn log_ratio(&self, phi: f64) -> C64 {
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        let last = self.nodes.len() - 1;
        for (k, (&x, &v)) in self.nodes.iter().zip(&self.values).enumerate() {
            let d = phi - x;
            if d == 0.0 {
                return v;
            }
            let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == last {
                w *= 0.5;
            }
            let c = w / d;
            num += v * c;
            den += c;
        }
        num / den
    }

    /// `R(s)/R(-1)` at angle `phi`.
    pub fn ratio(&self, phi: f64) -> C64 {
        self.log_ratio(phi).exp()
    }
}

fn unwrap_to(v: C64, reference: C64) -> C64 {
    let k = ((reference.im - v.im) / (2.0 * PI)).round();
    C64::new(v.re, v.im + 2.0 * PI * k)
}

/// Map `u` in `[0, pi]` to `phi = theta0 + (pi - theta0)(1 - cos u)` and return
/// `(phi, phi - theta0, 2 pi - theta0 - phi)` without cancellation.
fn angle_of(u: f64, theta0: f64) -> (f64, f64, f64) {
    let span = PI - theta0;
    let lo = 2.0 * span * (0.5 * u).sin().powi(2);
    let hi = 2.0 * span * (0.5 * u).cos().powi(2);
    (theta0 + lo, lo, hi)
}

fn u_of(phi: f64, theta0: f64) -> f64 {
    (1.0 - (phi - theta0) / (PI - theta0)).clamp(-1.0, 1.0).acos()
}

/// Plus-side `q` from the two distances to the ends of Sigma.
fn q_plus(ctx: &PhaseContext, phi: f64, lo: f64, hi: f64) -> C64 {
    ctx.q_plus_sign * 2.0 * ((0.5 * lo).sin() * (0.5 * hi).sin()).sqrt() * C64::from_polar(1.0, 0.5 * (phi + ctx.theta0))
}

/// `e^{i(theta0 + a)} - e^{i(theta0 + b)}` without cancellation for close angles.
fn chord(a: f64, b: f64, theta0: f64) -> C64 {
    C64::new(0.0, 2.0 * (0.5 * (a - b)).sin()) * C64::from_polar(1.0, theta0 + 0.5 * (a + b))
}

/// `(s, f(s) ds/du, ds/du)` along Sigma, `f = log(R/R(-1)) / q_+`.
fn density(u: f64, ctx: &PhaseContext, rs: &RSampler) -> (C64, C64, C64) {
    let (phi, lo, hi) = angle_of(u, ctx.theta0);
    let s = C64::from_polar(1.0, phi);
    let dphi = (PI - ctx.theta0) * u.sin();
    let ds = C64::new(0.0, 1.0) * s * dphi;
    let qp = q_plus(ctx, phi, lo, hi);
    let f = if dphi == 0.0 { C64::new(0.0, 0.0) } else { rs.log_ratio(phi) * ds / qp };
    (s, f, ds)
}

/// `int_Sigma f(s) ds / (s - z)`, split at the point of Sigma nearest to `z`.
fn cauchy(z: C64, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    let kernel = |u: f64| {
        let (s, fds, _) = density(u, ctx, rs);
        fds / (s - z)
    };
    let phi = arg0(z);
    if (z.norm() - 1.0).abs() < 0.1 && phi > ctx.theta0 && phi < 2.0 * PI - ctx.theta0 {
        let um = u_of(phi, ctx.theta0);
        Ok(integrate(kernel, 0.0, um, OPTS)? + integrate(kernel, um, PI, OPTS)?)
    } else {
        integrate(kernel, 0.0, PI, OPTS)
    }
}

/// `log d(z) = q(z)/(2 pi i) int_Sigma log(R(s)/R(-1)) ds / (q_+(s)(s - z))` off Sigma.
pub fn log_breve_d(z: C64, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    if ctx.on_sigma(z, 1e-12) {
        return Err(LabError::OnCut(format!("d at {z} lies on Sigma; request a side")));
    }
    let v = ctx.q(z)? / C64::new(0.0, 2.0 * PI) * cauchy(z, ctx, rs)?;
    crate::cplx::checked(v, "log of the conjugant")
}

pub fn breve_d(z: C64, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    Ok(log_breve_d(z, ctx, rs)?.exp())
}

/// One-sided boundary value of `log d` at `z = e^{i phi}` on Sigma (plus = inside),
/// from the subtracted Cauchy integral.
pub fn log_breve_d_side(z: C64, side: Side, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    let phi = arg0(z);
    if !(phi > ctx.theta0 && phi < 2.0 * PI - ctx.theta0) {
        return Err(LabError::Precondition(format!("{z} is not an interior point of Sigma")));
    }
    let lo = phi - ctx.theta0;
    let hi = 2.0 * PI - ctx.theta0 - phi;
    let zc = C64::from_polar(1.0, phi);
    let qz = q_plus(ctx, phi, lo, hi);
    let fz = rs.log_ratio(phi) / qz;
    let kernel = |u: f64| {
        let (_, fds, ds) = density(u, ctx, rs);
        let (_, lo_s, _) = angle_of(u, ctx.theta0);
        (fds - fz * ds) / chord(lo_s, lo, ctx.theta0)
    };
    let um = u_of(phi, ctx.theta0);
    let j = integrate(kernel, 0.0, um, OPTS)? + integrate(kernel, um, PI, OPTS)?;
    let log_mod = ((ctx.z0.conj() - zc).norm() / (ctx.z0 - zc).norm()).ln();
    let (l, q) = match side {
        Side::Plus => (C64::new(log_mod, 2.0 * PI - ctx.theta0), qz),
        Side::Minus => (C64::new(log_mod, -ctx.theta0), -qz),
    };
    crate::cplx::checked(q / C64::new(0.0, 2.0 * PI) * (j + fz * l), "boundary value of the conjugant")
}

pub fn breve_d_side(z: C64, side: Side, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    Ok(log_breve_d_side(z, side, ctx, rs)?.exp())
}

/// `I(z0) = sqrt(1 - z0^2) / (2 pi i) int_Sigma (r(s) - r(z0)) ds / (q_+(s)(s - z0))`,
/// `r = log(R/R(-1))`; returns `(I(z0), integral without the prefactor)`.
pub fn i_z0(ctx: &PhaseContext, rs: &RSampler) -> Result<(C64, C64)> {
    let r0 = rs.log_ratio(ctx.theta0);
    let tilde = integrate(
        |u| {
            let (phi, lo, hi) = angle_of(u, ctx.theta0);
            let s = C64::from_polar(1.0, phi);
            if u == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let ds = C64::new(0.0, 1.0) * s * (PI - ctx.theta0) * u.sin();
            (rs.log_ratio(phi) - r0) * ds / (q_plus(ctx, phi, lo, hi) * chord(lo, 0.0, ctx.theta0))
        },
        0.0,
        PI,
        // the difference quotient near z0 carries interpolation rounding
        QuadOptions::tol(1e-10),
    )? / C64::new(0.0, 2.0 * PI);
    let pref = (1.0 - ctx.z0 * ctx.z0).sqrt();
    Ok((pref * tilde, tilde))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreveReport {
    pub xi: f64,
    pub entries: Vec<ResidualReport>,
    /// Log-log slope of `|d_+/d_- - 1|` against the distance to `z0` along Sigma.
    pub dlim_slope: f64,
    pub i_z0: C64,
    /// `sqrt(z - z0)` coefficient of `log d_+` extrapolated along Sigma (same normalization as `i_z0`).
    pub i_fit: C64,
}

/// Two-level extrapolation of `d(z(1-h)) d(z(1+h))` to `h = 0`.
fn product_limit(z: C64, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    let f = |h: f64| -> Result<C64> { Ok(breve_d(z * (1.0 - h), ctx, rs)? * breve_d(z * (1.0 + h), ctx, rs)?) };
    let h = 1e-3;
    let (a, b, c) = (f(h)?, f(0.5 * h)?, f(0.25 * h)?);
    let (r1, r2) = (2.0 * b - a, 2.0 * c - b);
    Ok((4.0 * r2 - r1) / 3.0)
}

/// Checks of the conjugant: product on Sigma, inversion symmetry, the local
/// square-root law at `z0`, and the `I(z0)` coefficient.
pub fn breve_d_report(ctx: &PhaseContext, rs: &RSampler, seed: u64) -> Result<BreveReport> {
    let loc = format!("xi={}", ctx.xi);
    let mut entries = Vec::new();

    let (mut scp, mut scp_side): (f64, f64) = (0.0, 0.0);
    for k in 0..6 {
        let phi = ctx.theta0 + (2.0 * PI - 2.0 * ctx.theta0) * (k as f64 + 0.5) / 6.0;
        let z = C64::from_polar(1.0, phi);
        let target = rs.ratio(phi);
        scp = scp.max((product_limit(z, ctx, rs)? - target).norm());
        let side = breve_d_side(z, Side::Plus, ctx, rs)? * breve_d_side(z, Side::Minus, ctx, rs)?;
        scp_side = scp_side.max((side - target).norm());
    }
    entries.push(ResidualReport::below("d+ d- - R/R(-1)", &loc, scp, 1e-8));
    entries.push(ResidualReport::below("d+ d- - R/R(-1) (boundary form)", &loc, scp_side, 1e-8));

    let mut sym: f64 = 0.0;
    for z in sample_points(seed, 10, ctx) {
        sym = sym.max((breve_d(z.inv(), ctx, rs)? * breve_d(z, ctx, rs)? - 1.0).norm());
    }
    entries.push(ResidualReport::below("d(1/z) d(z) - 1", &loc, sym, 1e-8));

    let deltas = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let mut ys = Vec::new();
    let mut fits = Vec::new();
    let r0 = rs.log_ratio(ctx.theta0);
    for &d in &deltas {
        let phi = ctx.theta0 + d;
        let z = C64::from_polar(1.0, phi);
        let lp = log_breve_d_side(z, Side::Plus, ctx, rs)?;
        let lm = log_breve_d_side(z, Side::Minus, ctx, rs)?;
        ys.push(((lp - lm).exp() - 1.0).norm());
        let qp = q_plus(ctx, phi, d, 2.0 * PI - 2.0 * ctx.theta0 - d);
        fits.push((lp - 0.5 * r0) / qp);
    }
    let dlim_slope = loglog_slope(&deltas, &ys);
    entries.push(ResidualReport::near("|d+/d- - 1| slope", &loc, dlim_slope, 0.5, 0.1));

    // v(delta) = I + a sqrt(delta): extrapolate from the two smallest distances
    let (s1, s2) = (deltas[3].sqrt(), deltas[4].sqrt());
    let tilde_fit = (fits[4] * s1 - fits[3] * s2) / (s1 - s2);
    let (i_val, tilde) = i_z0(ctx, rs)?;
    let pref = i_val / tilde;
    let rel = (tilde_fit - tilde).norm() / tilde.norm().max(1e-300);
    entries.push(ResidualReport::below("I(z0) vs fitted coefficient", &loc, rel, 0.05));

    Ok(BreveReport { xi: ctx.xi, entries, dlim_slope, i_z0: i_val, i_fit: pref * tilde_fit })
}

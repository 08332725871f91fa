use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cplx::quad::{arc, integrate, QuadOptions};
use crate::cplx::Side;
use crate::report::ResidualReport;
use crate::{LabError, Result, C64};

use super::{phi, PhaseContext};

const OPTS: QuadOptions = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 };
/// Distance from `z0`, `conj z0` below which a point counts as an endpoint of Sigma.
const ENDPOINT_TOL: f64 = 1e-12;

/// `g'(s) = (1 + s) Q(s) / (2 s^2)`.
pub fn g_derivative(s: C64, ctx: &PhaseContext) -> Result<C64> {
    Ok((1.0 + s) * ctx.big_q(s)? / (2.0 * s * s))
}

fn gp(s: C64, ctx: &PhaseContext) -> C64 {
    g_derivative(s, ctx).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// `int_a^b g'` along a straight segment, with `u^2` substitution at `a`.
fn leg_from(a: C64, b: C64, ctx: &PhaseContext) -> Result<C64> {
    let d = b - a;
    integrate(|u| gp(a + d * (u * u), ctx) * d * (2.0 * u), 0.0, 1.0, OPTS)
}

/// `int_a^b g'` along a straight segment, with `u^2` substitution at `b`.
fn leg_to(a: C64, b: C64, ctx: &PhaseContext) -> Result<C64> {
    let d = b - a;
    integrate(|u| gp(b - d * (u * u), ctx) * d * (2.0 * u), 0.0, 1.0, OPTS)
}

fn is_endpoint(z: C64, ctx: &PhaseContext) -> bool {
    (z - ctx.z0).norm() < ENDPOINT_TOL || (z - ctx.z0.conj()).norm() < ENDPOINT_TOL
}

/// Whether the segment `z0 -> z` avoids Sigma and the positive half axis.
fn direct_segment_ok(z: C64, ctx: &PhaseContext) -> bool {
    let z0 = ctx.z0;
    let d = z - z0;
    if d.norm() == 0.0 {
        return true;
    }
    // second intersection with the unit circle
    let tau = -2.0 * (z0.conj() * d).re / d.norm_sqr();
    if tau > 1e-12 && tau < 1.0 - 1e-12 {
        let e = z0 + d * tau;
        if e.re <= ctx.c() + 1e-12 {
            return false;
        }
    }
    if z.im < 0.0 {
        let x = z0.re + (z.re - z0.re) * (z0.im / (z0.im - z.im));
        if x >= 0.0 || (x + 1.0).abs() < 1e-12 {
            return false;
        }
    }
    true
}

/// g along `z0 -> rho z0 -> (arc at rho) -> rho e^{i phi} -> z`, `phi = arg z` in `[0, 2 pi)`.
pub fn g_via_radius(z: C64, rho: f64, ctx: &PhaseContext) -> Result<C64> {
    if !(rho > 0.0) || (rho - 1.0).abs() < 1e-3 {
        return Err(LabError::Precondition(format!("intermediate radius {rho} must stay off the circle")));
    }
    let phi_z = crate::cplx::arg0(z);
    let p = ctx.z0 * rho;
    let mut total = leg_from(ctx.z0, p, ctx)?;
    total += arc(|s| gp(s, ctx), C64::new(0.0, 0.0), rho, ctx.theta0, phi_z, OPTS)?;
    let q = C64::from_polar(rho, phi_z);
    if (q - z).norm() > 0.0 {
        total += leg_to(q, z, ctx)?;
    }
    checked(total)
}

fn checked(v: C64) -> Result<C64> {
    crate::cplx::checked(v, "g-function")
}

/// `g(z) = int_{z0}^z g'(s) ds`, analytic in `C \ (Sigma u [0, inf))`. On the
/// positive half axis the limit from the upper half plane is returned.
pub fn g(z: C64, ctx: &PhaseContext) -> Result<C64> {
    if z.norm() == 0.0 || !z.norm().is_finite() {
        return Err(LabError::Precondition(format!("g is singular at {z}")));
    }
    if (z - ctx.z0).norm() < ENDPOINT_TOL {
        return Ok(C64::new(0.0, 0.0));
    }
    if ctx.on_sigma(z, 1e-14) && !is_endpoint(z, ctx) {
        return Err(LabError::OnCut(format!("g at {z} lies on Sigma; request a side")));
    }
    if direct_segment_ok(z, ctx) {
        return checked(leg_from(ctx.z0, z, ctx)?);
    }
    let r = z.norm();
    let rho = if (r - 1.0).abs() >= 0.05 {
        r
    } else if r <= 1.0 {
        0.5
    } else {
        2.0
    };
    g_via_radius(z, rho, ctx)
}

/// One-sided value of g on Sigma (plus = inside), integrating along Sigma from `z0`.
pub fn g_boundary(z: C64, side: Side, ctx: &PhaseContext) -> Result<C64> {
    if !ctx.on_sigma(z, 1e-9) {
        return g(z, ctx);
    }
    let target = crate::cplx::arg0(z).max(ctx.theta0);
    let span = target - ctx.theta0;
    let sgn = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    let v = integrate(
        |u| {
            let psi = ctx.theta0 + span * u * u;
            let s = C64::from_polar(1.0, psi);
            // g' ds = i (1 + s) Q / (2 s) dpsi
            C64::new(0.0, 1.0) * (1.0 + s) * ctx.big_q_on_circle(psi) * sgn / (2.0 * s) * (2.0 * span * u)
        },
        0.0,
        1.0,
        OPTS,
    )?;
    checked(v)
}

/// `Phi(z) - g(z)` for `|z| < 1`, integrated as
/// `Phi(z0) + int_{z0}^z 2 (1 - xi)^2 / (A + B) ds` with `A = 1 + s^2 + 2 xi s`,
/// `B = (1 + s) Q(s)`, which has no cancellation near the origin.
pub fn phi_minus_g(z: C64, ctx: &PhaseContext) -> Result<C64> {
    if !(z.norm() < 1.0) || z.im < 0.0 {
        return Err(LabError::Precondition(format!("Phi - g is evaluated in the closed upper half disk, got {z}")));
    }
    let xi = ctx.xi;
    let f = |s: C64| {
        let a = 1.0 + s * s + 2.0 * xi * s;
        let b = (1.0 + s) * ctx.big_q(s).unwrap_or(C64::new(f64::NAN, f64::NAN));
        2.0 * (1.0 - xi) * (1.0 - xi) / (a + b)
    };
    let d = z - ctx.z0;
    let int = integrate(|u| f(ctx.z0 + d * (u * u)) * d * (2.0 * u), 0.0, 1.0, OPTS)?;
    let phi0 = C64::new(0.0, ctx.theta0.sin() + xi * ctx.theta0);
    Ok(phi0 + int)
}

/// `lim_{z -> 0} (Phi - g)` from the upper half plane, linearly extrapolated
/// from `z = 1e-3, 1e-4`.
pub fn k_limit(ctx: &PhaseContext) -> Result<C64> {
    let f = |h: f64| -> Result<C64> {
        let z = C64::new(h, 0.0);
        Ok(phi(z, ctx.xi)? - g(z, ctx)?)
    };
    let (h1, h2) = (1e-3, 1e-4);
    let (f1, f2) = (f(h1)?, f(h2)?);
    Ok(f2 - (f1 - f2) * (h2 / (h1 - h2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GLemmaReport {
    pub xi: f64,
    /// Extrapolated `lim (Phi - g)`; its imaginary part is the branch constant `pi xi`.
    pub k: C64,
    pub dk_dxi: f64,
    pub entries: Vec<ResidualReport>,
}

/// Random points off Sigma and off the positive half axis, seeded.
pub(crate) fn sample_points(seed: u64, count: usize, ctx: &PhaseContext) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = C64::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(-PI..PI));
        if (z.norm() - 1.0).abs() > 0.05 && z.arg().abs() > 0.05 && (z - ctx.z0).norm() > 0.05 {
            out.push(z);
        }
    }
    out
}

/// Residual checks of the g-function properties at one `xi`.
pub fn g_lemma_report(xi: f64) -> Result<GLemmaReport> {
    let ctx = PhaseContext::new(xi)?;
    let loc = format!("xi={xi}");
    let mut entries = Vec::new();

    let gz0b = g(ctx.z0.conj(), &ctx)?;
    entries.push(ResidualReport::below("g(conj z0)", &loc, gz0b.norm(), 1e-9));
    let gz0b_sigma = g_boundary(ctx.z0.conj(), Side::Plus, &ctx)?;
    entries.push(ResidualReport::below("g+(conj z0) along Sigma", &loc, gz0b_sigma.norm(), 1e-9));

    let mut odd: f64 = 0.0;
    for z in sample_points(11, 10, &ctx) {
        odd = odd.max((g(z.inv(), &ctx)? + g(z, &ctx)?).norm());
    }
    entries.push(ResidualReport::below("g(1/z) + g(z)", &loc, odd, 1e-9));

    let (mut sum, mut not_pos) = (0.0f64, 0.0f64);
    for k in 0..8 {
        let psi = ctx.theta0 + (2.0 * PI - 2.0 * ctx.theta0) * (k as f64 + 0.5) / 8.0;
        let s = C64::from_polar(1.0, psi);
        let (gp_, gm) = (g_boundary(s, Side::Plus, &ctx)?, g_boundary(s, Side::Minus, &ctx)?);
        sum = sum.max((gp_ + gm).norm());
        not_pos = not_pos.max((-gp_.re).max(0.0) + gp_.im.abs());
    }
    entries.push(ResidualReport::below("g+ + g- on Sigma", &loc, sum, 1e-8));
    entries.push(ResidualReport::below("g+ real positive on Sigma", &loc, not_pos, 1e-8));

    let k = k_limit(&ctx)?;
    let h = 1e-3;
    let (kp, km) = (PhaseContext::new(xi + h)?.k_xi, PhaseContext::new(xi - h)?.k_xi);
    let dk_dxi = (kp - km) / (2.0 * h);
    entries.push(ResidualReport::below("dK/dxi + log xi", &loc, (dk_dxi + xi.ln()).abs(), 1e-4));
    entries.push(ResidualReport::below("Im K - pi xi", &loc, (k.im - PI * xi).abs(), 1e-6));
    let direct = phi_minus_g(C64::new(0.0, 0.0), &ctx)?;
    entries.push(ResidualReport::below("K extrapolated vs regularized", &loc, (k - direct).norm(), 1e-6));
    Ok(GLemmaReport { xi, k, dk_dxi, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_holds_at_several_xi() {
        for xi in [0.25, 0.5, 0.75] {
            let rep = g_lemma_report(xi).unwrap();
            for e in &rep.entries {
                assert!(e.pass, "{e:?}");
            }
        }
    }

    #[test]
    fn path_independence() {
        let ctx = PhaseContext::new(0.4).unwrap();
        for z in [C64::new(0.3, 0.4), C64::new(-0.2, 0.5), C64::new(0.6, -0.3), C64::new(1.5, 0.7)] {
            let a = g(z, &ctx).unwrap();
            let r = z.norm();
            let b = g_via_radius(z, if r < 1.0 { 0.3 } else { 2.5 }, &ctx).unwrap();
            assert!((a - b).norm() < 1e-10, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn vanishes_at_z0_and_continuous_along_sigma() {
        let ctx = PhaseContext::new(0.6).unwrap();
        assert_eq!(g(ctx.z0, &ctx).unwrap(), C64::new(0.0, 0.0));
        let mut prev = f64::INFINITY;
        for d in [1e-2, 1e-3, 1e-4, 1e-5] {
            let v = g_boundary(C64::from_polar(1.0, ctx.theta0 + d), Side::Plus, &ctx).unwrap().norm();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn boundary_matches_interior_limit() {
        let ctx = PhaseContext::new(0.5).unwrap();
        let s = C64::from_polar(1.0, 2.4);
        let inside = g(s * (1.0 - 1e-7), &ctx).unwrap();
        let outside = g(s * (1.0 + 1e-7), &ctx).unwrap();
        assert!((inside - g_boundary(s, Side::Plus, &ctx).unwrap()).norm() < 1e-5);
        assert!((outside - g_boundary(s, Side::Minus, &ctx).unwrap()).norm() < 1e-5);
    }

    #[test]
    fn k_matches_direct_limit() {
        let ctx = PhaseContext::new(0.3).unwrap();
        // the regularized integrand reaches the origin directly
        let direct = phi_minus_g(C64::new(0.0, 0.0), &ctx).unwrap();
        assert!((k_limit(&ctx).unwrap() - direct).norm() < 1e-7);
        // and Phi - g from the two evaluations agrees away from the origin
        let z = C64::new(0.2, 0.3);
        let a = phi(z, 0.3).unwrap() - g(z, &ctx).unwrap();
        assert!((a - phi_minus_g(z, &ctx).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn derivative_matches_quadrature() {
        let ctx = PhaseContext::new(0.35).unwrap();
        let z = C64::new(0.4, 0.6);
        let h = 1e-5;
        let fd = (g(z + h, &ctx).unwrap() - g(z - h, &ctx).unwrap()) / (2.0 * h);
        assert!((fd - g_derivative(z, &ctx).unwrap()).norm() < 1e-8);
    }
}

use std::f64::consts::PI;

use crate::cplx::Side;
use crate::{LabError, Result, C64};

use super::{cubic_coefficient, g, g_boundary, g_derivative, w_phase, PhaseContext};

/// `t^{2/3} (3 C / 2)^{2/3} e^{-i (theta0 + pi/2)}` with `C = cubic_coefficient`.
pub fn leading_coefficient(t: f64, ctx: &PhaseContext) -> C64 {
    (1.5 * cubic_coefficient(ctx.theta0) * t).powf(2.0 / 3.0) * w_phase(ctx.theta0)
}

fn cbrt_principal(z: C64) -> C64 {
    C64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

/// `(g, g')` at `z`; on Sigma (or within rounding of it) the plus-side values.
/// w depends on g only through g^2, so either side gives the same w.
fn g_near(z: C64, ctx: &PhaseContext) -> Result<(C64, C64)> {
    let boundary = || -> Result<(C64, C64)> {
        let s = z / z.norm();
        let dg = (1.0 + s) * ctx.big_q_on_circle(s.arg()) / (2.0 * s * s);
        Ok((g_boundary(s, Side::Plus, ctx)?, dg))
    };
    if ctx.on_sigma(z, 1e-13) {
        return boundary();
    }
    match (g(z, ctx), g_derivative(z, ctx)) {
        (Ok(v), Ok(d)) => Ok((v, d)),
        (Err(LabError::OnCut(_)), _) | (_, Err(LabError::OnCut(_))) => boundary(),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Leading form of the w-map, `c1 (z - z0)`.
pub fn w_leading(z: C64, t: f64, ctx: &PhaseContext) -> C64 {
    leading_coefficient(t, ctx) * (z - ctx.z0)
}

/// `w(z) = (3 t g(z) / 2)^{2/3}` near `z0`, on the branch with `w ~ c1 (z - z0)`;
/// Sigma near `z0` goes to the positive half axis.
pub fn w_map(z: C64, t: f64, ctx: &PhaseContext) -> Result<C64> {
    let lead = w_leading(z, t, ctx);
    if lead.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let big = 1.5 * t * g_near(z, ctx)?.0;
    // w^3 = big^2; pick the cube root closest to the leading form
    Ok(lead * cbrt_principal(big * big / (lead * lead * lead)))
}

/// `dw/dz = (2/3) w g'/g`, with the limit `c1` at `z0`.
pub fn w_derivative(z: C64, t: f64, ctx: &PhaseContext) -> Result<C64> {
    if (z - ctx.z0).norm() < 1e-12 {
        return Ok(leading_coefficient(t, ctx));
    }
    let w = w_map(z, t, ctx)?;
    let (v, d) = g_near(z, ctx)?;
    Ok(2.0 / 3.0 * w * d / v)
}

/// Solve `w(z) = target` by Newton's method started from the leading form.
pub fn w_inverse(target: C64, t: f64, ctx: &PhaseContext) -> Result<C64> {
    let c1 = leading_coefficient(t, ctx);
    let mut z = ctx.z0 + target / c1;
    let scale = target.norm().max(1e-300);
    for _ in 0..60 {
        let r = w_map(z, t, ctx)? - target;
        if r.norm() <= 1e-13 * scale {
            return Ok(z);
        }
        let step = r / w_derivative(z, t, ctx)?;
        z -= step;
        // below the accuracy of g the residual stagnates; a negligible step ends it
        if step.norm() <= 1e-15 * z.norm() {
            return Ok(z);
        }
    }
    Err(LabError::Precondition(format!("w-map inversion at {target} did not converge")))
}

/// Points of the t-independent contour `|w| = t^{2/3} (3C/2)^{2/3} rho` around `z0`.
pub fn disk_boundary(rho: f64, count: usize, ctx: &PhaseContext) -> Result<Vec<C64>> {
    let radius = leading_coefficient(1.0, ctx).norm() * rho;
    (0..count)
        .map(|k| {
            // start slightly off the positive axis so Newton never sits on Sigma
            let a = 2.0 * PI * (k as f64 + 0.5) / count as f64;
            w_inverse(C64::from_polar(radius, a), 1.0, ctx)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{cubic_power, local_cubic};
    use super::*;

    #[test]
    fn vanishes_at_z0_and_leading_phase() {
        let ctx = PhaseContext::new(0.5).unwrap();
        assert_eq!(w_map(ctx.z0, 10.0, &ctx).unwrap(), C64::new(0.0, 0.0));
        let c1 = leading_coefficient(1.0, &ctx);
        assert!((c1 / c1.norm() - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((c1.norm() - 1.0).abs() < 1e-15);
        let z = ctx.z0 + 1e-4 * C64::new(0.3, -0.8);
        let ratio = w_map(z, 5.0, &ctx).unwrap() / w_leading(z, 5.0, &ctx);
        assert!((ratio - 1.0).norm() < 1e-3);
    }

    #[test]
    fn sigma_maps_to_positive_axis() {
        for xi in [0.3, 0.5, 0.7] {
            let ctx = PhaseContext::new(xi).unwrap();
            for k in 1..=6 {
                let z = C64::from_polar(1.0, ctx.theta0 + 0.02 * k as f64);
                let w = w_map(z, 20.0, &ctx).unwrap();
                assert!(w.im.abs() < 1e-6 * w.norm() && w.re > 0.0, "{xi} {k}: {w}");
            }
        }
    }

    #[test]
    fn conformal_near_z0() {
        let ctx = PhaseContext::new(0.4).unwrap();
        let d0 = w_derivative(ctx.z0, 1.0, &ctx).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..16 {
            let z = ctx.z0 + C64::from_polar(9e-4, 2.0 * PI * (k as f64 + 0.25) / 16.0);
            let h = 1e-7;
            let fd = (w_map(z + h, 1.0, &ctx).unwrap() - w_map(z - h, 1.0, &ctx).unwrap()) / (2.0 * h);
            assert!(fd.norm() > 0.0);
            worst = worst.max((fd / d0 - 1.0).norm());
        }
        assert!(worst < 1e-2, "{worst}");
    }

    #[test]
    fn inverse_round_trip_and_boundary() {
        let ctx = PhaseContext::new(0.6).unwrap();
        let z = ctx.z0 + C64::new(0.05, -0.12);
        let w = w_map(z, 30.0, &ctx).unwrap();
        assert!((w_inverse(w, 30.0, &ctx).unwrap() - z).norm() < 1e-12);
        let pts = disk_boundary(0.1, 12, &ctx).unwrap();
        let r0 = leading_coefficient(1.0, &ctx).norm() * 0.1;
        for p in pts {
            assert!((w_map(p, 1.0, &ctx).unwrap().norm() - r0).abs() < 1e-12);
            // the same curve in z at every t
            assert!((w_map(p, 50.0, &ctx).unwrap().norm() - r0 * 50f64.powf(2.0 / 3.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn local_cubic_law() {
        for xi in [0.25, 0.5, 0.75] {
            let ctx = PhaseContext::new(xi).unwrap();
            let (_, ph) = local_cubic(ctx.theta0);
            let c = cubic_coefficient(ctx.theta0);
            for arg_w in [PI / 2.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0, 1.9 * PI] {
                let z = ctx.z0 + 1e-3 * C64::from_polar(1.0, arg_w) / w_phase(ctx.theta0);
                let ratio = g(z, &ctx).unwrap() / (c * ph * cubic_power(z, ctx.theta0));
                assert!((ratio - 1.0).norm() < 0.02, "{xi} {arg_w}: {ratio}");
            }
        }
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{Mat2C, Side};
use crate::phase::{breve_d, breve_d_side, g, g_boundary, phi, PhaseContext, RSampler};
use crate::report::{loglog_slope, ResidualReport};
use crate::{LabError, Result, C64};

/// Data needed to assemble the conjugated jump at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "on", rename_all = "snake_case")]
pub enum V3Inputs {
    /// Point of Sigma: `d_+/d_-` and `g_+`.
    Sigma { ratio: C64, g_plus: C64 },
    /// Point of the lens `C` inside the disk: `d`, continued `R`, `g`.
    Lens { d: C64, r: C64, g: C64 },
    /// Point of the mirrored lens `C*`: `d`, continued `conj R`, `g`.
    LensStar { d: C64, r_bar: C64, g: C64 },
}

/// Jump of the conjugated problem:
/// Sigma `[[0, -R(-1)], [R(-1), (d_+/d_-) e^{-2tg_+}]]`,
/// `C` `[[1, 0], [-d^{-2} R e^{2tg}, 1]]`, `C*` `[[1, d^2 conj(R) e^{-2tg}], [0, 1]]`.
pub fn v3_matrix(inputs: V3Inputs, t: f64, r_minus_one: f64) -> Mat2C {
    let (zero, one) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    match inputs {
        V3Inputs::Sigma { ratio, g_plus } => {
            let r = C64::new(r_minus_one, 0.0);
            Mat2C::new(zero, -r, r, ratio * (-2.0 * t * g_plus).exp())
        }
        V3Inputs::Lens { d, r, g } => Mat2C::new(one, zero, -(r / (d * d)) * (2.0 * t * g).exp(), one),
        V3Inputs::LensStar { d, r_bar, g } => Mat2C::new(one, d * d * r_bar * (-2.0 * t * g).exp(), zero, one),
    }
}

/// Inputs at a point of Sigma from the conjugant and the g-function.
pub fn sigma_inputs(z: C64, ctx: &PhaseContext, rs: &RSampler) -> Result<V3Inputs> {
    let ratio = breve_d_side(z, Side::Plus, ctx, rs)? / breve_d_side(z, Side::Minus, ctx, rs)?;
    Ok(V3Inputs::Sigma { ratio, g_plus: g_boundary(z, Side::Plus, ctx)? })
}

/// `u(z) = (d_+/d_- - 1) e^{-2 t g_+}` on Sigma.
pub fn u_on_sigma(z: C64, t: f64, ctx: &PhaseContext, rs: &RSampler) -> Result<C64> {
    match sigma_inputs(z, ctx, rs)? {
        V3Inputs::Sigma { ratio, g_plus } => Ok((ratio - 1.0) * (-2.0 * t * g_plus).exp()),
        _ => Err(LabError::Precondition("sigma inputs expected".into())),
    }
}

/// Slope of `|u(z)| e^{2 t Re g_+}` against `|z - z0|` along Sigma near `z0`.
pub fn u_slope(t: f64, ctx: &PhaseContext, rs: &RSampler) -> Result<f64> {
    let deltas = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let mut ys = Vec::with_capacity(deltas.len());
    let mut xs = Vec::with_capacity(deltas.len());
    for &d in &deltas {
        let z = C64::from_polar(1.0, ctx.theta0 + d);
        let gp = g_boundary(z, Side::Plus, ctx)?;
        ys.push(u_on_sigma(z, t, ctx, rs)?.norm() * (2.0 * t * gp.re).exp());
        xs.push((z - ctx.z0).norm());
    }
    Ok(loglog_slope(&xs, &ys))
}

/// Jump on the unit circle, `[[1 - |R|^2, -conj(R) e^{-2t Phi}], [R e^{2t Phi}, 1]]`.
pub fn circle_jump_t(z: C64, r: C64, t: f64, xi: f64) -> Result<Mat2C> {
    let e = (2.0 * t * phi(z, xi)?).exp();
    Ok(Mat2C::new(C64::new(1.0 - r.norm_sqr(), 0.0), -r.conj() / e, r * e, C64::new(1.0, 0.0)))
}

/// `|v(z)^{-1} - sigma1 v(1/z) sigma1|`.
pub fn matsym_residual(v: &Mat2C, v_inv_point: &Mat2C) -> Result<f64> {
    Ok(v.inv()?.dist(&v_inv_point.sigma1_conj()))
}

/// Symmetry and determinant checks of the assembled jumps for reflection data
/// given by the analytic function `r` (with `R(conj z) = conj R(z)` on the circle).
pub fn jump_symmetry_report<F: Fn(C64) -> C64>(
    t: f64,
    ctx: &PhaseContext,
    rs: &RSampler,
    r_minus_one: f64,
    r: F,
) -> Result<Vec<ResidualReport>> {
    let loc = format!("xi={} t={t}", ctx.xi);
    let r_bar = |z: C64| r((z.conj()).inv()).conj();
    let (mut sym, mut det): (f64, f64) = (0.0, 0.0);
    // circle: z and conj z, away from the stationary points
    for k in 0..6 {
        let z = C64::from_polar(1.0, 0.3 + 0.45 * k as f64);
        let (v, w) = (circle_jump_t(z, r(z), t, ctx.xi)?, circle_jump_t(z.conj(), r(z.conj()), t, ctx.xi)?);
        sym = sym.max(matsym_residual(&v, &w)?);
        det = det.max((v.det() - 1.0).norm() / (1.0 + v.max_abs()));
    }
    // Sigma: z and conj z
    for k in 0..4 {
        let z = C64::from_polar(1.0, ctx.theta0 + (PI - ctx.theta0) * (k as f64 + 0.5) / 4.0);
        let v = v3_matrix(sigma_inputs(z, ctx, rs)?, t, r_minus_one);
        let w = v3_matrix(sigma_inputs(z.conj(), ctx, rs)?, t, r_minus_one);
        sym = sym.max(matsym_residual(&v, &w)?);
        det = det.max((v.det() - 1.0).norm());
    }
    // lens C inside the circle against C* outside
    for k in 0..4 {
        let z = C64::from_polar(0.85, ctx.theta0 + (2.0 * PI - 2.0 * ctx.theta0) * (k as f64 + 0.5) / 4.0);
        let zi = z.inv();
        let v = v3_matrix(V3Inputs::Lens { d: breve_d(z, ctx, rs)?, r: r(z), g: g(z, ctx)? }, t, r_minus_one);
        let w = v3_matrix(V3Inputs::LensStar { d: breve_d(zi, ctx, rs)?, r_bar: r_bar(zi), g: g(zi, ctx)? }, t, r_minus_one);
        sym = sym.max(matsym_residual(&v, &w)? / (1.0 + v.max_abs()));
        det = det.max((v.det() - 1.0).norm().max((w.det() - 1.0).norm()));
    }
    Ok(vec![
        ResidualReport::below("v(z)^{-1} - s1 v(1/z) s1", &loc, sym, 1e-8),
        ResidualReport::below("det v - 1", &loc, det, 1e-10),
    ])
}

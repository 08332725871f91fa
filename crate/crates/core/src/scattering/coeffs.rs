use serde::{Deserialize, Serialize};

use crate::cplx::Side;
use crate::{LabError, Result, C64};

use super::jost::{jost_right, wronskian_at, JostPair};
use super::lattice::LatticeData;

/// Site right of the support, where `psi(z)` and `psi(1/z)` are exact powers.
fn right_site(data: &LatticeData) -> i64 {
    (data.right_support() + 1).clamp(data.n_min, data.n_max())
}

/// `T(z)`; points of `I` need a side.
pub fn transmission(z: C64, data: &LatticeData, side: Option<Side>) -> Result<C64> {
    JostPair::new(z, data, side)?.transmission(data)
}

/// Reflection coefficient on the unit circle from the scattering relation
/// `T psi1 = conj(psi) + R psi` solved at two neighbouring sites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSample {
    pub z: C64,
    pub r: C64,
    /// Coefficient of `conj(psi)` in the solve; equals 1 for consistent data.
    pub alpha: C64,
    /// Difference between the solves at two site pairs.
    pub pair_discrepancy: f64,
}

pub fn reflection(z: C64, data: &LatticeData) -> Result<ReflectionSample> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(LabError::Precondition(format!("reflection on the unit circle needs |z| = 1, got {z}")));
    }
    if (z.im).abs() < 1e-6 {
        return Err(LabError::Precondition(format!("two-site solve is singular at z = {z}")));
    }
    let pair = JostPair::new(z, data, None)?;
    let t = pair.transmission(data)?;
    let solve = |s: i64| -> (C64, C64) {
        let (p0, p1) = (pair.psi.value(s), pair.psi.value(s + 1));
        let (c0, c1) = (p0.conj(), p1.conj());
        let (f0, f1) = (t * pair.psi1.value(s), t * pair.psi1.value(s + 1));
        let det = c0 * p1 - c1 * p0;
        ((f0 * p1 - f1 * p0) / det, (c0 * f1 - c1 * f0) / det)
    };
    let s = right_site(data);
    let (a1, r1) = solve(s);
    let (a2, r2) = solve(s + 1);
    let r = crate::cplx::checked(0.5 * (r1 + r2), "reflection coefficient")?;
    Ok(ReflectionSample { z, r, alpha: 0.5 * (a1 + a2), pair_discrepancy: (r1 - r2).norm().max((a1 - a2).norm()) })
}

/// Cancellation factor above which the continued `R` is rejected.
pub const MAX_CONTINUATION_COND: f64 = 1e8;

/// `R(z) = -<psi1, psi(1/z)> / <psi1, psi(z)>`, the continuation of the
/// reflection coefficient into the disk; points of `I` need a side.
pub fn reflection_continued(z: C64, data: &LatticeData, side: Option<Side>) -> Result<C64> {
    Ok(reflection_continued_cond(z, data, side)?.0)
}

/// Continued `R` together with the cancellation factor of its numerator,
/// `a (|f(n-1) g(n)| + |g(n-1) f(n)|) / |<f, g>|`.
pub fn reflection_continued_cond(z: C64, data: &LatticeData, side: Option<Side>) -> Result<(C64, f64)> {
    let pair = JostPair::new(z, data, side)?;
    let psi_inv = jost_right(z.inv(), data)?;
    let s = right_site(data);
    let num = wronskian_at(&pair.psi1, &psi_inv, data, s)?;
    let den = wronskian_at(&pair.psi1, &pair.psi, data, s)?;
    let f = &pair.psi1;
    let g = &psi_inv;
    let size = data.a(s - 1) * ((f.value(s - 1) * g.value(s)).norm() + (g.value(s - 1) * f.value(s)).norm());
    let cond = if num.norm() > 0.0 { size / num.norm() } else { f64::INFINITY };
    Ok((crate::cplx::checked(-num / den, "continued reflection coefficient")?, cond))
}

fn interior_of_i(z: f64, data: &LatticeData) -> Result<()> {
    let g = data.gaps()?;
    if !(z > g.q2 && z < g.q1) {
        return Err(LabError::Precondition(format!("{z} is not interior to I = [{}, {}]", g.q2, g.q1)));
    }
    Ok(())
}

/// `chi(z) = 2a (zeta - 1/zeta) / (1/z - z) |T(z)|^2` with `zeta` taken on the
/// plus side of `I`. The value is purely imaginary on `I`.
pub fn chi(z: f64, data: &LatticeData) -> Result<C64> {
    interior_of_i(z, data)?;
    let zc = C64::new(z, 0.0);
    let pair = JostPair::new(zc, data, Some(Side::Plus))?;
    let t = pair.transmission(data)?;
    let zt = pair.zeta;
    Ok(2.0 * data.a_bg * (zt - zt.inv()) / (1.0 / z - z) * t.norm_sqr())
}

/// Terms of the identity `R_-(z) + chi(z) - R_+(z) = 0` on `I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PluckerTerms {
    pub z: f64,
    pub r_plus: C64,
    pub r_minus: C64,
    pub chi: C64,
    pub residual: f64,
}

/// Requires a declared decay rate (if any) above `-ln q1`, the condition under
/// which `R` continues to both sides of `I`. The numerical counterpart, a
/// bounded cancellation factor, is checked per point by [`plucker_terms`].
pub fn plucker_precondition(data: &LatticeData) -> Result<()> {
    let g = data.gaps()?;
    if let Some(nu) = data.nu {
        let need = -g.q1.ln();
        if nu <= need {
            return Err(LabError::Precondition(format!(
                "decay rate nu = {nu} must exceed -ln q1 = {need} to continue R onto I"
            )));
        }
    }
    Ok(())
}

pub fn plucker_terms(z: f64, data: &LatticeData) -> Result<PluckerTerms> {
    plucker_precondition(data)?;
    interior_of_i(z, data)?;
    let zc = C64::new(z, 0.0);
    let (r_plus, c1) = reflection_continued_cond(zc, data, Some(Side::Plus))?;
    let (r_minus, c2) = reflection_continued_cond(zc, data, Some(Side::Minus))?;
    let cond = c1.max(c2);
    if cond > MAX_CONTINUATION_COND {
        return Err(LabError::Precondition(format!(
            "continuation of R to z = {z} cancels a factor {cond:.1e}; the data decay too slowly to the right"
        )));
    }
    let c = chi(z, data)?;
    Ok(PluckerTerms { z, r_plus, r_minus, chi: c, residual: (r_minus + c - r_plus).norm() })
}

pub fn plucker_residual(z: f64, data: &LatticeData) -> Result<f64> {
    Ok(plucker_terms(z, data)?.residual)
}

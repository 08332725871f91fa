use serde::{Deserialize, Serialize};

use crate::cplx::{Mat2C, RowVec, Side};
use crate::{LabError, Result, C64};

use super::coeffs::{chi, reflection};
use super::jost::JostPair;
use super::lattice::LatticeData;

/// `m(z) = (T psi1(n) z^n, psi(n) z^(-n))` for `|z| <= 1`, extended by
/// `m(1/z) = m(z) sigma1`. On `I` and `I*` a side is required; on the unit
/// circle the formula gives the limit from inside.
pub fn build_m(z: C64, n: i64, data: &LatticeData, side: Option<Side>) -> Result<RowVec> {
    if z.norm() > 1.0 + 1e-14 {
        // z - i0 on I* maps to 1/z + i0 on I
        return Ok(build_m(z.inv(), n, data, side.map(Side::flip))?.swap());
    }
    let pair = JostPair::new(z, data, side)?;
    let t = pair.transmission(data)?;
    let m1 = t * pair.psi1.times_power(n, z.ln());
    let m2 = pair.psi.reduced(n);
    if !(m1.is_finite() && m2.is_finite()) {
        return Err(LabError::NonFinite("vector m"));
    }
    Ok(RowVec(m1, m2))
}

/// Limit of `m` on the unit circle from the given side (plus = inside).
pub fn build_m_circle(z: C64, n: i64, data: &LatticeData, side: Side) -> Result<RowVec> {
    match side {
        Side::Plus => build_m(z, n, data, None),
        Side::Minus => Ok(build_m(z.conj(), n, data, None)?.swap()),
    }
}

fn check_off_resonance(z: C64, data: &LatticeData) -> Result<()> {
    let g = data.gaps()?;
    for p in [-1.0, 1.0, g.q1, g.q2] {
        if (z - p).norm() < 1e-9 {
            return Err(LabError::Precondition(format!("jump check skipped at the band edge {p}")));
        }
    }
    Ok(())
}

/// Jump matrix on the unit circle for the data's own time:
/// `[[0, -conj(R) z^(-2n)], [R z^(2n), 1]]`.
pub fn circle_jump(r: C64, z: C64, n: i64) -> Mat2C {
    let e = z.powi(2 * n as i32);
    Mat2C::new(C64::new(0.0, 0.0), -r.conj() / e, r * e, C64::new(1.0, 0.0))
}

/// Jump matrix on `I`: `[[1, 0], [chi z^(2n), 1]]`.
pub fn interval_jump(chi: C64, z: f64, n: i64) -> Mat2C {
    let one = C64::new(1.0, 0.0);
    Mat2C::new(one, C64::new(0.0, 0.0), chi * z.powi(2 * n as i32), one)
}

/// `|m_+ - m_- v|` at a point of the unit circle.
pub fn m_jump_residual_circle(z: C64, n: i64, data: &LatticeData) -> Result<f64> {
    check_off_resonance(z, data)?;
    let r = reflection(z, data)?.r;
    let mp = build_m_circle(z, n, data, Side::Plus)?;
    let mm = build_m_circle(z, n, data, Side::Minus)?;
    Ok(mp.dist(mm.mul_mat(&circle_jump(r, z, n))))
}

/// `|m_+ - m_- v|` at an interior point of `I`.
pub fn m_jump_residual_interval(x: f64, n: i64, data: &LatticeData) -> Result<f64> {
    let z = C64::new(x, 0.0);
    check_off_resonance(z, data)?;
    let c = chi(x, data)?;
    let mp = build_m(z, n, data, Some(Side::Plus))?;
    let mm = build_m(z, n, data, Some(Side::Minus))?;
    Ok(mp.dist(mm.mul_mat(&interval_jump(c, x, n))))
}

/// `|m(1/z) - m(z) sigma1|`.
pub fn m_symmetry_residual(z: C64, n: i64, data: &LatticeData) -> Result<f64> {
    let a = build_m(z.inv(), n, data, None)?;
    let b = build_m(z, n, data, None)?.swap();
    Ok(a.dist(b))
}

const RICHARDSON_H: f64 = 1e-3;

/// Two-level Richardson extrapolation of an even expansion `f(h) = f0 + c h^2 + d h^4 + ...`.
fn extrapolate<F: Fn(f64) -> Result<RowVec>>(f: F) -> Result<RowVec> {
    let (a, b, c) = (f(RICHARDSON_H)?, f(0.5 * RICHARDSON_H)?, f(0.25 * RICHARDSON_H)?);
    let step = |x: C64, y: C64, z: C64| {
        let (r1, r2) = ((4.0 * y - x) / 3.0, (4.0 * z - y) / 3.0);
        (16.0 * r2 - r1) / 15.0
    };
    Ok(RowVec(step(a.0, b.0, c.0), step(a.1, b.1, c.1)))
}

/// `m(0)`, extrapolated from symmetric points on the real axis.
pub fn m_at_zero(n: i64, data: &LatticeData) -> Result<RowVec> {
    extrapolate(|h| {
        let (p, m) = (build_m(C64::new(h, 0.0), n, data, None)?, build_m(C64::new(-h, 0.0), n, data, None)?);
        Ok(RowVec(0.5 * (p.0 + m.0), 0.5 * (p.1 + m.1)))
    })
}

/// `m'(0)`, by extrapolated central differences.
pub fn m_derivative_at_zero(n: i64, data: &LatticeData) -> Result<RowVec> {
    extrapolate(|h| {
        let (p, m) = (build_m(C64::new(h, 0.0), n, data, None)?, build_m(C64::new(-h, 0.0), n, data, None)?);
        Ok(RowVec((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h)))
    })
}

/// Behaviour of `m` at the origin against the product formula
/// `m1(z) = prod_{j >= n} 2a(j) (1 + 2z sum b(m)) + O(z^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallZReport {
    pub n: i64,
    pub m1_0: C64,
    pub m2_0: C64,
    /// `|m1(0) m2(0) - 1|`
    pub normalization_residual: f64,
    pub product: f64,
    /// `|m1(0) / prod - 1|`
    pub leading_residual: f64,
    /// `m1'(0) / m1(0)`
    pub log_derivative: f64,
    /// `m2'(0) / m2(0)`
    pub log_derivative_m2: f64,
    /// `2 sum_{m > n} b(m)`
    pub sum_from_next: f64,
    /// `2 sum_{m >= n} b(m)`
    pub sum_from_n: f64,
}

pub fn small_z_report(n: i64, data: &LatticeData) -> Result<SmallZReport> {
    let m0 = m_at_zero(n, data)?;
    let dm = m_derivative_at_zero(n, data)?;
    let top = data.n_max();
    let product: f64 = (n..=top).map(|j| 2.0 * data.a(j)).product();
    let tail: f64 = (n + 1..=top).map(|m| data.b(m)).sum();
    Ok(SmallZReport {
        n,
        m1_0: m0.0,
        m2_0: m0.1,
        normalization_residual: (m0.0 * m0.1 - 1.0).norm(),
        product,
        leading_residual: (m0.0 / product - 1.0).norm(),
        log_derivative: (dm.0 / m0.0).re,
        log_derivative_m2: (dm.1 / m0.1).re,
        sum_from_next: 2.0 * tail,
        sum_from_n: 2.0 * (tail + data.b(n)),
    })
}

//! Square and fourth roots with the cut placed on the arc Sigma.
//!
//! Sigma is the arc of the circle through `z0`, `1/z0` and `-1` that contains
//! `-1`; for `|z0| = 1` it is `{z in T : Re z <= Re z0}`. A Moebius map sends
//! Sigma onto the negative half axis, so principal roots of the mapped value
//! are analytic off Sigma.

use crate::{LabError, Result, C64};
use serde::{Deserialize, Serialize};

/// One-sided boundary value on an oriented contour. `Plus` is the left side.
/// On Sigma (oriented from `z0` to `1/z0` through `-1`) the plus side is `|z| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

struct SigmaMap {
    z0: C64,
    z1: C64,
    k: C64,
    c: C64,
}

impl SigmaMap {
    fn new(z0: C64) -> Result<Self> {
        let z1 = z0.inv();
        let m_at_minus_one = (C64::new(-1.0, 0.0) - z0) / (C64::new(-1.0, 0.0) - z1);
        if !(m_at_minus_one.norm() > 0.0) || !m_at_minus_one.norm().is_finite() {
            return Err(LabError::Precondition(format!("degenerate arc for z0 = {z0}")));
        }
        let k = -m_at_minus_one.conj() / m_at_minus_one.norm();
        let mut c = (-z0 / k).sqrt();
        let mut sm = SigmaMap { z0, z1, k, c };
        let want = (-z0).sqrt();
        if (sm.raw(C64::new(0.0, 0.0)) - want).norm() > (sm.raw(C64::new(0.0, 0.0)) + want).norm() {
            c = -c;
            sm.c = c;
        }
        Ok(sm)
    }

    fn mobius(&self, z: C64) -> C64 {
        self.k * (z - self.z0) / (z - self.z1)
    }

    fn raw(&self, z: C64) -> C64 {
        if z == self.z1 {
            return C64::new(0.0, 0.0);
        }
        self.c * (z - self.z1) * self.mobius(z).sqrt()
    }

    fn on_cut(&self, z: C64) -> bool {
        if z == self.z1 || z == self.z0 {
            return false;
        }
        let w = self.mobius(z);
        w.re < 0.0 && w.im.abs() <= 1e-13 * w.norm()
    }
}

/// `q(z, z0) = sqrt((z0 - z)(z0 z - 1))`, analytic off Sigma, `q(0) = sqrt(-z0)` (principal).
pub fn szego_root(z: C64, z0: C64) -> Result<C64> {
    let m = SigmaMap::new(z0)?;
    if m.on_cut(z) {
        return Err(LabError::OnCut(format!("szego_root at {z} lies on Sigma; request a side")));
    }
    Ok(m.raw(z))
}

/// Boundary value of `q` from the requested side (off Sigma this is just `q(z)`).
pub fn szego_root_side(z: C64, z0: C64, side: Side) -> Result<C64> {
    let m = SigmaMap::new(z0)?;
    if !m.on_cut(z) {
        return Ok(m.raw(z));
    }
    let w = m.mobius(z);
    let v = m.c * (z - m.z1) * C64::new(0.0, w.norm().sqrt());
    let probe = m.raw(side_point(z, side));
    Ok(if (v - probe).norm() <= (v + probe).norm() { v } else { -v })
}

fn side_point(z: C64, side: Side) -> C64 {
    let eps = 1e-7;
    match side {
        Side::Plus => z * (1.0 - eps),
        Side::Minus => z * (1.0 + eps),
    }
}

fn quartic_ratio(z: C64, z0: C64) -> C64 {
    (z0 * z - 1.0) / (z0 - z)
}

/// `((z0 z - 1)/(z0 - z))^{s/4}`, principal fourth root (cut on the negative axis, `1^{1/4} = 1`).
pub fn quartic_ratio_root(z: C64, z0: C64, exponent_sign: i8) -> Result<C64> {
    let r = quartic_ratio(z, z0);
    if !(r.re.is_finite() && r.im.is_finite()) {
        return Err(LabError::NonFinite("quartic ratio"));
    }
    if r.re <= 0.0 && r.im.abs() <= 1e-13 * r.norm().max(1e-300) {
        return Err(LabError::OnCut(format!("quartic ratio at {z} is on the negative axis")));
    }
    let q = r.sqrt().sqrt();
    Ok(if exponent_sign >= 0 { q } else { q.inv() })
}

/// Both one-sided values `(plus, minus)` of the fourth root at a point of Sigma.
pub fn quartic_ratio_root_sides(z: C64, z0: C64, exponent_sign: i8) -> Result<(C64, C64)> {
    let r = quartic_ratio(z, z0);
    let mag = r.norm().powf(0.25);
    let up = C64::from_polar(mag, std::f64::consts::FRAC_PI_4);
    let down = up.conj();
    let probe_plus = quartic_ratio(side_point(z, Side::Plus), z0);
    let (p, m) = if probe_plus.im >= 0.0 { (up, down) } else { (down, up) };
    Ok(if exponent_sign >= 0 { (p, m) } else { (p.inv(), m.inv()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn z0_of(theta: f64) -> C64 {
        C64::from_polar(1.0, theta)
    }

    #[test]
    fn vanishes_at_branch_points() {
        let z0 = z0_of(2.0);
        assert_eq!(szego_root(z0, z0).unwrap(), C64::new(0.0, 0.0));
        assert!(szego_root(z0.conj(), z0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn reference_value_at_origin() {
        let q = szego_root(C64::new(0.0, 0.0), C64::new(0.0, 1.0)).unwrap();
        let want = C64::from_polar(1.0, -PI / 4.0);
        assert!((q - want).norm() < 1e-15);
    }

    #[test]
    fn squares_back() {
        let z0 = z0_of(1.3);
        for z in [C64::new(0.2, 0.1), C64::new(-3.0, 2.0), C64::new(0.5, -0.9), C64::new(1.0, 0.0)] {
            let q = szego_root(z, z0).unwrap();
            assert!((q * q - (z0 - z) * (z0 * z - 1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn boundary_values_flip_sign_on_sigma() {
        let th = 1.1;
        let z0 = z0_of(th);
        for k in 1..=5 {
            let phi = th + (2.0 * PI - 2.0 * th) * k as f64 / 6.0;
            let s = C64::from_polar(1.0, phi);
            let p = szego_root_side(s, z0, Side::Plus).unwrap();
            let m = szego_root_side(s, z0, Side::Minus).unwrap();
            assert!((p + m).norm() < 1e-12 && p.norm() > 1e-3);
            let inner = szego_root(s * (1.0 - 1e-9), z0).unwrap();
            assert!((inner - p).norm() < 1e-6);
            assert!(szego_root(s, z0).is_err());
        }
    }

    #[test]
    fn continuous_around_loop_off_sigma() {
        let z0 = z0_of(2.2);
        let centre = C64::new(0.6, 0.1);
        let start = szego_root(centre + 0.3, z0).unwrap();
        let mut prev = start;
        let n = 2000;
        for j in 1..=n {
            let z = centre + C64::from_polar(0.3, 2.0 * PI * j as f64 / n as f64);
            let q = szego_root(z, z0).unwrap();
            assert!((q - prev).norm() < 1e-2);
            prev = q;
        }
        assert!((prev - start).norm() < 1e-12);
    }

    #[test]
    fn quartic_root_examples() {
        let z0 = C64::new(0.0, 1.0);
        assert!((quartic_ratio_root(C64::new(1.0, 0.0), z0, 1).unwrap() - 1.0).norm() < 1e-15);
        let b0 = quartic_ratio_root(C64::new(0.0, 0.0), z0, 1).unwrap();
        assert!((b0 - C64::from_polar(1.0, PI / 8.0)).norm() < 1e-15);
        let zs = [C64::new(0.3, 0.4), C64::new(-2.0, 0.5), C64::new(1.5, -1.0), C64::new(0.1, -0.2)];
        for z in zs {
            let p = quartic_ratio_root(z, z0, 1).unwrap() * quartic_ratio_root(z.inv(), z0, 1).unwrap();
            assert!((p - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn quartic_sides_jump_by_i() {
        let z0 = z0_of(1.9);
        let s = C64::from_polar(1.0, 2.8);
        let (p, m) = quartic_ratio_root_sides(s, z0, 1).unwrap();
        let inner = quartic_ratio_root(s * (1.0 - 1e-10), z0, 1).unwrap();
        assert!((p - inner).norm() < 1e-6);
        assert!((p / m - C64::new(0.0, 1.0)).norm() < 1e-12 || (p / m + C64::new(0.0, 1.0)).norm() < 1e-12);
    }
}

use crate::cplx::Side;
use crate::{LabError, Result, C64};

use super::lattice::LatticeData;

const RESCALE_AT: f64 = 1e150;

/// Joukowsky variable `lambda = (z + 1/z) / 2`.
pub fn lambda_of_z(z: C64) -> C64 {
    0.5 * (z + z.inv())
}

/// `zeta(z)`: either a single value or, on the cut, both boundary values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZetaValue {
    Regular(C64),
    /// `plus` is the limit from below for `|z| < 1` (above for `|z| > 1`).
    OnCut { plus: C64, minus: C64 },
}

fn mu_of_z(z: C64, a_bg: f64, b_bg: f64) -> C64 {
    (lambda_of_z(z) - b_bg) / a_bg
}

/// Root of `zeta^2 - mu zeta + 1 = 0` with `|zeta| <= 1`, so that
/// `lambda = b + a (zeta + 1/zeta)`.
pub fn zeta_of_z(z: C64, a_bg: f64, b_bg: f64) -> ZetaValue {
    let mu = mu_of_z(z, a_bg, b_bg);
    if mu.re.abs() < 2.0 && mu.im.abs() <= 1e-14 * (1.0 + mu.re.abs()) {
        if z.im == 0.0 {
            let plus = zeta_on_cut(z.re, mu.re, Side::Plus);
            return ZetaValue::OnCut { plus, minus: plus.conj() };
        }
        // Unit circle inside the left band's image (only when the gap
        // condition fails): take the limit from inside the disk.
        let r = (4.0 - mu.re * mu.re).max(0.0).sqrt();
        let sgn = if z.im > 0.0 { 1.0 } else { -1.0 };
        return ZetaValue::Regular(C64::new(0.5 * mu.re, 0.5 * sgn * r));
    }
    let s = mu * (C64::new(1.0, 0.0) - 4.0 / (mu * mu)).sqrt();
    ZetaValue::Regular(2.0 / (mu + s))
}

fn zeta_on_cut(z: f64, mu: f64, side: Side) -> C64 {
    // Plus side of I (z - i0 inside the disk) moves mu into the upper half plane.
    let up = (z.abs() < 1.0) == (side == Side::Plus);
    let r = (4.0 - mu * mu).max(0.0).sqrt();
    if up {
        C64::new(0.5 * mu, -0.5 * r)
    } else {
        C64::new(0.5 * mu, 0.5 * r)
    }
}

/// `zeta(z)` away from the cut; on the cut the requested side is returned.
pub fn zeta_at(z: C64, a_bg: f64, b_bg: f64, side: Option<Side>) -> Result<C64> {
    match (zeta_of_z(z, a_bg, b_bg), side) {
        (ZetaValue::Regular(v), _) => Ok(v),
        (ZetaValue::OnCut { plus, .. }, Some(Side::Plus)) => Ok(plus),
        (ZetaValue::OnCut { minus, .. }, Some(Side::Minus)) => Ok(minus),
        (ZetaValue::OnCut { .. }, None) => Err(LabError::OnCut(format!("z = {z} lies on the interval I"))),
    }
}

/// A solution on `[lo, hi]` stored as `psi(n) = reduced(n) * exp(log_scale + n * ln_base)`.
///
/// With `base` the free exponent of the seeded end, `reduced` stays of order one
/// on the background side; `log_scale` absorbs growth through the support.
#[derive(Clone, Debug)]
pub struct JostSequence {
    pub lo: i64,
    reduced: Vec<C64>,
    pub ln_base: C64,
    pub log_scale: f64,
}

impl JostSequence {
    pub fn hi(&self) -> i64 {
        self.lo + self.reduced.len() as i64 - 1
    }

    fn raw(&self, n: i64) -> C64 {
        self.reduced[(n - self.lo) as usize]
    }

    /// `psi(n)`; may overflow or underflow for sites far from the support.
    pub fn value(&self, n: i64) -> C64 {
        self.raw(n) * (self.ln_base * n as f64 + self.log_scale).exp()
    }

    /// `psi(n) * base^(-n)`.
    pub fn reduced(&self, n: i64) -> C64 {
        self.raw(n) * self.log_scale.exp()
    }

    /// `psi(n) * w^n` evaluated in log form.
    pub fn times_power(&self, n: i64, ln_w: C64) -> C64 {
        self.raw(n) * ((self.ln_base + ln_w) * n as f64 + self.log_scale).exp()
    }

    fn rescale(&mut self, from: usize, to: usize) {
        let f = 1.0 / RESCALE_AT;
        for v in &mut self.reduced[from..=to] {
            *v *= f;
        }
        self.log_scale += RESCALE_AT.ln();
    }
}

fn window(data: &LatticeData) -> (i64, i64) {
    (data.n_min - 2, data.n_max() + 2)
}

/// Solution with `psi(n) = w^n` to the right of the support (the right Jost
/// solution for `|w| <= 1`).
pub fn jost_right(w: C64, data: &LatticeData) -> Result<JostSequence> {
    if w == C64::new(0.0, 0.0) || !w.is_finite() {
        return Err(LabError::Precondition(format!("right seed base must be finite and nonzero, got {w}")));
    }
    let (lo, hi) = window(data);
    let len = (hi - lo + 1) as usize;
    let start = (data.right_support() + 1).min(hi - 1).max(lo + 1);
    let mut seq = JostSequence { lo, reduced: vec![C64::new(1.0, 0.0); len], ln_base: w.ln(), log_scale: 0.0 };
    let zl = 0.5 * (C64::new(1.0, 0.0) + w * w);
    let w2 = w * w;
    let mut n = start;
    while n > lo {
        let k = (n - lo) as usize;
        let next = ((zl - w * data.b(n)) * seq.reduced[k] - w2 * data.a(n) * seq.reduced[k + 1]) / data.a(n - 1);
        seq.reduced[k - 1] = next;
        if next.norm() > RESCALE_AT {
            seq.rescale(k - 1, len - 1);
        }
        n -= 1;
    }
    if seq.reduced.iter().any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite("right Jost recurrence"));
    }
    Ok(seq)
}

/// Left Jost solution `psi1(n) = zeta^(-n)` to the left of the support.
pub fn jost_left(zeta: C64, data: &LatticeData) -> Result<JostSequence> {
    if zeta == C64::new(0.0, 0.0) || !zeta.is_finite() {
        return Err(LabError::Precondition(format!("zeta must be finite and nonzero, got {zeta}")));
    }
    let (lo, hi) = window(data);
    let len = (hi - lo + 1) as usize;
    let start = (data.left_support() - 1).max(lo + 1).min(hi - 1);
    let mut seq = JostSequence { lo, reduced: vec![C64::new(1.0, 0.0); len], ln_base: -zeta.ln(), log_scale: 0.0 };
    let z2 = zeta * zeta;
    let (abg, bbg) = (data.a_bg, data.b_bg);
    let mut n = start;
    while n < hi {
        let k = (n - lo) as usize;
        let diag = (bbg - data.b(n)) * zeta + abg * (z2 + 1.0);
        let next = (diag * seq.reduced[k] - z2 * data.a(n - 1) * seq.reduced[k - 1]) / data.a(n);
        seq.reduced[k + 1] = next;
        if next.norm() > RESCALE_AT {
            seq.rescale(0, k + 1);
        }
        n += 1;
    }
    if seq.reduced.iter().any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite("left Jost recurrence"));
    }
    Ok(seq)
}

/// `<f, g>(n) = a(n-1) (f(n-1) g(n) - g(n-1) f(n))`, evaluated without
/// forming the (possibly huge) powers separately.
pub fn wronskian_at(f: &JostSequence, g: &JostSequence, data: &LatticeData, n: i64) -> Result<C64> {
    if n - 1 < f.lo.max(g.lo) || n > f.hi().min(g.hi()) {
        return Err(LabError::Precondition(format!("Wronskian site {n} outside the computed range")));
    }
    let bf = f.ln_base.exp();
    let bg = g.ln_base.exp();
    let e = ((f.ln_base + g.ln_base) * (n - 1) as f64 + f.log_scale + g.log_scale).exp();
    let w = data.a(n - 1) * e * (bg * f.raw(n - 1) * g.raw(n) - bf * g.raw(n - 1) * f.raw(n));
    crate::cplx::checked(w, "Wronskian")
}

/// Both Jost solutions at one spectral point.
#[derive(Clone, Debug)]
pub struct JostPair {
    pub z: C64,
    pub zeta: C64,
    pub psi: JostSequence,
    pub psi1: JostSequence,
}

impl JostPair {
    /// Requires `0 < |z| <= 1`; points of `I` need a side.
    pub fn new(z: C64, data: &LatticeData, side: Option<Side>) -> Result<Self> {
        if z.norm() > 1.0 + 1e-12 || z.norm() == 0.0 {
            return Err(LabError::Precondition(format!("Jost solutions need 0 < |z| <= 1, got {z}")));
        }
        let zeta = zeta_at(z, data.a_bg, data.b_bg, side)?;
        Ok(JostPair { z, zeta, psi: jost_right(z, data)?, psi1: jost_left(zeta, data)? })
    }

    /// Default site for Wronskians: middle of the support.
    pub fn default_site(data: &LatticeData) -> i64 {
        let l = data.left_support().clamp(data.n_min, data.n_max());
        let r = data.right_support().clamp(data.n_min, data.n_max());
        let mid = if l <= r { (l + r) / 2 } else { r.max(data.n_min) };
        mid.clamp(data.n_min, data.n_max())
    }

    pub fn wronskian(&self, data: &LatticeData) -> Result<C64> {
        wronskian_at(&self.psi1, &self.psi, data, Self::default_site(data))
    }

    pub fn wronskian_at_site(&self, data: &LatticeData, n: i64) -> Result<C64> {
        wronskian_at(&self.psi1, &self.psi, data, n)
    }

    /// `T(z) = (z - 1/z) / (2 W(z))`.
    pub fn transmission(&self, data: &LatticeData) -> Result<C64> {
        let w = self.wronskian(data)?;
        crate::cplx::checked((self.z - self.z.inv()) / (2.0 * w), "transmission coefficient")
    }
}

/// Residual of the three-term recurrence at site `n`.
pub fn recurrence_residual(seq: &JostSequence, lambda: C64, data: &LatticeData, n: i64) -> f64 {
    let lhs = data.a(n - 1) * seq.value(n - 1) + data.b(n) * seq.value(n) + data.a(n) * seq.value(n + 1);
    (lhs - lambda * seq.value(n)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(n: i64, a_bg: f64, b_bg: f64) -> LatticeData {
        let a = (-n..=n).map(|k| if k < 0 { a_bg } else { 0.5 }).collect();
        let b = (-n..=n).map(|k| if k < 0 { b_bg } else { 0.0 }).collect();
        LatticeData::new(-n, a, b, a_bg, b_bg, None).unwrap()
    }

    fn zeta_reg(z: C64, a: f64, b: f64) -> C64 {
        match zeta_of_z(z, a, b) {
            ZetaValue::Regular(v) => v,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zeta_solves_quadratic_and_is_small() {
        for &z in &[C64::new(0.3, 0.4), C64::new(-0.7, 0.1), C64::new(0.01, -0.02), C64::new(0.0, 1.0)] {
            let zt = zeta_reg(z, 0.5, 2.5);
            assert!(zt.norm() <= 1.0);
            let lam = 2.5 + 0.5 * (zt + zt.inv());
            assert!((lam - lambda_of_z(z)).norm() < 1e-12 * (1.0 + lam.norm()));
        }
    }

    #[test]
    fn zeta_band_edges() {
        let d = step(3, 0.5, 2.5);
        let g = d.gaps().unwrap();
        let e1 = zeta_at(C64::new(g.q1, 0.0), 0.5, 2.5, Some(Side::Plus)).unwrap();
        let e2 = zeta_at(C64::new(g.q2, 0.0), 0.5, 2.5, Some(Side::Plus)).unwrap();
        assert!((e1 + 1.0).norm() < 1e-7);
        assert!((e2 - 1.0).norm() < 1e-7);
    }

    #[test]
    fn zeta_sides_are_limits() {
        let x = 0.25;
        let ZetaValue::OnCut { plus, minus } = zeta_of_z(C64::new(x, 0.0), 0.5, 2.5) else { panic!() };
        let below = zeta_reg(C64::new(x, -1e-10), 0.5, 2.5);
        let above = zeta_reg(C64::new(x, 1e-10), 0.5, 2.5);
        assert!((plus - below).norm() < 1e-8);
        assert!((minus - above).norm() < 1e-8);
        assert!((plus.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn free_data_gives_pure_powers() {
        let d = LatticeData::new(-5, vec![0.5; 11], vec![0.0; 11], 0.5, 0.0, None).unwrap();
        let z = C64::new(0.3, 0.5);
        let p = jost_right(z, &d).unwrap();
        for n in -7..=7 {
            assert!((p.value(n) - z.powi(n as i32)).norm() < 1e-13 * (1.0 + z.powi(n as i32).norm()));
        }
    }

    #[test]
    fn left_jost_pure_left_background() {
        let d = LatticeData::new(-5, vec![0.5; 11], vec![2.5; 11], 0.5, 2.5, None).unwrap();
        let z = C64::new(0.5, 0.5);
        let zt = zeta_reg(z, 0.5, 2.5);
        let p = jost_left(zt, &d).unwrap();
        for n in -7..=5 {
            let expect = zt.powi(-(n as i32));
            assert!((p.value(n) - expect).norm() < 1e-12 * expect.norm());
        }
    }

    #[test]
    fn recurrence_holds_interior() {
        let d = step(10, 0.5, 2.5);
        let z = C64::new(0.2, 0.6);
        let pair = JostPair::new(z, &d, None).unwrap();
        let lam = lambda_of_z(z);
        for n in -9..=9 {
            assert!(recurrence_residual(&pair.psi, lam, &d, n) < 1e-10);
            assert!(recurrence_residual(&pair.psi1, lam, &d, n) < 1e-10);
        }
    }

    #[test]
    fn one_site_perturbation_matches_linear_solve() {
        // b(0) = delta on a 5-site window; psi(-1) from the equation at site 0,
        // psi1(1) from the same site solved the other way.
        let delta = 0.7;
        let mut b = vec![0.0; 5];
        b[2] = delta;
        let d = LatticeData::new(-2, vec![0.5; 5], b, 0.5, 0.0, None).unwrap();
        let z = C64::new(0.4, 0.3);
        let lam = lambda_of_z(z);
        let p = jost_right(z, &d).unwrap();
        let expect = ((lam - delta) * z.powi(0) - 0.5 * z) / 0.5;
        assert!((p.value(-1) - expect).norm() < 1e-13);
        let q = jost_left(z, &d).unwrap();
        let expect1 = ((lam - delta) * 1.0 - 0.5 * z) / 0.5;
        assert!((q.value(1) - expect1).norm() < 1e-13);
    }

    #[test]
    fn wronskian_site_independent() {
        let mut d = step(12, 0.5, 2.5);
        for (k, v) in d.b.iter_mut().enumerate() {
            *v += 0.3 * (-(k as f64 - 12.0).abs() / 2.0).exp();
        }
        let z = C64::new(-0.3, 0.45);
        let pair = JostPair::new(z, &d, None).unwrap();
        let w0 = pair.wronskian_at_site(&d, 0).unwrap();
        for n in [-6, 5, 11] {
            let w = pair.wronskian_at_site(&d, n).unwrap();
            assert!((w - w0).norm() < 1e-9 * w0.norm(), "site {n}: {w} vs {w0}");
        }
    }

    #[test]
    fn rescaling_keeps_wronskian() {
        // Wide support with strong growth forces rescaling of the left solution.
        let n = 400i64;
        let a = (-n..=n).map(|k| if k < -100 { 2.0 } else { 0.5 }).collect();
        let b = (-n..=n).map(|k| if k < -100 { 10.0 } else { 0.0 }).collect();
        let d = LatticeData::new(-n, a, b, 2.0, 10.0, None).unwrap();
        let z = C64::new(0.02, 0.03);
        let pair = JostPair::new(z, &d, None).unwrap();
        assert!(pair.psi1.log_scale > 0.0);
        let w1 = pair.wronskian_at_site(&d, 150).unwrap();
        let w2 = pair.wronskian_at_site(&d, 250).unwrap();
        assert!((w1 - w2).norm() < 1e-9 * w1.norm());
    }
}

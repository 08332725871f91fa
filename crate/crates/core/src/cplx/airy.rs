//! Airy function of complex argument.
//!
//! `|w| <= R_SWITCH`: Maclaurin series summed in double-double, so that the
//! cancellation between the two series in the decaying sector costs nothing.
//! `|w| > R_SWITCH`: Poincare expansion truncated at its smallest term, with the
//! connection formula `Ai(w) = -w1 Ai(w1 w) - w1^2 Ai(w1^2 w)` for `|arg w| > 2pi/3`.

#![allow(clippy::excessive_precision)]

use super::dd::{CDd, Dd};
use crate::{LabError, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radius where evaluation switches from the series to the expansion.
pub const R_SWITCH: f64 = 7.5;
/// Largest modulus with the full accuracy guarantee.
pub const AIRY_MAX_MODULUS: f64 = 40.0;
const EXP_LIMIT: f64 = 700.0;

const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
const MINUS_AIP0: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryPair {
    pub value: C64,
    pub derivative: C64,
}

fn omega() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Maclaurin series `Ai = c1 f - c2 g`.
pub fn airy_series(w: C64) -> Result<AiryPair> {
    let wd = CDd::from_c64(w);
    let w3 = wd * wd * wd;
    let one = CDd::from_c64(C64::new(1.0, 0.0));
    // f, f', g, g' partial terms
    let mut tf = one;
    let mut tfp = (wd * wd).div_f64(2.0);
    let mut tg = wd;
    let mut tgp = one;
    let (mut f, mut fp, mut g, mut gp) = (tf, tfp, tg, tgp);
    let mut biggest = 1.0f64.max(w.norm());
    for k in 0..400usize {
        let kf = k as f64;
        tf = (tf * w3).div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tfp = (tfp * w3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 5.0));
        tg = (tg * w3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tgp = (tgp * w3).div_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f = f + tf;
        fp = fp + tfp;
        g = g + tg;
        gp = gp + tgp;
        let m = tf.norm_f64().max(tfp.norm_f64()).max(tg.norm_f64()).max(tgp.norm_f64());
        biggest = biggest.max(m);
        if k > 2 && m < 1e-34 * biggest {
            let c1 = AI0;
            let c2 = MINUS_AIP0.neg();
            let value = f.scale(c1) + g.scale(c2);
            let derivative = fp.scale(c1) + gp.scale(c2);
            return Ok(AiryPair { value: value.to_c64(), derivative: derivative.to_c64() });
        }
    }
    Err(LabError::Overflow(format!("Airy series did not converge at w = {w}")))
}

/// Poincare expansion, valid for `|arg w| < pi`.
pub fn airy_asymptotic(w: C64) -> Result<AiryPair> {
    if w.norm() == 0.0 {
        return Err(LabError::Precondition("asymptotic Airy expansion at w = 0".into()));
    }
    let sw = w.sqrt();
    let zeta = sw * w * (2.0 / 3.0);
    if zeta.re.abs() > EXP_LIMIT {
        return Err(LabError::Overflow(format!("|Re (2/3)w^(3/2)| too large at w = {w}")));
    }
    let w4 = sw.sqrt();
    let mut su = C64::new(1.0, 0.0);
    let mut sv = C64::new(1.0, 0.0);
    let mut u = 1.0f64;
    let mut zk = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..80usize {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zk *= -zeta.inv();
        let tu = zk * u;
        let tv = zk * v;
        let m = tu.norm().max(tv.norm());
        if m > last {
            break;
        }
        su += tu;
        sv += tv;
        last = m;
        if m < 1e-17 {
            break;
        }
    }
    let e = (-zeta).exp();
    let pref = 1.0 / (2.0 * PI.sqrt());
    Ok(AiryPair { value: e * su * pref / w4, derivative: -(e * sv * pref * w4) })
}

/// `Ai(w)` and `Ai'(w)`.
pub fn airy(w: C64) -> Result<AiryPair> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(LabError::NonFinite("airy argument"));
    }
    if w.norm() <= R_SWITCH {
        return airy_series(w);
    }
    if w.arg().abs() <= 2.0 * PI / 3.0 {
        return airy_asymptotic(w);
    }
    let om = omega();
    let om2 = om * om;
    let a = airy_asymptotic(om * w)?;
    let b = airy_asymptotic(om2 * w)?;
    Ok(AiryPair {
        value: -(om * a.value) - om2 * b.value,
        derivative: -(om2 * a.derivative) - om * b.derivative,
    })
}

/// `y_1 = Ai(w)`, `y_2 = e^{-2pi i/3} Ai(e^{-2pi i/3} w)`, `y_3 = e^{2pi i/3} Ai(e^{2pi i/3} w)`.
pub fn rotated_airy(j: u8, w: C64) -> Result<AiryPair> {
    let r = match j {
        1 => return airy(w),
        2 => C64::from_polar(1.0, -2.0 * PI / 3.0),
        3 => C64::from_polar(1.0, 2.0 * PI / 3.0),
        _ => return Err(LabError::Precondition(format!("sector index {j} not in 1..=3"))),
    };
    let p = airy(r * w)?;
    Ok(AiryPair { value: r * p.value, derivative: r * r * p.derivative })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn values_at_origin() {
        let p = airy(C64::new(0.0, 0.0)).unwrap();
        // independent oracle: Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
        let gamma_2_3 = 1.3541179394264004169;
        let gamma_1_3 = 2.6789385347077476337;
        let ai0 = 3f64.powf(-2.0 / 3.0) / gamma_2_3;
        let aip0 = -(3f64.powf(-1.0 / 3.0)) / gamma_1_3;
        assert!((p.value.re - ai0).abs() < 1e-15 && p.value.im == 0.0);
        assert!((p.derivative.re - aip0).abs() < 1e-15);
        assert!((p.value.re - 0.3550280538878172).abs() < 1e-16);
        assert!((p.derivative.re + 0.2588194037928068).abs() < 1e-16);
    }

    #[test]
    fn plain_series_oracle_small_argument() {
        // 50 terms of the plain power series recursion y'' = w y, summed in f64.
        let w = C64::new(0.5, 0.3);
        let mut a = vec![C64::new(0.0, 0.0); 52];
        a[0] = C64::new(0.3550280538878172, 0.0);
        a[1] = C64::new(-0.2588194037928068, 0.0);
        for k in 0..50 {
            let prev = if k == 0 { C64::new(0.0, 0.0) } else { a[k - 1] };
            a[k + 2] = prev / ((k + 2) as f64 * (k + 1) as f64);
        }
        let mut v = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for k in (0..52).rev() {
            v = v * w + a[k];
        }
        for k in (1..52).rev() {
            d = d * w + a[k] * k as f64;
        }
        let p = airy(w).unwrap();
        assert!(rel(p.value, v) < 1e-14);
        assert!(rel(p.derivative, d) < 1e-14);
    }

    #[test]
    fn matches_reference_table() {
        // Reference values from a 50-digit evaluation (mpmath airyai).
        let table: [(C64, C64, C64); 10] = [
            (C64::new(1.0, 0.0), C64::new(0.13529241631288141552, 0.0), C64::new(-0.15914744129679321279, 0.0)),
            (C64::new(0.0, 1.0), C64::new(0.33149330543214118898, -0.31744985896844377348), C64::new(-0.43249265984180709931, 0.098047856229243232384)),
            (C64::new(-2.0, 0.5), C64::new(0.29003094106266102693, 0.33030787622395855069), C64::new(0.74588832890665162929, -0.27431948858168657381)),
            (C64::new(4.0, 0.0), C64::new(0.00095156385120480187362, 0.0), C64::new(-0.0019586409502041789001, 0.0)),
            (C64::new(3.0, -5.0), C64::new(-0.14004978934573721371, -0.029748277034203537159), C64::new(0.33191621088406506396, -0.098426626515808810857)),
            (C64::new(-7.0, 0.0), C64::new(0.18428083525050563728, 0.0), C64::new(-0.77100816841012654773, 0.0)),
            (C64::new(0.5, 9.0), C64::new(-236.42649139214420316, -18761.773575651507983), C64::new(-37667.206402806771296, 41440.489749679664752)),
            (C64::new(12.0, 0.0), C64::new(1.393184688875360839e-13, 0.0), C64::new(-4.854736554985308463e-13, 0.0)),
            (C64::new(-20.0, 3.0), C64::new(-23003.578637620493911, 87419.751094449968873), C64::new(399303.84995793384143, 74953.599923672786133)),
            (C64::new(30.0, 0.0), C64::new(3.2082175915504955711e-49, 0.0), C64::new(-1.7598765814327259821e-48, 0.0)),
        ];
        for (w, v, d) in table {
            let p = airy(w).unwrap();
            assert!(rel(p.value, v) < 1e-10, "Ai({w}) = {} vs {v}", p.value);
            assert!(rel(p.derivative, d) < 1e-10, "Ai'({w}) = {} vs {d}", p.derivative);
        }
    }

    #[test]
    fn leading_decay_at_four() {
        let w = C64::new(4.0, 0.0);
        let p = airy(w).unwrap();
        let lead = (-(2.0 / 3.0) * 8.0f64).exp() / (2.0 * PI.sqrt() * 4f64.powf(0.25));
        assert!((p.value.re / lead - 1.0).abs() < 0.02);
    }

    #[test]
    fn connection_identity() {
        for w in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-2.0, 0.5), C64::new(8.5, -3.0)] {
            let ys: Vec<AiryPair> = (1..=3).map(|j| rotated_airy(j, w).unwrap()).collect();
            let scale: f64 = ys.iter().map(|y| y.value.norm() + y.derivative.norm()).sum();
            let s: C64 = ys.iter().map(|y| y.value).sum();
            let sd: C64 = ys.iter().map(|y| y.derivative).sum();
            assert!(s.norm() < 1e-14 * scale && sd.norm() < 1e-14 * scale, "w = {w}: {s} {sd}");
        }
    }

    #[test]
    fn second_rotation_growth_in_first_sector() {
        let w = C64::from_polar(20.0, 1.0);
        let y2 = rotated_airy(2, w).unwrap().value;
        let zeta = w.sqrt() * w * (2.0 / 3.0);
        let lead = -C64::new(0.0, 1.0) * zeta.exp() / (2.0 * PI.sqrt() * w.sqrt().sqrt());
        assert!(rel(y2, lead) < 0.01);
    }

    #[test]
    fn series_and_expansion_overlap() {
        for ang in [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0] {
            for r in [6.0, 6.5, 7.0, 7.5, 8.0] {
                let w = C64::from_polar(r, ang);
                let s = airy_series(w).unwrap();
                let a = airy_asymptotic(w).unwrap();
                assert!(rel(s.value, a.value) < 1e-8, "r={r} ang={ang}");
                assert!(rel(s.derivative, a.derivative) < 1e-8);
            }
        }
    }

    #[test]
    fn airy_equation_residual() {
        let h = 1e-3;
        for w in [C64::new(0.3, 0.2), C64::new(-3.0, 1.0), C64::new(5.0, 5.0), C64::new(9.0, 0.5)] {
            let f = |x: C64| airy(x).unwrap().value;
            let second = (f(w + h) - 2.0 * f(w) + f(w - h)) / (h * h);
            let r = (second - w * f(w)).norm() / (w * f(w)).norm().max(1e-300);
            assert!(r < 1e-5, "w = {w}: {r}");
        }
    }

    #[test]
    fn flags_overflow() {
        assert!(matches!(airy(C64::new(110.0, 0.0)), Err(LabError::Overflow(_))));
        assert!(airy(C64::new(f64::NAN, 0.0)).is_err());
    }
}

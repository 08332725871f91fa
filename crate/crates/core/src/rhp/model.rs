use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{quartic_ratio_root, quartic_ratio_root_sides, Mat2C, RowVec, Side, I};
use crate::phase::{PhaseContext, RSampler};
use crate::report::ResidualReport;
use crate::{LabError, Result, C64};

/// Data of the model problem with the constant jump on Sigma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelContext {
    pub ctx: PhaseContext,
    /// `R(-1)`, either `-1` or `+1`.
    pub r_minus_one: f64,
    /// `(sin(theta0/2))^{-1/2}`.
    pub alpha: f64,
    /// `R(-1) = +1`: the exponent of `beta` flips to `-1/4`.
    pub resonant_at_1: bool,
}

impl ModelContext {
    pub fn new(ctx: PhaseContext, r_minus_one: f64) -> Result<Self> {
        if (r_minus_one.abs() - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidData(format!("R(-1) = {r_minus_one} must be +1 or -1")));
        }
        let r = r_minus_one.signum();
        Ok(ModelContext { ctx, r_minus_one: r, alpha: (0.5 * ctx.theta0).sin().powf(-0.5), resonant_at_1: r > 0.0 })
    }

    /// Reads `R(-1)` off sampled reflection data, which must be real `+-1` to `1e-6`.
    pub fn from_sampler(ctx: PhaseContext, rs: &RSampler) -> Result<Self> {
        let r = rs.r_minus_one;
        if r.im.abs() > 1e-6 || (r.re.abs() - 1.0).abs() > 1e-6 {
            return Err(LabError::InvalidData(format!("R(-1) = {r} is not +-1")));
        }
        Self::new(ctx, r.re.signum())
    }

    /// `+1` (nonresonant, `R(-1) = -1`) or `-1`.
    pub fn beta_exponent(&self) -> i8 {
        if self.resonant_at_1 {
            -1
        } else {
            1
        }
    }

    /// `beta(z) = ((z0 z - 1)/(z0 - z))^{+-1/4}`, principal root, cut on Sigma.
    pub fn beta(&self, z: C64) -> Result<C64> {
        quartic_ratio_root(z, self.ctx.z0, self.beta_exponent())
    }

    /// `beta` at `z`, with the one-sided value when `z` is on Sigma.
    pub fn beta_side(&self, z: C64, side: Option<Side>) -> Result<C64> {
        match side {
            Some(s) if self.ctx.on_sigma(z, 1e-9) => {
                let (p, m) = quartic_ratio_root_sides(z, self.ctx.z0, self.beta_exponent())?;
                Ok(if s == Side::Plus { p } else { m })
            }
            _ => self.beta(z),
        }
    }

    /// Constant model jump `[[0, -R(-1)], [R(-1), 0]]`.
    pub fn v_mod(&self) -> Mat2C {
        let r = C64::new(self.r_minus_one, 0.0);
        Mat2C::new(C64::new(0.0, 0.0), -r, r, C64::new(0.0, 0.0))
    }

    pub fn matrix(&self, z: C64, side: Option<Side>) -> Result<Mat2C> {
        Ok(model_from_beta(self.beta_side(z, side)?))
    }

    /// `m^mod = (alpha, alpha) M^mod`.
    pub fn vector(&self, z: C64, side: Option<Side>) -> Result<RowVec> {
        let a = C64::new(self.alpha, 0.0);
        Ok(RowVec(a, a).mul_mat(&self.matrix(z, side)?))
    }
}

/// `[[(b + 1/b)/2, (b - 1/b)/(2i)], [-(b - 1/b)/(2i), (b + 1/b)/2]]`.
pub fn model_from_beta(b: C64) -> Mat2C {
    let (p, m) = (0.5 * (b + b.inv()), (b - b.inv()) / (2.0 * I));
    Mat2C::new(p, m, -m, p)
}

pub fn model_matrix(z: C64, model: &ModelContext) -> Result<Mat2C> {
    model.matrix(z, None)
}

pub fn model_vector(z: C64, model: &ModelContext) -> Result<RowVec> {
    model.vector(z, None)
}

/// Jump, determinant, symmetry and normalization checks of the model solution.
pub fn model_report(model: &ModelContext) -> Result<Vec<ResidualReport>> {
    let ctx = &model.ctx;
    let loc = format!("xi={}", ctx.xi);
    let mut out = Vec::new();
    let v = model.v_mod();
    let mut jump: f64 = 0.0;
    for k in 0..8 {
        let phi = ctx.theta0 + (2.0 * PI - 2.0 * ctx.theta0) * (k as f64 + 0.5) / 8.0;
        let z = C64::from_polar(1.0, phi);
        let (mp, mm) = (model.matrix(z, Some(Side::Plus))?, model.matrix(z, Some(Side::Minus))?);
        jump = jump.max(mp.dist(&(mm * v)));
    }
    out.push(ResidualReport::below("M+ - M- v_mod on Sigma", &loc, jump, 1e-8));
    let (mut det, mut sym): (f64, f64) = (0.0, 0.0);
    for k in 0..20 {
        let z = C64::from_polar(0.3 + 0.12 * k as f64, 0.7 + 0.9 * k as f64);
        if ctx.on_sigma(z, 1e-6) {
            continue;
        }
        let m = model.matrix(z, None)?;
        det = det.max((m.det() - 1.0).norm());
        sym = sym.max(model.matrix(z.inv(), None)?.dist(&m.sigma1_conj()));
    }
    out.push(ResidualReport::below("det M_mod - 1", &loc, det, 1e-10));
    out.push(ResidualReport::below("M_mod(1/z) - s1 M_mod(z) s1", &loc, sym, 1e-10));
    let m0 = model.vector(C64::new(0.0, 0.0), None)?;
    out.push(ResidualReport::below("m1_mod(0) m2_mod(0) - 1", &loc, (m0.0 * m0.1 - 1.0).norm(), 1e-10));
    let pos = if m0.0.re > 0.0 { m0.0.im.abs() } else { f64::INFINITY };
    out.push(ResidualReport::below("m1_mod(0) real positive", &loc, pos, 1e-12));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_basics() {
        let m = ModelContext::new(PhaseContext::new(0.35).unwrap(), -1.0).unwrap();
        assert!((m.beta(C64::new(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        for k in 0..10 {
            let z = C64::from_polar(0.2 + 0.17 * k as f64, -2.5 + 0.6 * k as f64);
            let p = m.beta(z).unwrap() * m.beta(z.inv()).unwrap();
            assert!((p - 1.0).norm() < 1e-12, "{z}: {p}");
        }
        assert!((m.alpha.powi(2) * (0.5 * m.ctx.theta0).sin() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn report_passes_both_cases() {
        for r in [-1.0, 1.0] {
            for xi in [0.2, 0.5, 0.8] {
                let m = ModelContext::new(PhaseContext::new(xi).unwrap(), r).unwrap();
                for e in model_report(&m).unwrap() {
                    assert!(e.pass, "r={r} xi={xi}: {e:?}");
                }
            }
        }
    }

    #[test]
    fn normalization_value_at_origin() {
        // m1(0) = alpha (cos k - sin k), k = (pi - theta0)/4, in the nonresonant case
        let ctx = PhaseContext::new(0.3).unwrap();
        let m = ModelContext::new(ctx, -1.0).unwrap();
        let k = 0.25 * (PI - ctx.theta0);
        let m0 = m.vector(C64::new(0.0, 0.0), None).unwrap();
        assert!((m0.0 - m.alpha * (k.cos() - k.sin())).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_unit_data() {
        assert!(ModelContext::new(PhaseContext::new(0.5).unwrap(), 0.5).is_err());
    }
}

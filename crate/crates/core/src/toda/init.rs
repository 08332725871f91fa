use serde::{Deserialize, Serialize};

use crate::scattering::lattice::{LatticeData, A_RIGHT, B_RIGHT};
use crate::{LabError, Result};

/// Perturbations below this are set to exactly zero.
const CUTOFF: f64 = 1e-18;

/// Initial profile on top of the two backgrounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `(a_bg, b_bg)` for `n < 0`, `(1/2, 0)` for `n >= 0`.
    PureStep,
    /// Pure step plus `amp * exp(-nu |n|)` in `a` and `b`.
    ExpPerturbed { nu: f64, amp_a: f64, amp_b: f64 },
}

/// Steplike data on `[-half_width, half_width]`.
pub fn make_step_data(a_bg: f64, b_bg: f64, profile: Profile, half_width: usize) -> Result<LatticeData> {
    if !(1.0 < b_bg - 2.0 * a_bg) {
        return Err(LabError::InvalidData(format!(
            "backgrounds violate 1 < b - 2a (b - 2a = {})",
            b_bg - 2.0 * a_bg
        )));
    }
    let n = half_width as i64;
    let (mut a, mut b): (Vec<f64>, Vec<f64>) =
        (-n..=n).map(|k| if k < 0 { (a_bg, b_bg) } else { (A_RIGHT, B_RIGHT) }).unzip();
    let mut nu_decl = None;
    if let Profile::ExpPerturbed { nu, amp_a, amp_b } = profile {
        if !(nu > 0.0) {
            return Err(LabError::InvalidData(format!("decay rate nu = {nu} must be positive")));
        }
        for k in -n..=n {
            let w = (-nu * k.abs() as f64).exp();
            let i = (k + n) as usize;
            if (amp_a * w).abs() > CUTOFF {
                a[i] += amp_a * w;
            }
            if (amp_b * w).abs() > CUTOFF {
                b[i] += amp_b * w;
            }
        }
        nu_decl = Some(nu);
    }
    LatticeData::new(-n, a, b, a_bg, b_bg, nu_decl)
}

/// `sum_n e^{nu |n|} (|a(n) - a_bg(n)| + |b(n) - b_bg(n)|)` over the window.
pub fn weighted_deviation(data: &LatticeData, nu: f64) -> f64 {
    (data.n_min..=data.n_max())
        .map(|n| {
            let (ab, bb) = if n < 0 { (data.a_bg, data.b_bg) } else { (A_RIGHT, B_RIGHT) };
            (nu * n.abs() as f64).exp() * ((data.a(n) - ab).abs() + (data.b(n) - bb).abs())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_condition_enforced() {
        assert!(make_step_data(0.5, 2.5, Profile::PureStep, 10).is_ok());
        let e = make_step_data(0.5, 1.5, Profile::PureStep, 10).unwrap_err();
        assert!(e.to_string().contains("1 < b - 2a"));
    }

    #[test]
    fn pure_step_layout() {
        let d = make_step_data(0.5, 2.5, Profile::PureStep, 10).unwrap();
        assert_eq!((d.a(-1), d.b(-1)), (0.5, 2.5));
        assert_eq!((d.a(0), d.b(0)), (0.5, 0.0));
        assert_eq!(d.n_min, -10);
        assert_eq!(d.n_max(), 10);
    }

    #[test]
    fn exp_perturbed_summable() {
        let p = Profile::ExpPerturbed { nu: 1.0, amp_a: 0.1, amp_b: 0.1 };
        let d = make_step_data(0.5, 2.5, p, 100).unwrap();
        assert_eq!(d.nu, Some(1.0));
        // weights e^{nu|n|} cancel the decay up to the cutoff: each term <= 0.2
        let s = weighted_deviation(&d, 1.0);
        assert!(s.is_finite() && s <= 0.2 * 201.0);
        assert!(weighted_deviation(&d, 0.5) < 0.2 * 2.0 / (1.0 - (-0.5f64).exp()));
    }
}

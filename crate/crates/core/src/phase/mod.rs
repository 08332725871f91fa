//! Phase function, g-function, local coordinates and the scalar conjugant.

mod breve;
pub use breve::{breve_d, breve_d_report, breve_d_side, i_z0, log_breve_d, log_breve_d_side, BreveReport, RSampler, SAMPLE_INTERVALS};
mod contour;
pub use contour::{ContourSpec, Polyline};
mod gfun;
mod signature;
pub use signature::{field_value, region_count, sign_of, signature_table, Field, SignGrid, ZERO_BAND};
mod wmap;
pub use gfun::{g, g_boundary, g_derivative, g_lemma_report, g_via_radius, k_limit, phi_minus_g, GLemmaReport};
pub use wmap::{disk_boundary, leading_coefficient, w_derivative, w_inverse, w_leading, w_map};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cplx::{szego_root, szego_root_side, Side};
use crate::{LabError, Result, C64};

/// Stationary-point data for one ray `n = xi t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseContext {
    pub xi: f64,
    pub theta0: f64,
    pub z0: C64,
    pub zeta0: C64,
    /// Real part of `lim_{z -> 0} (Phi - g)`.
    pub k_xi: f64,
    /// `sqrt((z0 - 0)(z0 * 0 - 1))`, the reference value of the root.
    q_at_zero: C64,
    /// Sign of the plus-side root on Sigma relative to `2 sqrt(S) e^{i sigma/2}`.
    q_plus_sign: f64,
    /// Sign of `Q` on Sigma (plus side) relative to `i sqrt(2 (c - cos psi)) e^{i psi/2}`.
    big_q_plus_sign: f64,
}

impl PhaseContext {
    pub fn new(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(LabError::Config(format!("xi = {xi} must lie in (0, 1)")));
        }
        let theta0 = (1.0 - 2.0 * xi).acos();
        let (z0, zeta0) = stationary_points(xi);
        let q_at_zero = szego_root(C64::new(0.0, 0.0), z0)?;
        let mid = 0.5 * (theta0 + PI);
        let s = C64::from_polar(1.0, mid);
        let q_side = szego_root_side(s, z0, Side::Plus)?;
        let (dl, sg) = (0.5 * (mid - theta0), 0.5 * (mid + theta0));
        let formula = 2.0 * (dl.sin() * sg.sin()).sqrt() * C64::from_polar(1.0, sg);
        let q_plus_sign = if (q_side - formula).norm() < (q_side + formula).norm() { 1.0 } else { -1.0 };
        let big_formula = C64::new(0.0, (2.0 * (theta0.cos() - mid.cos())).sqrt()) * C64::from_polar(1.0, 0.5 * mid);
        let big_side = q_side / q_at_zero;
        let big_q_plus_sign = if (big_side - big_formula).norm() < (big_side + big_formula).norm() { 1.0 } else { -1.0 };
        let mut ctx = PhaseContext { xi, theta0, z0, zeta0, k_xi: 0.0, q_at_zero, q_plus_sign, big_q_plus_sign };
        ctx.k_xi = gfun::k_limit(&ctx)?.re;
        Ok(ctx)
    }

    /// `cos theta0`.
    pub fn c(&self) -> f64 {
        1.0 - 2.0 * self.xi
    }

    /// Whether `z` lies on the closed arc Sigma (within `tol` of the circle).
    pub fn on_sigma(&self, z: C64, tol: f64) -> bool {
        (z.norm() - 1.0).abs() <= tol && z.re <= self.c() + tol
    }

    /// `Q(s) = sqrt((s - z0)(s - conj z0))` with the cut on Sigma and `Q(0) = 1`.
    pub(crate) fn big_q(&self, s: C64) -> Result<C64> {
        Ok(szego_root(s, self.z0)? / self.q_at_zero)
    }

    /// `Q` on the unit circle at angle `psi` (plus side on Sigma).
    pub(crate) fn big_q_on_circle(&self, psi: f64) -> C64 {
        let c = self.c();
        let psi = if psi.cos() < c { psi.rem_euclid(2.0 * PI) } else { wrap_pi(psi) };
        let half = C64::from_polar(1.0, 0.5 * psi);
        let d = 2.0 * ((0.5 * (psi - self.theta0)).sin() * (0.5 * (psi + self.theta0)).sin()).abs();
        // c - cos psi = 2 sin((psi - theta0)/2) sin((psi + theta0)/2)
        if psi.cos() < c {
            self.big_q_plus_sign * C64::new(0.0, (2.0 * d).sqrt()) * half
        } else {
            // on the right arc Q is positive at 1 and continuous
            C64::new((2.0 * d).sqrt(), 0.0) * half
        }
    }

    /// Plus-side value of `q(s, z0)` at `s = e^{i phi}` on Sigma.
    #[cfg(test)]
    fn q_plus_on_sigma(&self, phi: f64) -> C64 {
        let phi = phi.rem_euclid(2.0 * PI);
        let (dl, sg) = (0.5 * (phi - self.theta0), 0.5 * (phi + self.theta0));
        self.q_plus_sign * 2.0 * (dl.sin() * sg.sin()).abs().sqrt() * C64::from_polar(1.0, sg)
    }

    /// `q(z, z0)`, analytic off Sigma.
    pub(crate) fn q(&self, z: C64) -> Result<C64> {
        szego_root(z, self.z0)
    }
}

/// Angle reduced to `(-pi, pi]`.
pub(crate) fn wrap_pi(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `Phi(z) = (z - 1/z)/2 + xi log z` with the principal logarithm.
pub fn phi(z: C64, xi: f64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(LabError::OnCut(format!("Phi at {z}: logarithm cut")));
    }
    Ok(0.5 * (z - z.inv()) + xi * z.ln())
}

/// `Phi'(z)`.
pub fn phi_derivative(z: C64, xi: f64) -> C64 {
    0.5 * (1.0 + (z * z).inv()) + xi / z
}

/// `(z0, zeta0)` with `z0 = e^{i theta0}`, `cos theta0 = 1 - 2 xi`, and
/// `zeta0 = -xi + sqrt(xi^2 - 1)` (upper half plane).
pub fn stationary_points(xi: f64) -> (C64, C64) {
    let theta0 = (1.0 - 2.0 * xi).acos();
    (C64::from_polar(1.0, theta0), C64::new(-xi, (1.0 - xi * xi).sqrt()))
}

/// `C(theta0) = (sqrt 2 / 3) sqrt(sin theta0) cos(theta0/2)` and the phase
/// `e^{i (pi/4 - 3 theta0/2)}` of the stated local law `g ~ C e^{i..} (z - z0)^{3/2}`.
pub fn local_cubic(theta0: f64) -> (f64, C64) {
    let c = 2f64.sqrt() / 3.0 * theta0.sin().sqrt() * (0.5 * theta0).cos();
    (c, C64::from_polar(1.0, PI / 4.0 - 1.5 * theta0))
}

/// Modulus of the `(z - z0)^{3/2}` coefficient of g as produced by its
/// integrand, `(2 sqrt 2 / 3) sqrt(sin theta0) cos(theta0/2)`; twice `local_cubic`.
pub fn cubic_coefficient(theta0: f64) -> f64 {
    2.0 * local_cubic(theta0).0
}

/// Unit factor `e^{-i (theta0 + pi/2)}` of the w-map at `z0`; it sends the
/// tangent of Sigma at `z0` to the positive half axis.
pub fn w_phase(theta0: f64) -> C64 {
    C64::from_polar(1.0, -(theta0 + PI / 2.0))
}

/// `(z - z0)^{3/2}` with the cut along Sigma's tangent at `z0`: the argument of
/// `w_phase(theta0) (z - z0)` is taken in `[0, 2 pi)`.
pub fn cubic_power(z: C64, theta0: f64) -> C64 {
    let rot = w_phase(theta0);
    let z0 = C64::from_polar(1.0, theta0);
    crate::cplx::pow_arg0(rot * (z - z0), 1.5) / crate::cplx::pow_arg0(rot, 1.5)
}

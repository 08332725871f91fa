//! Complex kernels shared by every other module.

mod airy;
mod dd;
mod mat2;
pub mod quad;
mod roots;

pub use airy::{
    airy, airy_asymptotic, airy_series, rotated_airy, AiryPair, AIRY_MAX_MODULUS, R_SWITCH,
};
pub use mat2::{Mat2C, RowVec};
pub use roots::{quartic_ratio_root, quartic_ratio_root_sides, szego_root, szego_root_side, Side};

use crate::{LabError, Result, C64};

pub const I: C64 = C64::new(0.0, 1.0);

/// Rejects NaN/inf components.
pub fn checked(z: C64, what: &'static str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(LabError::NonFinite(what))
    }
}

/// `z^p` with the argument taken in `[0, 2pi)`.
pub fn pow_arg0(z: C64, p: f64) -> C64 {
    let mut a = z.arg();
    if a < 0.0 {
        a += 2.0 * std::f64::consts::PI;
    }
    C64::from_polar(z.norm().powf(p), p * a)
}

/// Argument of `z` in `[0, 2pi)`.
pub fn arg0(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{arg0, rotated_airy, Mat2C, Side, I};
use crate::report::{loglog_slope, ResidualReport};
use crate::{LabError, Result, C64};

/// Angular distance below which a point counts as lying on a ray.
pub const RAY_TOL: f64 = 1e-9;

/// `M0 = [[1, 1], [i, -i]]`.
pub fn m0() -> Mat2C {
    Mat2C::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0), I, -I)
}

/// `M0^{-1} = [[1/2, -i/2], [1/2, i/2]]`.
pub fn m0_inv() -> Mat2C {
    Mat2C::new(C64::new(0.5, 0.0), -0.5 * I, C64::new(0.5, 0.0), 0.5 * I)
}

/// `S1 = [[0, -r], [r, 1]]`, `S2 = [[1, 0], [-r, 1]]`, `S3 = [[1, r], [0, 1]]`, `r = R(-1)`.
pub fn s_matrices(r: f64) -> [Mat2C; 3] {
    [
        Mat2C::from_real([[0.0, -r], [r, 1.0]]),
        Mat2C::from_real([[1.0, 0.0], [-r, 1.0]]),
        Mat2C::from_real([[1.0, r], [0.0, 1.0]]),
    ]
}

/// Sector index (1, 2, 3) of `w` for `arg w` in `[0, 2pi/3)`, `[2pi/3, 4pi/3)`,
/// `[4pi/3, 2pi)`, with the angle used for the fractional powers.
///
/// On a ray the side decides: `Plus` is the larger-argument side. Without a side,
/// a point within `RAY_TOL` of a ray is rejected.
pub fn sector_of(w: C64, side: Option<Side>) -> Result<(u8, f64)> {
    let a = arg0(w);
    let rays = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0, 2.0 * PI];
    for (k, &ray) in rays.iter().enumerate() {
        if (a - ray).abs() <= RAY_TOL {
            let (plus, minus) = match k {
                0 | 3 => ((1, 0.0), (3, 2.0 * PI)),
                1 => ((2, ray), (1, ray)),
                _ => ((3, ray), (2, ray)),
            };
            return match side {
                Some(Side::Plus) => Ok(plus),
                Some(Side::Minus) => Ok(minus),
                None => Err(LabError::OnCut(format!("w = {w} lies on a sector ray"))),
            };
        }
    }
    let j = if a < 2.0 * PI / 3.0 {
        1
    } else if a < 4.0 * PI / 3.0 {
        2
    } else {
        3
    };
    Ok((j, a))
}

/// Sector-wise Airy matrices. `s` holds `(S1, S2, S3)`; tests may swap in a
/// perturbed matrix to check that the monodromy verifier notices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryParametrix {
    pub r: f64,
    pub s: [Mat2C; 3],
}

impl AiryParametrix {
    pub fn new(r: f64) -> Self {
        AiryParametrix { r, s: s_matrices(r) }
    }

    /// Same construction with `S2` replaced.
    pub fn with_s2(mut self, s2: Mat2C) -> Self {
        self.s[1] = s2;
        self
    }

    /// `A1 = sqrt(pi) [[y1, y2], [-y1', -y2']]`.
    pub fn a1(&self, w: C64) -> Result<Mat2C> {
        let (y1, y2) = (rotated_airy(1, w)?, rotated_airy(2, w)?);
        Ok(Mat2C::new(y1.value, y2.value, -y1.derivative, -y2.derivative).scale(C64::new(PI.sqrt(), 0.0)))
    }

    /// Closed form of `A1 S2` for `r = -1`: `sqrt(pi) [[-y3, y2], [y3', -y2']]`.
    pub fn a2_explicit(&self, w: C64) -> Result<Mat2C> {
        let (y2, y3) = (rotated_airy(2, w)?, rotated_airy(3, w)?);
        Ok(Mat2C::new(-y3.value, y2.value, y3.derivative, -y2.derivative).scale(C64::new(PI.sqrt(), 0.0)))
    }

    /// Closed form of `A2 S3` for `r = -1`: `sqrt(pi) [[-y3, -y1], [y3', y1']]`.
    pub fn a3_explicit(&self, w: C64) -> Result<Mat2C> {
        let (y1, y3) = (rotated_airy(1, w)?, rotated_airy(3, w)?);
        Ok(Mat2C::new(-y3.value, -y1.value, y3.derivative, y1.derivative).scale(C64::new(PI.sqrt(), 0.0)))
    }

    /// `A_j(w)`. For `r = -1` the closed forms are used (they avoid the
    /// cancellation in `y1 + y2`); otherwise `A2 = A1 S2`, `A3 = A2 S3`.
    pub fn sector_matrix(&self, j: u8, w: C64) -> Result<Mat2C> {
        let explicit = self.r < 0.0;
        match j {
            1 => self.a1(w),
            2 if explicit => self.a2_explicit(w),
            2 => Ok(self.a1(w)? * self.s[1]),
            3 if explicit => self.a3_explicit(w),
            3 => Ok(self.a1(w)? * self.s[1] * self.s[2]),
            _ => Err(LabError::Precondition(format!("sector {j} not in 1..=3"))),
        }
    }

    /// Sector-dispatched `A(w)`.
    pub fn matrix(&self, w: C64, side: Option<Side>) -> Result<Mat2C> {
        self.sector_matrix(sector_of(w, side)?.0, w)
    }

    /// `w^{sigma3/4} A(w) e^{(2/3) w^{3/2} sigma3}`, which tends to `M0^{-1}`.
    pub fn normalized(&self, w: C64, side: Option<Side>) -> Result<Mat2C> {
        let (j, a) = sector_of(w, side)?;
        let r = w.norm();
        let q = C64::from_polar(r.powf(0.25), 0.25 * a);
        let e = C64::from_polar(2.0 / 3.0 * r.powf(1.5), 1.5 * a);
        Ok(Mat2C::diag(q, q.inv()) * self.sector_matrix(j, w)? * Mat2C::exp_sigma3(e))
    }

    /// `max |A3 S1 - A1|`, `|A1 S2 - A2|`, `|A2 S3 - A3|` (relative) over `points`,
    /// with `A2`, `A3` in closed form when `r = -1`.
    pub fn monodromy_residual(&self, points: &[C64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &w in points {
            let a1 = self.a1(w)?;
            let (a2, a3) = if self.r < 0.0 {
                (self.a2_explicit(w)?, self.a3_explicit(w)?)
            } else {
                let a2 = a1 * s_matrices(self.r)[1];
                (a2, a2 * s_matrices(self.r)[2])
            };
            let scale = a1.max_abs().max(a2.max_abs()).max(a3.max_abs()).max(1.0);
            worst = worst
                .max((a3 * self.s[0]).dist(&a1) / scale)
                .max((a1 * self.s[1]).dist(&a2) / scale)
                .max((a2 * self.s[2]).dist(&a3) / scale);
        }
        Ok(worst)
    }
}

/// Points `|w| = radius` at angles `(k + 1/2) 2pi/3 / n` inside sector `j`.
pub fn sector_points(j: u8, radii: &[f64], n: usize) -> Vec<C64> {
    let base = 2.0 * PI / 3.0 * (j as f64 - 1.0);
    let mut out = Vec::new();
    for &r in radii {
        for k in 0..n {
            out.push(C64::from_polar(r, base + 2.0 * PI / 3.0 * (k as f64 + 0.5) / n as f64));
        }
    }
    out
}

/// The 100-point grid: radii `1..=10`, ten angles `(k + 1/2) 2pi/10`.
pub fn identity_grid() -> Vec<C64> {
    let mut out = Vec::with_capacity(100);
    for r in 1..=10 {
        for k in 0..10 {
            out.push(C64::from_polar(r as f64, 2.0 * PI * (k as f64 + 0.5) / 10.0));
        }
    }
    out
}

/// Values on the identity grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryIdentity {
    /// `max |y1 + y2 + y3| / (|y1| + |y2| + |y3|)` and the same for derivatives.
    pub sum_value: f64,
    pub sum_derivative: f64,
    /// `max |det A(w) - 1|`.
    pub det_minus_one: f64,
    /// `max |det A(w) - i/2|`.
    pub det_minus_half_i: f64,
}

pub fn airy_identity(par: &AiryParametrix) -> Result<AiryIdentity> {
    let mut out = AiryIdentity { sum_value: 0.0, sum_derivative: 0.0, det_minus_one: 0.0, det_minus_half_i: 0.0 };
    for w in identity_grid() {
        let y = [rotated_airy(1, w)?, rotated_airy(2, w)?, rotated_airy(3, w)?];
        let sv = y.iter().map(|p| p.value).sum::<C64>().norm() / y.iter().map(|p| p.value.norm()).sum::<f64>();
        let sd = y.iter().map(|p| p.derivative).sum::<C64>().norm() / y.iter().map(|p| p.derivative.norm()).sum::<f64>();
        let d = par.matrix(w, None)?.det();
        out.sum_value = out.sum_value.max(sv);
        out.sum_derivative = out.sum_derivative.max(sd);
        out.det_minus_one = out.det_minus_one.max((d - 1.0).norm());
        out.det_minus_half_i = out.det_minus_half_i.max((d - 0.5 * I).norm());
    }
    Ok(out)
}

/// Radii and residuals `|w^{sigma3/4} A e^{E sigma3} - M0^{-1}|` along the rays
/// `pi/3`, `pi`, `5pi/3`, plus the log-log slope over all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationFit {
    pub radii: Vec<f64>,
    pub residuals: Vec<[f64; 3]>,
    pub slopes: [f64; 3],
}

pub fn normalization_fit(par: &AiryParametrix, radii: &[f64]) -> Result<NormalizationFit> {
    let rays = [PI / 3.0, PI, 5.0 * PI / 3.0];
    let mut residuals = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut row = [0.0; 3];
        for (k, &a) in rays.iter().enumerate() {
            row[k] = par.normalized(C64::from_polar(r, a), None)?.dist(&m0_inv());
        }
        residuals.push(row);
    }
    let slopes = [0, 1, 2].map(|k| loglog_slope(radii, &residuals.iter().map(|row| row[k]).collect::<Vec<_>>()));
    Ok(NormalizationFit { radii: radii.to_vec(), residuals, slopes })
}

/// Default radii of the normalization fit, geometric in `[5, 30]`.
pub fn normalization_radii() -> Vec<f64> {
    (0..8).map(|k| 5.0 * 6f64.powf(k as f64 / 7.0)).collect()
}

/// Jump `A+ = A- S_j` on the three rays at `radii`.
pub fn ray_jump_residual(par: &AiryParametrix, radii: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in radii {
        for (k, ray) in [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0].into_iter().enumerate() {
            let w = C64::from_polar(r, ray);
            let (ap, am) = (par.matrix(w, Some(Side::Plus))?, par.matrix(w, Some(Side::Minus))?);
            worst = worst.max((am * par.s[k]).dist(&ap) / ap.max_abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Airy suite: identity, determinant, monodromy, ray jumps and normalization.
pub fn airy_suite(par: &AiryParametrix) -> Result<Vec<ResidualReport>> {
    let loc = format!("r={}", par.r);
    let id = airy_identity(par)?;
    let mut out = vec![
        ResidualReport::below("y1 + y2 + y3 (relative)", "100-point grid", id.sum_value, 1e-10),
        ResidualReport::below("y1' + y2' + y3' (relative)", "100-point grid", id.sum_derivative, 1e-10),
        ResidualReport::below("det A - i/2", "100-point grid", id.det_minus_half_i, 1e-10),
    ];
    let pts: Vec<C64> = (1..=3).flat_map(|j| sector_points(j, &[2.5], 10)).collect();
    out.push(ResidualReport::below("monodromy", &loc, par.monodromy_residual(&pts)?, 1e-12));
    out.push(ResidualReport::below("A+ - A- S on rays", &loc, ray_jump_residual(par, &[0.5, 2.0, 6.0])?, 1e-8));
    let fit = normalization_fit(par, &normalization_radii())?;
    for (k, s) in fit.slopes.iter().enumerate() {
        out.push(ResidualReport::near("normalization slope", format!("{loc} ray {k}"), *s, -1.5, 0.2));
    }
    Ok(out)
}

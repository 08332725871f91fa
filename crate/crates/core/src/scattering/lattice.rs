use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{LabError, Result};

/// Right background, fixed.
pub const A_RIGHT: f64 = 0.5;
pub const B_RIGHT: f64 = 0.0;

/// Deviations below this are treated as exact background when locating the support.
pub const SUPPORT_TOL: f64 = 1e-17;

/// Jacobi coefficients on a finite window, continued by the two backgrounds.
///
/// `a[k]` and `b[k]` hold `a(n_min + k)`, `b(n_min + k)`. Outside the window
/// `a, b` equal `(a_bg, b_bg)` to the left and `(1/2, 0)` to the right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeData {
    pub n_min: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_bg: f64,
    pub b_bg: f64,
    /// Declared exponential decay rate of the deviation from the backgrounds.
    #[serde(default)]
    pub nu: Option<f64>,
}

/// Left-background spectral geometry in the z-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaps {
    /// `z(b - 2a)`
    pub q1: f64,
    /// `z(b + 2a)`
    pub q2: f64,
}

/// Inverse Joukowsky map on real `lambda >= 1`: the root in `(0, 1]`.
pub fn z_of_lambda(lambda: f64) -> f64 {
    let s = (lambda * lambda - 1.0).max(0.0).sqrt();
    1.0 / (lambda + s)
}

impl LatticeData {
    /// Checks positivity and finiteness. The gap condition `1 < b - 2a` is
    /// checked separately by [`LatticeData::gaps`].
    pub fn new(n_min: i64, a: Vec<f64>, b: Vec<f64>, a_bg: f64, b_bg: f64, nu: Option<f64>) -> Result<Self> {
        let d = LatticeData { n_min, a, b, a_bg, b_bg, nu };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() || self.a.is_empty() {
            return Err(LabError::InvalidData(format!(
                "a and b must be non-empty and equally long (got {} and {})",
                self.a.len(),
                self.b.len()
            )));
        }
        if !(self.a_bg > 0.0) || !self.b_bg.is_finite() {
            return Err(LabError::InvalidData(format!("left background ({}, {}) needs a > 0", self.a_bg, self.b_bg)));
        }
        for (k, (&a, &b)) in self.a.iter().zip(&self.b).enumerate() {
            let n = self.n_min + k as i64;
            if !(a > 0.0) || !a.is_finite() {
                return Err(LabError::InvalidData(format!("a({n}) = {a} is not positive")));
            }
            if !b.is_finite() {
                return Err(LabError::InvalidData(format!("b({n}) is not finite")));
            }
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0) {
                return Err(LabError::InvalidData(format!("decay rate nu = {nu} must be positive")));
            }
        }
        Ok(())
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.a.len() as i64 - 1
    }

    pub fn a(&self, n: i64) -> f64 {
        if n < self.n_min {
            self.a_bg
        } else if n > self.n_max() {
            A_RIGHT
        } else {
            self.a[(n - self.n_min) as usize]
        }
    }

    pub fn b(&self, n: i64) -> f64 {
        if n < self.n_min {
            self.b_bg
        } else if n > self.n_max() {
            B_RIGHT
        } else {
            self.b[(n - self.n_min) as usize]
        }
    }

    /// Band-edge data of the left background; fails unless `1 < b - 2a`.
    pub fn gaps(&self) -> Result<Gaps> {
        let lo = self.b_bg - 2.0 * self.a_bg;
        if !(lo > 1.0) {
            return Err(LabError::InvalidData(format!(
                "left band must lie to the right of [-1, 1]: need 1 < b - 2a, got b - 2a = {lo}"
            )));
        }
        Ok(Gaps { q1: z_of_lambda(lo), q2: z_of_lambda(self.b_bg + 2.0 * self.a_bg) })
    }

    /// First site whose coefficients differ from the left background
    /// (`n_max + 1` if none).
    pub fn left_support(&self) -> i64 {
        (self.n_min..=self.n_max())
            .find(|&n| (self.a(n) - self.a_bg).abs() > SUPPORT_TOL || (self.b(n) - self.b_bg).abs() > SUPPORT_TOL)
            .unwrap_or(self.n_max() + 1)
    }

    /// Last site whose coefficients differ from the right background
    /// (`n_min - 1` if none).
    pub fn right_support(&self) -> i64 {
        (self.n_min..=self.n_max())
            .rev()
            .find(|&n| (self.a(n) - A_RIGHT).abs() > SUPPORT_TOL || (self.b(n) - B_RIGHT).abs() > SUPPORT_TOL)
            .unwrap_or(self.n_min - 1)
    }

    /// Same coefficients on a window padded by `extra` background sites per side.
    pub fn padded(&self, extra: usize) -> LatticeData {
        let n_min = self.n_min - extra as i64;
        let n_max = self.n_max() + extra as i64;
        LatticeData {
            n_min,
            a: (n_min..=n_max).map(|n| self.a(n)).collect(),
            b: (n_min..=n_max).map(|n| self.b(n)).collect(),
            ..self.clone()
        }
    }

    /// Number of eigenvalues of the finite Jacobi matrix on `[lo, hi]` below `x`.
    pub fn sturm_count(&self, lo: i64, hi: i64, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for n in lo..=hi {
            let off = if n == lo { 0.0 } else { self.a(n - 1) };
            q = self.b(n) - x - off * off / q;
            if q == 0.0 {
                q = -f64::EPSILON * (1.0 + x.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalues of the truncated matrix on the window lying strictly
    /// outside both bands (margin `eps`), counted by Sturm sequences.
    pub fn truncated_outside_band_count(&self, eps: f64) -> Result<usize> {
        self.gaps()?;
        let (lo, hi) = (self.n_min, self.n_max());
        let left_lo = self.b_bg - 2.0 * self.a_bg;
        let left_hi = self.b_bg + 2.0 * self.a_bg;
        let below = self.sturm_count(lo, hi, -1.0 - eps);
        let between = self.sturm_count(lo, hi, left_lo - eps) - self.sturm_count(lo, hi, 1.0 + eps);
        let above = (hi - lo + 1) as usize - self.sturm_count(lo, hi, left_hi + eps);
        Ok(below + between + above)
    }

    /// Eigenvalues (ascending) of the truncated matrix outside both bands,
    /// located by Sturm bisection to `tol`.
    pub fn truncated_outside_band_eigenvalues(&self, eps: f64, tol: f64) -> Result<Vec<f64>> {
        self.gaps()?;
        let (lo, hi) = (self.n_min, self.n_max());
        let bound = (lo..=hi).map(|n| self.b(n).abs() + 2.0 * self.a(n).max(self.a(n - 1))).fold(0.0, f64::max) + 1.0;
        let left_lo = self.b_bg - 2.0 * self.a_bg;
        let left_hi = self.b_bg + 2.0 * self.a_bg;
        let mut out = Vec::new();
        for (u, v) in [(-bound, -1.0 - eps), (1.0 + eps, left_lo - eps), (left_hi + eps, bound)] {
            if u >= v {
                continue;
            }
            let c0 = self.sturm_count(lo, hi, u);
            let c1 = self.sturm_count(lo, hi, v);
            for k in c0..c1 {
                // k-th eigenvalue: smallest x with count(x) > k
                let (mut l, mut r) = (u, v);
                while r - l > tol {
                    let m = 0.5 * (l + r);
                    if self.sturm_count(lo, hi, m) > k {
                        r = m;
                    } else {
                        l = m;
                    }
                }
                out.push(0.5 * (l + r));
            }
        }
        Ok(out)
    }

    pub fn to_json_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        let d: LatticeData = serde_json::from_reader(std::io::BufReader::new(f))?;
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure_step() -> LatticeData {
        let n_min = -20;
        let a = vec![0.5; 41];
        let b = (n_min..=20).map(|n| if n < 0 { 2.5 } else { 0.0 }).collect();
        LatticeData::new(n_min, a, b, 0.5, 2.5, None).unwrap()
    }

    #[test]
    fn backgrounds_outside_window() {
        let d = pure_step();
        assert_eq!(d.b(-100), 2.5);
        assert_eq!(d.b(100), 0.0);
        assert_eq!(d.a(100), 0.5);
        assert_eq!(d.left_support(), 0);
        assert_eq!(d.right_support(), -1);
    }

    #[test]
    fn gap_condition() {
        let g = pure_step().gaps().unwrap();
        assert!((g.q1 - 0.381966011250105).abs() < 1e-14);
        assert!((g.q2 - 0.145898033750315).abs() < 1e-14);
        let mut bad = pure_step();
        bad.b_bg = 1.5;
        assert!(matches!(bad.gaps(), Err(LabError::InvalidData(_))));
    }

    #[test]
    fn rejects_nonpositive_a() {
        assert!(LatticeData::new(0, vec![0.5, 0.0], vec![0.0, 0.0], 0.5, 2.5, None).is_err());
        assert!(LatticeData::new(0, vec![0.5], vec![0.0, 0.0], 0.5, 2.5, None).is_err());
    }

    #[test]
    fn sturm_matches_dense_count() {
        // 2x2 block [[0, 1], [1, 0]] has eigenvalues -1 and 1
        let d = LatticeData::new(0, vec![1.0, 0.5], vec![0.0, 0.0], 0.5, 2.5, None).unwrap();
        assert_eq!(d.sturm_count(0, 1, -1.5), 0);
        assert_eq!(d.sturm_count(0, 1, 0.0), 1);
        assert_eq!(d.sturm_count(0, 1, 1.5), 2);
    }

    #[test]
    fn json_round_trip() {
        let d = pure_step();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lat.json");
        d.to_json_file(&p).unwrap();
        assert_eq!(LatticeData::from_json_file(&p).unwrap(), d);
    }
}

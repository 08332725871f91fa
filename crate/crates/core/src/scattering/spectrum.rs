use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::loglog_slope;
use crate::{LabError, Result, C64};

use super::jost::{zeta_at, JostPair};
use super::lattice::LatticeData;

/// Real Wronskian at a real point of a gap.
pub fn wronskian_real(z: f64, data: &LatticeData) -> Result<f64> {
    Ok(JostPair::new(C64::new(z, 0.0), data, None)?.wronskian(data)?.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub z: f64,
    pub lambda: f64,
}

impl Eigenvalue {
    pub fn from_z(z: f64) -> Self {
        Eigenvalue { z, lambda: 0.5 * (z + 1.0 / z) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EigenScan {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Gap endpoints where `|W|` is below the resonance threshold.
    pub resonance_candidates: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    /// Grid points per gap.
    pub grid: usize,
    /// Root tolerance in `z`.
    pub tol: f64,
    /// Relative threshold on `|W(p)|` for endpoint candidates.
    pub resonance_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { grid: 400, tol: 1e-13, resonance_threshold: 1e-6 }
    }
}

/// Gap intervals in `z`: `(-1, 0)`, `(0, q2)`, `(q1, 1)`.
pub fn gap_intervals(data: &LatticeData) -> Result<[(f64, f64); 3]> {
    let g = data.gaps()?;
    Ok([(-1.0, 0.0), (0.0, g.q2), (g.q1, 1.0)])
}

/// Typical size of `|W|` on the unit circle (median of 8 samples).
pub fn wronskian_scale(data: &LatticeData) -> Result<f64> {
    let mut v = (0..8)
        .map(|k| {
            let z = C64::from_polar(1.0, std::f64::consts::PI * (2.0 * k as f64 + 1.0) / 8.0);
            Ok(JostPair::new(z, data, None)?.wronskian(data)?.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    v.sort_by(f64::total_cmp);
    Ok(0.5 * (v[3] + v[4]))
}

/// Sign changes of the real Wronskian on a grid in each gap, refined by bisection.
/// The pole of `W` at `z = 0` is excluded by construction.
pub fn eigenvalues(data: &LatticeData, opts: ScanOptions) -> Result<EigenScan> {
    let gaps = gap_intervals(data)?;
    let mut scan = EigenScan::default();
    for (lo, hi) in gaps {
        let m = opts.grid;
        let zs: Vec<f64> = (1..=m).map(|k| lo + (hi - lo) * k as f64 / (m + 1) as f64).collect();
        let ws = zs.par_iter().map(|&z| wronskian_real(z, data)).collect::<Result<Vec<f64>>>()?;
        for k in 0..m - 1 {
            if ws[k] == 0.0 {
                scan.eigenvalues.push(Eigenvalue::from_z(zs[k]));
                continue;
            }
            if ws[k].signum() != ws[k + 1].signum() && ws[k + 1] != 0.0 {
                let z = bisect(|z| wronskian_real(z, data), zs[k], zs[k + 1], ws[k], opts.tol)?;
                scan.eigenvalues.push(Eigenvalue::from_z(z));
            }
        }
    }
    let scale = wronskian_scale(data)?;
    let g = data.gaps()?;
    for p in [-1.0, 1.0, g.q1, g.q2] {
        let w = wronskian_real(p, data)?;
        if w.abs() < opts.resonance_threshold * scale {
            scan.resonance_candidates.push(p);
        }
    }
    Ok(scan)
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, fa: f64, tol: f64) -> Result<f64> {
    let sa = fa.signum();
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Exponent applied to `sum psi(z_j, n)^2` in the norming constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormingExponent {
    /// `gamma = (sum psi^2)^(-1)`; consistent with the pole condition.
    MinusOne,
    /// `gamma = (sum psi^2)^(-2)`.
    MinusTwo,
}

impl NormingExponent {
    pub fn value(self) -> f64 {
        match self {
            NormingExponent::MinusOne => -1.0,
            NormingExponent::MinusTwo => -2.0,
        }
    }
}

/// `ln sum_n psi(z_j, n)^2` for the right Jost solution at an eigenvalue.
///
/// Ratios are propagated inward from both ends (the stable directions for a
/// decaying solution) and joined where they agree best; tails outside the
/// window are summed exactly as geometric series.
pub fn log_norm_square(zj: f64, data: &LatticeData) -> Result<f64> {
    if !(zj.abs() < 1.0) || zj == 0.0 {
        return Err(LabError::WindowTooSmall(format!("z_j = {zj} does not give a decaying right tail")));
    }
    let zeta = zeta_at(C64::new(zj, 0.0), data.a_bg, data.b_bg, None)?.re;
    if !(zeta.abs() < 1.0) {
        return Err(LabError::WindowTooSmall(format!("zeta(z_j) = {zeta} does not give a decaying left tail")));
    }
    let lam = 0.5 * (zj + 1.0 / zj);
    let lo = data.n_min - 1;
    let hi = data.n_max() + 1;
    let len = (hi - lo + 1) as usize;
    // rho[k] = psi(n+1)/psi(n), eta[k] = psi(n)/psi(n-1), n = lo + k
    let mut rho = vec![zj; len];
    for n in (lo + 1..=hi).rev() {
        let k = (n - lo) as usize;
        rho[k - 1] = data.a(n - 1) / (lam - data.b(n) - data.a(n) * rho[k]);
    }
    let mut eta = vec![1.0 / zeta; len];
    for n in lo..hi {
        let k = (n - lo) as usize;
        eta[k + 1] = ((lam - data.b(n)) - data.a(n - 1) / eta[k]) / data.a(n);
    }
    if rho.iter().chain(&eta).any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite("bound-state ratios"));
    }
    // rho[k-1] and eta[k] both equal psi(n)/psi(n-1)
    let star = (1..len)
        .min_by(|&i, &j| {
            let d = |k: usize| (rho[k - 1] - eta[k]).abs() / (rho[k - 1].abs() + eta[k].abs());
            d(i).total_cmp(&d(j))
        })
        .unwrap_or(0);
    let mut l = vec![0.0; len];
    for k in star + 1..len {
        l[k] = l[k - 1] + rho[k - 1].abs().ln();
    }
    for k in (0..star).rev() {
        l[k] = l[k + 1] - eta[k + 1].abs().ln();
    }
    let peak = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum: f64 = l.iter().map(|&v| (2.0 * (v - peak)).exp()).sum();
    sum += (2.0 * (l[len - 1] - peak)).exp() * zj * zj / (1.0 - zj * zj);
    sum += (2.0 * (l[0] - peak)).exp() * zeta * zeta / (1.0 - zeta * zeta);
    // Jost normalization psi(hi) = z_j^hi
    let shift = hi as f64 * zj.abs().ln() - l[len - 1];
    Ok(2.0 * (shift + peak) + sum.ln())
}

pub fn norming_constants(data: &LatticeData, eig: &[Eigenvalue], exponent: NormingExponent) -> Result<Vec<f64>> {
    eig.iter().map(|e| Ok((exponent.value() * log_norm_square(e.z, data)?).exp())).collect()
}

/// Residue of `m1(z) = T psi1(n) z^n` at an eigenvalue, by the trapezoid
/// rule on a small circle.
pub fn residue_m1(zj: f64, n: i64, data: &LatticeData, radius: f64) -> Result<C64> {
    let k = 64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..k {
        let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / k as f64);
        let z = zj + radius * e;
        let pair = JostPair::new(z, data, None)?;
        let t = pair.transmission(data)?;
        acc += t * pair.psi1.times_power(n, z.ln()) * e;
    }
    Ok(acc * radius / k as f64)
}

/// Right-hand side of the pole condition at `t = 0`: `-z_j gamma_j psi(z_j, n) z_j^n`.
pub fn pole_condition_rhs(zj: f64, gamma: f64, n: i64, data: &LatticeData) -> Result<C64> {
    let pair = JostPair::new(C64::new(zj, 0.0), data, None)?;
    Ok(-zj * gamma * pair.psi.value(n) * zj.powi(n as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResonanceState {
    Resonant,
    Nonresonant,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub point: f64,
    /// `|W(p)| / (scale of W on the unit circle)`.
    pub relative_w: f64,
    /// Fitted exponent of `|W(z)| ~ |z - p|^s`.
    pub slope: f64,
    pub state: ResonanceState,
}

/// Direction from `p` into the adjacent gap.
fn approach_direction(p: f64, data: &LatticeData) -> Result<f64> {
    let g = data.gaps()?;
    let tol = 1e-12;
    if (p + 1.0).abs() < tol || (p - g.q1).abs() < tol {
        Ok(1.0)
    } else if (p - 1.0).abs() < tol || (p - g.q2).abs() < tol {
        Ok(-1.0)
    } else {
        Err(LabError::Precondition(format!("{p} is not one of -1, 1, q1, q2")))
    }
}

/// Fits `log|W|` against `log|z - p|` on 6 geometric points approaching `p`
/// through its gap.
pub fn detect_resonance(data: &LatticeData, p: f64, threshold: f64) -> Result<ResonanceReport> {
    let dir = approach_direction(p, data)?;
    let scale = wronskian_scale(data)?;
    let wp = wronskian_real(p, data)?.abs();
    let ds: Vec<f64> = (0..6).map(|k| 1e-3 * 0.2f64.powi(k)).collect();
    let ws = ds.iter().map(|&d| Ok(wronskian_real(p + dir * d, data)?.abs())).collect::<Result<Vec<f64>>>()?;
    let slope = loglog_slope(&ds, &ws);
    let relative_w = wp / scale;
    let state = if relative_w >= threshold {
        ResonanceState::Nonresonant
    } else if slope >= 0.35 {
        ResonanceState::Resonant
    } else if slope <= 0.15 {
        ResonanceState::Nonresonant
    } else {
        ResonanceState::Indeterminate
    };
    Ok(ResonanceReport { point: p, relative_w, slope, state })
}

/// Shifts `b(site)` by the `delta` in `[lo, hi]` at which `W(p)` vanishes,
/// producing data resonant at `p`.
pub fn tune_to_resonance(base: &LatticeData, site: i64, p: f64, lo: f64, hi: f64) -> Result<(f64, LatticeData)> {
    if site < base.n_min || site > base.n_max() {
        return Err(LabError::Precondition(format!("site {site} outside the window")));
    }
    let shifted = |delta: f64| {
        let mut d = base.clone();
        d.b[(site - base.n_min) as usize] += delta;
        d
    };
    let w = |delta: f64| wronskian_real(p, &shifted(delta));
    let (wl, wh) = (w(lo)?, w(hi)?);
    if wl.signum() == wh.signum() {
        return Err(LabError::Precondition(format!("W({p}) does not change sign for b({site}) shifts in [{lo}, {hi}]")));
    }
    let delta = bisect(w, lo, hi, wl, 1e-15)?;
    Ok((delta, shifted(delta)))
}

/// `P(z) = prod |z_j| (z - 1/z_j) / (z - z_j)` over the given eigenvalues.
pub fn blaschke(z: C64, zs: &[f64]) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    for &zj in zs {
        if (z - zj).norm() == 0.0 {
            return Err(LabError::Precondition(format!("Blaschke product evaluated at its pole {zj}")));
        }
        p *= zj.abs() * (z - 1.0 / zj) / (z - zj);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(n: i64) -> LatticeData {
        let a = vec![0.5; (2 * n + 1) as usize];
        let b = (-n..=n).map(|k| if k < 0 { 2.5 } else { 0.0 }).collect();
        LatticeData::new(-n, a, b, 0.5, 2.5, None).unwrap()
    }

    fn with_well(n: i64, depth: f64) -> LatticeData {
        let mut d = step(n);
        d.b[n as usize] -= depth;
        d
    }

    #[test]
    fn pure_step_has_no_eigenvalues() {
        let d = step(20);
        let s = eigenvalues(&d, ScanOptions::default()).unwrap();
        assert!(s.eigenvalues.is_empty());
        assert!(s.resonance_candidates.is_empty());
        assert_eq!(d.padded(200).truncated_outside_band_count(1e-9).unwrap(), 0);
    }

    #[test]
    fn deep_well_matches_truncated_matrix() {
        let d = with_well(20, 3.0);
        let s = eigenvalues(&d, ScanOptions::default()).unwrap();
        let oracle = d.padded(200).truncated_outside_band_eigenvalues(1e-9, 1e-14).unwrap();
        assert_eq!(s.eigenvalues.len(), oracle.len());
        assert_eq!(s.eigenvalues.len(), 1);
        let e = s.eigenvalues[0];
        assert!(e.z < 0.0);
        assert!((e.lambda - oracle[0]).abs() < 1e-9);
    }

    #[test]
    fn norming_constant_against_residue() {
        let d = with_well(20, 3.0);
        let e = eigenvalues(&d, ScanOptions::default()).unwrap().eigenvalues[0];
        let g1 = norming_constants(&d, &[e], NormingExponent::MinusOne).unwrap()[0];
        let g2 = norming_constants(&d, &[e], NormingExponent::MinusTwo).unwrap()[0];
        assert!(g1 > 0.0 && g2 > 0.0);
        for n in [-1, 0, 2] {
            let res = residue_m1(e.z, n, &d, 1e-3).unwrap();
            let rhs1 = pole_condition_rhs(e.z, g1, n, &d).unwrap();
            let rhs2 = pole_condition_rhs(e.z, g2, n, &d).unwrap();
            assert!((res - rhs1).norm() < 1e-6 * rhs1.norm(), "n={n}: {res} vs {rhs1}");
            assert!((res - rhs2).norm() > 1e-3 * rhs2.norm());
        }
    }

    #[test]
    fn norming_constant_window_independent() {
        let d = with_well(20, 3.0);
        let e = eigenvalues(&d, ScanOptions::default()).unwrap().eigenvalues[0];
        let g = norming_constants(&d, &[e], NormingExponent::MinusOne).unwrap()[0];
        let g2 = norming_constants(&d.padded(40), &[e], NormingExponent::MinusOne).unwrap()[0];
        assert!((g - g2).abs() < 1e-8 * g);
    }

    #[test]
    fn generic_step_nonresonant() {
        let d = step(10);
        let g = d.gaps().unwrap();
        for p in [-1.0, 1.0, g.q1, g.q2] {
            let r = detect_resonance(&d, p, 1e-6).unwrap();
            assert_eq!(r.state, ResonanceState::Nonresonant, "{p}: {r:?}");
            assert!(r.slope.abs() < 0.15);
        }
    }

    #[test]
    fn tuned_data_resonant_at_q2() {
        let d = step(10);
        let g = d.gaps().unwrap();
        let (_, tuned) = tune_to_resonance(&d, 0, g.q2, 0.0, 6.0).unwrap();
        let r = detect_resonance(&tuned, g.q2, 1e-6).unwrap();
        assert_eq!(r.state, ResonanceState::Resonant, "{r:?}");
        assert!((r.slope - 0.5).abs() < 0.05);
        for p in [-1.0, 1.0, g.q1] {
            assert_eq!(detect_resonance(&tuned, p, 1e-6).unwrap().state, ResonanceState::Nonresonant);
        }
        let ds: Vec<f64> = (0..6).map(|k| 1e-3 * 0.2f64.powi(k)).collect();
        let cs: Vec<f64> = ds.iter().map(|&dz| super::super::coeffs::chi(g.q2 + dz, &tuned).unwrap().norm()).collect();
        assert!((loglog_slope(&ds, &cs) + 0.5).abs() < 0.05);
    }

    #[test]
    fn blaschke_values() {
        assert_eq!(blaschke(C64::new(0.3, 0.2), &[]).unwrap(), C64::new(1.0, 0.0));
        let p0 = blaschke(C64::new(0.0, 0.0), &[-0.5]).unwrap();
        assert!((p0 - 2.0).norm() < 1e-15);
        for &z in &[C64::new(0.3, 0.2), C64::new(-2.0, 1.0), C64::new(0.1, -0.9)] {
            let zs = [-0.5, -0.2];
            let prod = blaschke(z, &zs).unwrap() * blaschke(z.inv(), &zs).unwrap();
            assert!((prod - 1.0).norm() < 1e-13);
        }
    }
}

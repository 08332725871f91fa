use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Result, C64};

use super::coeffs::{chi, reflection};
use super::lattice::LatticeData;
use super::spectrum::{
    detect_resonance, eigenvalues, norming_constants, Eigenvalue, NormingExponent, ResonanceReport, ScanOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSample {
    pub angle: f64,
    pub r: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSample {
    pub z: f64,
    pub chi: C64,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub circle_points: usize,
    pub interval_points: usize,
    pub scan: ScanOptions,
    pub exponent: NormingExponent,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { circle_points: 64, interval_points: 32, scan: ScanOptions::default(), exponent: NormingExponent::MinusOne }
    }
}

/// Sampled scattering data of one lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub r_samples: Vec<CircleSample>,
    pub chi_samples: Vec<IntervalSample>,
    pub eigenvalues: Vec<Eigenvalue>,
    pub gammas: Vec<f64>,
    pub gamma_exponent: NormingExponent,
    pub resonances: Vec<ResonanceReport>,
}

impl ScatteringData {
    pub fn build(data: &LatticeData, opts: BuildOptions) -> Result<Self> {
        let g = data.gaps()?;
        let m = opts.circle_points;
        let r_samples = (0..m)
            .into_par_iter()
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                Ok(CircleSample { angle, r: reflection(C64::from_polar(1.0, angle), data)?.r })
            })
            .collect::<Result<Vec<_>>>()?;
        let q = opts.interval_points;
        let chi_samples = (1..=q)
            .into_par_iter()
            .map(|k| {
                let z = g.q2 + (g.q1 - g.q2) * k as f64 / (q + 1) as f64;
                Ok(IntervalSample { z, chi: chi(z, data)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let scan = eigenvalues(data, opts.scan)?;
        let gammas = norming_constants(data, &scan.eigenvalues, opts.exponent)?;
        let resonances = [-1.0, 1.0, g.q1, g.q2]
            .iter()
            .map(|&p| detect_resonance(data, p, opts.scan.resonance_threshold))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScatteringData {
            r_samples,
            chi_samples,
            eigenvalues: scan.eigenvalues,
            gammas,
            gamma_exponent: opts.exponent,
            resonances,
        })
    }

    pub fn to_json_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}

/// `R(z, t) = R(z) exp((z - 1/z) t)`.
pub fn evolve_reflection(r: C64, z: C64, t: f64) -> C64 {
    r * ((z - z.inv()) * t).exp()
}

/// `gamma_j(t) = gamma_j exp((z_j - 1/z_j) t)`.
pub fn evolve_gamma(gamma: f64, zj: f64, t: f64) -> f64 {
    gamma * ((zj - 1.0 / zj) * t).exp()
}

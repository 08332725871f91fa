use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{LabError, Result, C64};

use super::{disk_boundary, PhaseContext};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub name: String,
    pub points: Vec<C64>,
}

impl Polyline {
    fn new(name: impl Into<String>, points: Vec<C64>) -> Self {
        Polyline { name: name.into(), points }
    }

    /// Image under `z -> 1/z`.
    pub fn inverted(&self, name: impl Into<String>) -> Self {
        Polyline::new(name, self.points.iter().map(|p| p.inv()).collect())
    }

    /// Euclidean distance from `z` to the polyline.
    pub fn distance(&self, z: C64) -> f64 {
        if self.points.len() == 1 {
            return (z - self.points[0]).norm();
        }
        self.points
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                let t = if d.norm_sqr() == 0.0 { 0.0 } else { ((z - w[0]) * d.conj()).re / d.norm_sqr() };
                (z - (w[0] + d * t.clamp(0.0, 1.0))).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns `x,y`, one row per vertex.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        wr.write_record(["x", "y"])?;
        for p in &self.points {
            wr.write_record([format!("{:.16e}", p.re), format!("{:.16e}", p.im)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Jump contour of the deformed problem: Sigma, `I`, `I*`, lens contours
/// around Sigma and `I`, eigenvalue circles, and the disks around `z0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub xi: f64,
    pub theta0: f64,
    /// `I = [q2, q1]` on the real axis inside the unit disk.
    pub interval: (f64, f64),
    pub eigenvalues: Vec<f64>,
    pub lens_margin: f64,
    pub eig_radius: f64,
    /// Disk parameter: `B` is the preimage of `|w| < t^{2/3} (3C/2)^{2/3} rho`.
    pub rho: f64,
}

impl ContourSpec {
    pub fn new(
        ctx: &PhaseContext,
        interval: (f64, f64),
        eigenvalues: Vec<f64>,
        lens_margin: f64,
        eig_radius: f64,
        rho: f64,
    ) -> Result<Self> {
        let (q2, q1) = (interval.0.min(interval.1), interval.0.max(interval.1));
        if !(q1.abs() < 1.0 && q2.abs() < 1.0) {
            return Err(LabError::Config(format!("interval [{q2}, {q1}] must lie inside the unit disk")));
        }
        if !(lens_margin > 0.0 && lens_margin < 0.5) {
            return Err(LabError::Config(format!("lens margin {lens_margin} must lie in (0, 0.5)")));
        }
        if !(rho > 0.0 && rho < 0.5 * ctx.z0.im) {
            return Err(LabError::Config(format!("rho = {rho} must lie in (0, Im z0 / 2 = {})", 0.5 * ctx.z0.im)));
        }
        Ok(ContourSpec { xi: ctx.xi, theta0: ctx.theta0, interval: (q2, q1), eigenvalues, lens_margin, eig_radius, rho })
    }

    fn arc(r: f64, a: f64, b: f64, n: usize) -> Vec<C64> {
        (0..=n).map(|k| C64::from_polar(r, a + (b - a) * k as f64 / n as f64)).collect()
    }

    /// Circle through the real points `a < b`, symmetric about the real axis.
    fn real_circle(a: f64, b: f64, n: usize) -> Vec<C64> {
        let c = C64::new(0.5 * (a + b), 0.0);
        Self::arc(0.5 * (b - a), 0.0, 2.0 * PI, n).into_iter().map(|p| p + c).collect()
    }

    /// Segment oriented toward the origin.
    fn real_segment(a: f64, b: f64, n: usize) -> Vec<C64> {
        let (from, to) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
        (0..=n).map(|k| C64::new(from + (to - from) * k as f64 / n as f64, 0.0)).collect()
    }

    /// All contour pieces, each with `n` segments.
    pub fn polylines(&self, ctx: &PhaseContext, n: usize) -> Result<Vec<Polyline>> {
        let (q2, q1) = self.interval;
        let (t0, t1) = (self.theta0, 2.0 * PI - self.theta0);
        let m = self.lens_margin;
        let mut out = vec![
            Polyline::new("sigma", Self::arc(1.0, t0, t1, n)),
            Polyline::new("interval", Self::real_segment(q2, q1, n)),
            Polyline::new("interval_star", Self::real_segment(1.0 / q2, 1.0 / q1, n)),
            Polyline::new("lens_c", Self::arc(1.0 - m, t0, t1, n)),
            Polyline::new("lens_c_star", Self::arc(1.0 / (1.0 - m), t0, t1, n)),
        ];
        let (a, b) = (q2 - m, q1 + m);
        out.push(Polyline::new("lens_ci", Self::real_circle(a, b, n)));
        let (ia, ib) = (1.0 / a, 1.0 / b);
        out.push(Polyline::new("lens_ci_star", Self::real_circle(ia.min(ib), ia.max(ib), n)));
        for (j, &zj) in self.eigenvalues.iter().enumerate() {
            let c = Polyline::new(format!("circle_{j}"), Self::arc(self.eig_radius, 0.0, 2.0 * PI, n).into_iter().map(|p| p + zj).collect());
            out.push(c.inverted(format!("circle_{j}_star")));
            out.push(c);
        }
        let mut b = disk_boundary(self.rho, n, ctx)?;
        b.push(b[0]);
        let disk = Polyline::new("disk_b", b);
        out.push(disk.inverted("disk_b_star"));
        out.push(disk);
        Ok(out)
    }

    /// Max distance of `1/p` from the partner contour, over vertices `p` of the
    /// independently built pairs (Sigma with itself, `I`, and both lenses).
    pub fn symmetry_residual(&self, lines: &[Polyline]) -> f64 {
        let find = |name: &str| lines.iter().find(|l| l.name == name);
        let pairs = [("sigma", "sigma"), ("interval", "interval_star"), ("lens_c", "lens_c_star"), ("lens_ci", "lens_ci_star")];
        let mut worst: f64 = 0.0;
        for (a, b) in pairs {
            if let (Some(la), Some(lb)) = (find(a), find(b)) {
                for p in &la.points {
                    worst = worst.max(lb.distance(p.inv()));
                }
            }
        }
        worst
    }

    /// Smallest distance from `dB` to the points `+-1`.
    pub fn disk_distance_to_edges(&self, lines: &[Polyline]) -> f64 {
        lines
            .iter()
            .find(|l| l.name == "disk_b")
            .map(|l| l.points.iter().map(|p| (p - 1.0).norm().min((p + 1.0).norm())).fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NAN)
    }

    /// Smallest gap between an eigenvalue circle and the lens contours, `I`, or Sigma.
    pub fn eigenvalue_clearance(&self, lines: &[Polyline]) -> f64 {
        let guarded = ["sigma", "interval", "lens_c", "lens_ci"];
        let mut gap = f64::INFINITY;
        for &zj in &self.eigenvalues {
            for l in lines.iter().filter(|l| guarded.contains(&l.name.as_str())) {
                gap = gap.min(l.distance(C64::new(zj, 0.0)) - self.eig_radius);
            }
        }
        gap
    }

    /// Write every polyline to `<dir>/<name>.csv`.
    pub fn write_csv(&self, lines: &[Polyline], dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for l in lines {
            l.write_csv(&dir.join(format!("{}.csv", l.name)))?;
        }
        Ok(())
    }
}

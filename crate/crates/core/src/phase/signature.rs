use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{LabError, Result, C64};

use super::{g, PhaseContext};

/// Values below this modulus count as zero.
pub const ZERO_BAND: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    RePhi,
    ReG,
}

/// `Re Phi` (no cut needed) or `Re g`; points where g is undefined give `None`.
pub fn field_value(field: Field, z: C64, ctx: &PhaseContext) -> Option<f64> {
    match field {
        Field::RePhi => Some(0.5 * (z - z.inv()).re + ctx.xi * z.norm().ln()),
        Field::ReG => g(z, ctx).ok().map(|v| v.re),
    }
}

pub fn sign_of(v: Option<f64>) -> i8 {
    match v {
        Some(x) if x > ZERO_BAND => 1,
        Some(x) if x < -ZERO_BAND => -1,
        _ => 0,
    }
}

/// Row-major sign grid, `signs[j * xs.len() + i]` at `(xs[i], ys[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub signs: Vec<i8>,
}

impl SignGrid {
    pub fn at(&self, i: usize, j: usize) -> i8 {
        self.signs[j * self.xs.len() + i]
    }

    /// Number of 4-connected components of equal nonzero sign.
    pub fn component_count(&self) -> usize {
        self.components_with(|_, _| true)
    }

    /// Like `component_count`, but two neighbours join only if `link(k, m)` holds.
    pub fn components_with<L: Fn(usize, usize) -> bool>(&self, link: L) -> usize {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut seen = vec![false; nx * ny];
        let mut count = 0;
        for start in 0..nx * ny {
            if seen[start] || self.signs[start] == 0 {
                continue;
            }
            count += 1;
            let s = self.signs[start];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(k) = stack.pop() {
                let (i, j) = (k % nx, k / nx);
                let mut nb = Vec::with_capacity(4);
                if i > 0 {
                    nb.push(k - 1);
                }
                if i + 1 < nx {
                    nb.push(k + 1);
                }
                if j > 0 {
                    nb.push(k - nx);
                }
                if j + 1 < ny {
                    nb.push(k + nx);
                }
                for m in nb {
                    if !seen[m] && self.signs[m] == s && link(k, m) {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
        }
        count
    }

    /// CSV with columns `x,y,sign`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wr.write_record(["x", "y", "sign"])?;
        for (j, &y) in self.ys.iter().enumerate() {
            for (i, &x) in self.xs.iter().enumerate() {
                wr.write_record([format!("{x:.16e}"), format!("{y:.16e}"), self.at(i, j).to_string()])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut rows: Vec<(f64, f64, i8)> = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| LabError::InvalidData(format!("bad sign-grid field {k} in {rec:?}")))
            };
            rows.push((parse(0)?, parse(1)?, parse(2)? as i8));
        }
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for &(x, y, _) in &rows {
            if ys.last() != Some(&y) {
                ys.push(y);
            }
            if ys.len() == 1 {
                xs.push(x);
            }
        }
        if xs.len() * ys.len() != rows.len() {
            return Err(LabError::InvalidData("sign grid is not rectangular".into()));
        }
        Ok(SignGrid { xs, ys, signs: rows.into_iter().map(|r| r.2).collect() })
    }
}

/// Sign of `field` on the cell-centred `nx x ny` grid over `[x0, x1] x [y0, y1]`.
pub fn signature_table(field: Field, ctx: &PhaseContext, x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> SignGrid {
    let xs: Vec<f64> = (0..nx).map(|i| x.0 + (x.1 - x.0) * (i as f64 + 0.5) / nx as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|j| y.0 + (y.1 - y.0) * (j as f64 + 0.5) / ny as f64).collect();
    let signs = (0..nx * ny)
        .into_par_iter()
        .map(|k| sign_of(field_value(field, C64::new(xs[k % nx], ys[k / nx]), ctx)))
        .collect();
    SignGrid { xs, ys, signs }
}

/// Region count of a sign grid of `field`. Neighbouring cells join only if
/// `field` keeps their sign at 8 points of the segment between them, so two
/// regions touching at a crossing of zero curves are not merged.
pub fn region_count(field: Field, ctx: &PhaseContext, grid: &SignGrid) -> usize {
    let nx = grid.xs.len();
    let n = grid.signs.len();
    let point = |k: usize| C64::new(grid.xs[k % nx], grid.ys[k / nx]);
    let edge_ok = |k: usize, m: usize| {
        let (a, b) = (point(k), point(m));
        let s = grid.signs[k];
        s != 0 && s == grid.signs[m] && (1..=8).all(|i| sign_of(field_value(field, a + (b - a) * (i as f64 / 9.0), ctx)) == s)
    };
    // links to the right and upward neighbour of every cell
    let links: Vec<(bool, bool)> = (0..n)
        .into_par_iter()
        .map(|k| (k % nx + 1 < nx && edge_ok(k, k + 1), k + nx < n && edge_ok(k, k + nx)))
        .collect();
    grid.components_with(|k, m| {
        let (lo, hi) = (k.min(m), k.max(m));
        if hi == lo + 1 {
            links[lo].0
        } else {
            links[lo].1
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchors(field: Field, ctx: &PhaseContext) -> [i8; 4] {
        [-0.8, 0.5, 2.0, -2.0].map(|x| sign_of(field_value(field, C64::new(x, 1e-3), ctx)))
    }

    #[test]
    fn four_regions_and_anchors() {
        for xi in [0.3, 0.6] {
            let ctx = PhaseContext::new(xi).unwrap();
            for field in [Field::RePhi, Field::ReG] {
                let grid = signature_table(field, &ctx, (-2.5, 2.5), (-2.5, 2.5), 40, 40);
                assert_eq!(region_count(field, &ctx, &grid), 4, "{field:?} xi={xi}");
                assert!(grid.component_count() <= 4);
                assert_eq!(anchors(field, &ctx), [1, -1, 1, -1], "{field:?} xi={xi}");
            }
        }
    }

    #[test]
    fn re_phi_vanishes_on_circle_and_flips_under_inversion() {
        let ctx = PhaseContext::new(0.4).unwrap();
        for k in 0..24 {
            let z = C64::from_polar(1.0, 0.1 + 0.26 * k as f64);
            assert_eq!(sign_of(field_value(Field::RePhi, z, &ctx)), 0);
        }
        let grid = signature_table(Field::ReG, &ctx, (-2.0, 2.0), (-2.0, 2.0), 20, 20);
        for j in 0..20 {
            for i in 0..20 {
                let z = C64::new(grid.xs[i], grid.ys[j]);
                let s = sign_of(field_value(Field::ReG, z.inv(), &ctx));
                assert_eq!(s, -grid.at(i, j), "{z}");
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let ctx = PhaseContext::new(0.5).unwrap();
        let grid = signature_table(Field::RePhi, &ctx, (-1.0, 1.0), (-1.0, 1.0), 6, 5);
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,sign\n") && !text.contains('\r'));
        assert_eq!(SignGrid::read_csv(&buf[..]).unwrap(), grid);
    }
}

use std::path::Path;

use serde::Serialize;

use crate::Result;

use super::flow::{Observer, SimState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub n: i64,
    pub a: f64,
    pub b: f64,
}

/// Records the sites `[lo, hi]` every `every` steps.
pub struct TrajectoryRecorder {
    pub lo: i64,
    pub hi: i64,
    pub every: usize,
    pub rows: Vec<TrajectoryRow>,
    count: usize,
}

impl TrajectoryRecorder {
    pub fn new(lo: i64, hi: i64, every: usize) -> Self {
        TrajectoryRecorder { lo, hi, every: every.max(1), rows: Vec::new(), count: 0 }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["t", "n", "a", "b"])?;
        for r in &self.rows {
            w.write_record([format!("{:.16e}", r.t), r.n.to_string(), format!("{:.16e}", r.a), format!("{:.16e}", r.b)])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Observer for TrajectoryRecorder {
    fn observe(&mut self, s: &SimState) {
        if self.count % self.every == 0 {
            for n in self.lo..=self.hi {
                self.rows.push(TrajectoryRow { t: s.t, n, a: s.data.a(n), b: s.data.b(n) });
            }
        }
        self.count += 1;
    }
}

pub fn write_snapshot(state: &SimState, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), state)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<SimState> {
    let f = std::fs::File::open(path)?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

#[cfg(test)]
mod tests {
    use super::super::flow::{integrate_observed, SimConfig};
    use super::super::init::{make_step_data, Profile};
    use super::*;

    #[test]
    fn trajectory_and_snapshot() {
        let d = make_step_data(0.5, 2.5, Profile::PureStep, 60).unwrap();
        let mut rec = TrajectoryRecorder::new(-2, 2, 10);
        let mut c = SimConfig::new(1.0);
        c.dt = 0.05;
        let s = integrate_observed(&SimState::new(d), &c, &mut rec).unwrap();
        // 20 steps plus the initial state, every 10th recorded
        assert_eq!(rec.rows.len(), 3 * 5);
        assert_eq!(rec.rows.last().unwrap().t, s.t);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("traj.csv");
        rec.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("t,n,a,b\n") && !text.contains('\r'));
        assert_eq!(text.lines().count(), 16);
        let q = dir.path().join("snap.json");
        write_snapshot(&s, &q).unwrap();
        assert_eq!(read_snapshot(&q).unwrap(), s);
    }
}

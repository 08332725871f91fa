use serde::{Deserialize, Serialize};

use crate::scattering::lattice::{LatticeData, A_RIGHT, B_RIGHT};
use crate::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub data: LatticeData,
    pub t: f64,
    pub dt_last: f64,
    /// Step-halving estimate of the global error, when requested.
    #[serde(default)]
    pub error_estimate: Option<f64>,
}

impl SimState {
    pub fn new(data: LatticeData) -> Self {
        SimState { data, t: 0.0, dt_last: 0.0, error_estimate: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub half_width: usize,
    /// Allowed deviation from the backgrounds in the boundary buffers.
    pub buffer_tol: f64,
    pub probes: Vec<f64>,
    /// Also integrate with `dt / 2` and record the difference.
    #[serde(default)]
    pub estimate_error: bool,
}

impl SimConfig {
    pub fn new(t_end: f64) -> Self {
        SimConfig {
            t_end,
            dt: 0.02,
            half_width: default_half_width(t_end),
            buffer_tol: 1e-8,
            probes: vec![0.25, 0.5, 0.75],
            estimate_error: false,
        }
    }

    /// `dt` times the bound `2 max|a| + max|b|` on the spectral radius must
    /// stay below 2 (the classical RK4 stability interval on the imaginary
    /// axis is about 2.8).
    pub fn check_stability(&self, data: &LatticeData) -> Result<()> {
        let amax = data.a.iter().cloned().fold(data.a_bg.max(A_RIGHT), f64::max);
        let bmax = data.b.iter().map(|b| b.abs()).fold(data.b_bg.abs(), f64::max);
        let rho = 2.0 * amax + bmax;
        if !(self.dt > 0.0) || self.dt * rho >= 2.0 {
            return Err(LabError::Config(format!("dt = {} too large for spectral bound {rho:.3}", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(LabError::Config(format!("t_end = {} must be non-negative", self.t_end)));
        }
        Ok(())
    }
}

/// `max(600, 6 T)`.
pub fn default_half_width(t_end: f64) -> usize {
    600usize.max((6.0 * t_end).ceil() as usize)
}

/// Right-hand side of the Toda equations with ghost cells frozen at the
/// backgrounds: `a' = a (b(n+1) - b(n))`, `b' = 2 (a(n)^2 - a(n-1)^2)`.
pub fn rhs(data: &LatticeData) -> (Vec<f64>, Vec<f64>) {
    let mut da = vec![0.0; data.a.len()];
    let mut db = vec![0.0; data.b.len()];
    rhs_into(&data.a, &data.b, data.a_bg, &mut da, &mut db);
    (da, db)
}

fn rhs_into(a: &[f64], b: &[f64], a_left: f64, da: &mut [f64], db: &mut [f64]) {
    let len = a.len();
    for i in 0..len {
        let b_next = if i + 1 < len { b[i + 1] } else { B_RIGHT };
        let a_prev = if i > 0 { a[i - 1] } else { a_left };
        da[i] = a[i] * (b_next - b[i]);
        db[i] = 2.0 * (a[i] * a[i] - a_prev * a_prev);
    }
}

struct Rk4 {
    k: [(Vec<f64>, Vec<f64>); 4],
    tmp: (Vec<f64>, Vec<f64>),
}

impl Rk4 {
    fn new(len: usize) -> Self {
        let z = || (vec![0.0; len], vec![0.0; len]);
        Rk4 { k: [z(), z(), z(), z()], tmp: z() }
    }

    fn step(&mut self, a: &mut [f64], b: &mut [f64], a_left: f64, h: f64) {
        let len = a.len();
        let coef = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                let (ka, kb) = &mut self.k[0];
                rhs_into(a, b, a_left, ka, kb);
            } else {
                let (prev_a, prev_b) = (&self.k[s - 1].0, &self.k[s - 1].1);
                for i in 0..len {
                    self.tmp.0[i] = a[i] + coef[s] * h * prev_a[i];
                    self.tmp.1[i] = b[i] + coef[s] * h * prev_b[i];
                }
                let (ka, kb) = &mut self.k[s];
                rhs_into(&self.tmp.0, &self.tmp.1, a_left, ka, kb);
            }
        }
        for i in 0..len {
            a[i] += h / 6.0 * (self.k[0].0[i] + 2.0 * self.k[1].0[i] + 2.0 * self.k[2].0[i] + self.k[3].0[i]);
            b[i] += h / 6.0 * (self.k[0].1[i] + 2.0 * self.k[1].1[i] + 2.0 * self.k[2].1[i] + self.k[3].1[i]);
        }
    }
}

/// Largest deviation from the backgrounds in the outer 10% of the window.
pub fn buffer_deviation(data: &LatticeData) -> f64 {
    let len = data.a.len();
    let w = (len / 10).max(1);
    let left = (0..w).map(|i| (data.a[i] - data.a_bg).abs().max((data.b[i] - data.b_bg).abs()));
    let right = (len - w..len).map(|i| (data.a[i] - A_RIGHT).abs().max((data.b[i] - B_RIGHT).abs()));
    left.chain(right).fold(0.0, f64::max)
}

/// Called after every step with the current state.
pub trait Observer {
    fn observe(&mut self, state: &SimState);
}

impl Observer for () {
    fn observe(&mut self, _: &SimState) {}
}

fn run(state: &SimState, t_end: f64, dt: f64, buffer_tol: f64, obs: &mut dyn Observer) -> Result<SimState> {
    let span = t_end - state.t;
    let steps = ((span / dt).round() as usize).max(1);
    let h = span / steps as f64;
    let mut s = state.clone();
    let mut rk = Rk4::new(s.data.a.len());
    let checkpoint = (steps / 10).max(1);
    obs.observe(&s);
    for k in 1..=steps {
        rk.step(&mut s.data.a, &mut s.data.b, s.data.a_bg, h);
        s.t = state.t + h * k as f64;
        s.dt_last = h;
        if let Some((i, &v)) = s.data.a.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(LabError::Positivity { site: s.data.n_min + i as i64, value: v, t: s.t });
        }
        if k % checkpoint == 0 || k == steps {
            let dev = buffer_deviation(&s.data);
            if !(dev <= buffer_tol) {
                return Err(LabError::BufferViolation { t: s.t, deviation: dev });
            }
        }
        obs.observe(&s);
    }
    Ok(s)
}

/// Classical RK4 with fixed step from `state.t` to `config.t_end`.
pub fn integrate(state: &SimState, config: &SimConfig) -> Result<SimState> {
    integrate_observed(state, config, &mut ())
}

pub fn integrate_observed(state: &SimState, config: &SimConfig, obs: &mut dyn Observer) -> Result<SimState> {
    config.check_stability(&state.data)?;
    if config.t_end <= state.t {
        return Ok(state.clone());
    }
    let mut out = run(state, config.t_end, config.dt, config.buffer_tol, obs)?;
    if config.estimate_error {
        let fine = run(state, config.t_end, 0.5 * config.dt, config.buffer_tol, &mut ())?;
        out.error_estimate = Some(max_diff(&out.data, &fine.data) / 15.0);
    }
    Ok(out)
}

pub fn max_diff(x: &LatticeData, y: &LatticeData) -> f64 {
    x.a.iter().zip(&y.a).chain(x.b.iter().zip(&y.b)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Empirical order from runs with `dt`, `dt/2`, `dt/4`.
pub fn convergence_order(state: &SimState, config: &SimConfig) -> Result<f64> {
    let r = |h: f64| run(state, config.t_end, h, config.buffer_tol, &mut ());
    let (s1, s2, s4) = (r(config.dt)?, r(0.5 * config.dt)?, r(0.25 * config.dt)?);
    Ok((max_diff(&s1.data, &s2.data) / max_diff(&s2.data, &s4.data)).log2())
}

/// `(a, b)` at `n = round(xi t)`.
pub fn probe(state: &SimState, xi: f64) -> (i64, f64, f64) {
    let n = (xi * state.t).round() as i64;
    (n, state.data.a(n), state.data.b(n))
}

/// `a^(n, t) = a(-n-1, s) / (2a)`, `b^(n, t) = (b - b(-n, s)) / (2a)` with
/// `t = 2a s`. The result has left background `(1/(4a), b/(2a))`. The window
/// grows by one site so that no original value is lost.
pub fn reflect_solution(state: &SimState) -> SimState {
    let d = &state.data;
    let (a_bg, b_bg) = (d.a_bg, d.b_bg);
    let c = 1.0 / (2.0 * a_bg);
    let lo = -d.n_max() - 1;
    let hi = -d.n_min;
    let a = (lo..=hi).map(|n| c * d.a(-n - 1)).collect();
    let b = (lo..=hi).map(|n| c * (b_bg - d.b(-n))).collect();
    let data = LatticeData { n_min: lo, a, b, a_bg: c * A_RIGHT, b_bg: c * b_bg, nu: d.nu };
    SimState { data, t: state.t / c, dt_last: state.dt_last / c, error_estimate: None }
}

#[cfg(test)]
mod tests {
    use super::super::init::{make_step_data, Profile};
    use super::*;

    #[test]
    fn equilibrium_rhs_vanishes() {
        let d = LatticeData::new(-5, vec![0.5; 11], vec![0.0; 11], 0.5, 0.0, None).unwrap();
        let (da, db) = rhs(&d);
        assert!(da.iter().chain(&db).all(|&v| v == 0.0));
    }

    #[test]
    fn one_site_rhs() {
        let mut d = LatticeData::new(-3, vec![0.5; 7], vec![0.0; 7], 0.5, 0.0, None).unwrap();
        d.b[3] = 0.4;
        let (da, _) = rhs(&d);
        assert_eq!(da[2], d.a(-1) * (d.b(0) - d.b(-1)));
    }

    #[test]
    fn db_telescopes() {
        let p = Profile::ExpPerturbed { nu: 0.7, amp_a: 0.05, amp_b: 0.3 };
        let d = make_step_data(0.5, 2.5, p, 20).unwrap();
        let (_, db) = rhs(&d);
        let s: f64 = db.iter().sum();
        let expect = 2.0 * (d.a(d.n_max()).powi(2) - d.a(d.n_min - 1).powi(2));
        assert!((s - expect).abs() < 1e-13);
    }

    #[test]
    fn stability_guard() {
        let d = make_step_data(0.5, 2.5, Profile::PureStep, 10).unwrap();
        let mut c = SimConfig::new(1.0);
        c.dt = 1.0;
        assert!(matches!(c.check_stability(&d), Err(LabError::Config(_))));
    }

    #[test]
    fn probe_at_time_zero() {
        let d = make_step_data(0.5, 2.5, Profile::PureStep, 10).unwrap();
        let s = SimState::new(d);
        assert_eq!(probe(&s, 0.7), (0, 0.5, 0.0));
    }

    #[test]
    fn reflection_is_an_involution() {
        let p = Profile::ExpPerturbed { nu: 1.0, amp_a: 0.05, amp_b: 0.2 };
        let s = SimState::new(make_step_data(0.7, 3.0, p, 15).unwrap());
        let r = reflect_solution(&s);
        assert!((r.data.a_bg - 1.0 / (4.0 * 0.7)).abs() < 1e-15);
        assert!((r.data.b_bg - 3.0 / 1.4).abs() < 1e-15);
        // far-left sites of the reflected data sit on its left background
        assert!((r.data.a(r.data.n_min) - r.data.a_bg).abs() < 1e-6);
        assert!((r.data.b(r.data.n_min) - r.data.b_bg).abs() < 1e-6);
        let rr = reflect_solution(&r);
        assert_eq!(rr.data.n_max(), s.data.n_max() + 1);
        for n in s.data.n_min - 3..=s.data.n_max() + 3 {
            assert!((rr.data.a(n) - s.data.a(n)).abs() < 1e-14, "a({n})");
            assert!((rr.data.b(n) - s.data.b(n)).abs() < 1e-14, "b({n})");
        }
        assert!((rr.data.a_bg - 0.7).abs() < 1e-15 && (rr.data.b_bg - 3.0).abs() < 1e-15);
    }

    #[test]
    fn buffer_violation_reported() {
        let d = make_step_data(0.5, 2.5, Profile::PureStep, 20).unwrap();
        let mut c = SimConfig::new(20.0);
        c.half_width = 20;
        let e = integrate(&SimState::new(d), &c).unwrap_err();
        assert!(matches!(e, LabError::BufferViolation { .. }));
    }
}

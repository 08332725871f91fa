//! Command-line front end: `toda-lab <subcommand> [--config c.json] [--out dir]`.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 configuration error, 3 runtime abort.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use toda_rh::config::{Mode, RunConfig};
use toda_rh::cplx::Mat2C;
use toda_rh::phase::{g_lemma_report, Field, GLemmaReport, PhaseContext};
use toda_rh::report::{ResidualReport, SuiteReport};
use toda_rh::rhp::{
    airy_suite, matching_report, model_report, parametrix_report, s_matrices, AiryParametrix, MatchingReport,
    ModelContext, ParametrixContext,
};
use toda_rh::scattering::{BuildOptions, ScatteringData};
use toda_rh::toda::{integrate_observed, make_step_data, write_snapshot, SimConfig, SimState, TrajectoryRecorder};
use toda_rh::verify::{
    emit_csv, emit_signature_grid, probe_rows, region_errors, run_suite, run_verify, suite_lattice, write_json,
    write_rows,
};
use toda_rh::{exit, LabError, Result};

#[derive(Parser)]
#[command(name = "toda-lab", version, about = "Toda rarefaction asymptotics: simulation, scattering and residual suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplies every residual tolerance.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Test hook: flip the sign of the lower-left entry of S2.
    #[arg(long, global = true, hide = true)]
    mutate_s2: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate the lattice to `t_end`; writes the final state and trajectories.
    Simulate,
    /// Reflection, chi and discrete spectrum of the initial data.
    Scatter,
    /// g-function checks and sign grids of Re Phi and Re g.
    Gfun,
    /// Model solution checks.
    Model,
    /// Airy parametrix, jump and matching checks.
    Parametrix,
    /// Compare the simulation with the rarefaction profile.
    Verify,
    /// Every residual suite in order.
    Suite,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::Simulate => Mode::Simulate,
            Command::Scatter => Mode::Scatter,
            Command::Gfun => Mode::Gfun,
            Command::Model => Mode::Model,
            Command::Parametrix => Mode::Parametrix,
            Command::Verify => Mode::Verify,
            Command::Suite => Mode::Suite,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::from_json_file(p).map_err(|e| match e {
            LabError::Io(io) => LabError::Config(format!("{}: {io}", p.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    c.mode = Some(cli.command.mode());
    if let Some(o) = &cli.out {
        c.out = Some(o.clone());
    }
    if let Some(s) = cli.tol_scale {
        c.tol_scale = s;
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if cli.mutate_s2 {
        let [a, b, cc, d] = s_matrices(c.r_minus_one)[1].entries();
        c.s2_override = Some(Mat2C::new(a, b, -cc, d));
    }
    c.validate()?;
    Ok(c)
}

fn set_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TODA_LAB_THREADS") {
        let n: usize = v.parse().map_err(|_| LabError::Config(format!("TODA_LAB_THREADS = {v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn print_suites(sections: &[SuiteReport], label: &str) {
    for s in sections {
        let n = s.entries.len();
        let bad = s.failures().count();
        println!("{label}{:<12} {:>3}/{n} pass", s.suite, n - bad);
        for f in s.failures() {
            println!("    FAIL {} [{}]: {:e} (tol {:e})", f.name, f.location, f.value, f.tolerance);
        }
    }
}

fn verdict(pass: bool) -> u8 {
    if pass {
        exit::PASS
    } else {
        exit::VERIFICATION_FAILED
    }
}

fn scale(entries: Vec<ResidualReport>, c: &RunConfig) -> Vec<ResidualReport> {
    entries.into_iter().map(|e| e.scaled(c.tol_scale)).collect()
}

fn simulate(c: &RunConfig, out: &Path) -> Result<u8> {
    let state = SimState::new(make_step_data(c.a_bg, c.b_bg, c.profile, c.half_width())?);
    let sim = SimConfig {
        t_end: c.t_end,
        dt: c.dt,
        half_width: c.half_width(),
        buffer_tol: c.buffer_tol,
        probes: c.xi.clone(),
        estimate_error: false,
    };
    let reach = (c.t_end.ceil() as i64 + 20).min(c.half_width() as i64);
    let mut rec = TrajectoryRecorder::new(-reach, reach, (1.0 / c.dt).round() as usize);
    let fin = integrate_observed(&state, &sim, &mut rec)?;
    write_snapshot(&fin, &out.join("snapshot.json"))?;
    rec.write_csv(&out.join("trajectory.csv"))?;
    let rows = probe_rows(&fin, &c.xi)?;
    write_rows(&[("direct", &rows)], std::fs::File::create(out.join("probes.csv"))?)?;
    let (ea, eb) = region_errors(&fin, c.eps)?;
    println!("t = {}: region errors |a - n/2t| = {ea:.3e}, |b - (1 - n/t)| = {eb:.3e}", fin.t);
    Ok(exit::PASS)
}

fn scatter(c: &RunConfig, out: &Path) -> Result<u8> {
    let data = suite_lattice(c)?;
    let sd = ScatteringData::build(&data, BuildOptions::default())?;
    sd.to_json_file(&out.join("scattering.json"))?;
    println!("{} reflection samples, {} eigenvalues", sd.r_samples.len(), sd.eigenvalues.len());
    Ok(exit::PASS)
}

fn gfun(c: &RunConfig, out: &Path) -> Result<u8> {
    let mut reports: Vec<GLemmaReport> = Vec::new();
    for &xi in &c.xi {
        let mut rep = g_lemma_report(xi)?;
        rep.entries = scale(rep.entries, c);
        for (field, tag) in [(Field::RePhi, "re_phi"), (Field::ReG, "re_g")] {
            emit_signature_grid(xi, field, c.grid, &out.join(format!("signature_{tag}_xi{xi}.csv")))?;
        }
        reports.push(rep);
    }
    write_json(&reports, &out.join("gfun.json"))?;
    let mut s = SuiteReport::new("g-lemma");
    s.extend(reports.iter().flat_map(|r| r.entries.clone()));
    print_suites(std::slice::from_ref(&s), "");
    Ok(verdict(s.pass()))
}

fn model(c: &RunConfig, out: &Path) -> Result<u8> {
    let mut s = SuiteReport::new("model");
    for &xi in &c.xi {
        s.extend(scale(model_report(&ModelContext::new(PhaseContext::new(xi)?, c.r_minus_one)?)?, c));
    }
    write_json(&s, &out.join("model.json"))?;
    print_suites(std::slice::from_ref(&s), "");
    Ok(verdict(s.pass()))
}

#[derive(Serialize)]
struct ParametrixOutput {
    suites: Vec<SuiteReport>,
    matching: Vec<MatchingReport>,
    experimental: bool,
}

fn parametrix(c: &RunConfig, out: &Path) -> Result<u8> {
    let mut par_airy = AiryParametrix::new(c.r_minus_one);
    if let Some(s2) = c.s2_override {
        par_airy = par_airy.with_s2(s2);
    }
    let mut airy = SuiteReport::new("airy");
    airy.extend(scale(airy_suite(&par_airy)?, c));
    let mut par = SuiteReport::new("parametrix");
    let mut matching = Vec::new();
    for &xi in &c.xi {
        let ctx = PhaseContext::new(xi)?;
        let model = ModelContext::new(ctx, c.r_minus_one)?;
        let t = c.matching_times[c.matching_times.len() / 2];
        par.extend(scale(parametrix_report(&ParametrixContext::with_eps(model, t, c.rho_for(&ctx), c.eps)?)?, c));
        matching.push(matching_report(&model, c.rho_for(&ctx), &c.matching_times, 16)?);
    }
    let experimental = c.r_minus_one > 0.0;
    let suites = vec![airy, par];
    print_suites(&suites, if experimental { "experimental " } else { "" });
    for m in &matching {
        println!("matching slope {:.3}, next-order relative error {:.3e}", m.slope, m.derived_rel);
    }
    let pass = suites.iter().all(|s| s.pass());
    write_json(&ParametrixOutput { suites, matching, experimental }, &out.join("parametrix.json"))?;
    Ok(if experimental { exit::PASS } else { verdict(pass) })
}

fn verify(c: &RunConfig, out: &Path) -> Result<u8> {
    let rep = run_verify(c)?;
    write_json(&rep, &out.join("verify.json"))?;
    emit_csv(&rep, &out.join("verify.csv"))?;
    for f in &rep.fits {
        println!(
            "{:<9} slopes a {:.3} b {:.3}, err(T/2)/err(T) = {:.3}",
            f.label, f.slope_a, f.slope_b, f.half_ratio
        );
    }
    println!("C = {:.6} ({})", rep.c, if rep.c_calibrated { "calibrated" } else { "fixture" });
    for e in rep.summary.iter().filter(|e| !e.pass) {
        println!("    FAIL {} [{}]: {:e} (tol {:e})", e.name, e.location, e.value, e.tolerance);
    }
    Ok(verdict(rep.pass))
}

fn suite(c: &RunConfig, out: &Path) -> Result<u8> {
    let rep = run_suite(c)?;
    write_json(&rep, &out.join("suite.json"))?;
    print_suites(&rep.sections, "");
    print_suites(&rep.experimental, "experimental ");
    Ok(verdict(rep.pass()))
}

fn run(cli: &Cli) -> Result<u8> {
    set_threads()?;
    let c = load(cli)?;
    let out = c.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)?;
    match cli.command {
        Command::Simulate => simulate(&c, &out),
        Command::Scatter => scatter(&c, &out),
        Command::Gfun => gfun(&c, &out),
        Command::Model => model(&c, &out),
        Command::Parametrix => parametrix(&c, &out),
        Command::Verify => verify(&c, &out),
        Command::Suite => suite(&c, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("toda-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

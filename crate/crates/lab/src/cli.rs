//! Command-line interface.

use crate::config::{builtin, ExperimentConfig, Overrides, ShapeInput};
use crate::error::{LabError, LabResult};
use crate::experiments;
use crate::manifest::Recorder;
use crate::output::Table;
use crate::verify::{self, SuiteContext};
use anisodrop::anisotropy::build_wulff;
use anisodrop::energy::{self, NonlocalTerm};
use anisodrop::optimize::{self, SweepVariable};
use anisodrop::shapes;
use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "anisodrop", version, about = "Anisotropic liquid-drop energies")]
pub struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub mc_samples: Option<u64>,
    /// Run independent sweep points in parallel.
    #[arg(long, global = true)]
    pub parallel_sweep: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and export the Wulff shape of the configured tension.
    Wulff,
    /// Evaluate energies of a shape.
    Energy {
        /// Shape file (JSON); defaults to the config's `shape`.
        #[arg(long)]
        shape: Option<PathBuf>,
    },
    /// Run invariant suites.
    Verify {
        /// Suite to run; repeatable. Defaults to all.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Run a named experiment.
    Experiment { name: String },
    /// Minimize over the configured shape family.
    Minimize,
    /// Sweep epsilon or mass over the configured family.
    Scan,
}

impl Command {
    fn label(&self) -> String {
        match self {
            Command::Wulff => "wulff".into(),
            Command::Energy { .. } => "energy".into(),
            Command::Verify { .. } => "verify".into(),
            Command::Experiment { name } => format!("experiment {name}"),
            Command::Minimize => "minimize".into(),
            Command::Scan => "scan".into(),
        }
    }

    fn dir_name(&self) -> String {
        match self {
            Command::Experiment { name } => name.clone(),
            _ => self.label(),
        }
    }
}

/// Caps the rayon pool from `ANISODROP_THREADS`.
pub fn init_threads() -> LabResult<()> {
    if let Ok(v) = std::env::var("ANISODROP_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| LabError::Config(format!("ANISODROP_THREADS={v:?} is not a count")))?;
        if n == 0 {
            return Err(LabError::Config("ANISODROP_THREADS must be positive".into()));
        }
        // A second initialization (tests calling run twice) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn load_config(cli: &Cli) -> LabResult<ExperimentConfig> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Command::Experiment { name }) => builtin(name)
            .ok_or_else(|| LabError::Config(format!("no builtin config for {name:?}; pass --config")))??,
        (None, Command::Verify { .. }) => builtin("verify").expect("shipped")?,
        (None, _) => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides { seed: cli.seed, tol: cli.tol, mc_samples: cli.mc_samples })?;
    Ok(cfg)
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("anisodrop: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> LabResult<i32> {
    init_threads()?;
    let cfg = load_config(cli)?;
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(cli.command.dir_name()));
    let mut rec = Recorder::new(dir, cfg.hash())?;
    let result = dispatch(cli, &cfg, &mut rec);
    let code = match &result {
        Ok(c) => *c,
        Err(e) => e.exit_code(),
    };
    let seeds = vec![cfg.seed(), cfg.quadrature.seed];
    rec.finish(&cli.command.label(), seeds, code)?;
    result?;
    eprintln!("anisodrop: {} finished with exit code {code}", cli.command.label());
    Ok(code)
}

fn emit_table(cfg: &ExperimentConfig, rec: &mut Recorder, name: &str, t: &Table) -> LabResult<()> {
    if cfg.output.csv {
        rec.csv(name, t)?;
    }
    Ok(())
}

fn emit_json(cfg: &ExperimentConfig, rec: &mut Recorder, name: &str, v: serde_json::Value) -> LabResult<()> {
    if cfg.output.json {
        rec.json(name, v)?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, cfg: &ExperimentConfig, rec: &mut Recorder) -> LabResult<i32> {
    match &cli.command {
        Command::Wulff => wulff(cfg, rec),
        Command::Energy { shape } => energy_cmd(cfg, shape.as_ref(), rec),
        Command::Verify { suites } => verify_cmd(cfg, suites, rec),
        Command::Experiment { name } => experiment(cfg, name, cli.parallel_sweep, rec),
        Command::Minimize => minimize(cfg, rec),
        Command::Scan => scan(cfg, cli.parallel_sweep, rec),
    }
}

fn wulff(cfg: &ExperimentConfig, rec: &mut Recorder) -> LabResult<i32> {
    let f = &cfg.tension;
    let k = build_wulff(f, cfg.quadrature.boundary_samples)?;
    let shape = experiments::wulff_shape(f, cfg.quadrature.boundary_samples)?;
    let (ell, ell_cap) = experiments::tension_bounds(f);
    let perimeter = shapes::aniso_perimeter(&shape, f)?;
    let mut t = Table::new(&["x", "y"]);
    for p in k.boundary_polygon() {
        t.push(vec![p[0].into(), p[1].into()]);
    }
    emit_table(cfg, rec, "wulff_boundary.csv", &t)?;
    let mut v = k.to_json();
    v["ell_f"] = json!(ell);
    v["L_f"] = json!(ell_cap);
    v["density_constant"] = json!(energy::density_constant(f));
    v["volume"] = json!(shapes::volume(&shape));
    v["perimeter"] = json!(perimeter);
    v["shape"] = serde_json::to_value(&shape)?;
    emit_json(cfg, rec, "wulff.json", v)?;
    Ok(0)
}

fn energy_cmd(cfg: &ExperimentConfig, file: Option<&PathBuf>, rec: &mut Recorder) -> LabResult<i32> {
    let input: ShapeInput = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| LabError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                LabError::Config(format!("{}: line {}, column {}: {e}", p.display(), e.line(), e.column()))
            })?
        }
        None => cfg.shape.clone().ok_or_else(|| LabError::Config("energy needs --shape or a config shape".into()))?,
    };
    let e = input.build()?;
    let terms = if cfg.terms.is_empty() { vec![cfg.term.unwrap_or(NonlocalTerm::Riesz)] } else { cfg.terms.clone() };
    let mut t = Table::new(&["term", "perimeter", "nonlocal", "weight", "total", "error", "mass_form_total"]);
    let mut out = Vec::new();
    for term in terms {
        let b = energy::total_energy(&e, &cfg.tension, term, &cfg.params, &cfg.quadrature)?;
        t.push(vec![
            term.label().into(),
            b.perimeter.into(),
            b.nonlocal.into(),
            b.weight.into(),
            b.total.into(),
            b.error.into(),
            b.mass_form_total.into(),
        ]);
        out.push(b);
    }
    emit_table(cfg, rec, "energy.csv", &t)?;
    emit_json(cfg, rec, "energy.json", json!({ "volume": shapes::volume(&e), "energies": out }))?;
    Ok(0)
}

fn verify_cmd(cfg: &ExperimentConfig, flags: &[String], rec: &mut Recorder) -> LabResult<i32> {
    let names: Vec<String> = if !flags.is_empty() {
        flags.to_vec()
    } else if !cfg.suites.is_empty() {
        cfg.suites.clone()
    } else {
        verify::SUITES.iter().map(|s| s.to_string()).collect()
    };
    let cx = SuiteContext::from_config(cfg);
    let mut rows = Vec::new();
    let mut per_suite = serde_json::Map::new();
    for name in &names {
        let r = verify::run_suite(name, &cx)?;
        let pass = r.iter().all(|c| c.pass);
        let min_margin = r.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        eprintln!("{} {name}: {} checks", if pass { "PASS" } else { "FAIL" }, r.len());
        per_suite.insert(name.clone(), json!({ "pass": pass, "checks": r.len(), "min_margin": min_margin }));
        rows.extend(r);
    }
    let pass = rows.iter().all(|c| c.pass);
    emit_table(cfg, rec, "verify.csv", &verify::table(&rows))?;
    emit_json(cfg, rec, "verify.json", json!({ "pass": pass, "seed": cx.seed, "suites": per_suite, "checks": rows }))?;
    Ok(if pass { 0 } else { 1 })
}

fn experiment(cfg: &ExperimentConfig, name: &str, parallel: bool, rec: &mut Recorder) -> LabResult<i32> {
    if let Some(n) = &cfg.experiment {
        if n != name {
            return Err(LabError::Config(format!("config is for experiment {n:?}, not {name:?}")));
        }
    }
    let out = experiments::run(name, cfg, parallel)?;
    emit_table(cfg, rec, &format!("{name}.csv"), &out.table)?;
    for (suffix, t) in &out.extra {
        emit_table(cfg, rec, &format!("{name}_{suffix}.csv"), t)?;
    }
    let mut summary = out.summary.clone();
    summary["experiment"] = json!(name);
    summary["pass"] = json!(out.passed);
    summary["converged"] = json!(out.converged);
    emit_json(cfg, rec, &format!("{name}.json"), summary)?;
    eprintln!("{} {name}", if out.passed { "PASS" } else { "FAIL" });
    Ok(verdict(out.passed, out.converged))
}

fn verdict(passed: bool, converged: bool) -> i32 {
    if !passed {
        1
    } else if !converged {
        3
    } else {
        0
    }
}

fn minimize(cfg: &ExperimentConfig, rec: &mut Recorder) -> LabResult<i32> {
    let p = experiments::problem(cfg)?;
    let r = match &cfg.start {
        Some(s) => optimize::minimize_nd(&p, Some(s))?,
        None => optimize::minimize(&p)?,
    };
    let mut t = Table { columns: experiments::report_columns(&p, "epsilon"), rows: Vec::new() };
    t.rows.push(experiments::report_row(cfg.params.epsilon(), &r));
    emit_table(cfg, rec, "minimize.csv", &t)?;
    let dist = experiments::wulff_distance(&p, &r);
    let tol = cfg.thresholds.get("wulff_tol").copied();
    let passed = tol.map_or(true, |t| dist <= t);
    let mut v = serde_json::to_value(&r)?;
    v["wulff_parameters"] = json!(p.wulff_parameters());
    v["wulff_distance"] = json!(dist);
    v["wulff_tol"] = json!(tol);
    v["pass"] = json!(passed);
    emit_json(cfg, rec, "minimize.json", v)?;
    Ok(verdict(passed, r.converged))
}

fn scan(cfg: &ExperimentConfig, parallel: bool, rec: &mut Recorder) -> LabResult<i32> {
    let p = experiments::problem(cfg)?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| LabError::Config("scan needs a sweep".into()))?;
    let pts = if parallel {
        optimize::scan_cold(&p, sweep.variable, &sweep.values)?
    } else {
        optimize::scan(&p, sweep.variable, &sweep.values)?
    };
    emit_table(cfg, rec, "scan.csv", &experiments::scan_table(&p, sweep.variable, &pts))?;
    let ok = pts.iter().all(|pt| pt.report.as_ref().is_some_and(|r| r.converged));
    let var = match sweep.variable {
        SweepVariable::Epsilon => "epsilon",
        SweepVariable::Mass => "mass",
    };
    emit_json(cfg, rec, "scan.json", json!({ "variable": var, "points": pts, "converged": ok }))?;
    Ok(verdict(true, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_policy() {
        assert_eq!(verdict(true, true), 0);
        assert_eq!(verdict(false, true), 1);
        assert_eq!(verdict(false, false), 1);
        assert_eq!(verdict(true, false), 3);
        assert_eq!(LabError::Config(String::new()).exit_code(), 2);
        assert_eq!(LabError::NonConvergence(String::new()).exit_code(), 3);
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let c = Cli::try_parse_from(["anisodrop", "verify", "--suite", "ball", "--seed", "3", "--tol", "1e-8"]).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.tol, Some(1e-8));
        assert!(matches!(c.command, Command::Verify { ref suites } if suites == &["ball"]));
    }
}

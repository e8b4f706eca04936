//! Command-line front end. Exit codes: 0 when every point succeeded, 2 when
//! some point (or a check) failed, 3 when the configuration is invalid.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::scalar::Precision;

use super::check::{oracle_compare, selftest};
use super::config::RunConfig;
use super::output::{emit_results, render_csv, render_summary, write_atomic};
use super::point::{evaluate_point, ResultRow};
use super::sweep::{self, ScalingReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_POINT_FAILED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "vacuum-bell", version, about = "Entanglement and Bell nonlocality harvested from the field vacuum")]
struct Cli {
    /// Run configuration (flat `key = value` file); defaults to `paper-preset`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output path; a `.summary.txt` sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Working precision, overriding the config file.
    #[arg(long, global = true)]
    precision: Option<Precision>,
    /// Worker threads for sweep points.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Shell count of the lattice oracle, overriding the config file.
    #[arg(long, global = true)]
    oracle_modes: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single scenario.
    Point,
    /// Sweep over L/T with the scaling fit.
    SweepL,
    /// Sweep over a common gap scale.
    SweepGap,
    /// Sweep over the superoscillation index N.
    SweepN,
    /// Fixed symmetric filters at the design point.
    SweepEta,
    /// Separation sweep judged by the slope of ln(negativity) against (L/T)².
    ScalingCheck,
    /// Quadrature amplitudes against the mode-lattice oracle.
    OracleCheck,
    /// Quick internal consistency checks.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Point => "point",
            Command::SweepL => "sweep-l",
            Command::SweepGap => "sweep-gap",
            Command::SweepN => "sweep-n",
            Command::SweepEta => "sweep-eta",
            Command::ScalingCheck => "scaling-check",
            Command::OracleCheck => "oracle-check",
            Command::Selftest => "selftest",
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p).map_err(|e| match e {
            Error::Io(io) => Error::Config { line: 0, msg: format!("{}: {io}", p.display()) },
            other => other,
        })?,
        None => RunConfig::default(),
    };
    if let Some(p) = cli.precision {
        cfg.quad.precision = p;
    }
    if let Some(n) = cli.oracle_modes {
        cfg.oracle_modes = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fit_lines(fit: &ScalingReport) -> Vec<(String, String)> {
    let mut out = vec![
        ("fit.slope".to_string(), format!("{:.16e}", fit.slope)),
        ("fit.intercept".to_string(), format!("{:.16e}", fit.intercept)),
        ("fit.slope_floor".to_string(), format!("{:.16e}", sweep::SLOPE_FLOOR)),
        ("fit.verdict".to_string(), fit.verdict.as_str().to_string()),
    ];
    for (l, r) in &fit.used {
        out.push((format!("fit.residual.{l}"), format!("{r:.16e}")));
    }
    for l in &fit.excluded {
        out.push((format!("fit.excluded.{l}"), "non-positive negativity".to_string()));
    }
    out
}

fn oracle_lines(cfg: &RunConfig, rows: &[ResultRow], designs: &[super::config::Design]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (i, (row, d)) in rows.iter().zip(designs).enumerate() {
        let prefix = format!("row.{}.oracle", i + 1);
        if !row.status.is_ok() {
            continue;
        }
        match oracle_compare(d, &cfg.quad, cfg.oracle_modes) {
            Ok(c) => out.extend(c.lines(&prefix)),
            Err(e) => out.push((format!("{prefix}.error"), e.to_string())),
        }
    }
    out
}

fn finish(cfg: &RunConfig, cli: &Cli, command: &str, rows: &[ResultRow], extra: &[(String, String)]) -> Result<()> {
    match &cli.out {
        Some(path) => {
            let summary = emit_results(rows, cfg, command, extra, path)?;
            println!("wrote {} and {}", path.display(), summary.display());
        }
        None => {
            print!("{}", render_csv(rows));
            for (k, v) in extra {
                println!("# {k} = {v}");
            }
        }
    }
    Ok(())
}

fn run_command(cli: &Cli, cfg: &RunConfig) -> Result<i32> {
    let command = cli.command.name();
    let (rows, mut extra, designs) = match cli.command {
        Command::Point => {
            let row = evaluate_point(&cfg.design, &cfg.quad, None);
            (vec![row], Vec::new(), vec![cfg.design.clone()])
        }
        Command::SweepL | Command::ScalingCheck => {
            let (rows, fit) = if matches!(cli.command, Command::ScalingCheck) {
                sweep::scaling_check(cfg)?
            } else {
                sweep::sweep_separation(cfg)?
            };
            println!("scaling fit: slope = {:.6} ({})", fit.slope, fit.verdict.as_str());
            let designs = rows
                .iter()
                .map(|r| super::config::Design { l_over_t: r.l_over_t, ..cfg.design.clone() })
                .collect();
            let mut extra = fit_lines(&fit);
            if matches!(cli.command, Command::ScalingCheck) && fit.verdict != Verdict::Pass {
                extra.push(("exit_reason".into(), format!("scaling check {}", fit.verdict.as_str())));
            }
            (rows, extra, designs)
        }
        Command::SweepGap => {
            let rows = sweep::sweep_gap(cfg)?;
            let designs = cfg
                .values_for(super::config::SweepKind::Gap)?
                .iter()
                .map(|&s| super::config::Design { gap_scale: cfg.design.gap_scale * s, ..cfg.design.clone() })
                .collect();
            (rows, Vec::new(), designs)
        }
        Command::SweepN => {
            let rows = sweep::sweep_superosc_index(cfg)?;
            let designs = rows
                .iter()
                .map(|r| super::config::Design {
                    n_policy: super::config::NPolicy::Fixed,
                    n_fixed: r.index,
                    ..cfg.design.clone()
                })
                .collect();
            (rows, Vec::new(), designs)
        }
        Command::SweepEta => {
            let rows = sweep::sweep_eta(cfg)?;
            let designs = vec![cfg.design.clone(); rows.len()];
            (rows, Vec::new(), designs)
        }
        Command::OracleCheck => return oracle_check(cli, cfg),
        Command::Selftest => {
            let results = selftest();
            for (name, ok, detail) in &results {
                println!("{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
            }
            return Ok(if results.iter().all(|r| r.1) { EXIT_OK } else { EXIT_POINT_FAILED });
        }
    };
    if cfg.emit_oracle_check {
        extra.extend(oracle_lines(cfg, &rows, &designs));
    }
    finish(cfg, cli, command, &rows, &extra)?;
    let failed = rows.iter().filter(|r| !r.status.is_ok()).count();
    for r in rows.iter().filter(|r| !r.status.is_ok()) {
        eprintln!("point L/T = {} {}", r.l_over_t, r.status);
    }
    let check_failed = extra.iter().any(|(k, v)| k == "exit_reason" || (k.ends_with(".verdict") && v == "FAIL"));
    Ok(if failed > 0 || check_failed { EXIT_POINT_FAILED } else { EXIT_OK })
}

fn oracle_check(cli: &Cli, cfg: &RunConfig) -> Result<i32> {
    let cmp = match oracle_compare(&cfg.design, &cfg.quad, cfg.oracle_modes) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("oracle check failed: {e}");
            return Ok(EXIT_POINT_FAILED);
        }
    };
    let lines = cmp.lines("oracle");
    let text: String = lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    match &cli.out {
        Some(path) => {
            let mut body = render_summary(cfg, "oracle-check", &[], &[]);
            body.push_str(&text);
            write_atomic(path, &body)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    println!(
        "oracle check: max relative difference {:.3e}, Wick {:.3e} ({})",
        cmp.max_rel_diff(),
        cmp.wick_rel_diff,
        if cmp.passes() { "PASS" } else { "FAIL" }
    );
    Ok(if cmp.passes() { EXIT_OK } else { EXIT_POINT_FAILED })
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid configuration: {e}");
            return EXIT_CONFIG;
        }
    };
    let jobs = cli.jobs.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return EXIT_CONFIG;
        }
    };
    match pool.install(|| run_command(&cli, &cfg)) {
        Ok(code) => code,
        Err(e @ Error::Config { .. }) => {
            eprintln!("invalid configuration: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_POINT_FAILED
        }
    }
}


use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use ibc_feasibility::classify::{classify, lemma3_applies, sweep_region, FeasibilityVerdict, RegionClass, VerdictClass};
use ibc_feasibility::conditions::necessary_report;
use ibc_feasibility::config::{derived_counts, parse_config, NetworkConfig};
use ibc_feasibility::jacobian::{certify_feasibility, RankTolerance};
use ibc_feasibility::numeric::{empirical_feasibility, trace_csv, AlignOptions, EmpiricalDecision};
use ibc_feasibility::Error;

/// Linear interference alignment feasibility for MIMO interference
/// broadcast channels.
#[derive(Parser)]
#[command(name = "ibcfeas", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the necessary conditions and classify a configuration.
    Check {
        config: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a grid of symmetric configurations.
    Sweep {
        #[arg(long = "cells", short = 'G')]
        cells: usize,
        #[arg(long = "users", short = 'K')]
        users: usize,
        #[arg(long = "streams", short = 'd')]
        streams: usize,
        /// Inclusive transmit-antenna range `lo:hi`.
        #[arg(long = "m", value_parser = parse_range)]
        m_range: (usize, usize),
        /// Inclusive receive-antenna range `lo:hi`.
        #[arg(long = "n", value_parser = parse_range)]
        n_range: (usize, usize),
        /// CSV output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Heatmap output path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Build the Jacobian at the structured channel point and test its rank.
    Certify {
        config: PathBuf,
        /// Absolute singular-value threshold (default: relative policy).
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the certificate JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the constructed matrix as CSV.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Run the numerical alignment oracle on random channels.
    Align {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long = "max-iters", default_value_t = 5000)]
        max_iters: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        /// Rank threshold for the desired-signal check.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Directory receiving the verdict JSON and per-trial trace CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `lo:hi`, got `{s}`"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

/// Failure that maps to exit code 2.
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<u8, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { config, out } => cmd_check(&config, out.as_deref()),
        Command::Sweep {
            cells,
            users,
            streams,
            m_range,
            n_range,
            out,
            svg,
        } => cmd_sweep(cells, users, streams, m_range, n_range, out.as_deref(), svg.as_deref()),
        Command::Certify {
            config,
            tol,
            out,
            matrix,
        } => cmd_certify(&config, tol, out.as_deref(), matrix.as_deref()),
        Command::Align {
            config,
            seed,
            trials,
            eps,
            max_iters,
            restarts,
            tol,
            out,
        } => {
            let opts = AlignOptions {
                max_iters,
                eps,
                restarts,
                seed,
                tol_rank: tol,
            };
            cmd_align(&config, trials, opts, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path) -> Result<NetworkConfig, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), UsageError> {
    fs::write(path, contents).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))
}

/// Rounds every non-integer number to 12 significant digits so that output
/// is byte-stable across platforms.
fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
            if let Some(num) = serde_json::Number::from_f64(rounded) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable output");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json renders");
    s.push('\n');
    s
}

fn emit(report: &Value, out: Option<&Path>) -> Result<(), UsageError> {
    let text = render(report);
    print!("{text}");
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    Ok(())
}

fn cmd_check(path: &Path, out: Option<&Path>) -> Outcome {
    let config = load_config(path)?;
    let necessary = necessary_report(&config)?;
    let verdict = classify(&config)?;
    let report = json!({
        "config": config,
        "counts": derived_counts(&config),
        "necessary": necessary,
        "verdict": verdict,
        "class": class_label(&verdict),
    });
    emit(&report, out)?;
    Ok(if verdict.class == VerdictClass::Feasible { 0 } else { 1 })
}

fn class_label(verdict: &FeasibilityVerdict) -> &'static str {
    RegionClass::from_verdict(verdict).label()
}

fn cmd_sweep(
    g: usize,
    k: usize,
    d: usize,
    m: (usize, usize),
    n: (usize, usize),
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Outcome {
    if g == 0 || k == 0 || d == 0 {
        return Err(UsageError("G, K and d must be positive".into()));
    }
    if m.0 > m.1 || n.0 > n.1 {
        return Err(UsageError("empty antenna range".into()));
    }
    let grid = sweep_region(g, k, d, m.0..=m.1, n.0..=n.1)?;
    let csv = grid.to_csv();
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = svg {
        write_file(path, &grid.to_svg())?;
    }
    Ok(0)
}

fn cmd_certify(path: &Path, tol: Option<f64>, out: Option<&Path>, matrix: Option<&Path>) -> Outcome {
    let config = load_config(path)?;
    let tolerance = match tol {
        Some(t) if t.is_finite() && t >= 0.0 => RankTolerance::Absolute(t),
        Some(t) => return Err(UsageError(format!("--tol must be a nonnegative number, got {t}"))),
        None => RankTolerance::Default,
    };
    let lemma3 = lemma3_applies(&config);
    match certify_feasibility(&config, tolerance) {
        Ok(cert) => {
            if let Some(p) = matrix {
                write_file(p, &cert.jacobian.to_csv())?;
            }
            let mut report = serde_json::to_value(&cert.certificate).expect("certificate serializes");
            report["rank_report"] = serde_json::to_value(cert.rank).expect("rank serializes");
            report["no_permutation_jacobian"] = serde_json::to_value(&lemma3).expect("witness serializes");
            emit(&report, out)?;
            Ok(if cert.certificate.pass { 0 } else { 1 })
        }
        Err(e @ (Error::NotApplicable(_) | Error::Separability { .. })) => {
            let reason = match &e {
                Error::NotApplicable(r) => format!("outside Theorem 2 construction: {r}"),
                other => other.to_string(),
            };
            emit(&json!({ "pass": false, "reason": reason }), out)?;
            Ok(1)
        }
        Err(Error::NotProper { witness }) => {
            emit(
                &json!({ "pass": false, "reason": "not proper", "witness": witness }),
                out,
            )?;
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_align(path: &Path, trials: usize, opts: AlignOptions, out: Option<&Path>) -> Outcome {
    if trials == 0 {
        return Err(UsageError("--trials must be at least 1".into()));
    }
    if !opts.eps.is_finite() || opts.eps <= 0.0 {
        return Err(UsageError("--eps must be a positive number".into()));
    }
    let config = load_config(path)?;
    let verdict = empirical_feasibility(&config, trials, &opts)?;
    let report = serde_json::to_value(&verdict).expect("verdict serializes");
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| UsageError(format!("cannot create {}: {e}", dir.display())))?;
        for trial in &verdict.trials {
            write_file(&dir.join(format!("trace_seed{}.csv", trial.seed)), &trace_csv(&trial.trace))?;
        }
        write_file(&dir.join("verdict.json"), &render(&report))?;
    }
    print!("{}", render(&report));
    Ok(if verdict.decision == EmpiricalDecision::EmpiricallyFeasible { 0 } else { 1 })
}

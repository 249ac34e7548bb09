//! Command-line front end.
//!
//! ```text
//! mermin-coa analyze    --state <spec>
//! mermin-coa mermin     --state <spec> (--preset <name> | --optimize [--restarts N])
//! mermin-coa scan       --family <template> --grid a:b:n [--preset <name>]... [--optimize]
//! mermin-coa interval   --family <template> --preset <name> [--tol t]
//! mermin-coa conjecture --samples N --seed S [--mode haar|schmidt-uniform]
//! mermin-coa verify     [--samples N --seed S]
//! ```
//!
//! Global flags: `--seed`, `--restarts`, `--format json|csv`, `--out <path>`.
//! Exit codes: 0 success, 1 invalid input, 2 a `verify` check failed.
//!
//! `analyze` emits a flat JSON object with keys `c_1_23`, `c_2_13`, `c_3_12`
//! (bipartition concurrences), `c_12`, `c_23`, `c_31` (pair concurrences),
//! `coa_12`, `coa_23`, `coa_31`, `coa_min`, `tau`, `sigma` and
//! `monogamy_residual_1..3`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    conjecture_search, linear_grid, scan_family, verify, violation_interval, write_scan_csv, Curve, ViolationInterval,
};
use crate::measures::pairwise_measures;
use crate::mermin::{optimize_mermin, preset_result, OptimizationConfig};
use crate::states::{FamilyTemplate, SamplingMode, StateSpec};

#[derive(Debug, Parser)]
#[command(
    name = "mermin-coa",
    version,
    about = "Entanglement measures and Mermin-inequality analysis for three-qubit pure states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for random sampling and optimizer restarts.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Optimizer restarts per state.
    #[arg(long, global = true)]
    restarts: Option<usize>,

    /// Output format; json by default, csv by default for `scan`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entanglement measures of one state.
    Analyze {
        /// State spec such as `ghz`, `w-s:p=0.2` or `amps:<16 floats>`.
        #[arg(long)]
        state: String,
    },
    /// Mermin value of one state at preset or optimized settings.
    Mermin(MerminArgs),
    /// Measures and Mermin values along a one-parameter family.
    Scan {
        /// Family with one free parameter, e.g. `ghz-w`, `w-s`, `ghz-s:phi=0.6`.
        #[arg(long)]
        family: String,
        /// `start:stop:count`.
        #[arg(long)]
        grid: String,
        /// Preset column to include; repeatable.
        #[arg(long = "preset")]
        presets: Vec<String>,
        /// Also run the optimizer at every grid point.
        #[arg(long)]
        optimize: bool,
    },
    /// Parameter range on which a preset violates the classical bound.
    Interval {
        /// Family with one free parameter.
        #[arg(long)]
        family: String,
        /// One of ghz-xy, wclass-zx, ws-zx, ghzw-tilt.
        #[arg(long)]
        preset: String,
        /// Endpoint accuracy in curve value.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Random-state search for minimal CoA above 1/2 without violation.
    Conjecture {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// `haar` or `schmidt-uniform`.
        #[arg(long, default_value = "haar")]
        mode: String,
    },
    /// Invariant suite: monogamy, relation chain, closed forms, σ bound.
    Verify {
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
struct MerminArgs {
    #[arg(long)]
    state: String,
    /// One of ghz-xy, wclass-zx, ws-zx, ghzw-tilt.
    #[arg(long, required_unless_present = "optimize", conflicts_with = "optimize")]
    preset: Option<String>,
    /// Maximize over all measurement directions.
    #[arg(long)]
    optimize: bool,
}

#[derive(Serialize)]
struct IntervalReport<'a> {
    family: String,
    preset: &'a str,
    tolerance: f64,
    interval: Option<ViolationInterval>,
}

enum Outcome {
    Ok,
    VerifyFailed(Vec<String>),
}

/// Entry point used by the binary.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::VerifyFailed(names)) => {
            let _ = writeln!(stderr, "verify failed: {}", names.join(", "));
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn config(cli: &Cli) -> Result<OptimizationConfig> {
    let mut c = OptimizationConfig::default();
    if let Some(r) = cli.restarts {
        c.restarts = r;
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    c.validate()?;
    Ok(c)
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(Error::invalid(format!("grid `{text}` must be start:stop:count")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("grid `{text}`: `{s}` is not a number")))
    };
    let count = n
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::invalid(format!("grid `{text}`: `{n}` is not a count")))?;
    linear_grid(num(a)?, num(b)?, count)
}

fn emit(cli: &Cli, stdout: &mut dyn Write, body: &dyn Fn(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let io = |e: std::io::Error| Error::invalid(format!("cannot write output: {e}"));
    match &cli.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Error::invalid(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w).map_err(io)?;
            w.flush().map_err(io)
        }
        None => body(stdout).map_err(io),
    }
}

fn emit_json<T: Serialize>(cli: &Cli, stdout: &mut dyn Write, report: &T) -> Result<()> {
    if cli.format == Some(Format::Csv) {
        return Err(Error::invalid("csv output is available for `scan` and `analyze` only"));
    }
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::InternalConsistency(e.to_string()))?;
    emit(cli, stdout, &|w| writeln!(w, "{text}"))
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze { state } => {
            let report = pairwise_measures(&state.parse::<StateSpec>()?.state()?)?;
            if cli.format == Some(Format::Csv) {
                let value = serde_json::to_value(report).map_err(|e| Error::InternalConsistency(e.to_string()))?;
                let map = value.as_object().expect("report serializes as an object");
                let keys: Vec<&str> = map.keys().map(String::as_str).collect();
                let values: Vec<String> = map
                    .values()
                    .map(|v| crate::experiments::format_sig12(v.as_f64().unwrap_or(f64::NAN)))
                    .collect();
                emit(cli, stdout, &|w| {
                    writeln!(w, "{}", keys.join(","))?;
                    writeln!(w, "{}", values.join(","))
                })?;
            } else {
                emit_json(cli, stdout, &report)?;
            }
        }
        Command::Mermin(args) => {
            let state = args.state.parse::<StateSpec>()?.state()?;
            let result = match &args.preset {
                Some(name) => preset_result(&state, name)?,
                None => optimize_mermin(&state, &config(cli)?)?,
            };
            emit_json(cli, stdout, &result)?;
        }
        Command::Scan {
            family,
            grid,
            presets,
            optimize,
        } => {
            let template: FamilyTemplate = family.parse()?;
            let grid = parse_grid(grid)?;
            let names: Vec<&str> = presets.iter().map(String::as_str).collect();
            let cfg = if *optimize { Some(config(cli)?) } else { None };
            let rows = scan_family(&template, &grid, &names, cfg.as_ref())?;
            if cli.format == Some(Format::Json) {
                emit_json(cli, stdout, &rows)?;
            } else {
                emit(cli, stdout, &|w| write_scan_csv(&rows, &names, w))?;
            }
        }
        Command::Interval { family, preset, tol } => {
            let template: FamilyTemplate = family.parse()?;
            let curve = Curve::Preset {
                template,
                preset: preset.clone(),
            };
            // Fail on an unknown preset before scanning the grid.
            curve.eval(template.range().0)?;
            let interval = violation_interval(&curve, *tol)?;
            emit_json(
                cli,
                stdout,
                &IntervalReport {
                    family: template.to_string(),
                    preset,
                    tolerance: *tol,
                    interval,
                },
            )?;
        }
        Command::Conjecture { samples, mode } => {
            let mode: SamplingMode = mode.parse()?;
            let cfg = config(cli)?;
            let report = conjecture_search(*samples, mode, cfg.seed, &cfg)?;
            emit_json(cli, stdout, &report)?;
        }
        Command::Verify { samples } => {
            let cfg = config(cli)?;
            let report = verify(*samples, cfg.seed, &cfg)?;
            emit_json(cli, stdout, &report)?;
            if !report.passed {
                let failed = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.clone())
                    .collect();
                return Ok(Outcome::VerifyFailed(failed));
            }
        }
    }
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("mermin-coa").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:x:3").is_err());
    }

    #[test]
    fn unknown_subcommand_prints_usage() {
        let (code, out, err) = run_capture(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("analyze"));
    }

    #[test]
    fn mermin_needs_exactly_one_mode() {
        assert_eq!(run_capture(&["mermin", "--state", "ghz"]).0, 1);
        assert_eq!(
            run_capture(&["mermin", "--state", "ghz", "--preset", "ghz-xy", "--optimize"]).0,
            1
        );
        let (code, out, _) = run_capture(&["mermin", "--state", "ghz", "--preset", "ghz-xy"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn csv_rejected_for_json_only_commands() {
        let (code, _, err) = run_capture(&["interval", "--family", "ghz-w", "--preset", "ghz-xy", "--format", "csv"]);
        assert_eq!(code, 1);
        assert!(err.contains("csv"));
    }

    #[test]
    fn interval_unknown_preset() {
        assert_eq!(
            run_capture(&["interval", "--family", "ghz-w", "--preset", "bogus"]).0,
            1
        );
    }
}

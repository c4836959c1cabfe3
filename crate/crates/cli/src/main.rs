//! `paramrls`: run scenarios and print exact tables from the command line.
//!
//! Every subcommand takes either `--scenario <file>` / `--builtin <name>` or
//! inline flags; inline flags override the loaded scenario. Failures print a
//! JSON object on stderr and exit with a nonzero status.

mod overrides;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paramrls::experiments::harness::{self, Exec};
use paramrls::experiments::report::{write_report, write_rows, write_rows_json};
use paramrls::experiments::{builtin, Format, Mode, Scenario, BUILTIN};
use paramrls::theory::recurrence_table;
use paramrls::{Error, Result};
use serde::Serialize;

use overrides::Overrides;

#[derive(Parser, Debug)]
#[command(
    name = "paramrls",
    version,
    about = "ParamRLS tuning RLS_k on Ridge* and OneMax"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run ParamRLS repeatedly and report the returned parameter values.
    Tune(RunArgs),
    /// Race RLS_a against RLS_b with single evaluations.
    Race(RunArgs),
    /// Exact drift table, or a Monte Carlo estimate when `--s` is given.
    Drift(RunArgs),
    /// Leading-constant interval recurrences for k = 1, 3, 5.
    Table(RunArgs),
    /// Exact lazy-walk hitting times of state 1.
    Walk(RunArgs),
    /// Expected Ridge* optimisation time of RLS_k.
    ExpectedTime(RunArgs),
    /// List built-in scenarios, or print one.
    Scenarios { name: Option<String> },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long, conflicts_with = "builtin")]
    scenario: Option<PathBuf>,
    /// Built-in scenario name (see `paramrls scenarios`).
    #[arg(long)]
    builtin: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Worker threads; does not affect results.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
enum OutFormat {
    #[default]
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            print_error("usage", msg.trim(), None);
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let path = match &e {
                Error::Config { path, .. } => Some(path.as_str()),
                _ => None,
            };
            print_error(e.kind(), &e.to_string(), path);
            ExitCode::FAILURE
        }
    }
}

fn print_error(kind: &str, message: &str, path: Option<&str>) {
    let mut err = serde_json::json!({ "kind": kind, "message": message });
    if let Some(p) = path {
        err["path"] = p.into();
    }
    eprintln!("{}", serde_json::json!({ "error": err }));
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Tune(a) => replicated(a, Mode::Tune),
        Command::Race(a) => replicated(a, Mode::Race),
        Command::Drift(a) => {
            if a.scenario.is_some() || a.builtin.is_some() || a.overrides.s.is_some() {
                replicated(a, Mode::Drift)
            } else {
                let sc = load(&a, Mode::Drift)?;
                let n = sc.n()? as u64;
                let k = a
                    .overrides
                    .k
                    .as_deref()
                    .map(overrides::quantity)
                    .ok_or_else(|| {
                        Error::config("drift.k", "pass --k (and --s for a Monte Carlo estimate)")
                    })?
                    .resolve("drift.k", &[("n", n)].into_iter().collect())?;
                let rows = harness::drift_rows(n, k)?;
                emit_rows(&a, &rows, &["n", "k", "s", "exact", "value", "closed"])
            }
        }
        Command::Table(a) => {
            let sc = load(&a, Mode::Table)?;
            let table = recurrence_table(sc.periods()?);
            with_output(&a, |out| match a.format {
                OutFormat::Csv => table.write_csv(out),
                OutFormat::Json => write_rows_json(&table.rows, out),
            })
        }
        Command::Walk(a) => {
            let sc = load(&a, Mode::Walk)?;
            let rows = harness::walk_rows(sc.walk_phi()?)?;
            emit_rows(&a, &rows, &["start", "exact", "value", "bound"])
        }
        Command::ExpectedTime(a) => {
            let sc = load(&a, Mode::ExpectedTime)?;
            let (n, ks) = sc.expected_time_ks()?;
            let rows = harness::expected_time_rows(n, &ks)?;
            emit_rows(&a, &rows, &["n", "k", "expected_time"])
        }
        Command::Scenarios { name } => {
            let mut stdout = std::io::stdout().lock();
            let text = match name {
                None => BUILTIN.iter().map(|(n, _)| format!("{n}\n")).collect(),
                Some(n) => {
                    builtin(&n)
                        .ok_or_else(|| {
                            Error::config("builtin", format!("no built-in scenario named `{n}`"))
                        })?
                        .to_json()?
                        + "\n"
                }
            };
            stdout.write_all(text.as_bytes()).map_err(stdout_error)
        }
    }
}

/// Loads the scenario named by the arguments, or starts a blank one, then
/// applies inline overrides.
fn load(a: &RunArgs, mode: Mode) -> Result<Scenario> {
    let mut sc = match (&a.scenario, &a.builtin) {
        (Some(path), _) => Scenario::load(path)?,
        (None, Some(name)) => builtin(name).ok_or_else(|| {
            Error::config("builtin", format!("no built-in scenario named `{name}`"))
        })?,
        (None, None) => Scenario::new(format!("cli-{}", mode.as_str()), mode),
    };
    if sc.mode != mode {
        return Err(Error::config(
            "mode",
            format!(
                "scenario `{}` has mode `{}`, not `{}`",
                sc.name,
                sc.mode.as_str(),
                mode.as_str()
            ),
        ));
    }
    a.overrides.apply(&mut sc)?;
    Ok(sc)
}

fn replicated(a: RunArgs, mode: Mode) -> Result<()> {
    let sc = load(&a, mode)?;
    let exec = Exec { workers: a.workers };
    let rep = harness::run_scenario(&sc, exec)?;
    eprintln!(
        "{}: {} replicates in {:.3} s",
        rep.scenario,
        rep.replicates,
        rep.wall_time.as_secs_f64()
    );
    with_output(&a, |out| write_report(&rep, a.format.into(), out))
}

fn emit_rows<T: Serialize>(a: &RunArgs, rows: &[T], header: &[&str]) -> Result<()> {
    with_output(a, |out| match a.format {
        OutFormat::Csv => write_rows(rows, header, out),
        OutFormat::Json => write_rows_json(rows, out),
    })
}

/// Renders into memory, then writes to `--out` or stdout in one go.
fn with_output<F>(a: &RunArgs, render: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    render(&mut buf)?;
    match &a.out {
        Some(path) => std::fs::write(path, &buf).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(&buf)
            .map_err(stdout_error),
    }
}

fn stdout_error(source: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source,
    }
}

mod commands;
mod config;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Map, Value};

use crate::config::{Cli, Cmd, Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Solver(String),
    Io(String),
}

impl From<reswell::Error> for CliError {
    fn from(e: reswell::Error) -> Self {
        use reswell::Error::*;
        match e {
            InvalidParameter(_) | Domain(_) | NotExceptional(_) | BoundaryLeak(_) => Self::Validation(e.to_string()),
            NoSignChange { .. }
            | NonFinite(_)
            | NoConvergence { .. }
            | SingularJacobian(_)
            | FitFailed(_)
            | NoInvertibleIntertwiner(_) => Self::Solver(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Solver(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("RESWELL_THREADS") {
        let n: usize =
            v.parse().ok().filter(|n| *n >= 1).ok_or_else(|| {
                CliError::Validation(format!("RESWELL_THREADS must be a positive integer, got {v:?}"))
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    Ok(())
}

fn name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Bound => "bound",
        Cmd::Resonances { .. } => "resonances",
        Cmd::Exceptional { .. } => "exceptional",
        Cmd::Scatter(_) => "scatter",
        Cmd::Well1d { .. } => "well1d",
        Cmd::Ptmatrix { .. } => "ptmatrix",
        Cmd::Pu { .. } => "pu",
        Cmd::Propagator { .. } => "propagator",
        Cmd::VerifyAll => "verify-all",
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    let cfg = RunConfig::merge(cli)?;
    if let Cmd::VerifyAll = cli.cmd {
        let checks = verify::run_all();
        print!("{}", verify::render_table(&checks));
        if let Some(p) = &cfg.output {
            output::emit(
                &output::render_json(meta(&cfg, "verify-all"), verify::to_json(&checks)),
                Some(p),
            )?;
        }
        return Ok(if checks.iter().all(|c| c.pass) {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    let out = match &cli.cmd {
        Cmd::Bound => commands::bound(&cfg)?,
        Cmd::Resonances { .. } => commands::resonances(&cfg)?,
        Cmd::Exceptional { .. } => commands::exceptional(&cfg)?,
        Cmd::Scatter(_) => commands::scatter(&cfg)?,
        Cmd::Well1d { .. } => commands::well1d(&cfg)?,
        Cmd::Ptmatrix { .. } => commands::ptmatrix(&cfg)?,
        Cmd::Pu { .. } => commands::pu(&cfg)?,
        Cmd::Propagator { .. } => commands::propagator(&cfg)?,
        Cmd::VerifyAll => unreachable!(),
    };
    let text = match cfg.format() {
        Format::Json => {
            let mut m = meta(&cfg, name(&cli.cmd));
            if !out.notes.is_empty() {
                m.insert("notes".into(), json!(out.notes));
            }
            output::render_json(m, out.data)
        }
        Format::Csv => {
            let t = out.table.ok_or_else(|| {
                CliError::Validation(format!("{} has no CSV form; use --format json", name(&cli.cmd)))
            })?;
            for n in &out.notes {
                eprintln!("note: {n}");
            }
            output::render_csv(&t.header, &t.rows)
        }
    };
    output::emit(&text, cfg.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn meta(cfg: &RunConfig, command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                CliError::Validation(m) => eprintln!("error: {m}"),
                CliError::Solver(m) => eprintln!("solver error: {m}"),
                CliError::Io(m) => eprintln!("io error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}

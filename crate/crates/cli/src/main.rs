//! `tauber`: batch front end for the tail-bound pipeline.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure or a
//! check that missed its tolerance.

mod commands;
mod config;

use clap::Parser;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{Failure, Outcome, SCHEMA};
use config::{Command, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "tauber", version, about = "Tail bounds from Laplace-Stieltjes singularities")]
struct Cli {
    /// Subcommand; may instead come from the config file's `command` key.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(msg) => return fail(2, "config", &msg),
    };
    let Some(cmd) = cli.command.or(cfg.command) else {
        return fail(2, "config", "no command given");
    };
    match commands::run(cmd, &cfg) {
        Ok(out) => emit(cmd, &cfg, out),
        Err(Failure::Config(msg)) => fail(2, "config", &msg),
        Err(Failure::Numeric(e)) => fail(3, "numeric", &e.to_string()),
    }
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let base = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    base.merged(cli.flags.clone())
}

fn emit(cmd: Command, cfg: &RunConfig, out: Outcome) -> ExitCode {
    for t in &out.tolerances {
        eprintln!(
            "tolerance {}: achieved {:e}, limit {:e} [{}]",
            t.name,
            t.achieved,
            t.limit,
            if t.pass { "ok" } else { "FAIL" }
        );
    }
    let ok = out.ok();
    let text = match cfg.format.unwrap_or_default() {
        Format::Csv => out.csv,
        Format::Json => {
            let mut v = json!({
                "schema": SCHEMA,
                "command": cmd,
                "config": cfg,
                "tolerances": out.tolerances,
                "pass": ok,
            });
            if let (Value::Object(m), Value::Object(extra)) = (&mut v, out.json) {
                m.extend(extra);
            }
            serde_json::to_string_pretty(&v).expect("json serializes") + "\n"
        }
    };
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return fail(3, "io", &format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn fail(code: u8, kind: &str, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    let v = json!({ "schema": SCHEMA, "error": { "kind": kind, "message": msg } });
    println!("{}", serde_json::to_string_pretty(&v).expect("json serializes"));
    ExitCode::from(code)
}

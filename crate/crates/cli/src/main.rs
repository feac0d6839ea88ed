#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};

use args::{Cli, Command};
use error::CliError;
use table::Table;

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    params: serde_json::Value,
    seed: u64,
    version: &'a str,
    output_sha256: String,
}

fn execute(cli: &Cli) -> Result<Table, CliError> {
    let seed = cli.common.seed;
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Resonance(a) => commands::resonance(a),
        Command::FieldSim(a) => commands::field_sim(a, seed),
        Command::OscSim(a) => commands::osc_sim(a, seed),
        Command::Fluctuation(a) => commands::fluctuation(a),
        Command::Counting(a) => commands::counting(a, seed),
        Command::Entropy(a) => commands::entropy(a),
        Command::Limit(a) => commands::limit(a, seed),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let table = match cli.common.threads.as_str() {
        "auto" => execute(&cli)?,
        n => {
            let n: usize = n
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Config(format!("--threads expects a positive count or 'auto', got '{n}'")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            pool.install(|| execute(&cli))?
        }
    };
    let output = table.render(cli.common.format);
    match &cli.common.out {
        Some(path) => std::fs::write(path, &output)?,
        None => std::io::stdout().lock().write_all(output.as_bytes())?,
    }

    let mut params = serde_json::to_value(&cli.command).expect("serializable arguments");
    params["format"] = serde_json::to_value(cli.common.format).expect("serializable format");
    let manifest = RunManifest {
        subcommand: cli.command.name(),
        params,
        seed: cli.common.seed,
        version: env!("CARGO_PKG_VERSION"),
        output_sha256: hex::encode(Sha256::digest(output.as_bytes())),
    };
    let json = serde_json::to_string(&manifest).expect("serializable manifest");
    match &cli.common.manifest {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => eprintln!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

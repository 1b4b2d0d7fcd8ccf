//! `mdregions` command line.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;
use serde_json::json;

use args::{Cli, Command};
use commands::Outcome;

fn init_logging() {
    let level = match std::env::var("MDREGIONS_LOG").as_deref() {
        Ok("debug") => LevelFilter::Debug,
        Ok("info") => LevelFilter::Info,
        _ => LevelFilter::Off,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
}

fn error_document(kind: &str, message: &str) -> String {
    output::json(&json!({"error": {"kind": kind, "message": message}}))
}

fn dispatch(command: &Command) -> mdregions::Result<Outcome> {
    match command {
        Command::TwoRegion(a) => commands::two_region_cmd(a),
        Command::ThreeRegion(a) => commands::three_region_cmd(a),
        Command::CornerPoints(a) => commands::corner_points_cmd(a),
        Command::Membership(a) => commands::membership_cmd(a),
        Command::RegimeMap(a) => commands::regime_map_cmd(a),
        Command::McValidate(a) => commands::mc_validate_cmd(a),
        Command::DiscreteEval(a) => commands::discrete_eval_cmd(a),
        Command::QStar(a) => commands::q_star_cmd(a),
    }
}

fn main() -> ExitCode {
    init_logging();
    let outcome = match Cli::try_parse() {
        Ok(cli) => dispatch(&cli.command).unwrap_or_else(|e| {
            log::info!("{e}");
            let status = if matches!(e, mdregions::Error::Validation(_)) { 2 } else { 1 };
            Outcome {
                text: error_document(e.kind(), &e.to_string()),
                status,
            }
        }),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            Outcome {
                text: error_document("usage", e.render().to_string().trim()),
                status: 1,
            }
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.text.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(outcome.status)
}

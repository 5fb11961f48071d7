//! `sbs` — low-frequency scattering by small bodies from the command line.
//!
//! Every subcommand prints one JSON report (schema in docs/schemas/) on
//! stdout or to `--out`. Exit codes: 0 success, 2 usage error, 3 bad input,
//! 4 numerical failure.

// Validation is written `!(x > 0.0)` so NaN lands on the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod report;
mod scenes;

use clap::Parser;

use args::{Cli, Command, EmCmd, MediumCmd, MeshCmd, ProbeCmd, ScatterCmd};
use report::Timings;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
    let start = std::time::Instant::now();
    match run(&cli.command).and_then(|(mut report, csv)| {
        if cli.timings {
            report.timings = Some(Timings {
                total_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
        if let Some((path, content)) = csv {
            std::fs::write(&path, content)
                .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
        }
        let text = report.render();
        match &cli.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(())
    }) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_input_error() { 3 } else { 4 });
        }
    }
}

fn input_error(message: String) -> sbs_core::Error {
    sbs_core::Error::InvalidArgument(message)
}

/// Worker count: `--threads`, then `SBS_THREADS`, then all cores.
fn init_threads(flag: Option<usize>) -> sbs_core::Result<()> {
    let count = match flag {
        Some(n) => Some(n),
        None => match std::env::var("SBS_THREADS") {
            Ok(raw) => Some(raw.parse::<usize>().map_err(|_| {
                input_error(format!("SBS_THREADS must be a thread count, got {raw:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = count {
        if n == 0 {
            return Err(input_error("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| input_error(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn run(command: &Command) -> sbs_core::Result<commands::Outcome> {
    match command {
        Command::Mesh(MeshCmd::Info(a)) => commands::mesh_info(a),
        Command::Capacitance(a) => commands::capacitance(a),
        Command::Polarizability(a) => commands::polarizability(a),
        Command::Scatter(ScatterCmd::Single(a)) => commands::scatter_single(a),
        Command::Scatter(ScatterCmd::Many(a)) => commands::scatter_many(a),
        Command::Em(EmCmd::Matrix(a)) => commands::em_matrix(a),
        Command::Probe(ProbeCmd::Invert(a)) => commands::probe_invert(a),
        Command::Medium(MediumCmd::Born(a)) => commands::medium_born(a),
        Command::Medium(MediumCmd::Invert(a)) => commands::medium_invert(a),
    }
}

//! `plurisolve`: batch driver for plurisubharmonic Dirichlet envelope
//! solves, continuity certificates and property suites.
//!
//! Every run is described by a JSON manifest (echoed into the output
//! directory) and is fully deterministic: identical manifests produce
//! byte-identical CSV and JSON artifacts at any worker count.
//!
//! Exit codes: 0 success, 1 parse or solver error, 2 valid run whose
//! continuity certificate was rejected.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::{Command, RunManifest};

#[derive(Args, Debug)]
struct CommonArgs {
    /// Path to the run manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Override the manifest's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the grid spacing.
    #[arg(long)]
    spacing: Option<f64>,
    /// Override the iteration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the number of exhaustion levels.
    #[arg(long)]
    nu_max: Option<usize>,
    /// Override q for q-psh solves.
    #[arg(long)]
    q: Option<usize>,
    /// Worker threads (0 = process default). Results are identical at any
    /// worker count.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cli {
    /// Perron-Bremermann envelope on a bounded domain.
    SolveBounded(CommonArgs),
    /// Maximal solution on an unbounded convex domain via exhaustion.
    SolveUnbounded(CommonArgs),
    /// Patched continuous solution (partition of unity over wall patches).
    ContinuousSolution(CommonArgs),
    /// Barrier-backed continuity certificate for a growth profile.
    CertifyContinuity(CommonArgs),
    /// Sampled check of the polynomial growth condition.
    CheckLupacciolu(CommonArgs),
    /// Maximal psh / harmonic / minimal plurisuperharmonic comparison.
    Sandwich(CommonArgs),
    /// Structural property suite of the envelope operator.
    Properties(CommonArgs),
    /// q-plurisubharmonic envelope with the q-Bremermann check.
    Qsolve(CommonArgs),
}

#[derive(Parser, Debug)]
#[command(name = "plurisolve", version, about)]
struct App {
    #[command(subcommand)]
    cli: Cli,
}

fn expected_command(cli: &Cli) -> (Command, &CommonArgs) {
    match cli {
        Cli::SolveBounded(a) => (Command::SolveBounded, a),
        Cli::SolveUnbounded(a) => (Command::SolveUnbounded, a),
        Cli::ContinuousSolution(a) => (Command::ContinuousSolution, a),
        Cli::CertifyContinuity(a) => (Command::CertifyContinuity, a),
        Cli::CheckLupacciolu(a) => (Command::CheckLupacciolu, a),
        Cli::Sandwich(a) => (Command::Sandwich, a),
        Cli::Properties(a) => (Command::Properties, a),
        Cli::Qsolve(a) => (Command::Qsolve, a),
    }
}

fn error_name(e: &plurisolve_core::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| c == '(' || c == '{' || c == ' ')
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn real_main() -> Result<ExitCode, String> {
    let app = App::parse();
    let (expected, args) = expected_command(&app.cli);

    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| format!("cannot read manifest {}: {e}", args.manifest.display()))?;
    let mut m = RunManifest::from_json(&text).map_err(|e| {
        format!(
            "manifest parse error at {}:{}: {e}",
            e.line(),
            e.column()
        )
    })?;
    if m.command != expected {
        return Err(format!(
            "manifest command '{}' does not match subcommand '{}'",
            m.command.name(),
            expected.name()
        ));
    }

    // Flag overrides, echoed into the resolved manifest.
    if let Some(out) = &args.out {
        m.output_dir = out.clone();
    }
    if let Some(s) = args.spacing {
        match &mut m.grid {
            Some(g) => g.spacing = s,
            None => {
                m.grid = Some(manifest::GridSpec {
                    r#box: None,
                    spacing: s,
                })
            }
        }
    }
    if let Some(t) = args.tol {
        let mut cfg = m
            .cfg
            .clone()
            .unwrap_or_else(|| plurisolve_core::envelope::EnvelopeConfig::for_dim(m.domain.n));
        cfg.tol_iter = Some(t);
        m.cfg = Some(cfg);
    }
    if let Some(nm) = args.nu_max {
        if let Some(p) = &mut m.plan {
            p.nu_max = nm;
        }
    }
    if let Some(q) = args.q {
        m.q = Some(q);
    }
    if let Some(w) = args.workers {
        m.workers = Some(w);
    }

    let workers = m.workers.unwrap_or(0);
    let outcome = plurisolve_core::par::with_workers(workers, || commands::run(&m));
    match outcome {
        Ok(commands::Outcome::Success) => Ok(ExitCode::SUCCESS),
        Ok(commands::Outcome::CertificateRejected) => {
            eprintln!("certificate rejected (run is valid; exit 2)");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(format!("[{}] {e}", error_name(&e))),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

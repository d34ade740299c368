//! `leafwise`: command-line access to leafwise cohomology computations.
//!
//! Exit codes: 0 solved or passed, 1 usage or input error, 2 mathematical
//! obstruction, 3 divergent or inconclusive.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use leafwise_core::Error;

use commands::Ctx;
use output::{
    write_artifacts, write_manifest, Outcome, RunManifest, EXIT_DIVERGENT, EXIT_OBSTRUCTED,
    EXIT_USAGE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "leafwise", version, about = "Leafwise cohomology of linear actions on tori")]
struct Cli {
    /// Directory for result.json, CSV tables and manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Numerical tolerance; each subcommand documents its default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation radius of refitted series.
    #[arg(long, global = true)]
    truncation: Option<i64>,
    /// Scan radius in the sup norm of frequency vectors.
    #[arg(long, global = true)]
    radius: Option<i64>,
    /// Seed recorded in the manifest for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve X_v g + c = f for a flow, or d_F g + c = omega for an action.
    SolveCohomeq {
        #[arg(long)]
        field: String,
        #[arg(long)]
        matrix: String,
    },
    /// Small divisors and Diophantine exponent fit (default radius 1024).
    DiophantineScan {
        #[arg(long)]
        matrix: String,
    },
    /// Chevalley-Eilenberg cohomology of a Lie algebra.
    LieCohomology {
        #[arg(long)]
        algebra: String,
    },
    /// Mayer-Vietoris dimensions of a suspension.
    SuspensionH1 {
        #[arg(long)]
        data: String,
    },
    /// Eigen-data and H^1 of the suspended stable foliation of a toral automorphism.
    Toral {
        /// Inline JSON such as "[[2,1],[1,1]]" or a file path.
        #[arg(long)]
        matrix: String,
    },
    /// Rotation number of a circle map with a rigorous enclosure.
    RotationNumber {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
    },
    /// Scan Moser's simultaneous Diophantine condition (default radius 1000).
    MoserCheck {
        /// Inline JSON array of rotation numbers or a file path.
        #[arg(long)]
        taus: String,
        #[arg(long = "exp", default_value_t = 1.0)]
        exponent: f64,
    },
    /// Iterated linearized conjugacy of a commuting family.
    Kam {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Decide whether two linear actions have the same orbit foliation.
    Equivalence {
        #[arg(long)]
        v1: String,
        #[arg(long)]
        v2: String,
    },
    /// Resonant modes spanning the truncated obstruction space (default radius 64).
    Obstructions {
        #[arg(long)]
        matrix: String,
    },
    /// Dimension of the truncated infinitesimal deformation space (default radius 64).
    RigidityReport {
        #[arg(long)]
        matrix: String,
    },
    /// Known results that are cited, not computed.
    Refs {
        #[arg(long, default_value = "")]
        id: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SolveCohomeq { .. } => "solve-cohomeq",
            Command::DiophantineScan { .. } => "diophantine-scan",
            Command::LieCohomology { .. } => "lie-cohomology",
            Command::SuspensionH1 { .. } => "suspension-h1",
            Command::Toral { .. } => "toral",
            Command::RotationNumber { .. } => "rotation-number",
            Command::MoserCheck { .. } => "moser-check",
            Command::Kam { .. } => "kam",
            Command::Equivalence { .. } => "equivalence",
            Command::Obstructions { .. } => "obstructions",
            Command::RigidityReport { .. } => "rigidity-report",
            Command::Refs { .. } => "refs",
        }
    }
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Result<Outcome> {
    match &cli.command {
        Command::SolveCohomeq { field, matrix } => commands::solve_cohomeq(ctx, field, matrix, cli.tol),
        Command::DiophantineScan { matrix } => commands::diophantine_scan(ctx, matrix, cli.radius),
        Command::LieCohomology { algebra } => commands::lie_cohomology(ctx, algebra),
        Command::SuspensionH1 { data } => commands::suspension_h1(ctx, data),
        Command::Toral { matrix } => commands::toral(ctx, matrix),
        Command::RotationNumber { map, iters } => commands::rotation(ctx, map, *iters),
        Command::MoserCheck { taus, exponent } => commands::moser(ctx, taus, cli.radius, *exponent),
        Command::Kam { family, steps } => commands::kam(ctx, family, *steps, cli.truncation, cli.tol),
        Command::Equivalence { v1, v2 } => commands::equivalence(ctx, v1, v2, cli.tol),
        Command::Obstructions { matrix } => commands::obstructions(ctx, matrix, cli.radius),
        Command::RigidityReport { matrix } => commands::rigidity(ctx, matrix, cli.radius),
        Command::Refs { id } => commands::refs(ctx, id),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::Invalid(_) => "invalid",
        Error::UnderResolved { .. } => "under_resolved",
        Error::NotConjugateSymmetric { .. } => "not_conjugate_symmetric",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::RankDeficient(_) => "rank_deficient",
        Error::AllResonant => "all_resonant",
        Error::NotClosed { .. } => "not_closed",
        Error::Inconsistent { .. } => "inconsistent",
        Error::InvalidAlgebra(_) => "invalid_algebra",
        Error::RankUnstable(_) => "rank_unstable",
        Error::NotHyperbolic(_) => "not_hyperbolic",
        Error::SingularGauge { .. } => "singular_gauge",
        Error::TruncationLoss { .. } => "truncation_loss",
        Error::OrientationLost { .. } => "orientation_lost",
        Error::RotationMismatch { .. } => "rotation_mismatch",
        Error::Obstructed { .. } => "obstructed",
        Error::Schema { .. } => "schema",
    }
}

fn error_exit(e: &Error) -> u8 {
    match e {
        Error::AllResonant | Error::NotClosed { .. } | Error::Obstructed { .. } => EXIT_OBSTRUCTED,
        Error::RankUnstable(_)
        | Error::TruncationLoss { .. }
        | Error::SingularGauge { .. }
        | Error::Inconsistent { .. } => EXIT_DIVERGENT,
        _ => EXIT_USAGE,
    }
}

/// Turns a failed run into a payload with a machine-readable reason.
fn error_outcome(err: &anyhow::Error) -> Outcome {
    let reason = format!("{err:#}");
    let (kind, exit, pointer) = match err.downcast_ref::<Error>() {
        Some(e @ Error::Schema { pointer, .. }) => (error_kind(e), error_exit(e), Some(pointer.clone())),
        Some(e) => (error_kind(e), error_exit(e), None),
        None => ("io", EXIT_USAGE, None),
    };
    Outcome::ok(json!({
        "status": "error",
        "error": { "kind": kind, "message": reason, "pointer": pointer },
    }))
    .fail(exit, reason)
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LEAFWISE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("LEAFWISE_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("LEAFWISE_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx::default();
    let outcome = match init_threads() {
        Ok(()) => run(&cli, &mut ctx).unwrap_or_else(|e| error_outcome(&e)),
        Err(msg) => error_outcome(&anyhow::anyhow!(msg)),
    };

    ctx.set("seed", cli.seed);
    ctx.set("format", format!("{:?}", cli.format).to_lowercase());
    ctx.set("threads", rayon::current_num_threads());
    if let Some(dir) = &cli.out {
        ctx.set("out", dir.display().to_string());
    }

    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let primary = outcome.tables.first().filter(|_| cli.format == Format::Csv);
    let printed: Result<()> = match primary {
        Some(t) => t.to_csv().and_then(|s| Ok(write!(lock, "{s}")?)),
        None => serde_json::to_string_pretty(&outcome.payload)
            .map_err(Into::into)
            .and_then(|s| Ok(writeln!(lock, "{s}")?)),
    };
    drop(lock);
    if let Some(reason) = &outcome.reason {
        eprintln!("leafwise {}: {reason}", cli.command.name());
    }

    let mut exit = outcome.exit;
    let outputs = match &cli.out {
        Some(dir) => match write_artifacts(dir, &outcome) {
            Ok(files) => files,
            Err(e) => {
                eprintln!("leafwise: {e:#}");
                exit = EXIT_USAGE;
                Vec::new()
            }
        },
        None => Vec::new(),
    };
    if let Err(e) = printed {
        eprintln!("leafwise: {e:#}");
    }

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        config: ctx.config,
        inputs: ctx.inputs,
        exit_code: exit,
        reason: outcome.reason.clone(),
        outputs,
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    match &cli.out {
        Some(dir) => {
            if let Err(e) = write_manifest(dir, &manifest) {
                eprintln!("leafwise: {e:#}");
                exit = EXIT_USAGE;
            }
        }
        None => {
            if let Ok(line) = serde_json::to_string(&manifest) {
                eprintln!("{line}");
            }
        }
    }
    ExitCode::from(exit)
}

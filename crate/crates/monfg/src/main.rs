use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use monfg::cli::{
    self, default_tol, CliError, ReportDocument,
};
use monfg::criteria::Criterion;
use monfg::equilibrium::{MixedSearchConfig, PsneMode, SearchConfig};
use monfg::utility::{Shape, DEFAULT_SHAPE_TRIALS};

/// Solver toolkit for multi-objective normal-form games.
///
/// Games are JSON files; payoffs are listed per player in row-major order
/// over joint actions (the last player's action index varies fastest).
/// Every command prints a JSON report to stdout. Exit codes: 0 success,
/// 2 usage or parse error, 3 shape or validation error, 4 unsupported input.
#[derive(Parser)]
#[command(name = "monfg", version, about, long_about = None)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compose each player's utility with their payoffs and write the
    /// induced scalar trade-off game.
    Reduce {
        /// Input game file (must contain "utilities").
        game: PathBuf,
        /// Where to write the trade-off game (same JSON format, 1 objective).
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Enumerate pure strategy Nash equilibria of the trade-off game.
    Psne {
        game: PathBuf,
        /// trusted: return the trade-off PSNE set, warning when a utility
        /// fails the quasiconvexity probe; verified: additionally filter
        /// candidates through an all-SER epsilon-NE check.
        #[arg(long, default_value = "trusted")]
        mode: String,
        /// Certification threshold for the verified filter.
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        /// Seed for the quasiconvexity probe.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling budget for the quasiconvexity probe.
        #[arg(long, default_value_t = DEFAULT_SHAPE_TRIALS)]
        shape_trials: usize,
    },
    /// Check whether an explicit profile is an epsilon-NE under a
    /// per-player criterion assignment.
    Verify {
        game: PathBuf,
        /// Strategy profile: players separated by `;`, probabilities by `,`
        /// (e.g. `0.55,0.45;1,0`).
        #[arg(long)]
        profile: String,
        /// Per-player criteria, e.g. `SER,SER` or `ESR,SER`; defaults to the
        /// game file's "criteria".
        #[arg(long)]
        assignment: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Best response for one player against fixed opponent strategies.
    BestResponse {
        game: PathBuf,
        /// Focal player (0-based).
        #[arg(long)]
        player: usize,
        /// The other players' strategies in player order, `;`-separated.
        #[arg(long)]
        opponent: String,
        /// ESR or SER.
        #[arg(long)]
        criterion: String,
        /// Simplex grid subdivisions for the SER scan.
        #[arg(long, default_value_t = SearchConfig::default().grid)]
        grid: usize,
        /// Grid points refined by local search.
        #[arg(long, default_value_t = SearchConfig::default().restarts)]
        restarts: usize,
        /// Evaluation budget per refinement.
        #[arg(long, default_value_t = SearchConfig::default().budget)]
        budget: usize,
    },
    /// Grid-and-refine search for mixed epsilon-NE in 2-player games
    /// (at most 4 actions per player).
    SearchMixed {
        game: PathBuf,
        /// Per-player criteria; defaults to the game file's "criteria".
        #[arg(long)]
        assignment: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        /// Product-simplex grid subdivisions for the scan stage.
        #[arg(long, default_value_t = MixedSearchConfig::default().grid)]
        grid: usize,
        /// Profiles closer than this (max-norm) are reported once.
        #[arg(long, default_value_t = MixedSearchConfig::default().dedup_radius)]
        dedup_radius: f64,
    },
    /// Randomly probe a utility expression for violations of a convexity
    /// class; absence of a counterexample is not a certificate.
    ClassifyUtility {
        /// Utility expression, e.g. `(+ (pow p1 2) p2)`.
        expr: String,
        /// One of: convex, concave, strictly-convex, strictly-concave,
        /// quasiconvex, quasiconcave, strictly-quasiconvex,
        /// strictly-quasiconcave.
        #[arg(long)]
        shape: String,
        /// Sampling box `lo,hi;lo,hi;...`, one interval per objective;
        /// defaults to [-10, 10] in each coordinate.
        #[arg(long = "box")]
        box_domain: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SHAPE_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Violation tolerance; defaults to the toolkit-wide tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn run(args: Args) -> Result<ReportDocument, CliError> {
    match args.command {
        Command::Reduce { game, output } => cli::cmd_reduce(&game, &output),
        Command::Psne {
            game,
            mode,
            epsilon,
            seed,
            shape_trials,
        } => {
            let mode = match mode.as_str() {
                "trusted" => PsneMode::TrustedQuasiconvex,
                "verified" => PsneMode::VerifiedSer,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown mode \"{other}\" (expected trusted or verified)"
                    )))
                }
            };
            cli::cmd_psne(&game, mode, epsilon, seed, shape_trials)
        }
        Command::Verify {
            game,
            profile,
            assignment,
            epsilon,
        } => cli::cmd_verify(&game, &profile, assignment.as_deref(), epsilon),
        Command::BestResponse {
            game,
            player,
            opponent,
            criterion,
            grid,
            restarts,
            budget,
        } => {
            let criterion = Criterion::from_name(&criterion).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown criterion \"{criterion}\" (expected ESR or SER)"
                ))
            })?;
            cli::cmd_best_response(&game, player, &opponent, criterion, grid, restarts, budget)
        }
        Command::SearchMixed {
            game,
            assignment,
            epsilon,
            grid,
            dedup_radius,
        } => cli::cmd_search_mixed(&game, assignment.as_deref(), epsilon, grid, dedup_radius),
        Command::ClassifyUtility {
            expr,
            shape,
            box_domain,
            trials,
            seed,
            tol,
        } => {
            let shape = Shape::from_name(&shape).ok_or_else(|| {
                CliError::Usage(format!("unknown shape \"{shape}\""))
            })?;
            cli::cmd_classify_utility(
                &expr,
                shape,
                box_domain.as_deref(),
                trials,
                seed,
                tol.unwrap_or_else(default_tol),
            )
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(report) => {
            println!("{}", report.to_json_pretty());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

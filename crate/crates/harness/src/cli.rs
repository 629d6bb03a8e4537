//! The `metachess` command line: movegen checks, single lookahead
//! decisions, full matches from config files, opening generation, and the
//! exact-solver self-check.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use game_core::chess::{perft, ChessState};
use game_core::Trajectory;
use mpc_policy::{select, LookaheadSpec, Searcher, Variant};
use uci_client::{Budget, EngineConfig, EnginePool};

use crate::{run_match, selfcheck, MatchConfig};

#[derive(Parser)]
#[command(
    name = "metachess",
    about = "Meta chess player: exact first-step lookahead over UCI engines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count leaf nodes of the legal move tree at a fixed depth.
    Perft {
        /// Position as FEN, or "startpos".
        #[arg(long, default_value = "startpos")]
        fen: String,
        #[arg(long)]
        depth: u32,
    },
    /// Compute one lookahead decision for a position and print it.
    Bestmove {
        /// Position as FEN, or "startpos".
        #[arg(long, default_value = "startpos")]
        fen: String,
        /// half_step | one_step | multi_step
        #[arg(long, default_value = "one_step")]
        variant: String,
        /// Lookahead depth in move pairs (multi_step only).
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, default_value_t = 4)]
        prune_width: usize,
        #[arg(long)]
        fortified: bool,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Evaluator engine: "stub", "stub:DEPTH", or a path to a UCI binary.
        #[arg(long, default_value = "stub:2")]
        evaluator: String,
        /// Nominal opponent engine; defaults to the evaluator's config.
        #[arg(long)]
        nominal: Option<String>,
        /// Per-move budget in milliseconds for external engines.
        #[arg(long)]
        movetime: Option<u64>,
    },
    /// Play a configured match and write PGN, records, and traces.
    Match {
        #[arg(long)]
        config: PathBuf,
    },
    /// Generate opening lines by engine self-play.
    Openings {
        /// Engine: "stub", "stub:DEPTH", or a path to a UCI binary.
        #[arg(long, default_value = "stub:2")]
        engine: String,
        #[arg(long, default_value_t = 1)]
        count: u32,
        #[arg(long, default_value_t = 24)]
        plies: u32,
        #[arg(long)]
        movetime: Option<u64>,
    },
    /// Run the exact-solver property suite on tic-tac-toe.
    Selfcheck,
}

enum CliError {
    /// Bad arguments or unusable config: exit 2.
    Usage(String),
    /// Failures while actually running: exit 1.
    Runtime(String),
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            2
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn parse_fen(fen: &str) -> Result<ChessState, CliError> {
    if fen == "startpos" {
        return Ok(ChessState::initial());
    }
    ChessState::from_fen(fen).map_err(|e| CliError::Usage(format!("bad --fen: {e}")))
}

/// "stub" | "stub:DEPTH" | path-to-binary.
fn parse_engine(arg: &str, movetime: Option<u64>) -> Result<EngineConfig, CliError> {
    if arg == "stub" {
        return Ok(EngineConfig::stub(2));
    }
    if let Some(depth) = arg.strip_prefix("stub:") {
        let depth: u32 = depth
            .parse()
            .map_err(|_| CliError::Usage(format!("bad stub depth in {arg:?}")))?;
        if !(1..=6).contains(&depth) {
            return Err(CliError::Usage("stub depth must be 1..=6".into()));
        }
        return Ok(EngineConfig::stub(depth));
    }
    Ok(EngineConfig::external(
        arg,
        Budget::Movetime(movetime.unwrap_or(100)),
    ))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Perft { fen, depth } => {
            let state = parse_fen(&fen)?;
            println!("{}", perft(&state, depth));
            Ok(())
        }
        Command::Bestmove {
            fen,
            variant,
            depth,
            prune_width,
            fortified,
            parallelism,
            evaluator,
            nominal,
            movetime,
        } => {
            let state = parse_fen(&fen)?;
            let variant = match variant.as_str() {
                "half_step" | "half" => Variant::HalfStep,
                "one_step" | "one" => Variant::OneStep,
                "multi_step" | "multi" => Variant::MultiStep { depth },
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown variant {other:?} (half_step|one_step|multi_step)"
                    )))
                }
            };
            let mut spec = match variant {
                Variant::HalfStep => LookaheadSpec::half_step(),
                Variant::OneStep => LookaheadSpec::one_step(),
                Variant::MultiStep { depth } => LookaheadSpec::multi_step(depth),
            };
            spec.prune_width = prune_width;
            spec.fortified = fortified;
            spec.parallelism = parallelism;
            spec.validate().map_err(CliError::Usage)?;

            let evaluator_config = parse_engine(&evaluator, movetime)?;
            let nominal_config = match &nominal {
                Some(arg) => parse_engine(arg, movetime)?,
                None => evaluator_config.clone(),
            };

            let evaluator_pool = EnginePool::launch(&evaluator_config, parallelism)
                .map_err(|e| CliError::Runtime(format!("evaluator launch: {e}")))?;
            let uses_nominal = !matches!(variant, Variant::HalfStep);
            let nominal_pool = if uses_nominal {
                Some(
                    EnginePool::launch(&nominal_config, parallelism)
                        .map_err(|e| CliError::Runtime(format!("nominal launch: {e}")))?,
                )
            } else {
                None
            };

            let trajectory = Trajectory::new(state);
            let nominal_searcher: &dyn Searcher<ChessState> = match &nominal_pool {
                Some(pool) => pool,
                None => &evaluator_pool,
            };
            let decision = select(&trajectory, &evaluator_pool, nominal_searcher, &spec)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            print!("{decision}");
            println!("bestmove {}", decision.chosen);

            evaluator_pool.shutdown();
            if let Some(pool) = nominal_pool {
                pool.shutdown();
            }
            Ok(())
        }
        Command::Match { config } => {
            let config = MatchConfig::load(&config)
                .map_err(|e| CliError::Usage(format!("--config {}: {e}", config.display())))?;
            let output = run_match(&config).map_err(|e| CliError::Runtime(e.to_string()))?;
            for record in &output.records {
                println!(
                    "game {}: {} ({}) [{} vs {}]",
                    record.index + 1,
                    record.result.pgn_token(),
                    record.termination,
                    record.white,
                    record.black,
                );
            }
            println!("{}", output.score);
            if let Some(dir) = &config.output_dir {
                println!("artifacts in {}", dir.display());
            }
            Ok(())
        }
        Command::Openings {
            engine,
            count,
            plies,
            movetime,
        } => {
            let config = parse_engine(&engine, movetime)?;
            let lines = crate::generate_openings(&config, count, plies)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            for line in lines {
                let text: Vec<String> = line.iter().map(|m| m.to_string()).collect();
                println!("{}", text.join(" "));
            }
            Ok(())
        }
        Command::Selfcheck => {
            let reports = selfcheck::run_all();
            let mut failures = 0;
            for r in &reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("{status} {} — {}", r.name, r.detail);
                if !r.passed {
                    failures += 1;
                }
            }
            if failures > 0 {
                Err(CliError::Runtime(format!("{failures} checks failed")))
            } else {
                Ok(())
            }
        }
    }
}

//! Playing one game to termination, with adjudication, per-move records,
//! and prediction bookkeeping for lookahead players.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use game_core::chess::{ChessMove, ChessState, Color};
use game_core::{DrawReason, GameState, Status, Trajectory};
use mpc_policy::{select, LookaheadSpec, MoveDecision, PolicyError, Searcher};
use uci_client::{Budget, EngineConfig, EngineError, EnginePool};

use crate::{color_name, OpponentMode, PlayerKind, PlayerSpec};

#[derive(Debug, Clone)]
pub enum OpeningStart {
    Startpos,
    Fen(String),
    Moves(Vec<ChessMove>),
}

/// Game-level knobs extracted from the match config.
#[derive(Debug, Clone)]
pub struct PlayOptions {
    pub max_plies: u32,
    pub opponent_mode: OpponentMode,
    /// Budget override for the white/black player when it is a raw engine
    /// (the per-branch-match rule).
    pub white_raw_budget: Option<Budget>,
    pub black_raw_budget: Option<Budget>,
}

impl Default for PlayOptions {
    fn default() -> Self {
        PlayOptions {
            max_plies: 400,
            opponent_mode: OpponentMode::Stochastic,
            white_raw_budget: None,
            black_raw_budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameResult {
    WhiteWin,
    BlackWin,
    Draw,
}

impl GameResult {
    pub fn pgn_token(&self) -> &'static str {
        match self {
            GameResult::WhiteWin => "1-0",
            GameResult::BlackWin => "0-1",
            GameResult::Draw => "1/2-1/2",
        }
    }
}

/// Per-decision digest kept in the game record; the full branch-by-branch
/// trace goes to the trace log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionSummary {
    pub ply: u32,
    pub mover: String,
    pub chosen: String,
    pub engine_calls: u32,
    pub wall_ms: u64,
    /// The nominal reply predicted for the chosen move, when one exists.
    pub predicted_reply: Option<String>,
    /// Filled once the opponent actually answered: did they play the
    /// predicted reply?
    pub prediction_matched: Option<bool>,
    pub fortified_switch: Option<bool>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PredictionStats {
    /// Lookahead decisions that predicted a reply and saw an answer.
    pub total: u32,
    pub matched: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameRecord {
    pub index: u32,
    pub white: String,
    pub black: String,
    /// FEN of the position the game record starts from (before opening
    /// moves are applied).
    pub start_fen: String,
    /// Opening moves, also included in `moves`.
    pub opening: Vec<String>,
    pub moves: Vec<String>,
    pub result: GameResult,
    pub termination: String,
    pub move_times_ms: Vec<u64>,
    pub decisions: Vec<DecisionSummary>,
    pub predictions: PredictionStats,
}

impl GameRecord {
    /// Replays the move list through the rules engine; the reached status
    /// must justify the recorded result.
    pub fn replay_consistent(&self) -> Result<(), String> {
        let start = ChessState::from_fen(&self.start_fen).map_err(|e| e.to_string())?;
        let mut traj = Trajectory::new(start);
        for mv in &self.moves {
            let mv: ChessMove = mv.parse().map_err(|_| format!("bad move {mv:?}"))?;
            traj.push(mv).map_err(|e| e.to_string())?;
        }
        let status = traj.current().status();
        let expect = match status {
            Status::Win(Color::White) => Some(GameResult::WhiteWin),
            Status::Win(Color::Black) => Some(GameResult::BlackWin),
            Status::Draw(_) => Some(GameResult::Draw),
            Status::Ongoing => None,
        };
        match expect {
            Some(result) if result == self.result => Ok(()),
            Some(result) => Err(format!(
                "replay ends {result:?} but record says {:?}",
                self.result
            )),
            // Adjudications and forfeits end with the game still ongoing.
            None if self.termination.contains("adjudicated")
                || self.termination.contains("forfeit") =>
            {
                Ok(())
            }
            None => Err(format!(
                "replay still ongoing but termination is {:?}",
                self.termination
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GameError {
    #[error("opening is not playable: {0}")]
    BadOpening(String),
    #[error("{side} engine failed to launch: {source}")]
    Launch {
        side: &'static str,
        #[source]
        source: EngineError,
    },
}

enum Runtime {
    Raw {
        pool: EnginePool,
        budget: Option<Budget>,
    },
    Mpc {
        spec: LookaheadSpec,
        evaluator: EnginePool,
        nominal: Option<EnginePool>,
    },
}

impl Runtime {
    fn shutdown(&self) {
        match self {
            Runtime::Raw { pool, .. } => pool.shutdown(),
            Runtime::Mpc {
                evaluator, nominal, ..
            } => {
                evaluator.shutdown();
                if let Some(n) = nominal {
                    n.shutdown();
                }
            }
        }
    }
}

fn launch_pool(
    config: &EngineConfig,
    size: usize,
    side: &'static str,
) -> Result<EnginePool, GameError> {
    EnginePool::launch(config, size).map_err(|source| GameError::Launch { side, source })
}

fn build_runtime(
    spec: &PlayerSpec,
    raw_budget: Option<Budget>,
    side: &'static str,
) -> Result<Runtime, GameError> {
    match &spec.kind {
        PlayerKind::RawEngine { engine } => Ok(Runtime::Raw {
            pool: launch_pool(engine, 1, side)?,
            budget: raw_budget,
        }),
        PlayerKind::Mpc {
            lookahead,
            evaluator,
            nominal,
        } => {
            let lookahead = lookahead.clone();
            let pool_size = lookahead.parallelism;
            Ok(Runtime::Mpc {
                evaluator: launch_pool(evaluator, pool_size, side)?,
                nominal: match nominal {
                    Some(config) => Some(launch_pool(config, pool_size, side)?),
                    None => None,
                },
                spec: lookahead,
            })
        }
    }
}

/// In deterministic mode the raw opponent answers from the lookahead
/// player's nominal pool at the nominal budget, so the prediction and the
/// actual reply are the same query.
fn wire_deterministic(white: &mut Runtime, black: &mut Runtime) {
    let (raw_rt, mpc_rt) = match (&*white, &*black) {
        (Runtime::Raw { .. }, Runtime::Mpc { .. }) => (white, black),
        (Runtime::Mpc { .. }, Runtime::Raw { .. }) => (black, white),
        _ => return,
    };
    let Runtime::Mpc { spec, nominal, .. } = &*mpc_rt else {
        unreachable!("matched above");
    };
    let Some(nominal_pool) = nominal else { return };
    let shared = nominal_pool.clone();
    let nominal_budget = spec.nominal_budget;
    if let Runtime::Raw { pool, budget } = raw_rt {
        // The raw side's own engine was launched but goes unused; its
        // shutdown is a no-op on the shared pool's clone.
        pool.shutdown();
        *pool = shared;
        *budget = nominal_budget;
    }
}

pub fn play_game(
    index: u32,
    white: &PlayerSpec,
    black: &PlayerSpec,
    opening: &OpeningStart,
    options: &PlayOptions,
) -> Result<(GameRecord, Vec<MoveDecision<ChessState>>), GameError> {
    let mut trajectory = opening_trajectory(opening)?;
    let opening_moves: Vec<String> = trajectory.moves().iter().map(|m| m.to_string()).collect();
    let start_fen = trajectory.start().to_fen();

    let mut white_rt = build_runtime(white, options.white_raw_budget, "white")?;
    let mut black_rt = match build_runtime(black, options.black_raw_budget, "black") {
        Ok(rt) => rt,
        Err(e) => {
            white_rt.shutdown();
            return Err(e);
        }
    };
    if options.opponent_mode == OpponentMode::Deterministic {
        wire_deterministic(&mut white_rt, &mut black_rt);
    }

    let outcome = run_moves(&mut trajectory, &white_rt, &black_rt, options);

    white_rt.shutdown();
    black_rt.shutdown();

    let (result, termination, mut decisions, move_times, full_decisions) = outcome;
    let predictions = PredictionStats {
        total: decisions
            .iter()
            .filter(|d| d.prediction_matched.is_some())
            .count() as u32,
        matched: decisions
            .iter()
            .filter(|d| d.prediction_matched == Some(true))
            .count() as u32,
    };
    decisions.shrink_to_fit();

    Ok((
        GameRecord {
            index,
            white: white.name.clone(),
            black: black.name.clone(),
            start_fen,
            opening: opening_moves,
            moves: trajectory.moves().iter().map(|m| m.to_string()).collect(),
            result,
            termination,
            move_times_ms: move_times,
            decisions,
            predictions,
        },
        full_decisions,
    ))
}

fn opening_trajectory(opening: &OpeningStart) -> Result<Trajectory<ChessState>, GameError> {
    match opening {
        OpeningStart::Startpos => Ok(Trajectory::new(ChessState::initial())),
        OpeningStart::Fen(fen) => Ok(Trajectory::new(
            ChessState::from_fen(fen).map_err(|e| GameError::BadOpening(e.to_string()))?,
        )),
        OpeningStart::Moves(moves) => {
            let mut traj = Trajectory::new(ChessState::initial());
            for mv in moves {
                traj.push(*mv)
                    .map_err(|e| GameError::BadOpening(e.to_string()))?;
            }
            Ok(traj)
        }
    }
}

type MoveLoopOutcome = (
    GameResult,
    String,
    Vec<DecisionSummary>,
    Vec<u64>,
    Vec<MoveDecision<ChessState>>,
);

fn run_moves(
    trajectory: &mut Trajectory<ChessState>,
    white_rt: &Runtime,
    black_rt: &Runtime,
    options: &PlayOptions,
) -> MoveLoopOutcome {
    let mut decisions: Vec<DecisionSummary> = Vec::new();
    let mut full_decisions: Vec<MoveDecision<ChessState>> = Vec::new();
    let mut move_times = Vec::new();
    // Index into `decisions` of the last lookahead decision awaiting the
    // opponent's answer.
    let mut pending_prediction: Option<usize> = None;

    loop {
        let status = trajectory.current().status();
        if let Some((result, termination)) = decisive(&status) {
            return (result, termination, decisions, move_times, full_decisions);
        }
        if trajectory.plies() as u32 >= options.max_plies {
            return (
                GameResult::Draw,
                "adjudicated (ply cap)".to_string(),
                decisions,
                move_times,
                full_decisions,
            );
        }

        let mover = trajectory.current().side_to_move();
        let runtime = match mover {
            Color::White => white_rt,
            Color::Black => black_rt,
        };
        let started = Instant::now();
        let picked = match runtime {
            Runtime::Raw { pool, budget } => pool
                .with_engine(|e| e.search(trajectory, *budget))
                .map(|r| (r.best_move, None))
                .map_err(|e| e.to_string()),
            Runtime::Mpc {
                spec,
                evaluator,
                nominal,
            } => {
                let nominal_searcher: &dyn Searcher<ChessState> = match nominal {
                    Some(pool) => pool,
                    None => evaluator,
                };
                match select(trajectory, evaluator, nominal_searcher, spec) {
                    Ok(decision) => Ok((decision.chosen, Some(decision))),
                    Err(PolicyError::NoLegalMoves { key }) => {
                        unreachable!("status was ongoing at {key}")
                    }
                    Err(e) => Err(e.to_string()),
                }
            }
        };
        let elapsed_ms = started.elapsed().as_millis() as u64;

        let (mv, decision) = match picked {
            Ok(x) => x,
            Err(diagnostic) => {
                let loser = mover;
                let result = match loser {
                    Color::White => GameResult::BlackWin,
                    Color::Black => GameResult::WhiteWin,
                };
                return (
                    result,
                    format!("forfeit: {} engine failed: {diagnostic}", color_name(loser)),
                    decisions,
                    move_times,
                    full_decisions,
                );
            }
        };

        // Settle the opponent's pending prediction against this move.
        if let Some(idx) = pending_prediction.take() {
            let matched = decisions[idx].predicted_reply.as_deref() == Some(mv.to_string().as_str());
            decisions[idx].prediction_matched = Some(matched);
        }

        if let Some(decision) = decision {
            let predicted_reply = decision
                .chosen_branch()
                .reply
                .as_ref()
                .map(|m| m.to_string());
            decisions.push(DecisionSummary {
                ply: trajectory.plies() as u32,
                mover: color_name(mover).to_string(),
                chosen: mv.to_string(),
                engine_calls: decision.engine_calls,
                wall_ms: elapsed_ms,
                predicted_reply: predicted_reply.clone(),
                prediction_matched: None,
                fortified_switch: decision.fortification.as_ref().map(|f| f.switched),
            });
            if predicted_reply.is_some() {
                pending_prediction = Some(decisions.len() - 1);
            }
            full_decisions.push(decision);
        }
        move_times.push(elapsed_ms);
        trajectory.push(mv).expect("players return legal moves");
    }
}

fn decisive(status: &Status<Color>) -> Option<(GameResult, String)> {
    match status {
        Status::Ongoing => None,
        Status::Win(Color::White) => Some((GameResult::WhiteWin, "checkmate".to_string())),
        Status::Win(Color::Black) => Some((GameResult::BlackWin, "checkmate".to_string())),
        Status::Draw(reason) => Some((
            GameResult::Draw,
            match reason {
                DrawReason::Stalemate => "stalemate",
                DrawReason::ThreefoldRepetition => "threefold repetition",
                DrawReason::FiftyMoveRule => "fifty-move rule",
                DrawReason::InsufficientMaterial => "insufficient material",
                DrawReason::Adjudicated => "adjudicated",
            }
            .to_string(),
        )),
    }
}

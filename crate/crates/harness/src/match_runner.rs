//! Running a whole match: opening assignment, color alternation, parallel
//! games, 1/0.5/0 scoring, artifact export.

use std::fmt;
use std::fs;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};

use game_core::chess::ChessState;
use game_core::GameState;
use mpc_policy::{write_decision, MoveDecision, TraceContext};

use crate::game::{play_game, GameRecord, GameResult, OpeningStart, PlayOptions};
use crate::openings::generate_openings;
use crate::pgn::export_pgn;
use crate::{effective_raw_budget, ConfigError, MatchConfig, OpeningPolicy, PlayerKind};

/// Final tally. Points are tracked in half-points so they stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchScore {
    pub player_a: String,
    pub player_b: String,
    pub a_wins: u32,
    pub b_wins: u32,
    pub draws: u32,
    /// Result token per game, from the white player's side, in game order.
    pub game_results: Vec<String>,
}

impl MatchScore {
    pub fn games(&self) -> u32 {
        self.a_wins + self.b_wins + self.draws
    }

    pub fn a_half_points(&self) -> u32 {
        2 * self.a_wins + self.draws
    }

    pub fn b_half_points(&self) -> u32 {
        2 * self.b_wins + self.draws
    }
}

fn fmt_half_points(half: u32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if half.is_multiple_of(2) {
        write!(f, "{}", half / 2)
    } else {
        write!(f, "{}.5", half / 2)
    }
}

impl fmt::Display for MatchScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.player_a)?;
        fmt_half_points(self.a_half_points(), f)?;
        write!(f, "-")?;
        fmt_half_points(self.b_half_points(), f)?;
        write!(f, " {} (+{} ={} -{})", self.player_b, self.a_wins, self.draws, self.b_wins)
    }
}

#[derive(Debug)]
pub struct MatchOutput {
    pub score: MatchScore,
    pub records: Vec<GameRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum MatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("opening generation failed: {0}")]
    Openings(String),
    #[error("cannot write outputs: {0}")]
    Io(#[from] std::io::Error),
}

/// xorshift64*; only the opening assignment order consumes randomness.
fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut s = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut next = || {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        s.wrapping_mul(0x2545_F491_4F6C_DD1D)
    };
    for i in (1..items.len()).rev() {
        let j = (next() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

pub fn run_match(config: &MatchConfig) -> Result<MatchOutput, MatchError> {
    config.validate()?;

    let pair_size = if config.alternate_colors { 2 } else { 1 };
    let slots_needed = (config.games as usize).div_ceil(pair_size);
    let mut openings = opening_slots(config, slots_needed)?;
    shuffle(&mut openings, config.seed);

    let plan: Vec<GamePlan> = (0..config.games)
        .map(|i| {
            let slot = (i as usize / pair_size) % openings.len();
            let swap = config.alternate_colors && i % 2 == 1;
            GamePlan {
                index: i,
                opening: openings[slot].clone(),
                // `swap` means: player A takes black this game.
                a_plays_black: swap,
            }
        })
        .collect();

    let outcomes = run_plans(config, &plan);

    let mut a_wins = 0;
    let mut b_wins = 0;
    let mut draws = 0;
    let mut game_results = Vec::new();
    let mut records = Vec::new();
    let mut decisions_by_game = Vec::new();
    for (plan_entry, (record, decisions)) in plan.iter().zip(outcomes) {
        match (record.result, plan_entry.a_plays_black) {
            (GameResult::Draw, _) => draws += 1,
            (GameResult::WhiteWin, false) | (GameResult::BlackWin, true) => a_wins += 1,
            _ => b_wins += 1,
        }
        game_results.push(record.result.pgn_token().to_string());
        records.push(record);
        decisions_by_game.push(decisions);
    }

    let score = MatchScore {
        player_a: config.white.name.clone(),
        player_b: config.black.name.clone(),
        a_wins,
        b_wins,
        draws,
        game_results,
    };

    if let Some(dir) = &config.output_dir {
        fs::create_dir_all(dir)?;
        let mut pgn = fs::File::create(dir.join("games.pgn"))?;
        export_pgn(&records, &mut pgn)?;

        let mut jsonl = fs::File::create(dir.join("records.jsonl"))?;
        for record in &records {
            writeln!(jsonl, "{}", serde_json::to_string(record).expect("record serializes"))?;
        }

        let mut traces = fs::File::create(dir.join("traces.jsonl"))?;
        for (record, decisions) in records.iter().zip(&decisions_by_game) {
            write_game_traces(&mut traces, record, decisions)?;
        }
    }

    Ok(MatchOutput { score, records })
}

#[derive(Clone)]
struct GamePlan {
    index: u32,
    opening: OpeningStart,
    a_plays_black: bool,
}

type GameOutcome = (GameRecord, Vec<MoveDecision<ChessState>>);

fn run_plans(config: &MatchConfig, plan: &[GamePlan]) -> Vec<GameOutcome> {
    let workers = config.parallel_games.min(plan.len().max(1));
    let slots: Vec<Mutex<Option<GameOutcome>>> = plan.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= plan.len() {
                    break;
                }
                let outcome = run_one(config, &plan[i]);
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("every game ran"))
        .collect()
}

fn run_one(config: &MatchConfig, plan: &GamePlan) -> GameOutcome {
    let (white, black) = if plan.a_plays_black {
        (&config.black, &config.white)
    } else {
        (&config.white, &config.black)
    };
    let options = PlayOptions {
        max_plies: config.max_plies,
        opponent_mode: config.opponent_mode,
        white_raw_budget: match &white.kind {
            PlayerKind::RawEngine { .. } => effective_raw_budget(config.budget_rule, black),
            _ => None,
        },
        black_raw_budget: match &black.kind {
            PlayerKind::RawEngine { .. } => effective_raw_budget(config.budget_rule, white),
            _ => None,
        },
    };
    match play_game(plan.index, white, black, &plan.opening, &options) {
        Ok(outcome) => outcome,
        Err(e) => {
            // A game that could not even start: the failing side forfeits.
            let (result, loser) = match &e {
                crate::game::GameError::Launch { side, .. } if *side == "white" => {
                    (GameResult::BlackWin, "white")
                }
                crate::game::GameError::Launch { .. } => (GameResult::WhiteWin, "black"),
                crate::game::GameError::BadOpening(_) => (GameResult::Draw, "nobody"),
            };
            let record = GameRecord {
                index: plan.index,
                white: white.name.clone(),
                black: black.name.clone(),
                start_fen: game_core::chess::START_FEN.to_string(),
                opening: Vec::new(),
                moves: Vec::new(),
                result,
                termination: format!("forfeit: {loser}: {e}"),
                move_times_ms: Vec::new(),
                decisions: Vec::new(),
                predictions: Default::default(),
            };
            (record, Vec::new())
        }
    }
}

fn opening_slots(
    config: &MatchConfig,
    slots_needed: usize,
) -> Result<Vec<OpeningStart>, MatchError> {
    match &config.openings {
        OpeningPolicy::FixedFens(fens) => Ok(fens
            .iter()
            .map(|f| OpeningStart::Fen(f.clone()))
            .collect()),
        OpeningPolicy::FixedMoves(lines) => {
            let mut out = Vec::new();
            for line in lines {
                let mut moves = Vec::new();
                for text in line {
                    moves.push(text.parse().map_err(|_| {
                        MatchError::Openings(format!("bad opening move {text:?}"))
                    })?);
                }
                out.push(OpeningStart::Moves(moves));
            }
            if out.is_empty() {
                out.push(OpeningStart::Startpos);
            }
            Ok(out)
        }
        OpeningPolicy::Generated { plies } => {
            let engine = config.white.primary_engine();
            let lines = generate_openings(engine, slots_needed as u32, *plies)
                .map_err(|e| MatchError::Openings(e.to_string()))?;
            Ok(lines.into_iter().map(OpeningStart::Moves).collect())
        }
    }
}

fn write_game_traces(
    w: &mut impl Write,
    record: &GameRecord,
    decisions: &[MoveDecision<ChessState>],
) -> std::io::Result<()> {
    // Recover each decision's position by replaying the move list.
    let start = ChessState::from_fen(&record.start_fen).expect("recorded FEN parses");
    let mut states = vec![start.clone()];
    let mut cur = start;
    for mv in &record.moves {
        let mv: game_core::chess::ChessMove = mv.parse().expect("recorded move parses");
        cur = cur.apply(&mv).expect("recorded game replays");
        states.push(cur.clone());
    }
    for (summary, decision) in record.decisions.iter().zip(decisions) {
        let ctx = TraceContext {
            game: format!("game-{}", record.index),
            ply: summary.ply,
            position: states[summary.ply as usize].to_fen(),
        };
        write_decision(w, &ctx, decision)?;
    }
    Ok(())
}

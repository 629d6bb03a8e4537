//! Move selection by lookahead over *all* legal moves — the first step of
//! lookahead is always exact — with a nominal-opponent engine predicting
//! replies and a position-evaluator engine scoring the outcomes.
//!
//! Three variants: half-step (no nominal opponent, each own move's
//! resulting position is scored from the opponent's point of view and the
//! worst-for-them is played), one-step (own move, predicted reply, then
//! evaluation), and multistep (further move pairs, with the deeper layers
//! pruned to the most promising continuations). A fortified mode falls
//! back to the evaluator's own root move whenever that engine scores it
//! above the lookahead's choice.

use std::fmt;
use std::time::Duration;

use game_core::{GameState, Trajectory};
use serde::{Deserialize, Serialize};
use uci_client::{Budget, EngineError, Score};

mod select;
mod trace;

pub use select::{fortify, select, select_half_step, select_multistep, select_one_step};
pub use trace::{write_decision, TraceContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    HalfStep,
    OneStep,
    MultiStep { depth: u32 },
}

/// Shape and budgets of one lookahead decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LookaheadSpec {
    pub variant: Variant,
    #[serde(default)]
    pub fortified: bool,
    /// Multistep only: how many resulting positions per layer are expanded
    /// a further move pair. The first layer is never pruned.
    #[serde(default = "default_prune_width")]
    pub prune_width: usize,
    /// Overrides the evaluator engine's configured budget when set.
    #[serde(default)]
    pub evaluator_budget: Option<Budget>,
    /// Overrides the nominal-opponent engine's configured budget when set.
    #[serde(default)]
    pub nominal_budget: Option<Budget>,
    /// Concurrent branch expansions per decision.
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_prune_width() -> usize {
    4
}

fn default_parallelism() -> usize {
    1
}

impl LookaheadSpec {
    pub fn half_step() -> LookaheadSpec {
        Self::with_variant(Variant::HalfStep)
    }

    pub fn one_step() -> LookaheadSpec {
        Self::with_variant(Variant::OneStep)
    }

    pub fn multi_step(depth: u32) -> LookaheadSpec {
        Self::with_variant(Variant::MultiStep { depth })
    }

    fn with_variant(variant: Variant) -> LookaheadSpec {
        LookaheadSpec {
            variant,
            fortified: false,
            prune_width: default_prune_width(),
            evaluator_budget: None,
            nominal_budget: None,
            parallelism: default_parallelism(),
        }
    }

    pub fn fortified(mut self) -> LookaheadSpec {
        self.fortified = true;
        self
    }

    pub fn parallel(mut self, workers: usize) -> LookaheadSpec {
        self.parallelism = workers;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Variant::MultiStep { depth } = self.variant {
            if depth < 2 {
                return Err("multi_step depth must be at least 2".into());
            }
        }
        if self.prune_width < 1 {
            return Err("prune_width must be at least 1".into());
        }
        if self.parallelism < 1 {
            return Err("parallelism must be at least 1".into());
        }
        for budget in [self.evaluator_budget, self.nominal_budget].into_iter().flatten() {
            if budget.amount() == 0 {
                return Err("budgets must be positive".into());
            }
        }
        Ok(())
    }
}

/// Best move plus score from searching one position — the μ and Q of an
/// engine, whichever role (evaluator or nominal opponent) it is playing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProbe<S: GameState> {
    pub best_move: S::Move,
    pub score: Score<S::Player>,
}

/// Anything that can search a trajectory's final position: an engine pool,
/// or an exact table-backed function in tests.
pub trait Searcher<S: GameState>: Sync {
    fn probe(
        &self,
        trajectory: &Trajectory<S>,
        budget: Option<Budget>,
    ) -> Result<SearchProbe<S>, EngineError>;
}

impl Searcher<game_core::chess::ChessState> for uci_client::EnginePool {
    fn probe(
        &self,
        trajectory: &Trajectory<game_core::chess::ChessState>,
        budget: Option<Budget>,
    ) -> Result<SearchProbe<game_core::chess::ChessState>, EngineError> {
        self.with_engine(|engine| {
            let result = engine.search(trajectory, budget)?;
            Ok(SearchProbe {
                best_move: result.best_move,
                score: result.score,
            })
        })
    }
}

/// Infallible searchers from plain functions (exact toy evaluators).
impl<S, F> Searcher<S> for F
where
    S: GameState,
    F: Fn(&Trajectory<S>) -> SearchProbe<S> + Sync,
{
    fn probe(
        &self,
        trajectory: &Trajectory<S>,
        _budget: Option<Budget>,
    ) -> Result<SearchProbe<S>, EngineError> {
        Ok(self(trajectory))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PolicyError {
    #[error("no legal moves at {key} — selection requires an ongoing position")]
    NoLegalMoves { key: String },
    #[error("engine failure while expanding branch {branch}: {source}")]
    Engine {
        branch: String,
        #[source]
        source: EngineError,
    },
}

/// One candidate move's place in the lookahead: the predicted reply, the
/// position it leads to, and how it scored. `children` holds the surviving
/// deeper expansion at multistep.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTrace<S: GameState> {
    pub candidate: S::Move,
    pub reply: Option<S::Move>,
    /// The nominal opponent's search score when it produced `reply`; also
    /// the pruning key at multistep.
    pub reply_score: Option<Score<S::Player>>,
    /// Key of the position this branch was scored at.
    pub state_key: String,
    /// Evaluator output before normalization; absent for branches decided
    /// by terminal positions and for pruned branches.
    pub raw_score: Option<Score<S::Player>>,
    /// Canonical score for the deciding player; present on every
    /// non-pruned branch (except a lone forced move, which skips engines).
    pub evaluation: Option<i64>,
    pub pruned: bool,
    pub chosen: bool,
    pub children: Vec<BranchTrace<S>>,
}

/// Outcome of the fortification comparison at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct FortifyRecord<S: GameState> {
    /// The evaluator engine's own move at the root position.
    pub base_move: S::Move,
    pub base_raw: Score<S::Player>,
    /// normalized Q(x, base_move).
    pub base_eval: i64,
    /// The lookahead's choice and its branch evaluation.
    pub lookahead_move: S::Move,
    pub lookahead_eval: i64,
    /// True when the base move outscored the lookahead strictly and was
    /// played instead.
    pub switched: bool,
}

/// A complete, explainable decision: the move, every branch considered,
/// and the fortification comparison when it ran.
#[derive(Debug, Clone)]
pub struct MoveDecision<S: GameState> {
    pub chosen: S::Move,
    pub player: S::Player,
    pub branches: Vec<BranchTrace<S>>,
    pub fortification: Option<FortifyRecord<S>>,
    pub engine_calls: u32,
    pub wall_time: Duration,
}

impl<S: GameState> MoveDecision<S> {
    pub fn chosen_branch(&self) -> &BranchTrace<S> {
        self.branches
            .iter()
            .find(|b| b.chosen)
            .expect("exactly one branch is chosen")
    }
}

// Wall time is run-dependent; decisions compare by what was decided.
impl<S: GameState> PartialEq for MoveDecision<S> {
    fn eq(&self, other: &Self) -> bool {
        self.chosen == other.chosen
            && self.player == other.player
            && self.branches == other.branches
            && self.fortification == other.fortification
            && self.engine_calls == other.engine_calls
    }
}

impl<S: GameState> fmt::Display for MoveDecision<S>
where
    S::Player: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "chosen {} (for {}, {} engine calls, {:?})",
            self.chosen, self.player, self.engine_calls, self.wall_time
        )?;
        for b in &self.branches {
            let marker = if b.chosen { ">" } else { " " };
            let reply = b
                .reply
                .as_ref()
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".into());
            let eval = b
                .evaluation
                .map(|e| e.to_string())
                .unwrap_or_else(|| "pruned".into());
            writeln!(f, " {marker} {:6} reply {:6} eval {}", b.candidate.to_string(), reply, eval)?;
        }
        if let Some(fort) = &self.fortification {
            writeln!(
                f,
                "  fortify: base {} at {} vs lookahead {} at {} -> {}",
                fort.base_move,
                fort.base_eval,
                fort.lookahead_move,
                fort.lookahead_eval,
                if fort.switched { "base" } else { "lookahead" }
            )?;
        }
        Ok(())
    }
}

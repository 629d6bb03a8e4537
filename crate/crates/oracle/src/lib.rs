//! Exact dynamic programming on small games.
//!
//! Everything here enumerates entire reachable state spaces, so it only
//! applies to toy games (tic-tac-toe in practice). It provides the ground
//! truth that the lookahead policy is tested against: game-theoretic
//! values, values under a fixed opponent, policy evaluation by playout,
//! and the exact one-step rollout of a base policy.

use std::collections::HashMap;
use std::io::{self, Write};

use game_core::{GameState, PlayerId, Status};

mod policies;
mod solve;

pub use policies::{FirstLegal, MinimaxPolicy, OnePlyGreedy, PolicyTable, SeededRandom};
pub use solve::{
    enumerate_reachable, exact_rollout_policy, policy_value, solve_fixed_opponent, solve_minimax,
    verify_bellman,
};

/// States explored beyond this bound abort the solve.
pub const STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OracleError {
    #[error("state space exceeds the {STATE_CAP}-state cap")]
    StateSpaceExceeded,
    #[error("closed-loop play does not terminate (cycle at {0})")]
    CycleDetected(String),
}

/// Game value from the owning player's perspective: +1 win, 0 draw,
/// -1 loss, together with the distance to the terminal position in plies.
/// Distance breaks ties toward fast wins and slow losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub value: i8,
    pub distance: u32,
}

impl Outcome {
    pub fn terminal<P: PlayerId>(status: &Status<P>, player: P) -> Outcome {
        let value = match status {
            Status::Win(w) if *w == player => 1,
            Status::Win(_) => -1,
            Status::Draw(_) => 0,
            Status::Ongoing => panic!("terminal outcome of an ongoing state"),
        };
        Outcome { value, distance: 0 }
    }

    fn after_plies(self, plies: u32) -> Outcome {
        Outcome {
            value: self.value,
            distance: self.distance + plies,
        }
    }

    /// Totally ordered desirability for the owning player: higher value
    /// first, then shorter wins, then longer losses.
    pub fn rank(&self) -> (i8, i64) {
        let tiebreak = match self.value {
            1 => -(self.distance as i64),
            -1 => self.distance as i64,
            _ => 0,
        };
        (self.value, tiebreak)
    }
}

/// A deterministic move choice for every state it may be asked about.
/// Implementations are only consulted on ongoing states.
pub trait MovePolicy<S: GameState> {
    fn choose(&self, state: &S) -> S::Move;
}

/// Exact values over a reachable state space, from a fixed player's
/// perspective.
#[derive(Debug, Clone)]
pub struct ValueTable<S: GameState> {
    player: S::Player,
    values: HashMap<S, Outcome>,
}

impl<S: GameState> ValueTable<S> {
    fn new(player: S::Player) -> Self {
        ValueTable {
            player,
            values: HashMap::new(),
        }
    }

    pub fn player(&self) -> S::Player {
        self.player
    }

    pub fn get(&self, state: &S) -> Option<Outcome> {
        self.values.get(state).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, &Outcome)> {
        self.values.iter()
    }

    /// Plain-text export, one `key<TAB>value<TAB>distance` line per state,
    /// sorted by key so the output is reproducible.
    pub fn export<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut rows: Vec<(String, Outcome)> =
            self.values.iter().map(|(s, o)| (s.key(), *o)).collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        for (key, outcome) in rows {
            writeln!(w, "{key}\t{}\t{}", outcome.value, outcome.distance)?;
        }
        Ok(())
    }
}

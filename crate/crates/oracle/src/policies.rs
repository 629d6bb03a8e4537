//! Deterministic policies used as opponents and as imperfect base policies.

use std::collections::HashMap;

use game_core::ttt::{Mark, TttState};
use game_core::GameState;

use crate::{solve::enumerate_reachable, MovePolicy, OracleError, Outcome};

/// Always the canonically first legal move. The simplest imperfect policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstLegal;

impl<S: GameState> MovePolicy<S> for FirstLegal {
    fn choose(&self, state: &S) -> S::Move {
        state
            .legal_moves()
            .into_iter()
            .next()
            .expect("policy consulted on an ongoing state")
    }
}

/// A fixed but arbitrary policy: the move index is drawn from an FNV-1a
/// hash of the state key and the seed, so the same seed always produces
/// the same policy.
#[derive(Debug, Clone, Copy)]
pub struct SeededRandom {
    pub seed: u64,
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        SeededRandom { seed }
    }
}

fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl<S: GameState> MovePolicy<S> for SeededRandom {
    fn choose(&self, state: &S) -> S::Move {
        let moves = state.legal_moves();
        assert!(!moves.is_empty(), "policy consulted on an ongoing state");
        let idx = fnv1a(state.key().as_bytes(), self.seed) as usize % moves.len();
        moves.into_iter().nth(idx).unwrap()
    }
}

/// An explicit state-to-move mapping.
#[derive(Debug, Clone)]
pub struct PolicyTable<S: GameState> {
    map: HashMap<S, S::Move>,
}

impl<S: GameState> PolicyTable<S> {
    pub(crate) fn new(map: HashMap<S, S::Move>) -> Self {
        PolicyTable { map }
    }

    pub fn get(&self, state: &S) -> Option<&S::Move> {
        self.map.get(state)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl<S: GameState> MovePolicy<S> for PolicyTable<S> {
    fn choose(&self, state: &S) -> S::Move {
        self.map
            .get(state)
            .unwrap_or_else(|| panic!("policy has no move for {}", state.key()))
            .clone()
    }
}

/// Optimal play for whichever side is to move, extracted from a full
/// minimax solve. Canonical move order breaks ties, so the policy is
/// deterministic.
#[derive(Debug, Clone)]
pub struct MinimaxPolicy<S: GameState> {
    map: HashMap<S, S::Move>,
}

impl<S: GameState> MinimaxPolicy<S> {
    pub fn solve(start: &S, reference: S::Player) -> Result<Self, OracleError> {
        let table = crate::solve_minimax(start, reference)?;
        let mut map = HashMap::new();
        for state in enumerate_reachable(start)? {
            if state.status().is_terminal() {
                continue;
            }
            let maximize = state.side_to_move() == reference;
            let mut best: Option<(Outcome, S::Move)> = None;
            for mv in state.legal_moves() {
                let child = state.apply(&mv).expect("generated move is legal");
                let v = table
                    .get(&child)
                    .expect("solve covers all reachable states")
                    .after_plies(1);
                let replace = match &best {
                    None => true,
                    Some((b, _)) => {
                        if maximize {
                            v.rank() > b.rank()
                        } else {
                            v.rank() < b.rank()
                        }
                    }
                };
                if replace {
                    best = Some((v, mv));
                }
            }
            map.insert(state.clone(), best.expect("ongoing state has moves").1);
        }
        Ok(MinimaxPolicy { map })
    }
}

impl<S: GameState> MovePolicy<S> for MinimaxPolicy<S> {
    fn choose(&self, state: &S) -> S::Move {
        self.map
            .get(state)
            .unwrap_or_else(|| panic!("policy has no move for {}", state.key()))
            .clone()
    }
}

/// One-ply greedy heuristic for tic-tac-toe: score each move's successor
/// by open-line counts and take the best. Sees immediate wins and blocks
/// but no forks, so it is reliably imperfect.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnePlyGreedy;

fn line_score(state: &TttState, me: Mark) -> i32 {
    let mut score = 0;
    for line in TttState::lines() {
        let mut mine = 0;
        let mut theirs = 0;
        for &cell in line {
            match state.cell(cell) {
                Some(m) if m == me => mine += 1,
                Some(_) => theirs += 1,
                None => {}
            }
        }
        score += match (mine, theirs) {
            (3, _) => 1000,
            (_, 3) => -1000,
            (2, 0) => 10,
            (0, 2) => -10,
            (1, 0) => 1,
            (0, 1) => -1,
            _ => 0,
        };
    }
    score
}

impl MovePolicy<TttState> for OnePlyGreedy {
    fn choose(&self, state: &TttState) -> <TttState as GameState>::Move {
        let me = state.side_to_move();
        let mut best: Option<(i32, <TttState as GameState>::Move)> = None;
        for mv in state.legal_moves() {
            let child = state.apply(&mv).expect("generated move is legal");
            let s = line_score(&child, me);
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, mv));
            }
        }
        best.expect("policy consulted on an ongoing state").1
    }
}

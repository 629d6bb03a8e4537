//! Rules engines for two-player alternating games.
//!
//! Two instances are provided: full chess ([`chess`]) with FEN exchange,
//! repetition tracking and perft, and tic-tac-toe ([`ttt`]) as a solvable
//! toy for exact verification. Everything is an immutable value; applying
//! a move yields a new state.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

pub mod chess;
pub mod ttt;

/// One of the two sides of an alternating game.
pub trait PlayerId: Copy + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    fn opponent(self) -> Self;
}

/// Why a finished game is a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DrawReason {
    Stalemate,
    ThreefoldRepetition,
    FiftyMoveRule,
    InsufficientMaterial,
    /// Ended by an external rule (e.g. a match ply cap), not by the game itself.
    Adjudicated,
}

impl fmt::Display for DrawReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DrawReason::Stalemate => "stalemate",
            DrawReason::ThreefoldRepetition => "threefold repetition",
            DrawReason::FiftyMoveRule => "fifty-move rule",
            DrawReason::InsufficientMaterial => "insufficient material",
            DrawReason::Adjudicated => "adjudicated",
        };
        f.write_str(s)
    }
}

/// Whether a position is live, won, or drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status<P> {
    Ongoing,
    Win(P),
    Draw(DrawReason),
}

impl<P> Status<P> {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, Status::Ongoing)
    }
}

/// A move that is not legal in the state it was applied to.
#[derive(Debug, Clone, thiserror::Error)]
#[error("illegal move {notation}")]
pub struct IllegalMoveError {
    pub notation: String,
}

impl IllegalMoveError {
    fn new(mv: &impl fmt::Display) -> Self {
        IllegalMoveError {
            notation: mv.to_string(),
        }
    }
}

/// An immutable position in an alternating two-player game.
///
/// `legal_moves` returns moves sorted ascending by their canonical text
/// form; every consumer that breaks ties does so by this order, which
/// makes all downstream argmax/argmin selections deterministic.
pub trait GameState: Clone + Eq + Hash + Send + Sync + 'static {
    type Move: Clone
        + Eq
        + Ord
        + Hash
        + fmt::Debug
        + fmt::Display
        + FromStr
        + Send
        + Sync
        + 'static;
    type Player: PlayerId;

    fn side_to_move(&self) -> Self::Player;

    /// Complete legal move set, sorted by canonical text ascending.
    /// Empty exactly when the game is over by lack of moves.
    fn legal_moves(&self) -> Vec<Self::Move>;

    /// Apply a legal move, returning the successor state. The input state
    /// is untouched.
    fn apply(&self, mv: &Self::Move) -> Result<Self, IllegalMoveError>;

    fn status(&self) -> Status<Self::Player>;

    /// Stable human-readable key for tables and trace logs (FEN for chess).
    fn key(&self) -> String;
}

/// A start state plus the moves played from it. This is the unit handed to
/// engines, so that engine-side repetition bookkeeping sees the same move
/// history the rules engine does — including hypothetical moves appended
/// during lookahead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory<S: GameState> {
    start: S,
    moves: Vec<S::Move>,
    current: S,
}

impl<S: GameState> Trajectory<S> {
    pub fn new(start: S) -> Self {
        Trajectory {
            current: start.clone(),
            start,
            moves: Vec::new(),
        }
    }

    pub fn start(&self) -> &S {
        &self.start
    }

    pub fn moves(&self) -> &[S::Move] {
        &self.moves
    }

    pub fn current(&self) -> &S {
        &self.current
    }

    pub fn plies(&self) -> usize {
        self.moves.len()
    }

    /// Play a move at the tip of the trajectory.
    pub fn push(&mut self, mv: S::Move) -> Result<(), IllegalMoveError> {
        self.current = self.current.apply(&mv)?;
        self.moves.push(mv);
        Ok(())
    }

    /// Copy of this trajectory with one more move played — the branch
    /// operation used by lookahead.
    pub fn extended(&self, mv: S::Move) -> Result<Self, IllegalMoveError> {
        let mut next = self.clone();
        next.push(mv)?;
        Ok(next)
    }
}

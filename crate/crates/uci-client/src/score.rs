//! Canonical engine evaluations and the one total order over them.

use std::fmt;

use game_core::PlayerId;

/// Normalized value of a forced win right now; engine-reported mates in n
/// rank n below it, so shorter mates always rank strictly higher. Far
/// above any centipawn magnitude engines emit.
pub const MATE_BASE: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreValue {
    Centipawns(i64),
    /// Distance to mate as the engine reports it (full moves); 0 encodes a
    /// position that is already won — the canonical terminal score.
    MateIn(u32),
}

/// An evaluation plus the side it is favorable-positive for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Score<P> {
    pub value: ScoreValue,
    pub perspective: P,
}

impl<P: PlayerId> Score<P> {
    pub fn centipawns(cp: i64, perspective: P) -> Score<P> {
        Score {
            value: ScoreValue::Centipawns(cp),
            perspective,
        }
    }

    pub fn mate_in(moves: u32, perspective: P) -> Score<P> {
        Score {
            value: ScoreValue::MateIn(moves),
            perspective,
        }
    }

    /// Canonical score of a decided position: maximal for the winner.
    pub fn terminal_win(winner: P) -> Score<P> {
        Score::mate_in(0, winner)
    }

    /// Canonical score of a drawn position: exactly zero.
    pub fn draw(perspective: P) -> Score<P> {
        Score::centipawns(0, perspective)
    }

    /// A `score cp x` / `score mate y` pair as reported by an engine,
    /// which speaks relative to the side to move of the searched position.
    /// Negative mate distances flip the perspective so magnitudes stay
    /// non-negative.
    pub fn from_uci(kind: &str, value: i64, side_to_move: P) -> Option<Score<P>> {
        match kind {
            "cp" => Some(Score::centipawns(value, side_to_move)),
            "mate" => {
                if value > 0 {
                    Some(Score::mate_in(value as u32, side_to_move))
                } else {
                    // mate 0 = the mover is already mated.
                    Some(Score::mate_in(value.unsigned_abs() as u32, side_to_move.opponent()))
                }
            }
            _ => None,
        }
    }

    /// The single point where perspective becomes a sign: centipawns keep
    /// their magnitude, a mate in n maps to MATE_BASE - n, and everything
    /// is negated when viewed by the other side. Defines a total order in
    /// which shorter mates for `for_player` rank strictly higher.
    pub fn normalized(&self, for_player: P) -> i64 {
        let magnitude = match self.value {
            ScoreValue::Centipawns(cp) => cp,
            ScoreValue::MateIn(n) => MATE_BASE - n as i64,
        };
        if self.perspective == for_player {
            magnitude
        } else {
            -magnitude
        }
    }
}

impl<P: fmt::Display> fmt::Display for Score<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            ScoreValue::Centipawns(cp) => write!(f, "cp {cp} ({})", self.perspective),
            ScoreValue::MateIn(n) => write!(f, "mate {n} ({})", self.perspective),
        }
    }
}

//! A deterministic, hermetic UCI engine: material evaluation plus
//! fixed-depth full-width alpha-beta over the rules engine. No hash
//! tables, no time management, no randomness — identical inputs always
//! produce identical outputs, which is what the integration tests and
//! deterministic-mode experiments need. Weakness is fine; it leaves room
//! for the lookahead layer to demonstrate improvement.

use serde::{Deserialize, Serialize};

mod eval;
mod search;
mod uci;

pub use eval::material_eval;
pub use search::{plain_negamax_value, search_fixed_depth, SearchOutput, WIN_SCORE};
pub use uci::{run_uci, spawn_in_process, InProcessStub};

/// Conventional centipawn piece values; kings are not counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceValues {
    pub pawn: i32,
    pub knight: i32,
    pub bishop: i32,
    pub rook: i32,
    pub queen: i32,
}

impl Default for PieceValues {
    fn default() -> Self {
        PieceValues {
            pawn: 100,
            knight: 300,
            bishop: 300,
            rook: 500,
            queen: 900,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StubParams {
    /// Search depth in plies; `go movetime`/`go nodes` map to this too,
    /// so budgets stay machine-independent. `go depth d` overrides.
    pub depth: u32,
    pub piece_values: PieceValues,
    /// Fault injection: reply with an illegal bestmove, for client tests.
    pub fault_illegal_bestmove: bool,
}

impl Default for StubParams {
    fn default() -> Self {
        StubParams {
            depth: 2,
            piece_values: PieceValues::default(),
            fault_illegal_bestmove: false,
        }
    }
}

impl StubParams {
    pub fn with_depth(depth: u32) -> Self {
        assert!(depth >= 1);
        StubParams {
            depth,
            ..Default::default()
        }
    }
}

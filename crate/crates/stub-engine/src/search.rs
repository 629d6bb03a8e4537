//! Fixed-depth negamax with alpha-beta. Full width — every legal move is
//! searched to exactly the requested depth, so the root value equals the
//! pure minimax value and ties resolve to the canonically first move.

use game_core::chess::{ChessMove, ChessState};
use game_core::GameState;

use crate::eval::material_eval;
use crate::PieceValues;

/// Internal mate score base, in plies: being mated at ply p scores
/// -(WIN_SCORE - p), so faster mates dominate.
pub const WIN_SCORE: i32 = 100_000;

const INF: i32 = i32::MAX - 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutput {
    /// None only when the searched position is already terminal.
    pub best_move: Option<ChessMove>,
    /// Side-to-move perspective, centipawns or mate-encoded.
    pub score: i32,
}

pub fn search_fixed_depth(state: &ChessState, depth: u32, values: &PieceValues) -> SearchOutput {
    assert!(depth >= 1, "search depth must be at least 1");
    let moves = state.legal_moves();
    if moves.is_empty() {
        return SearchOutput {
            best_move: None,
            score: if state.is_in_check() { -WIN_SCORE } else { 0 },
        };
    }
    if state.rule_draw().is_some() {
        return SearchOutput {
            best_move: Some(moves[0]),
            score: 0,
        };
    }
    let mut best: Option<(ChessMove, i32)> = None;
    let mut alpha = -INF;
    for mv in moves {
        let child = state.apply_unchecked(&mv);
        let v = -negamax(&child, depth - 1, 1, -INF, -alpha, values);
        if best.is_none() || v > best.as_ref().unwrap().1 {
            best = Some((mv, v));
            alpha = alpha.max(v);
        }
    }
    let (best_move, score) = best.unwrap();
    SearchOutput {
        best_move: Some(best_move),
        score,
    }
}

fn negamax(
    state: &ChessState,
    depth: u32,
    ply: i32,
    mut alpha: i32,
    beta: i32,
    values: &PieceValues,
) -> i32 {
    let moves = state.legal_moves();
    if moves.is_empty() {
        // The side to move is the one who got mated.
        return if state.is_in_check() {
            -(WIN_SCORE - ply)
        } else {
            0
        };
    }
    if state.rule_draw().is_some() {
        return 0;
    }
    if depth == 0 {
        return material_eval(state, values);
    }
    let mut best = -INF;
    for mv in moves {
        let child = state.apply_unchecked(&mv);
        let v = -negamax(&child, depth - 1, ply + 1, -beta, -alpha, values);
        if v > best {
            best = v;
            if v > alpha {
                alpha = v;
            }
        }
        if alpha >= beta {
            break;
        }
    }
    best
}

/// Exhaustive depth-limited value with no pruning at all; the reference
/// for the negamax identity tests.
pub fn plain_negamax_value(state: &ChessState, depth: u32, values: &PieceValues) -> i32 {
    plain(state, depth, 0, values)
}

fn plain(state: &ChessState, depth: u32, ply: i32, values: &PieceValues) -> i32 {
    let moves = state.legal_moves();
    if moves.is_empty() {
        return if state.is_in_check() {
            -(WIN_SCORE - ply)
        } else {
            0
        };
    }
    if state.rule_draw().is_some() {
        return 0;
    }
    if depth == 0 {
        return material_eval(state, values);
    }
    moves
        .iter()
        .map(|mv| -plain(&state.apply_unchecked(mv), depth - 1, ply + 1, values))
        .max()
        .unwrap()
}

use game_core::chess::{ChessState, PieceKind, Square};
use game_core::GameState;

use crate::PieceValues;

/// Material balance in centipawns from the side to move's perspective.
pub fn material_eval(state: &ChessState, values: &PieceValues) -> i32 {
    let us = state.side_to_move();
    let mut total = 0;
    for idx in 0..64 {
        let Some(piece) = state.piece_at(Square::from_index(idx)) else {
            continue;
        };
        let v = match piece.kind {
            PieceKind::Pawn => values.pawn,
            PieceKind::Knight => values.knight,
            PieceKind::Bishop => values.bishop,
            PieceKind::Rook => values.rook,
            PieceKind::Queen => values.queen,
            PieceKind::King => 0,
        };
        if piece.color == us {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

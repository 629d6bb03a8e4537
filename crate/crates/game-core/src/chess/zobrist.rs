//! Position hashing for repetition detection. Keys are built at compile
//! time from a fixed-seed splitmix64 stream, so they are identical across
//! builds and platforms.

use super::{ChessState, Color, Piece, PieceKind, Square};

const fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const fn fill<const N: usize>(salt: u64) -> [u64; N] {
    let mut out = [0u64; N];
    let mut i = 0;
    while i < N {
        out[i] = splitmix64(salt ^ splitmix64(i as u64 + 1));
        i += 1;
    }
    out
}

// 12 piece kinds (6 per color) on 64 squares, flattened.
const PIECE_KEYS: [u64; 12 * 64] = fill(0x5EED_0001);
const CASTLING_KEYS: [u64; 16] = fill(0x5EED_0002);
const EP_FILE_KEYS: [u64; 8] = fill(0x5EED_0003);
const BLACK_TO_MOVE: u64 = splitmix64(0x5EED_0004);

fn piece_key(piece: Piece, sq: Square) -> u64 {
    let slot = (piece.color.index() * 6 + piece.kind.index()) * 64 + sq.index();
    PIECE_KEYS[slot]
}

pub(super) fn key(state: &ChessState) -> u64 {
    let mut k = 0u64;
    for idx in 0..64 {
        if let Some(p) = state.board[idx] {
            k ^= piece_key(p, Square::from_index(idx));
        }
    }
    if state.side_to_move == Color::Black {
        k ^= BLACK_TO_MOVE;
    }
    k ^= CASTLING_KEYS[state.castling.bits() as usize];
    // The en-passant square distinguishes positions only when a capture is
    // actually available to the side to move (FIDE repetition rule).
    if let Some(ep) = state.en_passant {
        if ep_capture_possible(state, ep) {
            k ^= EP_FILE_KEYS[ep.file() as usize];
        }
    }
    k
}

fn ep_capture_possible(state: &ChessState, ep: Square) -> bool {
    let us = state.side_to_move;
    let back = match us {
        Color::White => -1,
        Color::Black => 1,
    };
    for df in [-1, 1] {
        if let Some(from) = ep.offset(df, back) {
            if state.board[from.index()]
                == Some(Piece {
                    color: us,
                    kind: PieceKind::Pawn,
                })
            {
                return true;
            }
        }
    }
    false
}

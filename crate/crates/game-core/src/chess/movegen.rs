//! Legal move generation: pseudo-legal generation plus a king-safety filter.

use super::{ChessMove, ChessState, Color, Piece, PieceKind, Square};
use crate::{GameState, PlayerId};

const KNIGHT_OFFSETS: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
const KING_OFFSETS: [(i8, i8); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];
const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, -1), (-1, 1)];
const ROOK_DIRS: [(i8, i8); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];

fn forward(color: Color) -> i8 {
    match color {
        Color::White => 1,
        Color::Black => -1,
    }
}

fn at(board: &[Option<Piece>; 64], sq: Square) -> Option<Piece> {
    board[sq.index()]
}

/// Is `sq` attacked by any piece of `by`?
pub(super) fn is_attacked(board: &[Option<Piece>; 64], sq: Square, by: Color) -> bool {
    // Pawns attack diagonally forward, so look one rank back from `sq`.
    for df in [-1, 1] {
        if let Some(from) = sq.offset(df, -forward(by)) {
            if at(board, from)
                == Some(Piece {
                    color: by,
                    kind: PieceKind::Pawn,
                })
            {
                return true;
            }
        }
    }
    for (df, dr) in KNIGHT_OFFSETS {
        if let Some(from) = sq.offset(df, dr) {
            if at(board, from)
                == Some(Piece {
                    color: by,
                    kind: PieceKind::Knight,
                })
            {
                return true;
            }
        }
    }
    for (df, dr) in KING_OFFSETS {
        if let Some(from) = sq.offset(df, dr) {
            if at(board, from)
                == Some(Piece {
                    color: by,
                    kind: PieceKind::King,
                })
            {
                return true;
            }
        }
    }
    let slider = |dirs: [(i8, i8); 4], kinds: [PieceKind; 2]| -> bool {
        for (df, dr) in dirs {
            let mut cur = sq;
            while let Some(next) = cur.offset(df, dr) {
                cur = next;
                match at(board, cur) {
                    None => continue,
                    Some(p) => {
                        if p.color == by && kinds.contains(&p.kind) {
                            return true;
                        }
                        break;
                    }
                }
            }
        }
        false
    };
    slider(BISHOP_DIRS, [PieceKind::Bishop, PieceKind::Queen])
        || slider(ROOK_DIRS, [PieceKind::Rook, PieceKind::Queen])
}

pub(super) fn in_check(board: &[Option<Piece>; 64], color: Color) -> bool {
    match ChessState::king_square(board, color) {
        Some(king) => is_attacked(board, king, color.opponent()),
        None => false,
    }
}

pub(super) fn legal_moves(state: &ChessState) -> Vec<ChessMove> {
    let us = state.side_to_move();
    let mut moves = pseudo_legal(state);
    moves.retain(|mv| {
        let child = state.make(mv, false);
        !in_check(&child.board, us)
    });
    moves.sort();
    moves
}

fn pseudo_legal(state: &ChessState) -> Vec<ChessMove> {
    let us = state.side_to_move();
    let board = &state.board;
    let mut out = Vec::with_capacity(48);

    for idx in 0..64 {
        let from = Square::from_index(idx);
        let Some(piece) = board[idx] else { continue };
        if piece.color != us {
            continue;
        }
        match piece.kind {
            PieceKind::Pawn => pawn_moves(state, from, us, &mut out),
            PieceKind::Knight => step_moves(board, from, us, &KNIGHT_OFFSETS, &mut out),
            PieceKind::King => {
                step_moves(board, from, us, &KING_OFFSETS, &mut out);
                castle_moves(state, from, us, &mut out);
            }
            PieceKind::Bishop => ray_moves(board, from, us, &BISHOP_DIRS, &mut out),
            PieceKind::Rook => ray_moves(board, from, us, &ROOK_DIRS, &mut out),
            PieceKind::Queen => {
                ray_moves(board, from, us, &BISHOP_DIRS, &mut out);
                ray_moves(board, from, us, &ROOK_DIRS, &mut out);
            }
        }
    }
    out
}

fn step_moves(
    board: &[Option<Piece>; 64],
    from: Square,
    us: Color,
    offsets: &[(i8, i8)],
    out: &mut Vec<ChessMove>,
) {
    for &(df, dr) in offsets {
        if let Some(to) = from.offset(df, dr) {
            if at(board, to).is_none_or(|p| p.color != us) {
                out.push(ChessMove::new(from, to));
            }
        }
    }
}

fn ray_moves(
    board: &[Option<Piece>; 64],
    from: Square,
    us: Color,
    dirs: &[(i8, i8)],
    out: &mut Vec<ChessMove>,
) {
    for &(df, dr) in dirs {
        let mut cur = from;
        while let Some(to) = cur.offset(df, dr) {
            cur = to;
            match at(board, to) {
                None => out.push(ChessMove::new(from, to)),
                Some(p) => {
                    if p.color != us {
                        out.push(ChessMove::new(from, to));
                    }
                    break;
                }
            }
        }
    }
}

fn push_pawn_move(from: Square, to: Square, promo_rank: u8, out: &mut Vec<ChessMove>) {
    if to.rank() == promo_rank {
        for kind in [
            PieceKind::Queen,
            PieceKind::Rook,
            PieceKind::Bishop,
            PieceKind::Knight,
        ] {
            out.push(ChessMove::promoting(from, to, kind));
        }
    } else {
        out.push(ChessMove::new(from, to));
    }
}

fn pawn_moves(state: &ChessState, from: Square, us: Color, out: &mut Vec<ChessMove>) {
    let board = &state.board;
    let fwd = forward(us);
    let (start_rank, promo_rank) = match us {
        Color::White => (1, 7),
        Color::Black => (6, 0),
    };

    if let Some(to) = from.offset(0, fwd) {
        if at(board, to).is_none() {
            push_pawn_move(from, to, promo_rank, out);
            if from.rank() == start_rank {
                let double = from.offset(0, 2 * fwd).expect("double push stays on board");
                if at(board, double).is_none() {
                    out.push(ChessMove::new(from, double));
                }
            }
        }
    }
    for df in [-1, 1] {
        let Some(to) = from.offset(df, fwd) else {
            continue;
        };
        match at(board, to) {
            Some(p) if p.color != us => push_pawn_move(from, to, promo_rank, out),
            None if state.en_passant == Some(to) => out.push(ChessMove::new(from, to)),
            _ => {}
        }
    }
}

fn castle_moves(state: &ChessState, from: Square, us: Color, out: &mut Vec<ChessMove>) {
    let board = &state.board;
    let rank = match us {
        Color::White => 0,
        Color::Black => 7,
    };
    if from != Square::new(4, rank) || in_check(board, us) {
        return;
    }
    let rook = Some(Piece {
        color: us,
        kind: PieceKind::Rook,
    });
    let them = us.opponent();

    if state.castling.kingside(us)
        && at(board, Square::new(7, rank)) == rook
        && [5, 6].iter().all(|&f| at(board, Square::new(f, rank)).is_none())
        && ![5, 6]
            .iter()
            .any(|&f| is_attacked(board, Square::new(f, rank), them))
    {
        out.push(ChessMove::new(from, Square::new(6, rank)));
    }
    if state.castling.queenside(us)
        && at(board, Square::new(0, rank)) == rook
        && [1, 2, 3]
            .iter()
            .all(|&f| at(board, Square::new(f, rank)).is_none())
        && ![2, 3]
            .iter()
            .any(|&f| is_attacked(board, Square::new(f, rank), them))
    {
        out.push(ChessMove::new(from, Square::new(2, rank)));
    }
}

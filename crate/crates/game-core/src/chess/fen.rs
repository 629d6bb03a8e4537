//! FEN parse/serialize, six-field grammar (halfmove/fullmove optional on input).

use super::{movegen, Castling, ChessState, Color, Piece, PieceKind, Square};
use crate::PlayerId;

#[derive(Debug, Clone, thiserror::Error)]
pub enum FenError {
    #[error("malformed FEN: {0}")]
    Malformed(String),
    #[error("illegal position: {0}")]
    IllegalPosition(String),
}

fn malformed(msg: impl Into<String>) -> FenError {
    FenError::Malformed(msg.into())
}

pub(super) fn parse(text: &str) -> Result<ChessState, FenError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if !(4..=6).contains(&fields.len()) {
        return Err(malformed(format!(
            "expected 4-6 fields, got {}",
            fields.len()
        )));
    }

    let mut board = [None; 64];
    let ranks: Vec<&str> = fields[0].split('/').collect();
    if ranks.len() != 8 {
        return Err(malformed("placement must have 8 ranks"));
    }
    for (i, rank_text) in ranks.iter().enumerate() {
        let rank = 7 - i as u8;
        let mut file = 0u8;
        for c in rank_text.chars() {
            if let Some(skip) = c.to_digit(10) {
                if !(1..=8).contains(&skip) {
                    return Err(malformed(format!("bad skip digit {c:?}")));
                }
                file += skip as u8;
            } else {
                let kind = PieceKind::from_letter(c)
                    .ok_or_else(|| malformed(format!("bad piece letter {c:?}")))?;
                let color = if c.is_ascii_uppercase() {
                    Color::White
                } else {
                    Color::Black
                };
                if file >= 8 {
                    return Err(malformed(format!("rank {} overflows", rank + 1)));
                }
                board[Square::new(file, rank).index()] = Some(Piece { color, kind });
                file += 1;
            }
        }
        if file != 8 {
            return Err(malformed(format!("rank {} does not sum to 8", rank + 1)));
        }
    }

    let side_to_move = match fields[1] {
        "w" => Color::White,
        "b" => Color::Black,
        other => return Err(malformed(format!("bad side to move {other:?}"))),
    };

    let mut castling = Castling::none();
    if fields[2] != "-" {
        let mut bits = 0u8;
        for c in fields[2].chars() {
            let bit = match c {
                'K' => Castling::WHITE_KING,
                'Q' => Castling::WHITE_QUEEN,
                'k' => Castling::BLACK_KING,
                'q' => Castling::BLACK_QUEEN,
                _ => return Err(malformed(format!("bad castling flag {c:?}"))),
            };
            if bits & bit != 0 {
                return Err(malformed(format!("duplicate castling flag {c:?}")));
            }
            bits |= bit;
        }
        castling = Castling(bits);
    }

    let en_passant = match fields[3] {
        "-" => None,
        sq => {
            let sq: Square = sq
                .parse()
                .map_err(|_| malformed(format!("bad en passant square {sq:?}")))?;
            let want_rank = match side_to_move {
                Color::White => 5,
                Color::Black => 2,
            };
            if sq.rank() != want_rank {
                return Err(FenError::IllegalPosition(format!(
                    "en passant target {sq} on the wrong rank"
                )));
            }
            Some(sq)
        }
    };

    let halfmove_clock = match fields.get(4) {
        None => 0,
        Some(s) => s
            .parse()
            .map_err(|_| malformed(format!("bad halfmove clock {s:?}")))?,
    };
    let fullmove_number = match fields.get(5) {
        None => 1,
        Some(s) => match s.parse() {
            Ok(n) if n >= 1 => n,
            _ => return Err(malformed(format!("bad fullmove number {s:?}"))),
        },
    };

    // Semantic checks: exactly one king per side, no pawns on the back
    // ranks, and the side not to move may not be in check.
    for color in [Color::White, Color::Black] {
        let kings = board
            .iter()
            .filter(|p| {
                **p == Some(Piece {
                    color,
                    kind: PieceKind::King,
                })
            })
            .count();
        if kings != 1 {
            return Err(FenError::IllegalPosition(format!(
                "{color} has {kings} kings"
            )));
        }
    }
    for idx in (0..8).chain(56..64) {
        if matches!(
            board[idx],
            Some(Piece {
                kind: PieceKind::Pawn,
                ..
            })
        ) {
            return Err(FenError::IllegalPosition(format!(
                "pawn on back rank at {}",
                Square::from_index(idx)
            )));
        }
    }
    if movegen::in_check(&board, side_to_move.opponent()) {
        return Err(FenError::IllegalPosition(
            "side not to move is in check".into(),
        ));
    }

    let mut state = ChessState {
        board,
        side_to_move,
        castling,
        en_passant,
        halfmove_clock,
        fullmove_number,
        history: Vec::new(),
    };
    state.history.push(state.position_key());
    Ok(state)
}

pub(super) fn serialize(state: &ChessState) -> String {
    let mut out = String::with_capacity(90);
    for rank in (0..8).rev() {
        let mut empty = 0;
        for file in 0..8 {
            match state.board[Square::new(file, rank).index()] {
                None => empty += 1,
                Some(p) => {
                    if empty > 0 {
                        out.push(char::from_digit(empty, 10).unwrap());
                        empty = 0;
                    }
                    out.push(p.fen_char());
                }
            }
        }
        if empty > 0 {
            out.push(char::from_digit(empty, 10).unwrap());
        }
        if rank > 0 {
            out.push('/');
        }
    }

    out.push(' ');
    out.push(match state.side_to_move {
        Color::White => 'w',
        Color::Black => 'b',
    });

    out.push(' ');
    if state.castling.bits() == 0 {
        out.push('-');
    } else {
        for (bit, c) in [
            (Castling::WHITE_KING, 'K'),
            (Castling::WHITE_QUEEN, 'Q'),
            (Castling::BLACK_KING, 'k'),
            (Castling::BLACK_QUEEN, 'q'),
        ] {
            if state.castling.bits() & bit != 0 {
                out.push(c);
            }
        }
    }

    out.push(' ');
    match state.en_passant {
        None => out.push('-'),
        Some(sq) => out.push_str(&sq.to_string()),
    }

    out.push_str(&format!(
        " {} {}",
        state.halfmove_clock, state.fullmove_number
    ));
    out
}

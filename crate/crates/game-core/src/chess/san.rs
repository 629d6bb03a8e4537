//! Standard algebraic notation, as needed for PGN export and re-import.
//! Parsing works by matching against the SAN of each legal move, so it
//! accepts exactly what generation produces (check marks optional).

use super::{ChessMove, ChessState, GameState, PieceKind, Square};

#[derive(Debug, Clone, thiserror::Error)]
pub enum SanError {
    #[error("move {0} is not legal here")]
    IllegalMove(ChessMove),
    #[error("no legal move matches SAN {0:?}")]
    NoMatch(String),
}

/// SAN for a legal move, with `+`/`#` suffix.
pub fn san(state: &ChessState, mv: &ChessMove) -> Result<String, SanError> {
    let legal = state.legal_moves();
    if !legal.contains(mv) {
        return Err(SanError::IllegalMove(*mv));
    }
    let piece = state.piece_at(mv.from).expect("legal move has an origin");
    let mut out = String::new();

    let is_castle =
        piece.kind == PieceKind::King && (mv.to.file() as i8 - mv.from.file() as i8).abs() == 2;
    if is_castle {
        out.push_str(if mv.to.file() > mv.from.file() {
            "O-O"
        } else {
            "O-O-O"
        });
    } else {
        let is_capture =
            state.piece_at(mv.to).is_some() || (piece.kind == PieceKind::Pawn && mv.to.file() != mv.from.file());
        if piece.kind == PieceKind::Pawn {
            if is_capture {
                out.push((b'a' + mv.from.file()) as char);
            }
        } else {
            out.push(piece.kind.letter().to_ascii_uppercase());
            out.push_str(&disambiguation(&legal, state, mv));
        }
        if is_capture {
            out.push('x');
        }
        out.push_str(&mv.to.to_string());
        if let Some(p) = mv.promotion {
            out.push('=');
            out.push(p.letter().to_ascii_uppercase());
        }
    }

    let child = state.apply_unchecked(mv);
    if child.is_in_check() {
        out.push(if child.legal_moves().is_empty() {
            '#'
        } else {
            '+'
        });
    }
    Ok(out)
}

fn disambiguation(legal: &[ChessMove], state: &ChessState, mv: &ChessMove) -> String {
    let kind = state.piece_at(mv.from).unwrap().kind;
    let rivals: Vec<Square> = legal
        .iter()
        .filter(|m| {
            m.to == mv.to
                && m.from != mv.from
                && state.piece_at(m.from).map(|p| p.kind) == Some(kind)
        })
        .map(|m| m.from)
        .collect();
    if rivals.is_empty() {
        return String::new();
    }
    let file_char = (b'a' + mv.from.file()) as char;
    let rank_char = (b'1' + mv.from.rank()) as char;
    if !rivals.iter().any(|s| s.file() == mv.from.file()) {
        file_char.to_string()
    } else if !rivals.iter().any(|s| s.rank() == mv.from.rank()) {
        rank_char.to_string()
    } else {
        format!("{file_char}{rank_char}")
    }
}

/// Inverse of [`san`]: find the unique legal move whose SAN matches.
pub fn parse_san(state: &ChessState, text: &str) -> Result<ChessMove, SanError> {
    let wanted = text.trim_end_matches(['+', '#', '!', '?']);
    for mv in state.legal_moves() {
        let s = san(state, &mv).expect("generated move is legal");
        if s.trim_end_matches(['+', '#']) == wanted {
            return Ok(mv);
        }
    }
    Err(SanError::NoMatch(text.to_string()))
}

//! Full chess rules: board state, legal move generation, FEN, SAN, perft.

use std::fmt;
use std::str::FromStr;

use crate::{DrawReason, GameState, IllegalMoveError, PlayerId, Status};

mod fen;
mod movegen;
mod san;
mod zobrist;

pub use fen::FenError;
pub use san::{parse_san, san, SanError};

pub const START_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub const fn index(self) -> usize {
        match self {
            Color::White => 0,
            Color::Black => 1,
        }
    }
}

impl PlayerId for Color {
    fn opponent(self) -> Self {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub const fn index(self) -> usize {
        match self {
            PieceKind::Pawn => 0,
            PieceKind::Knight => 1,
            PieceKind::Bishop => 2,
            PieceKind::Rook => 3,
            PieceKind::Queen => 4,
            PieceKind::King => 5,
        }
    }

    fn letter(self) -> char {
        match self {
            PieceKind::Pawn => 'p',
            PieceKind::Knight => 'n',
            PieceKind::Bishop => 'b',
            PieceKind::Rook => 'r',
            PieceKind::Queen => 'q',
            PieceKind::King => 'k',
        }
    }

    fn from_letter(c: char) -> Option<PieceKind> {
        Some(match c.to_ascii_lowercase() {
            'p' => PieceKind::Pawn,
            'n' => PieceKind::Knight,
            'b' => PieceKind::Bishop,
            'r' => PieceKind::Rook,
            'q' => PieceKind::Queen,
            'k' => PieceKind::King,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Piece {
    pub color: Color,
    pub kind: PieceKind,
}

impl Piece {
    fn fen_char(self) -> char {
        let c = self.kind.letter();
        match self.color {
            Color::White => c.to_ascii_uppercase(),
            Color::Black => c,
        }
    }
}

/// Board square, index 0..64 with a1 = 0, h1 = 7, a8 = 56.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Square(u8);

impl Square {
    pub fn new(file: u8, rank: u8) -> Square {
        debug_assert!(file < 8 && rank < 8);
        Square(rank * 8 + file)
    }

    pub fn from_index(idx: usize) -> Square {
        debug_assert!(idx < 64);
        Square(idx as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn file(self) -> u8 {
        self.0 % 8
    }

    pub fn rank(self) -> u8 {
        self.0 / 8
    }

    /// Square shifted by (file, rank) deltas, None if off-board.
    fn offset(self, df: i8, dr: i8) -> Option<Square> {
        let f = self.file() as i8 + df;
        let r = self.rank() as i8 + dr;
        if (0..8).contains(&f) && (0..8).contains(&r) {
            Some(Square::new(f as u8, r as u8))
        } else {
            None
        }
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            (b'a' + self.file()) as char,
            (b'1' + self.rank()) as char
        )
    }
}

impl FromStr for Square {
    type Err = MoveParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 2 {
            return Err(MoveParseError(s.to_string()));
        }
        let file = bytes[0].wrapping_sub(b'a');
        let rank = bytes[1].wrapping_sub(b'1');
        if file < 8 && rank < 8 {
            Ok(Square::new(file, rank))
        } else {
            Err(MoveParseError(s.to_string()))
        }
    }
}

/// Castling rights as four flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Castling(u8);

impl Castling {
    const WHITE_KING: u8 = 1;
    const WHITE_QUEEN: u8 = 2;
    const BLACK_KING: u8 = 4;
    const BLACK_QUEEN: u8 = 8;

    pub fn none() -> Castling {
        Castling(0)
    }

    pub fn all() -> Castling {
        Castling(0b1111)
    }

    fn kingside(self, color: Color) -> bool {
        match color {
            Color::White => self.0 & Self::WHITE_KING != 0,
            Color::Black => self.0 & Self::BLACK_KING != 0,
        }
    }

    fn queenside(self, color: Color) -> bool {
        match color {
            Color::White => self.0 & Self::WHITE_QUEEN != 0,
            Color::Black => self.0 & Self::BLACK_QUEEN != 0,
        }
    }

    fn clear(&mut self, mask: u8) {
        self.0 &= !mask;
    }

    fn bits(self) -> u8 {
        self.0
    }
}

/// A chess move in coordinate form: origin, destination, optional promotion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChessMove {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
}

impl ChessMove {
    pub fn new(from: Square, to: Square) -> ChessMove {
        ChessMove {
            from,
            to,
            promotion: None,
        }
    }

    pub fn promoting(from: Square, to: Square, kind: PieceKind) -> ChessMove {
        ChessMove {
            from,
            to,
            promotion: Some(kind),
        }
    }

    /// Key whose derived ordering equals lexicographic order of the
    /// canonical text form — the global tie-break order.
    fn text_key(&self) -> (u8, u8, u8, u8, u8) {
        (
            self.from.file(),
            self.from.rank(),
            self.to.file(),
            self.to.rank(),
            self.promotion.map_or(0, |p| p.letter() as u8),
        )
    }
}

impl Ord for ChessMove {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.text_key().cmp(&other.text_key())
    }
}

impl PartialOrd for ChessMove {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ChessMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.from, self.to)?;
        if let Some(p) = self.promotion {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("unparseable move text {0:?}")]
pub struct MoveParseError(pub String);

impl FromStr for ChessMove {
    type Err = MoveParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 4 && s.len() != 5 {
            return Err(MoveParseError(s.to_string()));
        }
        let from: Square = s[0..2].parse().map_err(|_| MoveParseError(s.to_string()))?;
        let to: Square = s[2..4].parse().map_err(|_| MoveParseError(s.to_string()))?;
        let promotion = match s.as_bytes().get(4) {
            None => None,
            Some(&c) => match PieceKind::from_letter(c as char) {
                Some(k @ (PieceKind::Queen | PieceKind::Rook | PieceKind::Bishop | PieceKind::Knight))
                    if (c as char).is_ascii_lowercase() =>
                {
                    Some(k)
                }
                _ => return Err(MoveParseError(s.to_string())),
            },
        };
        Ok(ChessMove {
            from,
            to,
            promotion,
        })
    }
}

/// A full chess position: placement, rights, clocks, and the position keys
/// seen since the last irreversible move (for repetition detection — FEN
/// cannot carry this, which is why trajectories are exchanged as
/// start-plus-move-list).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChessState {
    board: [Option<Piece>; 64],
    side_to_move: Color,
    castling: Castling,
    en_passant: Option<Square>,
    halfmove_clock: u32,
    fullmove_number: u32,
    history: Vec<u64>,
}

impl ChessState {
    /// The standard initial position.
    pub fn initial() -> ChessState {
        Self::from_fen(START_FEN).expect("start FEN is valid")
    }

    pub fn from_fen(text: &str) -> Result<ChessState, FenError> {
        fen::parse(text)
    }

    pub fn to_fen(&self) -> String {
        fen::serialize(self)
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    pub fn en_passant_target(&self) -> Option<Square> {
        self.en_passant
    }

    /// Zobrist key of the current placement/rights/side (not the history).
    pub fn position_key(&self) -> u64 {
        zobrist::key(self)
    }

    pub fn is_in_check(&self) -> bool {
        movegen::in_check(&self.board, self.side_to_move)
    }

    fn king_square(board: &[Option<Piece>; 64], color: Color) -> Option<Square> {
        board.iter().position(|p| {
            *p == Some(Piece {
                color,
                kind: PieceKind::King,
            })
        })
        .map(Square::from_index)
    }

    /// Successor state without the legality membership check. The move must
    /// come from `legal_moves`; feeding anything else corrupts the state.
    pub fn apply_unchecked(&self, mv: &ChessMove) -> ChessState {
        self.make(mv, true)
    }

    fn make(&self, mv: &ChessMove, track_history: bool) -> ChessState {
        let mut board = self.board;
        let piece = board[mv.from.index()].expect("move origin is occupied");
        let mut en_passant = None;
        let captured = board[mv.to.index()];
        let mut irreversible = captured.is_some() || piece.kind == PieceKind::Pawn;

        board[mv.from.index()] = None;
        board[mv.to.index()] = Some(match mv.promotion {
            Some(kind) => Piece {
                color: piece.color,
                kind,
            },
            None => piece,
        });

        match piece.kind {
            PieceKind::Pawn => {
                // Double push opens an en-passant target on the skipped square.
                let dr = mv.to.rank() as i8 - mv.from.rank() as i8;
                if dr.abs() == 2 {
                    en_passant = mv.from.offset(0, dr / 2);
                }
                // En-passant capture removes the pawn behind the target.
                if Some(mv.to) == self.en_passant && captured.is_none()
                    && mv.from.file() != mv.to.file()
                {
                    let victim = Square::new(mv.to.file(), mv.from.rank());
                    board[victim.index()] = None;
                    irreversible = true;
                }
            }
            PieceKind::King => {
                // Castling: move the rook as well.
                let df = mv.to.file() as i8 - mv.from.file() as i8;
                if df.abs() == 2 {
                    let rank = mv.from.rank();
                    let (rook_from, rook_to) = if df > 0 {
                        (Square::new(7, rank), Square::new(5, rank))
                    } else {
                        (Square::new(0, rank), Square::new(3, rank))
                    };
                    board[rook_to.index()] = board[rook_from.index()];
                    board[rook_from.index()] = None;
                }
            }
            _ => {}
        }

        let mut castling = self.castling;
        for sq in [mv.from, mv.to] {
            match sq.index() {
                0 => castling.clear(Castling::WHITE_QUEEN),
                7 => castling.clear(Castling::WHITE_KING),
                56 => castling.clear(Castling::BLACK_QUEEN),
                63 => castling.clear(Castling::BLACK_KING),
                4 => castling.clear(Castling::WHITE_KING | Castling::WHITE_QUEEN),
                60 => castling.clear(Castling::BLACK_KING | Castling::BLACK_QUEEN),
                _ => {}
            }
        }

        let mut next = ChessState {
            board,
            side_to_move: self.side_to_move.opponent(),
            castling,
            en_passant,
            halfmove_clock: if irreversible {
                0
            } else {
                self.halfmove_clock + 1
            },
            fullmove_number: self.fullmove_number
                + if self.side_to_move == Color::Black { 1 } else { 0 },
            history: Vec::new(),
        };
        if track_history {
            if !irreversible {
                next.history = self.history.clone();
            }
            next.history.push(next.position_key());
        }
        next
    }

    fn repetition_count(&self) -> usize {
        let current = *self.history.last().expect("history holds current key");
        self.history.iter().filter(|&&k| k == current).count()
    }

    /// Draw by rule regardless of available moves: fifty-move clock,
    /// threefold repetition, or insufficient material. Lets search loops
    /// that already generated the move list skip a second generation.
    pub fn rule_draw(&self) -> Option<DrawReason> {
        if self.halfmove_clock >= 100 {
            return Some(DrawReason::FiftyMoveRule);
        }
        if self.repetition_count() >= 3 {
            return Some(DrawReason::ThreefoldRepetition);
        }
        if self.insufficient_material() {
            return Some(DrawReason::InsufficientMaterial);
        }
        None
    }

    fn insufficient_material(&self) -> bool {
        let mut minors = Vec::new();
        for (idx, p) in self.board.iter().enumerate() {
            let Some(p) = p else { continue };
            match p.kind {
                PieceKind::King => {}
                PieceKind::Bishop | PieceKind::Knight => {
                    minors.push((p, Square::from_index(idx)))
                }
                _ => return false,
            }
        }
        match minors.as_slice() {
            [] | [_] => true,
            [(a, sa), (b, sb)] => {
                // Two bishops, one per side, on same-colored squares.
                a.kind == PieceKind::Bishop
                    && b.kind == PieceKind::Bishop
                    && a.color != b.color
                    && (sa.file() + sa.rank()) % 2 == (sb.file() + sb.rank()) % 2
            }
            _ => false,
        }
    }
}

impl GameState for ChessState {
    type Move = ChessMove;
    type Player = Color;

    fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    fn legal_moves(&self) -> Vec<ChessMove> {
        movegen::legal_moves(self)
    }

    fn apply(&self, mv: &ChessMove) -> Result<ChessState, IllegalMoveError> {
        if self.legal_moves().contains(mv) {
            Ok(self.make(mv, true))
        } else {
            Err(IllegalMoveError::new(mv))
        }
    }

    fn status(&self) -> Status<Color> {
        if self.legal_moves().is_empty() {
            return if self.is_in_check() {
                Status::Win(self.side_to_move.opponent())
            } else {
                Status::Draw(DrawReason::Stalemate)
            };
        }
        match self.rule_draw() {
            Some(reason) => Status::Draw(reason),
            None => Status::Ongoing,
        }
    }

    fn key(&self) -> String {
        self.to_fen()
    }
}

/// Leaf count of the legal move tree at exactly `depth` plies.
pub fn perft(state: &ChessState, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = state.legal_moves();
    if depth == 1 {
        return moves.len() as u64;
    }
    moves
        .iter()
        .map(|mv| perft(&state.make(mv, false), depth - 1))
        .sum()
}

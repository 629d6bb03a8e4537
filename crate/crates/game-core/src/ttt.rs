//! Tic-tac-toe: small enough to solve exactly, which makes it the ground
//! truth for verifying the lookahead machinery.

use std::fmt;
use std::str::FromStr;

use crate::{DrawReason, GameState, IllegalMoveError, PlayerId, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    X,
    O,
}

impl PlayerId for Mark {
    fn opponent(self) -> Self {
        match self {
            Mark::X => Mark::O,
            Mark::O => Mark::X,
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::X => "X",
            Mark::O => "O",
        })
    }
}

/// A cell, written like a chess square: files a-c, ranks 1-3. Cell index is
/// file-major so that the derived order equals text order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TttMove(u8);

impl TttMove {
    pub fn new(cell: u8) -> TttMove {
        assert!(cell < 9);
        TttMove(cell)
    }

    pub fn cell(self) -> usize {
        self.0 as usize
    }

    fn file(self) -> u8 {
        self.0 / 3
    }

    fn rank(self) -> u8 {
        self.0 % 3
    }
}

impl fmt::Display for TttMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            (b'a' + self.file()) as char,
            (b'1' + self.rank()) as char
        )
    }
}

impl FromStr for TttMove {
    type Err = IllegalMoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() == 2 {
            let file = bytes[0].wrapping_sub(b'a');
            let rank = bytes[1].wrapping_sub(b'1');
            if file < 3 && rank < 3 {
                return Ok(TttMove(file * 3 + rank));
            }
        }
        Err(IllegalMoveError {
            notation: s.to_string(),
        })
    }
}

const LINES: [[usize; 3]; 8] = [
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 4, 8],
    [2, 4, 6],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TttState {
    cells: [Option<Mark>; 9],
    to_move: Mark,
}

impl TttState {
    /// Empty board, X to move.
    pub fn initial() -> TttState {
        TttState {
            cells: [None; 9],
            to_move: Mark::X,
        }
    }

    /// Arbitrary position, for solvers and tests. No reachability check.
    pub fn from_cells(cells: [Option<Mark>; 9], to_move: Mark) -> TttState {
        TttState { cells, to_move }
    }

    pub fn cell(&self, idx: usize) -> Option<Mark> {
        self.cells[idx]
    }

    /// All eight winning lines, as cell-index triples.
    pub fn lines() -> &'static [[usize; 3]; 8] {
        &LINES
    }

    fn winner(&self) -> Option<Mark> {
        for line in LINES {
            if let Some(m) = self.cells[line[0]] {
                if self.cells[line[1]] == Some(m) && self.cells[line[2]] == Some(m) {
                    return Some(m);
                }
            }
        }
        None
    }
}

impl GameState for TttState {
    type Move = TttMove;
    type Player = Mark;

    fn side_to_move(&self) -> Mark {
        self.to_move
    }

    fn legal_moves(&self) -> Vec<TttMove> {
        if self.winner().is_some() {
            return Vec::new();
        }
        (0..9)
            .filter(|&i| self.cells[i as usize].is_none())
            .map(TttMove)
            .collect()
    }

    fn apply(&self, mv: &TttMove) -> Result<TttState, IllegalMoveError> {
        if self.winner().is_some() || self.cells[mv.cell()].is_some() {
            return Err(IllegalMoveError {
                notation: mv.to_string(),
            });
        }
        let mut next = *self;
        next.cells[mv.cell()] = Some(self.to_move);
        next.to_move = self.to_move.opponent();
        Ok(next)
    }

    fn status(&self) -> Status<Mark> {
        if let Some(winner) = self.winner() {
            return Status::Win(winner);
        }
        if self.cells.iter().all(|c| c.is_some()) {
            return Status::Draw(DrawReason::Stalemate);
        }
        Status::Ongoing
    }

    fn key(&self) -> String {
        let mut out = String::with_capacity(11);
        for c in &self.cells {
            out.push(match c {
                Some(m) => match m {
                    Mark::X => 'X',
                    Mark::O => 'O',
                },
                None => '.',
            });
        }
        out.push(' ');
        out.push_str(&self.to_move.to_string());
        out
    }
}

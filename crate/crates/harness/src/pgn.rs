//! PGN export: Seven Tag Roster, SAN movetext, importable by standard
//! tools. Dates are intentionally `????.??.??` so exports are byte-stable.

use std::io::{self, Write};

use game_core::chess::{san, ChessMove, ChessState, Color, START_FEN};
use game_core::GameState;

use crate::game::GameRecord;

pub fn export_pgn(records: &[GameRecord], w: &mut impl Write) -> io::Result<()> {
    for (i, record) in records.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        export_one(record, w)?;
    }
    Ok(())
}

fn tag(w: &mut impl Write, name: &str, value: &str) -> io::Result<()> {
    writeln!(w, "[{name} \"{}\"]", value.replace('"', "'"))
}

fn export_one(record: &GameRecord, w: &mut impl Write) -> io::Result<()> {
    tag(w, "Event", "metachess match")?;
    tag(w, "Site", "local")?;
    tag(w, "Date", "????.??.??")?;
    tag(w, "Round", &(record.index + 1).to_string())?;
    tag(w, "White", &record.white)?;
    tag(w, "Black", &record.black)?;
    tag(w, "Result", record.result.pgn_token())?;
    if record.start_fen != START_FEN {
        tag(w, "SetUp", "1")?;
        tag(w, "FEN", &record.start_fen)?;
    }
    tag(w, "Termination", &record.termination)?;
    writeln!(w)?;

    let movetext = movetext(record).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    for line in wrap(&movetext, 80) {
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn movetext(record: &GameRecord) -> Result<String, String> {
    let mut state = ChessState::from_fen(&record.start_fen).map_err(|e| e.to_string())?;
    let mut tokens: Vec<String> = Vec::new();

    // A game starting with black to move opens with an ellipsis number.
    if state.side_to_move() == Color::Black && !record.moves.is_empty() {
        tokens.push(format!("{}...", state.fullmove_number()));
    }
    for text in &record.moves {
        let mv: ChessMove = text.parse().map_err(|_| format!("bad move {text:?}"))?;
        if state.side_to_move() == Color::White {
            tokens.push(format!("{}.", state.fullmove_number()));
        }
        tokens.push(san(&state, &mv).map_err(|e| e.to_string())?);
        state = state.apply(&mv).map_err(|e| e.to_string())?;
    }
    tokens.push(record.result.pgn_token().to_string());
    Ok(tokens.join(" "))
}

fn wrap(text: &str, width: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut current = String::new();
    for word in text.split(' ') {
        if current.is_empty() {
            current = word.to_string();
        } else if current.len() + 1 + word.len() <= width {
            current.push(' ');
            current.push_str(word);
        } else {
            lines.push(std::mem::take(&mut current));
            current = word.to_string();
        }
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

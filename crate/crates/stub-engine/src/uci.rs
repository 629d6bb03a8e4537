//! The UCI session loop, usable over any line transport: OS pipes for the
//! standalone binary, in-memory channels for in-process embedding.

use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use game_core::chess::{ChessMove, ChessState};
use game_core::GameState;

use crate::search::{search_fixed_depth, WIN_SCORE};
use crate::StubParams;

const ENGINE_NAME: &str = "stub-engine";
const ENGINE_AUTHOR: &str = "metachess";
const MATE_THRESHOLD: i32 = WIN_SCORE - 1000;

/// Run one UCI session: consume command lines, emit reply lines. Returns
/// when `quit` arrives or the input ends.
pub fn run_uci<I, O>(lines: I, emit: &mut O, params: StubParams)
where
    I: IntoIterator<Item = String>,
    O: FnMut(&str),
{
    let mut params = params;
    let mut position = ChessState::initial();

    for line in lines {
        let line = line.trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("uci") => {
                emit(&format!("id name {ENGINE_NAME}"));
                emit(&format!("id author {ENGINE_AUTHOR}"));
                emit("option name Hash type spin default 1 min 1 max 128");
                emit("option name Threads type spin default 1 min 1 max 1");
                emit("option name Depth type spin default 2 min 1 max 6");
                emit("option name FaultIllegalBestmove type check default false");
                emit("uciok");
            }
            Some("isready") => emit("readyok"),
            Some("ucinewgame") => position = ChessState::initial(),
            Some("setoption") => apply_option(line, &mut params),
            Some("position") => match parse_position(line) {
                Ok(state) => position = state,
                Err(msg) => emit(&format!("info string error: {msg}")),
            },
            Some("go") => {
                let depth = go_depth(line, params.depth);
                emit_search(&position, depth, &params, emit);
            }
            Some("quit") => break,
            // Unknown commands are ignored, per UCI convention.
            _ => {}
        }
    }
}

fn apply_option(line: &str, params: &mut StubParams) {
    // setoption name <name...> [value <value...>]
    let rest = match line.strip_prefix("setoption") {
        Some(r) => r.trim(),
        None => return,
    };
    let rest = match rest.strip_prefix("name") {
        Some(r) => r.trim(),
        None => return,
    };
    let (name, value) = match rest.split_once(" value ") {
        Some((n, v)) => (n.trim(), v.trim()),
        None => (rest, ""),
    };
    match name {
        "Depth" => {
            if let Ok(d) = value.parse::<u32>() {
                if (1..=6).contains(&d) {
                    params.depth = d;
                }
            }
        }
        "FaultIllegalBestmove" => params.fault_illegal_bestmove = value == "true",
        // Hash and Threads are accepted and ignored: there is no hash
        // table and search is single-threaded.
        _ => {}
    }
}

fn parse_position(line: &str) -> Result<ChessState, String> {
    let rest = line
        .strip_prefix("position")
        .expect("dispatched on the position token")
        .trim();

    let (start, moves_text) = if let Some(r) = rest.strip_prefix("startpos") {
        (ChessState::initial(), r.trim())
    } else if let Some(r) = rest.strip_prefix("fen") {
        let r = r.trim();
        let (fen_part, moves_part) = match r.find(" moves") {
            Some(idx) => (&r[..idx], r[idx..].trim()),
            None => (r, ""),
        };
        let state = ChessState::from_fen(fen_part).map_err(|e| e.to_string())?;
        (state, moves_part)
    } else {
        return Err(format!("bad position command {rest:?}"));
    };

    let mut state = start;
    if !moves_text.is_empty() {
        let mut tokens = moves_text.split_whitespace();
        match tokens.next() {
            Some("moves") => {}
            other => return Err(format!("expected moves keyword, got {other:?}")),
        }
        for tok in tokens {
            let mv: ChessMove = tok.parse().map_err(|_| format!("bad move {tok:?}"))?;
            state = state
                .apply(&mv)
                .map_err(|_| format!("illegal move {tok} in position command"))?;
        }
    }
    Ok(state)
}

fn go_depth(line: &str, default: u32) -> u32 {
    // Only `go depth d` changes the depth; movetime and nodes budgets map
    // to the configured depth so results stay machine-independent.
    let mut tokens = line.split_whitespace().skip(1);
    while let Some(tok) = tokens.next() {
        match tok {
            "depth" => {
                if let Some(d) = tokens.next().and_then(|v| v.parse::<u32>().ok()) {
                    if d >= 1 {
                        return d;
                    }
                }
            }
            "movetime" | "nodes" => {
                tokens.next();
            }
            _ => {}
        }
    }
    default
}

fn emit_search<O: FnMut(&str)>(
    position: &ChessState,
    depth: u32,
    params: &StubParams,
    emit: &mut O,
) {
    let result = search_fixed_depth(position, depth, &params.piece_values);
    emit(&format!("info depth {depth} score {}", format_score(result.score)));
    match result.best_move {
        None => emit("bestmove (none)"),
        Some(mv) if params.fault_illegal_bestmove => {
            // Parseable but never legal: origin equals destination.
            let _ = mv;
            emit("bestmove a1a1");
        }
        Some(mv) => emit(&format!("bestmove {mv}")),
    }
}

fn format_score(score: i32) -> String {
    if score >= MATE_THRESHOLD {
        let plies = WIN_SCORE - score;
        format!("mate {}", (plies + 1) / 2)
    } else if score <= -MATE_THRESHOLD {
        let plies = WIN_SCORE + score;
        format!("mate -{}", plies / 2)
    } else {
        format!("cp {score}")
    }
}

/// A stub engine running on its own thread, spoken to over channels. The
/// session ends when the input side is dropped or `quit` is sent.
pub struct InProcessStub {
    input: Sender<String>,
    output: Receiver<String>,
    _thread: JoinHandle<()>,
}

pub fn spawn_in_process(params: StubParams) -> InProcessStub {
    let (in_tx, in_rx) = channel::<String>();
    let (out_tx, out_rx) = channel::<String>();
    let thread = thread::spawn(move || {
        let mut emit = move |line: &str| {
            let _ = out_tx.send(line.to_string());
        };
        run_uci(in_rx, &mut emit, params);
    });
    InProcessStub {
        input: in_tx,
        output: out_rx,
        _thread: thread,
    }
}

impl InProcessStub {
    /// False once the engine thread has exited.
    pub fn send(&self, line: &str) -> bool {
        self.input.send(line.to_string()).is_ok()
    }

    pub fn recv_timeout(&self, timeout: Duration) -> Result<String, RecvTimeoutError> {
        self.output.recv_timeout(timeout)
    }
}

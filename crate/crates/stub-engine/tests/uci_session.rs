//! Golden transcripts for the UCI loop: identical command sequences must
//! produce byte-identical reply sequences.

use std::time::Duration;

use stub_engine::{run_uci, spawn_in_process, StubParams};

fn session(commands: &[&str], params: StubParams) -> Vec<String> {
    let mut replies = Vec::new();
    run_uci(
        commands.iter().map(|s| s.to_string()),
        &mut |line| replies.push(line.to_string()),
        params,
    );
    replies
}

#[test]
fn handshake_transcript() {
    let replies = session(&["uci", "isready", "quit"], StubParams::default());
    assert_eq!(
        replies,
        vec![
            "id name stub-engine",
            "id author metachess",
            "option name Hash type spin default 1 min 1 max 128",
            "option name Threads type spin default 1 min 1 max 1",
            "option name Depth type spin default 2 min 1 max 6",
            "option name FaultIllegalBestmove type check default false",
            "uciok",
            "readyok",
        ]
    );
}

#[test]
fn quiet_start_search_transcript() {
    let replies = session(
        &["position startpos", "go depth 1", "quit"],
        StubParams::default(),
    );
    assert_eq!(replies, vec!["info depth 1 score cp 0", "bestmove a2a3"]);
}

#[test]
fn mate_in_one_reports_mate_score() {
    let replies = session(
        &["position fen 6k1/8/6K1/8/8/8/8/R7 w - - 0 1", "go depth 1", "quit"],
        StubParams::default(),
    );
    assert_eq!(replies, vec!["info depth 1 score mate 1", "bestmove a1a8"]);
}

#[test]
fn movetime_maps_to_configured_depth() {
    let a = session(
        &["position startpos moves e2e4 e7e5", "go movetime 5000", "quit"],
        StubParams::with_depth(2),
    );
    let b = session(
        &["position startpos moves e2e4 e7e5", "go depth 2", "quit"],
        StubParams::with_depth(2),
    );
    assert_eq!(a, b);
}

#[test]
fn transcripts_are_reproducible() {
    let commands = [
        "uci",
        "isready",
        "ucinewgame",
        "isready",
        "position startpos moves e2e4 e7e5 g1f3",
        "go depth 2",
        "position startpos moves d2d4",
        "go depth 2",
        "quit",
    ];
    let a = session(&commands, StubParams::default());
    let b = session(&commands, StubParams::default());
    assert_eq!(a, b);
    assert!(a.iter().any(|l| l.starts_with("bestmove ")));
}

#[test]
fn malformed_position_is_diagnosed_and_state_kept() {
    let replies = session(
        &[
            "position startpos moves e2e4",
            "position fen not/a/fen w - - 0 1",
            "position startpos moves e2e9",
            "go depth 1",
            "quit",
        ],
        StubParams::default(),
    );
    let diagnostics = replies
        .iter()
        .filter(|l| l.starts_with("info string error:"))
        .count();
    assert_eq!(diagnostics, 2);
    // The last good position (after e2e4, black to move) is still active.
    let bestmove = replies.last().unwrap();
    assert!(bestmove.starts_with("bestmove "));
    let reply: game_core::chess::ChessMove =
        bestmove.strip_prefix("bestmove ").unwrap().parse().unwrap();
    let after_e4 = {
        use game_core::GameState;
        game_core::chess::ChessState::initial()
            .apply(&"e2e4".parse().unwrap())
            .unwrap()
    };
    use game_core::GameState;
    assert!(after_e4.legal_moves().contains(&reply));
}

#[test]
fn unknown_commands_are_ignored() {
    let replies = session(
        &["xyzzy", "debug on", "isready", "quit"],
        StubParams::default(),
    );
    assert_eq!(replies, vec!["readyok"]);
}

#[test]
fn setoption_depth_changes_search() {
    let replies = session(
        &[
            "setoption name Depth value 1",
            "position startpos",
            "go",
            "quit",
        ],
        StubParams::default(),
    );
    assert_eq!(replies[0], "info depth 1 score cp 0");
}

#[test]
fn fault_injection_replies_illegal_bestmove() {
    let replies = session(
        &[
            "setoption name FaultIllegalBestmove value true",
            "position startpos",
            "go depth 1",
            "quit",
        ],
        StubParams::default(),
    );
    assert_eq!(replies[1], "bestmove a1a1");
}

#[test]
fn in_process_stub_speaks_the_same_protocol() {
    let stub = spawn_in_process(StubParams::default());
    assert!(stub.send("uci"));
    let mut saw_uciok = false;
    while let Ok(line) = stub.recv_timeout(Duration::from_secs(5)) {
        if line == "uciok" {
            saw_uciok = true;
            break;
        }
    }
    assert!(saw_uciok);
    stub.send("position startpos");
    stub.send("go depth 1");
    let info = stub.recv_timeout(Duration::from_secs(30)).unwrap();
    assert_eq!(info, "info depth 1 score cp 0");
    let best = stub.recv_timeout(Duration::from_secs(5)).unwrap();
    assert_eq!(best, "bestmove a2a3");
    stub.send("quit");
}

//! Byte-exact conformance of outgoing command sequences to the UCI subset
//! grammar: `[ucinewgame, isready]? position (startpos|fen F)
//! [moves m1..mk] ; go (movetime T|depth D|nodes N)`.

use game_core::chess::ChessState;
use game_core::Trajectory;
use uci_client::{Budget, EngineConfig, EngineHandle, ResetPolicy};

#[test]
fn handshake_and_search_transcript_is_exact() {
    let (mut h, log) = EngineHandle::launch_recorded(EngineConfig::stub(2)).unwrap();
    let mut traj = Trajectory::new(ChessState::initial());
    traj.push("e2e4".parse().unwrap()).unwrap();
    h.search(&traj, None).unwrap();
    h.shutdown();

    assert_eq!(
        log.sent_lines(),
        vec![
            "uci",
            "setoption name Threads value 1",
            "setoption name Hash value 1",
            "isready",
            "ucinewgame",
            "isready",
            "position startpos moves e2e4",
            "go depth 2",
            "quit",
        ]
    );
}

#[test]
fn fen_start_and_budget_kinds_render_exactly() {
    let fen = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1";
    let mut config = EngineConfig::stub(2);
    config.reset_policy = ResetPolicy::Persistent;
    let (mut h, log) = EngineHandle::launch_recorded(config).unwrap();
    log.clear();

    let mut traj = Trajectory::new(ChessState::from_fen(fen).unwrap());
    traj.push("e2a6".parse().unwrap()).unwrap();
    traj.push("b4c3".parse().unwrap()).unwrap();
    h.search(&traj, Some(Budget::Depth(1))).unwrap();
    h.search(&traj, Some(Budget::Movetime(50))).unwrap();
    h.search(&traj, Some(Budget::Nodes(10))).unwrap();
    h.shutdown();

    assert_eq!(
        log.sent_lines(),
        vec![
            format!("position fen {fen} moves e2a6 b4c3"),
            "go depth 1".to_string(),
            format!("position fen {fen} moves e2a6 b4c3"),
            "go movetime 50".to_string(),
            format!("position fen {fen} moves e2a6 b4c3"),
            "go nodes 10".to_string(),
            "quit".to_string(),
        ]
    );
}

#[test]
fn bare_position_without_moves() {
    let mut config = EngineConfig::stub(1);
    config.reset_policy = ResetPolicy::Persistent;
    let (mut h, log) = EngineHandle::launch_recorded(config).unwrap();
    log.clear();
    h.search(&Trajectory::new(ChessState::initial()), None)
        .unwrap();
    assert_eq!(
        log.sent_lines(),
        vec!["position startpos", "go depth 1"]
    );
}

#[test]
fn every_query_matches_the_grammar() {
    // Structural check over a long mixed session.
    let (mut h, log) = EngineHandle::launch_recorded(EngineConfig::stub(1)).unwrap();
    let mut traj = Trajectory::new(ChessState::initial());
    for mv in ["g1f3", "g8f6", "d2d4"] {
        h.search(&traj, None).unwrap();
        traj.push(mv.parse().unwrap()).unwrap();
    }
    h.shutdown();

    let position = grammar_acceptor();
    for line in log.sent_lines() {
        assert!(
            position(&line),
            "outgoing line violates the grammar: {line:?}"
        );
    }
}

/// Hand-rolled grammar acceptor for the command subset.
fn grammar_acceptor() -> impl Fn(&str) -> bool {
    |line: &str| {
        if matches!(line, "uci" | "isready" | "ucinewgame" | "quit") {
            return true;
        }
        if let Some(rest) = line.strip_prefix("setoption name ") {
            return rest.contains(" value ");
        }
        if let Some(rest) = line.strip_prefix("position ") {
            let rest = match rest.strip_prefix("startpos") {
                Some(r) => r,
                None => match rest.strip_prefix("fen ") {
                    Some(r) => {
                        // Skip the six FEN fields.
                        let mut tokens = r.splitn(7, ' ');
                        let mut taken = 0;
                        for _ in 0..6 {
                            if tokens.next().is_some() {
                                taken += 1;
                            }
                        }
                        if taken < 4 {
                            return false;
                        }
                        return match tokens.next() {
                            None => true,
                            Some(tail) => {
                                tail.starts_with("moves ")
                                    && tail[6..].split(' ').all(|m| m.parse::<game_core::chess::ChessMove>().is_ok())
                            }
                        };
                    }
                    None => return false,
                },
            };
            return rest.is_empty()
                || (rest.starts_with(" moves ")
                    && rest[7..]
                        .split(' ')
                        .all(|m| m.parse::<game_core::chess::ChessMove>().is_ok()));
        }
        if let Some(rest) = line.strip_prefix("go ") {
            let mut tokens = rest.split(' ');
            let kind = tokens.next().unwrap_or_default();
            let amount_ok = tokens
                .next()
                .is_some_and(|v| v.parse::<u64>().is_ok());
            return matches!(kind, "movetime" | "depth" | "nodes")
                && amount_ok
                && tokens.next().is_none();
        }
        false
    }
}

//! Search and evaluation checks against hand-verifiable positions, plus
//! the negamax identity and evaluation antisymmetry over random playouts.

use game_core::chess::ChessState;
use game_core::GameState;
use proptest::prelude::*;
use stub_engine::{
    material_eval, plain_negamax_value, search_fixed_depth, PieceValues, WIN_SCORE,
};

fn values() -> PieceValues {
    PieceValues::default()
}

fn state(fen: &str) -> ChessState {
    ChessState::from_fen(fen).unwrap()
}

#[test]
fn start_position_is_balanced() {
    assert_eq!(material_eval(&ChessState::initial(), &values()), 0);
}

#[test]
fn missing_queen_is_nine_pawns() {
    // Start position minus the black queen, white to move.
    let s = state("rnb1kbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    assert_eq!(material_eval(&s, &values()), 900);
}

#[test]
fn eval_negates_under_side_to_move_flip() {
    let s = state("rnb1kbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
    let flipped = state("rnb1kbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq - 0 1");
    assert_eq!(
        material_eval(&s, &values()),
        -material_eval(&flipped, &values())
    );
}

#[test]
fn finds_mate_in_one_at_depth_one() {
    // Ra8 mates: king g8 boxed in by the king on g6.
    let s = state("6k1/8/6K1/8/8/8/8/R7 w - - 0 1");
    let out = search_fixed_depth(&s, 1, &values());
    assert_eq!(out.best_move.unwrap().to_string(), "a1a8");
    assert_eq!(out.score, WIN_SCORE - 1);
}

#[test]
fn takes_the_hanging_queen_at_depth_two() {
    let s = state("3k4/8/8/3q4/8/8/3Q4/3K4 w - - 0 1");
    let out = search_fixed_depth(&s, 2, &values());
    assert_eq!(out.best_move.unwrap().to_string(), "d2d5");
    assert_eq!(out.score, 900);
}

#[test]
fn depth_one_from_start_is_quiet() {
    let out = search_fixed_depth(&ChessState::initial(), 1, &values());
    assert_eq!(out.score, 0);
    // All twenty moves tie at 0; canonical order keeps the first.
    assert_eq!(out.best_move.unwrap().to_string(), "a2a3");
}

#[test]
fn terminal_position_searches_to_none() {
    let mut s = ChessState::initial();
    for m in ["f2f3", "e7e5", "g2g4", "d8h4"] {
        s = s.apply(&m.parse().unwrap()).unwrap();
    }
    let out = search_fixed_depth(&s, 2, &values());
    assert_eq!(out.best_move, None);
    assert_eq!(out.score, -WIN_SCORE);
}

#[test]
fn search_is_deterministic() {
    let s = state("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
    let a = search_fixed_depth(&s, 3, &values());
    let b = search_fixed_depth(&s, 3, &values());
    assert_eq!(a, b);
}

fn playout(picks: &[u8]) -> ChessState {
    let mut s = ChessState::initial();
    for &p in picks {
        let moves = s.legal_moves();
        if moves.is_empty() || s.status().is_terminal() {
            break;
        }
        s = s.apply(&moves[p as usize % moves.len()]).unwrap();
    }
    s
}

/// Mate scores are counted in plies from the root of each search, so a
/// child value seen from the parent shifts one ply toward zero.
fn shift_mate_toward_zero(v: i32) -> i32 {
    const T: i32 = WIN_SCORE - 1000;
    if v >= T {
        v - 1
    } else if v <= -T {
        v + 1
    } else {
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn negamax_identity(picks in prop::collection::vec(any::<u8>(), 0..30), depth in 1u32..3) {
        let s = playout(&picks);
        if s.status().is_terminal() {
            return Ok(());
        }
        let root = search_fixed_depth(&s, depth, &values());
        let expected = s
            .legal_moves()
            .iter()
            .map(|mv| {
                shift_mate_toward_zero(-plain_negamax_value(
                    &s.apply(mv).unwrap(),
                    depth - 1,
                    &values(),
                ))
            })
            .max()
            .unwrap();
        prop_assert_eq!(root.score, expected);
    }

    #[test]
    fn bestmove_is_always_legal(picks in prop::collection::vec(any::<u8>(), 0..40), depth in 1u32..3) {
        let s = playout(&picks);
        if s.status().is_terminal() {
            return Ok(());
        }
        let out = search_fixed_depth(&s, depth, &values());
        prop_assert!(s.legal_moves().contains(&out.best_move.unwrap()));
    }

    #[test]
    fn eval_antisymmetry_over_playouts(picks in prop::collection::vec(any::<u8>(), 0..40)) {
        let s = playout(&picks);
        // Flip only the side to move; material is unchanged, so the sign
        // flips. Skip positions where the flip is illegal (mover in check).
        let fen = s.to_fen();
        let mut parts: Vec<&str> = fen.split(' ').collect();
        let flip = if parts[1] == "w" { "b" } else { "w" };
        parts[1] = flip;
        parts[3] = "-";
        if let Ok(flipped) = ChessState::from_fen(&parts.join(" ")) {
            prop_assert_eq!(
                material_eval(&s, &values()),
                -material_eval(&flipped, &values())
            );
        }
    }
}

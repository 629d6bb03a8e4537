//! One-step lookahead with a perfect evaluator must reproduce the exact
//! rollout policy at every reachable tic-tac-toe state, and unpruned
//! two-step lookahead must match a hand-rolled nested-loop expansion.

use game_core::ttt::{Mark, TttState};
use game_core::{GameState, Status, Trajectory};
use mpc_policy::{select_half_step, select_multistep, select_one_step, LookaheadSpec, SearchProbe};
use oracle::{
    enumerate_reachable, exact_rollout_policy, policy_value, solve_minimax, FirstLegal,
    MinimaxPolicy, MovePolicy, OnePlyGreedy, SeededRandom, ValueTable,
};
use uci_client::{Score, MATE_BASE};

fn start() -> TttState {
    TttState::initial()
}

type Move = <TttState as GameState>::Move;

/// An exact "evaluator engine": its move policy is the base policy, its
/// evaluation is the true value of base-vs-opponent play.
fn exact_evaluator<'a>(
    base: &'a (impl MovePolicy<TttState> + Sync),
    opponent: &'a (impl MovePolicy<TttState> + Sync),
    values: &'a ValueTable<TttState>,
) -> impl Fn(&Trajectory<TttState>) -> SearchProbe<TttState> + Sync + 'a {
    move |traj| {
        let state = traj.current();
        let best_move = if state.side_to_move() == Mark::X {
            base.choose(state)
        } else {
            opponent.choose(state)
        };
        let value = values.get(state).expect("value table covers reachable states");
        SearchProbe {
            best_move,
            score: Score::centipawns(100 * value.value as i64, Mark::X),
        }
    }
}

/// An exact "nominal opponent engine" wrapping a fixed policy.
fn exact_opponent<'a>(
    opponent: &'a (impl MovePolicy<TttState> + Sync),
) -> impl Fn(&Trajectory<TttState>) -> SearchProbe<TttState> + Sync + 'a {
    move |traj| SearchProbe {
        best_move: opponent.choose(traj.current()),
        score: Score::centipawns(0, Mark::X),
    }
}

fn assert_matches_rollout(base: &(impl MovePolicy<TttState> + Sync)) {
    let opponent = MinimaxPolicy::solve(&start(), Mark::X).unwrap();
    let values = policy_value(&start(), base, &opponent, Mark::X).unwrap();
    let rollout = exact_rollout_policy(&start(), base, &opponent, Mark::X).unwrap();
    let evaluator = exact_evaluator(base, &opponent, &values);
    let nominal = exact_opponent(&opponent);
    let spec = LookaheadSpec::one_step();

    let mut checked = 0;
    for state in enumerate_reachable(&start()).unwrap() {
        if state.side_to_move() != Mark::X || state.status().is_terminal() {
            continue;
        }
        let decision =
            select_one_step(&Trajectory::new(state), &evaluator, &nominal, &spec)
                .unwrap();
        assert_eq!(
            decision.chosen,
            rollout.choose(&state),
            "divergence at {}",
            state.key()
        );
        checked += 1;
    }
    assert!(checked > 1500, "only {checked} states checked");
}

#[test]
fn one_step_equals_exact_rollout_first_legal_base() {
    assert_matches_rollout(&FirstLegal);
}

#[test]
fn one_step_equals_exact_rollout_greedy_base() {
    assert_matches_rollout(&OnePlyGreedy);
}

#[test]
fn one_step_equals_exact_rollout_seeded_base() {
    assert_matches_rollout(&SeededRandom::new(0xC0FFEE));
}

/// Terminal scoring identical to the selection machinery, but computed by
/// plain nested loops with no recursion, pruning, or parallelism.
fn terminal_key(status: &Status<Mark>, plies_beyond: i64) -> i64 {
    match status {
        Status::Win(Mark::X) => MATE_BASE - plies_beyond,
        Status::Win(_) => -(MATE_BASE - plies_beyond),
        Status::Draw(_) => 0,
        Status::Ongoing => unreachable!(),
    }
}

fn nested_loop_two_step(
    state: &TttState,
    opponent: &impl MovePolicy<TttState>,
    values: &ValueTable<TttState>,
) -> Move {
    let mut best: Option<(i64, Move)> = None;
    for own in state.legal_moves() {
        let after_own = state.apply(&own).unwrap();
        let score = if after_own.status().is_terminal() {
            terminal_key(&after_own.status(), 0)
        } else {
            let after_reply = after_own.apply(&opponent.choose(&after_own)).unwrap();
            if after_reply.status().is_terminal() {
                terminal_key(&after_reply.status(), 1)
            } else {
                let mut subtree_best = i64::MIN;
                for second in after_reply.legal_moves() {
                    let after_second = after_reply.apply(&second).unwrap();
                    let leaf = if after_second.status().is_terminal() {
                        terminal_key(&after_second.status(), 2)
                    } else {
                        let after_second_reply =
                            after_second.apply(&opponent.choose(&after_second)).unwrap();
                        if after_second_reply.status().is_terminal() {
                            terminal_key(&after_second_reply.status(), 3)
                        } else {
                            100 * values.get(&after_second_reply).unwrap().value as i64
                        }
                    };
                    subtree_best = subtree_best.max(leaf);
                }
                subtree_best
            }
        };
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, own));
        }
    }
    best.unwrap().1
}

#[test]
fn half_step_with_exact_minimax_values_is_one_ply_minimax() {
    // With the evaluator returning exact game-theoretic values, half-step
    // selection is exactly a one-ply minimax choice.
    let table = solve_minimax(&start(), Mark::X).unwrap();
    let evaluator = |traj: &Trajectory<TttState>| {
        let state = traj.current();
        SearchProbe {
            best_move: state.legal_moves()[0],
            score: Score::centipawns(
                100 * table.get(state).expect("solved").value as i64,
                Mark::X,
            ),
        }
    };
    let spec = LookaheadSpec::half_step();

    let mut checked = 0;
    for state in enumerate_reachable(&start()).unwrap() {
        if state.side_to_move() != Mark::X || state.status().is_terminal() {
            continue;
        }
        let decision =
            select_half_step(&Trajectory::new(state), &evaluator, &spec).unwrap();

        // Brute-force one-ply argmax under the shared tie-break,
        // terminals scored the same way the selector scores them.
        let mut best: Option<(i64, <TttState as GameState>::Move)> = None;
        for mv in state.legal_moves() {
            let child = state.apply(&mv).unwrap();
            let key = if child.status().is_terminal() {
                terminal_key(&child.status(), 0)
            } else {
                100 * table.get(&child).unwrap().value as i64
            };
            if best.as_ref().is_none_or(|(b, _)| key > *b) {
                best = Some((key, mv));
            }
        }
        assert_eq!(decision.chosen, best.unwrap().1, "at {}", state.key());
        checked += 1;
    }
    assert!(checked > 1500);
}

#[test]
fn multistep_plays_an_immediate_win_regardless_of_subtrees() {
    // X can complete the a-file right now; depth-2 expansion of the other
    // branches must not distract from it. (Reachable: a1 b1 a2 b2.)
    let mut cells = [None; 9];
    cells[0] = Some(Mark::X); // a1
    cells[1] = Some(Mark::X); // a2
    cells[3] = Some(Mark::O); // b1
    cells[4] = Some(Mark::O); // b2 — O threatens b3 right back
    let state = TttState::from_cells(cells, Mark::X);
    assert_eq!(state.status(), Status::Ongoing);

    let opponent = MinimaxPolicy::solve(&start(), Mark::X).unwrap();
    let base = FirstLegal;
    let values = policy_value(&start(), &base, &opponent, Mark::X).unwrap();
    let evaluator = exact_evaluator(&base, &opponent, &values);
    let nominal = exact_opponent(&opponent);

    let decision = select_multistep(
        &Trajectory::new(state),
        &evaluator,
        &nominal,
        &LookaheadSpec::multi_step(2),
    )
    .unwrap();
    assert_eq!(decision.chosen.to_string(), "a3");
    assert_eq!(decision.chosen_branch().evaluation, Some(MATE_BASE));
}

#[test]
fn unpruned_two_step_matches_nested_loops() {
    let base = FirstLegal;
    let opponent = MinimaxPolicy::solve(&start(), Mark::X).unwrap();
    let values = policy_value(&start(), &base, &opponent, Mark::X).unwrap();
    let evaluator = exact_evaluator(&base, &opponent, &values);
    let nominal = exact_opponent(&opponent);
    let mut spec = LookaheadSpec::multi_step(2);
    spec.prune_width = 64; // wider than any branching: nothing is pruned

    let mut checked = 0;
    for state in enumerate_reachable(&start()).unwrap().iter().step_by(5) {
        if state.side_to_move() != Mark::X || state.status().is_terminal() {
            continue;
        }
        let decision =
            select_multistep(&Trajectory::new(*state), &evaluator, &nominal, &spec)
                .unwrap();
        let expected = nested_loop_two_step(state, &opponent, &values);
        assert_eq!(decision.chosen, expected, "divergence at {}", state.key());
        assert!(decision.branches.iter().all(|b| !b.pruned));
        checked += 1;
    }
    assert!(checked > 300, "only {checked} states checked");
}

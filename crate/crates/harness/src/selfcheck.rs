//! The exact-solver property suite as a runnable check: solves tic-tac-toe
//! every way, verifies Bellman consistency by substitution, and confirms
//! the rollout improvement property for several imperfect base policies.

use game_core::ttt::{Mark, TttState};
use game_core::GameState;
use oracle::{
    enumerate_reachable, exact_rollout_policy, policy_value, solve_fixed_opponent, solve_minimax,
    verify_bellman, FirstLegal, MinimaxPolicy, MovePolicy, OnePlyGreedy, SeededRandom,
};

pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn report(name: &str, passed: bool, detail: impl Into<String>) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

/// Runs every check; all are expected to pass on a healthy build.
pub fn run_all() -> Vec<CheckReport> {
    let mut out = Vec::new();
    let start = TttState::initial();

    let reachable = match enumerate_reachable(&start) {
        Ok(r) => r,
        Err(e) => {
            out.push(report("reachable-states", false, e.to_string()));
            return out;
        }
    };
    out.push(report(
        "reachable-states",
        reachable.len() == 5478,
        format!("{} states (want 5478)", reachable.len()),
    ));

    let minimax = solve_minimax(&start, Mark::X).unwrap();
    let empty_value = minimax.get(&start).unwrap().value;
    out.push(report(
        "minimax-empty-board-draw",
        empty_value == 0,
        format!("value {empty_value} (want 0)"),
    ));

    let minimax_policy = MinimaxPolicy::solve(&start, Mark::X).unwrap();
    let fixed = solve_fixed_opponent(&start, &minimax_policy, Mark::X).unwrap();
    out.push(report(
        "fixed-minimax-opponent-draw",
        fixed.get(&start).unwrap().value == 0,
        format!("value {}", fixed.get(&start).unwrap().value),
    ));

    match verify_bellman(&fixed, &minimax_policy) {
        Ok(n) => out.push(report(
            "bellman-consistency",
            true,
            format!("{n} states substituted"),
        )),
        Err(e) => out.push(report("bellman-consistency", false, e)),
    }

    let weak = solve_fixed_opponent(&start, &FirstLegal, Mark::X).unwrap();
    out.push(report(
        "first-legal-opponent-beatable",
        weak.get(&start).unwrap().value == 1,
        format!("value {}", weak.get(&start).unwrap().value),
    ));

    let bases: Vec<(&str, Box<dyn MovePolicy<TttState>>)> = vec![
        ("first-legal", Box::new(FirstLegal)),
        ("one-ply-greedy", Box::new(OnePlyGreedy)),
        ("seeded-random", Box::new(SeededRandom::new(0xC0FFEE))),
    ];
    for (base_name, base) in &bases {
        for (opp_name, use_minimax) in [("minimax", true), ("first-legal", false)] {
            let (worsened, strict, states) = if use_minimax {
                improvement(base.as_ref(), &minimax_policy, &reachable)
            } else {
                improvement(base.as_ref(), &FirstLegal, &reachable)
            };
            out.push(report(
                &format!("rollout-improves-{base_name}-vs-{opp_name}"),
                worsened == 0 && strict > 0,
                format!("{states} states, {strict} strictly improved, {worsened} worsened"),
            ));
        }
    }
    out
}

fn improvement(
    base: &dyn MovePolicy<TttState>,
    opponent: &impl MovePolicy<TttState>,
    reachable: &[TttState],
) -> (usize, usize, usize) {
    struct Wrap<'a>(&'a dyn MovePolicy<TttState>);
    impl MovePolicy<TttState> for Wrap<'_> {
        fn choose(&self, state: &TttState) -> <TttState as GameState>::Move {
            self.0.choose(state)
        }
    }
    let start = TttState::initial();
    let base = Wrap(base);
    let rollout = exact_rollout_policy(&start, &base, opponent, Mark::X).unwrap();
    let base_values = policy_value(&start, &base, opponent, Mark::X).unwrap();
    let rollout_values = policy_value(&start, &rollout, opponent, Mark::X).unwrap();
    let mut worsened = 0;
    let mut strict = 0;
    for state in reachable {
        let b = base_values.get(state).unwrap().value;
        let r = rollout_values.get(state).unwrap().value;
        if r < b {
            worsened += 1;
        }
        if r > b {
            strict += 1;
        }
    }
    (worsened, strict, reachable.len())
}

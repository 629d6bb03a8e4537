//! The solvers: reachability, minimax, fixed-opponent values, policy
//! evaluation by playout, and exact rollout of a base policy.

use std::collections::{HashMap, HashSet, VecDeque};

use game_core::{GameState, PlayerId, Status};

use crate::policies::PolicyTable;
use crate::{MovePolicy, OracleError, Outcome, ValueTable, STATE_CAP};

/// Every state reachable from `start` under any legal play, in breadth-first
/// order. Terminal states are included but not expanded.
pub fn enumerate_reachable<S: GameState>(start: &S) -> Result<Vec<S>, OracleError> {
    let mut seen: HashSet<S> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    order.push(start.clone());
    queue.push_back(start.clone());
    while let Some(state) = queue.pop_front() {
        if state.status().is_terminal() {
            continue;
        }
        for mv in state.legal_moves() {
            let child = state.apply(&mv).expect("generated move is legal");
            if seen.insert(child.clone()) {
                if seen.len() > STATE_CAP {
                    return Err(OracleError::StateSpaceExceeded);
                }
                order.push(child.clone());
                queue.push_back(child);
            }
        }
    }
    Ok(order)
}

/// Game-theoretic value of every reachable state under best play by both
/// sides, from `player`'s perspective.
pub fn solve_minimax<S: GameState>(
    start: &S,
    player: S::Player,
) -> Result<ValueTable<S>, OracleError> {
    let mut table = ValueTable::new(player);
    for state in enumerate_reachable(start)? {
        minimax_value(&state, player, &mut table.values)?;
    }
    Ok(table)
}

fn minimax_value<S: GameState>(
    state: &S,
    player: S::Player,
    memo: &mut HashMap<S, Outcome>,
) -> Result<Outcome, OracleError> {
    if let Some(v) = memo.get(state) {
        return Ok(*v);
    }
    if memo.len() > STATE_CAP {
        return Err(OracleError::StateSpaceExceeded);
    }
    let status = state.status();
    let outcome = if status.is_terminal() {
        Outcome::terminal(&status, player)
    } else {
        let maximize = state.side_to_move() == player;
        let mut best: Option<Outcome> = None;
        for mv in state.legal_moves() {
            let child = state.apply(&mv).expect("generated move is legal");
            let v = minimax_value(&child, player, memo)?.after_plies(1);
            best = Some(match best {
                None => v,
                Some(b) => {
                    let better = if maximize {
                        v.rank() > b.rank()
                    } else {
                        v.rank() < b.rank()
                    };
                    if better {
                        v
                    } else {
                        b
                    }
                }
            });
        }
        best.expect("ongoing state has moves")
    };
    memo.insert(state.clone(), outcome);
    Ok(outcome)
}

/// Exact value of the one-player problem obtained by fixing the opponent:
/// at `player`'s states the best move is taken over the closed-loop
/// successor (own move followed by the opponent's fixed reply); at opponent
/// states the fixed reply is simply followed.
pub fn solve_fixed_opponent<S: GameState>(
    start: &S,
    opponent: &impl MovePolicy<S>,
    player: S::Player,
) -> Result<ValueTable<S>, OracleError> {
    let mut table = ValueTable::new(player);
    for state in enumerate_reachable(start)? {
        fixed_opponent_value(&state, opponent, player, &mut table.values)?;
    }
    Ok(table)
}

fn fixed_opponent_value<S: GameState>(
    state: &S,
    opponent: &impl MovePolicy<S>,
    player: S::Player,
    memo: &mut HashMap<S, Outcome>,
) -> Result<Outcome, OracleError> {
    if let Some(v) = memo.get(state) {
        return Ok(*v);
    }
    if memo.len() > STATE_CAP {
        return Err(OracleError::StateSpaceExceeded);
    }
    let status = state.status();
    let outcome = if status.is_terminal() {
        Outcome::terminal(&status, player)
    } else if state.side_to_move() == player {
        let mut best: Option<Outcome> = None;
        for mv in state.legal_moves() {
            let mid = state.apply(&mv).expect("generated move is legal");
            let v = step_through_opponent(&mid, opponent, player, memo)?.after_plies(1);
            best = Some(match best {
                None => v,
                Some(b) if v.rank() > b.rank() => v,
                Some(b) => b,
            });
        }
        best.expect("ongoing state has moves")
    } else {
        step_through_opponent(state, opponent, player, memo)?
    };
    memo.insert(state.clone(), outcome);
    Ok(outcome)
}

/// Value measured from a state where the opponent is about to move (or
/// which is already terminal).
fn step_through_opponent<S: GameState>(
    state: &S,
    opponent: &impl MovePolicy<S>,
    player: S::Player,
    memo: &mut HashMap<S, Outcome>,
) -> Result<Outcome, OracleError> {
    let status = state.status();
    if status.is_terminal() {
        return Ok(Outcome::terminal(&status, player));
    }
    let reply = opponent.choose(state);
    let next = state.apply(&reply).expect("opponent move is legal");
    Ok(fixed_opponent_value(&next, opponent, player, memo)?.after_plies(1))
}

/// Terminal value of the unique trajectory played by `policy` (at
/// `player`'s states) against `opponent`, from every reachable state.
pub fn policy_value<S: GameState>(
    start: &S,
    policy: &impl MovePolicy<S>,
    opponent: &impl MovePolicy<S>,
    player: S::Player,
) -> Result<ValueTable<S>, OracleError> {
    let mut table = ValueTable::new(player);
    for state in enumerate_reachable(start)? {
        if table.values.contains_key(&state) {
            continue;
        }
        // Walk the closed loop, then backfill values along the path.
        let mut path = vec![state.clone()];
        let mut visited: HashSet<S> = HashSet::new();
        visited.insert(state.clone());
        let terminal_outcome = loop {
            let cur = path.last().unwrap();
            if let Some(known) = table.values.get(cur) {
                break *known;
            }
            let status = cur.status();
            if status.is_terminal() {
                break Outcome::terminal(&status, player);
            }
            let mv = if cur.side_to_move() == player {
                policy.choose(cur)
            } else {
                opponent.choose(cur)
            };
            let next = cur.apply(&mv).expect("policy move is legal");
            if !visited.insert(next.clone()) {
                return Err(OracleError::CycleDetected(next.key()));
            }
            path.push(next);
        };
        let mut outcome = terminal_outcome;
        for s in path.iter().rev() {
            table.values.entry(s.clone()).or_insert(outcome);
            outcome = outcome.after_plies(1);
        }
    }
    Ok(table)
}

/// One exact step of policy improvement: at each of `player`'s states pick
/// the move whose closed-loop successor has the best exact base-policy
/// value, terminal branches scored directly, ties broken by canonical move
/// order. This is the reference that one-step lookahead with a perfect
/// evaluator must reproduce.
pub fn exact_rollout_policy<S: GameState>(
    start: &S,
    base: &impl MovePolicy<S>,
    opponent: &impl MovePolicy<S>,
    player: S::Player,
) -> Result<PolicyTable<S>, OracleError> {
    let base_values = policy_value(start, base, opponent, player)?;
    let mut map = HashMap::new();
    for state in enumerate_reachable(start)? {
        if state.side_to_move() != player || state.status().is_terminal() {
            continue;
        }
        let mut best: Option<(i64, S::Move)> = None;
        for mv in state.legal_moves() {
            let key = rollout_branch_key(&state, &mv, opponent, &base_values, player);
            // Strictly-greater keeps the canonically first move on ties.
            if best.as_ref().is_none_or(|(b, _)| key > *b) {
                best = Some((key, mv));
            }
        }
        map.insert(state.clone(), best.expect("ongoing state has moves").1);
    }
    Ok(PolicyTable::new(map))
}

// Branch desirability on a scale ordered identically to the lookahead
// policy's normalized scores: terminals dominate, faster wins first, the
// base-policy value decides everything else.
const TERMINAL_BASE: i64 = 1 << 40;

fn rollout_branch_key<S: GameState>(
    state: &S,
    mv: &S::Move,
    opponent: &impl MovePolicy<S>,
    base_values: &ValueTable<S>,
    player: S::Player,
) -> i64 {
    let mid = state.apply(mv).expect("generated move is legal");
    let mid_status = mid.status();
    if mid_status.is_terminal() {
        return terminal_key(&mid_status, player, 0);
    }
    let reply = opponent.choose(&mid);
    let next = mid.apply(&reply).expect("opponent move is legal");
    let next_status = next.status();
    if next_status.is_terminal() {
        return terminal_key(&next_status, player, 1);
    }
    base_values
        .get(&next)
        .expect("reachable state has a base value")
        .value as i64
}

fn terminal_key<P: PlayerId>(status: &Status<P>, player: P, extra_plies: i64) -> i64 {
    match status {
        Status::Win(w) if *w == player => TERMINAL_BASE - extra_plies,
        Status::Win(_) => -(TERMINAL_BASE - extra_plies),
        Status::Draw(_) => 0,
        Status::Ongoing => unreachable!("terminal key of ongoing state"),
    }
}

/// Direct-substitution check of the fixed-opponent solution: at every
/// ongoing state owned by the player, the stored value must equal the best
/// closed-loop successor value. Returns the number of states checked.
pub fn verify_bellman<S: GameState>(
    table: &ValueTable<S>,
    opponent: &impl MovePolicy<S>,
) -> Result<usize, String> {
    let player = table.player();
    let mut checked = 0;
    for (state, outcome) in table.iter() {
        if state.status().is_terminal() || state.side_to_move() != player {
            continue;
        }
        let mut best: Option<Outcome> = None;
        for mv in state.legal_moves() {
            let mid = state.apply(&mv).expect("generated move is legal");
            let status = mid.status();
            let v = if status.is_terminal() {
                Outcome::terminal(&status, player).after_plies(1)
            } else {
                let reply = opponent.choose(&mid);
                let next = mid.apply(&reply).expect("opponent move is legal");
                let next_v = table
                    .get(&next)
                    .ok_or_else(|| format!("missing successor value at {}", next.key()))?;
                next_v.after_plies(2)
            };
            best = Some(match best {
                None => v,
                Some(b) if v.rank() > b.rank() => v,
                Some(b) => b,
            });
        }
        let best = best.expect("ongoing state has moves");
        if best != *outcome {
            return Err(format!(
                "Bellman mismatch at {}: stored {:?}, recomputed {:?}",
                state.key(),
                outcome,
                best
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

//! Branch expansion and move choice.
//!
//! The first layer is always exact: every legal move gets its nominal
//! reply and a trace entry. Deeper layers (multistep only) expand the
//! `prune_width` most promising resulting positions, ranked by the
//! nominal opponent's own search score, which the expansion already
//! produced. Terminal positions inside the lookahead never consult an
//! engine: a win collapses to the mate-style maximal score minus the
//! plies it takes beyond the candidate move, a draw to exactly zero.

use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use game_core::{GameState, PlayerId, Status, Trajectory};
use uci_client::{EngineError, MATE_BASE};

use crate::{
    BranchTrace, FortifyRecord, LookaheadSpec, MoveDecision, PolicyError, Searcher, Variant,
};

/// Run the configured variant, then fortification when enabled.
pub fn select<S: GameState>(
    trajectory: &Trajectory<S>,
    evaluator: &dyn Searcher<S>,
    nominal: &dyn Searcher<S>,
    spec: &LookaheadSpec,
) -> Result<MoveDecision<S>, PolicyError> {
    let decision = match spec.variant {
        Variant::HalfStep => select_half_step(trajectory, evaluator, spec)?,
        Variant::OneStep => select_one_step(trajectory, evaluator, nominal, spec)?,
        Variant::MultiStep { .. } => select_multistep(trajectory, evaluator, nominal, spec)?,
    };
    if spec.fortified {
        fortify(trajectory, decision, evaluator, spec)
    } else {
        Ok(decision)
    }
}

/// Evaluate the position after each own move — no reply prediction — and
/// play the move leaving the opponent worst off. Normalization turns the
/// opponent-perspective argmin into a plain argmax for the mover.
pub fn select_half_step<S: GameState>(
    trajectory: &Trajectory<S>,
    evaluator: &dyn Searcher<S>,
    spec: &LookaheadSpec,
) -> Result<MoveDecision<S>, PolicyError> {
    let started = Instant::now();
    let player = trajectory.current().side_to_move();
    let moves = legal_or_err(trajectory)?;
    if let Some(decision) = forced(trajectory, &moves, player, started) {
        return Ok(decision);
    }
    let calls = AtomicU32::new(0);

    let traces = parallel_map(moves.len(), spec.parallelism, |i| {
        let candidate = moves[i].clone();
        let after = trajectory
            .extended(candidate.clone())
            .expect("generated move is legal");
        let status = after.current().status();
        let mut trace = blank_trace::<S>(candidate.clone(), after.current().key());
        if status.is_terminal() {
            trace.evaluation = Some(terminal_branch_score(&status, player, 0));
        } else {
            let probe = evaluator
                .probe(&after, spec.evaluator_budget)
                .map_err(|source| PolicyError::Engine {
                    branch: candidate.to_string(),
                    source,
                })?;
            calls.fetch_add(1, Ordering::Relaxed);
            trace.evaluation = Some(probe.score.normalized(player));
            trace.raw_score = Some(probe.score);
        }
        Ok(trace)
    })?;

    Ok(decide(traces, player, calls.into_inner(), started))
}

/// The full scheme: for each own move, predict the opponent's reply with
/// the nominal engine, then evaluate the resulting position.
pub fn select_one_step<S: GameState>(
    trajectory: &Trajectory<S>,
    evaluator: &dyn Searcher<S>,
    nominal: &dyn Searcher<S>,
    spec: &LookaheadSpec,
) -> Result<MoveDecision<S>, PolicyError> {
    select_pairs(trajectory, evaluator, nominal, spec, 1)
}

/// Deeper lookahead in whole move pairs. The first layer is exact; every
/// deeper layer expands only the top `prune_width` surviving positions.
pub fn select_multistep<S: GameState>(
    trajectory: &Trajectory<S>,
    evaluator: &dyn Searcher<S>,
    nominal: &dyn Searcher<S>,
    spec: &LookaheadSpec,
) -> Result<MoveDecision<S>, PolicyError> {
    let Variant::MultiStep { depth } = spec.variant else {
        panic!("select_multistep requires a multi_step spec");
    };
    assert!(depth >= 2, "multistep depth must be at least 2");
    select_pairs(trajectory, evaluator, nominal, spec, depth)
}

fn select_pairs<S: GameState>(
    trajectory: &Trajectory<S>,
    evaluator: &dyn Searcher<S>,
    nominal: &dyn Searcher<S>,
    spec: &LookaheadSpec,
    pairs: u32,
) -> Result<MoveDecision<S>, PolicyError> {
    let started = Instant::now();
    let player = trajectory.current().side_to_move();
    let moves = legal_or_err(trajectory)?;
    if let Some(decision) = forced(trajectory, &moves, player, started) {
        return Ok(decision);
    }
    let ctx = ExpandCtx {
        evaluator,
        nominal,
        spec,
        player,
        calls: AtomicU32::new(0),
    };
    let traces = expand_layer(&ctx, trajectory, moves, pairs, 0)?;
    Ok(decide(traces, player, ctx.calls.into_inner(), started))
}

struct ExpandCtx<'a, S: GameState> {
    evaluator: &'a dyn Searcher<S>,
    nominal: &'a dyn Searcher<S>,
    spec: &'a LookaheadSpec,
    player: S::Player,
    calls: AtomicU32,
}

/// A branch after its exact own-move + nominal-reply step, before any
/// deeper expansion.
enum Expansion<S: GameState> {
    /// Scored on the spot: terminal inside the pair, or leaf-evaluated.
    Settled(BranchTrace<S>),
    /// Ongoing position awaiting a deeper move pair.
    Pending {
        trace: BranchTrace<S>,
        resulting: Trajectory<S>,
        prune_key: i64,
    },
}

fn expand_layer<S: GameState>(
    ctx: &ExpandCtx<'_, S>,
    trajectory: &Trajectory<S>,
    moves: Vec<S::Move>,
    pairs_left: u32,
    plies_beyond_root: i64,
) -> Result<Vec<BranchTrace<S>>, PolicyError> {
    let leaf_layer = pairs_left == 1;
    let expansions = parallel_map(moves.len(), ctx.spec.parallelism, |i| {
        expand_branch(ctx, trajectory, moves[i].clone(), leaf_layer, plies_beyond_root)
    })?;

    let mut traces: Vec<BranchTrace<S>> = Vec::with_capacity(expansions.len());
    let mut pending: Vec<(usize, Trajectory<S>, i64)> = Vec::new();
    for (idx, ex) in expansions.into_iter().enumerate() {
        match ex {
            Expansion::Settled(trace) => traces.push(trace),
            Expansion::Pending {
                trace,
                resulting,
                prune_key,
            } => {
                pending.push((idx, resulting, prune_key));
                traces.push(trace);
            }
        }
    }

    // Rank pending positions by the reply search score (already computed);
    // stable sort keeps canonical order among ties. Terminal branches are
    // settled above and never consume width.
    pending.sort_by_key(|p| std::cmp::Reverse(p.2));
    for (rank, (idx, resulting, _)) in pending.into_iter().enumerate() {
        if rank < ctx.spec.prune_width {
            let child_moves = resulting.current().legal_moves();
            debug_assert!(!child_moves.is_empty(), "pending branch is ongoing");
            let children = expand_layer(
                ctx,
                &resulting,
                child_moves,
                pairs_left - 1,
                plies_beyond_root + 2,
            )?;
            let best = children
                .iter()
                .filter_map(|c| c.evaluation)
                .max()
                .expect("an expanded layer settles at least one branch");
            traces[idx].evaluation = Some(best);
            traces[idx].children = children;
        } else {
            traces[idx].pruned = true;
        }
    }
    Ok(traces)
}

fn expand_branch<S: GameState>(
    ctx: &ExpandCtx<'_, S>,
    trajectory: &Trajectory<S>,
    candidate: S::Move,
    leaf_layer: bool,
    plies_beyond_root: i64,
) -> Result<Expansion<S>, PolicyError> {
    let engine_err = |source| PolicyError::Engine {
        branch: candidate.to_string(),
        source,
    };

    let after_own = trajectory
        .extended(candidate.clone())
        .expect("generated move is legal");
    let status = after_own.current().status();
    let mut trace = blank_trace::<S>(candidate.clone(), after_own.current().key());
    if status.is_terminal() {
        trace.evaluation = Some(terminal_branch_score(&status, ctx.player, plies_beyond_root));
        return Ok(Expansion::Settled(trace));
    }

    let reply_probe = ctx
        .nominal
        .probe(&after_own, ctx.spec.nominal_budget)
        .map_err(engine_err)?;
    ctx.calls.fetch_add(1, Ordering::Relaxed);
    let reply = reply_probe.best_move.clone();
    let after_reply = after_own.extended(reply.clone()).map_err(|_| {
        engine_err(EngineError::IllegalBestMove {
            notation: reply.to_string(),
            fen: after_own.current().key(),
        })
    })?;
    trace.reply = Some(reply);
    trace.reply_score = Some(reply_probe.score);
    trace.state_key = after_reply.current().key();

    let status = after_reply.current().status();
    if status.is_terminal() {
        trace.evaluation = Some(terminal_branch_score(
            &status,
            ctx.player,
            plies_beyond_root + 1,
        ));
        return Ok(Expansion::Settled(trace));
    }
    if leaf_layer {
        let probe = ctx
            .evaluator
            .probe(&after_reply, ctx.spec.evaluator_budget)
            .map_err(engine_err)?;
        ctx.calls.fetch_add(1, Ordering::Relaxed);
        trace.evaluation = Some(probe.score.normalized(ctx.player));
        trace.raw_score = Some(probe.score);
        return Ok(Expansion::Settled(trace));
    }
    let prune_key = reply_probe.score.normalized(ctx.player);
    Ok(Expansion::Pending {
        trace,
        resulting: after_reply,
        prune_key,
    })
}

/// Compare the lookahead's choice against the evaluator engine's own move
/// at the root; play the engine's move when it scores strictly higher.
pub fn fortify<S: GameState>(
    trajectory: &Trajectory<S>,
    mut candidate: MoveDecision<S>,
    evaluator: &dyn Searcher<S>,
    spec: &LookaheadSpec,
) -> Result<MoveDecision<S>, PolicyError> {
    if candidate.branches.len() == 1 {
        // A forced move cannot be fortified differently.
        return Ok(candidate);
    }
    let started = Instant::now();
    let probe = evaluator
        .probe(trajectory, spec.evaluator_budget)
        .map_err(|source| PolicyError::Engine {
            branch: candidate.chosen.to_string(),
            source,
        })?;
    let base_move = probe.best_move.clone();
    let base_eval = probe.score.normalized(candidate.player);
    let lookahead_move = candidate.chosen.clone();
    let lookahead_eval = candidate
        .chosen_branch()
        .evaluation
        .expect("chosen branch of a multi-move decision is evaluated");

    let switched = base_move != lookahead_move && base_eval > lookahead_eval;
    if switched {
        debug_assert!(
            candidate.branches.iter().any(|b| b.candidate == base_move),
            "the first layer is exact, so the base move has a trace"
        );
        candidate.chosen = base_move.clone();
        for branch in &mut candidate.branches {
            branch.chosen = branch.candidate == candidate.chosen;
        }
    }
    candidate.fortification = Some(FortifyRecord {
        base_move,
        base_raw: probe.score,
        base_eval,
        lookahead_move,
        lookahead_eval,
        switched,
    });
    candidate.engine_calls += 1;
    candidate.wall_time += started.elapsed();
    Ok(candidate)
}

fn legal_or_err<S: GameState>(trajectory: &Trajectory<S>) -> Result<Vec<S::Move>, PolicyError> {
    let moves = trajectory.current().legal_moves();
    if moves.is_empty() {
        return Err(PolicyError::NoLegalMoves {
            key: trajectory.current().key(),
        });
    }
    Ok(moves)
}

/// A lone legal move is forced: no engine calls at all.
fn forced<S: GameState>(
    trajectory: &Trajectory<S>,
    moves: &[S::Move],
    player: S::Player,
    started: Instant,
) -> Option<MoveDecision<S>> {
    if moves.len() != 1 {
        return None;
    }
    let only = moves[0].clone();
    let after = trajectory
        .extended(only.clone())
        .expect("generated move is legal");
    let mut trace = blank_trace::<S>(only.clone(), after.current().key());
    trace.chosen = true;
    Some(MoveDecision {
        chosen: only,
        player,
        branches: vec![trace],
        fortification: None,
        engine_calls: 0,
        wall_time: started.elapsed(),
    })
}

fn blank_trace<S: GameState>(candidate: S::Move, state_key: String) -> BranchTrace<S> {
    BranchTrace {
        candidate,
        reply: None,
        reply_score: None,
        state_key,
        raw_score: None,
        evaluation: None,
        pruned: false,
        chosen: false,
        children: Vec::new(),
    }
}

/// Argmax over evaluated branches; a strictly greater score replaces, so
/// ties resolve to the canonically first move.
fn decide<S: GameState>(
    mut traces: Vec<BranchTrace<S>>,
    player: S::Player,
    engine_calls: u32,
    started: Instant,
) -> MoveDecision<S> {
    let mut best: Option<(i64, usize)> = None;
    for (i, trace) in traces.iter().enumerate() {
        if let Some(eval) = trace.evaluation {
            if best.is_none_or(|(b, _)| eval > b) {
                best = Some((eval, i));
            }
        }
    }
    let (_, chosen_idx) = best.expect("at least one branch survives pruning");
    traces[chosen_idx].chosen = true;
    MoveDecision {
        chosen: traces[chosen_idx].candidate.clone(),
        player,
        branches: traces,
        fortification: None,
        engine_calls,
        wall_time: started.elapsed(),
    }
}

/// Canonical score of a terminal reached inside the lookahead, counted in
/// plies beyond the candidate move: a mate delivered by the candidate
/// itself scores the full MATE_BASE, the nominal reply mating us scores
/// -(MATE_BASE - 1), and so on — shorter forced outcomes dominate.
fn terminal_branch_score<P: PlayerId>(status: &Status<P>, player: P, plies_beyond: i64) -> i64 {
    match status {
        Status::Win(winner) if *winner == player => MATE_BASE - plies_beyond,
        Status::Win(_) => -(MATE_BASE - plies_beyond),
        Status::Draw(_) => 0,
        Status::Ongoing => unreachable!("terminal score of an ongoing position"),
    }
}

/// Map `f` over `0..n` preserving index order in the output; `workers`
/// threads pull indices from a shared counter. Results are written into
/// per-index slots, so scheduling cannot affect the outcome; the first
/// error by index wins, keeping error reporting deterministic too.
fn parallel_map<T, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>, PolicyError>
where
    T: Send,
    F: Fn(usize) -> Result<T, PolicyError> + Sync,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let slots: Vec<Mutex<Option<Result<T, PolicyError>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let result = f(i);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    let mut out = Vec::with_capacity(n);
    for slot in slots {
        out.push(slot.into_inner().unwrap().expect("every slot was filled")?);
    }
    Ok(out)
}

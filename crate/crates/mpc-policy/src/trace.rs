//! Line-delimited decision traces: one JSON object per branch, nested
//! layers flattened with a path back to their root move.
//!
//! Fields per line: `game`, `ply`, `position` (caller context), `path`
//! (root move for nested branches, empty at the root layer), `layer`
//! (1-based lookahead layer), `move`, `reply`, `reply_score`, `raw_score`
//! (engine scores as display strings), `eval` (normalized integer, null
//! when pruned), `pruned`, `chosen`, and on the deciding layer's last
//! line a `fortified` object when fortification ran.

use std::fmt::Display;
use std::io::{self, Write};

use game_core::GameState;
use serde_json::json;

use crate::{BranchTrace, MoveDecision};

/// Where a decision happened, supplied by the caller (match harness).
#[derive(Debug, Clone)]
pub struct TraceContext {
    pub game: String,
    pub ply: u32,
    pub position: String,
}

pub fn write_decision<W, S>(
    w: &mut W,
    ctx: &TraceContext,
    decision: &MoveDecision<S>,
) -> io::Result<()>
where
    W: Write,
    S: GameState,
    S::Player: Display,
{
    for branch in &decision.branches {
        write_branch(w, ctx, decision, branch, "", 1)?;
    }
    Ok(())
}

fn write_branch<W, S>(
    w: &mut W,
    ctx: &TraceContext,
    decision: &MoveDecision<S>,
    branch: &BranchTrace<S>,
    path: &str,
    layer: u32,
) -> io::Result<()>
where
    W: Write,
    S: GameState,
    S::Player: Display,
{
    let fortified = if layer == 1 && branch.chosen {
        decision.fortification.as_ref().map(|f| {
            json!({
                "base_move": f.base_move.to_string(),
                "base_raw": f.base_raw.to_string(),
                "base_eval": f.base_eval,
                "lookahead_move": f.lookahead_move.to_string(),
                "lookahead_eval": f.lookahead_eval,
                "switched": f.switched,
            })
        })
    } else {
        None
    };
    let record = json!({
        "game": ctx.game,
        "ply": ctx.ply,
        "position": ctx.position,
        "path": path,
        "layer": layer,
        "move": branch.candidate.to_string(),
        "reply": branch.reply.as_ref().map(|m| m.to_string()),
        "reply_score": branch.reply_score.as_ref().map(|s| s.to_string()),
        "raw_score": branch.raw_score.as_ref().map(|s| s.to_string()),
        "eval": branch.evaluation,
        "state": branch.state_key,
        "pruned": branch.pruned,
        "chosen": branch.chosen,
        "fortified": fortified,
    });
    writeln!(w, "{record}")?;

    let child_path = if path.is_empty() {
        branch.candidate.to_string()
    } else {
        format!("{path}/{}", branch.candidate)
    };
    for child in &branch.children {
        write_branch(w, ctx, decision, child, &child_path, layer + 1)?;
    }
    Ok(())
}

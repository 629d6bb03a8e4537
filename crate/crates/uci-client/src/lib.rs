//! Drive external UCI engines as subprocesses (or the built-in stub as an
//! in-process thread): handshake, option setting, budgeted search queries,
//! score extraction, pooling for parallel branch evaluation.
//!
//! Every score leaving this crate carries its perspective; converting to a
//! single ordered integer happens in exactly one place,
//! [`Score::normalized`], which keeps sign conventions from drifting.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use stub_engine::StubParams;

mod engine;
mod error;
mod io;
mod pool;
mod score;

pub use engine::{EngineHandle, SearchResult};
pub use error::EngineError;
pub use io::{EngineIo, RecvResult, WireDirection, WireEvent, WireLog};
pub use pool::EnginePool;
pub use score::{Score, ScoreValue, MATE_BASE};

/// What to run as the engine process.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Executable {
    /// External engine binary, spoken to over stdin/stdout.
    Path(PathBuf),
    /// The built-in deterministic stub on a background thread. Hermetic:
    /// tests and reproducible runs need no external binaries.
    BuiltinStub(StubParams),
}

/// Per-query search budget. Wall-clock budgets are for real engines;
/// depth budgets keep tests independent of machine speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Movetime(u64),
    Depth(u32),
    Nodes(u64),
}

impl Budget {
    pub fn amount(&self) -> u64 {
        match self {
            Budget::Movetime(ms) => *ms,
            Budget::Depth(d) => *d as u64,
            Budget::Nodes(n) => *n,
        }
    }

    fn go_command(&self) -> String {
        match self {
            Budget::Movetime(ms) => format!("go movetime {ms}"),
            Budget::Depth(d) => format!("go depth {d}"),
            Budget::Nodes(n) => format!("go nodes {n}"),
        }
    }
}

/// How much engine state survives between queries. Engines are treated as
/// memoryless; real ones keep hash tables, so the knob is explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetPolicy {
    /// `ucinewgame` before every query: cheap approximation of
    /// memorylessness.
    #[default]
    NewgamePerQuery,
    /// Kill and relaunch the process before every query: strict
    /// memorylessness, at a cost.
    RestartPerQuery,
    /// Keep whatever the engine accumulates.
    Persistent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineConfig {
    pub executable: Executable,
    /// UCI options applied at launch, in order. Defaults pin the engine to
    /// one search thread and a minimal, cleared hash.
    #[serde(default = "default_options")]
    pub options: Vec<(String, String)>,
    pub budget: Budget,
    #[serde(default)]
    pub reset_policy: ResetPolicy,
}

fn default_options() -> Vec<(String, String)> {
    vec![
        ("Threads".to_string(), "1".to_string()),
        ("Hash".to_string(), "1".to_string()),
    ]
}

impl EngineConfig {
    pub fn external(path: impl Into<PathBuf>, budget: Budget) -> EngineConfig {
        EngineConfig {
            executable: Executable::Path(path.into()),
            options: default_options(),
            budget,
            reset_policy: ResetPolicy::default(),
        }
    }

    /// Built-in stub at a fixed search depth.
    pub fn stub(depth: u32) -> EngineConfig {
        EngineConfig {
            executable: Executable::BuiltinStub(StubParams::with_depth(depth)),
            options: default_options(),
            budget: Budget::Depth(depth),
            reset_policy: ResetPolicy::default(),
        }
    }

    /// Built-in stub with full parameter control (fault injection etc.).
    pub fn stub_with(params: StubParams) -> EngineConfig {
        EngineConfig {
            budget: Budget::Depth(params.depth),
            executable: Executable::BuiltinStub(params),
            options: default_options(),
            reset_policy: ResetPolicy::default(),
        }
    }
}

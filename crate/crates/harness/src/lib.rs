//! Match harness: builds players (raw engines or lookahead players),
//! generates openings, plays adjudicated games, tallies 1/0.5/0 scores,
//! and exports PGN, game records, and per-decision trace logs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use game_core::chess::Color;
use mpc_policy::LookaheadSpec;
use uci_client::{Budget, EngineConfig};

pub mod cli;
mod game;
mod match_runner;
mod openings;
mod pgn;
pub mod selfcheck;

pub use game::{play_game, GameError, GameRecord, GameResult, OpeningStart, PlayOptions};
pub use match_runner::{run_match, MatchOutput, MatchScore};
pub use openings::generate_openings;
pub use pgn::export_pgn;

/// A participant: either an engine played as-is, or the lookahead player
/// wrapping an evaluator engine and (except for half-step) a nominal
/// opponent engine.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayerKind {
    RawEngine {
        engine: EngineConfig,
    },
    Mpc {
        lookahead: LookaheadSpec,
        evaluator: EngineConfig,
        #[serde(default)]
        nominal: Option<EngineConfig>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: PlayerKind,
}

impl PlayerSpec {
    pub fn raw(name: impl Into<String>, engine: EngineConfig) -> PlayerSpec {
        PlayerSpec {
            name: name.into(),
            kind: PlayerKind::RawEngine { engine },
        }
    }

    pub fn mpc(
        name: impl Into<String>,
        lookahead: LookaheadSpec,
        evaluator: EngineConfig,
        nominal: Option<EngineConfig>,
    ) -> PlayerSpec {
        PlayerSpec {
            name: name.into(),
            kind: PlayerKind::Mpc {
                lookahead,
                evaluator,
                nominal,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let PlayerKind::Mpc {
            lookahead, nominal, ..
        } = &self.kind
        {
            lookahead
                .validate()
                .map_err(|msg| ConfigError::Invalid(format!("player {}: {msg}", self.name)))?;
            let half = matches!(lookahead.variant, mpc_policy::Variant::HalfStep);
            if half && nominal.is_some() {
                return Err(ConfigError::Invalid(format!(
                    "player {}: half_step uses no nominal opponent — drop the nominal config",
                    self.name
                )));
            }
            if !half && nominal.is_none() {
                return Err(ConfigError::Invalid(format!(
                    "player {}: this lookahead variant needs a nominal engine config",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// The engine whose strength represents this player, used for opening
    /// generation defaults.
    pub fn primary_engine(&self) -> &EngineConfig {
        match &self.kind {
            PlayerKind::RawEngine { engine } => engine,
            PlayerKind::Mpc { evaluator, .. } => evaluator,
        }
    }
}

/// Whether the true opponent is served by the very engine pool the
/// lookahead uses for predictions (so predictions are exact) or by an
/// independent instance of the same configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpponentMode {
    Deterministic,
    #[default]
    Stochastic,
}

/// How the raw opponent's budget is set: as written in its config, or
/// pinned to what the lookahead player spends evaluating one legal move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRule {
    #[default]
    AsConfigured,
    PerBranchMatch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpeningPolicy {
    /// One FEN per opening slot; games start from these positions.
    FixedFens(Vec<String>),
    /// Fixed move sequences (coordinate notation) from the start position.
    FixedMoves(Vec<Vec<String>>),
    /// Engine self-play openings of the given length in plies.
    Generated { plies: u32 },
}

fn default_max_plies() -> u32 {
    400
}

fn default_parallel_games() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchConfig {
    pub white: PlayerSpec,
    pub black: PlayerSpec,
    pub games: u32,
    /// Play each opening from both colors, pairing games.
    #[serde(default = "default_true")]
    pub alternate_colors: bool,
    pub openings: OpeningPolicy,
    /// Games hitting this many plies are adjudicated as draws.
    #[serde(default = "default_max_plies")]
    pub max_plies: u32,
    #[serde(default)]
    pub opponent_mode: OpponentMode,
    #[serde(default)]
    pub budget_rule: BudgetRule,
    /// Where PGN, game records, and decision traces are written.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_parallel_games")]
    pub parallel_games: usize,
    /// Seeds the opening assignment order only.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
}

impl MatchConfig {
    pub fn from_toml(text: &str) -> Result<MatchConfig, ConfigError> {
        let config: MatchConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<MatchConfig, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.games < 1 {
            return Err(ConfigError::Invalid("games must be at least 1".into()));
        }
        if self.max_plies < 2 {
            return Err(ConfigError::Invalid("max_plies must be at least 2".into()));
        }
        if self.parallel_games < 1 {
            return Err(ConfigError::Invalid(
                "parallel_games must be at least 1".into(),
            ));
        }
        self.white.validate()?;
        self.black.validate()?;
        if let OpeningPolicy::FixedFens(fens) = &self.openings {
            if fens.is_empty() {
                return Err(ConfigError::Invalid("openings list is empty".into()));
            }
        }
        if self.opponent_mode == OpponentMode::Deterministic {
            self.validate_deterministic()?;
        }
        Ok(())
    }

    /// Deterministic mode routes the raw opponent through the lookahead
    /// player's nominal pool; the budgets must agree or predictions could
    /// not possibly match play.
    fn validate_deterministic(&self) -> Result<(), ConfigError> {
        for (mpc, raw) in [(&self.white, &self.black), (&self.black, &self.white)] {
            let PlayerKind::Mpc {
                lookahead,
                evaluator,
                nominal,
            } = &mpc.kind
            else {
                continue;
            };
            if !matches!(raw.kind, PlayerKind::RawEngine { .. }) {
                continue;
            }
            let Some(nominal) = nominal else { continue };
            let nominal_budget = lookahead.nominal_budget.unwrap_or(nominal.budget);
            if self.budget_rule == BudgetRule::PerBranchMatch {
                let evaluator_budget = lookahead.evaluator_budget.unwrap_or(evaluator.budget);
                if evaluator_budget != nominal_budget {
                    return Err(ConfigError::Invalid(
                        "deterministic mode with per_branch_match needs equal evaluator and \
                         nominal budgets, or predictions cannot equal play"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The budget a raw player actually searches with, given the rule and the
/// opposing player. `None` means "as its own config says".
pub fn effective_raw_budget(
    rule: BudgetRule,
    opposing: &PlayerSpec,
) -> Option<Budget> {
    match rule {
        BudgetRule::AsConfigured => None,
        BudgetRule::PerBranchMatch => match &opposing.kind {
            PlayerKind::Mpc {
                lookahead,
                evaluator,
                ..
            } => Some(lookahead.evaluator_budget.unwrap_or(evaluator.budget)),
            PlayerKind::RawEngine { .. } => None,
        },
    }
}

pub(crate) fn color_name(color: Color) -> &'static str {
    match color {
        Color::White => "white",
        Color::Black => "black",
    }
}

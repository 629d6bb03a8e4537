//! Opening generation: an engine plays itself for a fixed number of plies
//! to reach varied positions. Deterministic engines produce one line, so
//! duplicates are discarded and regenerated at a perturbed budget.

use game_core::chess::{ChessMove, ChessState};
use game_core::{GameState, Trajectory};
use uci_client::{Budget, EngineConfig, EngineError, EngineHandle};

#[derive(Debug, thiserror::Error)]
pub enum OpeningError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("could not reach {wanted} distinct openings (got {got}) after {attempts} attempts")]
    DuplicateExhaustion {
        wanted: u32,
        got: usize,
        attempts: u32,
    },
    #[error("opening generation needs an even, non-negative ply count, got {0}")]
    OddPlies(u32),
}

/// Nudges the search budget so a deterministic engine plays a different
/// line on the next attempt.
fn perturbed(budget: Budget, attempt: u32) -> Budget {
    match budget {
        Budget::Movetime(ms) => Budget::Movetime(ms + (attempt as u64 * ms).div_ceil(10)),
        Budget::Depth(d) => Budget::Depth(d + attempt),
        Budget::Nodes(n) => Budget::Nodes(n + (attempt as u64 * n).div_ceil(10)),
    }
}

pub fn generate_openings(
    engine: &EngineConfig,
    count: u32,
    plies: u32,
) -> Result<Vec<Vec<ChessMove>>, OpeningError> {
    assert!(count >= 1);
    if !plies.is_multiple_of(2) {
        return Err(OpeningError::OddPlies(plies));
    }
    if plies == 0 {
        // Everything starts at the initial position.
        return Ok(vec![Vec::new()]);
    }

    let mut handle = EngineHandle::launch(engine.clone())?;
    let mut openings: Vec<Vec<ChessMove>> = Vec::new();
    let mut attempt = 0u32;
    let max_attempts = count * 8;

    while (openings.len() as u32) < count {
        if attempt >= max_attempts {
            let got = openings.len();
            return Err(OpeningError::DuplicateExhaustion {
                wanted: count,
                got,
                attempts: attempt,
            });
        }
        let budget = perturbed(engine.budget, attempt);
        attempt += 1;

        let mut trajectory = Trajectory::new(ChessState::initial());
        let mut aborted = false;
        for _ in 0..plies {
            if trajectory.current().status().is_terminal() {
                aborted = true;
                break;
            }
            let result = handle.search(&trajectory, Some(budget))?;
            trajectory
                .push(result.best_move)
                .expect("search returns legal moves");
        }
        if aborted {
            continue;
        }
        let line = trajectory.moves().to_vec();
        if !openings.contains(&line) {
            openings.push(line);
        }
    }

    handle.shutdown();
    Ok(openings)
}

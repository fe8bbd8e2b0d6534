//! Dispatch from a configuration to a solver, in the current process.

use crate::absref::solve_absref;
use crate::aiger::{partition_inputs, Circuit};
use crate::compositional::{solve_compositional, Aggregation};
use crate::game::{build_game, build_transitions, GameResult, SafetyGame};
use crate::synthesis::synthesize;

use super::{Algorithm, ArenaError, Mode, SolverConfig};

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub realizable: bool,
    /// Synthesis mode, realizable answers only.
    pub solution: Option<Circuit>,
    /// The member that answered, for portfolios.
    pub answered_by: String,
}

fn err(e: impl std::fmt::Display) -> ArenaError {
    ArenaError::Solver(e.to_string())
}

fn solve_game(cfg: &SolverConfig, c: &Circuit) -> Result<(SafetyGame, GameResult), ArenaError> {
    let p = partition_inputs(c).map_err(err)?;
    let config = cfg.bdd_config();
    let how = match cfg.algorithm {
        Algorithm::Global => Some(Aggregation::Global),
        Algorithm::Incremental => Some(Aggregation::Incremental),
        Algorithm::BackForth => Some(Aggregation::BackAndForth),
        _ => None,
    };
    if let Some(how) = how {
        let g = build_transitions(c, &p, config).map_err(err)?;
        let r = solve_compositional(&g, c, how, cfg.compositional_options());
        return Ok((g, r));
    }
    let g = build_game(c, &p, config).map_err(err)?;
    let r = match cfg.algorithm {
        Algorithm::Classic => g.solve_classic(),
        Algorithm::Monolithic => g.solve_monolithic(),
        Algorithm::Absref => solve_absref(&g, cfg.mode == Mode::Synthesis),
        _ => unreachable!("handled above"),
    };
    Ok((g, r))
}

fn solve_sequential(cfg: &SolverConfig, c: &Circuit) -> Result<SolveOutput, ArenaError> {
    let (g, r) = solve_game(cfg, c)?;
    let solution = if r.realizable && cfg.mode == Mode::Synthesis {
        Some(synthesize(c, &g, &r).map_err(err)?.to_circuit())
    } else {
        None
    };
    Ok(SolveOutput {
        realizable: r.realizable,
        solution,
        answered_by: cfg.name.clone(),
    })
}

/// Runs the configured solver. Portfolio members run on their own threads,
/// each with its own BDD manager; the first answer wins and the others are
/// left to finish in the background (a worker process simply exits).
pub fn solve_circuit(cfg: &SolverConfig, c: &Circuit) -> Result<SolveOutput, ArenaError> {
    if cfg.algorithm != Algorithm::Portfolio {
        return solve_sequential(cfg, c);
    }
    #[cfg(target_arch = "wasm32")]
    {
        let mut last = Err(ArenaError::Solver("empty portfolio".into()));
        for m in &cfg.members {
            last = solve_circuit(&m.clone().with_mode(cfg.mode), c);
            if last.is_ok() {
                break;
            }
        }
        last
    }
    #[cfg(not(target_arch = "wasm32"))]
    {
        use std::sync::mpsc;
        let (tx, rx) = mpsc::channel();
        for m in &cfg.members {
            let m = m.clone().with_mode(cfg.mode);
            let c = c.clone();
            let tx = tx.clone();
            std::thread::spawn(move || {
                let _ = tx.send(solve_circuit(&m, &c));
            });
        }
        drop(tx);
        let mut last = Err(ArenaError::Solver("empty portfolio".into()));
        for r in rx {
            if r.is_ok() {
                return r;
            }
            last = r;
        }
        last
    }
}

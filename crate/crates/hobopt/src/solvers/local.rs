//! Greedy single-flip descent and uniform random search.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Assignment;
use crate::objective::BinaryObjective;
use crate::solvers::SolveResult;

/// Keep sweeping indices 0..N-1, committing every strictly improving flip,
/// until a full sweep changes nothing (at most N sweeps). The result never
/// evaluates worse than `start`.
pub fn greedy_bit_flip<O: BinaryObjective + ?Sized>(objective: &O, start: &Assignment) -> Assignment {
    assert_eq!(start.domain(), objective.domain(), "domain mismatch");
    assert_eq!(start.len(), objective.num_vars(), "length mismatch");
    let n = start.len();
    let mut current = start.clone();
    let mut current_val = objective.value(&current);
    for _pass in 0..n {
        let mut changed = false;
        for i in 0..n {
            current.flip(i);
            let val = objective.value(&current);
            if val < current_val {
                current_val = val;
                changed = true;
            } else {
                current.flip(i);
            }
        }
        if !changed {
            break;
        }
    }
    current
}

/// Draw `n_samples` uniform assignments and keep the best feasible one
/// (lowest objective). `None` means no sample satisfied the predicate.
pub fn random_search<O, F>(
    objective: &O,
    feasible: F,
    n_samples: usize,
    seed: u64,
) -> Result<Option<SolveResult>>
where
    O: BinaryObjective + ?Sized,
    F: Fn(&Assignment) -> bool,
{
    if n_samples == 0 {
        return Err(Error::InvalidConfig("random_search: n_samples must be >= 1".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Assignment, f64, usize)> = None;
    for sample in 0..n_samples {
        let point = Assignment::random(objective.num_vars(), objective.domain(), &mut rng);
        if !feasible(&point) {
            continue;
        }
        let value = objective.value(&point);
        if best.as_ref().is_none_or(|(_, b, _)| value < *b) {
            best = Some((point, value, sample));
        }
    }
    Ok(best.map(|(assignment, energy, sample)| SolveResult {
        finalists: vec![assignment.clone()],
        assignment,
        energy,
        restart_index: sample,
        wall_time: start.elapsed(),
    }))
}

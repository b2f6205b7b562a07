//! Exact and naive reference computations for small instances.
//!
//! Nothing here shares code with the incremental paths in [`crate::eval`]
//! or [`crate::neighbor`]; these functions recompute everything from the
//! definitions.

use alloc::vec;
use alloc::vec::Vec;

use crate::eval::PenaltyWeights;
use crate::instance::{Instance, Sense};

pub const MAX_BRUTE_FORCE_COLS: usize = 25;
pub const MAX_NAIVE_PAIR_COLS: usize = 200;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {n} columns, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("assignment has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Optimal objective and the lexicographically smallest optimal `X`,
    /// or `None` when no assignment is feasible.
    pub optimum: Option<(f64, Vec<usize>)>,
    pub enumerated: u64,
}

fn row_ok(sense: Sense, s: u32, b: u32) -> bool {
    match sense {
        Sense::Le => s <= b,
        Sense::Ge => s >= b,
        Sense::Eq => s == b,
    }
}

/// Enumerates all `2^n` assignments.
pub fn brute_force(inst: &Instance) -> Result<OracleResult, OracleError> {
    let n = inst.num_cols();
    if n > MAX_BRUTE_FORCE_COLS {
        return Err(OracleError::TooLarge {
            n,
            limit: MAX_BRUTE_FORCE_COLS,
        });
    }
    let m = inst.num_rows();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut activity = vec![0u32; m];
    let total: u64 = 1 << n;
    for mask in 0..total {
        activity.iter_mut().for_each(|s| *s = 0);
        let mut cost = 0.0;
        for j in 0..n {
            if mask >> j & 1 == 1 {
                cost += inst.cost(j);
                for &i in inst.col(j) {
                    activity[i as usize] += 1;
                }
            }
        }
        if !(0..m).all(|i| row_ok(inst.sense(i), activity[i], inst.rhs(i))) {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bc, bx)) => {
                cost < *bc || (cost == *bc && {
                    let x: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
                    x < *bx
                })
            }
        };
        if better {
            best = Some((cost, (0..n).filter(|&j| mask >> j & 1 == 1).collect()));
        }
    }
    Ok(OracleResult {
        optimum: best,
        enumerated: total,
    })
}

/// Penalized objective evaluated directly from its definition.
pub fn naive_ztilde(inst: &Instance, x: &[bool], w: &PenaltyWeights) -> f64 {
    let mut z = 0.0;
    for (j, _) in x.iter().enumerate().filter(|(_, &on)| on) {
        z += inst.cost(j);
    }
    for i in 0..inst.num_rows() {
        let s: i64 = inst.row(i).iter().filter(|&&j| x[j as usize]).count() as i64;
        let b = inst.rhs(i) as i64;
        let sense = inst.sense(i);
        if sense.has_upper() {
            z += w.plus(i) * (s - b).max(0) as f64;
        }
        if sense.has_lower() {
            z += w.minus(i) * (b - s).max(0) as f64;
        }
    }
    z
}

/// Best simultaneous flip of two distinct columns over all `O(n^2)` pairs,
/// by flipping and re-evaluating from scratch. Ties go to the smallest
/// `(j1, j2)`. Returns `(j1, j2, delta)` with `j1 < j2`.
pub fn naive_best_pair(
    inst: &Instance,
    x: &[bool],
    w: &PenaltyWeights,
) -> Result<Option<(usize, usize, f64)>, OracleError> {
    let n = inst.num_cols();
    if n > MAX_NAIVE_PAIR_COLS {
        return Err(OracleError::TooLarge {
            n,
            limit: MAX_NAIVE_PAIR_COLS,
        });
    }
    if x.len() != n {
        return Err(OracleError::Length {
            expected: n,
            got: x.len(),
        });
    }
    let base = naive_ztilde(inst, x, w);
    let mut y = x.to_vec();
    let mut best: Option<(usize, usize, f64)> = None;
    for j1 in 0..n {
        for j2 in j1 + 1..n {
            y[j1] = !y[j1];
            y[j2] = !y[j2];
            let d = naive_ztilde(inst, &y, w) - base;
            y[j1] = !y[j1];
            y[j2] = !y[j2];
            if best.is_none_or(|(_, _, bd)| d < bd) {
                best = Some((j1, j2, d));
            }
        }
    }
    Ok(best)
}

/// `|S_j1 ∩ S_j2|` by a double loop.
pub fn naive_similarity(inst: &Instance, j1: usize, j2: usize) -> u32 {
    let mut count = 0;
    for &a in inst.col(j1) {
        for &b in inst.col(j2) {
            if a == b {
                count += 1;
            }
        }
    }
    count
}

/// Top-`k` neighbors of `j1` from a full sort of every pairwise overlap,
/// with `k = min(|N(j1)|, cap)`.
pub fn naive_neighbor_row(inst: &Instance, j1: usize, cap: usize) -> Vec<(usize, u32)> {
    let mut all: Vec<(usize, u32)> = (0..inst.num_cols())
        .filter(|&j2| j2 != j1)
        .map(|j2| (j2, naive_similarity(inst, j1, j2)))
        .filter(|&(_, s)| s > 0)
        .collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(cap);
    all
}

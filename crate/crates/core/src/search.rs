//! 4-flip neighborhood local search.
//!
//! One pass searches, in order:
//!
//! 1. every single flip, taking the best improving one;
//! 2. swaps `j1: 1->0`, `j2: 0->1` with `j2` restricted to the neighbor row
//!    `L[j1]`, one sub-neighborhood per `j1` in ascending order of its
//!    removal gain, taking the best swap of the first improving block;
//! 3. double swaps along 4-paths/4-cycles of the k-NN graph:
//!    `j1 -> pi(j1)` and `j3 -> pi(j3)` with `j3` in `X ∩ L[pi(j1)]`, where
//!    `pi(j)` is the best swap partner recorded during step 2.
//!
//! Any applied move restarts the pass at step 1. The search ends when no
//! step improves or the budget runs out.

use alloc::vec;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::eval::SearchState;
use crate::neighbor::NeighborList;

const NO_PARTNER: u32 = u32::MAX;

/// Best swap partner `pi(j1)` and the swap gain observed when it was set.
#[derive(Clone, Debug)]
pub struct PiMap {
    partner: Vec<u32>,
    gain: Vec<f64>,
}

impl PiMap {
    pub fn new(n: usize) -> Self {
        PiMap {
            partner: vec![NO_PARTNER; n],
            gain: vec![0.0; n],
        }
    }

    pub fn get(&self, j1: usize) -> Option<(usize, f64)> {
        match self.partner[j1] {
            NO_PARTNER => None,
            p => Some((p as usize, self.gain[j1])),
        }
    }

    pub fn set(&mut self, j1: usize, partner: usize, gain: f64) {
        self.partner[j1] = partner as u32;
        self.gain[j1] = gain;
    }

    pub fn clear(&mut self, j1: usize) {
        self.partner[j1] = NO_PARTNER;
    }

    /// `pi(j1)` if it is defined and still outside `X`.
    fn live(&self, st: &SearchState<'_>, j1: usize) -> Option<(usize, f64)> {
        self.get(j1).filter(|&(p, _)| !st.contains(p))
    }
}

/// A move of the 4-flip neighborhood. Swaps list the column leaving `X`
/// first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    One(usize),
    Two(usize, usize),
    Four(usize, usize, usize, usize),
}

impl Move {
    pub fn columns(&self) -> impl Iterator<Item = usize> {
        let (buf, len) = match *self {
            Move::One(a) => ([a, 0, 0, 0], 1),
            Move::Two(a, b) => ([a, b, 0, 0], 2),
            Move::Four(a, b, c, d) => ([a, b, c, d], 4),
        };
        buf.into_iter().take(len)
    }
}

/// Result of scanning one neighborhood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scan {
    Found(Move, f64),
    Exhausted,
    OutOfBudget,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchCounters {
    pub flips: u64,
    pub moves1: u64,
    pub moves2: u64,
    pub moves4: u64,
    pub pairs_evaluated: u64,
    pub quads_evaluated: u64,
}

impl core::ops::AddAssign for SearchCounters {
    fn add_assign(&mut self, o: Self) {
        self.flips += o.flips;
        self.moves1 += o.moves1;
        self.moves2 += o.moves2;
        self.moves4 += o.moves4;
        self.pairs_evaluated += o.pairs_evaluated;
        self.quads_evaluated += o.quads_evaluated;
    }
}

/// Best solution of the hard-constrained problem seen during a search.
#[derive(Clone, Debug, PartialEq)]
pub struct Incumbent {
    /// Sorted members of `X`.
    pub members: Vec<usize>,
    pub objective: f64,
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug)]
pub struct FnlsOutcome {
    pub best: Option<Incumbent>,
    pub counters: SearchCounters,
    /// True when the search stopped on the budget rather than at a local
    /// optimum.
    pub out_of_budget: bool,
}

/// Best improving single flip, ties by lowest index.
pub fn search_nb1(st: &SearchState<'_>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..st.instance().num_cols() {
        let g = st.flip_gain(j);
        if best.is_none_or(|(_, bg)| g < bg) {
            best = Some((j, g));
        }
    }
    best.filter(|&(_, g)| st.improves(g))
}

/// Restricted 2-flip search. Refreshes `pi(j1)` for every scanned `j1` and
/// returns the best swap of the first sub-neighborhood that improves.
pub fn search_nb2(
    st: &SearchState<'_>,
    nl: &mut NeighborList,
    pi: &mut PiMap,
    budget: &impl Budget,
    counters: &mut SearchCounters,
) -> Scan {
    let inst = st.instance();
    let mut order: Vec<(f64, u32)> = st
        .solution()
        .members()
        .iter()
        .map(|&j| (st.flip_gain(j as usize), j))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for &(_, j1) in &order {
        if budget.exhausted() {
            return Scan::OutOfBudget;
        }
        let j1 = j1 as usize;
        nl.ensure(inst, j1);
        let mut best: Option<(usize, f64)> = None;
        for &j2 in nl.get(j1).unwrap().cols() {
            let j2 = j2 as usize;
            if st.contains(j2) {
                continue;
            }
            let g = st.pair_gain_unchecked(j1, j2);
            counters.pairs_evaluated += 1;
            if best.is_none_or(|(bj, bg)| g < bg || (g == bg && j2 < bj)) {
                best = Some((j2, g));
            }
        }
        match best {
            Some((j2, g)) => {
                pi.set(j1, j2, g);
                if st.improves(g) {
                    return Scan::Found(Move::Two(j1, j2), g);
                }
            }
            None => pi.clear(j1),
        }
    }
    Scan::Exhausted
}

/// Restricted 4-flip search over `j1 -> pi(j1)`, `j3 -> pi(j3)` with
/// `j3 ∈ X ∩ L[pi(j1)]`. Returns the best double swap of the first `j1`
/// block that improves.
pub fn search_nb4(
    st: &mut SearchState<'_>,
    nl: &mut NeighborList,
    pi: &PiMap,
    budget: &impl Budget,
    counters: &mut SearchCounters,
) -> Scan {
    let inst = st.instance();
    let mut order: Vec<(f64, u32)> = st
        .solution()
        .members()
        .iter()
        .filter_map(|&j| pi.live(st, j as usize).map(|(_, g)| (g, j)))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for &(_, j1) in &order {
        if budget.exhausted() {
            return Scan::OutOfBudget;
        }
        let j1 = j1 as usize;
        let (p1, _) = pi.get(j1).unwrap();
        nl.ensure(inst, p1);
        let mut best: Option<(usize, usize, f64)> = None;
        for &j3 in nl.get(p1).unwrap().cols() {
            let j3 = j3 as usize;
            if j3 == j1 || !st.contains(j3) {
                continue;
            }
            let Some((p3, _)) = pi.live(st, j3) else {
                continue;
            };
            if p3 == p1 {
                continue;
            }
            let g = st.quad_gain_unchecked(j1, p1, j3, p3);
            counters.quads_evaluated += 1;
            if best.is_none_or(|(_, _, bg)| g < bg) {
                best = Some((j3, p3, g));
            }
        }
        if let Some((j3, p3, g)) = best {
            if st.improves(g) {
                return Scan::Found(Move::Four(j1, p1, j3, p3), g);
            }
        }
    }
    Scan::Exhausted
}

fn apply_move(st: &mut SearchState<'_>, pi: &mut PiMap, mv: Move, counters: &mut SearchCounters) {
    for j in mv.columns() {
        if st.contains(j) {
            pi.clear(j);
        }
        st.apply_flip(j);
        counters.flips += 1;
    }
    match mv {
        Move::One(_) => counters.moves1 += 1,
        Move::Two(..) => counters.moves2 += 1,
        Move::Four(..) => counters.moves4 += 1,
    }
}

fn record(st: &SearchState<'_>, budget: &impl Budget, best: &mut Option<Incumbent>) {
    if !st.is_feasible() || best.as_ref().is_some_and(|b| st.cost() >= b.objective) {
        return;
    }
    // Re-sum in index order so the value matches a fresh validation bit for bit.
    let members = st.solution().sorted_members();
    let objective = members.iter().fold(0.0, |acc, &j| acc + st.instance().cost(j));
    if best.as_ref().is_none_or(|b| objective < b.objective) {
        *best = Some(Incumbent {
            members,
            objective,
            elapsed_secs: budget.elapsed_secs(),
        });
    }
}

/// Runs the 4-flip local search from the current state until it is locally
/// optimal for all three neighborhoods or `budget` is exhausted. The neighbor
/// list and the partner map persist across calls.
pub fn fnls4(
    st: &mut SearchState<'_>,
    nl: &mut NeighborList,
    pi: &mut PiMap,
    budget: &impl Budget,
) -> FnlsOutcome {
    let mut counters = SearchCounters::default();
    let mut best = None;
    record(st, budget, &mut best);
    let mut out_of_budget = false;

    loop {
        if budget.exhausted() {
            out_of_budget = true;
            break;
        }
        if let Some((j, _)) = search_nb1(st) {
            apply_move(st, pi, Move::One(j), &mut counters);
            record(st, budget, &mut best);
            continue;
        }
        match search_nb2(st, nl, pi, budget, &mut counters) {
            Scan::Found(mv, _) => {
                apply_move(st, pi, mv, &mut counters);
                record(st, budget, &mut best);
                continue;
            }
            Scan::OutOfBudget => {
                out_of_budget = true;
                break;
            }
            Scan::Exhausted => {}
        }
        match search_nb4(st, nl, pi, budget, &mut counters) {
            Scan::Found(mv, _) => {
                apply_move(st, pi, mv, &mut counters);
                record(st, budget, &mut best);
            }
            Scan::OutOfBudget => {
                out_of_budget = true;
                break;
            }
            Scan::Exhausted => break,
        }
    }

    FnlsOutcome {
        best,
        counters,
        out_of_budget,
    }
}

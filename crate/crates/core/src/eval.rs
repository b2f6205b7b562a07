//! Penalized objective and incremental gain evaluation.
//!
//! For an assignment `x` with row activities `s_i(x)`, the penalized
//! objective is
//!
//! ```text
//! z~(x) = sum_j c_j x_j + sum_{i in L∪E} w+_i |s_i - b_i|_+ + sum_{i in G∪E} w-_i |b_i - s_i|_+
//! ```
//!
//! [`SearchState`] caches, for every column, the penalty part of its 1-flip
//! gain split into the overage term (`dp`) and the shortage term (`dq`). For
//! `j` outside `X` the caches hold the 0->1 gains, for `j` in `X` the 1->0
//! gains, so [`SearchState::flip_gain`] is a constant-time lookup. A flip of
//! column `j` touches every column sharing a row with it.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Instance, InstanceError, Solution};

/// Number of applied flips between two from-scratch refreshes of the cached
/// objective values.
pub const REFRESH_INTERVAL: u32 = 10_000;

const RELATIVE_EPS: f64 = 1e-9;

#[inline]
fn pos(v: i64) -> i64 {
    v.max(0)
}

// Per-row increments of y+ and y- for a unit change of s, written in the
// |.|_+ form. `*_up` is the effect of adding a covering column at activity
// `s`, `*_down` of removing one.

#[inline]
fn dy_plus_up(s: i64, b: i64) -> i64 {
    pos((s + 1) - b) - pos(s - b)
}

#[inline]
fn dy_minus_up(s: i64, b: i64) -> i64 {
    pos(b - (s + 1)) - pos(b - s)
}

#[inline]
fn dy_plus_down(s: i64, b: i64) -> i64 {
    pos((s - 1) - b) - pos(s - b)
}

#[inline]
fn dy_minus_down(s: i64, b: i64) -> i64 {
    pos(b - (s - 1)) - pos(b - s)
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("move precondition violated: {0}")]
    Precondition(&'static str),
    #[error("weight vector for {what} has length {got}, expected {expected}")]
    WeightLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("penalty weight of row {row} is negative or not finite")]
    BadWeight { row: usize },
}

/// Working penalty weights together with the fixed original weights.
///
/// Entries of families a row does not belong to (overage for `G` rows,
/// shortage for `L` rows) are held at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyWeights {
    plus: Vec<f64>,
    minus: Vec<f64>,
    original_plus: Vec<f64>,
    original_minus: Vec<f64>,
}

impl PenaltyWeights {
    /// Every applicable weight set to `value`, originals equal to working.
    pub fn uniform(inst: &Instance, value: f64) -> Self {
        let plus: Vec<f64> = inst
            .senses()
            .iter()
            .map(|s| if s.has_upper() { value } else { 0.0 })
            .collect();
        let minus: Vec<f64> = inst
            .senses()
            .iter()
            .map(|s| if s.has_lower() { value } else { 0.0 })
            .collect();
        PenaltyWeights {
            original_plus: plus.clone(),
            original_minus: minus.clone(),
            plus,
            minus,
        }
    }

    /// Explicit weights; originals equal to the given working weights.
    /// Entries for non-applicable families are zeroed.
    pub fn from_vecs(
        inst: &Instance,
        mut plus: Vec<f64>,
        mut minus: Vec<f64>,
    ) -> Result<Self, EvalError> {
        let m = inst.num_rows();
        for (what, v) in [("overage", &plus), ("shortage", &minus)] {
            if v.len() != m {
                return Err(EvalError::WeightLength {
                    what,
                    expected: m,
                    got: v.len(),
                });
            }
        }
        for i in 0..m {
            if !(plus[i] >= 0.0 && plus[i].is_finite() && minus[i] >= 0.0 && minus[i].is_finite())
            {
                return Err(EvalError::BadWeight { row: i });
            }
            let sense = inst.sense(i);
            if !sense.has_upper() {
                plus[i] = 0.0;
            }
            if !sense.has_lower() {
                minus[i] = 0.0;
            }
        }
        Ok(PenaltyWeights {
            original_plus: plus.clone(),
            original_minus: minus.clone(),
            plus,
            minus,
        })
    }

    #[inline]
    pub fn plus(&self, row: usize) -> f64 {
        self.plus[row]
    }

    #[inline]
    pub fn minus(&self, row: usize) -> f64 {
        self.minus[row]
    }

    pub fn plus_all(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus_all(&self) -> &[f64] {
        &self.minus
    }

    pub fn original_plus(&self) -> &[f64] {
        &self.original_plus
    }

    pub fn original_minus(&self) -> &[f64] {
        &self.original_minus
    }

    /// Multiplies every working weight by `beta`.
    pub fn scale(&mut self, beta: f64) {
        for w in self.plus.iter_mut().chain(self.minus.iter_mut()) {
            *w *= beta;
        }
    }

    /// Adds `delta` to working weight of the given family, clamped at the
    /// original value. Returns true when the clamp bound.
    pub fn raise_plus(&mut self, row: usize, delta: f64) -> bool {
        raise(&mut self.plus[row], self.original_plus[row], delta)
    }

    pub fn raise_minus(&mut self, row: usize, delta: f64) -> bool {
        raise(&mut self.minus[row], self.original_minus[row], delta)
    }

    /// True when every working weight is an integer.
    pub fn is_integral(&self) -> bool {
        self.plus
            .iter()
            .chain(self.minus.iter())
            .all(|&w| w == (w as i64) as f64 && w < 9.0e15)
    }
}

fn raise(w: &mut f64, cap: f64, delta: f64) -> bool {
    let next = *w + delta;
    if next > cap {
        *w = cap;
        true
    } else {
        *w = next;
        false
    }
}

/// Strict-improvement test used by every search step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// Integer data: a move improves iff its gain is negative.
    Exact,
    /// A move improves iff its gain is below `-eps * max(1, |z|)`.
    Relative(f64),
}

impl Tolerance {
    pub fn for_data(inst: &Instance, weights: &PenaltyWeights) -> Self {
        if inst.has_integer_costs() && weights.is_integral() {
            Tolerance::Exact
        } else {
            Tolerance::Relative(RELATIVE_EPS)
        }
    }

    #[inline]
    pub fn threshold(self, z: f64) -> f64 {
        match self {
            Tolerance::Exact => 0.0,
            Tolerance::Relative(eps) => eps * z.abs().max(1.0),
        }
    }

    #[inline]
    pub fn improves(self, gain: f64, z: f64) -> bool {
        gain < -self.threshold(z)
    }
}

/// Current assignment plus every cache needed for O(1) 1-flip gains.
#[derive(Clone, Debug)]
pub struct SearchState<'a> {
    inst: &'a Instance,
    weights: PenaltyWeights,
    x: Solution,
    activity: Vec<u32>,
    ztilde: f64,
    cost: f64,
    /// Overage part of the 1-flip gain (up-gain for j outside X, down-gain
    /// for j in X).
    dp: Vec<f64>,
    /// Shortage part, same convention.
    dq: Vec<f64>,
    violated: usize,
    tol: Tolerance,
    flips: u64,
    since_refresh: u32,
    undo: Vec<(u32, u32)>,
}

impl<'a> SearchState<'a> {
    /// Builds all caches from scratch in O(nnz).
    pub fn new(inst: &'a Instance, x0: Solution, weights: PenaltyWeights) -> Result<Self, EvalError> {
        if x0.len() != inst.num_cols() {
            return Err(InstanceError::LengthMismatch {
                what: "solution",
                expected: inst.num_cols(),
                got: x0.len(),
            }
            .into());
        }
        if weights.plus.len() != inst.num_rows() || weights.minus.len() != inst.num_rows() {
            return Err(EvalError::WeightLength {
                what: "state",
                expected: inst.num_rows(),
                got: weights.plus.len().min(weights.minus.len()),
            });
        }
        let n = inst.num_cols();
        let tol = Tolerance::for_data(inst, &weights);
        let mut st = SearchState {
            inst,
            weights,
            x: x0,
            activity: vec![0; inst.num_rows()],
            ztilde: 0.0,
            cost: 0.0,
            dp: vec![0.0; n],
            dq: vec![0.0; n],
            violated: 0,
            tol,
            flips: 0,
            since_refresh: 0,
            undo: Vec::new(),
        };
        st.recompute_all();
        Ok(st)
    }

    /// Rebuilds every cached field from `x` and the current weights.
    pub fn recompute_all(&mut self) {
        let inst = self.inst;
        self.activity.iter_mut().for_each(|s| *s = 0);
        for &j in self.x.members() {
            for &i in inst.col(j as usize) {
                self.activity[i as usize] += 1;
            }
        }
        for j in 0..inst.num_cols() {
            let up = !self.x.contains(j);
            let (p, q) = self.standard_parts(j, up);
            self.dp[j] = p;
            self.dq[j] = q;
        }
        self.refresh_objective();
        self.tol = Tolerance::for_data(inst, &self.weights);
        self.since_refresh = 0;
    }

    /// Recomputes `z~`, the cost and the violation count from the activities,
    /// discarding accumulated round-off. Gain caches are left alone.
    pub fn refresh_objective(&mut self) {
        let inst = self.inst;
        let mut cost = 0.0;
        for &j in self.x.members() {
            cost += inst.cost(j as usize);
        }
        let mut penalty = 0.0;
        let mut violated = 0;
        for i in 0..inst.num_rows() {
            let (yp, ym) = self.violation(i);
            penalty += self.weights.plus[i] * yp as f64 + self.weights.minus[i] * ym as f64;
            if yp + ym > 0 {
                violated += 1;
            }
        }
        self.cost = cost;
        self.ztilde = cost + penalty;
        self.violated = violated;
    }

    /// `(y+_i, y-_i)` for row `i`, zero for families the row lacks.
    #[inline]
    pub fn violation(&self, i: usize) -> (u32, u32) {
        let s = self.activity[i];
        let b = self.inst.rhs(i);
        let sense = self.inst.sense(i);
        let yp = if sense.has_upper() { s.saturating_sub(b) } else { 0 };
        let ym = if sense.has_lower() { b.saturating_sub(s) } else { 0 };
        (yp, ym)
    }

    /// Penalty parts of the 1-flip gain of `j` evaluated from the activities
    /// alone, in O(|S_j|).
    fn standard_parts(&self, j: usize, up: bool) -> (f64, f64) {
        let inst = self.inst;
        let mut p = 0.0;
        let mut q = 0.0;
        for &i in inst.col(j) {
            let i = i as usize;
            let s = self.activity[i] as i64;
            let b = inst.rhs(i) as i64;
            let sense = inst.sense(i);
            if sense.has_upper() {
                let d = if up { dy_plus_up(s, b) } else { dy_plus_down(s, b) };
                p += self.weights.plus[i] * d as f64;
            }
            if sense.has_lower() {
                let d = if up { dy_minus_up(s, b) } else { dy_minus_down(s, b) };
                q += self.weights.minus[i] * d as f64;
            }
        }
        (p, q)
    }

    /// 1-flip gain of `j` from the activities, without the caches.
    pub fn standard_gain(&self, j: usize) -> f64 {
        let up = !self.x.contains(j);
        let (p, q) = self.standard_parts(j, up);
        let c = self.inst.cost(j);
        if up {
            c + p + q
        } else {
            -c + p + q
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn weights(&self) -> &PenaltyWeights {
        &self.weights
    }

    pub fn solution(&self) -> &Solution {
        &self.x
    }

    #[inline]
    pub fn contains(&self, j: usize) -> bool {
        self.x.contains(j)
    }

    pub fn activity(&self) -> &[u32] {
        &self.activity
    }

    /// Cached penalized objective `z~(x)`.
    #[inline]
    pub fn ztilde(&self) -> f64 {
        self.ztilde
    }

    /// Original objective `sum_j c_j x_j`.
    #[inline]
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Number of rows with a nonzero violation.
    #[inline]
    pub fn violations(&self) -> usize {
        self.violated
    }

    #[inline]
    pub fn is_feasible(&self) -> bool {
        self.violated == 0
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Whether a move with gain `gain` strictly improves the current state.
    #[inline]
    pub fn improves(&self, gain: f64) -> bool {
        self.tol.improves(gain, self.ztilde)
    }

    pub fn flips(&self) -> u64 {
        self.flips
    }

    /// Cached `(dp, dq)` of column `j`: up-gain parts when `j` is outside
    /// `X`, down-gain parts when it is inside.
    #[inline]
    pub fn gain_parts(&self, j: usize) -> (f64, f64) {
        (self.dp[j], self.dq[j])
    }

    /// O(1) gain of flipping `x_j`.
    #[inline]
    pub fn flip_gain(&self, j: usize) -> f64 {
        let c = self.inst.cost(j);
        let pen = self.dp[j] + self.dq[j];
        if self.x.contains(j) {
            -c + pen
        } else {
            c + pen
        }
    }

    /// Replaces the working weights and rebuilds every cache.
    pub fn set_weights(&mut self, weights: PenaltyWeights) {
        self.weights = weights;
        self.recompute_all();
    }

    /// Applies `f` to the working weights, then rebuilds every cache.
    pub fn update_weights<R>(&mut self, f: impl FnOnce(&mut PenaltyWeights) -> R) -> R {
        let r = f(&mut self.weights);
        self.recompute_all();
        r
    }

    /// Toggles `x_j`, updating activities in O(|S_j|) and the gain caches of
    /// every column sharing a row with `j`.
    pub fn apply_flip(&mut self, j: usize) {
        let inst = self.inst;
        let gain = self.flip_gain(j);
        let up = !self.x.contains(j);
        for &i in inst.col(j) {
            let i = i as usize;
            let sense = inst.sense(i);
            let b = inst.rhs(i) as i64;
            let s = self.activity[i] as i64;
            let s_next = if up { s + 1 } else { s - 1 };
            self.activity[i] = s_next as u32;

            let was_violated = (sense.has_upper() && s > b) || (sense.has_lower() && s < b);
            let is_violated =
                (sense.has_upper() && s_next > b) || (sense.has_lower() && s_next < b);
            match (was_violated, is_violated) {
                (false, true) => self.violated += 1,
                (true, false) => self.violated -= 1,
                _ => {}
            }

            // Changes of the per-row gain terms between x and x'. The
            // up-terms are dy(x') - dy(x) with dy the 0->1 increments; the
            // down-terms mirror them with the 1->0 increments.
            let (mut p_up, mut p_down, mut q_up, mut q_down) = (0, 0, 0, 0);
            if sense.has_upper() {
                p_up = dy_plus_up(s_next, b) - dy_plus_up(s, b);
                p_down = dy_plus_down(s_next, b) - dy_plus_down(s, b);
            }
            if sense.has_lower() {
                q_up = dy_minus_up(s_next, b) - dy_minus_up(s, b);
                q_down = dy_minus_down(s_next, b) - dy_minus_down(s, b);
            }
            if p_up == 0 && p_down == 0 && q_up == 0 && q_down == 0 {
                continue;
            }
            let wp = self.weights.plus[i];
            let wm = self.weights.minus[i];
            let (p_up, p_down) = (wp * p_up as f64, wp * p_down as f64);
            let (q_up, q_down) = (wm * q_up as f64, wm * q_down as f64);
            for &k in inst.row(i) {
                let k = k as usize;
                if k == j {
                    continue;
                }
                if self.x.contains(k) {
                    self.dp[k] += p_down;
                    self.dq[k] += q_down;
                } else {
                    self.dp[k] += p_up;
                    self.dq[k] += q_up;
                }
            }
        }
        // The down-gain of j at x' is the negated up-gain at x, and vice versa.
        self.dp[j] = -self.dp[j];
        self.dq[j] = -self.dq[j];
        self.x.flip(j);
        self.ztilde += gain;
        if up {
            self.cost += inst.cost(j);
        } else {
            self.cost -= inst.cost(j);
        }
        self.flips += 1;
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_INTERVAL {
            self.refresh_objective();
            self.since_refresh = 0;
        }
    }

    /// Gain of flipping `j1: 1 -> 0` and `j2: 0 -> 1` together, in
    /// O(|S_j1| + |S_j2|).
    pub fn pair_gain(&self, j1: usize, j2: usize) -> Result<f64, EvalError> {
        if !self.x.contains(j1) || self.x.contains(j2) {
            return Err(EvalError::Precondition("pair needs x_j1 = 1 and x_j2 = 0"));
        }
        Ok(self.pair_gain_unchecked(j1, j2))
    }

    pub(crate) fn pair_gain_unchecked(&self, j1: usize, j2: usize) -> f64 {
        let inst = self.inst;
        let mut gain = self.flip_gain(j1) + self.flip_gain(j2);
        let (a, b) = (inst.col(j1), inst.col(j2));
        let (mut ia, mut ib) = (0, 0);
        while ia < a.len() && ib < b.len() {
            match a[ia].cmp(&b[ib]) {
                core::cmp::Ordering::Less => ia += 1,
                core::cmp::Ordering::Greater => ib += 1,
                core::cmp::Ordering::Equal => {
                    let i = a[ia] as usize;
                    if self.activity[i] == inst.rhs(i) {
                        // Zero for rows outside the family.
                        gain -= self.weights.plus[i] + self.weights.minus[i];
                    }
                    ia += 1;
                    ib += 1;
                }
            }
        }
        gain
    }

    /// Gain of flipping `j1: 1->0`, `j2: 0->1`, `j3: 1->0`, `j4: 0->1`
    /// together. The flips are applied tentatively to the activities only,
    /// summing their standard gains, and then rolled back.
    pub fn quad_gain(&mut self, j1: usize, j2: usize, j3: usize, j4: usize) -> Result<f64, EvalError> {
        if !self.x.contains(j1) || self.x.contains(j2) || !self.x.contains(j3) || self.x.contains(j4) {
            return Err(EvalError::Precondition(
                "quadruple needs x_j1 = x_j3 = 1 and x_j2 = x_j4 = 0",
            ));
        }
        if j1 == j3 || j2 == j4 {
            return Err(EvalError::Precondition("quadruple needs j1 != j3 and j2 != j4"));
        }
        Ok(self.quad_gain_unchecked(j1, j2, j3, j4))
    }

    pub(crate) fn quad_gain_unchecked(&mut self, j1: usize, j2: usize, j3: usize, j4: usize) -> f64 {
        let mut undo = core::mem::take(&mut self.undo);
        undo.clear();
        let mut gain = 0.0;
        for (j, up) in [(j1, false), (j2, true), (j3, false), (j4, true)] {
            gain += self.tentative_flip(j, up, &mut undo);
        }
        for &(i, s) in undo.iter().rev() {
            self.activity[i as usize] = s;
        }
        self.undo = undo;
        gain
    }

    fn tentative_flip(&mut self, j: usize, up: bool, undo: &mut Vec<(u32, u32)>) -> f64 {
        let (p, q) = self.standard_parts(j, up);
        let c = self.inst.cost(j);
        for &i in self.inst.col(j) {
            let s = self.activity[i as usize];
            undo.push((i, s));
            self.activity[i as usize] = if up { s + 1 } else { s - 1 };
        }
        if up {
            c + p + q
        } else {
            -c + p + q
        }
    }
}

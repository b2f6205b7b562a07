//! Weighting local search: repeated 4-flip searches with adaptive penalty
//! weights.
//!
//! After every local search call the working weights are either scaled down
//! uniformly (when the penalized value of the current state is no better
//! than the incumbent) or raised on the violated rows in proportion to the
//! violation, by
//!
//! ```text
//! w_i <- w_i + (z* - z~(x)) / sum_l (y+_l^2 + y-_l^2) * y_i
//! ```
//!
//! and clamped at the original weight.

use alloc::vec::Vec;

use crate::budget::Budget;
use crate::eval::{EvalError, PenaltyWeights, SearchState};
use crate::instance::{Instance, Solution};
use crate::neighbor::{BadAlpha, NeighborList, DEFAULT_ALPHA};
use crate::search::{fnls4, FnlsOutcome, Incumbent, PiMap, SearchCounters};

/// Scale factor used when the 10% rule has too few candidates.
pub const BETA_FALLBACK: f64 = 0.5;
/// Safety factor applied to the selected threshold.
pub const BETA_SAFETY: f64 = 0.99;
pub const BETA_MIN: f64 = 1e-6;
pub const BETA_MAX: f64 = 1.0 - 1e-6;

/// How the original penalty weights are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitialWeights {
    /// `1 + max_j |c_j|` on every applicable row.
    #[default]
    MaxCostPlusOne,
}

impl core::fmt::Display for InitialWeights {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            InitialWeights::MaxCostPlusOne => f.write_str("max-cost-plus-one"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("time limit must be positive, got {0}")]
    TimeLimit(f64),
    #[error("beta target fraction must lie in (0, 1), got {0}")]
    BetaFraction(f64),
    #[error(transparent)]
    Alpha(#[from] BadAlpha),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum WlsError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Alpha(#[from] BadAlpha),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WlsConfig {
    /// Wall-clock limit in seconds. The core reads time only through the
    /// [`Budget`] handed to [`wls`]; callers build that budget from this
    /// value.
    pub time_limit_secs: f64,
    /// Fraction of `X` whose removal gain should turn negative after a
    /// uniform decrease.
    pub beta_fraction: f64,
    /// Neighbor-list size factor.
    pub alpha: f64,
    pub initial_weights: InitialWeights,
}

impl Default for WlsConfig {
    fn default() -> Self {
        WlsConfig {
            time_limit_secs: 60.0,
            beta_fraction: 0.10,
            alpha: DEFAULT_ALPHA,
            initial_weights: InitialWeights::MaxCostPlusOne,
        }
    }
}

impl WlsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.time_limit_secs.is_nan() || self.time_limit_secs <= 0.0 {
            return Err(ConfigError::TimeLimit(self.time_limit_secs));
        }
        if !(self.beta_fraction > 0.0 && self.beta_fraction < 1.0) {
            return Err(ConfigError::BetaFraction(self.beta_fraction));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(BadAlpha(self.alpha).into());
        }
        Ok(())
    }
}

/// Original weights for `inst`; working weights start equal to them.
pub fn initial_weights(inst: &Instance, rule: InitialWeights) -> PenaltyWeights {
    match rule {
        InitialWeights::MaxCostPlusOne => PenaltyWeights::uniform(inst, 1.0 + inst.max_abs_cost()),
    }
}

/// How a uniform decrease factor was chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaChoice {
    pub beta: f64,
    /// `ceil(fraction * |X|)`.
    pub target: usize,
    /// Number of columns in `X` with a positive threshold `c_j / P_j`.
    pub thresholds: usize,
    /// True when fewer than `target` thresholds existed.
    pub fallback: bool,
    /// True when the selected value was clamped into `[BETA_MIN, BETA_MAX]`.
    pub clamped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot choose a decrease factor for an empty solution")]
pub struct EmptySolution;

fn ceil_count(fraction: f64, len: usize) -> usize {
    let v = fraction * len as f64;
    let t = v as usize;
    if (t as f64) < v {
        t + 1
    } else {
        t
    }
}

/// Picks `beta` so that after scaling every weight by it, the removal gain
/// `-c_j + beta * P_j` is negative for at least `fraction` of `X`, where
/// `P_j` is the penalty part of the removal gain.
pub fn compute_beta(st: &SearchState<'_>, fraction: f64) -> Result<BetaChoice, EmptySolution> {
    let members = st.solution().members();
    if members.is_empty() {
        return Err(EmptySolution);
    }
    let inst = st.instance();
    let mut thresholds: Vec<f64> = members
        .iter()
        .filter_map(|&j| {
            let (p, q) = st.gain_parts(j as usize);
            let penalty = p + q;
            let c = inst.cost(j as usize);
            (penalty > 0.0 && c > 0.0).then(|| c / penalty)
        })
        .collect();
    let target = ceil_count(fraction, members.len()).max(1);
    if thresholds.len() < target {
        return Ok(BetaChoice {
            beta: BETA_FALLBACK,
            target,
            thresholds: thresholds.len(),
            fallback: true,
            clamped: false,
        });
    }
    let (_, &mut nth, _) = thresholds.select_nth_unstable_by(target - 1, f64::total_cmp);
    let raw = BETA_SAFETY * nth;
    let beta = raw.clamp(BETA_MIN, BETA_MAX);
    Ok(BetaChoice {
        beta,
        target,
        thresholds: thresholds.len(),
        fallback: false,
        clamped: beta != raw,
    })
}

/// Outcome of a proportional increase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Increase {
    /// `(z* - z~) / sum (y+^2 + y-^2)`; zero when nothing was violated.
    pub step: f64,
    /// Number of weights that hit their original value.
    pub clamped: usize,
}

/// Raises the weights of violated rows in proportion to their violation and
/// rebuilds the caches. A state without violations is left unchanged.
pub fn increase_weights(st: &mut SearchState<'_>, z_star: f64, z_current: f64) -> Increase {
    let m = st.instance().num_rows();
    let violations: Vec<(usize, u32, u32)> = (0..m)
        .filter_map(|i| {
            let (yp, ym) = st.violation(i);
            (yp + ym > 0).then_some((i, yp, ym))
        })
        .collect();
    let denom: f64 = violations
        .iter()
        .map(|&(_, yp, ym)| (yp as f64) * (yp as f64) + (ym as f64) * (ym as f64))
        .sum();
    if denom == 0.0 {
        return Increase { step: 0.0, clamped: 0 };
    }
    let step = (z_star - z_current) / denom;
    let inst = st.instance();
    let clamped = st.update_weights(|w| {
        let mut clamped = 0;
        for &(i, yp, ym) in &violations {
            let sense = inst.sense(i);
            if sense.has_upper() && yp > 0 && w.raise_plus(i, step * yp as f64) {
                clamped += 1;
            }
            if sense.has_lower() && ym > 0 && w.raise_minus(i, step * ym as f64) {
                clamped += 1;
            }
        }
        clamped
    });
    Increase { step, clamped }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UpdateKind {
    /// Uniform scaling. `choice` is `None` when `X` was empty and the
    /// fallback factor was used.
    Decrease {
        beta: f64,
        choice: Option<BetaChoice>,
    },
    Increase(Increase),
}

/// One weight change of the outer loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightUpdate {
    /// 1-based index of the local search call that preceded the update.
    pub call: u64,
    /// Penalized value of the state the branch was decided on.
    pub ztilde: f64,
    /// Incumbent objective at decision time (`+inf` before the first
    /// feasible solution).
    pub z_star: f64,
    pub kind: UpdateKind,
}

/// Hooks into the outer loop; every method defaults to a no-op.
pub trait WlsObserver {
    fn on_call(&mut self, _call: u64, _outcome: &FnlsOutcome, _state: &SearchState<'_>) {}
    fn on_incumbent(&mut self, _incumbent: &Incumbent) {}
    /// Called after the weights changed and the caches were rebuilt.
    fn on_weight_update(&mut self, _update: &WeightUpdate, _state: &SearchState<'_>) {}
}

impl WlsObserver for () {}

#[derive(Clone, Debug)]
pub struct WlsOutcome {
    pub best: Option<Incumbent>,
    pub calls: u64,
    pub counters: SearchCounters,
    pub generated_rows: usize,
    /// Generated neighbor-list rows as a fraction of `n`.
    pub generated_ratio: f64,
    pub decreases: u64,
    pub increases: u64,
    /// Number of weight increments cut at the original weight.
    pub clamp_events: u64,
}

/// Runs the weighting local search from `x = 0` until `budget` is
/// exhausted.
pub fn wls(
    inst: &Instance,
    config: &WlsConfig,
    budget: &impl Budget,
    observer: &mut impl WlsObserver,
) -> Result<WlsOutcome, WlsError> {
    config.validate()?;
    let weights = initial_weights(inst, config.initial_weights);
    let mut st = SearchState::new(inst, Solution::zeros(inst.num_cols()), weights)?;
    let mut nl = NeighborList::new(inst, config.alpha)?;
    let mut pi = PiMap::new(inst.num_cols());

    let mut best: Option<Incumbent> = None;
    let mut z_star = f64::INFINITY;
    let mut calls = 0u64;
    let mut counters = SearchCounters::default();
    let (mut decreases, mut increases, mut clamp_events) = (0u64, 0u64, 0u64);

    while !budget.exhausted() {
        let out = fnls4(&mut st, &mut nl, &mut pi, budget);
        calls += 1;
        counters += out.counters;
        observer.on_call(calls, &out, &st);
        if let Some(inc) = out.best {
            if inc.objective < z_star {
                z_star = inc.objective;
                observer.on_incumbent(&inc);
                best = Some(inc);
            }
        }
        if out.out_of_budget {
            break;
        }

        // For a feasible state z~ equals the plain cost. Values within the
        // comparison tolerance of z* count as ties and take the decrease
        // branch.
        st.refresh_objective();
        let current = if st.is_feasible() { st.cost() } else { st.ztilde() };
        let stuck = z_star.is_finite() && current >= z_star - st.tolerance().threshold(z_star);
        let kind = if stuck {
            let choice = compute_beta(&st, config.beta_fraction).ok();
            let beta = choice.map_or(BETA_FALLBACK, |c| c.beta);
            st.update_weights(|w| w.scale(beta));
            decreases += 1;
            UpdateKind::Decrease { beta, choice }
        } else {
            let inc = increase_weights(&mut st, z_star, current);
            increases += 1;
            clamp_events += inc.clamped as u64;
            UpdateKind::Increase(inc)
        };
        observer.on_weight_update(
            &WeightUpdate {
                call: calls,
                ztilde: current,
                z_star,
                kind,
            },
            &st,
        );
    }

    Ok(WlsOutcome {
        best,
        calls,
        counters,
        generated_rows: nl.generated_count(),
        generated_ratio: nl.generated_ratio(),
        decreases,
        increases,
        clamp_events,
    })
}

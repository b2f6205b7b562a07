//! One solve from a parsed instance to a report, plus the wall-clock budget.

use std::time::{Duration, Instant};

use fourflip_core::oracle::{brute_force, OracleError};
use fourflip_core::weighting::initial_weights;
use fourflip_core::{wls, Budget, Incumbent, Instance, Tolerance, WlsConfig, WlsError, WlsObserver};

use crate::report::{relative_gap, SolveReport};

/// Budget that runs out a fixed duration after construction.
#[derive(Clone, Copy, Debug)]
pub struct WallClock {
    start: Instant,
    limit: Duration,
}

impl WallClock {
    pub fn new(limit_secs: f64) -> Self {
        WallClock {
            start: Instant::now(),
            limit: Duration::from_secs_f64(limit_secs.max(0.0)),
        }
    }
}

impl Budget for WallClock {
    fn exhausted(&self) -> bool {
        self.start.elapsed() >= self.limit
    }

    fn elapsed_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub time_limit_secs: f64,
    pub alpha: f64,
    pub target: Option<f64>,
    /// Also run the exhaustive oracle; only allowed on tiny instances.
    pub verify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let cfg = WlsConfig::default();
        SolveOptions {
            time_limit_secs: cfg.time_limit_secs,
            alpha: cfg.alpha,
            target: None,
            verify: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Wls(#[from] WlsError),
    #[error("--verify: {0}")]
    Verify(#[from] OracleError),
    #[error("solver returned a solution that fails validation")]
    Invalid,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub report: SolveReport,
    pub best: Option<Incumbent>,
}

/// Runs the weighting local search on `inst` for `opts.time_limit_secs`,
/// starting the clock on entry. The incumbent is revalidated from scratch
/// before it is reported.
pub fn solve(
    inst: &Instance,
    name: &str,
    format: &str,
    opts: &SolveOptions,
    observer: &mut impl WlsObserver,
) -> Result<SolveResult, SolveError> {
    let config = WlsConfig {
        time_limit_secs: opts.time_limit_secs,
        alpha: opts.alpha,
        ..WlsConfig::default()
    };
    config.validate().map_err(WlsError::from)?;
    let verified_optimum = if opts.verify {
        Some(brute_force(inst)?.optimum.map(|o| o.0))
    } else {
        None
    };

    let clock = WallClock::new(config.time_limit_secs);
    let out = wls(inst, &config, &clock, observer)?;
    let total_secs = clock.elapsed_secs();

    if let Some(best) = &out.best {
        let mut bits = vec![false; inst.num_cols()];
        for &j in &best.members {
            bits[j] = true;
        }
        let v = inst.validate(&bits).map_err(|_| SolveError::Invalid)?;
        if !v.is_feasible() || v.objective != best.objective {
            return Err(SolveError::Invalid);
        }
    }

    let epsilon = match Tolerance::for_data(inst, &initial_weights(inst, config.initial_weights)) {
        Tolerance::Exact => 0.0,
        Tolerance::Relative(eps) => eps,
    };
    let objective = out.best.as_ref().map(|b| b.objective);
    let report = SolveReport {
        instance: name.to_owned(),
        format: format.to_owned(),
        m: inst.num_rows(),
        n: inst.num_cols(),
        nnz: inst.nnz(),
        feasible: out.best.is_some(),
        objective,
        target: opts.target,
        gap_pct: objective.zip(opts.target).and_then(|(z, t)| relative_gap(z, t)),
        time_to_best_secs: out.best.as_ref().map(|b| b.elapsed_secs),
        total_secs,
        fnls_calls: out.calls,
        generated_rows: out.generated_rows,
        generated_row_ratio_pct: out.generated_ratio * 100.0,
        flips: out.counters.flips,
        moves_1flip: out.counters.moves1,
        moves_2flip: out.counters.moves2,
        moves_4flip: out.counters.moves4,
        weight_decreases: out.decreases,
        weight_increases: out.increases,
        alpha: config.alpha,
        epsilon,
        time_limit_secs: config.time_limit_secs,
        weight_rule: config.initial_weights.to_string(),
        verified_optimum,
    };
    Ok(SolveResult { report, best: out.best })
}

//! Search budgets. The core never reads a clock itself.

use core::cell::Cell;

pub trait Budget {
    /// True once the search must stop.
    fn exhausted(&self) -> bool;

    /// Seconds since the budget started; used for time-to-best statistics.
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

impl<B: Budget + ?Sized> Budget for &B {
    fn exhausted(&self) -> bool {
        (**self).exhausted()
    }

    fn elapsed_secs(&self) -> f64 {
        (**self).elapsed_secs()
    }
}

/// Never runs out.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}

/// Deterministic budget that allows a fixed number of `exhausted` polls.
#[derive(Debug)]
pub struct CheckLimit {
    remaining: Cell<u64>,
}

impl CheckLimit {
    pub fn new(checks: u64) -> Self {
        CheckLimit {
            remaining: Cell::new(checks),
        }
    }
}

impl Budget for CheckLimit {
    fn exhausted(&self) -> bool {
        match self.remaining.get() {
            0 => true,
            left => {
                self.remaining.set(left - 1);
                false
            }
        }
    }
}

//! Seeded random instances with independent 0-1 entries.

use std::fmt;
use std::str::FromStr;

use fourflip_core::{Instance, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws before an empty line falls back to a single uniform index.
const RESAMPLE_TRIES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    /// All rows `>= 1`.
    Cover,
    /// All rows `= 1`.
    Partition,
    /// Uniform senses with small right-hand sides.
    Mixed,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::Cover => "cover",
            GenKind::Partition => "partition",
            GenKind::Mixed => "mixed",
        })
    }
}

/// Inclusive integer cost range written `lo,hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostRange {
    pub lo: i64,
    pub hi: i64,
}

impl FromStr for CostRange {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenError::CostRange(s.to_owned());
        let (lo, hi) = s.trim_matches(|c| c == '[' || c == ']').split_once(',').ok_or_else(bad)?;
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok(CostRange { lo, hi })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("density must lie in (0, 1], got {0}")]
    Density(f64),
    #[error("instance needs at least one row and one column")]
    EmptyShape,
    #[error("bad cost range {0:?}, expected lo,hi with lo <= hi")]
    CostRange(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub costs: CostRange,
    pub kind: GenKind,
    pub seed: u64,
}

/// Generates an instance. Each entry is present with probability
/// `density`; empty columns and then empty rows are redrawn, which only
/// adds entries, so both end up nonempty.
pub fn generate(cfg: &GenConfig) -> Result<Instance, GenError> {
    if !(cfg.density > 0.0 && cfg.density <= 1.0) {
        return Err(GenError::Density(cfg.density));
    }
    if cfg.rows == 0 || cfg.cols == 0 {
        return Err(GenError::EmptyShape);
    }
    let (m, n) = (cfg.rows, cfg.cols);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dense = vec![false; m * n];

    for j in 0..n {
        let mut tries = 0;
        loop {
            for i in 0..m {
                dense[i * n + j] = rng.random_bool(cfg.density);
            }
            if (0..m).any(|i| dense[i * n + j]) {
                break;
            }
            tries += 1;
            if tries == RESAMPLE_TRIES {
                dense[rng.random_range(0..m) * n + j] = true;
                break;
            }
        }
    }
    for i in 0..m {
        let row = &mut dense[i * n..(i + 1) * n];
        let mut tries = 0;
        while !row.iter().any(|&a| a) {
            for a in row.iter_mut() {
                *a = rng.random_bool(cfg.density);
            }
            tries += 1;
            if tries == RESAMPLE_TRIES && !row.iter().any(|&a| a) {
                row[rng.random_range(0..n)] = true;
            }
        }
    }

    let columns: Vec<Vec<usize>> = (0..n).map(|j| (0..m).filter(|&i| dense[i * n + j]).collect()).collect();
    let costs: Vec<f64> = (0..n).map(|_| rng.random_range(cfg.costs.lo..=cfg.costs.hi) as f64).collect();
    let (senses, rhs) = match cfg.kind {
        GenKind::Cover => (vec![Sense::Ge; m], vec![1; m]),
        GenKind::Partition => (vec![Sense::Eq; m], vec![1; m]),
        GenKind::Mixed => {
            let mut senses = Vec::with_capacity(m);
            let mut rhs = Vec::with_capacity(m);
            for i in 0..m {
                senses.push([Sense::Le, Sense::Ge, Sense::Eq][rng.random_range(0..3)]);
                let degree = (0..n).filter(|&j| dense[i * n + j]).count() as u32;
                rhs.push(rng.random_range(1..=degree.min(3)));
            }
            (senses, rhs)
        }
    };
    Ok(Instance::from_columns(senses, rhs, costs, columns).expect("generated supports are nonempty and in range"))
}

//! Lazily generated k-nearest-neighbor lists over columns.
//!
//! Two columns are close when their supports share many rows. Row `L[j]` of
//! the list holds the `k = min(|N(j)|, ceil(alpha * m))` columns with the
//! largest overlap `|S_j ∩ S_j'|`, where `N(j)` is the set of columns sharing
//! at least one row with `j`. Rows are built on first access only, and the
//! rows double as the adjacency lists of the k-NN graph walked by the 4-flip
//! search.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::instance::Instance;

pub const DEFAULT_ALPHA: f64 = 5.0;

/// Exact overlap `|S_j1 ∩ S_j2|` by a linear merge of the sorted supports.
pub fn similarity(inst: &Instance, j1: usize, j2: usize) -> u32 {
    let (a, b) = (inst.col(j1), inst.col(j2));
    let (mut ia, mut ib, mut count) = (0, 0, 0);
    while ia < a.len() && ib < b.len() {
        match a[ia].cmp(&b[ib]) {
            Ordering::Less => ia += 1,
            Ordering::Greater => ib += 1,
            Ordering::Equal => {
                count += 1;
                ia += 1;
                ib += 1;
            }
        }
    }
    count
}

/// `ceil(alpha * m)` for positive finite `alpha`, without `std`.
fn row_cap(alpha: f64, m: usize) -> usize {
    let v = alpha * m as f64;
    if v >= usize::MAX as f64 {
        return usize::MAX;
    }
    let t = v as usize;
    if (t as f64) < v {
        t + 1
    } else {
        t
    }
}

/// One generated row: neighbors by decreasing overlap, ties by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborRow {
    cols: Box<[u32]>,
    sims: Box<[u32]>,
}

impl NeighborRow {
    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn similarities(&self) -> &[u32] {
        &self.sims
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.cols
            .iter()
            .zip(self.sims.iter())
            .map(|(&j, &s)| (j as usize, s))
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("neighbor list parameter alpha must be positive and finite, got {0}")]
pub struct BadAlpha(pub f64);

#[derive(Clone, Debug)]
pub struct NeighborList {
    alpha: f64,
    cap: usize,
    rows: Vec<Option<NeighborRow>>,
    generated: usize,
    counts: Vec<u32>,
    touched: Vec<u32>,
}

impl NeighborList {
    /// Empty list for `inst`; no row is generated yet.
    pub fn new(inst: &Instance, alpha: f64) -> Result<Self, BadAlpha> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(BadAlpha(alpha));
        }
        let n = inst.num_cols();
        Ok(NeighborList {
            alpha,
            cap: row_cap(alpha, inst.num_rows()),
            rows: vec![None; n],
            generated: 0,
            counts: vec![0; n],
            touched: Vec::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Upper bound `ceil(alpha * m)` on the row length.
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn generated_count(&self) -> usize {
        self.generated
    }

    /// Fraction of rows generated so far, in `[0, 1]`.
    pub fn generated_ratio(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.generated as f64 / self.rows.len() as f64
        }
    }

    pub fn is_generated(&self, j: usize) -> bool {
        self.rows[j].is_some()
    }

    /// Row `j` if it has been generated.
    pub fn get(&self, j: usize) -> Option<&NeighborRow> {
        self.rows[j].as_ref()
    }

    /// Generates row `j` unless it already exists.
    pub fn ensure(&mut self, inst: &Instance, j: usize) {
        if self.rows[j].is_none() {
            let row = self.generate(inst, j);
            self.rows[j] = Some(row);
            self.generated += 1;
        }
    }

    /// Row `j`, generating it on first access.
    pub fn row(&mut self, inst: &Instance, j: usize) -> &NeighborRow {
        self.ensure(inst, j);
        self.rows[j].as_ref().unwrap()
    }

    /// Counting pass over the rows of `S_j`, then top-k selection.
    fn generate(&mut self, inst: &Instance, j: usize) -> NeighborRow {
        for &i in inst.col(j) {
            for &k in inst.row(i as usize) {
                if k as usize == j {
                    continue;
                }
                let c = &mut self.counts[k as usize];
                if *c == 0 {
                    self.touched.push(k);
                }
                *c += 1;
            }
        }
        let mut cand: Vec<(u32, u32)> = self
            .touched
            .iter()
            .map(|&k| (k, self.counts[k as usize]))
            .collect();
        for &k in &self.touched {
            self.counts[k as usize] = 0;
        }
        self.touched.clear();

        let order = |a: &(u32, u32), b: &(u32, u32)| b.1.cmp(&a.1).then(a.0.cmp(&b.0));
        let k = cand.len().min(self.cap);
        if k < cand.len() {
            if k > 0 {
                cand.select_nth_unstable_by(k - 1, order);
            }
            cand.truncate(k);
        }
        cand.sort_unstable_by(order);
        NeighborRow {
            cols: cand.iter().map(|c| c.0).collect(),
            sims: cand.iter().map(|c| c.1).collect(),
        }
    }
}

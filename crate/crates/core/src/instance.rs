//! Sparse 0-1 constraint systems and 0-1 assignments over them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Constraint sense of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    /// `s_i(x) <= b_i`
    Le,
    /// `s_i(x) >= b_i`
    Ge,
    /// `s_i(x) = b_i`
    Eq,
}

impl Sense {
    /// Rows that are charged for overage (`s_i > b_i`).
    #[inline]
    pub fn has_upper(self) -> bool {
        matches!(self, Sense::Le | Sense::Eq)
    }

    /// Rows that are charged for shortage (`s_i < b_i`).
    #[inline]
    pub fn has_lower(self) -> bool {
        matches!(self, Sense::Ge | Sense::Eq)
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance must have at least one row and one column (got {m} x {n})")]
    EmptyShape { m: usize, n: usize },
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("column {col} has an empty support")]
    EmptyColumn { col: usize },
    #[error("row {row} has no covering column but requires {rhs}")]
    EmptyRow { row: usize, rhs: u32 },
    #[error("column {col} references row {row}, outside 0..{m}")]
    RowOutOfRange { col: usize, row: usize, m: usize },
    #[error("row {row} references column {col}, outside 0..{n}")]
    ColOutOfRange { row: usize, col: usize, n: usize },
    #[error("column {col} lists row {row} more than once")]
    DuplicateEntry { col: usize, row: usize },
    #[error("cost of column {col} is not finite")]
    NonFiniteCost { col: usize },
}

/// An immutable instance with both column-wise and row-wise sparse views.
///
/// Indices are 0-based. Column supports `S_j` and row supports `N_i` are kept
/// as flattened, strictly increasing index lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    senses: Vec<Sense>,
    rhs: Vec<u32>,
    costs: Vec<f64>,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    row_ptr: Vec<usize>,
    row_cols: Vec<u32>,
    integer_costs: bool,
}

impl Instance {
    /// Builds an instance from per-column row lists. Each list is sorted; a
    /// repeated row is rejected.
    pub fn from_columns(
        senses: Vec<Sense>,
        rhs: Vec<u32>,
        costs: Vec<f64>,
        columns: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        let m = senses.len();
        let n = costs.len();
        if m == 0 || n == 0 {
            return Err(InstanceError::EmptyShape { m, n });
        }
        if rhs.len() != m {
            return Err(InstanceError::LengthMismatch {
                what: "right-hand sides",
                expected: m,
                got: rhs.len(),
            });
        }
        if columns.len() != n {
            return Err(InstanceError::LengthMismatch {
                what: "columns",
                expected: n,
                got: columns.len(),
            });
        }
        if let Some(col) = costs.iter().position(|c| !c.is_finite()) {
            return Err(InstanceError::NonFiniteCost { col });
        }

        let nnz = columns.iter().map(Vec::len).sum();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut col_rows = Vec::with_capacity(nnz);
        let mut row_len = vec![0usize; m];
        col_ptr.push(0);
        for (col, mut rows) in columns.into_iter().enumerate() {
            if rows.is_empty() {
                return Err(InstanceError::EmptyColumn { col });
            }
            rows.sort_unstable();
            for (k, &row) in rows.iter().enumerate() {
                if row >= m {
                    return Err(InstanceError::RowOutOfRange { col, row, m });
                }
                if k > 0 && rows[k - 1] == row {
                    return Err(InstanceError::DuplicateEntry { col, row });
                }
                row_len[row] += 1;
                col_rows.push(row as u32);
            }
            col_ptr.push(col_rows.len());
        }

        for (row, &len) in row_len.iter().enumerate() {
            if len == 0 && senses[row] != Sense::Le && rhs[row] > 0 {
                return Err(InstanceError::EmptyRow { row, rhs: rhs[row] });
            }
        }

        // Transpose. Columns are visited in increasing order, so every row
        // list comes out sorted.
        let mut row_ptr = Vec::with_capacity(m + 1);
        row_ptr.push(0);
        for &len in &row_len {
            let last = *row_ptr.last().unwrap();
            row_ptr.push(last + len);
        }
        let mut fill = row_ptr[..m].to_vec();
        let mut row_cols = vec![0u32; nnz];
        for col in 0..n {
            for &row in &col_rows[col_ptr[col]..col_ptr[col + 1]] {
                let slot = &mut fill[row as usize];
                row_cols[*slot] = col as u32;
                *slot += 1;
            }
        }

        let integer_costs = costs
            .iter()
            .all(|&c| c == (c as i64) as f64 && c.abs() < 9.0e15);

        Ok(Instance {
            senses,
            rhs,
            costs,
            col_ptr,
            col_rows,
            row_ptr,
            row_cols,
            integer_costs,
        })
    }

    /// Builds an instance from per-row column lists (`N_i`).
    pub fn from_rows(
        senses: Vec<Sense>,
        rhs: Vec<u32>,
        costs: Vec<f64>,
        rows: &[Vec<usize>],
    ) -> Result<Self, InstanceError> {
        let n = costs.len();
        let mut columns = vec![Vec::new(); n];
        for (i, cols) in rows.iter().enumerate() {
            for &j in cols {
                if j >= n {
                    return Err(InstanceError::ColOutOfRange { row: i, col: j, n });
                }
                columns[j].push(i);
            }
        }
        if rows.len() != senses.len() {
            return Err(InstanceError::LengthMismatch {
                what: "rows",
                expected: senses.len(),
                got: rows.len(),
            });
        }
        Self::from_columns(senses, rhs, costs, columns)
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.senses.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.costs.len()
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_rows.len()
    }

    #[inline]
    pub fn sense(&self, row: usize) -> Sense {
        self.senses[row]
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    #[inline]
    pub fn rhs(&self, row: usize) -> u32 {
        self.rhs[row]
    }

    pub fn rhs_all(&self) -> &[u32] {
        &self.rhs
    }

    #[inline]
    pub fn cost(&self, col: usize) -> f64 {
        self.costs[col]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Sorted rows covered by column `col` (`S_j`).
    #[inline]
    pub fn col(&self, col: usize) -> &[u32] {
        &self.col_rows[self.col_ptr[col]..self.col_ptr[col + 1]]
    }

    /// Sorted columns covering row `row` (`N_i`).
    #[inline]
    pub fn row(&self, row: usize) -> &[u32] {
        &self.row_cols[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    /// True when every cost is an integer, so sums over costs are exact.
    pub fn has_integer_costs(&self) -> bool {
        self.integer_costs
    }

    pub fn max_abs_cost(&self) -> f64 {
        self.costs.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Activities, violated rows and cost of an assignment.
    pub fn validate(&self, x: &[bool]) -> Result<Validation, InstanceError> {
        if x.len() != self.num_cols() {
            return Err(InstanceError::LengthMismatch {
                what: "solution",
                expected: self.num_cols(),
                got: x.len(),
            });
        }
        let mut activity = vec![0u32; self.num_rows()];
        let mut objective = 0.0;
        for (j, _) in x.iter().enumerate().filter(|(_, &on)| on) {
            objective += self.costs[j];
            for &i in self.col(j) {
                activity[i as usize] += 1;
            }
        }
        let violated = (0..self.num_rows())
            .filter(|&i| {
                let (s, b) = (activity[i], self.rhs[i]);
                match self.senses[i] {
                    Sense::Le => s > b,
                    Sense::Ge => s < b,
                    Sense::Eq => s != b,
                }
            })
            .collect();
        Ok(Validation {
            activity,
            violated,
            objective,
        })
    }
}

/// Result of checking an assignment against the hard constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct Validation {
    pub activity: Vec<u32>,
    pub violated: Vec<usize>,
    pub objective: f64,
}

impl Validation {
    pub fn is_feasible(&self) -> bool {
        self.violated.is_empty()
    }
}

/// A 0-1 assignment kept both as a bit vector and as the member set `X`.
///
/// Insertion and removal are O(1); [`Solution::sorted_members`] gives the
/// ordered view.
#[derive(Clone, Debug)]
pub struct Solution {
    bits: Vec<bool>,
    members: Vec<u32>,
    slot: Vec<u32>,
}

const NO_SLOT: u32 = u32::MAX;

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Solution {
            bits: vec![false; n],
            members: Vec::new(),
            slot: vec![NO_SLOT; n],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut sol = Solution::zeros(bits.len());
        for (j, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            sol.flip(j);
        }
        sol
    }

    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut sol = Solution::zeros(n);
        for &j in members {
            if !sol.contains(j) {
                sol.flip(j);
            }
        }
        sol
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn contains(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Members of `X` in unspecified order.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn sorted_members(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.members.iter().map(|&j| j as usize).collect();
        out.sort_unstable();
        out
    }

    /// Toggles `x_j` and returns its new value.
    pub fn flip(&mut self, j: usize) -> bool {
        if self.bits[j] {
            let at = self.slot[j] as usize;
            let last = *self.members.last().unwrap();
            self.members.swap_remove(at);
            if last as usize != j {
                self.slot[last as usize] = at as u32;
            }
            self.slot[j] = NO_SLOT;
            self.bits[j] = false;
        } else {
            self.slot[j] = self.members.len() as u32;
            self.members.push(j as u32);
            self.bits[j] = true;
        }
        self.bits[j]
    }
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl Eq for Solution {}

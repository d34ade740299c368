//! Numerical and exact rank helpers shared by the cohomology modules.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute singular-value threshold used for cohomology ranks.
pub const RANK_TOL: f64 = 1e-9;

/// Singular values inside `(RANK_TOL / GAP_FACTOR, RANK_TOL * GAP_FACTOR)`
/// make the rank decision unreliable.
pub const GAP_FACTOR: f64 = 1e3;

/// Rank of a matrix together with the singular values on either side of the
/// threshold, so a thin spectral gap is visible to the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankInfo {
    pub rank: usize,
    pub smallest_kept: Option<f64>,
    pub largest_dropped: Option<f64>,
    pub exact: bool,
}

impl RankInfo {
    /// True when no singular value sits close to the threshold.
    pub fn is_stable(&self) -> bool {
        if self.exact {
            return true;
        }
        let kept_ok = self
            .smallest_kept
            .is_none_or(|s| s >= RANK_TOL * GAP_FACTOR);
        let dropped_ok = self
            .largest_dropped
            .is_none_or(|s| s <= RANK_TOL / GAP_FACTOR);
        kept_ok && dropped_ok
    }

    pub fn require_stable(self, what: &str) -> Result<Self> {
        if self.is_stable() {
            Ok(self)
        } else {
            Err(Error::RankUnstable(format!(
                "{what}: smallest kept {:?}, largest dropped {:?}, tolerance {RANK_TOL:e}",
                self.smallest_kept, self.largest_dropped
            )))
        }
    }
}

/// Singular-value rank with absolute tolerance [`RANK_TOL`].
pub fn numerical_rank(m: &DMatrix<f64>) -> RankInfo {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RankInfo {
            rank: 0,
            smallest_kept: None,
            largest_dropped: None,
            exact: true,
        };
    }
    let sv = m.clone().svd(false, false).singular_values;
    let mut rank = 0;
    let mut smallest_kept: Option<f64> = None;
    let mut largest_dropped: Option<f64> = None;
    for &s in sv.iter() {
        if s > RANK_TOL {
            rank += 1;
            smallest_kept = Some(smallest_kept.map_or(s, |k| k.min(s)));
        } else {
            largest_dropped = Some(largest_dropped.map_or(s, |d| d.max(s)));
        }
    }
    RankInfo {
        rank,
        smallest_kept,
        largest_dropped,
        exact: false,
    }
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
/// Returns `None` if an intermediate value overflows `i128`.
pub fn integer_rank(rows: &[Vec<i128>]) -> Option<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Some(0);
    }
    let ncols = rows[0].len();
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot) = (rank..nrows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let lhs = a[rank][col].checked_mul(a[r][c])?;
                let rhs = a[r][col].checked_mul(a[rank][c])?;
                a[r][c] = lhs.checked_sub(rhs)? / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    Some(rank)
}

/// Converts a matrix to integers if every entry is an exactly representable
/// integer of moderate size.
pub fn as_integer_matrix(m: &DMatrix<f64>) -> Option<Vec<Vec<i128>>> {
    const LIMIT: f64 = (1u64 << 52) as f64;
    let mut rows = Vec::with_capacity(m.nrows());
    for r in 0..m.nrows() {
        let mut row = Vec::with_capacity(m.ncols());
        for c in 0..m.ncols() {
            let x = m[(r, c)];
            if x.fract() != 0.0 || x.abs() > LIMIT || !x.is_finite() {
                return None;
            }
            row.push(x as i128);
        }
        rows.push(row);
    }
    Some(rows)
}

/// Exact rank for integer matrices, singular-value rank otherwise.
pub fn rank(m: &DMatrix<f64>) -> RankInfo {
    if let Some(rank) = as_integer_matrix(m).and_then(|rows| integer_rank(&rows)) {
        return RankInfo {
            rank,
            smallest_kept: None,
            largest_dropped: None,
            exact: true,
        };
    }
    numerical_rank(m)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

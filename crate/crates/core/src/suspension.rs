//! Mayer–Vietoris dimension counts for suspension foliations.
//!
//! For a suspension by `h`, `H^k(F_h) = Ker(I - h^*_k) (+) H^{k-1}(F) / Im(I - h^*_{k-1})`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank, RankInfo};

/// Fiber cohomology dimensions `dims[k]` and the induced maps `maps[k]` on
/// `H^k(F)`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionData {
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<Vec<f64>>>,
}

impl SuspensionData {
    pub fn new(dims: Vec<usize>, maps: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let s = SuspensionData { dims, maps };
        s.validate()?;
        Ok(s)
    }

    /// Every map is the identity.
    pub fn identity(dims: Vec<usize>) -> Self {
        let maps = dims
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect()
            })
            .collect();
        SuspensionData { dims, maps }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 {
            return Err(Error::Invalid(
                "suspension data needs degrees 0 and 1 at least".into(),
            ));
        }
        if self.maps.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                got: self.maps.len(),
            });
        }
        for (k, (m, &d)) in self.maps.iter().zip(&self.dims).enumerate() {
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(Error::Invalid(format!(
                    "map in degree {k} must be {d}x{d}"
                )));
            }
            if m.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Invalid(format!("map in degree {k} has non-finite entries")));
            }
        }
        Ok(())
    }

    /// Top fiber degree `K`.
    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    fn defect_rank(&self, k: usize) -> Result<RankInfo> {
        let d = self.dims[k];
        let m = DMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.maps[k][i][j]
        });
        rank(&m).require_stable(&format!("I - h* in degree {k}"))
    }

    /// `dim H^k(F_h)` for `0 <= k <= K + 1`; fiber cohomology above `K` is
    /// taken to be zero.
    pub fn mv_dimension(&self, k: usize) -> Result<usize> {
        self.validate()?;
        let top = self.top_degree();
        if k > top + 1 {
            return Err(Error::Invalid(format!(
                "degree {k} exceeds K + 1 = {}",
                top + 1
            )));
        }
        let kernel = if k <= top {
            self.dims[k] - self.defect_rank(k)?.rank
        } else {
            0
        };
        let cokernel = if k == 0 {
            0
        } else {
            self.dims[k - 1] - self.defect_rank(k - 1)?.rank
        };
        Ok(kernel + cokernel)
    }

    /// All dimensions `k = 0..=K+1`.
    pub fn mv_dimensions(&self) -> Result<Vec<usize>> {
        (0..=self.top_degree() + 1).map(|k| self.mv_dimension(k)).collect()
    }
}

/// Cohomology dimensions of a linear foliation by `p`-dimensional leaves,
/// built by suspending with the identity one leaf dimension at a time.
pub fn linear_foliation_dims(p: usize) -> Result<Vec<usize>> {
    if p == 0 {
        return Err(Error::Invalid("leaf dimension must be at least 1".into()));
    }
    let mut dims = vec![1, 1];
    for _ in 1..p {
        dims = SuspensionData::identity(dims).mv_dimensions()?;
    }
    Ok(dims)
}

/// A 2x2 integer matrix with determinant 1 and `|trace| > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicMatrix {
    a: [[i64; 2]; 2],
}

impl HyperbolicMatrix {
    pub fn new(a: [[i64; 2]; 2]) -> Result<Self> {
        let det = a[0][0] as i128 * a[1][1] as i128 - a[0][1] as i128 * a[1][0] as i128;
        if det != 1 {
            return Err(Error::NotHyperbolic(format!("determinant is {det}, expected 1")));
        }
        let trace = a[0][0] as i128 + a[1][1] as i128;
        if trace.abs() <= 2 {
            return Err(Error::NotHyperbolic(format!("|trace| = {} is not above 2", trace.abs())));
        }
        if trace.abs() > 1 << 40 {
            return Err(Error::Invalid("trace too large for double precision".into()));
        }
        Ok(HyperbolicMatrix { a })
    }

    /// Accepts real entries only if they are exact integers.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(Error::Invalid("expected a 2x2 matrix".into()));
        }
        let mut a = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let x = rows[i][j];
                if !x.is_finite() || x.fract() != 0.0 || x.abs() > (1u64 << 53) as f64 {
                    return Err(Error::Invalid(format!("entry ({i}, {j}) = {x} is not an integer")));
                }
                a[i][j] = x as i64;
            }
        }
        Self::new(a)
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.a
    }

    pub fn trace(&self) -> i64 {
        self.a[0][0] + self.a[1][1]
    }

    pub fn determinant(&self) -> i64 {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToralReport {
    pub matrix: [[i64; 2]; 2],
    pub trace: i64,
    /// Expanding eigenvalue, `|lambda| > 1`.
    pub lambda: f64,
    /// Unit eigenvector for `1 / lambda`.
    pub stable_vector: [f64; 2],
    /// Slope of the stable direction; irrational because `trace^2 - 4` is
    /// never a perfect square for `|trace| > 2`.
    pub stable_slope: Option<f64>,
    pub discriminant: i64,
    pub slope_irrational: bool,
    pub h1_dim: usize,
}

/// Eigen-data of `A` and `dim H^1` of the suspended stable foliation.
pub fn toral_pipeline(a: &HyperbolicMatrix) -> Result<ToralReport> {
    let [[p, q], [r, s]] = a.entries();
    let tr = a.trace();
    let disc = tr * tr - 4;
    let root = (disc as f64).sqrt();
    let lambda = tr.signum() as f64 * (tr.abs() as f64 + root) / 2.0;
    let mu = 1.0 / lambda;
    // (A - mu I) v = 0; take the better-conditioned row.
    let first = (q as f64).abs() + (mu - p as f64).abs();
    let second = (r as f64).abs() + (mu - s as f64).abs();
    let (x, y) = if first >= second {
        (q as f64, mu - p as f64)
    } else {
        (mu - s as f64, r as f64)
    };
    let norm = x.hypot(y);
    let sign = if x < 0.0 || (x == 0.0 && y < 0.0) { -1.0 } else { 1.0 };
    let v = [sign * x / norm, sign * y / norm];
    let stable_slope = (v[0] != 0.0).then(|| v[1] / v[0]);
    let is_square = {
        let t = root.round() as i64;
        (t - 1..=t + 1).any(|t| t >= 0 && t * t == disc)
    };
    let data = SuspensionData::new(vec![1, 1], vec![vec![vec![1.0]], vec![vec![mu]]])?;
    Ok(ToralReport {
        matrix: a.entries(),
        trace: tr,
        lambda,
        stable_vector: v,
        stable_slope,
        discriminant: disc,
        slope_irrational: !is_square,
        h1_dim: data.mv_dimension(1)?,
    })
}

//! Finite-dimensional Lie algebras given by structure constants.
//!
//! Brackets are `[xi_i, xi_j] = sum_k c_{ij}^k xi_k`. The Chevalley–Eilenberg
//! differential uses
//!
//! ```text
//! (d alpha)(xi_0, ..., xi_k) = sum_{i<j} (-1)^{i+j} alpha([xi_i, xi_j], xi_0, ..^i..^j.., xi_k)
//! ```
//!
//! with `d^0 = 0`, so for the Heisenberg algebra `d alpha_3 = alpha_2 ^ alpha_1`.
//! Forms on `Lambda^k g*` use the basis `alpha_I`, `I` increasing, with
//! `alpha_I(xi_I) = 1`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::cohomeq::LeafwiseOneForm;
use crate::diophantine::ActionMatrix;
use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, GridSamples};
use crate::linalg::{binomial, rank, RankInfo};

/// Tolerance for antisymmetry, Jacobi and realization residuals.
pub const VALIDATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    n: usize,
    c: Vec<f64>,
    matrices: Option<Vec<DMatrix<f64>>>,
}

impl LieAlgebra {
    /// Raw structure constants, indexed `c[(i * n + j) * n + k]`.
    pub fn from_constants(n: usize, c: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("a Lie algebra needs dimension at least 1".into()));
        }
        if c.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                got: c.len(),
            });
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("structure constants must be finite".into()));
        }
        Ok(LieAlgebra {
            n,
            c,
            matrices: None,
        })
    }

    /// Sets `c_{ij}^k = val` for each entry (0-based) and fills the
    /// antisymmetric partner `c_{ji}^k = -val` unless it is given explicitly.
    pub fn from_brackets(n: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = vec![0.0; n * n * n];
        let mut explicit = std::collections::HashSet::new();
        for &(i, j, k, val) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::Invalid(format!(
                    "bracket index ({i}, {j}, {k}) out of range for dimension {n}"
                )));
            }
            c[(i * n + j) * n + k] = val;
            explicit.insert((i, j, k));
        }
        for &(i, j, k, val) in entries {
            if !explicit.contains(&(j, i, k)) {
                c[(j * n + i) * n + k] = -val;
            }
        }
        Self::from_constants(n, c)
    }

    pub fn abelian(n: usize) -> Self {
        let mut l = LieAlgebra {
            n,
            c: vec![0.0; n * n * n],
            matrices: None,
        };
        // Diagonal realization.
        l.matrices = Some(
            (0..n)
                .map(|i| {
                    let mut m = DMatrix::zeros(n, n);
                    m[(i, i)] = 1.0;
                    m
                })
                .collect(),
        );
        l
    }

    /// `[xi_1, xi_2] = xi_3`, realized by strictly upper triangular 3x3
    /// matrices `E_12, E_23, E_13`.
    pub fn heisenberg() -> Self {
        let e = |r: usize, s: usize| {
            let mut m = DMatrix::zeros(3, 3);
            m[(r, s)] = 1.0;
            m
        };
        let mut l = Self::from_brackets(3, &[(0, 1, 2, 1.0)]).expect("valid constants");
        l.matrices = Some(vec![e(0, 1), e(1, 2), e(0, 2)]);
        l
    }

    /// The affine algebra `[xi_1, xi_2] = xi_2`, realized by
    /// `diag(1, 0)` and `E_12`.
    pub fn ga() -> Self {
        let mut l = Self::from_brackets(2, &[(0, 1, 1, 1.0)]).expect("valid constants");
        l.matrices = Some(vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        ]);
        l
    }

    /// `sl_2` in the basis `h, e, f`.
    pub fn sl2() -> Self {
        let mut l = Self::from_brackets(
            3,
            &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)],
        )
        .expect("valid constants");
        l.matrices = Some(vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]),
        ]);
        l
    }

    /// Attaches a matrix realization `xi_k -> matrices[k]`.
    pub fn with_matrices(mut self, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        if matrices.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: matrices.len(),
            });
        }
        let d = matrices.first().map_or(0, |m| m.nrows());
        if d == 0 || matrices.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::Invalid(
                "realization matrices must be square and of equal size".into(),
            ));
        }
        self.matrices = Some(matrices);
        Ok(self)
    }

    /// Direct sum `self (+) other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut c = vec![0.0; n * n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    c[(i * n + j) * n + k] = self.constant(i, j, k);
                }
            }
        }
        let s = self.n;
        for i in 0..other.n {
            for j in 0..other.n {
                for k in 0..other.n {
                    c[((i + s) * n + j + s) * n + k + s] = other.constant(i, j, k);
                }
            }
        }
        LieAlgebra {
            n,
            c,
            matrices: None,
        }
    }

    /// Same algebra in the basis `xi'_a = sum_b p[(b, a)] xi_b`.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<Self> {
        let n = self.n;
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.nrows(),
            });
        }
        let inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("basis change is singular".into()))?;
        let mut c = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                let xa = p.column(a).iter().copied().collect::<Vec<_>>();
                let xb = p.column(b).iter().copied().collect::<Vec<_>>();
                let br = nalgebra::DVector::from_vec(self.bracket(&xa, &xb));
                let coords = &inv * br;
                for e in 0..n {
                    c[(a * n + b) * n + e] = coords[e];
                }
            }
        }
        let matrices = self.matrices.as_ref().map(|ms| {
            (0..n)
                .map(|a| {
                    let mut m = DMatrix::zeros(ms[0].nrows(), ms[0].ncols());
                    for b in 0..n {
                        m += &ms[b] * p[(b, a)];
                    }
                    m
                })
                .collect()
        });
        Ok(LieAlgebra { n, c, matrices })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.n + j) * self.n + k]
    }

    pub fn constants(&self) -> &[f64] {
        &self.c
    }

    pub fn matrices(&self) -> Option<&[DMatrix<f64>]> {
        self.matrices.as_deref()
    }

    /// Bracket of two elements given by coordinates.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                let w = x[i] * y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.constant(i, j, k);
                }
            }
        }
        out
    }

    /// Antisymmetry, Jacobi and (if present) realization residuals.
    pub fn validate(&self) -> Validation {
        let n = self.n;
        let mut antisymmetry: f64 = 0.0;
        let mut worst_antisymmetry = None;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = (self.constant(i, j, k) + self.constant(j, i, k)).abs();
                    if r > antisymmetry {
                        antisymmetry = r;
                        worst_antisymmetry = Some([i, j, k]);
                    }
                }
            }
        }
        let mut jacobi: f64 = 0.0;
        let mut worst_jacobi = None;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            s += self.constant(i, j, l) * self.constant(l, k, m)
                                + self.constant(j, k, l) * self.constant(l, i, m)
                                + self.constant(k, i, l) * self.constant(l, j, m);
                        }
                        if s.abs() > jacobi {
                            jacobi = s.abs();
                            worst_jacobi = Some([i, j, k, m]);
                        }
                    }
                }
            }
        }
        let realization = self.matrices.as_ref().map(|ms| {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let comm = &ms[i] * &ms[j] - &ms[j] * &ms[i];
                    let mut expected = DMatrix::zeros(comm.nrows(), comm.ncols());
                    for k in 0..n {
                        expected += &ms[k] * self.constant(i, j, k);
                    }
                    worst = worst.max((comm - expected).abs().max());
                }
            }
            worst
        });
        let pass = antisymmetry <= VALIDATION_TOL
            && jacobi <= VALIDATION_TOL
            && realization.is_none_or(|r| r <= VALIDATION_TOL);
        Validation {
            antisymmetry,
            jacobi,
            realization,
            worst_antisymmetry,
            worst_jacobi,
            pass,
        }
    }

    fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.pass {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra(v.describe()))
        }
    }

    /// Matrix of `d^k : Lambda^k g* -> Lambda^{k+1} g*` in the increasing
    /// multi-index bases; `C(n, k+1)` rows by `C(n, k)` columns.
    pub fn ce_differential(&self, k: usize) -> DMatrix<f64> {
        let n = self.n;
        let rows = combinations(n, k + 1);
        let cols = combinations(n, k);
        let mut d = DMatrix::zeros(rows.len(), cols.len());
        if k == 0 {
            return d;
        }
        let col_index: HashMap<&[usize], usize> =
            cols.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut set = Vec::with_capacity(k);
        for (r, j) in rows.iter().enumerate() {
            for a in 0..=k {
                for b in a + 1..=k {
                    let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                    let rest: Vec<usize> = j
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != a && t != b)
                        .map(|(_, &x)| x)
                        .collect();
                    for l in 0..n {
                        let cst = self.constant(j[a], j[b], l);
                        if cst == 0.0 || rest.contains(&l) {
                            continue;
                        }
                        // alpha_I(xi_l, xi_rest) = sign of sorting (l, rest).
                        let before = rest.iter().filter(|&&x| x < l).count();
                        let perm = if before % 2 == 0 { 1.0 } else { -1.0 };
                        set.clear();
                        set.extend_from_slice(&rest);
                        let pos = set.partition_point(|&x| x < l);
                        set.insert(pos, l);
                        if let Some(&col) = col_index.get(set.as_slice()) {
                            d[(r, col)] += sign * perm * cst;
                        }
                    }
                }
            }
        }
        d
    }

    /// Dimensions of `H^k(g)` for `k = 0..=n`.
    pub fn cohomology_dims(&self) -> Result<CohomologyReport> {
        self.require_valid()?;
        let n = self.n;
        let ranks: Vec<RankInfo> = (0..=n)
            .map(|k| rank(&self.ce_differential(k)).require_stable(&format!("d^{k}")))
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = (0..=n)
            .map(|k| {
                let below = if k == 0 { 0 } else { ranks[k - 1].rank };
                binomial(n, k) - ranks[k].rank - below
            })
            .collect();
        let euler = dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        Ok(CohomologyReport { dims, ranks, euler })
    }

    /// Largest entry of `d^{k+1} d^k` over all degrees.
    pub fn d_squared_residual(&self) -> f64 {
        (0..self.n)
            .map(|k| {
                let prod = self.ce_differential(k + 1) * self.ce_differential(k);
                prod.iter().fold(0.0f64, |a, x| a.max(x.abs()))
            })
            .fold(0.0, f64::max)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for t in i + 1..k {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub realization: Option<f64>,
    pub worst_antisymmetry: Option<[usize; 3]>,
    pub worst_jacobi: Option<[usize; 4]>,
    pub pass: bool,
}

impl Validation {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.antisymmetry > VALIDATION_TOL {
            parts.push(format!(
                "antisymmetry residual {:e} at (i, j, k) = {:?}",
                self.antisymmetry, self.worst_antisymmetry
            ));
        }
        if self.jacobi > VALIDATION_TOL {
            parts.push(format!(
                "Jacobi residual {:e} at (i, j, k, m) = {:?}",
                self.jacobi, self.worst_jacobi
            ));
        }
        if let Some(r) = self.realization.filter(|&r| r > VALIDATION_TOL) {
            parts.push(format!("matrix realization residual {r:e}"));
        }
        parts.join("; ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohomologyReport {
    pub dims: Vec<usize>,
    /// Rank of `d^k` with its spectral gap, `k = 0..=n`.
    pub ranks: Vec<RankInfo>,
    pub euler: i64,
}

/// `omega = sum_k omega^k (x) xi_k` over an abelian torus frame; `components[k]`
/// is the scalar leafwise 1-form `omega^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraValuedForm {
    frame: ActionMatrix,
    components: Vec<LeafwiseOneForm>,
}

impl AlgebraValuedForm {
    pub fn new(frame: ActionMatrix, components: Vec<LeafwiseOneForm>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("an algebra-valued form needs components".into()));
        }
        let real = components[0].component(0).is_real();
        for c in &components {
            if c.frame() != &frame {
                return Err(Error::Invalid("components must share the frame".into()));
            }
            if c.components().iter().any(|s| s.is_real() != real) {
                return Err(Error::Invalid("components must share the real flag".into()));
            }
        }
        Ok(AlgebraValuedForm { frame, components })
    }

    /// Builds the form from its values on the frame: `values[a][k]` is the
    /// `xi_k` coefficient of `omega(X_{v_a})`.
    pub fn from_frame_values(frame: ActionMatrix, values: Vec<Vec<FourierSeries>>) -> Result<Self> {
        let p = frame.p();
        if values.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: values.len(),
            });
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(Error::Invalid("ragged frame values".into()));
        }
        let components = (0..n)
            .map(|k| {
                LeafwiseOneForm::new(frame.clone(), (0..p).map(|a| values[a][k].clone()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame, components)
    }

    /// `d_F beta` for an algebra-valued function with coordinates `beta[k]`.
    pub fn exact(frame: ActionMatrix, beta: &[FourierSeries]) -> Result<Self> {
        let components = beta
            .iter()
            .map(|b| LeafwiseOneForm::exact(frame.clone(), b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame, components)
    }

    pub fn frame(&self) -> &ActionMatrix {
        &self.frame
    }

    pub fn algebra_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LeafwiseOneForm] {
        &self.components
    }

    /// The `xi_k` coefficient of `omega(X_{v_a})`.
    pub fn value(&self, a: usize, k: usize) -> &FourierSeries {
        self.components[k].component(a)
    }

    pub fn is_real(&self) -> bool {
        self.value(0, 0).is_real()
    }

    /// Largest coefficient difference over all components.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.algebra_dim() {
            for a in 0..self.frame.p() {
                worst = worst.max(self.value(a, k).max_coeff_diff(other.value(a, k))?);
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaurerCartanResidual {
    /// Largest coefficient modulus of `d_F omega + [omega, omega]` over all
    /// frame pairs and algebra directions.
    pub max_coeff: f64,
    /// `((a, b), max_coeff)` per frame pair `a < b`.
    pub per_pair: Vec<((usize, usize), f64)>,
}

/// Evaluates `X_a omega(X_b) - X_b omega(X_a) + [omega(X_a), omega(X_b)]`.
pub fn maurer_cartan_residual(omega: &AlgebraValuedForm, algebra: &LieAlgebra) -> Result<MaurerCartanResidual> {
    let n = algebra.dim();
    if omega.algebra_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: omega.algebra_dim(),
        });
    }
    let frame = omega.frame();
    let p = frame.p();
    let mut per_pair = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let mut r = omega
                    .value(b, k)
                    .directional_derivative(frame.row(a))?
                    .sub(&omega.value(a, k).directional_derivative(frame.row(b))?)?;
                for i in 0..n {
                    for j in 0..n {
                        let cst = algebra.constant(i, j, k);
                        if cst == 0.0 {
                            continue;
                        }
                        let prod = omega.value(a, i).multiply(omega.value(b, j), None)?;
                        r = r.combine(1.0, &prod, cst)?;
                    }
                }
                worst = worst.max(r.max_coeff());
            }
            per_pair.push(((a, b), worst));
        }
    }
    let max_coeff = per_pair.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(MaurerCartanResidual { max_coeff, per_pair })
}

/// A `d x d` matrix of Fourier series, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    d: usize,
    entries: Vec<FourierSeries>,
}

impl MatrixField {
    pub fn new(d: usize, entries: Vec<FourierSeries>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: entries.len(),
            });
        }
        let dims = entries[0].dims();
        if entries.iter().any(|e| e.dims() != dims) {
            return Err(Error::Invalid("matrix entries must share dimension".into()));
        }
        Ok(MatrixField { d, entries })
    }

    pub fn identity(d: usize, dims: usize) -> Self {
        let entries = (0..d * d)
            .map(|i| FourierSeries::constant(dims, if i % (d + 1) == 0 { 1.0 } else { 0.0 }))
            .collect();
        MatrixField { d, entries }
    }

    /// `sum_k beta[k] * xi_k` in the matrix realization of `algebra`.
    pub fn from_algebra(algebra: &LieAlgebra, beta: &[FourierSeries]) -> Result<Self> {
        let ms = algebra
            .matrices()
            .ok_or_else(|| Error::Invalid("algebra has no matrix realization".into()))?;
        if beta.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                got: beta.len(),
            });
        }
        let d = ms[0].nrows();
        let dims = beta[0].dims();
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for s in 0..d {
                let mut e = FourierSeries::zero(dims, beta[0].is_real());
                for (k, b) in beta.iter().enumerate() {
                    let w = ms[k][(r, s)];
                    if w != 0.0 {
                        e = e.combine(1.0, b, w)?;
                    }
                }
                entries.push(e);
            }
        }
        Self::new(d, entries)
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn dims(&self) -> usize {
        self.entries[0].dims()
    }

    pub fn entry(&self, r: usize, s: usize) -> &FourierSeries {
        &self.entries[r * self.d + s]
    }

    pub fn entries(&self) -> &[FourierSeries] {
        &self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(FourierSeries::is_real)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.d, entries)
    }

    pub fn scale(&self, s: f64) -> Self {
        MatrixField {
            d: self.d,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    /// Pointwise matrix product, exact in coefficient space.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        let d = self.d;
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for s in 0..d {
                let mut e = FourierSeries::zero(self.dims(), self.is_real() && other.is_real());
                for t in 0..d {
                    let prod = self.entry(r, t).multiply(other.entry(t, s), None)?;
                    e = e.add(&prod)?;
                }
                entries.push(e);
            }
        }
        Self::new(d, entries)
    }

    pub fn directional_derivative(&self, v: &[f64]) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.directional_derivative(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.d, entries)
    }

    fn radius(&self) -> i64 {
        self.entries.iter().map(FourierSeries::radius).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeConfig {
    /// Truncation radius of the output components.
    pub truncation: i64,
    /// Radius resolved on the working grid; modes between `truncation` and
    /// this radius are dropped and counted as truncation loss.
    pub working_radius: i64,
    /// Largest acceptable truncation loss.
    pub max_loss: f64,
}

impl GaugeConfig {
    pub fn new(truncation: i64) -> Self {
        GaugeConfig {
            truncation,
            working_radius: 2 * truncation.max(1),
            max_loss: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeOutcome {
    pub form: AlgebraValuedForm,
    /// Largest l2 norm of the modes dropped from any component.
    pub truncation_loss: f64,
    /// Largest Frobenius norm of the part of the transformed value lying
    /// outside the realized algebra.
    pub algebra_defect: f64,
    pub theta_invertible: bool,
    pub min_abs_det: f64,
}

/// `omega -> b^{-1} (theta_* omega) b + b^{-1} d_F b`.
///
/// Values are formed pointwise on a grid resolving `working_radius`, split
/// back onto the algebra basis and re-expanded at `truncation`.
pub fn gauge_transform(
    omega: &AlgebraValuedForm,
    b: &MatrixField,
    theta: &DMatrix<f64>,
    algebra: &LieAlgebra,
    cfg: &GaugeConfig,
) -> Result<GaugeOutcome> {
    let ms = algebra
        .matrices()
        .ok_or_else(|| Error::Invalid("gauge transforms need a matrix realization".into()))?;
    let n = algebra.dim();
    let d = ms[0].nrows();
    if omega.algebra_dim() != n || theta.nrows() != n || theta.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: omega.algebra_dim(),
        });
    }
    if b.size() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.size(),
        });
    }
    let frame = omega.frame();
    let dims = frame.n();
    if b.dims() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            got: b.dims(),
        });
    }
    if cfg.truncation < 0 || cfg.working_radius < cfg.truncation {
        return Err(Error::Invalid("working radius must be at least the truncation".into()));
    }
    let p = frame.p();
    if let Some(outcome) = constant_gauge(omega, b, theta, ms, cfg)? {
        return Ok(outcome);
    }
    let input_radius = b.radius().max(
        (0..p)
            .flat_map(|a| (0..n).map(move |k| (a, k)))
            .map(|(a, k)| omega.value(a, k).radius())
            .max()
            .unwrap_or(0),
    );
    let working = cfg.working_radius.max(input_radius);
    let res = (2 * working + 1) as usize;
    let resolution = vec![res; dims];
    let real = omega.is_real() && b.is_real();

    let sample = |s: &FourierSeries| s.sample(&resolution).map(|g| g.values().to_vec());
    let b_samples = b.entries().iter().map(sample).collect::<Result<Vec<_>>>()?;
    let db_samples: Vec<Vec<Vec<Complex64>>> = (0..p)
        .map(|a| {
            b.directional_derivative(frame.row(a))?
                .entries()
                .iter()
                .map(sample)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let w_samples: Vec<Vec<Vec<Complex64>>> = (0..p)
        .map(|a| (0..n).map(|k| sample(omega.value(a, k))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let basis: Vec<DMatrix<Complex64>> = ms.iter().map(|m| m.map(|x| Complex64::new(x, 0.0))).collect();
    // Least-squares projection onto span{xi_k} via the Frobenius Gram matrix.
    let gram = DMatrix::from_fn(n, n, |i, j| ms[i].dot(&ms[j]));
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Invalid("realization matrices are linearly dependent".into()))?;

    let total = res.pow(dims as u32);
    let mut out: Vec<Vec<Vec<Complex64>>> = vec![vec![Vec::with_capacity(total); n]; p];
    let mut min_abs_det = f64::INFINITY;
    let mut algebra_defect: f64 = 0.0;
    for idx in 0..total {
        let bm = DMatrix::from_fn(d, d, |r, s| b_samples[r * d + s][idx]);
        let det = bm.determinant().norm();
        let scale = bm.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(1e-300);
        if det <= 1e-12 * scale.powi(d as i32) {
            return Err(Error::SingularGauge { index: idx, det });
        }
        min_abs_det = min_abs_det.min(det);
        let binv = bm.clone().try_inverse().ok_or(Error::SingularGauge { index: idx, det })?;
        for a in 0..p {
            let mut w = DMatrix::<Complex64>::zeros(d, d);
            for k in 0..n {
                let mut coeff = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    coeff += w_samples[a][j][idx] * theta[(k, j)];
                }
                w += &basis[k] * coeff;
            }
            let dbm = DMatrix::from_fn(d, d, |r, s| db_samples[a][r * d + s][idx]);
            let value = &binv * (w * &bm + dbm);
            let rhs: Vec<Complex64> = basis
                .iter()
                .map(|xi| xi.iter().zip(value.iter()).map(|(x, y)| x * y).sum())
                .collect();
            let mut recon = DMatrix::<Complex64>::zeros(d, d);
            for k in 0..n {
                let mut y = Complex64::new(0.0, 0.0);
                for (j, r) in rhs.iter().enumerate() {
                    y += r * gram_inv[(k, j)];
                }
                recon += &basis[k] * y;
                out[a][k].push(y);
            }
            algebra_defect = algebra_defect.max((value - recon).norm());
        }
    }

    let mut truncation_loss: f64 = 0.0;
    let mut values = Vec::with_capacity(p);
    for per_a in out {
        let mut row = Vec::with_capacity(n);
        for samples in per_a {
            let grid = GridSamples::new(resolution.clone(), samples, real)?;
            let full = FourierSeries::from_samples(&grid, working)?;
            let (mut kept, dropped) = full.truncate(cfg.truncation);
            truncation_loss = truncation_loss.max(dropped);
            kept.set_truncation_loss(dropped);
            row.push(kept);
        }
        values.push(row);
    }
    if truncation_loss > cfg.max_loss {
        return Err(Error::TruncationLoss {
            loss: truncation_loss,
            threshold: cfg.max_loss,
        });
    }
    let theta_invertible = theta.clone().determinant().abs() > 1e-12;
    Ok(GaugeOutcome {
        form: AlgebraValuedForm::from_frame_values(frame.clone(), values)?,
        truncation_loss,
        algebra_defect,
        theta_invertible,
        min_abs_det,
    })
}

/// A constant real gauge acts linearly on coefficients: `omega -> T omega`
/// with `T = proj o Ad(b^{-1}) o theta`. No grid is needed and the identity
/// gauge reproduces `omega` exactly.
fn constant_gauge(
    omega: &AlgebraValuedForm,
    b: &MatrixField,
    theta: &DMatrix<f64>,
    ms: &[DMatrix<f64>],
    cfg: &GaugeConfig,
) -> Result<Option<GaugeOutcome>> {
    let d = b.size();
    let mut bm = DMatrix::zeros(d, d);
    for r in 0..d {
        for s in 0..d {
            let e = b.entry(r, s);
            if e.iter().any(|(m, _)| !m.is_zero()) {
                return Ok(None);
            }
            let c = e.mean();
            if c.im != 0.0 {
                return Ok(None);
            }
            bm[(r, s)] = c.re;
        }
    }
    let det = bm.determinant().abs();
    let scale = bm.abs().max().max(1e-300);
    if det <= 1e-12 * scale.powi(d as i32) {
        return Err(Error::SingularGauge { index: 0, det });
    }
    let binv = bm.clone().try_inverse().ok_or(Error::SingularGauge { index: 0, det })?;
    let n = ms.len();
    let gram = DMatrix::from_fn(n, n, |i, j| ms[i].dot(&ms[j]));
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Invalid("realization matrices are linearly dependent".into()))?;
    // adj[(k', k)]: coordinates of b^{-1} xi_k b.
    let mut adj = DMatrix::zeros(n, n);
    let mut defect: f64 = 0.0;
    for k in 0..n {
        let conj = &binv * &ms[k] * &bm;
        let rhs: Vec<f64> = ms.iter().map(|xi| xi.dot(&conj)).collect();
        let mut recon = DMatrix::zeros(d, d);
        for kp in 0..n {
            let y: f64 = (0..n).map(|j| gram_inv[(kp, j)] * rhs[j]).sum();
            adj[(kp, k)] = y;
            recon += &ms[kp] * y;
        }
        defect = defect.max((conj - recon).norm());
    }
    let t = adj * theta;
    let frame = omega.frame();
    let mut values = Vec::with_capacity(frame.p());
    let mut truncation_loss: f64 = 0.0;
    for a in 0..frame.p() {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = FourierSeries::zero(frame.n(), omega.is_real());
            for j in 0..n {
                if t[(k, j)] != 0.0 {
                    acc = acc.combine(1.0, omega.value(a, j), t[(k, j)])?;
                }
            }
            let (kept, dropped) = acc.truncate(cfg.truncation);
            truncation_loss = truncation_loss.max(dropped);
            row.push(if dropped == 0.0 { acc } else { kept });
        }
        values.push(row);
    }
    if truncation_loss > cfg.max_loss {
        return Err(Error::TruncationLoss {
            loss: truncation_loss,
            threshold: cfg.max_loss,
        });
    }
    Ok(Some(GaugeOutcome {
        form: AlgebraValuedForm::from_frame_values(frame.clone(), values)?,
        truncation_loss,
        algebra_defect: defect,
        theta_invertible: theta.determinant().abs() > 1e-12,
        min_abs_det: det,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_algebras_validate() {
        for l in [LieAlgebra::abelian(4), LieAlgebra::heisenberg(), LieAlgebra::ga(), LieAlgebra::sl2()] {
            let v = l.validate();
            assert!(v.pass, "{}", v.describe());
        }
    }

    #[test]
    fn corrupted_sl2_fails_jacobi() {
        let mut c = LieAlgebra::sl2().constants().to_vec();
        // [h, e] = 2e becomes 2.1e on one side only.
        c[(0 * 3 + 1) * 3 + 1] += 0.1;
        let l = LieAlgebra::from_constants(3, c).unwrap();
        let v = l.validate();
        assert!(!v.pass);
        assert!(v.jacobi > 0.01 && v.jacobi < 1.0, "{}", v.jacobi);
        assert!(v.worst_jacobi.is_some());
        assert!(matches!(l.cohomology_dims(), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn zeroth_differential_vanishes() {
        let d0 = LieAlgebra::sl2().ce_differential(0);
        assert_eq!((d0.nrows(), d0.ncols()), (3, 1));
        assert!(d0.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn heisenberg_first_differential() {
        // Rows: alpha_12, alpha_13, alpha_23. Columns: alpha_1, alpha_2, alpha_3.
        let d1 = LieAlgebra::heisenberg().ce_differential(1);
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(d1, expected);
    }

    #[test]
    fn ga_first_differential() {
        let d1 = LieAlgebra::ga().ce_differential(1);
        assert_eq!(d1, DMatrix::from_row_slice(1, 2, &[0.0, -1.0]));
    }

    #[test]
    fn combinations_are_increasing() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn named_cohomology() {
        assert_eq!(LieAlgebra::abelian(3).cohomology_dims().unwrap().dims, vec![1, 3, 3, 1]);
        assert_eq!(LieAlgebra::heisenberg().cohomology_dims().unwrap().dims, vec![1, 2, 2, 1]);
        assert_eq!(LieAlgebra::ga().cohomology_dims().unwrap().dims, vec![1, 1, 0]);
        assert_eq!(LieAlgebra::sl2().cohomology_dims().unwrap().dims, vec![1, 0, 0, 1]);
    }

    #[test]
    fn brackets_fill_antisymmetric_partner() {
        let l = LieAlgebra::from_brackets(2, &[(0, 1, 1, 1.0)]).unwrap();
        assert_eq!(l.constant(1, 0, 1), -1.0);
        assert!(LieAlgebra::from_brackets(2, &[(0, 2, 1, 1.0)]).is_err());
    }
}

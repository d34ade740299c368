//! Truncated Fourier series on the torus `T^N = R^N / Z^N`.
//!
//! A [`FourierSeries`] stores finitely many complex coefficients keyed by
//! exact integer frequency vectors, so resonance tests (`<m, v> = 0`) are
//! never blurred by dense float indexing. Dense grids only appear
//! transiently, in [`GridSamples`] and the FFT round trip.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Tolerance for the conjugate-symmetry check on real series.
const SYMMETRY_TOL: f64 = 1e-12;

/// Integer frequency vector `m` in `Z^N`. Ordering is lexicographic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(Vec<i64>);

impl FrequencyVector {
    pub fn new(entries: Vec<i64>) -> Self {
        FrequencyVector(entries)
    }

    pub fn zero(dims: usize) -> Self {
        FrequencyVector(vec![0; dims])
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn inf_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Euclidean norm, the norm used by every decay and Diophantine formula.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(&c, &x)| c as f64 * x).sum()
    }

    pub fn neg(&self) -> Self {
        FrequencyVector(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        FrequencyVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for FrequencyVector {
    fn from(v: Vec<i64>) -> Self {
        FrequencyVector(v)
    }
}

impl<const K: usize> From<[i64; K]> for FrequencyVector {
    fn from(v: [i64; K]) -> Self {
        FrequencyVector(v.to_vec())
    }
}

/// Calls `visit` on every integer vector in the cube `[-radius, radius]^dims`,
/// in lexicographic order.
pub fn for_each_in_cube(dims: usize, radius: i64, mut visit: impl FnMut(&[i64])) {
    let mut m = vec![-radius; dims];
    loop {
        visit(&m);
        let mut axis = dims;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if m[axis] < radius {
                m[axis] += 1;
                break;
            }
            m[axis] = -radius;
        }
    }
}

/// Uniform samples on the lattice `(j_1/R_1, ..., j_N/R_N)`, row-major with
/// the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    resolution: Vec<usize>,
    values: Vec<Complex64>,
    real: bool,
}

impl GridSamples {
    pub fn new(resolution: Vec<usize>, values: Vec<Complex64>, real: bool) -> Result<Self> {
        if resolution.is_empty() || resolution.contains(&0) {
            return Err(Error::Invalid("grid resolution must be positive on every axis".into()));
        }
        let count: usize = resolution.iter().product();
        if count != values.len() {
            return Err(Error::Invalid(format!(
                "grid has {count} points but {} values were given",
                values.len()
            )));
        }
        let values = if real {
            values.into_iter().map(|z| Complex64::new(z.re, 0.0)).collect()
        } else {
            values
        };
        Ok(GridSamples {
            resolution,
            values,
            real,
        })
    }

    pub fn from_real(resolution: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        Self::new(resolution, values, true)
    }

    /// Samples a real function at every lattice point.
    pub fn from_fn(resolution: Vec<usize>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(resolution.iter().product());
        let mut x = vec![0.0; resolution.len()];
        for_each_grid_point(&resolution, |idx| {
            for (a, (&j, &r)) in idx.iter().zip(&resolution).enumerate() {
                x[a] = j as f64 / r as f64;
            }
            values.push(f(&x));
        });
        Self::from_real(resolution, values)
    }

    pub fn dims(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coordinates of the sample at flat index `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut x = vec![0.0; self.dims()];
        for a in (0..self.dims()).rev() {
            let r = self.resolution[a];
            x[a] = (rem % r) as f64 / r as f64;
            rem /= r;
        }
        x
    }
}

fn for_each_grid_point(resolution: &[usize], mut visit: impl FnMut(&[usize])) {
    let dims = resolution.len();
    let mut idx = vec![0usize; dims];
    loop {
        visit(&idx);
        let mut axis = dims;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < resolution[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// In-place N-dimensional DFT along every axis (unnormalized).
fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = shape.iter().product();
    let mut stride = total;
    for &len in shape {
        stride /= len;
        if len == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let block = stride * len;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, value) in line.iter().enumerate() {
                    data[base + j * stride] = *value;
                }
            }
        }
    }
}

fn flat_index(m: &[i64], resolution: &[usize]) -> usize {
    let mut index = 0usize;
    for (&c, &r) in m.iter().zip(resolution) {
        index = index * r + c.rem_euclid(r as i64) as usize;
    }
    index
}

/// Finitely supported Fourier series `sum_m a_m exp(2 pi i <m, x>)`.
///
/// Exact zeros are never stored. When `real` is set the coefficients are
/// conjugate symmetric, `a_{-m} = conj(a_m)`, and that symmetry is kept
/// exact by every operation that preserves realness.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    dims: usize,
    coeffs: BTreeMap<FrequencyVector, Complex64>,
    radius: i64,
    real: bool,
    truncation_loss: f64,
}

impl FourierSeries {
    pub fn zero(dims: usize, real: bool) -> Self {
        FourierSeries {
            dims,
            coeffs: BTreeMap::new(),
            radius: 0,
            real,
            truncation_loss: 0.0,
        }
    }

    pub fn constant(dims: usize, value: f64) -> Self {
        let mut s = Self::zero(dims, true);
        if value != 0.0 {
            s.coeffs
                .insert(FrequencyVector::zero(dims), Complex64::new(value, 0.0));
        }
        s
    }

    /// Builds a series from explicit modes. Repeated modes are summed. For a
    /// real series the input must already be conjugate symmetric.
    pub fn from_modes<I, M>(dims: usize, real: bool, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (M, Complex64)>,
        M: Into<FrequencyVector>,
    {
        if dims == 0 {
            return Err(Error::Invalid("series dimension must be at least 1".into()));
        }
        let mut coeffs: BTreeMap<FrequencyVector, Complex64> = BTreeMap::new();
        for (m, c) in modes {
            let m = m.into();
            if m.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    got: m.dims(),
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Invalid(format!("non-finite coefficient at {m:?}")));
            }
            *coeffs.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        if real {
            for (m, c) in &coeffs {
                let partner = coeffs
                    .get(&m.neg())
                    .copied()
                    .unwrap_or(Complex64::new(0.0, 0.0));
                let defect = (partner - c.conj()).norm();
                if defect > SYMMETRY_TOL * c.norm().max(1.0) {
                    return Err(Error::NotConjugateSymmetric {
                        mode: m.entries().to_vec(),
                        defect,
                    });
                }
            }
        }
        let mut s = FourierSeries {
            dims,
            radius: coeffs.keys().map(|m| m.inf_norm()).max().unwrap_or(0),
            coeffs,
            real,
            truncation_loss: 0.0,
        };
        if real {
            s.enforce_symmetry();
        }
        Ok(s)
    }

    /// Real series from one representative per conjugate pair: each `(m, c)`
    /// contributes `c e(m.x) + conj(c) e(-m.x)`; a zero mode contributes `Re c`.
    pub fn real_from_half<I, M>(dims: usize, half: I) -> Result<Self>
    where
        I: IntoIterator<Item = (M, Complex64)>,
        M: Into<FrequencyVector>,
    {
        let mut modes = Vec::new();
        for (m, c) in half {
            let m = m.into();
            if m.is_zero() {
                modes.push((m, Complex64::new(c.re, 0.0)));
            } else {
                modes.push((m.neg(), c.conj()));
                modes.push((m, c));
            }
        }
        Self::from_modes(dims, true, modes)
    }

    /// Raises the declared truncation radius (never lowers it below the support).
    pub fn with_radius(mut self, radius: i64) -> Self {
        self.radius = self.radius.max(radius);
        self
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: &FrequencyVector) -> Complex64 {
        self.coeffs
            .get(m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FrequencyVector, &Complex64)> {
        self.coeffs.iter()
    }

    /// The mode-zero coefficient, i.e. the average over the torus.
    pub fn mean(&self) -> Complex64 {
        self.coeff(&FrequencyVector::zero(self.dims))
    }

    pub fn without_mean(&self) -> Self {
        let mut s = self.clone();
        s.coeffs.remove(&FrequencyVector::zero(self.dims));
        s
    }

    /// Sum of coefficient moduli; an upper bound for the sup norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_dims(&self, dims: usize) -> Result<()> {
        if dims != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: dims,
            });
        }
        Ok(())
    }

    fn enforce_symmetry(&mut self) {
        let keys: Vec<FrequencyVector> = self.coeffs.keys().cloned().collect();
        for m in keys {
            let neg = m.neg();
            if m == neg {
                if let Some(c) = self.coeffs.get_mut(&m) {
                    c.im = 0.0;
                }
                continue;
            }
            if m < neg {
                continue;
            }
            let a = self.coeff(&m);
            let b = self.coeff(&neg);
            let avg = (a + b.conj()) * 0.5;
            self.coeffs.insert(m, avg);
            self.coeffs.insert(neg, avg.conj());
        }
        self.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
    }

    /// Value at the point `x` of the torus.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        self.check_dims(x.len())?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, c) in &self.coeffs {
            let phase = TWO_PI * m.dot(x);
            sum += c * Complex64::from_polar(1.0, phase);
        }
        if self.real {
            sum.im = 0.0;
        }
        Ok(sum)
    }

    pub fn evaluate_real(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x)?.re)
    }

    /// Samples on the uniform grid. Uses an inverse FFT when the grid resolves
    /// the truncation radius, direct summation otherwise.
    pub fn sample(&self, resolution: &[usize]) -> Result<GridSamples> {
        self.check_dims(resolution.len())?;
        if resolution.contains(&0) {
            return Err(Error::Invalid("grid resolution must be positive".into()));
        }
        let total: usize = resolution.iter().product();
        let resolved = resolution
            .iter()
            .all(|&r| r as i64 > 2 * self.radius);
        let values = if resolved {
            let mut data = vec![Complex64::new(0.0, 0.0); total];
            for (m, c) in &self.coeffs {
                data[flat_index(m.entries(), resolution)] += c;
            }
            fft_nd(&mut data, resolution, true);
            data
        } else {
            let mut out = Vec::with_capacity(total);
            let mut x = vec![0.0; self.dims];
            let mut err = None;
            for_each_grid_point(resolution, |idx| {
                for a in 0..idx.len() {
                    x[a] = idx[a] as f64 / resolution[a] as f64;
                }
                match self.evaluate(&x) {
                    Ok(v) => out.push(v),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            out
        };
        GridSamples::new(resolution.to_vec(), values, self.real)
    }

    /// Discrete inversion of grid samples, keeping `||m||_inf <= radius`.
    ///
    /// Coefficients below the round-off floor of the transform are dropped.
    pub fn from_samples(grid: &GridSamples, radius: i64) -> Result<Self> {
        if radius < 0 {
            return Err(Error::Invalid("truncation radius must be non-negative".into()));
        }
        for (axis, &r) in grid.resolution.iter().enumerate() {
            let needed = (2 * radius + 1) as usize;
            if r < needed {
                return Err(Error::UnderResolved {
                    axis,
                    resolution: r,
                    radius,
                    needed,
                });
            }
        }
        let total = grid.values.len();
        let mut data = grid.values.clone();
        fft_nd(&mut data, &grid.resolution, false);
        let scale = 1.0 / total as f64;
        let peak = grid.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let floor = 8.0 * f64::EPSILON * peak * (total as f64).log2().max(1.0);

        let dims = grid.dims();
        let mut coeffs = BTreeMap::new();
        for_each_in_cube(dims, radius, |m| {
            let c = data[flat_index(m, &grid.resolution)] * scale;
            if c.norm() > floor {
                coeffs.insert(FrequencyVector(m.to_vec()), c);
            }
        });
        let mut s = FourierSeries {
            dims,
            coeffs,
            radius,
            real: grid.real,
            truncation_loss: 0.0,
        };
        if s.real {
            s.enforce_symmetry();
        }
        Ok(s)
    }

    /// `X_v s`: the coefficient at `m` is multiplied by `2 pi i <m, v>`.
    pub fn directional_derivative(&self, v: &[f64]) -> Result<Self> {
        self.check_dims(v.len())?;
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.coeffs {
            if m.is_zero() {
                continue;
            }
            let d = c * Complex64::new(0.0, TWO_PI * m.dot(v));
            if d.re != 0.0 || d.im != 0.0 {
                coeffs.insert(m.clone(), d);
            }
        }
        Ok(FourierSeries {
            dims: self.dims,
            coeffs,
            radius: self.radius,
            real: self.real,
            truncation_loss: self.truncation_loss,
        })
    }

    /// `max_{m != 0} ||m||^k |a_m|` with the Euclidean norm; zero for constants.
    pub fn decay_diagnostic(&self, k: u32) -> f64 {
        self.coeffs
            .iter()
            .filter(|(m, _)| !m.is_zero())
            .map(|(m, c)| m.norm().powi(k as i32) * c.norm())
            .fold(0.0, f64::max)
    }

    /// Product of two series by convolution of coefficients.
    ///
    /// The output radius is the sum of the input radii, lowered to `cap` when
    /// given; modes dropped by the cap are accounted in `truncation_loss`
    /// (their l2 norm, added to the losses already carried by the inputs).
    pub fn multiply(&self, other: &Self, cap: Option<i64>) -> Result<Self> {
        self.check_dims(other.dims)?;
        let full = self.radius + other.radius;
        let radius = cap.map_or(full, |c| c.min(full));
        let mut coeffs: BTreeMap<FrequencyVector, Complex64> = BTreeMap::new();
        let mut dropped: BTreeMap<FrequencyVector, Complex64> = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &other.coeffs {
                let m = ma.add(mb);
                let target = if m.inf_norm() <= radius {
                    &mut coeffs
                } else {
                    &mut dropped
                };
                *target.entry(m).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        let loss = dropped.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut s = FourierSeries {
            dims: self.dims,
            coeffs,
            radius,
            real: self.real && other.real,
            truncation_loss: loss + self.truncation_loss + other.truncation_loss,
        };
        if s.real {
            s.enforce_symmetry();
        }
        Ok(s)
    }

    /// Linear combination `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.check_dims(other.dims)?;
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.coeffs {
            coeffs.insert(m.clone(), c * alpha);
        }
        for (m, c) in &other.coeffs {
            *coeffs.entry(m.clone()).or_insert(Complex64::new(0.0, 0.0)) += c * beta;
        }
        coeffs.retain(|_, c: &mut Complex64| c.re != 0.0 || c.im != 0.0);
        let mut s = FourierSeries {
            dims: self.dims,
            coeffs,
            radius: self.radius.max(other.radius),
            real: self.real && other.real,
            truncation_loss: alpha.abs() * self.truncation_loss
                + beta.abs() * other.truncation_loss,
        };
        if s.real {
            s.enforce_symmetry();
        }
        Ok(s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c *= factor;
        }
        s.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        s.truncation_loss *= factor.abs();
        s
    }

    pub fn add_constant(&self, value: f64) -> Self {
        let mut s = self.clone();
        let zero = FrequencyVector::zero(self.dims);
        let c = s.coeff(&zero) + value;
        if c.re == 0.0 && c.im == 0.0 {
            s.coeffs.remove(&zero);
        } else {
            s.coeffs.insert(zero, c);
        }
        s
    }

    /// Drops modes with `||m||_inf > radius`, returning the l2 norm of what was
    /// dropped and recording it as truncation loss.
    pub fn truncate(&self, radius: i64) -> (Self, f64) {
        let mut s = self.clone();
        let mut dropped = 0.0;
        s.coeffs.retain(|m, c| {
            let keep = m.inf_norm() <= radius;
            if !keep {
                dropped += c.norm_sqr();
            }
            keep
        });
        let dropped = dropped.sqrt();
        s.radius = radius.min(self.radius);
        s.truncation_loss += dropped;
        (s, dropped)
    }

    /// Largest coefficient-wise deviation between two series.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_coeff())
    }

    pub(crate) fn set_truncation_loss(&mut self, loss: f64) {
        self.truncation_loss = loss;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_series_evaluates_to_constant() {
        let s = FourierSeries::constant(3, 5.0);
        assert_eq!(s.evaluate(&[0.1, 0.7, 0.3]).unwrap(), c(5.0, 0.0));
    }

    #[test]
    fn cosine_at_origin_is_one() {
        let s = FourierSeries::from_modes(2, true, [([1, 0], c(0.5, 0.0)), ([-1, 0], c(0.5, 0.0))])
            .unwrap();
        assert!((s.evaluate_real(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let s = FourierSeries::constant(2, 1.0);
        assert!(matches!(
            s.evaluate(&[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(s.directional_derivative(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn zeros_are_not_stored() {
        let s = FourierSeries::from_modes(1, false, [([1], c(1.0, 0.0)), ([1], c(-1.0, 0.0))])
            .unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn asymmetric_real_series_is_rejected() {
        let err = FourierSeries::from_modes(1, true, [([1], c(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::NotConjugateSymmetric { .. }));
    }

    #[test]
    fn samples_of_constant_invert_to_constant() {
        let grid = GridSamples::from_fn(vec![5, 5], |_| 3.0).unwrap();
        let s = FourierSeries::from_samples(&grid, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.mean().re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cosine_on_nine_grid() {
        let grid = GridSamples::from_fn(vec![9, 9], |x| (TWO_PI * x[0]).cos()).unwrap();
        let s = FourierSeries::from_samples(&grid, 4).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.coeff(&[1, 0].into()) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((s.coeff(&[-1, 0].into()) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let grid = GridSamples::from_fn(vec![8, 9], |_| 1.0).unwrap();
        assert!(matches!(
            FourierSeries::from_samples(&grid, 4),
            Err(Error::UnderResolved { axis: 0, .. })
        ));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let s = FourierSeries::constant(2, 4.0);
        assert!(s.directional_derivative(&[1.0, 2.0]).unwrap().is_empty());
    }

    #[test]
    fn derivative_of_single_mode() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let s = FourierSeries::from_modes(2, false, [([1, 0], c(1.0, 0.0))]).unwrap();
        let d = s.directional_derivative(&[1.0, phi]).unwrap();
        assert_eq!(d.coeff(&[1, 0].into()), c(0.0, TWO_PI));
    }

    #[test]
    fn decay_diagnostic_examples() {
        assert_eq!(FourierSeries::constant(2, 9.0).decay_diagnostic(3), 0.0);
        let s = FourierSeries::from_modes(2, false, [([3, 4], c(2.0, 0.0))]).unwrap();
        assert!((s.decay_diagnostic(1) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn multiply_by_one_is_identity() {
        let a = FourierSeries::real_from_half(2, [([1, 2], c(0.3, -0.1)), ([0, 1], c(1.0, 0.5))])
            .unwrap();
        let one = FourierSeries::constant(2, 1.0);
        let p = a.multiply(&one, None).unwrap();
        assert_eq!(p.max_coeff_diff(&a).unwrap(), 0.0);
    }

    #[test]
    fn cosine_squared() {
        let cos = FourierSeries::real_from_half(1, [([1], c(0.5, 0.0))]).unwrap();
        let sq = cos.multiply(&cos, None).unwrap();
        assert_eq!(sq.coeff(&[0].into()), c(0.5, 0.0));
        assert_eq!(sq.coeff(&[2].into()), c(0.25, 0.0));
        assert_eq!(sq.coeff(&[-2].into()), c(0.25, 0.0));
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.radius(), 2);
    }

    #[test]
    fn capped_multiply_records_loss() {
        let cos = FourierSeries::real_from_half(1, [([1], c(0.5, 0.0))]).unwrap();
        let sq = cos.multiply(&cos, Some(1)).unwrap();
        assert_eq!(sq.len(), 1);
        assert!((sq.truncation_loss() - (2.0 * 0.25f64.powi(2)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cube_enumeration_is_complete() {
        let mut count = 0;
        for_each_in_cube(3, 2, |_| count += 1);
        assert_eq!(count, 125);
    }
}

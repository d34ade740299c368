//! Circle diffeomorphisms close to rotations.
//!
//! A map is stored through its lift `f(x) = x + drift + u(x)` with `u` a real
//! band-limited periodic function, so `f(x + 1) = f(x) + 1` holds exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::diophantine::certify_rational;
use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, GridSamples};

/// Minimal grid used for orientation and sup-norm checks.
const MIN_GRID: usize = 257;

#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    drift: f64,
    periodic: FourierSeries,
    /// `(2 pi m, 2 a_m)` for `m > 0`, so `u(x) = a_0 + sum Re(2 a_m e^{2 pi i m x})`.
    modes: Vec<(f64, Complex64)>,
    constant: f64,
    margin: f64,
}

fn grid_size(radius: i64) -> usize {
    (8 * radius.max(0) as usize + 1).max(MIN_GRID)
}

impl CircleMap {
    pub fn new(drift: f64, periodic: FourierSeries) -> Result<Self> {
        if periodic.dims() != 1 || !periodic.is_real() {
            return Err(Error::Invalid(
                "the periodic part must be a real series on the circle".into(),
            ));
        }
        if !drift.is_finite() {
            return Err(Error::Invalid("drift must be finite".into()));
        }
        let mut modes = Vec::new();
        let mut constant = 0.0;
        for (m, c) in periodic.iter() {
            let k = m.entries()[0];
            if k == 0 {
                constant = c.re;
            } else if k > 0 {
                modes.push((2.0 * PI * k as f64, 2.0 * c));
            }
        }
        let mut map = CircleMap {
            drift,
            periodic,
            modes,
            constant,
            margin: 0.0,
        };
        let n = grid_size(map.periodic.radius());
        let (min, at) = (0..n)
            .map(|j| {
                let x = j as f64 / n as f64;
                (map.derivative(x), x)
            })
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
        if min <= 0.0 {
            return Err(Error::OrientationLost {
                min_derivative: min,
                at,
            });
        }
        map.margin = min;
        Ok(map)
    }

    pub fn rotation(theta: f64) -> Self {
        Self::new(theta, FourierSeries::zero(1, true)).expect("rotations are diffeomorphisms")
    }

    /// Fits a map to a lift `f` of degree one by sampling `f(x) - x` on a grid
    /// resolving `radius` modes; the constant part becomes the drift.
    pub fn from_lift(f: impl Fn(f64) -> f64, radius: i64) -> Result<Self> {
        let (drift, periodic) = fit_periodic(|x| f(x) - x, radius)?;
        Self::new(drift, periodic)
    }

    /// `h o r_theta o h^{-1}` with `h = id + eta`.
    pub fn conjugated_rotation(theta: f64, eta: &FourierSeries, radius: i64) -> Result<Self> {
        let h = CircleMap::new(0.0, eta.clone())?;
        Self::from_lift(|x| h.lift(h.inverse_lift(x) + theta), radius)
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn periodic(&self) -> &FourierSeries {
        &self.periodic
    }

    /// `min (1 + u')` over the verification grid.
    pub fn orientation_margin(&self) -> f64 {
        self.margin
    }

    /// `u(x)`.
    pub fn displacement(&self, x: f64) -> f64 {
        let mut s = self.constant;
        for &(w, c) in &self.modes {
            let (sin, cos) = (w * x).sin_cos();
            s += c.re * cos - c.im * sin;
        }
        s
    }

    /// `f'(x) = 1 + u'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let mut s = 1.0;
        for &(w, c) in &self.modes {
            let (sin, cos) = (w * x).sin_cos();
            s -= w * (c.re * sin + c.im * cos);
        }
        s
    }

    pub fn lift(&self, x: f64) -> f64 {
        x + self.drift + self.displacement(x)
    }

    /// Solves `f(y) = x` by Newton's method.
    pub fn inverse_lift(&self, x: f64) -> f64 {
        let mut y = x - self.drift - self.displacement(x - self.drift);
        for _ in 0..100 {
            let step = (self.lift(y) - x) / self.derivative(y);
            y -= step;
            if step.abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) {
                break;
            }
        }
        y
    }

    /// `self o other`, refit at `radius`.
    pub fn compose(&self, other: &Self, radius: i64) -> Result<Self> {
        Self::from_lift(|x| self.lift(other.lift(x)), radius)
    }

    /// `sup |f(x) - x - alpha|` over a grid.
    pub fn distance_to_rotation(&self, alpha: f64) -> f64 {
        let n = grid_size(self.periodic.radius());
        (0..n)
            .map(|j| (self.drift - alpha + self.displacement(j as f64 / n as f64)).abs())
            .fold(0.0, f64::max)
    }
}

fn fit_periodic(g: impl Fn(f64) -> f64, radius: i64) -> Result<(f64, FourierSeries)> {
    if radius < 0 {
        return Err(Error::Invalid("radius must be non-negative".into()));
    }
    let n = grid_size(radius).max(4 * radius as usize + 1);
    let grid = GridSamples::from_fn(vec![n], |x| g(x[0]))?;
    let series = FourierSeries::from_samples(&grid, radius)?;
    let drift = series.mean().re;
    Ok((drift, series.without_mean()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationEstimate {
    /// `f^n(0) / n` reduced to `[0, 1)`.
    pub tau: f64,
    /// `f^n(0) / n` before reduction.
    pub lift_average: f64,
    /// The true value lies within `lift_average +- enclosure`.
    pub enclosure: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: u64,
    /// Smoothly weighted Birkhoff average of the displacement, reduced mod 1.
    pub refined: f64,
    pub refined_heuristic: bool,
}

/// Rotation number from `n` iterates of the lift starting at 0.
///
/// For a monotone degree-one lift `|f^n(0) - n tau| < 1`, so the returned
/// interval of half-width `1/n` is rigorous up to floating-point error.
pub fn rotation_number(f: &CircleMap, n: u64) -> Result<RotationEstimate> {
    if n == 0 {
        return Err(Error::Invalid("iteration count must be at least 1".into()));
    }
    // Track the orbit as whole turns plus a fractional part to limit growth
    // of rounding error.
    let mut turns: i64 = 0;
    let mut frac = 0.0f64;
    let mut weighted = 0.0;
    let mut weight_sum = 0.0;
    for k in 0..n {
        let d = f.derivative(frac);
        if d <= 0.0 {
            return Err(Error::OrientationLost {
                min_derivative: d,
                at: frac,
            });
        }
        let step = f.drift + f.displacement(frac);
        let t = (k as f64 + 0.5) / n as f64;
        let w = (-1.0 / (t * (1.0 - t))).exp();
        weighted += w * step;
        weight_sum += w;
        let next = frac + step;
        let whole = next.floor();
        turns += whole as i64;
        frac = next - whole;
    }
    let lift_average = (turns as f64 + frac) / n as f64;
    let enclosure = 1.0 / n as f64;
    let refined = if weight_sum > 0.0 {
        (weighted / weight_sum).rem_euclid(1.0)
    } else {
        lift_average.rem_euclid(1.0)
    };
    Ok(RotationEstimate {
        tau: lift_average.rem_euclid(1.0),
        lift_average,
        enclosure,
        lo: lift_average - enclosure,
        hi: lift_average + enclosure,
        iterations: n,
        refined,
        refined_heuristic: true,
    })
}

/// `|e^{2 pi i m tau} - 1|`, exactly zero when `m tau` is a certified integer.
pub fn chordal_distance(m: i64, tau: f64) -> f64 {
    if let Some((_, q)) = certify_rational(tau) {
        if (m as i128) % q == 0 {
            return 0.0;
        }
    }
    let x = m as f64 * tau;
    2.0 * (PI * (x - x.round())).sin().abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoserShell {
    pub lo: i64,
    pub hi: i64,
    pub m: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoserReport {
    pub radius: i64,
    pub exponent: f64,
    /// `min_{0 < |m| <= M} D(m) |m|^exponent`.
    pub min_value: f64,
    /// Smallest positive `m` attaining the minimum.
    pub argmin: i64,
    /// Positive `m` with `D(m) = 0`.
    pub resonant: Vec<i64>,
    pub shells: Vec<MoserShell>,
    pub pass: bool,
}

/// Scans `D(m) = max_i |e^{2 pi i m tau_i} - 1|` over `0 < |m| <= M`.
/// `D(-m) = D(m)`, so only positive `m` are visited.
pub fn check_moser_condition(taus: &[f64], radius: i64, exponent: f64) -> Result<MoserReport> {
    if taus.is_empty() {
        return Err(Error::Invalid("need at least one rotation number".into()));
    }
    if radius < 2 {
        return Err(Error::Invalid("radius must be at least 2".into()));
    }
    if taus.iter().any(|t| !t.is_finite()) || !exponent.is_finite() {
        return Err(Error::Invalid("rotation numbers and exponent must be finite".into()));
    }
    let mut min_value = f64::INFINITY;
    let mut argmin = 1;
    let mut resonant = Vec::new();
    let mut shells: Vec<MoserShell> = Vec::new();
    for m in 1..=radius {
        let d = taus
            .iter()
            .map(|&t| chordal_distance(m, t))
            .fold(0.0, f64::max);
        if d == 0.0 {
            resonant.push(m);
        }
        let value = d * (m as f64).powf(exponent);
        if value < min_value {
            min_value = value;
            argmin = m;
        }
        let lo = if m == 1 { 1 } else { 1i64 << (63 - m.leading_zeros() as i64) };
        match shells.last_mut() {
            Some(s) if s.lo == lo => {
                if value < s.value {
                    s.value = value;
                    s.m = m;
                }
            }
            _ => shells.push(MoserShell {
                lo,
                hi: (2 * lo - 1).min(radius),
                m,
                value,
            }),
        }
    }
    Ok(MoserReport {
        radius,
        exponent,
        min_value,
        argmin,
        pass: resonant.is_empty() && min_value > 0.0,
        resonant,
        shells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutationCheck {
    pub max_defect: f64,
    pub pass: bool,
}

/// `max |f(g(x)) - g(f(x))|` over `resolution` equally spaced points.
pub fn commuting_check(f: &CircleMap, g: &CircleMap, resolution: usize, tol: f64) -> CommutationCheck {
    let n = resolution.max(1);
    let max_defect = (0..n)
        .map(|j| {
            let x = j as f64 / n as f64;
            (f.lift(g.lift(x)) - g.lift(f.lift(x))).abs()
        })
        .fold(0.0, f64::max);
    CommutationCheck {
        max_defect,
        pass: max_defect <= tol,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutingFamily {
    maps: Vec<CircleMap>,
    commutation_tol: f64,
}

impl CommutingFamily {
    pub fn new(maps: Vec<CircleMap>, commutation_tol: f64) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Invalid("a family needs at least one map".into()));
        }
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                let radius = maps[i].periodic.radius().max(maps[j].periodic.radius());
                let c = commuting_check(&maps[i], &maps[j], grid_size(radius), commutation_tol);
                if !c.pass {
                    return Err(Error::Invalid(format!(
                        "maps {i} and {j} do not commute: defect {:e} exceeds {commutation_tol:e}",
                        c.max_defect
                    )));
                }
            }
        }
        Ok(CommutingFamily {
            maps,
            commutation_tol,
        })
    }

    pub fn single(map: CircleMap) -> Self {
        CommutingFamily {
            maps: vec![map],
            commutation_tol: 0.0,
        }
    }

    pub fn maps(&self) -> &[CircleMap] {
        &self.maps
    }

    pub fn commutation_tol(&self) -> f64 {
        self.commutation_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugacyConfig {
    /// Numerators at or below this are treated as zero on resonant modes.
    pub tol: f64,
    /// Iterations used to check the target rotation numbers.
    pub rotation_iters: u64,
}

impl Default for ConjugacyConfig {
    fn default() -> Self {
        ConjugacyConfig {
            tol: 1e-12,
            rotation_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorRow {
    pub m: i64,
    /// Map whose divisor was used.
    pub index: usize,
    pub divisor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedConjugacy {
    /// Periodic part `eta` of `h = id + eta`, normalized to mean zero.
    pub eta: FourierSeries,
    pub divisors: Vec<DivisorRow>,
    /// Largest mismatch of the solution against the maps not used for a mode.
    pub consistency_residual: f64,
    /// `max_i |drift_i - alpha_i|`, which the linear equation cannot absorb.
    pub mean_defect: f64,
}

/// Solves `eta(x + alpha_i) - eta(x) = f_i(x) - x - alpha_i` mode by mode,
/// dividing by the largest available `e^{2 pi i m alpha_i} - 1`.
pub fn linearized_conjugacy(
    family: &CommutingFamily,
    alpha: &[f64],
    cfg: &ConjugacyConfig,
) -> Result<LinearizedConjugacy> {
    let maps = family.maps();
    if alpha.len() != maps.len() {
        return Err(Error::DimensionMismatch {
            expected: maps.len(),
            got: alpha.len(),
        });
    }
    for (i, (f, &a)) in maps.iter().zip(alpha).enumerate() {
        let est = rotation_number(f, cfg.rotation_iters)?;
        // Compare modulo 1, allowing a few ulps of slack on the enclosure.
        let diff = (a - est.lift_average).rem_euclid(1.0);
        let dist = diff.min(1.0 - diff);
        if dist > est.enclosure * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::RotationMismatch {
                index: i,
                target: a,
                lo: est.lo,
                hi: est.hi,
            });
        }
    }
    let radius = maps.iter().map(|f| f.periodic.radius()).max().unwrap_or(0);
    let mut modes = Vec::new();
    let mut divisors = Vec::new();
    let mut consistency_residual: f64 = 0.0;
    for m in 1..=radius {
        let key = [m];
        let (index, divisor) = alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| (i, chordal_distance(m, a)))
            .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        divisors.push(DivisorRow { m, index, divisor });
        let numerator = maps[index].periodic.coeff(&key.into());
        let coeff = if divisor == 0.0 {
            if numerator.norm() > cfg.tol {
                return Err(Error::Obstructed {
                    mode: m,
                    numerator: numerator.norm(),
                });
            }
            Complex64::new(0.0, 0.0)
        } else {
            numerator / (Complex64::from_polar(1.0, 2.0 * PI * m as f64 * alpha[index]) - 1.0)
        };
        for (j, f) in maps.iter().enumerate() {
            if j == index {
                continue;
            }
            let lhs = coeff * (Complex64::from_polar(1.0, 2.0 * PI * m as f64 * alpha[j]) - 1.0);
            consistency_residual =
                consistency_residual.max((lhs - f.periodic.coeff(&key.into())).norm());
        }
        if coeff.norm() > 0.0 {
            modes.push((m, coeff));
        }
    }
    let eta = FourierSeries::real_from_half(1, modes.into_iter().map(|(m, c)| (vec![m], c)))?;
    let mean_defect = maps
        .iter()
        .zip(alpha)
        .map(|(f, &a)| {
            let d = (f.drift - a).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max);
    Ok(LinearizedConjugacy {
        eta,
        divisors,
        consistency_residual,
        mean_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KamConfig {
    /// Truncation radius of the conjugated maps.
    pub truncation: i64,
    pub conjugacy: ConjugacyConfig,
}

impl Default for KamConfig {
    fn default() -> Self {
        KamConfig {
            truncation: 32,
            conjugacy: ConjugacyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KamStep {
    pub step: usize,
    /// `max_i sup |f_i(x) - x - alpha_i|` of the family entering this step.
    pub residual_sup: f64,
    /// Largest l2 norm of the modes dropped when refitting after this step.
    pub truncation_loss: f64,
    pub consistency_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum KamOutcome {
    Completed,
    Converged,
    ResidualIncreased { step: usize },
    Obstructed { mode: i64, numerator: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KamReport {
    pub alpha: Vec<f64>,
    pub steps: Vec<KamStep>,
    pub family: CommutingFamily,
    pub outcome: KamOutcome,
}

/// Repeated linearized conjugation `f_i -> h^{-1} o f_i o h`, `h = id + eta`.
///
/// A diagnostic only: no smoothing is applied and convergence is not
/// guaranteed. Stops early when the residual grows or reaches round-off.
pub fn kam_iterate(
    family: &CommutingFamily,
    alpha: &[f64],
    steps: usize,
    cfg: &KamConfig,
) -> Result<KamReport> {
    if steps == 0 {
        return Err(Error::Invalid("need at least one step".into()));
    }
    let residual = |fam: &CommutingFamily| {
        fam.maps()
            .iter()
            .zip(alpha)
            .map(|(f, &a)| f.distance_to_rotation(a))
            .fold(0.0, f64::max)
    };
    let mut current = family.clone();
    let mut trace = Vec::new();
    let mut outcome = KamOutcome::Completed;
    let mut previous = f64::INFINITY;
    for step in 0..steps {
        let r = residual(&current);
        if r > previous {
            trace.push(KamStep {
                step,
                residual_sup: r,
                truncation_loss: 0.0,
                consistency_residual: 0.0,
            });
            outcome = KamOutcome::ResidualIncreased { step };
            break;
        }
        previous = r;
        if r <= 1e-14 {
            trace.push(KamStep {
                step,
                residual_sup: r,
                truncation_loss: 0.0,
                consistency_residual: 0.0,
            });
            outcome = KamOutcome::Converged;
            break;
        }
        let lin = match linearized_conjugacy(&current, alpha, &cfg.conjugacy) {
            Ok(lin) => lin,
            Err(Error::Obstructed { mode, numerator }) => {
                trace.push(KamStep {
                    step,
                    residual_sup: r,
                    truncation_loss: 0.0,
                    consistency_residual: 0.0,
                });
                outcome = KamOutcome::Obstructed { mode, numerator };
                break;
            }
            Err(e) => return Err(e),
        };
        let h = CircleMap::new(0.0, lin.eta.clone())?;
        let mut loss: f64 = 0.0;
        let mut maps = Vec::with_capacity(current.maps().len());
        for f in current.maps() {
            // Fit at twice the truncation, then truncate to measure the loss.
            let (drift, wide) =
                fit_periodic(|x| h.inverse_lift(f.lift(h.lift(x))) - x, 2 * cfg.truncation)?;
            let (kept, dropped) = wide.truncate(cfg.truncation);
            loss = loss.max(dropped);
            maps.push(CircleMap::new(drift, kept)?);
        }
        trace.push(KamStep {
            step,
            residual_sup: r,
            truncation_loss: loss,
            consistency_residual: lin.consistency_residual,
        });
        current = CommutingFamily {
            maps,
            commutation_tol: current.commutation_tol,
        };
    }
    if matches!(outcome, KamOutcome::Completed) {
        trace.push(KamStep {
            step: steps,
            residual_sup: residual(&current),
            truncation_loss: 0.0,
            consistency_residual: 0.0,
        });
    }
    Ok(KamReport {
        alpha: alpha.to_vec(),
        steps: trace,
        family: current,
        outcome,
    })
}

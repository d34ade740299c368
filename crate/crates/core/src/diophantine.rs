//! Small-divisor analysis for linear actions on tori.
//!
//! For an action generated by the rows `v_1..v_p` of an [`ActionMatrix`], the
//! small divisor at `m` is `delta(m) = ||(<m,v_1>, ..., <m,v_p>)||`. This module
//! enumerates those divisors, separates true resonances from small ones and
//! estimates a Diophantine exponent from the shell-wise minimizers.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{for_each_in_cube, FrequencyVector};

/// Default cap on the number of modes any single enumeration may visit.
pub const DEFAULT_MODE_BUDGET: u64 = 10_000_000;

/// Largest denominator tried when certifying an entry as rational.
pub const MAX_CERTIFIED_DENOMINATOR: i128 = 1_000_000;

/// Relative threshold below which an uncertified divisor counts as resonant.
pub const NUMERICAL_RESONANCE_TOL: f64 = 1e-12;

const RANK_TOL: f64 = 1e-12;

/// Generators `v_1..v_p` of a linear `R^p` action on `T^N`, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionMatrix {
    rows: Vec<Vec<f64>>,
    certificate: Vec<Option<Vec<i128>>>,
}

impl ActionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::Invalid("action matrix needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::Invalid("torus dimension must be at least 1".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rows[bad].len(),
            });
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("action matrix entries must be finite".into()));
        }
        if p > n {
            return Err(Error::RankDeficient(format!(
                "{p} generators cannot be independent in dimension {n}"
            )));
        }
        let m = DMatrix::from_fn(p, n, |i, j| rows[i][j]);
        let sv = m.svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        if smax == 0.0 || smin <= RANK_TOL * smax {
            return Err(Error::RankDeficient(format!(
                "singular values range over [{smin:e}, {smax:e}]"
            )));
        }
        let certificate = rows.iter().map(|r| integer_row(r)).collect();
        Ok(ActionMatrix { rows, certificate })
    }

    pub fn flow(v: Vec<f64>) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn p(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.p(), self.n(), |i, j| self.rows[i][j])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.rows.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// True when every entry is certified rational, so resonances are exact.
    pub fn is_rational(&self) -> bool {
        self.certificate.iter().all(Option::is_some)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|x| x * s).collect())
                .collect(),
        )
    }

    /// `(<m,v_1>, ..., <m,v_p>)`.
    pub fn divisors(&self, m: &[i64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(m, r)).collect()
    }

    pub fn small_divisor(&self, m: &[i64]) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let d = dot(m, r);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Classifies the divisor of row `i` at `m`.
    pub fn row_resonance(&self, i: usize, m: &[i64]) -> Resonance {
        if let Some(ints) = &self.certificate[i] {
            let zero = ints.iter().zip(m).map(|(a, &b)| a * b as i128).sum::<i128>() == 0;
            return if zero { Resonance::Exact } else { Resonance::None };
        }
        let d = dot(m, &self.rows[i]);
        let norm_m = norm(m);
        let norm_v = self.rows[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if d.abs() <= NUMERICAL_RESONANCE_TOL * norm_m * norm_v {
            Resonance::Numerical
        } else {
            Resonance::None
        }
    }

    /// Classifies `delta(m)`: resonant only if every row resonates.
    pub fn resonance(&self, m: &[i64]) -> Resonance {
        let mut worst = Resonance::Exact;
        for i in 0..self.p() {
            match self.row_resonance(i, m) {
                Resonance::None => return Resonance::None,
                Resonance::Numerical => worst = Resonance::Numerical,
                Resonance::Exact => {}
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resonance {
    None,
    /// Certified by integer arithmetic on rational entries.
    Exact,
    /// Below the relative float threshold; not certified.
    Numerical,
}

impl Resonance {
    pub fn is_resonant(self) -> bool {
        self != Resonance::None
    }
}

fn dot(m: &[i64], v: &[f64]) -> f64 {
    m.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum()
}

fn norm(m: &[i64]) -> f64 {
    m.iter().map(|&a| (a as f64) * (a as f64)).sum::<f64>().sqrt()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The fraction `p/q` with `q <= MAX_CERTIFIED_DENOMINATOR` whose float
/// quotient is exactly `x`, if any.
pub fn certify_rational(x: f64) -> Option<(i128, i128)> {
    if !x.is_finite() {
        return None;
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return Some((x as i128, 1));
    }
    let convergents = continued_fraction(x, 64).ok()?;
    let last = convergents.last()?;
    if last.q <= MAX_CERTIFIED_DENOMINATOR && last.p as f64 / last.q as f64 == x {
        Some((last.p, last.q))
    } else {
        None
    }
}

fn integer_row(row: &[f64]) -> Option<Vec<i128>> {
    let fracs: Vec<(i128, i128)> = row.iter().map(|&x| certify_rational(x)).collect::<Option<_>>()?;
    let mut lcm: i128 = 1;
    for &(_, q) in &fracs {
        lcm = lcm.checked_mul(q / gcd(lcm, q))?;
    }
    fracs
        .iter()
        .map(|&(p, q)| p.checked_mul(lcm / q))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallDivisor {
    pub m: FrequencyVector,
    pub delta: f64,
    pub resonance: Resonance,
}

fn cube_size(dims: usize, radius: i64) -> u128 {
    (2 * radius as u128 + 1).saturating_pow(dims as u32)
}

fn check_budget(requested: u128, budget: u64) -> Result<()> {
    if requested > budget as u128 {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    Ok(())
}

/// Every `delta(m)` with `0 < ||m||_inf <= radius`, in lexicographic order.
pub fn small_divisors(v: &ActionMatrix, radius: i64, budget: u64) -> Result<Vec<SmallDivisor>> {
    if radius < 1 {
        return Err(Error::Invalid("scan radius must be at least 1".into()));
    }
    check_budget(cube_size(v.n(), radius), budget)?;
    let n = v.n();
    let slices: Vec<Vec<SmallDivisor>> = (-radius..=radius)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut m = vec![0i64; n];
            m[0] = first;
            let mut visit = |tail: &[i64]| {
                m[1..].copy_from_slice(tail);
                if m.iter().all(|&c| c == 0) {
                    return;
                }
                out.push(SmallDivisor {
                    m: FrequencyVector::new(m.clone()),
                    delta: v.small_divisor(&m),
                    resonance: v.resonance(&m),
                });
            };
            if n == 1 {
                visit(&[]);
            } else {
                for_each_in_cube(n - 1, radius, &mut visit);
            }
            out
        })
        .collect();
    Ok(slices.into_iter().flatten().collect())
}

/// All resonant `m` with `0 < ||m||_inf <= radius`.
pub fn resonant_modes(v: &ActionMatrix, radius: i64, budget: u64) -> Result<Vec<SmallDivisor>> {
    Ok(small_divisors(v, radius, budget)?
        .into_iter()
        .filter(|d| d.resonance.is_resonant())
        .collect())
}

/// One continued-fraction convergent `p/q` and its partial quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub a: i128,
    pub p: i128,
    pub q: i128,
}

/// Exact `numerator / 2^shift` representation of a float, when it fits.
fn dyadic(x: f64) -> Option<(i128, i128)> {
    if x == 0.0 {
        return Some((0, 1));
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1i128 << 52), exp - 1075)
    };
    if e >= 0 {
        if e > 60 {
            return None;
        }
        Some((sign * (mant << e), 1))
    } else {
        let shift = -e;
        if shift > 120 {
            return None;
        }
        let den = 1i128 << shift;
        let g = gcd(mant, den);
        Some((sign * mant / g, den / g))
    }
}

/// Convergents of the continued fraction of `alpha`, at most `terms` of them.
///
/// The expansion is that of the exact rational value of the float; it stops
/// early once a convergent reproduces `alpha` in double precision, so a
/// rational input returns its full finite expansion.
pub fn continued_fraction(alpha: f64, terms: usize) -> Result<Vec<Convergent>> {
    if terms == 0 {
        return Err(Error::Invalid("at least one term is required".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::Invalid("cannot expand a non-finite number".into()));
    }
    let mut out = Vec::new();
    let (mut p_prev, mut p) = (0i128, 1i128);
    let (mut q_prev, mut q) = (1i128, 0i128);
    let mut push = |a: i128, out: &mut Vec<Convergent>| -> bool {
        let (Some(pn), Some(qn)) = (
            a.checked_mul(p).and_then(|x| x.checked_add(p_prev)),
            a.checked_mul(q).and_then(|x| x.checked_add(q_prev)),
        ) else {
            return false;
        };
        (p_prev, p) = (p, pn);
        (q_prev, q) = (q, qn);
        out.push(Convergent { a, p: pn, q: qn });
        true
    };
    if let Some((mut num, mut den)) = dyadic(alpha) {
        while out.len() < terms && den != 0 {
            let a = num.div_euclid(den);
            if !push(a, &mut out) {
                break;
            }
            let last = out[out.len() - 1];
            if last.p as f64 / last.q as f64 == alpha {
                break;
            }
            (num, den) = (den, num - a * den);
        }
    } else {
        let mut r = alpha;
        while out.len() < terms {
            let a = r.floor();
            if a.abs() > 1e30 || !push(a as i128, &mut out) {
                break;
            }
            let last = out[out.len() - 1];
            if last.p as f64 / last.q as f64 == alpha || r == a {
                break;
            }
            r = 1.0 / (r - a);
        }
    }
    Ok(out)
}

/// `sum_s 10^(-s)` over a strictly increasing schedule of exponents.
///
/// Terms smaller than the rounding unit of the running sum are absorbed
/// silently; a schedule whose leading term already underflows is rejected.
pub fn liouville_number(schedule: &[u32]) -> Result<f64> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("schedule must be strictly increasing".into()));
    }
    if let Some(&first) = schedule.first() {
        if first > 307 {
            return Err(Error::Invalid(format!(
                "10^-{first} is not representable in double precision"
            )));
        }
    }
    // Sum smallest terms first.
    Ok(schedule
        .iter()
        .rev()
        .filter(|&&s| s <= 323)
        .map(|&s| 10f64.powi(-(s as i32)))
        .sum())
}

/// Partial Liouville constant `sum_{n <= terms} 10^(-n!)`.
pub fn factorial_schedule(terms: u32) -> Vec<u32> {
    (1..=terms)
        .scan(1u32, |acc, n| {
            *acc = acc.saturating_mul(n);
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Offender {
    pub m: FrequencyVector,
    pub delta: f64,
    pub delta_times_norm_tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellMinimizer {
    /// Shell is `lo <= ||m||_inf <= hi`.
    pub lo: i64,
    pub hi: i64,
    pub m: FrequencyVector,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophantineReport {
    pub radius: i64,
    pub tau_estimate: f64,
    pub c_estimate: f64,
    pub offenders: Vec<Offender>,
    /// Certified integer relations `delta(m) = 0`.
    pub resonances: Vec<FrequencyVector>,
    /// Divisors below the float threshold on uncertified rows.
    pub numerical_resonances: Vec<FrequencyVector>,
    pub shell_minimizers: Vec<ShellMinimizer>,
    /// Exponent fitted from the shells up to each dyadic radius.
    pub tau_by_radius: Vec<(i64, f64)>,
    pub liouville_like: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub budget: u64,
    pub offenders: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            budget: DEFAULT_MODE_BUDGET,
            offenders: 16,
        }
    }
}

fn dyadic_shells(radius: i64) -> Vec<(i64, i64)> {
    let mut shells = Vec::new();
    let mut lo = 1i64;
    while lo <= radius {
        shells.push((lo, (2 * lo - 1).min(radius)));
        lo *= 2;
    }
    shells
}

/// Candidate enumeration for a single generator: for each tail (all
/// coordinates except the pivot) the divisor is convex in the pivot
/// coordinate, so minimizers over any integer interval are the clamped
/// nearest integers.
struct FlowScan<'a> {
    v: &'a ActionMatrix,
    pivot: usize,
    radius: i64,
}

impl<'a> FlowScan<'a> {
    fn new(v: &'a ActionMatrix, radius: i64) -> Self {
        let row = v.row(0);
        let pivot = (0..row.len())
            .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()))
            .unwrap_or(0);
        FlowScan { v, pivot, radius }
    }

    fn tails(&self) -> u128 {
        cube_size(self.v.n() - 1, self.radius)
    }

    fn pivot_weight(&self) -> f64 {
        self.v.row(0)[self.pivot].abs()
    }

    /// Calls `visit(m, x, tail_inf)` for each tail with the pivot slot unset,
    /// where `x` is the real pivot value that zeroes the divisor.
    fn for_each_tail(&self, mut visit: impl FnMut(&mut Vec<i64>, f64, i64)) {
        let n = self.v.n();
        let row = self.v.row(0);
        let mut m = vec![0i64; n];
        let mut go = |tail: &[i64]| {
            let mut k = 0;
            let mut t = 0.0;
            let mut inf = 0;
            for j in 0..n {
                if j == self.pivot {
                    continue;
                }
                m[j] = tail[k];
                t += tail[k] as f64 * row[j];
                inf = inf.max(tail[k].abs());
                k += 1;
            }
            visit(&mut m, -t / row[self.pivot], inf);
        };
        if n == 1 {
            go(&[]);
        } else {
            for_each_in_cube(n - 1, self.radius, &mut go);
        }
    }
}

fn nearest_in(x: f64, lo: i64, hi: i64) -> [i64; 2] {
    let f = (x.floor() as i64).clamp(lo, hi);
    let c = (x.ceil() as i64).clamp(lo, hi);
    [f, c]
}

/// Least-squares slope of `-log delta` against `log ||m||`.
fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

fn fit_points(shells: &[ShellMinimizer]) -> Vec<(f64, f64)> {
    shells
        .iter()
        .map(|s| (s.m.norm().ln(), -s.delta.ln()))
        .collect()
}

/// Generic Dirichlet exponent `(N - p) / p`; exponents well above it are
/// characteristic of Liouville-type frequencies.
fn dirichlet_exponent(v: &ActionMatrix) -> f64 {
    (v.n() - v.p()) as f64 / v.p() as f64
}

/// Estimates the Diophantine type of `v` from modes with `||m||_inf <= radius`.
pub fn estimate_type(v: &ActionMatrix, radius: i64, cfg: ScanConfig) -> Result<DiophantineReport> {
    if radius < 8 {
        return Err(Error::Invalid("estimate_type needs a radius of at least 8".into()));
    }
    let shells = dyadic_shells(radius);
    let mut best: Vec<Option<(FrequencyVector, f64)>> = vec![None; shells.len()];
    let mut resonances = Vec::new();
    let mut numerical = Vec::new();

    let mut record = |m: &[i64], best: &mut Vec<Option<(FrequencyVector, f64)>>| {
        let res = v.resonance(m);
        match res {
            Resonance::Exact => resonances.push(FrequencyVector::new(m.to_vec())),
            Resonance::Numerical => numerical.push(FrequencyVector::new(m.to_vec())),
            Resonance::None => {
                let inf = m.iter().map(|c| c.abs()).max().unwrap_or(0);
                let s = shells.iter().position(|&(lo, hi)| lo <= inf && inf <= hi);
                if let Some(s) = s {
                    let delta = v.small_divisor(m);
                    let better = best[s].as_ref().is_none_or(|(_, d)| delta < *d);
                    if better {
                        best[s] = Some((FrequencyVector::new(m.to_vec()), delta));
                    }
                }
            }
        }
    };

    let flow = (v.p() == 1).then(|| FlowScan::new(v, radius));
    match &flow {
        Some(scan) => {
            check_budget(scan.tails(), cfg.budget)?;
            let piv = scan.pivot;
            scan.for_each_tail(|m, x, tail_inf| {
                // Resonances: the unique exact zero, if integral.
                let mut seen: Vec<i64> = Vec::with_capacity(8);
                for &(lo, hi) in &shells {
                    if tail_inf > hi {
                        continue;
                    }
                    let ranges: &[(i64, i64)] = if tail_inf >= lo {
                        &[(-hi, hi)]
                    } else {
                        &[(-hi, -lo), (lo, hi)]
                    };
                    for &(a, b) in ranges {
                        for c in nearest_in(x, a, b) {
                            seen.push(c);
                        }
                    }
                }
                seen.sort_unstable();
                seen.dedup();
                for c in seen {
                    m[piv] = c;
                    if m.iter().all(|&e| e == 0) {
                        continue;
                    }
                    // Resonant modes are only recorded once, from the
                    // floor/ceil candidates over the full range.
                    record(m, &mut best);
                }
            });
        }
        None => {
            for d in small_divisors(v, radius, cfg.budget)? {
                record(d.m.entries(), &mut best);
            }
        }
    }
    resonances.sort();
    resonances.dedup();
    numerical.sort();
    numerical.dedup();

    let shell_minimizers: Vec<ShellMinimizer> = shells
        .iter()
        .zip(&best)
        .filter_map(|(&(lo, hi), b)| {
            b.as_ref().map(|(m, delta)| ShellMinimizer {
                lo,
                hi,
                m: m.clone(),
                delta: *delta,
            })
        })
        .collect();
    if shell_minimizers.is_empty() {
        return Err(Error::AllResonant);
    }
    let tau = fit_slope(&fit_points(&shell_minimizers)).ok_or(Error::AllResonant)?;

    let tau_by_radius: Vec<(i64, f64)> = (3..=shell_minimizers.len())
        .filter_map(|k| {
            let slice = &shell_minimizers[..k];
            fit_slope(&fit_points(slice)).map(|t| (slice[k - 1].hi, t))
        })
        .collect();

    let offenders = match &flow {
        Some(scan) if tau >= 0.0 => flow_offenders(v, scan, tau, cfg.offenders),
        _ => full_offenders(v, radius, tau, cfg)?,
    };
    let c_estimate = offenders
        .first()
        .map(|o| o.delta_times_norm_tau)
        .ok_or(Error::AllResonant)?;

    let generic = dirichlet_exponent(v);
    let rising = tau_by_radius.windows(2).filter(|w| w[1].1 > w[0].1).count();
    let liouville_like = tau > 2.0 * generic + 1.0 && 2 * rising >= tau_by_radius.len().saturating_sub(1);

    Ok(DiophantineReport {
        radius,
        tau_estimate: tau,
        c_estimate,
        offenders,
        resonances,
        numerical_resonances: numerical,
        shell_minimizers,
        tau_by_radius,
        liouville_like,
    })
}

fn push_offender(top: &mut Vec<Offender>, keep: usize, o: Offender) {
    let pos = top
        .binary_search_by(|x| {
            x.delta_times_norm_tau
                .total_cmp(&o.delta_times_norm_tau)
                .then_with(|| x.m.cmp(&o.m))
        })
        .unwrap_or_else(|e| e);
    if pos < keep {
        top.insert(pos, o);
        top.truncate(keep);
    }
}

fn offender(v: &ActionMatrix, m: &[i64], tau: f64) -> Option<Offender> {
    if m.iter().all(|&c| c == 0) || v.resonance(m).is_resonant() {
        return None;
    }
    let delta = v.small_divisor(m);
    Some(Offender {
        m: FrequencyVector::new(m.to_vec()),
        delta,
        delta_times_norm_tau: delta * norm(m).powf(tau),
    })
}

/// Exact top offenders for a flow with `tau >= 0`: a first pass over
/// nearest-integer candidates gives a bound `B`; any mode with
/// `delta * ||m||^tau < B` has `delta < B`, so a window of half-width
/// `B / |v_pivot| + 1` around the zero of each tail contains all of them.
fn flow_offenders(v: &ActionMatrix, scan: &FlowScan<'_>, tau: f64, keep: usize) -> Vec<Offender> {
    let keep = keep.max(1);
    let r = scan.radius;
    let piv = scan.pivot;
    let mut first: Vec<Offender> = Vec::new();
    scan.for_each_tail(|m, x, _| {
        for c in nearest_in(x, -r, r) {
            m[piv] = c;
            if let Some(o) = offender(v, m, tau) {
                push_offender(&mut first, keep, o);
            }
        }
    });
    let Some(bound) = first.last().map(|o| o.delta_times_norm_tau) else {
        return first;
    };
    let half = (bound / scan.pivot_weight()).ceil() as i64 + 1;
    let mut top: Vec<Offender> = Vec::new();
    scan.for_each_tail(|m, x, _| {
        let centre = x.round() as i64;
        let lo = centre.saturating_sub(half).max(-r);
        let hi = centre.saturating_add(half).min(r);
        for c in lo..=hi {
            m[piv] = c;
            if let Some(o) = offender(v, m, tau) {
                push_offender(&mut top, keep, o);
            }
        }
    });
    top
}

fn full_offenders(v: &ActionMatrix, radius: i64, tau: f64, cfg: ScanConfig) -> Result<Vec<Offender>> {
    let mut top = Vec::new();
    for d in small_divisors(v, radius, cfg.budget)? {
        if let Some(o) = offender(v, d.m.entries(), tau) {
            push_offender(&mut top, cfg.offenders.max(1), o);
        }
    }
    Ok(top)
}

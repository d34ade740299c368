//! The leafwise cohomological equation over linear flows and actions on tori.
//!
//! For a flow `R_v` the equation is `f = X_v g + c`. In Fourier modes it is
//! diagonal: `c = a_0` and `b_m = a_m / (2 pi i <m, v>)`. A vanishing divisor
//! with a nonzero numerator is an obstruction; divisors that are merely small
//! amplify the coefficients of `g`, which is reported as divergence once the
//! amplification crosses a configured factor.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::diophantine::{resonant_modes, ActionMatrix, Resonance, DEFAULT_MODE_BUDGET};
use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, FrequencyVector};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Residual tolerance and the threshold for a nonzero numerator.
    pub tol: f64,
    /// `g` is declared divergent when its `k = 2` decay diagnostic exceeds
    /// that of `f` by this factor.
    pub blowup_factor: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-9,
            blowup_factor: 1e6,
        }
    }
}

impl SolveConfig {
    pub fn with_tol(tol: f64) -> Self {
        SolveConfig {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    Obstructed,
    Divergent,
}

/// A leafwise 1-form in the frame `X_{v_1}, ..., X_{v_p}`: component `i` is
/// `omega(X_{v_i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafwiseOneForm {
    frame: ActionMatrix,
    components: Vec<FourierSeries>,
}

impl LeafwiseOneForm {
    pub fn new(frame: ActionMatrix, components: Vec<FourierSeries>) -> Result<Self> {
        if components.len() != frame.p() {
            return Err(Error::DimensionMismatch {
                expected: frame.p(),
                got: components.len(),
            });
        }
        let real = components.first().map(FourierSeries::is_real);
        for c in &components {
            if c.dims() != frame.n() {
                return Err(Error::DimensionMismatch {
                    expected: frame.n(),
                    got: c.dims(),
                });
            }
            if Some(c.is_real()) != real {
                return Err(Error::Invalid(
                    "all components must share the same real flag".into(),
                ));
            }
        }
        Ok(LeafwiseOneForm { frame, components })
    }

    /// `d_F g`: the components `X_{v_i} g`.
    pub fn exact(frame: ActionMatrix, g: &FourierSeries) -> Result<Self> {
        let components = frame
            .rows()
            .iter()
            .map(|v| g.directional_derivative(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame, components)
    }

    /// The constant form with `omega(X_{v_i}) = c_i`.
    pub fn constant(frame: ActionMatrix, c: &[f64]) -> Result<Self> {
        let n = frame.n();
        let components = c.iter().map(|&x| FourierSeries::constant(n, x)).collect();
        Self::new(frame, components)
    }

    pub fn frame(&self) -> &ActionMatrix {
        &self.frame
    }

    pub fn components(&self) -> &[FourierSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &FourierSeries {
        &self.components[i]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.frame.clone(), components)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub component: usize,
    /// Sum of residual coefficient moduli, an upper bound for the sup norm.
    pub residual_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub g: FourierSeries,
    pub c: Vec<f64>,
    pub residual_sup: f64,
    pub residuals: Vec<ResidualRow>,
    pub obstruction_modes: Vec<FrequencyVector>,
    /// `decay_diagnostic(g, 2) / decay_diagnostic(f, 2)`; zero when `f` is constant.
    pub amplification: f64,
    pub status: SolveStatus,
}

fn divisor_resonance(v: &ActionMatrix, row: usize, m: &FrequencyVector) -> Resonance {
    v.row_resonance(row, m.entries())
}

/// `sup |X_v g + c - f|`, bounded by the l1 norm of the residual coefficients.
fn residual_bound(g: &FourierSeries, v: &[f64], c: f64, f: &FourierSeries) -> Result<f64> {
    Ok(g
        .directional_derivative(v)?
        .add_constant(c)
        .sub(f)?
        .l1_norm())
}

fn amplification(g: &FourierSeries, f: &FourierSeries) -> f64 {
    let base = f.decay_diagnostic(2);
    if base == 0.0 {
        0.0
    } else {
        g.decay_diagnostic(2) / base
    }
}

fn classify(obstructed: bool, amplification: f64, residual: f64, cfg: &SolveConfig) -> SolveStatus {
    if obstructed {
        SolveStatus::Obstructed
    } else if amplification > cfg.blowup_factor || residual > cfg.tol {
        SolveStatus::Divergent
    } else {
        SolveStatus::Solved
    }
}

/// Solves `f = X_v g + c` mode by mode.
///
/// Resonant modes are skipped in `g`; those with `|a_m| > tol` are reported
/// as obstructions and the partial solution is still returned.
pub fn solve_flow(f: &FourierSeries, v: &[f64], cfg: &SolveConfig) -> Result<SolveReport> {
    if !f.is_real() {
        return Err(Error::Invalid("the right-hand side must be real-valued".into()));
    }
    if f.dims() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: f.dims(),
            got: v.len(),
        });
    }
    let frame = ActionMatrix::flow(v.to_vec())?;
    let c = f.mean().re;
    let mut obstructions = Vec::new();
    let mut modes = Vec::with_capacity(f.len());
    for (m, a) in f.iter() {
        if m.is_zero() {
            continue;
        }
        if divisor_resonance(&frame, 0, m).is_resonant() {
            if a.norm() > cfg.tol {
                obstructions.push(m.clone());
            }
            continue;
        }
        let d = m.dot(v);
        modes.push((m.clone(), a / Complex64::new(0.0, TWO_PI * d)));
    }
    let g = FourierSeries::from_modes(f.dims(), true, modes)?.with_radius(f.radius());
    let residual_sup = residual_bound(&g, v, c, f)?;
    let amp = amplification(&g, f);
    let status = classify(!obstructions.is_empty(), amp, residual_sup, cfg);
    Ok(SolveReport {
        g,
        c: vec![c],
        residual_sup,
        residuals: vec![ResidualRow {
            component: 0,
            residual_sup,
        }],
        obstruction_modes: obstructions,
        amplification: amp,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedCheck {
    pub closed: bool,
    pub residual: f64,
}

/// Checks `X_{v_i} omega_j = X_{v_j} omega_i` for all `i < j` coefficientwise.
///
/// The residual is relative to the largest compared coefficient (floored at
/// 1), since round-off in the derivatives grows with the frequency.
pub fn check_closed(omega: &LeafwiseOneForm, tol: f64) -> Result<ClosedCheck> {
    let frame = omega.frame();
    let mut residual: f64 = 0.0;
    for i in 0..frame.p() {
        for j in i + 1..frame.p() {
            let lhs = omega.component(j).directional_derivative(frame.row(i))?;
            let rhs = omega.component(i).directional_derivative(frame.row(j))?;
            let scale = lhs.max_coeff().max(rhs.max_coeff()).max(1.0);
            residual = residual.max(lhs.max_coeff_diff(&rhs)? / scale);
        }
    }
    Ok(ClosedCheck {
        closed: residual <= tol,
        residual,
    })
}

/// Finds `g` and constants `c_i` with `omega_i = X_{v_i} g + c_i`.
///
/// Each mode is divided by the largest divisor `<m, v_i>`; the remaining
/// components are then checked against that choice.
pub fn solve_action(omega: &LeafwiseOneForm, cfg: &SolveConfig) -> Result<SolveReport> {
    let closed = check_closed(omega, cfg.tol)?;
    if !closed.closed {
        return Err(Error::NotClosed {
            residual: closed.residual,
            tol: cfg.tol,
        });
    }
    let frame = omega.frame();
    let p = frame.p();
    let c: Vec<f64> = omega.components().iter().map(|s| s.mean().re).collect();
    let support: BTreeSet<&FrequencyVector> = omega
        .components()
        .iter()
        .flat_map(|s| s.iter().map(|(m, _)| m))
        .filter(|m| !m.is_zero())
        .collect();

    let mut obstructions = Vec::new();
    let mut modes = Vec::with_capacity(support.len());
    for m in support {
        let divisors = frame.divisors(m.entries());
        let resonant: Vec<bool> = (0..p)
            .map(|i| divisor_resonance(frame, i, m).is_resonant())
            .collect();
        let numerators: Vec<Complex64> = omega.components().iter().map(|s| s.coeff(m)).collect();
        let pivot = (0..p)
            .filter(|&i| !resonant[i])
            .max_by(|&a, &b| divisors[a].abs().total_cmp(&divisors[b].abs()));
        let Some(pivot) = pivot else {
            if numerators.iter().any(|a| a.norm() > cfg.tol) {
                obstructions.push(m.clone());
            }
            continue;
        };
        let b = numerators[pivot] / Complex64::new(0.0, TWO_PI * divisors[pivot]);
        for i in 0..p {
            let predicted = if resonant[i] {
                Complex64::new(0.0, 0.0)
            } else {
                b * Complex64::new(0.0, TWO_PI * divisors[i])
            };
            let defect = (numerators[i] - predicted).norm();
            if defect > cfg.tol {
                return Err(Error::Inconsistent {
                    mode: m.entries().to_vec(),
                    defect,
                });
            }
        }
        modes.push((m.clone(), b));
    }
    let real = omega.component(0).is_real();
    let radius = omega.components().iter().map(|s| s.radius()).max().unwrap_or(0);
    let g = FourierSeries::from_modes(frame.n(), real, modes)?.with_radius(radius);

    let mut residuals = Vec::with_capacity(p);
    let mut amp: f64 = 0.0;
    for i in 0..p {
        let residual_sup = residual_bound(&g, frame.row(i), c[i], omega.component(i))?;
        residuals.push(ResidualRow {
            component: i,
            residual_sup,
        });
        amp = amp.max(amplification(&g, omega.component(i)));
    }
    let residual_sup = residuals.iter().map(|r| r.residual_sup).fold(0.0, f64::max);
    let status = classify(!obstructions.is_empty(), amp, residual_sup, cfg);
    Ok(SolveReport {
        g,
        c,
        residual_sup,
        residuals,
        obstruction_modes: obstructions,
        amplification: amp,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionSpace {
    pub radius: i64,
    pub modes: Vec<FrequencyVector>,
    /// True when every mode was certified by integer arithmetic.
    pub certified: bool,
    /// Real dimension beyond the constants: two per conjugate pair and
    /// generator, i.e. `p * modes.len()`.
    pub dimension: usize,
}

/// Resonant modes `0 < ||m||_inf <= radius`, spanning the truncated part of
/// leafwise `H^1` beyond the constant classes.
pub fn obstruction_space(v: &ActionMatrix, radius: i64) -> Result<ObstructionSpace> {
    obstruction_space_with_budget(v, radius, DEFAULT_MODE_BUDGET)
}

pub fn obstruction_space_with_budget(
    v: &ActionMatrix,
    radius: i64,
    budget: u64,
) -> Result<ObstructionSpace> {
    let found = resonant_modes(v, radius, budget)?;
    let certified = found.iter().all(|d| d.resonance == Resonance::Exact);
    let modes: Vec<FrequencyVector> = found.into_iter().map(|d| d.m).collect();
    Ok(ObstructionSpace {
        radius,
        dimension: v.p() * modes.len(),
        modes,
        certified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Equivalence {
    /// `V2 = theta * V1`.
    Equivalent { theta: Vec<Vec<f64>>, residual: f64 },
    /// Row spans differ; `angle` is the largest principal angle between them.
    NotEquivalent { angle: f64 },
}

fn orthonormal_row_basis(v: &ActionMatrix) -> DMatrix<f64> {
    // Columns of Q span the row space of V.
    v.to_matrix().transpose().qr().q()
}

fn largest_principal_angle(a: &ActionMatrix, b: &ActionMatrix) -> f64 {
    let qa = orthonormal_row_basis(a);
    let qb = orthonormal_row_basis(b);
    let sv = (qa.transpose() * qb).svd(false, false).singular_values;
    sv.min().clamp(-1.0, 1.0).acos()
}

/// Decides whether two linear actions share their orbit foliation, returning
/// the reparametrization `theta` with `V2 = theta V1` if they do.
pub fn parameter_equivalence(v1: &ActionMatrix, v2: &ActionMatrix, tol: f64) -> Result<Equivalence> {
    if v1.p() != v2.p() || v1.n() != v2.n() {
        return Err(Error::DimensionMismatch {
            expected: v1.p() * v1.n(),
            got: v2.p() * v2.n(),
        });
    }
    let a = v1.to_matrix();
    let b = v2.to_matrix();
    // theta^T solves V1^T theta^T = V2^T in the least-squares sense.
    let svd = a.transpose().svd(true, true);
    let theta_t = svd
        .solve(&b.transpose(), 0.0)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let theta = theta_t.transpose();
    let residual = (&theta * &a - &b).abs().max();
    let scale = b.abs().max().max(1.0);
    if residual <= tol * scale {
        let rows = (0..theta.nrows())
            .map(|i| theta.row(i).iter().copied().collect())
            .collect();
        Ok(Equivalence::Equivalent {
            theta: rows,
            residual,
        })
    } else {
        Ok(Equivalence::NotEquivalent {
            angle: largest_principal_angle(v1, v2),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub p: usize,
    pub n: usize,
    pub radius: i64,
    /// Truncated `dim H^1(F; TF^perp)`.
    pub dimension: usize,
    /// Contribution of the leafwise-constant classes, `p * (N - p)`.
    pub constant_part: usize,
    /// Contribution of resonant modes, `obstruction_dim * (N - p)`.
    pub obstruction_part: usize,
    pub normal_rank: usize,
    pub obstruction_modes: usize,
    pub infinitesimally_rigid: bool,
}

/// Dimension of the truncated normal-bundle-valued first cohomology of the
/// torus model, `(p + obstruction_dim) * (N - p)`.
pub fn infinitesimal_rigidity_report(v: &ActionMatrix, radius: i64) -> Result<RigidityReport> {
    let (p, n) = (v.p(), v.n());
    if p >= n {
        return Err(Error::Invalid(
            "the orbit foliation has no normal directions (p = N)".into(),
        ));
    }
    let obstructions = obstruction_space(v, radius)?;
    let normal = n - p;
    let constant_part = p * normal;
    let obstruction_part = obstructions.dimension * normal;
    let dimension = constant_part + obstruction_part;
    Ok(RigidityReport {
        p,
        n,
        radius,
        dimension,
        constant_part,
        obstruction_part,
        normal_rank: normal,
        obstruction_modes: obstructions.modes.len(),
        infinitesimally_rigid: dimension == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = 1.618_033_988_749_895;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_right_hand_side() {
        let f = FourierSeries::constant(2, 7.0);
        let r = solve_flow(&f, &[1.0, PHI], &SolveConfig::default()).unwrap();
        assert!(r.g.is_empty());
        assert_eq!(r.c, vec![7.0]);
        assert_eq!(r.status, SolveStatus::Solved);
    }

    #[test]
    fn forced_resonance_is_obstructed() {
        let f = FourierSeries::real_from_half(2, [([1, -1], c(0.5, 0.0))]).unwrap();
        let r = solve_flow(&f, &[1.0, 1.0], &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Obstructed);
        assert_eq!(
            r.obstruction_modes,
            vec![FrequencyVector::from([-1, 1]), FrequencyVector::from([1, -1])]
        );
    }

    #[test]
    fn complex_rhs_is_rejected() {
        let f = FourierSeries::from_modes(1, false, [([1], c(1.0, 0.0))]).unwrap();
        assert!(solve_flow(&f, &[1.0], &SolveConfig::default()).is_err());
    }

    #[test]
    fn constant_form_is_closed_and_solved() {
        let v = ActionMatrix::new(vec![vec![1.0, 0.0, PHI], vec![0.0, 1.0, 2f64.sqrt()]]).unwrap();
        let omega = LeafwiseOneForm::constant(v, &[2.0, -3.0]).unwrap();
        let check = check_closed(&omega, 1e-12).unwrap();
        assert!(check.closed);
        assert_eq!(check.residual, 0.0);
        let r = solve_action(&omega, &SolveConfig::default()).unwrap();
        assert!(r.g.is_empty());
        assert_eq!(r.c, vec![2.0, -3.0]);
    }

    #[test]
    fn non_closed_form_detected() {
        let v = ActionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cos = FourierSeries::real_from_half(2, [([1, 0], c(0.5, 0.0))]).unwrap();
        let omega = LeafwiseOneForm::new(v, vec![FourierSeries::constant(2, 1.0), cos]).unwrap();
        let check = check_closed(&omega, 1e-12).unwrap();
        assert!(!check.closed);
        // X_1 cos(2 pi x_1) has coefficients +-i pi against 0 on the other
        // side, so the whole coefficient is the mismatch: relative residual 1.
        assert!((check.residual - 1.0).abs() < 1e-12);
        assert!(matches!(
            solve_action(&omega, &SolveConfig::default()),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn mean_only_form_gives_zero_primitive() {
        let v = ActionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let omega = LeafwiseOneForm::constant(v, &[0.5, 0.0]).unwrap();
        let r = solve_action(&omega, &SolveConfig::default()).unwrap();
        assert!(r.g.is_empty());
    }

    #[test]
    fn obstruction_space_examples() {
        let v = ActionMatrix::flow(vec![1.0, 0.0]).unwrap();
        let space = obstruction_space(&v, 2).unwrap();
        let expected: Vec<FrequencyVector> =
            vec![[0, -2].into(), [0, -1].into(), [0, 1].into(), [0, 2].into()];
        assert_eq!(space.modes, expected);
        assert!(space.certified);
    }

    #[test]
    fn scaling_equivalence() {
        let v1 = ActionMatrix::flow(vec![1.0, PHI]).unwrap();
        let v2 = v1.scaled(2.0).unwrap();
        match parameter_equivalence(&v1, &v2, 1e-12).unwrap() {
            Equivalence::Equivalent { theta, .. } => assert!((theta[0][0] - 2.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn different_spans_not_equivalent() {
        let v1 = ActionMatrix::flow(vec![1.0, PHI]).unwrap();
        let v2 = ActionMatrix::flow(vec![1.0, 2f64.sqrt()]).unwrap();
        match parameter_equivalence(&v1, &v2, 1e-12).unwrap() {
            Equivalence::NotEquivalent { angle } => assert!(angle > 0.01),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_rank_action_has_no_normal_directions() {
        let v = ActionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(infinitesimal_rigidity_report(&v, 3).is_err());
    }
}

use leafwise_core::diophantine::*;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

/// Partial quotients of the exact rational value of a double.
fn exact_quotients(x: f64, terms: usize) -> Vec<i128> {
    let mut r = BigRational::from_float(x).unwrap();
    let mut out = Vec::new();
    for _ in 0..terms {
        let a = r.floor();
        out.push(a.to_integer().to_i128().unwrap());
        let frac = &r - &a;
        if frac.is_zero() {
            break;
        }
        r = frac.recip();
    }
    out
}

proptest! {
    #[test]
    fn convergents_match_exact_expansion(x in 0.001f64..1000.0) {
        let cf = continued_fraction(x, 12).unwrap();
        let exact = exact_quotients(x, cf.len());
        let ours: Vec<i128> = cf.iter().map(|c| c.a).collect();
        // The expansion stops once a convergent reproduces x; up to that
        // point it agrees with the exact one.
        prop_assert_eq!(&ours[..], &exact[..ours.len()]);
        for w in cf.windows(2) {
            // p_k q_{k-1} - p_{k-1} q_k = +-1.
            prop_assert_eq!((w[1].p * w[0].q - w[0].p * w[1].q).abs(), 1);
        }
    }

    #[test]
    fn small_fractions_certified(p in -1000i64..1000, q in 1i64..1000) {
        let g = num_integer_gcd(p.abs(), q);
        let (p, q) = (p / g, q / g);
        prop_assert_eq!(certify_rational(p as f64 / q as f64), Some((p as i128, q as i128)));
    }

    #[test]
    fn small_divisor_is_euclidean_norm(a in 0.1f64..3.0, b in 3.5f64..5.0, m0 in -20i64..20, m1 in -20i64..20) {
        let v = ActionMatrix::new(vec![vec![1.0, a], vec![b, 1.0]]).unwrap();
        let d = v.small_divisor(&[m0, m1]);
        let direct = (m0 as f64 + a * m1 as f64).hypot(b * m0 as f64 + m1 as f64);
        prop_assert!((d - direct).abs() <= 1e-12 * direct.max(1.0));
    }
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        num_integer_gcd(b, a % b)
    }
}

#[test]
fn shell_minimizers_match_brute_force() {
    let r2 = 2f64.sqrt();
    let v = ActionMatrix::flow(vec![1.0, r2]).unwrap();
    let report = estimate_type(&v, 300, ScanConfig::default()).unwrap();
    for s in &report.shell_minimizers {
        let mut best = f64::INFINITY;
        for a in -s.hi..=s.hi {
            for b in -s.hi..=s.hi {
                let inf = a.abs().max(b.abs());
                if inf >= s.lo && inf <= s.hi {
                    best = best.min((a as f64 + r2 * b as f64).abs());
                }
            }
        }
        assert!((s.delta - best).abs() <= 1e-15, "shell {}..{}: {} vs {best}", s.lo, s.hi, s.delta);
    }
    assert!((0.8..=1.2).contains(&report.tau_estimate));
}

#[test]
fn rational_flow_reports_certified_resonances() {
    let v = ActionMatrix::flow(vec![1.0, 0.5]).unwrap();
    let divisors = small_divisors(&v, 4, 1_000_000).unwrap();
    let resonant: Vec<_> = divisors.iter().filter(|d| d.resonance == Resonance::Exact).collect();
    // m = k (1, -2) for k = +-1, +-2.
    assert_eq!(resonant.len(), 4);
}

#[test]
fn liouville_schedule_validation() {
    assert!(liouville_number(&[2, 1]).is_err());
    assert!(liouville_number(&[400]).is_err());
    let l = liouville_number(&factorial_schedule(6)).unwrap();
    assert!((l - 0.110001).abs() < 1e-15);
}

use leafwise_core::{FourierSeries, GridSamples};
use num_complex::Complex64;
use proptest::prelude::*;

fn series_strategy(real: bool) -> impl Strategy<Value = FourierSeries> {
    (1usize..=3, 0i64..=4).prop_flat_map(move |(dims, radius)| {
        let mode = prop::collection::vec(-radius..=radius, dims);
        let coeff = (-1.0f64..1.0, -1.0f64..1.0);
        prop::collection::vec((mode, coeff), 0..8).prop_map(move |modes| {
            let modes = modes.into_iter().map(|(m, (re, im))| (m, Complex64::new(re, im)));
            let s = if real {
                FourierSeries::real_from_half(dims, modes).unwrap()
            } else {
                FourierSeries::from_modes(dims, false, modes).unwrap()
            };
            let r = radius.max(s.radius());
            s.with_radius(r)
        })
    })
}

fn resolution(s: &FourierSeries, extra: i64) -> Vec<usize> {
    vec![(2 * (s.radius() + extra) + 1) as usize; s.dims()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sample_round_trip(s in series_strategy(false)) {
        let grid = s.sample(&resolution(&s, 0)).unwrap();
        let back = FourierSeries::from_samples(&grid, s.radius()).unwrap();
        prop_assert!(back.max_coeff_diff(&s).unwrap() <= 1e-12);
    }

    #[test]
    fn real_series_sample_to_real_values(s in series_strategy(true)) {
        let grid = s.sample(&resolution(&s, 1)).unwrap();
        prop_assert!(grid.is_real());
        for (i, z) in grid.values().iter().enumerate() {
            let direct = s.evaluate(&grid.point(i)).unwrap();
            prop_assert!(direct.im.abs() <= 1e-12);
            prop_assert!((z.re - direct.re).abs() <= 1e-12);
        }
    }

    #[test]
    fn product_matches_pointwise(a in series_strategy(true), b in series_strategy(true)) {
        prop_assume!(a.dims() == b.dims());
        let p = a.multiply(&b, None).unwrap();
        let res = resolution(&p, 0);
        let (ga, gb, gp) = (a.sample(&res).unwrap(), b.sample(&res).unwrap(), p.sample(&res).unwrap());
        for i in 0..gp.values().len() {
            let diff = (ga.values()[i] * gb.values()[i] - gp.values()[i]).norm();
            prop_assert!(diff <= 1e-11);
        }
    }

    #[test]
    fn leibniz_rule(a in series_strategy(true), b in series_strategy(true), v0 in -2.0f64..2.0, v1 in -2.0f64..2.0, v2 in -2.0f64..2.0) {
        prop_assume!(a.dims() == b.dims());
        let v = &[v0, v1, v2][..a.dims()];
        let lhs = a.multiply(&b, None).unwrap().directional_derivative(v).unwrap();
        let rhs = a.directional_derivative(v).unwrap().multiply(&b, None).unwrap()
            .add(&a.multiply(&b.directional_derivative(v).unwrap(), None).unwrap()).unwrap();
        prop_assert!(lhs.max_coeff_diff(&rhs).unwrap() <= 1e-10);
    }

    #[test]
    fn truncation_accounts_for_dropped_energy(s in series_strategy(false), r in 0i64..4) {
        let (kept, dropped) = s.truncate(r);
        let total = s.l2_norm().powi(2);
        prop_assert!((kept.l2_norm().powi(2) + dropped.powi(2) - total).abs() <= 1e-12 * total.max(1.0));
    }
}

#[test]
fn under_resolved_grid_rejected() {
    let s = FourierSeries::real_from_half(1, [(vec![5], Complex64::new(1.0, 0.0))]).unwrap();
    let grid = GridSamples::from_fn(vec![9], |x| (x[0] * 10.0).sin()).unwrap();
    assert!(FourierSeries::from_samples(&grid, s.radius()).is_err());
}

#[test]
fn smooth_function_coefficients_decay() {
    let grid = GridSamples::from_fn(vec![65], |x| (std::f64::consts::TAU * x[0]).cos().exp()).unwrap();
    let s = FourierSeries::from_samples(&grid, 32).unwrap();
    // e^{cos t} has coefficients I_m(1), so |a_10| = I_10(1).
    let a10 = s.coeff(&vec![10].into()).norm();
    assert!((a10 - 2.7529480398368737e-10).abs() < 1e-15, "{a10}");
}

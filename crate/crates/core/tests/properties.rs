use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strichartz::*;

fn arb_complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn arb_vector(max_width: usize) -> impl Strategy<Value = FourierVector> {
    (-4i64..4, prop::collection::vec(arb_complex(), 1..=max_width)).prop_filter_map("nonzero", |(n, c)| {
        FourierVector::new(n, c).ok().filter(|u| !u.is_zero())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quartic_scaling(u in arb_vector(6), b in 0.1f64..4.0, lambda in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let w = strichartz_w(&u, b).unwrap();
        let ws = strichartz_w(&u.scale(lambda), b).unwrap();
        prop_assert!((ws - lambda.powi(4) * w).abs() <= 1e-12 * ws.abs());
    }

    #[test]
    fn unit_sphere_lower_bound(u in arb_vector(7), b in 0.1f64..5.0) {
        let u = project_sphere(&u, 1.0).unwrap();
        let w = strichartz_w(&u, b).unwrap();
        prop_assert!(w >= b / (2.0 * PI) - 1e-10);
    }

    #[test]
    fn dilation_identity(u in arb_vector(5), k in 0usize..3) {
        let period = [2.0 * PI, 4.0, (8.0 * PI).sqrt()][k];
        let f = PeriodicField::new(period, u).unwrap();
        let h = hamiltonian_h(&f).unwrap();
        let hq = hamiltonian_h_quadrature(&f, &f.quadrature());
        prop_assert!((h - hq).abs() <= 1e-8 * h.abs());
        prop_assert!(h < 0.0);
    }

    #[test]
    fn real_coefficients_fail_the_criterion_at_pi(
        n in -4i64..4,
        vals in prop::collection::vec(-1.0f64..1.0, 1..=9),
    ) {
        let u = FourierVector::from_real(n, &vals).unwrap();
        prop_assume!(!u.is_zero());
        prop_assert!(a_functional(&u, PI).unwrap() < 0.0);
    }
}

#[test]
fn positive_family_criterion_implies_existence() {
    let family_cfg = AscentConfig {
        restarts: 4,
        ..AscentConfig::default()
    };
    let sphere_cfg = AscentConfig {
        restarts: 4,
        max_iters: 20000,
        ..AscentConfig::default()
    };
    for (family, b) in [(1u8, 0.5), (2, 0.85), (3, 1.3), (4, 1.5)] {
        let a = maximize_a_family(family, b, &family_cfg).unwrap();
        assert!(a.value > 1e-6, "family {family} at B = {b}: max A = {}", a.value);
        let w = maximize_w(b, 4, &sphere_cfg).unwrap();
        assert!(w.value > b / PI + 1e-8, "B = {b}: J = {} vs B/pi = {}", w.value, b / PI);
    }
}

#[test]
fn no_ground_states_at_critical_periods() {
    let cfg = AscentConfig {
        restarts: 4,
        max_iters: 20000,
        ..AscentConfig::default()
    };
    for n in [1.0f64, 2.0] {
        let period = 2.0 * (PI / n).sqrt();
        let (_, b) = dilation_params(period).unwrap();
        assert!((b - n * PI).abs() < 1e-12);
        for h in 1..=4 {
            let r = maximize_w(b, h, &cfg).unwrap();
            assert!(r.value < n, "N = {n}, h = {h}: J = {}", r.value);
        }
    }
}

#[test]
fn vanishing_sequence_approaches_b_over_pi() {
    for b in [0.5, 1.0, PI, 4.0] {
        let gaps: Vec<f64> = [4usize, 16, 64]
            .iter()
            .map(|&j| (strichartz_w(&FourierVector::vanishing(j), b).unwrap() - b / PI).abs())
            .collect();
        assert!(gaps.windows(2).all(|g| g[1] < g[0]), "B = {b}: {gaps:?}");
        assert!(gaps[2] < 0.05 * b / PI, "B = {b}: {gaps:?}");
    }
}

#[test]
fn ascent_traces_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..8 {
        let cfg = AscentConfig {
            restarts: 2,
            seed: rng.gen(),
            ..AscentConfig::default()
        };
        let b = rng.gen_range(0.3..4.0);
        let r = maximize_w(b, rng.gen_range(1..=4), &cfg).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].1 >= w[0].1));
        let f = maximize_a_family(rng.gen_range(1..=4), b, &cfg).unwrap();
        assert!(f.trace.windows(2).all(|w| w[1].1 >= w[0].1));
    }
}

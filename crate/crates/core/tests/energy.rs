mod common;

use common::{graph_and_values, rel, vf};
use isocap::{finite_difference_check, p_energy, p_energy_gradient};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0), 1.05..5.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn translation_is_exact_on_dyadic_values(
        (g, u) in graph_and_values(2, 10),
        k in -64i32..64,
        p in exponent(),
    ) {
        // values on a 2^-10 grid keep every shifted difference exact
        let u: Vec<f64> = u.iter().map(|x| (x * 1024.0).round() / 1024.0).collect();
        let c = f64::from(k) / 1024.0;
        let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
        prop_assert_eq!(p_energy(&g, &vf(u), p).unwrap(), p_energy(&g, &vf(shifted), p).unwrap());
    }

    #[test]
    fn translation_general((g, u) in graph_and_values(2, 10), c in -5.0..5.0f64, p in exponent()) {
        let e = p_energy(&g, &vf(u.clone()), p).unwrap();
        let shifted = p_energy(&g, &vf(u.iter().map(|x| x + c).collect()), p).unwrap();
        prop_assert!((e - shifted).abs() <= 1e-12 * e.max(1.0) * (1.0 + c.abs()).powf(p));
    }

    #[test]
    fn homogeneity((g, u) in graph_and_values(2, 10), s in -4.0..4.0f64, p in exponent()) {
        prop_assume!(s != 0.0);
        let e = p_energy(&g, &vf(u.clone()), p).unwrap();
        let scaled = p_energy(&g, &vf(u.iter().map(|x| s * x).collect()), p).unwrap();
        prop_assert!(rel(scaled, s.abs().powf(p) * e) <= 1e-12 || e == 0.0);
    }

    #[test]
    fn clamping_never_increases((g, u) in graph_and_values(2, 10), p in exponent()) {
        let clamped: Vec<f64> = u.iter().map(|x| x.clamp(0.0, 1.0)).collect();
        prop_assert!(p_energy(&g, &vf(clamped), p).unwrap() <= p_energy(&g, &vf(u), p).unwrap());
    }

    #[test]
    fn gradient_sums_to_zero((g, u) in graph_and_values(2, 10), p in exponent()) {
        let grad = p_energy_gradient(&g, &vf(u), p).unwrap();
        let sum: f64 = grad.values().iter().sum();
        prop_assert!(sum.abs() <= 1e-10, "sum {}", sum);
    }

    #[test]
    fn gradient_matches_differences((g, u) in graph_and_values(2, 10), p in 2.0..5.0f64) {
        let u = vf(u);
        let grad = p_energy_gradient(&g, &u, p).unwrap();
        let scale = grad.values().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let err = finite_difference_check(&g, &u, p, 1e-5).unwrap();
        prop_assert!(err <= 1e-5 * scale, "err {} scale {}", err, scale);
    }
}

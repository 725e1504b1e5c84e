use std::f64::consts::PI;

use bohrlab_core::limits::{cluster_epsilon, cluster_target};
use bohrlab_core::pairing::{ft_measure, pair_quadrature};
use bohrlab_core::propagator::{evolve_gaussian_exact, gaussian_scale};
use bohrlab_core::quadrature::{integrate_domain, Tolerance};
use bohrlab_core::{Mean, MollifierSpec, TestFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = MollifierSpec> {
    prop_oneof![Just(MollifierSpec::gaussian()), Just(MollifierSpec::raised_cosine())]
}

fn time() -> impl Strategy<Value = f64> {
    prop_oneof![-2.0..-0.1f64, 0.1..2.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_is_hermitian(spec in spec_strategy(), eps in 0.1..1.0f64, t in time(), a in -5.0..5.0f64, xi in -3.0..3.0f64) {
        let p = ft_measure(&spec, eps, t, a, xi).unwrap();
        let m = ft_measure(&spec, eps, t, a, -xi).unwrap();
        prop_assert!((p - m.conj()).norm() <= 1e-12);
    }

    #[test]
    fn transform_is_bounded_by_autocorrelation(spec in spec_strategy(), eps in 0.1..1.0f64, t in time(), a in -5.0..5.0f64, xi in -3.0..3.0f64) {
        let v = ft_measure(&spec, eps, t, a, xi).unwrap().norm();
        let bound = spec.autocorrelation(2.0 * t * xi / eps).unwrap();
        prop_assert!(v <= bound + 1e-12, "{v} > {bound}");
        prop_assert!(v <= 1.0 + 1e-12);
    }

    #[test]
    fn modulus_is_shift_invariant(spec in spec_strategy(), eps in 0.1..1.0f64, t in time(), a in -20.0..20.0f64, xi in -3.0..3.0f64) {
        let shifted = ft_measure(&spec, eps, t, a, xi).unwrap().norm();
        let centred = ft_measure(&spec, eps, t, 0.0, xi).unwrap().norm();
        prop_assert!((shifted - centred).abs() <= 1e-10);
    }

    #[test]
    fn transform_at_zero_is_the_mass(spec in spec_strategy(), eps in 0.05..1.0f64, t in time(), a in -5.0..5.0f64) {
        let v = ft_measure(&spec, eps, t, a, 0.0).unwrap();
        prop_assert!((v - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn real_data_is_time_symmetric(spec in spec_strategy(), eps in 0.1..1.0f64, t in 0.1..2.0f64, a in -5.0..5.0f64, xi in -3.0..3.0f64) {
        // u(−t) = conj u(t) for real initial data, so the densities agree
        let fwd = ft_measure(&spec, eps, t, a, xi).unwrap();
        let bwd = ft_measure(&spec, eps, -t, a, xi).unwrap();
        prop_assert!((fwd - bwd).norm() <= 1e-12);
    }

    #[test]
    fn gaussian_modulus_closed_form(eps in 0.2..1.0f64, t in time(), xi in -2.0..2.0f64) {
        let g = MollifierSpec::gaussian();
        let want = (-(t * t + eps.powi(4)) * xi * xi / (2.0 * eps * eps)).exp();
        let got = ft_measure(&g, eps, t, 0.0, xi).unwrap().norm();
        prop_assert!((got - want).abs() <= 1e-10 * want.max(1e-300), "{got} vs {want}");
    }

    #[test]
    fn scaled_density_has_unit_mass(spec in spec_strategy(), eps in 0.01..3.0f64) {
        let d = spec.domain().scaled(eps);
        let e = integrate_domain(|x| spec.eval_scaled(eps, x).unwrap(), &d, Tolerance::new(1e-15, 1e-12)).unwrap();
        prop_assert!((e.value - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn exact_gaussian_density_has_unit_mass(eps in 0.05..1.0f64, t in time(), a in -10.0..10.0f64) {
        let d = evolve_gaussian_exact(eps, t).unwrap().translated(a);
        let one = pair_quadrature(&d, &TestFunction::constant(Complex64::new(1.0, 0.0))).unwrap();
        prop_assert!((one.value - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn cluster_roots_have_small_residual(alpha in 0.0..(2.0 * PI), t in time(), n in 1u32..4) {
        if let Ok(eps) = cluster_epsilon(alpha, t, n) {
            let c = cluster_target(alpha, n);
            prop_assert!(eps > 0.0 && eps <= 1.0);
            prop_assert!((gaussian_scale(eps, t) - c).abs() <= 1e-12 * c);
        }
    }

    #[test]
    fn invariant_mean_is_zero_frequency_coefficient(
        freqs in proptest::collection::btree_set(-40i32..40, 1..6),
        coefs in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 6),
    ) {
        let terms: Vec<(f64, Complex64)> = freqs
            .iter()
            .zip(&coefs)
            .map(|(k, (re, im))| (*k as f64 / 4.0, Complex64::new(*re, *im)))
            .collect();
        let a0 = terms.iter().find(|(k, _)| *k == 0.0).map_or(Complex64::new(0.0, 0.0), |(_, c)| *c);
        let f = TestFunction::trig(terms).unwrap();
        prop_assert_eq!(f.invariant_mean().unwrap(), Mean::Value(a0));
    }
}

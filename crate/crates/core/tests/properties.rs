use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use uncertainty_core::classical::{classical_relation, quadratic_discriminant_check, SampleSet};
use uncertainty_core::config::QuadraticFormGrid;
use uncertainty_core::relations::{evaluate_modified, quadratic_form_check};
use uncertainty_core::stats::{covariance, imag_cross};
use uncertainty_core::{
    inner_product, norm, realize, GridTopology, OperatorSpec, StateRecipe, Tolerances, WaveFunction,
};

fn amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), len)
        .prop_map(|v| v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
}

fn pair() -> impl Strategy<Value = (WaveFunction, WaveFunction)> {
    (3usize..80, -5.0..0.0f64, 0.5..5.0f64).prop_flat_map(|(n, a, width)| {
        (amplitudes(n), amplitudes(n)).prop_map(move |(u, v)| {
            let t = GridTopology::line(a, a + width, n).unwrap();
            (WaveFunction::new(t.clone(), u).unwrap(), WaveFunction::new(t, v).unwrap())
        })
    })
}

fn coefficients() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..6)
        .prop_filter("non-zero", |v| v.iter().any(|(r, i)| r.abs() + i.abs() > 0.1))
        .prop_map(|v| v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
}

fn modes() -> impl Strategy<Value = Vec<(i64, Complex64)>> {
    prop::collection::vec((-4i64..=4, -1.0..1.0f64, -1.0..1.0f64), 1..6)
        .prop_filter("non-zero", |v| v.iter().any(|(_, r, i)| r.abs() + i.abs() > 0.1))
        .prop_map(|v| v.into_iter().map(|(m, r, i)| (m, Complex64::new(r, i))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_symmetry((chi, psi) in pair()) {
        let a = inner_product(&chi, &psi).unwrap();
        let b = inner_product(&psi, &chi).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn cauchy_schwarz((chi, psi) in pair()) {
        let lhs = inner_product(&chi, &psi).unwrap().norm();
        let rhs = norm(&chi) * norm(&psi);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn conjugate_linear_in_first((chi, psi) in pair(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let c = Complex64::new(re, im);
        let lhs = inner_product(&chi.scaled(c), &psi).unwrap();
        let rhs = c.conj() * inner_product(&chi, &psi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        let lin = inner_product(&psi, &chi.scaled(c)).unwrap();
        prop_assert!((lin - c * inner_product(&psi, &chi).unwrap()).norm() <= 1e-10 * (1.0 + lin.norm()));
    }

    #[test]
    fn modified_relation_on_line(coeffs in coefficients(), hbar in 0.3..3.0f64) {
        let recipe = StateRecipe::HermiteSuperposition { coefficients: coeffs };
        let psi = realize(&recipe, &recipe.default_topology(513).unwrap()).unwrap();
        let r = evaluate_modified(&OperatorSpec::position(), &OperatorSpec::momentum(hbar), &psi, &Tolerances::default()).unwrap();
        prop_assert_eq!(r.modified.satisfied, Some(true));
        prop_assert!(r.modified.margin.unwrap() >= -1e-12);
    }

    #[test]
    fn covariance_symmetric_imag_antisymmetric(m in modes(), alpha in 0.0..TAU) {
        let recipe = StateRecipe::wave_packet(&m, alpha);
        let psi = realize(&recipe, &recipe.default_topology(257).unwrap()).unwrap();
        let tol = Tolerances::default();
        let (phi, lz) = (OperatorSpec::angle(), OperatorSpec::angular_momentum(1.0));
        let c1 = covariance(&phi, &lz, &psi, &tol).unwrap();
        let c2 = covariance(&lz, &phi, &psi, &tol).unwrap();
        prop_assert!((c1 - c2).abs() <= 1e-12);
        let i1 = imag_cross(&phi, &lz, &psi, &tol).unwrap();
        let i2 = imag_cross(&lz, &phi, &psi, &tol).unwrap();
        prop_assert!((i1 + i2).abs() <= 1e-12);
    }

    #[test]
    fn quadratic_form_nonnegative(m in modes(), alpha in 0.0..TAU) {
        let q = QuadraticFormGrid::default();
        let recipe = StateRecipe::wave_packet(&m, alpha);
        let psi = realize(&recipe, &recipe.default_topology(257).unwrap()).unwrap();
        let r = quadratic_form_check(
            &OperatorSpec::angle(),
            &OperatorSpec::angular_momentum(1.0),
            &psi,
            &q.lambdas(),
            &q.thetas(),
            &Tolerances::default(),
        )
        .unwrap();
        prop_assert!(r.worst_margin >= -1e-12);
        prop_assert!(r.consistent, "{:?}", r);
    }

    #[test]
    fn classical_inequality(a in prop::collection::vec(-100.0..100.0f64, 2..60), seed in -5.0..5.0f64) {
        let b: Vec<f64> = a.iter().enumerate().map(|(k, x)| seed * x + (k as f64 * 1.7).sin()).collect();
        let s = SampleSet::new(a, b, None).unwrap();
        let r = classical_relation(&s);
        prop_assert!(r.holds);
        let d = quadratic_discriminant_check(&s, &[-2.0, -0.5, 0.0, 0.5, 2.0]);
        prop_assert!(d.discriminant <= 1e-9 * r.lhs * r.lhs);
        prop_assert!(d.min_value >= -1e-12);
    }
}

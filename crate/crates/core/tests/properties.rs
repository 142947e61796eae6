//! Property-based invariants of the state algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use qclock_core::bounds::positive_part_trace;
use qclock_core::statelib::{
    density_from_pure, fidelity, fuchs_van_de_graaf_check, purity, trace_distance,
    unitary_exp, HermitianOperator, PureSystemState, SystemDensityMatrix,
};

const SLACK: f64 = 1e-9;

fn raw_state(dim: usize) -> impl Strategy<Value = PureSystemState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim).prop_filter_map(
        "normalizable",
        |pairs| {
            let amps: Vec<Complex64> =
                pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            (n > 1e-3).then(|| PureSystemState::normalized(amps).unwrap())
        },
    )
}

/// Random mixture of `k` pure states.
fn raw_density(dim: usize, k: usize) -> impl Strategy<Value = SystemDensityMatrix> {
    (
        prop::collection::vec(raw_state(dim), k),
        prop::collection::vec(0.05..1.0f64, k),
    )
        .prop_map(|(states, weights)| {
            let total: f64 = weights.iter().sum();
            let mut m = DMatrix::<Complex64>::zeros(states[0].dim(), states[0].dim());
            for (s, w) in states.iter().zip(&weights) {
                m += density_from_pure(s).matrix() * Complex64::from(w / total);
            }
            SystemDensityMatrix::new(m).unwrap()
        })
}

fn random_unitary(dim: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    // exp(-iH) of a random Hermitian H
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        let a = DMatrix::from_iterator(
            dim,
            dim,
            v.iter().map(|&(re, im)| Complex64::new(re, im)),
        );
        let h = HermitianOperator::new((&a + a.adjoint()) * Complex64::from(0.5)).unwrap();
        unitary_exp(&h, 1.0, 1.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_symmetric_and_bounded(
        a in raw_density(2, 3),
        b in raw_density(2, 3),
    ) {
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&fab));
        prop_assert!((fab - fba).abs() < SLACK);
        prop_assert!(fidelity(&a, &a).unwrap() > 1.0 - SLACK);
    }

    #[test]
    fn trace_distance_metric(
        a in raw_density(3, 3),
        b in raw_density(3, 3),
        c in raw_density(3, 3),
    ) {
        let dab = trace_distance(&a, &b).unwrap();
        let dba = trace_distance(&b, &a).unwrap();
        prop_assert!((0.0..=2.0 + SLACK).contains(&dab));
        prop_assert!((dab - dba).abs() < SLACK);
        prop_assert!(trace_distance(&a, &a).unwrap() < SLACK);
        let dac = trace_distance(&a, &c).unwrap();
        let dcb = trace_distance(&c, &b).unwrap();
        prop_assert!(dab <= dac + dcb + SLACK);
    }

    #[test]
    fn fuchs_van_de_graaf_both_sides(
        a in raw_density(2, 3),
        b in raw_density(2, 3),
    ) {
        prop_assert!(fuchs_van_de_graaf_check(&a, &b).unwrap());
        // lower side: 2(1 - F) <= D
        let f = fidelity(&a, &b).unwrap();
        let d = trace_distance(&a, &b).unwrap();
        prop_assert!(2.0 * (1.0 - f) <= d + SLACK);
    }

    #[test]
    fn positive_part_trace_is_half_distance(
        a in raw_density(3, 4),
        b in raw_density(3, 4),
    ) {
        let d = trace_distance(&a, &b).unwrap();
        let tr = positive_part_trace(&a, &b).unwrap();
        prop_assert!((tr - d / 2.0).abs() < 1e-8);
    }

    #[test]
    fn unitary_invariance(
        a in raw_density(2, 3),
        b in raw_density(2, 3),
        u in random_unitary(2),
    ) {
        let rot = |r: &SystemDensityMatrix| {
            SystemDensityMatrix::new(&u * r.matrix() * u.adjoint()).unwrap()
        };
        let (ra, rb) = (rot(&a), rot(&b));
        let df = (fidelity(&a, &b).unwrap() - fidelity(&ra, &rb).unwrap()).abs();
        let dd = (trace_distance(&a, &b).unwrap() - trace_distance(&ra, &rb).unwrap()).abs();
        prop_assert!(df < 1e-8, "fidelity changed by {df}");
        prop_assert!(dd < 1e-8, "trace distance changed by {dd}");
    }

    #[test]
    fn purity_bounds(a in raw_density(3, 4)) {
        let p = purity(&a);
        prop_assert!(p <= 1.0 + SLACK);
        prop_assert!(p >= 1.0 / 3.0 - SLACK);
    }
}

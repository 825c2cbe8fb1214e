//! Randomized invariants.

mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use qchannel::bases::{ghz_class_basis, BitString};
use qchannel::capacity::{capacity_row, per_bit_capacity_closed_form};
use qchannel::gates::{compose, embed, QubitOperator};
use qchannel::protocols::{teleport_ghz, teleport_nparty, teleport_tight, UnknownState};
use qchannel::qla::StateVector;

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| C::new(a, b)).collect()).unwrap())
}

/// `e^{iφ} Rz(a) Ry(b) Rz(g)`
fn qubit_unitary(qubit: usize) -> impl Strategy<Value = QubitOperator> {
    let angle = 0.0..std::f64::consts::TAU;
    (angle.clone(), angle.clone(), angle.clone(), angle).prop_map(move |(a, b, g, p)| {
        let e = |t: f64| C::from_polar(1.0, t);
        let (cs, sn) = ((b / 2.0).cos(), (b / 2.0).sin());
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                e(p - (a + g) / 2.0) * cs,
                -e(p - (a - g) / 2.0) * sn,
                e(p + (a - g) / 2.0) * sn,
                e(p + (a + g) / 2.0) * cs,
            ],
        );
        QubitOperator::new("R", m, vec![qubit]).unwrap()
    })
}

fn amplitude_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::FRAC_PI_2).prop_map(|t| (t.cos(), t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_trace_of_a_product(a in state(2), b in state(1)) {
        let rho = a.tensor(&b).unwrap().to_density().unwrap();
        let first = rho.partial_trace(&[1, 2]).unwrap();
        let second = rho.partial_trace(&[3]).unwrap();
        prop_assert!(first.max_abs_diff(&a.to_density().unwrap()).unwrap() < 1e-10);
        prop_assert!(second.max_abs_diff(&b.to_density().unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn embed_commutes_with_composition(u in qubit_unitary(2), v in qubit_unitary(2)) {
        let uv = QubitOperator::new("UV", u.matrix() * v.matrix(), vec![2]).unwrap();
        let lhs = embed(&uv, 3).unwrap();
        let rhs = compose(&[embed(&u, 3).unwrap(), embed(&v, 3).unwrap()], 3).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
    }

    #[test]
    fn single_qubit_operators_are_local(psi in state(3), u in qubit_unitary(1)) {
        let after = u.apply(&psi).unwrap();
        let before = psi.reduced_density(&[2, 3]).unwrap();
        prop_assert!(before.max_abs_diff(&after.reduced_density(&[2, 3]).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn unitaries_and_projections_preserve_normalization(psi in state(3), u in qubit_unitary(3), x in 0usize..4) {
        let after = u.apply(&psi).unwrap();
        prop_assert!((after.norm_sqr() - 1.0).abs() < 1e-10);
        let p = after.project(&StateVector::new(bell(x)).unwrap(), &[1, 2]).unwrap();
        if let Some(r) = p.residual.state() {
            prop_assert!((r.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn complete_bases_give_unit_total_probability(psi in state(4)) {
        let probs = ghz_class_basis(4).unwrap().outcome_probabilities(&psi, &[1, 2, 3, 4]).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tight_teleportation_is_perfect((a, b) in amplitude_pair()) {
        let runs = teleport_tight(&UnknownState::single_qubit(a, b)).unwrap().run_all().unwrap();
        for t in &runs {
            prop_assert!((t.fidelity.unwrap() - 1.0).abs() < 1e-10);
            prop_assert!((t.outcome_probability - 0.25).abs() < 1e-10);
        }
    }

    #[test]
    fn ghz_teleportation_is_perfect((a, b) in amplitude_pair()) {
        let runs = teleport_ghz(&UnknownState::epr_form(a, b)).unwrap().run_all().unwrap();
        prop_assert_eq!(runs.len(), 8);
        for t in &runs {
            prop_assert!((t.fidelity.unwrap() - 1.0).abs() < 1e-10);
            prop_assert!((t.outcome_probability - 0.125).abs() < 1e-10);
        }
    }

    #[test]
    fn capacity_two_ways((a, b) in amplitude_pair(), n in 2usize..=6) {
        let row = capacity_row(n, C::new(a, 0.0), C::new(b, 0.0)).unwrap();
        prop_assert!((row.c - per_bit_capacity_closed_form(n, h2(a * a))).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn nparty_teleportation_is_perfect((a, b) in amplitude_pair(), n in 3usize..=5) {
        let runs = teleport_nparty(&UnknownState::ghz_form(n - 1, a, b), n).unwrap().run_all().unwrap();
        for t in runs.iter().filter(|t| t.possible) {
            prop_assert!((t.fidelity.unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bit_strings_round_trip(n in 1usize..=12, seed in any::<u64>()) {
        let value = (seed as usize) & ((1 << n) - 1);
        let b = BitString::new(value, n).unwrap();
        prop_assert_eq!(BitString::parse(&b.to_string()).unwrap(), b);
        prop_assert_eq!(BitString::from_bits(&b.bits()).unwrap(), b);
    }
}

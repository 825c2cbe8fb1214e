mod common;

use common::*;
use qchannel::bases::{bell_basis, ghz_dense_state, BitString};
use qchannel::capacity::{
    capacity_row, capacity_sweep, channel_entanglement, ensemble_density, factorized_ensemble_density, holevo,
    nonmaximal_ensemble, per_bit_capacity, per_bit_capacity_closed_form, Ensemble,
};
use qchannel::locc::QuantumState;
use qchannel::qla::{DensityMatrix, StateVector};

#[test]
fn holevo_examples() {
    let dense: Vec<_> = BitString::all(3).map(|m| ghz_dense_state(m).unwrap()).collect();
    assert!((holevo(&Ensemble::uniform_pure(dense).unwrap()).unwrap() - 3.0).abs() < 1e-12);

    let single = Ensemble::uniform_pure(vec![StateVector::ghz(2).unwrap()]).unwrap();
    assert!(holevo(&single).unwrap().abs() < 1e-12);

    let bell = Ensemble::uniform_pure(bell_basis().elements().to_vec()).unwrap();
    assert!((holevo(&bell).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn holevo_of_mixed_members_subtracts_their_entropy() {
    let mixed = DensityMatrix::maximally_mixed(1).unwrap();
    let zero = StateVector::basis(1, 0).unwrap();
    let e = Ensemble::new(
        vec![QuantumState::Mixed(mixed), QuantumState::Pure(zero)],
        vec![0.5, 0.5],
    )
    .unwrap();
    // average is diag(3/4, 1/4); members carry 1 and 0 bits
    let oracle = h2(0.75) - 0.5;
    assert!((holevo(&e).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn ensembles_validate_their_inputs() {
    let a = QuantumState::Pure(StateVector::basis(1, 0).unwrap());
    let b = QuantumState::Pure(StateVector::basis(2, 0).unwrap());
    assert!(Ensemble::new(vec![a.clone(), b], vec![0.5, 0.5]).is_err());
    assert!(Ensemble::new(vec![a.clone()], vec![0.9]).is_err());
    assert!(Ensemble::new(vec![a.clone(), a], vec![1.5, -0.5]).is_err());
}

#[test]
fn entanglement_of_the_channel() {
    assert!((channel_entanglement(re(H), re(H)).unwrap() - 1.0).abs() < 1e-12);
    assert!(channel_entanglement(re(1.0), re(0.0)).unwrap().abs() < 1e-12);
    let e = channel_entanglement(re(0.5), re(0.75f64.sqrt())).unwrap();
    assert!((e - h2(0.25)).abs() < 1e-12 && (e - 0.8113).abs() < 1e-4);
    assert!(channel_entanglement(re(0.5), re(0.5)).is_err());

    let phase = num_complex::Complex64::from_polar(0.5, 1.1);
    let e_phase = channel_entanglement(phase, re(0.75f64.sqrt())).unwrap();
    assert!((e_phase - e).abs() < 1e-12);

    let channel = StateVector::superpose_extremes(4, re(0.5), re(0.75f64.sqrt())).unwrap();
    for q in 1..=4 {
        let (a, b, d) = single_qubit_reduction(&amps(&channel), 4, q);
        assert!((qubit_entropy(a, b, d) - e).abs() < 1e-12);
    }
}

fn diagonal_oracle(n: usize, a2: f64) -> Vec<f64> {
    let half = 1usize << (n - 1);
    (0..1usize << n)
        .map(|i| if i < half { a2 } else { 1.0 - a2 } / half as f64)
        .collect()
}

#[test]
fn ensemble_densities() {
    let cases = [(3, H, H), (2, 1.0, 0.0), (3, 0.5, 0.75f64.sqrt())];
    for (n, a, b) in cases {
        let rho = ensemble_density(n, re(a), re(b)).unwrap();
        let m = rho.matrix();
        let diag = diagonal_oracle(n, a * a);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let expected = if r == c { diag[r] } else { 0.0 };
                assert!((m[(r, c)] - re(expected)).norm() < 1e-12, "N={n} ({r},{c})");
            }
        }
        let factorized = factorized_ensemble_density(n, re(a), re(b)).unwrap();
        assert!(rho.max_abs_diff(&factorized).unwrap() < 1e-12);
    }
    assert!(ensemble_density(9, re(H), re(H)).is_err());
}

#[test]
fn per_bit_capacities() {
    assert!((per_bit_capacity(3, re(H), re(H)).unwrap() - 1.5).abs() < 1e-10);
    assert!((per_bit_capacity(2, re(H), re(H)).unwrap() - 2.0).abs() < 1e-10);
    let c4 = per_bit_capacity(4, re(0.5), re(0.75f64.sqrt())).unwrap();
    assert!((c4 - (1.0 + h2(0.25) / 3.0)).abs() < 1e-10);
    assert!((c4 - 1.2704).abs() < 1e-4);
    assert!((per_bit_capacity_closed_form(5, 1.0) - 1.25).abs() < 1e-15);
    assert!(per_bit_capacity(1, re(1.0), re(0.0)).is_err());
}

#[test]
fn holevo_equals_average_entropy_for_pure_members() {
    for n in 2..=5 {
        let e = nonmaximal_ensemble(n, re(0.6), re(0.8)).unwrap();
        assert!((holevo(&e).unwrap() - e.average().unwrap().entropy().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn sweep_grid() {
    let rows = capacity_sweep(&[3], 21).unwrap();
    assert_eq!(rows.len(), 21);
    let mid = rows.iter().find(|r| (r.alpha_sq - 0.5).abs() < 1e-12).unwrap();
    assert!((mid.c - 1.5).abs() < 1e-10);
    for r in &rows {
        let oracle = 1.0 + h2(r.alpha_sq) / 2.0;
        assert!((r.c - oracle).abs() < 1e-10 && r.abs_diff <= 1e-10);
    }
    let row = capacity_row(2, re(H), re(H)).unwrap();
    assert!((row.holevo - 2.0).abs() < 1e-10);
}

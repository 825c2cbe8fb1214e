mod common;

use common::*;
use qchannel::bases::{
    bell_basis, bell_operator, bell_state, convert_dense_to_teleport, dense_to_teleport_converter, generating_operator,
    ghz_class_basis, ghz_dense_state, nparty_teleport_basis, teleport_basis_ghz, BitString, ProjectiveBasis,
};
use qchannel::gates::{cnot, compose, hadamard, Pauli};
use qchannel::qla::StateVector;

fn bits(s: &str) -> BitString {
    BitString::parse(s).unwrap()
}

#[test]
fn bit_strings() {
    let b = bits("101");
    assert_eq!(b.value(), 5);
    assert_eq!(b.bits(), vec![1, 0, 1]);
    assert_eq!((b.bit(1), b.bit(2), b.bit(3)), (1, 0, 1));
    assert_eq!(b.to_string(), "101");
    assert_eq!(BitString::all(3).count(), 8);
    assert!(BitString::parse("12").is_err());
    assert!(BitString::new(8, 3).is_err());
}

#[test]
fn bell_basis_order_and_operators() {
    let basis = bell_basis();
    for x in 0..4 {
        assert!(phase_gap(&bell(x), &amps(basis.element(x))) < 1e-15, "x={x}");
        assert!(phase_gap(&bell(x), &amps(&bell_state(x))) < 1e-15);
    }
    assert_eq!(
        (0..4).map(bell_operator).collect::<Vec<_>>(),
        vec![Pauli::I, Pauli::X, Pauli::Z, Pauli::MinusIY]
    );
    let r = basis.residuals();
    assert!(r.orthonormality < 1e-15 && r.completeness < 1e-15);
}

#[test]
fn three_qubit_class_is_the_eight_listed_states() {
    let listed: Vec<Vec<_>> = [(0b000, 1.0), (0b000, -1.0), (0b001, 1.0), (0b001, -1.0), (0b010, 1.0), (0b010, -1.0), (0b011, 1.0), (0b011, -1.0)]
        .iter()
        .map(|&(b, s)| ghz_pair(3, b, s))
        .collect();
    let basis = ghz_class_basis(3).unwrap();
    for e in basis.elements() {
        let hits = listed.iter().filter(|l| overlap(l, &amps(e)) > 1.0 - 1e-12).count();
        assert_eq!(hits, 1);
    }
}

#[test]
fn two_qubit_class_is_the_bell_basis() {
    let basis = ghz_class_basis(2).unwrap();
    for x in 0..4 {
        let found = basis.elements().iter().any(|e| overlap(&bell(x), &amps(e)) > 1.0 - 1e-12);
        assert!(found, "Bell state {x}");
    }
}

#[test]
fn generating_operators() {
    let omega = StateVector::ghz(2).unwrap();
    let id = generating_operator(bits("00")).unwrap().apply(&omega).unwrap();
    assert!(phase_gap(&bell(0), &amps(&id)) < 1e-15);
    let z = generating_operator(bits("10")).unwrap();
    assert_eq!(z.matrix(), &Pauli::Z.matrix());
    assert!(phase_gap(&bell(2), &amps(&z.apply(&omega).unwrap())) < 1e-15);

    let omega4 = StateVector::ghz(4).unwrap();
    let basis = ghz_class_basis(4).unwrap();
    for b in BitString::all(4) {
        let out = generating_operator(b).unwrap().apply(&omega4).unwrap();
        let gap = amps(&out)
            .iter()
            .zip(amps(basis.element(b.value())))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(gap < 1e-12, "{b}");
    }
}

#[test]
fn ghz_teleport_basis_rows() {
    let basis = teleport_basis_ghz();
    assert!(phase_gap(&kron(&pi(false), &bell(0)), &amps(basis.element(0))) < 1e-15);
    assert!(phase_gap(&kron(&pi(true), &bell(3)), &amps(basis.element(7))) < 1e-15);
    let r = basis.residuals();
    assert!(r.orthonormality.max(r.completeness) < 1e-14);
}

#[test]
fn nparty_teleport_bases() {
    let three = nparty_teleport_basis(3).unwrap();
    let ghz = teleport_basis_ghz();
    for e in three.elements() {
        assert!(ghz.elements().iter().any(|g| overlap(&amps(g), &amps(e)) > 1.0 - 1e-12));
    }

    let four = nparty_teleport_basis(4).unwrap();
    assert_eq!(four.len(), 16);
    for e in four.elements() {
        let entropies: Vec<f64> = (1..=4)
            .map(|q| {
                let (a, b, d) = single_qubit_reduction(&amps(e), 4, q);
                qubit_entropy(a, b, d)
            })
            .collect();
        for (got, want) in entropies.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{entropies:?}");
        }
    }
    let r = four.residuals();
    assert!(r.orthonormality.max(r.completeness) < 1e-14);
}

#[test]
fn conversion_to_a_product_basis() {
    let images: Vec<_> = BitString::all(3).map(|m| convert_dense_to_teleport(m).unwrap()).collect();
    let basis = ProjectiveBasis::new("converted", images.clone()).unwrap();
    let r = basis.residuals();
    assert!(r.orthonormality.max(r.completeness) < 1e-14);

    // message 000: |GHZ⟩ becomes a Bell pair on (A, B) with C in π⁺
    let first = amps(&images[0]);
    let oracle = kron(&bell(0), &pi(false));
    assert!(phase_gap(&oracle, &first) < 1e-15);

    let converter = dense_to_teleport_converter().unwrap();
    for m in BitString::all(3) {
        let d = ghz_dense_state(m).unwrap();
        let back = converter.adjoint().apply(&converter.apply(&d).unwrap()).unwrap();
        assert!(phase_gap(&amps(&d), &amps(&back)) < 1e-15);
    }
}

#[test]
fn literal_hb_cbc_family_is_complete() {
    let op = compose(&[hadamard(2).unwrap(), cnot(2, 3).unwrap()], 3).unwrap();
    let images = BitString::all(3)
        .map(|m| op.apply(&ghz_dense_state(m).unwrap()).unwrap())
        .collect();
    let r = ProjectiveBasis::new("hb-cbc", images).unwrap().residuals();
    assert!(r.orthonormality.max(r.completeness) < 1e-14);
}

#[test]
fn bases_reject_wrong_sizes() {
    let e = StateVector::basis(2, 0).unwrap();
    assert!(ProjectiveBasis::new("short", vec![e.clone(), e]).is_err());
    assert!(ghz_class_basis(1).is_err());
    assert!(ghz_class_basis(13).is_err());
}

#[test]
fn outcome_probabilities_match_direct_projection() {
    let zeta = [re(0.0), re(0.6), re(0.8), re(0.0)];
    let full = kron(&zeta, &ghz_pair(3, 0, 1.0));
    let psi = StateVector::new(full.clone()).unwrap();
    let basis = teleport_basis_ghz();
    let probs = basis.outcome_probabilities(&psi, &[1, 2, 3]).unwrap();
    for (x, p) in probs.iter().enumerate() {
        let oracle = norm_sqr(&contract_leading(&amps(basis.element(x)), &full));
        assert!((p - oracle).abs() < 1e-15);
    }
}

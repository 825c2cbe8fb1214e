use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::{min_fidelity, party_name, CorrectionSource, Protocol, UnknownState};
use crate::bases::{bell_basis, bell_operator, nparty_teleport_basis, pi_state, teleport_basis_ghz, ProjectiveBasis};
use crate::error::{Error, Result};
use crate::gates::{cnot, compose, pauli_on, Pauli, QubitOperator};
use crate::locc::{Party, PartyOp, ProtocolSetup, QuantumState};
use crate::qla::{c, StateVector, MAX_STATE_QUBITS};

/// Largest `N` for [`teleport_nparty`]: the register holds `2N − 1` qubits.
pub const MAX_NPARTY: usize = MAX_STATE_QUBITS.div_ceil(2);

/// Register `ζ = 1`, `A = 2`, `B = 3`. Alice measures `(1, 2)` in the Bell
/// basis; Bob applies `1, σx, σz, −iσy`.
pub fn teleport_tight(unknown: &UnknownState) -> Result<Protocol> {
    let UnknownState::SingleQubit { .. } = unknown else {
        return Err(Error::UnsupportedState(format!("tight teleportation takes one qubit, got {unknown}")));
    };
    let zeta = unknown.pure_state()?;
    let setup = ProtocolSetup {
        name: "teleport-tight".into(),
        parties: vec![Party::new("Alice", &[1, 2]), Party::new("Bob", &[3])],
        initial: QuantumState::Pure(zeta.tensor(&StateVector::ghz(2)?)?),
        initial_descriptor: unknown.to_string(),
        preparation: vec![],
        measuring_party: "Alice".into(),
        measured_qubits: vec![1, 2],
        basis: bell_basis(),
        target: QuantumState::Pure(zeta),
        nonlocal_allowed: false,
        notes: vec![],
    };
    let corrections = (0..4)
        .map(|x| Ok(vec![PartyOp::new("Bob", pauli_on(bell_operator(x), 3)?)]))
        .collect::<Result<_>>()?;
    Ok(Protocol {
        setup,
        corrections,
        source: CorrectionSource::Table,
    })
}

fn negated(p: Pauli, qubit: usize) -> Result<QubitOperator> {
    pauli_on(p, qubit)?.scaled(c(-1.0, 0.0), format!("-{}", p.label()))
}

/// `(B_x, C_x)` on Bob's qubit 4 and Claire's qubit 5, for outcomes of
/// [`teleport_basis_ghz`].
pub fn ghz_table_corrections() -> Result<Vec<Vec<PartyOp>>> {
    let (b, cq) = (4, 5);
    let rows: [(QubitOperator, QubitOperator); 8] = [
        (pauli_on(Pauli::X, b)?, pauli_on(Pauli::I, cq)?),
        (pauli_on(Pauli::IY, b)?, pauli_on(Pauli::I, cq)?),
        (pauli_on(Pauli::MinusIY, b)?, pauli_on(Pauli::I, cq)?),
        (negated(Pauli::X, b)?, pauli_on(Pauli::I, cq)?),
        (pauli_on(Pauli::I, b)?, pauli_on(Pauli::X, cq)?),
        (pauli_on(Pauli::I, b)?, pauli_on(Pauli::MinusIY, cq)?),
        (pauli_on(Pauli::I, b)?, pauli_on(Pauli::IY, cq)?),
        (pauli_on(Pauli::I, b)?, negated(Pauli::X, cq)?),
    ];
    Ok(rows
        .into_iter()
        .map(|(bx, cx)| vec![PartyOp::new("Bob", bx), PartyOp::new("Claire", cx)])
        .collect())
}

fn ghz_setup(unknown: &UnknownState, zeta: StateVector, channel: StateVector) -> Result<ProtocolSetup> {
    if channel.num_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: channel.num_qubits(),
        });
    }
    Ok(ProtocolSetup {
        name: "teleport-ghz".into(),
        parties: vec![
            Party::new("Alice", &[1, 2, 3]),
            Party::new("Bob", &[4]),
            Party::new("Claire", &[5]),
        ],
        initial: QuantumState::Pure(zeta.tensor(&channel)?),
        initial_descriptor: unknown.to_string(),
        preparation: vec![],
        measuring_party: "Alice".into(),
        measured_qubits: vec![1, 2, 3],
        basis: teleport_basis_ghz(),
        target: QuantumState::Pure(zeta),
        nonlocal_allowed: false,
        notes: vec!["corrections are factorized".into()],
    })
}

/// Register `ζ = (1, 2)`, `A = 3`, `B = 4`, `C = 5` over a GHZ channel.
pub fn teleport_ghz(unknown: &UnknownState) -> Result<Protocol> {
    let UnknownState::EprForm { .. } = unknown else {
        return Err(Error::UnsupportedState(format!(
            "GHZ teleportation takes α|01⟩ + β|10⟩, got {unknown}"
        )));
    };
    teleport_ghz_over(unknown, StateVector::ghz(3)?)
}

/// The GHZ scheme run verbatim on any two-qubit input and any three-qubit
/// channel.
pub fn teleport_ghz_over(unknown: &UnknownState, channel: StateVector) -> Result<Protocol> {
    if !matches!(unknown, UnknownState::EprForm { .. } | UnknownState::GeneralTwoQubit(_)) {
        return Err(Error::UnsupportedState(format!("expected a two-qubit pure state, got {unknown}")));
    }
    let zeta = unknown.pure_state()?;
    Ok(Protocol {
        setup: ghz_setup(unknown, zeta, channel)?,
        corrections: ghz_table_corrections()?,
        source: CorrectionSource::Table,
    })
}

/// `(σx ⊗ 1) C_BC C_CB C_BC` on `(B, C) = (4, 5)`.
fn swap_network() -> Result<QubitOperator> {
    let op = compose(
        &[pauli_on(Pauli::X, 1)?, cnot(1, 2)?, cnot(2, 1)?, cnot(1, 2)?],
        2,
    )?;
    Ok(op.on(&[4, 5])?.with_label("(σx⊗1)C_BC C_CB C_BC"))
}

/// GHZ teleportation whose outcome-0 correction is the entangling network
/// `(σx ⊗ 1) C_BC C_CB C_BC` instead of the factorized pair.
pub fn teleport_ghz_nonlocal_variant(unknown: &UnknownState, nonlocal_allowed: bool) -> Result<Protocol> {
    let mut p = teleport_ghz(unknown)?;
    p.corrections[0] = vec![PartyOp::new("Bob", swap_network()?)];
    p.setup.name = "teleport-ghz-nonlocal".into();
    p.setup.nonlocal_allowed = nonlocal_allowed;
    p.setup.notes = vec!["outcome 0 is corrected by a nonlocal operator on B and C".into()];
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeCheckReport {
    pub state: String,
    /// True when the input has weight outside `span{|01⟩, |10⟩}`.
    pub applicable: bool,
    pub probabilities: Vec<f64>,
    pub fidelities: Vec<Option<f64>>,
    pub min_fidelity: f64,
    pub transmitted: bool,
}

/// Runs the GHZ scheme verbatim on a general two-qubit input and reports
/// the worst branch fidelity.
pub fn general_two_qubit_negative_check(amps: [crate::qla::C64; 4]) -> Result<NegativeCheckReport> {
    let unknown = UnknownState::GeneralTwoQubit(amps);
    let transcripts = teleport_ghz_over(&unknown, StateVector::ghz(3)?)?.run_all()?;
    let min = min_fidelity(&transcripts);
    Ok(NegativeCheckReport {
        state: unknown.to_string(),
        applicable: amps[0].norm() > 0.1 || amps[3].norm() > 0.1,
        probabilities: transcripts.iter().map(|t| t.outcome_probability).collect(),
        fidelities: transcripts.iter().map(|t| t.fidelity).collect(),
        min_fidelity: min,
        transmitted: min >= 1.0 - 1e-10,
    })
}

fn ghz_form_probes(qubits: usize) -> Result<Vec<StateVector>> {
    let h = FRAC_1_SQRT_2;
    [
        (c(1.0, 0.0), c(0.0, 0.0)),
        (c(0.0, 0.0), c(1.0, 0.0)),
        (c(h, 0.0), c(h, 0.0)),
        (c(h, 0.0), c(0.0, h)),
    ]
    .into_iter()
    .map(|(a, b)| StateVector::superpose_extremes(qubits, a, b))
    .collect()
}

fn nparty_setup(n: usize, zeta: &StateVector, descriptor: String) -> Result<ProtocolSetup> {
    let omega = StateVector::ghz(n)?;
    let mut parties = vec![Party::new("Alice", &(1..=n).collect::<Vec<_>>())];
    for (i, q) in (n + 1..2 * n).enumerate() {
        parties.push(Party::new(party_name(i + 1), &[q]));
    }
    Ok(ProtocolSetup {
        name: format!("teleport-nparty({n})"),
        parties,
        initial: QuantumState::Pure(zeta.tensor(&omega)?),
        initial_descriptor: descriptor,
        preparation: vec![],
        measuring_party: "Alice".into(),
        measured_qubits: (1..=n).collect(),
        basis: nparty_teleport_basis(n)?,
        target: QuantumState::Pure(zeta.clone()),
        nonlocal_allowed: false,
        notes: vec!["corrections synthesized per outcome".into()],
    })
}

/// `N − 1` qubits `α|0…0⟩ + β|1…1⟩` over the `N`-qubit GHZ channel. Alice
/// holds the input and channel qubit 1; each other channel qubit has its own
/// party.
pub fn teleport_nparty(unknown: &UnknownState, n: usize) -> Result<Protocol> {
    if !(3..=MAX_NPARTY).contains(&n) {
        return Err(Error::Usage(format!("N-party teleportation needs 3 <= N <= {MAX_NPARTY}, got {n}")));
    }
    match unknown {
        UnknownState::GhzForm { qubits, .. } if *qubits == n - 1 => {}
        _ => {
            return Err(Error::UnsupportedState(format!(
                "N = {n} teleportation takes α|0…0⟩ + β|1…1⟩ on {} qubits, got {unknown}",
                n - 1
            )))
        }
    }
    let zeta = unknown.pure_state()?;
    let probes = ghz_form_probes(n - 1)?;
    let corrections = super::synthesize_corrections(
        |probe| nparty_setup(n, probe, "probe".into()),
        &probes,
    )?;
    Ok(Protocol {
        setup: nparty_setup(n, &zeta, unknown.to_string())?,
        corrections,
        source: CorrectionSource::Synthesized,
    })
}

/// `π^s ⊗ |b⟩` on two qubits, `x = 2s + b`.
pub fn onebit_basis() -> ProjectiveBasis {
    let elements = (0..4)
        .map(|x| {
            pi_state(x >> 1 == 1)
                .tensor(&StateVector::basis(1, x & 1).expect("one qubit"))
                .expect("two qubits")
        })
        .collect();
    ProjectiveBasis::new("pi-z", elements).expect("4 two-qubit states")
}

fn onebit_setup(zeta: &StateVector, descriptor: String) -> Result<ProtocolSetup> {
    Ok(ProtocolSetup {
        name: "teleport-onebit".into(),
        parties: vec![
            Party::new("Alice", &[1, 2]),
            Party::new("Bob", &[3]),
            Party::new("Claire", &[4]),
        ],
        initial: QuantumState::Pure(zeta.tensor(&StateVector::ghz(2)?)?),
        initial_descriptor: descriptor,
        preparation: vec![PartyOp::new("Alice", cnot(3, 2)?)],
        measuring_party: "Alice".into(),
        measured_qubits: vec![1, 2],
        basis: onebit_basis(),
        target: QuantumState::Pure(zeta.clone()),
        nonlocal_allowed: true,
        notes: vec!["the CNOT from A to qubit 2 acts across parties, so the scheme is not LOCC".into()],
    })
}

/// `α|00⟩ + β|11⟩` on qubits `(1, 2)` over one EPR pair `(A, B) = (3, 4)`,
/// using `C(A → 2)` before measuring `(1, 2)` in [`onebit_basis`].
pub fn teleport_onebit_style(unknown: &UnknownState) -> Result<Protocol> {
    match unknown {
        UnknownState::GhzForm { qubits: 2, .. } => {}
        _ => {
            return Err(Error::UnsupportedState(format!(
                "one-pair teleportation takes α|00⟩ + β|11⟩, got {unknown}"
            )))
        }
    }
    let zeta = unknown.pure_state()?;
    let corrections =
        super::synthesize_corrections(|probe| onebit_setup(probe, "probe".into()), &ghz_form_probes(2)?)?;
    Ok(Protocol {
        setup: onebit_setup(&zeta, unknown.to_string())?,
        corrections,
        source: CorrectionSource::Synthesized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Locality;

    #[test]
    fn ghz_residual_rows() {
        let (a, b) = (0.6, 0.8);
        let t = teleport_ghz(&UnknownState::epr_form(a, b)).unwrap().run_all().unwrap();
        let res0 = t[0].residual_state.as_ref().unwrap().pure().unwrap();
        let expected0 = StateVector::from_real(&[b, 0.0, 0.0, a]).unwrap();
        assert!(res0.fidelity(&expected0).unwrap() > 1.0 - 1e-12);
        // x = 5: β|11⟩ − α|00⟩
        let res5 = t[5].residual_state.as_ref().unwrap().pure().unwrap();
        let expected5 = StateVector::from_real(&[-a, 0.0, 0.0, b]).unwrap();
        assert!(res5.fidelity(&expected5).unwrap() > 1.0 - 1e-12);
        for tr in &t {
            assert!((tr.fidelity.unwrap() - 1.0).abs() < 1e-12);
            assert!(tr.corrections.iter().all(|c| c.locality == Locality::LocalSingle));
        }
    }

    #[test]
    fn ghz_rejects_other_forms() {
        assert!(matches!(
            teleport_ghz(&UnknownState::ghz_form(2, 0.6, 0.8)),
            Err(Error::UnsupportedState(_))
        ));
    }

    #[test]
    fn onebit_corrections_are_found() {
        let p = teleport_onebit_style(&UnknownState::ghz_form(2, 0.6, 0.8)).unwrap();
        let t = p.run_all().unwrap();
        assert_eq!(t.len(), 4);
        for tr in &t {
            assert!((tr.fidelity.unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(tr.classical_bits_sent, 2);
            assert!(tr.uses_nonlocal());
        }
    }
}

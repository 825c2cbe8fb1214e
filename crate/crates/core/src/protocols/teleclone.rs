use serde::Serialize;

use super::{CorrectionSource, Protocol, UnknownState};
use crate::bases::{bell_basis, bell_operator};
use crate::error::{Error, Result};
use crate::gates::{pauli_on, Pauli};
use crate::locc::{Party, PartyOp, ProtocolSetup, ProtocolTranscript, QuantumState};
use crate::qla::{DensityMatrix, StateVector};

#[derive(Debug, Clone, Serialize)]
pub struct TelecloneReport {
    pub lambda0: f64,
    pub lambda1: f64,
    /// Joint output of Bob and Claire, averaged over outcomes.
    pub rho_bc: DensityMatrix,
    pub rho_b: DensityMatrix,
    pub rho_c: DensityMatrix,
    pub max_off_diagonal: f64,
    pub transcripts: Vec<ProtocolTranscript>,
}

fn setup(unknown: &UnknownState) -> Result<Protocol> {
    let UnknownState::MixedDiagonal { lambda0, lambda1 } = *unknown else {
        return Err(Error::UnsupportedState(format!("telecloning takes a diagonal qubit, got {unknown}")));
    };
    let rho1 = unknown.state()?.to_density()?;
    let ghz = StateVector::ghz(3)?.to_density()?;
    let target = DensityMatrix::from_diagonal(&[lambda0, 0.0, 0.0, lambda1])?;
    let setup = ProtocolSetup {
        name: "teleclone".into(),
        parties: vec![
            Party::new("Alice", &[1, 2]),
            Party::new("Bob", &[3]),
            Party::new("Claire", &[4]),
        ],
        initial: QuantumState::Mixed(rho1.tensor(&ghz)?),
        initial_descriptor: unknown.to_string(),
        preparation: vec![],
        measuring_party: "Alice".into(),
        measured_qubits: vec![1, 2],
        basis: bell_basis(),
        target: QuantumState::Mixed(target),
        nonlocal_allowed: false,
        notes: vec![],
    };
    let corrections = (0..4)
        .map(|x| {
            let flip = if x & 1 == 1 { Pauli::X } else { Pauli::I };
            Ok(vec![
                PartyOp::new("Bob", pauli_on(bell_operator(x), 3)?),
                PartyOp::new("Claire", pauli_on(flip, 4)?),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(Protocol {
        setup,
        corrections,
        source: CorrectionSource::Table,
    })
}

/// Register: unknown `ρ1` on qubit 1, GHZ on `(A, B, C) = (2, 3, 4)`. Alice
/// measures `(1, A)` in the Bell basis; Bob applies the Bell correction and
/// Claire flips when the outcome involves a bit flip.
pub fn teleclone(unknown: &UnknownState) -> Result<TelecloneReport> {
    let UnknownState::MixedDiagonal { lambda0, lambda1 } = *unknown else {
        return Err(Error::UnsupportedState(format!("telecloning takes a diagonal qubit, got {unknown}")));
    };
    unknown.validate()?;
    let transcripts = setup(unknown)?.run_all()?;
    let parts = transcripts
        .iter()
        .filter_map(|t| {
            let rho = t.final_state.as_ref()?.mixed()?;
            Some((t.outcome_probability, rho))
        })
        .collect::<Vec<_>>();
    let rho_bc = DensityMatrix::mixture(&parts)?;
    let rho_b = rho_bc.partial_trace(&[1])?;
    let rho_c = rho_bc.partial_trace(&[2])?;
    Ok(TelecloneReport {
        lambda0,
        lambda1,
        max_off_diagonal: rho_bc.max_off_diagonal(),
        rho_bc,
        rho_b,
        rho_c,
        transcripts,
    })
}

//! The protocol suite: teleportation, dense coding and telecloning over EPR
//! and GHZ-class channels, expressed as setups and correction tables for the
//! [`locc`](crate::locc) engine.

mod dense;
mod synth;
mod teleclone;
mod teleport;

use std::fmt;

use serde::Serialize;

pub use dense::{
    dense_code_ghz, dense_code_ghz_converted, dense_code_ghz_from_epr, dense_code_nparty,
    dense_code_tight, modified_dense_encoder, modified_dense_scheme, teleport_resource_dense_rank,
    DenseCodingReport, RankReport,
};
pub use synth::synthesize_corrections;
pub use teleclone::{teleclone, TelecloneReport};
pub use teleport::{
    general_two_qubit_negative_check, ghz_table_corrections, onebit_basis, teleport_ghz,
    teleport_ghz_nonlocal_variant, teleport_ghz_over, teleport_nparty, teleport_onebit_style,
    teleport_tight, NegativeCheckReport, MAX_NPARTY,
};

use crate::error::{Error, Result};
use crate::locc::{
    branch_probabilities, run_all_branches, run_branch, sample_branch, PartyOp, ProtocolSetup,
    ProtocolTranscript, QuantumState,
};
use crate::qla::{c, DensityMatrix, StateVector, C64, TOL};

/// Unknown input of a protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum UnknownState {
    /// `α|0⟩ + β|1⟩`
    SingleQubit { alpha: C64, beta: C64 },
    /// `α|01⟩ + β|10⟩`
    EprForm { alpha: C64, beta: C64 },
    /// `α|0…0⟩ + β|1…1⟩` on `qubits` qubits.
    GhzForm { qubits: usize, alpha: C64, beta: C64 },
    /// Amplitudes of `|00⟩, |01⟩, |10⟩, |11⟩`.
    GeneralTwoQubit([C64; 4]),
    /// `λ0|0⟩⟨0| + λ1|1⟩⟨1|`
    MixedDiagonal { lambda0: f64, lambda1: f64 },
}

fn check_pair(alpha: C64, beta: C64) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > TOL {
        return Err(Error::InvalidState(format!("|α|² + |β|² = {norm}, expected 1")));
    }
    Ok(())
}

impl UnknownState {
    pub fn single_qubit(alpha: f64, beta: f64) -> Self {
        UnknownState::SingleQubit {
            alpha: c(alpha, 0.0),
            beta: c(beta, 0.0),
        }
    }

    pub fn epr_form(alpha: f64, beta: f64) -> Self {
        UnknownState::EprForm {
            alpha: c(alpha, 0.0),
            beta: c(beta, 0.0),
        }
    }

    pub fn ghz_form(qubits: usize, alpha: f64, beta: f64) -> Self {
        UnknownState::GhzForm {
            qubits,
            alpha: c(alpha, 0.0),
            beta: c(beta, 0.0),
        }
    }

    pub fn mixed_diagonal(lambda0: f64) -> Self {
        UnknownState::MixedDiagonal {
            lambda0,
            lambda1: 1.0 - lambda0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            UnknownState::SingleQubit { alpha, beta } | UnknownState::EprForm { alpha, beta } => {
                check_pair(alpha, beta)
            }
            UnknownState::GhzForm { qubits, alpha, beta } => {
                if qubits == 0 {
                    return Err(Error::InvalidState("GHZ-form state needs at least one qubit".into()));
                }
                check_pair(alpha, beta)
            }
            UnknownState::GeneralTwoQubit(amps) => StateVector::new(amps.to_vec()).map(|_| ()),
            UnknownState::MixedDiagonal { lambda0, lambda1 } => {
                let ok = lambda0.is_finite()
                    && lambda1.is_finite()
                    && lambda0 >= 0.0
                    && lambda1 >= 0.0
                    && (lambda0 + lambda1 - 1.0).abs() <= TOL;
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidState(format!(
                        "λ0 = {lambda0}, λ1 = {lambda1} is not a probability pair"
                    )))
                }
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            UnknownState::SingleQubit { .. } | UnknownState::MixedDiagonal { .. } => 1,
            UnknownState::EprForm { .. } | UnknownState::GeneralTwoQubit(_) => 2,
            UnknownState::GhzForm { qubits, .. } => *qubits,
        }
    }

    pub fn state(&self) -> Result<QuantumState> {
        self.validate()?;
        let z = c(0.0, 0.0);
        Ok(match *self {
            UnknownState::SingleQubit { alpha, beta } => QuantumState::Pure(StateVector::new(vec![alpha, beta])?),
            UnknownState::EprForm { alpha, beta } => {
                QuantumState::Pure(StateVector::new(vec![z, alpha, beta, z])?)
            }
            UnknownState::GhzForm { qubits, alpha, beta } => {
                QuantumState::Pure(StateVector::superpose_extremes(qubits, alpha, beta)?)
            }
            UnknownState::GeneralTwoQubit(amps) => QuantumState::Pure(StateVector::new(amps.to_vec())?),
            UnknownState::MixedDiagonal { lambda0, lambda1 } => {
                QuantumState::Mixed(DensityMatrix::from_diagonal(&[lambda0, lambda1])?)
            }
        })
    }

    pub fn pure_state(&self) -> Result<StateVector> {
        match self.state()? {
            QuantumState::Pure(s) => Ok(s),
            QuantumState::Mixed(_) => Err(Error::UnsupportedState(format!("{self} is mixed"))),
        }
    }
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("({}{:+}i)", z.re, z.im)
    }
}

impl fmt::Display for UnknownState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownState::SingleQubit { alpha, beta } => {
                write!(f, "{}|0⟩ + {}|1⟩", fmt_c(*alpha), fmt_c(*beta))
            }
            UnknownState::EprForm { alpha, beta } => {
                write!(f, "{}|01⟩ + {}|10⟩", fmt_c(*alpha), fmt_c(*beta))
            }
            UnknownState::GhzForm { qubits, alpha, beta } => write!(
                f,
                "{}|{}⟩ + {}|{}⟩",
                fmt_c(*alpha),
                "0".repeat(*qubits),
                fmt_c(*beta),
                "1".repeat(*qubits)
            ),
            UnknownState::GeneralTwoQubit(a) => write!(
                f,
                "{}|00⟩ + {}|01⟩ + {}|10⟩ + {}|11⟩",
                fmt_c(a[0]),
                fmt_c(a[1]),
                fmt_c(a[2]),
                fmt_c(a[3])
            ),
            UnknownState::MixedDiagonal { lambda0, lambda1 } => {
                write!(f, "{lambda0}|0⟩⟨0| + {lambda1}|1⟩⟨1|")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Every measurement branch, in outcome order.
    Exhaustive,
    /// One branch drawn with a seeded generator.
    Sample { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionSource {
    Table,
    Synthesized,
}

/// A setup together with its per-outcome corrections.
#[derive(Debug, Clone)]
pub struct Protocol {
    pub setup: ProtocolSetup,
    pub corrections: Vec<Vec<PartyOp>>,
    pub source: CorrectionSource,
}

impl Protocol {
    pub fn run(&self, mode: ExecMode) -> Result<Vec<ProtocolTranscript>> {
        match mode {
            ExecMode::Exhaustive => self.run_all(),
            ExecMode::Sample { seed } => Ok(vec![sample_branch(&self.setup, &self.corrections, seed)?]),
        }
    }

    pub fn run_all(&self) -> Result<Vec<ProtocolTranscript>> {
        run_all_branches(&self.setup, &self.corrections)
    }

    pub fn run_branch(&self, x: usize) -> Result<ProtocolTranscript> {
        run_branch(&self.setup, &self.corrections, x)
    }

    pub fn probabilities(&self) -> Result<Vec<f64>> {
        branch_probabilities(&self.setup)
    }
}

/// Smallest branch fidelity; impossible branches are skipped.
pub fn min_fidelity(transcripts: &[ProtocolTranscript]) -> f64 {
    transcripts
        .iter()
        .filter_map(|t| t.fidelity)
        .fold(f64::INFINITY, f64::min)
}

/// Names for parties in register order.
pub(crate) fn party_name(i: usize) -> String {
    const NAMES: [&str; 8] = ["Alice", "Bob", "Claire", "Dave", "Eve", "Frank", "Grace", "Heidi"];
    NAMES
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("Party{}", i + 1))
}

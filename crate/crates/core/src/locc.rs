//! Multi-party protocol engine.
//!
//! Parties own disjoint qubits of one shared register. A run applies the
//! preparation steps, measures one party's qubits in a projective basis,
//! broadcasts the outcome and applies that outcome's corrections. Corrections
//! address qubits by their index in the original register.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::bases::{BitString, ProjectiveBasis};
use crate::error::{Error, Result};
use crate::gates::{Locality, QubitOperator};
use crate::qla::{complement, DensityMatrix, Residual, StateVector, ZERO_PROBABILITY};

/// Generator used by every sampled run.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng::seed_from_u64";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Party {
    pub name: String,
    pub qubits: Vec<usize>,
}

impl Party {
    pub fn new(name: impl Into<String>, qubits: &[usize]) -> Self {
        Self {
            name: name.into(),
            qubits: qubits.to_vec(),
        }
    }

    pub fn owns(&self, qubits: &[usize]) -> bool {
        qubits.iter().all(|q| self.qubits.contains(q))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicalMessage {
    pub from: String,
    /// A party name, or `broadcast`.
    pub to: String,
    pub bits: BitString,
}

/// An operator applied by a named party.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartyOp {
    pub party: String,
    pub operator: QubitOperator,
}

impl PartyOp {
    pub fn new(party: impl Into<String>, operator: QubitOperator) -> Self {
        Self {
            party: party.into(),
            operator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.num_qubits(),
            QuantumState::Mixed(r) => r.num_qubits(),
        }
    }

    pub fn pure(&self) -> Option<&StateVector> {
        match self {
            QuantumState::Pure(s) => Some(s),
            QuantumState::Mixed(_) => None,
        }
    }

    pub fn mixed(&self) -> Option<&DensityMatrix> {
        match self {
            QuantumState::Mixed(r) => Some(r),
            QuantumState::Pure(_) => None,
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            QuantumState::Pure(s) => s.to_density(),
            QuantumState::Mixed(r) => Ok(r.clone()),
        }
    }

    fn apply(&self, op: &QubitOperator) -> Result<QuantumState> {
        Ok(match self {
            QuantumState::Pure(s) => QuantumState::Pure(op.apply(s)?),
            QuantumState::Mixed(r) => QuantumState::Mixed(op.apply_density(r)?),
        })
    }

    /// Fidelity with a target; Uhlmann fidelity when both are mixed.
    pub fn fidelity(&self, target: &QuantumState) -> Result<f64> {
        match (self, target) {
            (QuantumState::Pure(a), QuantumState::Pure(b)) => a.fidelity(b),
            (QuantumState::Mixed(r), QuantumState::Pure(s))
            | (QuantumState::Pure(s), QuantumState::Mixed(r)) => r.fidelity_pure(s),
            (QuantumState::Mixed(a), QuantumState::Mixed(b)) => a.fidelity(b),
        }
    }
}

/// Everything fixed before the measurement outcome is known.
#[derive(Debug, Clone)]
pub struct ProtocolSetup {
    pub name: String,
    pub parties: Vec<Party>,
    pub initial: QuantumState,
    pub initial_descriptor: String,
    /// Applied in order before the measurement.
    pub preparation: Vec<PartyOp>,
    pub measuring_party: String,
    pub measured_qubits: Vec<usize>,
    pub basis: ProjectiveBasis,
    /// Target for the unmeasured qubits, in register order.
    pub target: QuantumState,
    pub nonlocal_allowed: bool,
    pub notes: Vec<String>,
}

impl ProtocolSetup {
    /// Checks ownership, register sizes and the measurement layout.
    pub fn validate(&self) -> Result<()> {
        let n = self.initial.num_qubits();
        let mut seen = Vec::new();
        for p in &self.parties {
            for &q in &p.qubits {
                if q == 0 || q > n {
                    return Err(Error::QubitOutOfRange { index: q, num_qubits: n });
                }
                if seen.contains(&q) {
                    return Err(Error::Usage(format!("qubit {q} owned by two parties")));
                }
                seen.push(q);
            }
        }
        let measurer = self.party(&self.measuring_party)?;
        if !measurer.owns(&self.measured_qubits) {
            return Err(Error::Locality(format!(
                "{} measures qubits {:?} it does not own",
                measurer.name, self.measured_qubits
            )));
        }
        if self.basis.num_qubits() != self.measured_qubits.len() {
            return Err(Error::DimensionMismatch {
                expected: self.measured_qubits.len(),
                actual: self.basis.num_qubits(),
            });
        }
        let rest = complement(&self.measured_qubits, n).len();
        if rest != self.target.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: rest,
                actual: self.target.num_qubits(),
            });
        }
        Ok(())
    }

    pub fn party(&self, name: &str) -> Result<&Party> {
        self.parties
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Usage(format!("unknown party {name}")))
    }

    /// Bits needed to announce one outcome.
    pub fn outcome_bits(&self) -> usize {
        self.basis.len().trailing_zeros() as usize
    }

    /// Fails if `op` breaks locality for this setup.
    pub fn check_locality(&self, op: &PartyOp) -> Result<()> {
        let party = self.party(&op.party)?;
        let nonlocal = op.operator.locality() == Locality::Nonlocal;
        if nonlocal && !self.nonlocal_allowed {
            return Err(Error::Locality(format!(
                "{} applies nonlocal {} without permission",
                party.name, op.operator
            )));
        }
        if !party.owns(op.operator.targets()) && !(nonlocal && self.nonlocal_allowed) {
            return Err(Error::Locality(format!(
                "{} applies {} to qubits it does not own",
                party.name, op.operator
            )));
        }
        Ok(())
    }

    /// State just before the measurement.
    pub fn prepared_state(&self) -> Result<QuantumState> {
        self.validate()?;
        self.preparation.iter().try_fold(self.initial.clone(), |state, step| {
            self.check_locality(step)?;
            state.apply(&step.operator)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionRecord {
    pub party: String,
    pub operator: QubitOperator,
    pub locality: Locality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngRecord {
    pub algorithm: &'static str,
    pub seed: u64,
}

/// Full record of one measurement branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTranscript {
    pub protocol: String,
    pub initial_state: String,
    pub parties: Vec<Party>,
    pub preparation: Vec<CorrectionRecord>,
    pub basis: String,
    pub measured_qubits: Vec<usize>,
    pub outcome: BitString,
    pub outcome_probability: f64,
    /// False when the branch probability is below the zero cutoff.
    pub possible: bool,
    /// Unmeasured qubits right after the measurement.
    pub residual_state: Option<QuantumState>,
    pub messages: Vec<ClassicalMessage>,
    pub corrections: Vec<CorrectionRecord>,
    pub final_state: Option<QuantumState>,
    pub fidelity: Option<f64>,
    pub classical_bits_sent: usize,
    pub nonlocal_allowed: bool,
    pub notes: Vec<String>,
    pub rng: Option<RngRecord>,
}

impl ProtocolTranscript {
    pub fn uses_nonlocal(&self) -> bool {
        self.preparation
            .iter()
            .chain(&self.corrections)
            .any(|c| c.locality == Locality::Nonlocal)
    }
}

fn record(op: &PartyOp) -> CorrectionRecord {
    CorrectionRecord {
        party: op.party.clone(),
        operator: op.operator.clone(),
        locality: op.operator.locality(),
    }
}

/// Projects onto outcome `x`; returns the probability and the residual.
fn measure(setup: &ProtocolSetup, state: &QuantumState, x: usize) -> Result<(f64, Option<QuantumState>)> {
    let element = setup.basis.element(x);
    match state {
        QuantumState::Pure(s) => {
            let proj = s.project(element, &setup.measured_qubits)?;
            let residual = match proj.residual {
                Residual::State(r) => Some(QuantumState::Pure(r)),
                Residual::Empty | Residual::Undefined => None,
            };
            Ok((proj.probability, residual))
        }
        QuantumState::Mixed(r) => {
            let (p, rest) = r.project(element, &setup.measured_qubits)?;
            Ok((p, rest.map(QuantumState::Mixed)))
        }
    }
}

/// `op` with targets renumbered into the residual register.
fn onto_residual(op: &QubitOperator, rest: &[usize]) -> Result<QubitOperator> {
    let targets = op
        .targets()
        .iter()
        .map(|q| {
            rest.iter()
                .position(|r| r == q)
                .map(|i| i + 1)
                .ok_or_else(|| Error::Usage(format!("correction {op} touches measured qubit {q}")))
        })
        .collect::<Result<Vec<_>>>()?;
    op.clone().on(&targets)
}

fn execute(
    setup: &ProtocolSetup,
    prepared: &QuantumState,
    corrections: &[Vec<PartyOp>],
    x: usize,
) -> Result<ProtocolTranscript> {
    if x >= setup.basis.len() {
        return Err(Error::Usage(format!(
            "outcome {x} out of range for {} outcomes",
            setup.basis.len()
        )));
    }
    let ops = corrections
        .get(x)
        .ok_or_else(|| Error::Usage(format!("no corrections for outcome {x}")))?;
    for op in ops {
        setup.check_locality(op)?;
    }
    let bits = setup.outcome_bits();
    let outcome = BitString::new(x, bits)?;
    let mut receivers: Vec<&str> = ops.iter().map(|o| o.party.as_str()).collect();
    receivers.sort_unstable();
    receivers.dedup();
    let to = match receivers.as_slice() {
        [one] => one.to_string(),
        _ => "broadcast".to_string(),
    };
    let messages = vec![ClassicalMessage {
        from: setup.measuring_party.clone(),
        to,
        bits: outcome,
    }];

    let (probability, residual) = measure(setup, prepared, x)?;
    let possible = probability >= ZERO_PROBABILITY;
    let rest = complement(&setup.measured_qubits, prepared.num_qubits());
    let (final_state, fidelity) = match (&residual, possible) {
        (Some(state), true) => {
            let mut out = state.clone();
            for op in ops {
                out = out.apply(&onto_residual(&op.operator, &rest)?)?;
            }
            let f = out.fidelity(&setup.target)?;
            (Some(out), Some(f))
        }
        _ => (None, None),
    };
    Ok(ProtocolTranscript {
        protocol: setup.name.clone(),
        initial_state: setup.initial_descriptor.clone(),
        parties: setup.parties.clone(),
        preparation: setup.preparation.iter().map(record).collect(),
        basis: setup.basis.label().to_string(),
        measured_qubits: setup.measured_qubits.clone(),
        outcome,
        outcome_probability: probability,
        possible,
        residual_state: if possible { residual } else { None },
        messages,
        corrections: ops.iter().map(record).collect(),
        final_state,
        fidelity,
        classical_bits_sent: bits,
        nonlocal_allowed: setup.nonlocal_allowed,
        notes: setup.notes.clone(),
        rng: None,
    })
}

/// Executes the branch with outcome `x`.
pub fn run_branch(setup: &ProtocolSetup, corrections: &[Vec<PartyOp>], x: usize) -> Result<ProtocolTranscript> {
    let prepared = setup.prepared_state()?;
    let t = execute(setup, &prepared, corrections, x)?;
    if !t.possible {
        return Err(Error::BranchImpossible(format!("{} of {}", t.outcome, setup.name)));
    }
    Ok(t)
}

/// Executes every branch in outcome order. Impossible branches are kept with
/// `possible = false`.
pub fn run_all_branches(setup: &ProtocolSetup, corrections: &[Vec<PartyOp>]) -> Result<Vec<ProtocolTranscript>> {
    let prepared = setup.prepared_state()?;
    (0..setup.basis.len())
        .map(|x| execute(setup, &prepared, corrections, x))
        .collect()
}

/// Outcome probabilities of the measurement.
pub fn branch_probabilities(setup: &ProtocolSetup) -> Result<Vec<f64>> {
    let prepared = setup.prepared_state()?;
    match &prepared {
        QuantumState::Pure(s) => setup.basis.outcome_probabilities(s, &setup.measured_qubits),
        QuantumState::Mixed(_) => (0..setup.basis.len())
            .map(|x| Ok(measure(setup, &prepared, x)?.0))
            .collect(),
    }
}

fn draw(rng: &mut ChaCha20Rng, probabilities: &[f64]) -> usize {
    let total: f64 = probabilities.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (x, &p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return x;
        }
    }
    // rounding can leave u just above the final partial sum
    probabilities.iter().rposition(|&p| p >= ZERO_PROBABILITY).unwrap_or(0)
}

/// `count` outcomes drawn from one generator seeded with `seed`.
pub fn sample_outcomes(setup: &ProtocolSetup, seed: u64, count: usize) -> Result<Vec<usize>> {
    let probabilities = branch_probabilities(setup)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| draw(&mut rng, &probabilities)).collect())
}

/// Draws one outcome with the seeded generator and executes that branch.
pub fn sample_branch(setup: &ProtocolSetup, corrections: &[Vec<PartyOp>], seed: u64) -> Result<ProtocolTranscript> {
    let x = sample_outcomes(setup, seed, 1)?[0];
    let mut t = run_branch(setup, corrections, x)?;
    t.rng = Some(RngRecord {
        algorithm: RNG_ALGORITHM,
        seed,
    });
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{bell_basis, bell_operator};
    use crate::gates::{cnot, pauli_on};

    fn tight_setup(alpha: f64, beta: f64) -> (ProtocolSetup, Vec<Vec<PartyOp>>) {
        let zeta = StateVector::from_real(&[alpha, beta]).unwrap();
        let omega = StateVector::ghz(2).unwrap();
        let setup = ProtocolSetup {
            name: "test".into(),
            parties: vec![Party::new("Alice", &[1, 2]), Party::new("Bob", &[3])],
            initial: QuantumState::Pure(zeta.tensor(&omega).unwrap()),
            initial_descriptor: "zeta".into(),
            preparation: vec![],
            measuring_party: "Alice".into(),
            measured_qubits: vec![1, 2],
            basis: bell_basis(),
            target: QuantumState::Pure(zeta),
            nonlocal_allowed: false,
            notes: vec![],
        };
        let corr = (0..4)
            .map(|x| vec![PartyOp::new("Bob", pauli_on(bell_operator(x), 3).unwrap())])
            .collect();
        (setup, corr)
    }

    #[test]
    fn tight_branches_are_perfect() {
        let (setup, corr) = tight_setup(0.6, 0.8);
        let all = run_all_branches(&setup, &corr).unwrap();
        assert_eq!(all.len(), 4);
        for t in &all {
            assert!((t.outcome_probability - 0.25).abs() < 1e-12);
            assert!((t.fidelity.unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(t.classical_bits_sent, 2);
            assert_eq!(t.messages[0].to, "Bob");
        }
    }

    #[test]
    fn locality_is_enforced() {
        let (mut setup, _) = tight_setup(0.6, 0.8);
        setup.parties = vec![
            Party::new("Alice", &[1]),
            Party::new("Bob", &[3]),
            Party::new("Claire", &[2]),
        ];
        setup.measuring_party = "Claire".into();
        setup.measured_qubits = vec![2];
        setup.basis = ProjectiveBasis::new(
            "z",
            vec![StateVector::basis(1, 0).unwrap(), StateVector::basis(1, 1).unwrap()],
        )
        .unwrap();
        setup.target = QuantumState::Pure(StateVector::basis(2, 0).unwrap());
        // Bob touches qubit 1, owned by Alice
        let corr = vec![vec![PartyOp::new("Bob", pauli_on(Pauli::X, 1).unwrap())], vec![]];
        assert!(matches!(run_branch(&setup, &corr, 0), Err(Error::Locality(_))));
        let corr = vec![vec![PartyOp::new("Bob", cnot(3, 1).unwrap())], vec![]];
        assert!(matches!(run_branch(&setup, &corr, 0), Err(Error::Locality(_))));
        setup.nonlocal_allowed = true;
        assert!(run_branch(&setup, &corr, 0).is_ok());
    }

    use crate::gates::Pauli;

    #[test]
    fn zero_probability_branches_are_reported() {
        let (mut setup, corr) = tight_setup(1.0, 0.0);
        // a product channel |00⟩ makes the Ψ outcomes impossible for ζ = |0⟩
        setup.initial = QuantumState::Pure(StateVector::basis(3, 0).unwrap());
        let all = run_all_branches(&setup, &corr).unwrap();
        assert_eq!(all.len(), 4);
        assert!(!all[1].possible && all[1].final_state.is_none());
        assert!(matches!(run_branch(&setup, &corr, 1), Err(Error::BranchImpossible(_))));
        let total: f64 = all.iter().map(|t| t.outcome_probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible() {
        let (setup, corr) = tight_setup(0.6, 0.8);
        let a = sample_branch(&setup, &corr, 42).unwrap();
        let b = sample_branch(&setup, &corr, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rng.unwrap().seed, 42);
        assert_eq!(sample_outcomes(&setup, 7, 50).unwrap(), sample_outcomes(&setup, 7, 50).unwrap());
    }
}

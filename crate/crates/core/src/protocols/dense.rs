use serde::Serialize;

use crate::bases::{
    bell_basis, bell_operator, convert_dense_to_teleport, dense_to_teleport_converter, generating_factors,
    generating_operator, ghz_class_basis, ghz_dense_message, ghz_dense_operators, teleport_basis_ghz,
    BitString, ProjectiveBasis, CONVERTED_ORDER,
};
use crate::error::{Error, Result};
use crate::gates::{cnot, compose, disentangle_op, pauli_on, Locality, QubitOperator};
use crate::locc::{CorrectionRecord, PartyOp};
use crate::qla::{hermitian_eigen, StateVector, TOL};

use super::teleport::ghz_table_corrections;

/// Bob holds qubit 1 and decodes; Alice holds qubits `2..=N` and encodes.
const ENCODER: &str = "Alice";

#[derive(Debug, Clone, Serialize)]
pub struct DenseCodingReport {
    pub scheme: String,
    pub message: BitString,
    pub initial_state: StateVector,
    pub encoding: Vec<CorrectionRecord>,
    pub encoded_state: StateVector,
    pub basis: String,
    pub measured_qubits: Vec<usize>,
    pub outcome: BitString,
    pub outcome_probability: f64,
    pub decoded: BitString,
    pub qubits_manipulated: usize,
    pub nonlocal_encoding: bool,
}

impl DenseCodingReport {
    pub fn round_trips(&self) -> bool {
        self.decoded == self.message && (self.outcome_probability - 1.0).abs() <= TOL
    }
}

fn check_width(message: BitString, n: usize) -> Result<()> {
    if message.len() != n {
        return Err(Error::Usage(format!("expected a {n}-bit message, got {message}")));
    }
    Ok(())
}

struct Run<'a> {
    scheme: String,
    message: BitString,
    initial: StateVector,
    encoding: Vec<QubitOperator>,
    basis: &'a ProjectiveBasis,
    measured: Vec<usize>,
    decode: &'a dyn Fn(usize) -> BitString,
}

fn execute(run: Run<'_>) -> Result<DenseCodingReport> {
    let n = run.initial.num_qubits();
    let alice: Vec<usize> = (2..=n).collect();
    let mut state = run.initial.clone();
    let mut touched: Vec<usize> = Vec::new();
    for op in &run.encoding {
        if op.targets().iter().any(|q| !alice.contains(q)) {
            return Err(Error::Locality(format!("encoder applies {op} outside its qubits")));
        }
        touched.extend(op.targets());
        state = op.apply(&state)?;
    }
    touched.sort_unstable();
    touched.dedup();
    let probs = run.basis.outcome_probabilities(&state, &run.measured)?;
    let (x, &p) = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty basis");
    let records: Vec<CorrectionRecord> = run
        .encoding
        .iter()
        .map(|op| CorrectionRecord {
            party: ENCODER.into(),
            operator: op.clone(),
            locality: op.locality(),
        })
        .collect();
    Ok(DenseCodingReport {
        scheme: run.scheme,
        message: run.message,
        nonlocal_encoding: records.iter().any(|r| r.locality == Locality::Nonlocal),
        initial_state: run.initial,
        encoding: records,
        encoded_state: state,
        basis: run.basis.label().to_string(),
        measured_qubits: run.measured,
        outcome: BitString::new(x, run.basis.num_qubits())?,
        outcome_probability: p,
        decoded: (run.decode)(x),
        qubits_manipulated: touched.len(),
    })
}

/// Two bits over an EPR pair: `(1 ⊗ U_x)Ω`, decoded by a Bell measurement.
pub fn dense_code_tight(message: BitString) -> Result<DenseCodingReport> {
    check_width(message, 2)?;
    let basis = bell_basis();
    let decode = |x: usize| BitString::new(x, 2).expect("2 bits");
    execute(Run {
        scheme: "dense-tight".into(),
        message,
        initial: StateVector::ghz(2)?,
        encoding: vec![pauli_on(bell_operator(message.value()), 2)?],
        basis: &basis,
        measured: vec![1, 2],
        decode: &decode,
    })
}

fn ghz_encoding(message: BitString) -> Result<Vec<QubitOperator>> {
    let (b, cx) = ghz_dense_operators(message)?;
    Ok(vec![b, cx])
}

/// Three bits over GHZ: `B_x ⊗ C_x` on qubits 2 and 3, decoded in the
/// three-qubit GHZ-class basis.
pub fn dense_code_ghz(message: BitString) -> Result<DenseCodingReport> {
    check_width(message, 3)?;
    let basis = ghz_class_basis(3)?;
    execute(Run {
        scheme: "dense-ghz".into(),
        message,
        initial: StateVector::ghz(3)?,
        encoding: ghz_encoding(message)?,
        basis: &basis,
        measured: vec![1, 2, 3],
        decode: &ghz_dense_message,
    })
}

/// [`dense_code_ghz`] followed by `H_C C_BC`, decoded in the `π ⊗ Bell` basis
/// with the `π` qubit at C.
pub fn dense_code_ghz_converted(message: BitString) -> Result<DenseCodingReport> {
    check_width(message, 3)?;
    let basis = teleport_basis_ghz();
    let table = BitString::all(3)
        .map(|m| {
            let image = convert_dense_to_teleport(m)?;
            basis.certain_outcome(&image, &CONVERTED_ORDER)
        })
        .collect::<Result<Vec<usize>>>()?;
    let decode = |x: usize| {
        let m = table.iter().position(|&y| y == x).expect("bijective table");
        BitString::new(m, 3).expect("3 bits")
    };
    let mut encoding = ghz_encoding(message)?;
    encoding.push(dense_to_teleport_converter()?);
    execute(Run {
        scheme: "dense-ghz-converted".into(),
        message,
        initial: StateVector::ghz(3)?,
        encoding,
        basis: &basis,
        measured: CONVERTED_ORDER.to_vec(),
        decode: &decode,
    })
}

/// Channel `Φ⁺_AB ⊗ |0⟩_C`; each encoder is preceded by `C_BC`.
pub fn dense_code_ghz_from_epr(message: BitString) -> Result<DenseCodingReport> {
    check_width(message, 3)?;
    let basis = ghz_class_basis(3)?;
    let mut encoding = vec![cnot(2, 3)?];
    encoding.extend(ghz_encoding(message)?);
    execute(Run {
        scheme: "dense-ghz-from-epr".into(),
        message,
        initial: StateVector::ghz(2)?.tensor(&StateVector::basis(1, 0)?)?,
        encoding,
        basis: &basis,
        measured: vec![1, 2, 3],
        decode: &ghz_dense_message,
    })
}

/// `N` bits over `Ω(N)` by the generating operator on qubits `2..=N`.
pub fn dense_code_nparty(n: usize, message: BitString) -> Result<DenseCodingReport> {
    if !(2..=10).contains(&n) {
        return Err(Error::Usage(format!("N-party dense coding needs 2 <= N <= 10, got {n}")));
    }
    check_width(message, n)?;
    let basis = ghz_class_basis(n)?;
    let decode = |x: usize| BitString::new(x, n).expect("n bits");
    execute(Run {
        scheme: format!("dense-nparty({n})"),
        message,
        initial: StateVector::ghz(n)?,
        encoding: generating_factors(message)?,
        basis: &basis,
        measured: (1..=n).collect(),
        decode: &decode,
    })
}

fn check_modified(n: usize, k: usize, width: usize) -> Result<()> {
    if !(2..=10).contains(&n) {
        return Err(Error::Usage(format!("modified scheme needs 2 <= N <= 10, got {n}")));
    }
    if k > 0 && n - k.min(n) < 2 {
        return Err(Error::Usage(format!(
            "{k} independent qubits leave fewer than 2 entangled qubits of {n}"
        )));
    }
    if width > n - 1 {
        return Err(Error::Usage(format!(
            "disentangling width {width} exceeds the {} encoder qubits",
            n - 1
        )));
    }
    Ok(())
}

/// `Den(width)` on the last `width` of `n` qubits; identity below width 2.
fn tail_disentangler(n: usize, width: usize) -> Result<Option<QubitOperator>> {
    if width < 2 {
        return Ok(None);
    }
    let targets: Vec<usize> = (n - width + 1..=n).collect();
    Ok(Some(disentangle_op(width)?.on(&targets)?))
}

/// CNOT chain from qubit `n − k` through qubit `n`, spreading the entangled
/// block over the `k` independent qubits.
fn ladder_ops(n: usize, k: usize) -> Result<Vec<QubitOperator>> {
    (n - k..n).map(|q| cnot(q, q + 1)).collect()
}

/// The full encoder `Den(width) · U_x · Ent` on `n` qubits, as one operator.
pub fn modified_dense_encoder(n: usize, k: usize, width: usize, message: BitString) -> Result<QubitOperator> {
    check_modified(n, k, width)?;
    check_width(message, n)?;
    let mut ops = Vec::new();
    if let Some(den) = tail_disentangler(n, width)? {
        ops.push(den);
    }
    ops.push(generating_operator(message)?);
    ops.extend(ladder_ops(n, k)?.into_iter().rev());
    compose(&ops, n)
}

/// Channel `Ω(N − k) ⊗ |0⟩^k`. The encoder runs the CNOT chain that extends
/// the entangled block to all `N` qubits, applies `U_x`, then `Den(width)` on
/// the last `width` qubits; the decoder measures in `{Den(width) Φ_x(N)}`.
pub fn modified_dense_scheme(n: usize, k: usize, width: usize, message: BitString) -> Result<DenseCodingReport> {
    check_modified(n, k, width)?;
    check_width(message, n)?;
    let initial = if k == 0 {
        StateVector::ghz(n)?
    } else {
        StateVector::ghz(n - k)?.tensor(&StateVector::basis(k, 0)?)?
    };
    let den = tail_disentangler(n, width)?;
    let ghz_basis = ghz_class_basis(n)?;
    let basis = match &den {
        None => ghz_basis,
        Some(d) => ProjectiveBasis::new(
            format!("den({width})-ghz-class({n})"),
            ghz_basis.elements().iter().map(|e| d.apply(e)).collect::<Result<Vec<_>>>()?,
        )?,
    };
    let mut encoding = ladder_ops(n, k)?;
    encoding.extend(generating_factors(message)?);
    encoding.extend(den);
    let decode = |x: usize| BitString::new(x, n).expect("n bits");
    execute(Run {
        scheme: format!("dense-modified(N={n},k={k},n={width})"),
        message,
        initial,
        encoding,
        basis: &basis,
        measured: (1..=n).collect(),
        decode: &decode,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub states: usize,
    pub rank: usize,
    pub gram_eigenvalues: Vec<f64>,
}

/// Rank of the eight states `(1 ⊗ B_x ⊗ C_x)|GHZ⟩` built from the GHZ
/// teleportation corrections.
pub fn teleport_resource_dense_rank() -> Result<RankReport> {
    let ghz = StateVector::ghz(3)?;
    let states = ghz_table_corrections()?
        .iter()
        .map(|ops| {
            ops.iter().try_fold(ghz.clone(), |s, op: &PartyOp| {
                let local = op.operator.clone().on(&[op.operator.targets()[0] - 2])?;
                local.apply(&s)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gram = nalgebra::DMatrix::from_fn(states.len(), states.len(), |i, j| {
        states[i].inner(&states[j]).expect("same size")
    });
    let (eigenvalues, _) = hermitian_eigen(&gram);
    Ok(RankReport {
        states: states.len(),
        rank: eigenvalues.iter().filter(|&&l| l > 1e-10).count(),
        gram_eigenvalues: eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::hadamard;

    fn bits(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn tight_round_trip() {
        for m in BitString::all(2) {
            assert!(dense_code_tight(m).unwrap().round_trips(), "{m}");
        }
        assert_eq!(dense_code_tight(bits("10")).unwrap().outcome.to_string(), "10");
    }

    #[test]
    fn ghz_variants_round_trip() {
        for m in BitString::all(3) {
            let plain = dense_code_ghz(m).unwrap();
            assert!(plain.round_trips(), "{m}");
            assert_eq!(plain.qubits_manipulated, 2);
            assert!(!plain.nonlocal_encoding);
            let conv = dense_code_ghz_converted(m).unwrap();
            assert!(conv.round_trips(), "{m}");
            assert!(conv.nonlocal_encoding);
            assert!(dense_code_ghz_from_epr(m).unwrap().round_trips(), "{m}");
        }
    }

    #[test]
    fn modified_ghz_case_matches_converter_sandwich() {
        for m in BitString::all(3) {
            let enc = modified_dense_encoder(3, 1, 2, m).unwrap();
            let u = generating_operator(m).unwrap();
            let reference =
                compose(&[hadamard(2).unwrap(), cnot(2, 3).unwrap(), u, cnot(2, 3).unwrap()], 3).unwrap();
            assert!(enc.max_abs_diff(&reference).unwrap() < 1e-12, "{m}");
        }
    }

    #[test]
    fn rank_is_deficient() {
        let r = teleport_resource_dense_rank().unwrap();
        assert_eq!(r.states, 8);
        assert!(r.rank < 8);
    }
}

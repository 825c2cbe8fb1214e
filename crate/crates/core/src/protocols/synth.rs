use crate::error::{Error, Result};
use crate::gates::{pauli_on, Pauli};
use crate::locc::{PartyOp, ProtocolSetup, QuantumState};
use crate::qla::{complement, Residual, StateVector, ZERO_PROBABILITY};

const SYNTH_FIDELITY_TOL: f64 = 1e-10;

fn residuals(setup: &ProtocolSetup) -> Result<Vec<Option<StateVector>>> {
    let prepared = setup.prepared_state()?;
    let psi = prepared
        .pure()
        .ok_or_else(|| Error::UnsupportedState("synthesis needs a pure register".into()))?;
    setup
        .basis
        .elements()
        .iter()
        .map(|e| {
            let p = psi.project(e, &setup.measured_qubits)?;
            Ok(match p.residual {
                Residual::State(s) if p.probability >= ZERO_PROBABILITY => Some(s),
                _ => None,
            })
        })
        .collect()
}

fn dominant_index(s: &StateVector) -> usize {
    s.amplitudes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Product-Pauli corrections that work for every input, found from probe
/// inputs.
///
/// `build` maps a probe to a setup whose target is that probe. The first probe
/// must be a computational basis state; it fixes the bit-flip part of each
/// correction. The phase part is the first pattern, in lexicographic order over
/// `1 < σx < σz < −iσy` per qubit, that restores every probe. Each correction
/// on residual qubit `q` is applied by the party owning `q`.
pub fn synthesize_corrections<F>(build: F, probes: &[StateVector]) -> Result<Vec<Vec<PartyOp>>>
where
    F: Fn(&StateVector) -> Result<ProtocolSetup>,
{
    let setups = probes.iter().map(&build).collect::<Result<Vec<_>>>()?;
    let first = setups
        .first()
        .ok_or_else(|| Error::Usage("synthesis needs at least one probe".into()))?;
    let rest = complement(&first.measured_qubits, first.initial.num_qubits());
    let owners = rest
        .iter()
        .map(|q| {
            first
                .parties
                .iter()
                .find(|p| p.qubits.contains(q))
                .map(|p| p.name.clone())
                .ok_or_else(|| Error::Usage(format!("qubit {q} has no owner")))
        })
        .collect::<Result<Vec<_>>>()?;
    let all_residuals = setups.iter().map(residuals).collect::<Result<Vec<_>>>()?;
    let targets = setups
        .iter()
        .map(|s| match &s.target {
            QuantumState::Pure(t) => Ok(t.clone()),
            QuantumState::Mixed(_) => Err(Error::UnsupportedState("synthesis needs pure targets".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let k = rest.len();
    let base_target = dominant_index(&targets[0]);

    let mut table = Vec::with_capacity(first.basis.len());
    for x in 0..first.basis.len() {
        let Some(r0) = &all_residuals[0][x] else {
            table.push(Vec::new());
            continue;
        };
        let flips = dominant_index(r0) ^ base_target;
        let mut found = None;
        for phase_mask in 0..1usize << k {
            let ops = (0..k)
                .map(|i| {
                    let shift = k - 1 - i;
                    let p = match ((flips >> shift) & 1, (phase_mask >> shift) & 1) {
                        (0, 0) => Pauli::I,
                        (0, _) => Pauli::Z,
                        (_, 0) => Pauli::X,
                        _ => Pauli::MinusIY,
                    };
                    pauli_on(p, rest[i]).map(|op| PartyOp::new(owners[i].clone(), op))
                })
                .collect::<Result<Vec<_>>>()?;
            let restores = all_residuals.iter().zip(&targets).try_fold(true, |ok, (res, target)| {
                if !ok {
                    return Ok::<bool, Error>(false);
                }
                let Some(r) = &res[x] else { return Ok(true) };
                let mut out = r.clone();
                for (i, op) in ops.iter().enumerate() {
                    out = op.operator.clone().on(&[i + 1])?.apply(&out)?;
                }
                Ok(out.fidelity(target)? > 1.0 - SYNTH_FIDELITY_TOL)
            })?;
            if restores {
                found = Some(ops);
                break;
            }
        }
        let ops = found.ok_or_else(|| {
            Error::Verification(format!("no product-Pauli correction restores outcome {x}"))
        })?;
        table.push(ops);
    }
    Ok(table)
}

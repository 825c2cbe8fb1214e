//! Invariant checks over every module at small register sizes.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::bases::{
    bell_basis, generating_operator, ghz_class_basis, nparty_teleport_basis, teleport_basis_ghz, BitString,
    ProjectiveBasis,
};
use crate::capacity::{capacity_row, capacity_sweep, holevo, nonmaximal_ensemble, per_bit_capacity};
use crate::error::Result;
use crate::gates::{cnot, compose, embed, hadamard, pauli_on, Locality, Pauli, QubitOperator};
use crate::locc::ProtocolTranscript;
use crate::protocols::{
    dense_code_ghz, dense_code_ghz_converted, dense_code_ghz_from_epr, dense_code_nparty, dense_code_tight,
    general_two_qubit_negative_check, teleclone, teleport_ghz, teleport_ghz_over, teleport_nparty,
    teleport_onebit_style, teleport_tight, Protocol, UnknownState,
};
use crate::qla::{c, DensityMatrix, StateVector, C64};

/// Largest register size exercised by [`run_all`].
pub const VERIFY_MAX_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: String,
    pub passed: bool,
    /// Worst deviation or other summary value.
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Suite {
    checks: Vec<CheckResult>,
}

impl Suite {
    fn within(&mut self, module: &'static str, name: impl Into<String>, value: Result<f64>, tol: f64) {
        let (passed, detail) = match value {
            Ok(v) => (v <= tol, format!("{v:.3e} (tol {tol:.0e})")),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(CheckResult {
            module,
            name: name.into(),
            passed,
            detail,
        });
    }

    fn holds(&mut self, module: &'static str, name: impl Into<String>, value: Result<bool>) {
        let (passed, detail) = match value {
            Ok(v) => (v, String::new()),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(CheckResult {
            module,
            name: name.into(),
            passed,
            detail,
        });
    }
}

pub(crate) fn random_state(rng: &mut ChaCha20Rng, n: usize) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).expect("nonzero vector")
}

/// A random single-qubit unitary `e^{iφ} Rz Ry Rz`.
pub(crate) fn random_qubit_unitary(rng: &mut ChaCha20Rng, qubit: usize) -> QubitOperator {
    let [a, b, g, p]: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
    let (cs, sn) = ((b / 2.0).cos(), (b / 2.0).sin());
    let e = |t: f64| C64::from_polar(1.0, t);
    let m = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            e(p - (a + g) / 2.0) * cs,
            -e(p - (a - g) / 2.0) * sn,
            e(p + (a - g) / 2.0) * sn,
            e(p + (a + g) / 2.0) * cs,
        ],
    );
    QubitOperator::new("R", m, vec![qubit]).expect("unitary by construction")
}

fn basis_residual(b: &ProjectiveBasis) -> Result<f64> {
    let r = b.residuals();
    Ok(r.orthonormality.max(r.completeness))
}

fn fidelity_gap(ts: &[ProtocolTranscript]) -> Result<f64> {
    Ok(ts
        .iter()
        .map(|t| (1.0 - t.fidelity.unwrap_or(0.0)).abs())
        .fold(0.0, f64::max))
}

fn probability_gap(ts: &[ProtocolTranscript]) -> Result<f64> {
    Ok((ts.iter().map(|t| t.outcome_probability).sum::<f64>() - 1.0).abs())
}

fn uniform_gap(ts: &[ProtocolTranscript]) -> Result<f64> {
    let expected = 1.0 / ts.len() as f64;
    Ok(ts
        .iter()
        .map(|t| (t.outcome_probability - expected).abs())
        .fold(0.0, f64::max))
}

fn qla_checks(s: &mut Suite, rng: &mut ChaCha20Rng) {
    s.within(
        "qla",
        "tensor and projection preserve normalization",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let a = random_state(rng, 2);
                let b = random_state(rng, 2);
                let ab = a.tensor(&b)?;
                worst = worst.max((ab.norm_sqr() - 1.0).abs());
                let proj = ab.project(&random_state(rng, 1), &[2])?;
                if let Some(r) = proj.residual.state() {
                    worst = worst.max((r.norm_sqr() - 1.0).abs());
                }
            }
            Ok(worst)
        })(),
        1e-10,
    );
    s.within(
        "qla",
        "partial trace of a product returns the first factor (100 trials)",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let a = random_state(rng, 2);
                let b = random_state(rng, 2);
                let reduced = a.tensor(&b)?.to_density()?.partial_trace(&[1, 2])?;
                worst = worst.max(reduced.max_abs_diff(&a.to_density()?)?);
            }
            Ok(worst)
        })(),
        1e-10,
    );
    s.within(
        "qla",
        "projection probabilities over complete bases sum to 1",
        (|| {
            let mut worst: f64 = 0.0;
            for n in 2..=VERIFY_MAX_N {
                let psi = random_state(rng, n);
                let p: f64 = ghz_class_basis(n)?
                    .outcome_probabilities(&psi, &(1..=n).collect::<Vec<_>>())?
                    .iter()
                    .sum();
                worst = worst.max((p - 1.0).abs());
            }
            Ok(worst)
        })(),
        1e-10,
    );
}

fn gate_checks(s: &mut Suite, rng: &mut ChaCha20Rng) {
    s.within(
        "gates",
        "embed commutes with composition (50 trials)",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let q = rng.random_range(1..=3);
                let a = random_qubit_unitary(rng, q);
                let b = random_qubit_unitary(rng, q);
                let ab = QubitOperator::new("AB", a.matrix() * b.matrix(), vec![q])?;
                let lhs = embed(&ab, 3)?;
                let rhs = compose(&[embed(&a, 3)?, embed(&b, 3)?], 3)?;
                worst = worst.max(lhs.max_abs_diff(&rhs)?);
            }
            Ok(worst)
        })(),
        1e-10,
    );
    s.within(
        "gates",
        "single-qubit operators leave other reductions unchanged (50 trials)",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let psi = random_state(rng, 3);
                let u = random_qubit_unitary(rng, 2);
                let after = u.apply(&psi)?;
                for keep in [1usize, 3] {
                    let d = psi.reduced_density(&[keep])?.max_abs_diff(&after.reduced_density(&[keep])?)?;
                    worst = worst.max(d);
                }
            }
            Ok(worst)
        })(),
        1e-10,
    );
    s.within(
        "gates",
        "(1⊗σz⊗σx) and (1⊗1⊗iσy) agree on |001⟩ − |110⟩",
        (|| {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut amps = vec![0.0; 8];
            amps[0b001] = h;
            amps[0b110] = -h;
            let st = StateVector::from_real(&amps)?;
            let lhs = pauli_on(Pauli::Z, 2)?.tensor(&pauli_on(Pauli::X, 3)?)?.apply(&st)?;
            let rhs = pauli_on(Pauli::IY, 3)?.apply(&st)?;
            lhs.max_abs_diff(&rhs)
        })(),
        1e-12,
    );
    s.within(
        "gates",
        "C23 prepares GHZ from an EPR pair and an ancilla",
        (|| {
            let input = StateVector::ghz(2)?.tensor(&StateVector::basis(1, 0)?)?;
            cnot(2, 3)?.apply(&input)?.max_abs_diff(&StateVector::ghz(3)?)
        })(),
        1e-12,
    );
    s.within(
        "gates",
        "(σx⊗1)C_BC C_CB C_BC maps the outcome-0 residual to ζ",
        (|| {
            let (a, b) = (0.6, 0.8);
            let net = compose(&[pauli_on(Pauli::X, 1)?, cnot(1, 2)?, cnot(2, 1)?, cnot(1, 2)?], 2)?;
            let residual = StateVector::from_real(&[b, 0.0, 0.0, a])?;
            net.apply(&residual)?.max_abs_diff(&StateVector::from_real(&[0.0, a, b, 0.0])?)
        })(),
        1e-12,
    );
    s.holds(
        "gates",
        "CNOT and Ent/Den are tagged nonlocal, Pauli products factorized",
        (|| {
            let xz = pauli_on(Pauli::X, 1)?.tensor(&pauli_on(Pauli::Z, 2)?)?;
            Ok(cnot(1, 2)?.locality() == Locality::Nonlocal
                && crate::gates::entangle_op(3)?.locality() == Locality::Nonlocal
                && xz.locality() == Locality::Factorized)
        })(),
    );
    s.within(
        "gates",
        "Den(k)·Ent(k) = I for k = 2..6",
        (|| {
            let mut worst: f64 = 0.0;
            for k in 2..=VERIFY_MAX_N {
                let id = compose(&[crate::gates::disentangle_op(k)?, crate::gates::entangle_op(k)?], k)?;
                worst = worst.max(id.max_abs_diff(&embed(&pauli_on(Pauli::I, 1)?, k)?)?);
            }
            Ok(worst)
        })(),
        1e-10,
    );
}

fn basis_checks(s: &mut Suite) {
    for n in 2..=VERIFY_MAX_N {
        s.within(
            "bases",
            format!("GHZ-class basis N={n} orthonormal and complete"),
            ghz_class_basis(n).and_then(|b| basis_residual(&b)),
            1e-10,
        );
        s.within(
            "bases",
            format!("(1⊗U_x)Ω reproduces every GHZ-class element, N={n}"),
            (|| {
                let omega = StateVector::ghz(n)?;
                let basis = ghz_class_basis(n)?;
                let mut worst: f64 = 0.0;
                for b in BitString::all(n) {
                    let u = generating_operator(b)?;
                    if u.arity() != n - 1 {
                        return Ok(f64::INFINITY);
                    }
                    worst = worst.max(u.apply(&omega)?.max_abs_diff(basis.element(b.value()))?);
                }
                Ok(worst)
            })(),
            1e-12,
        );
        s.within(
            "bases",
            format!("every GHZ-class element is maximally entangled, N={n}"),
            (|| {
                let mut worst: f64 = 0.0;
                for e in ghz_class_basis(n)?.elements() {
                    for q in 1..=n {
                        worst = worst.max((e.reduced_density(&[q])?.entropy()? - 1.0).abs());
                    }
                }
                Ok(worst)
            })(),
            1e-10,
        );
    }
    s.within("bases", "Bell basis complete", basis_residual(&bell_basis()), 1e-10);
    s.within("bases", "π⊗Bell basis complete", basis_residual(&teleport_basis_ghz()), 1e-10);
    for n in 3..=VERIFY_MAX_N {
        s.within(
            "bases",
            format!("(π±)^(N−2)⊗Bell basis N={n} complete"),
            nparty_teleport_basis(n).and_then(|b| basis_residual(&b)),
            1e-10,
        );
    }
    s.within(
        "bases",
        "H_B C_BC D_x is a complete basis",
        (|| {
            let op = compose(&[hadamard(2)?, cnot(2, 3)?], 3)?;
            let images = BitString::all(3)
                .map(|m| op.apply(&crate::bases::ghz_dense_state(m)?))
                .collect::<Result<Vec<_>>>()?;
            basis_residual(&ProjectiveBasis::new("converted", images)?)
        })(),
        1e-12,
    );
}

fn protocol_list() -> Result<Vec<(String, Protocol)>> {
    let mut out = vec![
        ("tight".to_string(), teleport_tight(&UnknownState::single_qubit(0.6, 0.8))?),
        ("ghz".to_string(), teleport_ghz(&UnknownState::epr_form(0.6, 0.8))?),
        ("onebit".to_string(), teleport_onebit_style(&UnknownState::ghz_form(2, 0.6, 0.8))?),
    ];
    for n in 3..=VERIFY_MAX_N {
        out.push((
            format!("nparty N={n}"),
            teleport_nparty(&UnknownState::ghz_form(n - 1, 0.6, 0.8), n)?,
        ));
    }
    Ok(out)
}

fn protocol_checks(s: &mut Suite, rng: &mut ChaCha20Rng) {
    let protocols = match protocol_list() {
        Ok(p) => p,
        Err(e) => {
            s.holds("protocols", "protocol construction", Err(e));
            return;
        }
    };
    for (name, p) in &protocols {
        let runs = match p.run_all() {
            Ok(r) => r,
            Err(e) => {
                s.holds("protocols", format!("{name}: runs every branch"), Err(e));
                continue;
            }
        };
        s.within("locc", format!("{name}: branch probabilities sum to 1"), probability_gap(&runs), 1e-10);
        s.within("protocols", format!("{name}: every branch has fidelity 1"), fidelity_gap(&runs), 1e-10);
        s.within("protocols", format!("{name}: branch probabilities uniform"), uniform_gap(&runs), 1e-10);
        let bits = p.setup.outcome_bits();
        s.holds(
            "locc",
            format!("{name}: locality respected and outcome announced in full"),
            Ok(runs
                .iter()
                .all(|t| (t.nonlocal_allowed || !t.uses_nonlocal()) && t.classical_bits_sent == bits)),
        );
    }
    s.holds(
        "protocols",
        "classical cost: 2 tight, 3 GHZ, N for N-party, 2 one-pair",
        Ok(protocols.iter().all(|(name, p)| {
            let bits = p.setup.outcome_bits();
            match name.as_str() {
                "tight" | "onebit" => bits == 2,
                "ghz" => bits == 3,
                _ => bits == p.setup.measured_qubits.len(),
            }
        })),
    );
    s.holds(
        "protocols",
        "non-maximal channel gives non-uniform outcome probabilities",
        (|| {
            let channel = StateVector::superpose_extremes(3, c(0.5, 0.0), c(0.75f64.sqrt(), 0.0))?;
            let probs = teleport_ghz_over(&UnknownState::epr_form(0.6, 0.8), channel)?.probabilities()?;
            let max = probs.iter().cloned().fold(0.0, f64::max);
            let min = probs.iter().cloned().fold(1.0, f64::min);
            Ok(min > 0.0 && max / min > 1.0 + 1e-6)
        })(),
    );
    s.holds(
        "protocols",
        "dense coding round-trips every message (tight, GHZ variants, N-party N<=6)",
        (|| {
            let mut ok = BitString::all(2).try_fold(true, |acc, m| Ok::<_, crate::Error>(acc && dense_code_tight(m)?.round_trips()))?;
            for m in BitString::all(3) {
                ok &= dense_code_ghz(m)?.round_trips()
                    && dense_code_ghz_converted(m)?.round_trips()
                    && dense_code_ghz_from_epr(m)?.round_trips();
            }
            for n in 2..=VERIFY_MAX_N {
                for m in BitString::all(n) {
                    ok &= dense_code_nparty(n, m)?.round_trips();
                }
            }
            Ok(ok)
        })(),
    );
    s.within(
        "protocols",
        "telecloning copies equal the input (20 random λ0)",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let l0 = rng.random_range(0.0..=1.0);
                let r = teleclone(&UnknownState::mixed_diagonal(l0))?;
                let input = DensityMatrix::from_diagonal(&[l0, 1.0 - l0])?;
                worst = worst
                    .max(r.rho_b.max_abs_diff(&input)?)
                    .max(r.rho_c.max_abs_diff(&input)?)
                    .max(r.max_off_diagonal);
            }
            Ok(worst)
        })(),
        1e-12,
    );
    s.holds(
        "protocols",
        "GHZ scheme fails on a general two-qubit input",
        general_two_qubit_negative_check([c(0.5, 0.0); 4]).map(|r| r.min_fidelity < 1.0 - 1e-6),
    );
}

fn capacity_checks(s: &mut Suite) {
    s.within(
        "capacity",
        "Holevo of pure ensembles equals S(ρ̄)",
        (|| {
            let e = nonmaximal_ensemble(3, c(0.6, 0.0), c(0.8, 0.0))?;
            Ok((holevo(&e)? - e.average()?.entropy()?).abs())
        })(),
        1e-12,
    );
    s.within(
        "capacity",
        "Holevo and closed-form capacities agree (21 points, N = 2..6)",
        capacity_sweep(&[2, 3, 4, 5, 6], 21).map(|rows| rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max)),
        1e-10,
    );
    s.holds(
        "capacity",
        "capacity is monotone in E",
        (|| {
            let mut ok = true;
            for n in 2..=VERIFY_MAX_N {
                let mut rows = capacity_sweep(&[n], 21)?;
                rows.sort_by(|a, b| a.e.total_cmp(&b.e));
                ok &= rows.windows(2).all(|w| w[1].c >= w[0].c - 1e-12);
            }
            Ok(ok)
        })(),
    );
    s.within(
        "capacity",
        "maximum capacity times N−1 equals N",
        (|| {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut worst: f64 = 0.0;
            for n in 2..=VERIFY_MAX_N {
                let cap = per_bit_capacity(n, c(h, 0.0), c(h, 0.0))?;
                worst = worst.max((cap * (n as f64 - 1.0) - n as f64).abs());
                let row = capacity_row(n, c(h, 0.0), c(h, 0.0))?;
                worst = worst.max((row.e - 1.0).abs());
            }
            Ok(worst)
        })(),
        1e-10,
    );
}

/// Runs every check. The generator seed fixes the random trials.
pub fn run_all(seed: u64) -> VerifyReport {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut suite = Suite { checks: Vec::new() };
    qla_checks(&mut suite, &mut rng);
    gate_checks(&mut suite, &mut rng);
    basis_checks(&mut suite);
    protocol_checks(&mut suite, &mut rng);
    capacity_checks(&mut suite);
    VerifyReport {
        checks: suite.checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

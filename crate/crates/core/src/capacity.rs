//! Holevo quantities for dense coding over maximal and non-maximal
//! GHZ-class channels.
//!
//! For the channel `α|0…0⟩ + β|1…1⟩` the entanglement `E` is the binary
//! entropy of `|α|²`, so it depends only on the moduli of `α` and `β`. The
//! per-bit capacity divides the Holevo quantity by the `N − 1` manipulated
//! qubits.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bases::BitString;
use crate::error::{Error, Result};
use crate::locc::QuantumState;
use crate::qla::{binary_entropy, c, DensityMatrix, StateVector, C64, TOL};

/// Largest `N` for which ensembles are built as density matrices.
pub const MAX_ENSEMBLE_QUBITS: usize = 8;

/// Agreement required between the Holevo and closed-form capacities.
pub const CAPACITY_TOL: f64 = 1e-10;

/// States with prior probabilities.
#[derive(Debug, Clone)]
pub struct Ensemble {
    states: Vec<QuantumState>,
    probabilities: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<QuantumState>, probabilities: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != probabilities.len() {
            return Err(Error::Usage(format!(
                "{} states with {} probabilities",
                states.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidState("negative or NaN probability".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        let n = states[0].num_qubits();
        if let Some(bad) = states.iter().find(|s| s.num_qubits() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.num_qubits(),
            });
        }
        Ok(Self { states, probabilities })
    }

    /// Equiprobable pure states.
    pub fn uniform_pure(states: Vec<StateVector>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        let probabilities = vec![p; states.len()];
        Self::new(states.into_iter().map(QuantumState::Pure).collect(), probabilities)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.states[0].num_qubits()
    }

    /// `Σ p_i ρ_i`.
    pub fn average(&self) -> Result<DensityMatrix> {
        let dim = 1usize << self.num_qubits();
        let mut m: DMatrix<C64> = DMatrix::zeros(dim, dim);
        for (state, &p) in self.states.iter().zip(&self.probabilities) {
            match state {
                QuantumState::Pure(s) => {
                    let a = s.amplitudes();
                    let support = s.support();
                    for &r in &support {
                        for &col in &support {
                            m[(r, col)] += a[r] * a[col].conj() * p;
                        }
                    }
                }
                QuantumState::Mixed(rho) => m += rho.matrix() * c(p, 0.0),
            }
        }
        DensityMatrix::new(m)
    }
}

/// `S(Σ p_i ρ_i) − Σ p_i S(ρ_i)` in bits.
pub fn holevo(e: &Ensemble) -> Result<f64> {
    let mut mixed_part = 0.0;
    for (state, &p) in e.states.iter().zip(&e.probabilities) {
        if let QuantumState::Mixed(rho) = state {
            mixed_part += p * rho.entropy()?;
        }
    }
    Ok(e.average()?.entropy()? - mixed_part)
}

fn check_amplitudes(alpha: C64, beta: C64) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > TOL {
        return Err(Error::InvalidState(format!("|α|² + |β|² = {norm}, expected 1")));
    }
    Ok(())
}

/// `−|α|² log₂|α|² − |β|² log₂|β|²`.
pub fn channel_entanglement(alpha: C64, beta: C64) -> Result<f64> {
    check_amplitudes(alpha, beta)?;
    Ok(binary_entropy(alpha.norm_sqr()))
}

fn check_ensemble_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Usage(format!("ensemble needs N >= 2, got {n}")));
    }
    if n > MAX_ENSEMBLE_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            cap: MAX_ENSEMBLE_QUBITS,
        });
    }
    Ok(())
}

/// `α|0 b2…bN⟩ + (−1)^b1 β|1 b̄2…b̄N⟩`.
pub fn nonmaximal_element(bits: BitString, alpha: C64, beta: C64) -> Result<StateVector> {
    check_amplitudes(alpha, beta)?;
    let n = bits.len();
    let low_mask = (1usize << (n - 1)) - 1;
    let tail = bits.value() & low_mask;
    let sign = if bits.bit(1) == 1 { -1.0 } else { 1.0 };
    let mut amps = vec![c(0.0, 0.0); 1 << n];
    amps[tail] = alpha;
    amps[(1 << (n - 1)) | (!tail & low_mask)] = beta * sign;
    StateVector::new(amps)
}

/// The `2^N` equiprobable encoded states over the channel
/// `α|0…0⟩ + β|1…1⟩`.
pub fn nonmaximal_ensemble(n: usize, alpha: C64, beta: C64) -> Result<Ensemble> {
    check_ensemble_size(n)?;
    let states = BitString::all(n)
        .map(|b| nonmaximal_element(b, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::uniform_pure(states)
}

/// `diag(|α|², |β|²) ⊗ (I/2)^{⊗(N−1)}`.
pub fn factorized_ensemble_density(n: usize, alpha: C64, beta: C64) -> Result<DensityMatrix> {
    check_ensemble_size(n)?;
    check_amplitudes(alpha, beta)?;
    let first = DensityMatrix::from_diagonal(&[alpha.norm_sqr(), beta.norm_sqr()])?;
    first.tensor(&DensityMatrix::maximally_mixed(n - 1)?)
}

/// Average of [`nonmaximal_ensemble`], checked entrywise against
/// [`factorized_ensemble_density`].
pub fn ensemble_density(n: usize, alpha: C64, beta: C64) -> Result<DensityMatrix> {
    let rho = nonmaximal_ensemble(n, alpha, beta)?.average()?;
    let expected = factorized_ensemble_density(n, alpha, beta)?;
    let diff = rho.max_abs_diff(&expected)?;
    if diff > TOL {
        return Err(Error::Verification(format!(
            "ensemble density deviates from the product form by {diff:.3e}"
        )));
    }
    Ok(rho)
}

/// `1 + E/(N − 1)`.
pub fn per_bit_capacity_closed_form(n: usize, entanglement: f64) -> f64 {
    1.0 + entanglement / (n as f64 - 1.0)
}

/// One capacity evaluation, computed both ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha_sq: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub holevo: f64,
    pub c: f64,
    pub c_closed_form: f64,
    pub abs_diff: f64,
}

pub fn capacity_row(n: usize, alpha: C64, beta: C64) -> Result<CapacityRow> {
    let e = channel_entanglement(alpha, beta)?;
    ensemble_density(n, alpha, beta)?;
    let chi = holevo(&nonmaximal_ensemble(n, alpha, beta)?)?;
    let cap = chi / (n as f64 - 1.0);
    let closed = per_bit_capacity_closed_form(n, e);
    Ok(CapacityRow {
        n,
        alpha_sq: alpha.norm_sqr(),
        e,
        holevo: chi,
        c: cap,
        c_closed_form: closed,
        abs_diff: (cap - closed).abs(),
    })
}

/// Holevo quantity of the encoded ensemble per manipulated qubit. Fails if
/// it differs from `1 + E/(N − 1)` by more than [`CAPACITY_TOL`].
pub fn per_bit_capacity(n: usize, alpha: C64, beta: C64) -> Result<f64> {
    let row = capacity_row(n, alpha, beta)?;
    if row.abs_diff > CAPACITY_TOL {
        return Err(Error::Verification(format!(
            "capacity {} differs from closed form {} at N = {n}",
            row.c, row.c_closed_form
        )));
    }
    Ok(row.c)
}

/// Rows for every `N` in `ns` and `points` evenly spaced `|α|²` in `[0, 1]`.
pub fn capacity_sweep(ns: &[usize], points: usize) -> Result<Vec<CapacityRow>> {
    if points < 2 {
        return Err(Error::Usage(format!("sweep needs at least 2 points, got {points}")));
    }
    let mut rows = Vec::with_capacity(ns.len() * points);
    for &n in ns {
        for i in 0..points {
            let a2 = i as f64 / (points - 1) as f64;
            let mut row = capacity_row(n, c(a2.sqrt(), 0.0), c((1.0 - a2).sqrt(), 0.0))?;
            row.alpha_sq = a2;
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{bell_basis, ghz_dense_state};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn holevo_examples() {
        let dense = BitString::all(3).map(|m| ghz_dense_state(m).unwrap()).collect();
        assert!((holevo(&Ensemble::uniform_pure(dense).unwrap()).unwrap() - 3.0).abs() < 1e-10);
        let single = Ensemble::uniform_pure(vec![StateVector::ghz(2).unwrap()]).unwrap();
        assert!(holevo(&single).unwrap().abs() < 1e-12);
        let bell = Ensemble::uniform_pure(bell_basis().elements().to_vec()).unwrap();
        assert!((holevo(&bell).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn entanglement_examples() {
        assert!((channel_entanglement(c(H, 0.0), c(H, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(channel_entanglement(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
        let e = channel_entanglement(c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)).unwrap();
        assert!((e - 0.811_278_124_459_132_8).abs() < 1e-12);
        // moduli only
        let e2 = channel_entanglement(c(0.0, 0.5), c(-(0.75f64.sqrt()), 0.0)).unwrap();
        assert!((e - e2).abs() < 1e-15);
        assert!(channel_entanglement(c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn ensemble_density_examples() {
        let rho = ensemble_density(3, c(H, 0.0), c(H, 0.0)).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed(3).unwrap()).unwrap() < 1e-12);
        let rho = ensemble_density(2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(rho.diagonal(), vec![0.5, 0.5, 0.0, 0.0]);
        assert!(ensemble_density(9, c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert!((per_bit_capacity(3, c(H, 0.0), c(H, 0.0)).unwrap() - 1.5).abs() < 1e-10);
        assert!((per_bit_capacity(2, c(H, 0.0), c(H, 0.0)).unwrap() - 2.0).abs() < 1e-10);
        let c4 = per_bit_capacity(4, c(0.5, 0.0), c(0.75f64.sqrt(), 0.0)).unwrap();
        assert!((c4 - (1.0 + 0.811_278_124_459_132_8 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn sweep_shape() {
        let rows = capacity_sweep(&[2, 3], 5).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0].alpha_sq, 0.0);
        assert_eq!(rows[4].alpha_sq, 1.0);
        assert!(rows.iter().all(|r| r.abs_diff < 1e-10));
    }
}

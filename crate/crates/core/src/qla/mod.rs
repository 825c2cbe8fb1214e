//! Dense complex linear algebra for multi-qubit registers.
//!
//! Qubits are addressed 1-based. Qubit 1 is the most significant bit of the
//! basis index, so the basis state `|b1 b2 … bN⟩` sits at index
//! `Σ b_k 2^(N-k)`.

mod density;
mod layout;
mod state;

pub use density::DensityMatrix;
pub use layout::TargetLayout;
pub use state::{Projection, Residual, StateVector};

pub(crate) use density::hermitian_eigen;

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Equality tolerance for states, traces and unitarity.
pub const TOL: f64 = 1e-10;

/// Branches below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Largest register a [`StateVector`] may hold.
pub const MAX_STATE_QUBITS: usize = 16;

/// Largest register a [`DensityMatrix`] may hold.
pub const MAX_DENSITY_QUBITS: usize = 10;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Checks that `qubits` is a list of distinct indices in `1..=num_qubits`.
pub(crate) fn check_qubits(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q == 0 || q > num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::Usage(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Qubits of `1..=num_qubits` not in `taken`, in register order.
pub(crate) fn complement(taken: &[usize], num_qubits: usize) -> Vec<usize> {
    (1..=num_qubits).filter(|q| !taken.contains(q)).collect()
}

pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

pub fn to_density(psi: &StateVector) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(psi)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.entropy()
}

pub fn fidelity_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

pub fn project(
    psi: &StateVector,
    projector_state: &StateVector,
    on_qubits: &[usize],
) -> Result<Projection> {
    psi.project(projector_state, on_qubits)
}

/// Binary entropy `-p log2 p - (1-p) log2 (1-p)` of a two-outcome distribution.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_term(p) + shannon_term(1.0 - p)
}

pub(crate) fn shannon_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

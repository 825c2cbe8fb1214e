use nalgebra::{DMatrix, SymmetricEigen};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{
    check_qubits, complement, is_finite, shannon_term, StateVector, TargetLayout, C64,
    MAX_DENSITY_QUBITS, TOL, ZERO_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::json::ComplexMatrix;

/// Eigenvalues below this are an invalid state rather than rounding drift.
const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-8;

/// Eigenvalues at or below this are treated as exactly zero in the entropy.
const ZERO_EIGENVALUE: f64 = 1e-12;

/// A Hermitian, unit-trace, positive semidefinite operator on `num_qubits`
/// qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    m: DMatrix<C64>,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn num_qubits_for(m: &DMatrix<C64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidState(format!(
            "matrix is not square: {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dim = m.nrows();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            cap: MAX_DENSITY_QUBITS,
        });
    }
    Ok(n)
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within 1e-10.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_trusted(m)?;
        if !rho.m.iter().all(|&z| is_finite(z)) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = rho.hermiticity_residual();
        if herm > TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let min = rho.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(rho)
    }

    /// Shape checks only; for matrices that are valid by construction.
    pub(crate) fn from_matrix_trusted(m: DMatrix<C64>) -> Result<Self> {
        let num_qubits = num_qubits_for(&m)?;
        Ok(Self { num_qubits, m })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let dim = psi.dim();
        if psi.num_qubits() > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                requested: psi.num_qubits(),
                cap: MAX_DENSITY_QUBITS,
            });
        }
        let a = psi.amplitudes();
        let m = DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj());
        Self::from_matrix_trusted(m)
    }

    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        if probabilities.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidState("negative or NaN probability".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let d = probabilities.len();
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(probabilities[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::from_matrix_trusted(m)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                requested: num_qubits,
                cap: MAX_DENSITY_QUBITS,
            });
        }
        let d = 1usize << num_qubits;
        Self::from_diagonal(&vec![1.0 / d as f64; d])
    }

    /// `Σ w_i ρ_i` for weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Usage("empty mixture".into()))?
            .1;
        let mut m = DMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.num_qubits != first.num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: first.num_qubits,
                    actual: rho.num_qubits,
                });
            }
            m += &rho.m * C64::new(*w, 0.0);
        }
        Self::from_matrix_trusted(m)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        if (self.purity() - 1.0).abs() < ZERO_EIGENVALUE {
            return Ok(0.0);
        }
        let mut s = 0.0;
        for lambda in self.eigenvalues() {
            if lambda < NEGATIVE_EIGENVALUE_LIMIT {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {lambda:.3e}"
                )));
            }
            if lambda > ZERO_EIGENVALUE {
                s += shannon_term(lambda);
            }
        }
        Ok(s.max(0.0))
    }

    /// Reduced state of `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::Usage("partial trace needs a nonempty keep set".into()));
        }
        let kept = TargetLayout::new(keep, self.num_qubits)?;
        let traced = complement(keep, self.num_qubits);
        let env = TargetLayout::new(&traced, self.num_qubits)?;
        let k = 1usize << keep.len();
        let mut out = DMatrix::zeros(k, k);
        for e in 0..1usize << traced.len() {
            let base = env.scatter(0, e);
            for i in 0..k {
                let row = kept.scatter(base, i);
                for j in 0..k {
                    out[(i, j)] += self.m[(row, kept.scatter(base, j))];
                }
            }
        }
        Self::from_matrix_trusted(out)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n,
                cap: MAX_DENSITY_QUBITS,
            });
        }
        Self::from_matrix_trusted(self.m.kronecker(&other.m))
    }

    /// `U ρ U†` for a local unitary on `targets`.
    pub(crate) fn apply_local(&self, matrix: &DMatrix<C64>, targets: &[usize]) -> Result<DensityMatrix> {
        let layout = TargetLayout::new(targets, self.num_qubits)?;
        let full = layout.embed(matrix);
        Self::from_matrix_trusted(&full * &self.m * full.adjoint())
    }

    /// Projects `on_qubits` onto `projector_state`; returns the probability
    /// and, when defined, the renormalized state of the remaining qubits.
    pub fn project(
        &self,
        projector_state: &StateVector,
        on_qubits: &[usize],
    ) -> Result<(f64, Option<DensityMatrix>)> {
        if projector_state.num_qubits() != on_qubits.len() {
            return Err(Error::DimensionMismatch {
                expected: on_qubits.len(),
                actual: projector_state.num_qubits(),
            });
        }
        check_qubits(on_qubits, self.num_qubits)?;
        let measured = TargetLayout::new(on_qubits, self.num_qubits)?;
        let rest = complement(on_qubits, self.num_qubits);
        let rest_layout = TargetLayout::new(&rest, self.num_qubits)?;
        let phi = projector_state.amplitudes();
        let r = 1usize << rest.len();
        let mut out: DMatrix<C64> = DMatrix::zeros(r, r);
        for row in 0..self.dim() {
            let pr = phi[measured.gather(row)].conj();
            if pr == C64::new(0.0, 0.0) {
                continue;
            }
            let rr = rest_layout.gather(row);
            for col in 0..self.dim() {
                let pc = phi[measured.gather(col)];
                if pc == C64::new(0.0, 0.0) {
                    continue;
                }
                out[(rr, rest_layout.gather(col))] += pr * self.m[(row, col)] * pc;
            }
        }
        let probability = out.trace().re;
        if probability < ZERO_PROBABILITY || rest.is_empty() {
            return Ok((probability.max(0.0), None));
        }
        out /= C64::new(probability, 0.0);
        Ok((probability.min(1.0), Some(Self::from_matrix_trusted(out)?)))
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: psi.num_qubits(),
            });
        }
        let a = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += a[i].conj() * self.m[(i, j)] * a[j];
            }
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        let (values, vectors) = hermitian_eigen(&self.m);
        let sqrt_diag = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                C64::new(values[i].max(0.0).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let sqrt_rho = &vectors * sqrt_diag * vectors.adjoint();
        let inner = &sqrt_rho * &other.m * &sqrt_rho;
        let (mu, _) = hermitian_eigen(&inner);
        let root_sum: f64 = mu.iter().map(|&v| v.max(0.0).sqrt()).sum();
        Ok((root_sum * root_sum).clamp(0.0, 1.0))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        Ok(self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.m[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DensityMatrix", 2)?;
        s.serialize_field("num_qubits", &self.num_qubits)?;
        s.serialize_field("entries", &ComplexMatrix(&self.m))?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qla::c;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pure_basis_state() {
        let rho = DensityMatrix::from_pure(&StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(rho.diagonal(), vec![1.0, 0.0]);
        assert_eq!(rho.entropy().unwrap(), 0.0);
    }

    #[test]
    fn uniform_superposition_has_quarter_entries() {
        let rho = DensityMatrix::from_pure(&StateVector::from_real(&[H, H]).unwrap()).unwrap();
        for z in rho.matrix().iter() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_outer_product_corners() {
        let rho = StateVector::ghz(3).unwrap().to_density().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expected = if (i == 0 || i == 7) && (j == 0 || j == 7) { 0.5 } else { 0.0 };
                assert!((rho.matrix()[(i, j)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ghz_single_qubit_is_maximally_mixed() {
        let rho = StateVector::ghz(3).unwrap().to_density().unwrap();
        for q in 1..=3 {
            let r = rho.partial_trace(&[q]).unwrap();
            assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()).unwrap() < 1e-15);
            assert!((r.entropy().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_partial_trace() {
        let s = StateVector::basis(2, 0b01).unwrap();
        let r = s.to_density().unwrap().partial_trace(&[2]).unwrap();
        assert_eq!(r.diagonal(), vec![0.0, 1.0]);
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        let s = StateVector::basis(3, 0b100).unwrap();
        let rho = s.to_density().unwrap();
        let r = rho.partial_trace(&[3, 1]).unwrap();
        // (q3, q1) = (0, 1)
        assert_eq!(r.diagonal(), vec![0.0, 1.0, 0.0, 0.0]);
        assert!(rho.partial_trace(&[]).is_err());
    }

    #[test]
    fn entropy_of_biased_qubit() {
        let rho = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        let expected = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert!((rho.entropy().unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(not_herm).is_err());
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(DensityMatrix::new(negative).is_err());
        let negative = DensityMatrix::from_matrix_trusted(DMatrix::from_row_slice(
            2,
            2,
            &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)],
        ))
        .unwrap();
        assert!(negative.entropy().is_err());
    }

    #[test]
    fn uhlmann_fidelity_matches_commuting_formula() {
        let a = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let expected = ((0.3f64 * 0.6).sqrt() + (0.7f64 * 0.4).sqrt()).powi(2);
        assert!((a.fidelity(&b).unwrap() - expected).abs() < 1e-12);
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_on_mixed_register() {
        // ρ = diag(0.3, 0.7) ⊗ |0⟩⟨0|, project qubit 2 onto |0⟩
        let rho = DensityMatrix::from_diagonal(&[0.3, 0.7])
            .unwrap()
            .tensor(&StateVector::basis(1, 0).unwrap().to_density().unwrap())
            .unwrap();
        let (p, r) = rho.project(&StateVector::basis(1, 0).unwrap(), &[2]).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(r.unwrap().diagonal(), vec![0.3, 0.7]);
    }
}

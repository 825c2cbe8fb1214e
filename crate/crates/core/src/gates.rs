//! Operator library: Pauli/Hadamard/CNOT, register embedding, composition and
//! the entangling/disentangling transformations.

use std::fmt;

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json::ComplexMatrix;
use crate::qla::{c, check_qubits, is_finite, DensityMatrix, StateVector, TargetLayout, C64, TOL};

/// Tolerance of the tensor-product factorization test.
const FACTORIZATION_TOL: f64 = 1e-8;

/// Registers larger than this skip the explicit `U U† = I` check in derived
/// constructions (embedding, composition), where unitarity is inherited.
const DERIVED_UNITARITY_CHECK_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Locality {
    /// Acts on one qubit.
    LocalSingle,
    /// A tensor product of single-qubit operators.
    Factorized,
    /// Entangling across its targets.
    Nonlocal,
}

impl fmt::Display for Locality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locality::LocalSingle => "local-single",
            Locality::Factorized => "factorized",
            Locality::Nonlocal => "nonlocal",
        })
    }
}

/// A unitary on an ordered list of qubits. `targets[0]` is the most
/// significant qubit of the matrix index.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperator {
    label: String,
    matrix: DMatrix<C64>,
    targets: Vec<usize>,
    locality: Locality,
}

fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let prod = m * m.adjoint();
    let d = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - c(expected, 0.0)).norm());
        }
    }
    worst
}

/// Splits an `m`-qubit matrix into single-qubit factors if it is a tensor
/// product, by slicing around its largest entry.
fn factorize(m: &DMatrix<C64>, arity: usize) -> Option<Vec<DMatrix<C64>>> {
    let d = m.nrows();
    let (mut r0, mut c0, mut best) = (0, 0, 0.0);
    for r in 0..d {
        for col in 0..d {
            let v = m[(r, col)].norm();
            if v > best {
                (r0, c0, best) = (r, col, v);
            }
        }
    }
    if best == 0.0 {
        return None;
    }
    let mut factors = Vec::with_capacity(arity);
    for q in 0..arity {
        let shift = arity - 1 - q;
        let clear = !(1usize << shift);
        let f = DMatrix::from_fn(2, 2, |a, b| {
            m[((r0 & clear) | (a << shift), (c0 & clear) | (b << shift))]
        });
        factors.push(f);
    }
    let product = factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f));
    let scale = m[(r0, c0)] / product[(r0, c0)];
    let residual = m
        .iter()
        .zip(product.iter())
        .map(|(a, b)| (a - b * scale).norm())
        .fold(0.0, f64::max);
    (residual < FACTORIZATION_TOL).then_some(factors)
}

fn classify(m: &DMatrix<C64>, arity: usize) -> Locality {
    if arity == 1 {
        Locality::LocalSingle
    } else if factorize(m, arity).is_some() {
        Locality::Factorized
    } else {
        Locality::Nonlocal
    }
}

impl QubitOperator {
    /// Validates shape, distinct targets and unitarity within 1e-10.
    pub fn new(label: impl Into<String>, matrix: DMatrix<C64>, targets: Vec<usize>) -> Result<Self> {
        let op = Self::derived(label, matrix, targets)?;
        let dev = unitarity_deviation(&op.matrix);
        if dev > TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(op)
    }

    /// Shape and locality only; unitarity is inherited from the operands.
    fn derived(label: impl Into<String>, matrix: DMatrix<C64>, targets: Vec<usize>) -> Result<Self> {
        let m = targets.len();
        if m == 0 {
            return Err(Error::Usage("operator needs at least one target".into()));
        }
        check_qubits(&targets, usize::MAX >> 1)?;
        if matrix.nrows() != 1 << m || matrix.ncols() != 1 << m {
            return Err(Error::DimensionMismatch {
                expected: 1 << m,
                actual: matrix.nrows(),
            });
        }
        if !matrix.iter().all(|&z| is_finite(z)) {
            return Err(Error::Usage("operator has non-finite entries".into()));
        }
        if matrix.nrows() <= DERIVED_UNITARITY_CHECK_MAX_DIM {
            let dev = unitarity_deviation(&matrix);
            if dev > TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        let locality = classify(&matrix, m);
        Ok(Self {
            label: label.into(),
            matrix,
            targets,
            locality,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn locality(&self) -> Locality {
        self.locality
    }

    /// Same matrix on different qubits.
    pub fn on(mut self, targets: &[usize]) -> Result<Self> {
        if targets.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                actual: targets.len(),
            });
        }
        check_qubits(targets, usize::MAX >> 1)?;
        self.targets = targets.to_vec();
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Multiplies by a unit-modulus phase.
    pub fn scaled(&self, phase: C64, label: impl Into<String>) -> Result<Self> {
        Self::new(label, &self.matrix * phase, self.targets.clone())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            label: format!("({})†", self.label),
            matrix: self.matrix.adjoint(),
            targets: self.targets.clone(),
            locality: self.locality,
        }
    }

    /// `self ⊗ other` on the concatenated targets.
    pub fn tensor(&self, other: &QubitOperator) -> Result<Self> {
        let mut targets = self.targets.clone();
        targets.extend_from_slice(&other.targets);
        check_qubits(&targets, usize::MAX >> 1)?;
        // a product is nonlocal exactly when one operand is
        let locality = if self.locality == Locality::Nonlocal || other.locality == Locality::Nonlocal {
            Locality::Nonlocal
        } else {
            Locality::Factorized
        };
        Ok(Self {
            label: format!("{}⊗{}", self.label, other.label),
            matrix: self.matrix.kronecker(&other.matrix),
            targets,
            locality,
        })
    }

    /// Unitary single-qubit factors, one per target, if the operator is a
    /// product. The global phase is carried by the first factor.
    pub fn factors(&self) -> Option<Vec<QubitOperator>> {
        let parts = factorize(&self.matrix, self.arity())?;
        let unit: Vec<DMatrix<C64>> = parts
            .into_iter()
            .map(|f| {
                let det = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(1, 0)];
                &f / c(det.norm().sqrt(), 0.0)
            })
            .collect();
        let product = unit.iter().skip(1).fold(unit[0].clone(), |acc, f| acc.kronecker(f));
        let (r, col) = (0..product.nrows())
            .flat_map(|r| (0..product.ncols()).map(move |c| (r, c)))
            .max_by(|a, b| product[*a].norm().total_cmp(&product[*b].norm()))?;
        let global = self.matrix[(r, col)] / product[(r, col)];
        unit.into_iter()
            .enumerate()
            .map(|(i, f)| {
                let f = if i == 0 { f * global } else { f };
                Self::derived(format!("{}[{}]", self.label, i + 1), f, vec![self.targets[i]]).ok()
            })
            .collect()
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        psi.apply_local(&self.matrix, &self.targets)
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.apply_local(&self.matrix, &self.targets)
    }

    /// Entrywise matrix distance; phase-sensitive, targets must match.
    pub fn max_abs_diff(&self, other: &QubitOperator) -> Result<f64> {
        if self.targets != other.targets {
            return Err(Error::Usage(format!(
                "target mismatch: {:?} vs {:?}",
                self.targets, other.targets
            )));
        }
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {:?}", self.label, self.targets)
    }
}

impl Serialize for QubitOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("QubitOperator", 4)?;
        s.serialize_field("label", &self.label)?;
        s.serialize_field("targets", &self.targets)?;
        s.serialize_field("locality", &self.locality)?;
        s.serialize_field("matrix", &ComplexMatrix(&self.matrix))?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
    /// `-iσ_y = σ_x σ_z`
    MinusIY,
    /// `iσ_y = σ_z σ_x`
    IY,
}

impl Pauli {
    pub fn matrix(self) -> DMatrix<C64> {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let entries = match self {
            Pauli::I => [one, z, z, one],
            Pauli::X => [z, one, one, z],
            Pauli::Y => [z, -i, i, z],
            Pauli::Z => [one, z, z, -one],
            Pauli::MinusIY => [z, -one, one, z],
            Pauli::IY => [z, one, -one, z],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "1",
            Pauli::X => "σx",
            Pauli::Y => "σy",
            Pauli::Z => "σz",
            Pauli::MinusIY => "-iσy",
            Pauli::IY => "iσy",
        }
    }
}

/// The 2x2 Pauli or identity matrix, on qubit 1.
pub fn pauli(which: Pauli) -> QubitOperator {
    QubitOperator {
        label: which.label().to_string(),
        matrix: which.matrix(),
        targets: vec![1],
        locality: Locality::LocalSingle,
    }
}

pub fn pauli_on(which: Pauli, qubit: usize) -> Result<QubitOperator> {
    pauli(which).on(&[qubit])
}

pub fn hadamard(qubit: usize) -> Result<QubitOperator> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
    QubitOperator::new("H", m, vec![qubit])
}

/// Controlled-NOT with the given control and target.
pub fn cnot(control: usize, target: usize) -> Result<QubitOperator> {
    if control == target {
        return Err(Error::Usage(format!(
            "CNOT control and target are both qubit {control}"
        )));
    }
    let (z, one) = (c(0.0, 0.0), c(1.0, 0.0));
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        one, z, z, z,
        z, one, z, z,
        z, z, z, one,
        z, z, one, z,
    ]);
    QubitOperator::new(format!("C({control}→{target})"), m, vec![control, target])
}

/// The full-register operator acting as `op` on its targets.
pub fn embed(op: &QubitOperator, register_size: usize) -> Result<QubitOperator> {
    let layout = TargetLayout::new(&op.targets, register_size)?;
    let locality = match (op.locality, register_size) {
        (_, 1) => Locality::LocalSingle,
        (Locality::Nonlocal, _) => Locality::Nonlocal,
        _ => Locality::Factorized,
    };
    Ok(QubitOperator {
        label: format!("embed({}, {register_size})", op.label),
        matrix: layout.embed(&op.matrix),
        targets: (1..=register_size).collect(),
        locality,
    })
}

/// Right-to-left product `ops[0] · ops[1] · … · ops[k]` on a register of
/// `register_size` qubits (the last operator acts first).
pub fn compose(ops: &[QubitOperator], register_size: usize) -> Result<QubitOperator> {
    if ops.is_empty() {
        return Err(Error::Usage("nothing to compose".into()));
    }
    if register_size == 0 {
        return Err(Error::Usage("empty register".into()));
    }
    let layouts = ops
        .iter()
        .map(|op| TargetLayout::new(&op.targets, register_size))
        .collect::<Result<Vec<_>>>()?;
    let dim = 1usize << register_size;
    let mut m = DMatrix::zeros(dim, dim);
    let mut column = vec![c(0.0, 0.0); dim];
    for col in 0..dim {
        column.iter_mut().for_each(|z| *z = c(0.0, 0.0));
        column[col] = c(1.0, 0.0);
        for (op, layout) in ops.iter().zip(&layouts).rev() {
            column = layout.apply(&op.matrix, &column);
        }
        for (r, &z) in column.iter().enumerate() {
            m[(r, col)] = z;
        }
    }
    let label = ops.iter().map(|op| op.label.as_str()).collect::<Vec<_>>().join("·");
    QubitOperator::derived(label, m, (1..=register_size).collect())
}

/// CNOT chain `C(k-1→k) · … · C(1→2)` on qubits `1..=k`.
pub fn cnot_ladder(k: usize) -> Result<QubitOperator> {
    if k < 2 {
        return Err(Error::Usage(format!("CNOT ladder needs k >= 2, got {k}")));
    }
    let ops = (1..k).rev().map(|q| cnot(q, q + 1)).collect::<Result<Vec<_>>>()?;
    Ok(compose(&ops, k)?.with_label(format!("Ladder({k})")))
}

/// Maps `|0…0⟩` to `(|0…0⟩ + |1…1⟩)/√2`: Hadamard on qubit 1, then the CNOT
/// ladder.
pub fn entangle_op(k: usize) -> Result<QubitOperator> {
    if k < 2 {
        return Err(Error::Usage(format!("Ent(k) needs k >= 2, got {k}")));
    }
    let mut ops = (1..k).rev().map(|q| cnot(q, q + 1)).collect::<Result<Vec<_>>>()?;
    ops.push(hadamard(1)?);
    Ok(compose(&ops, k)?.with_label(format!("Ent({k})")))
}

/// Inverse of [`entangle_op`].
pub fn disentangle_op(k: usize) -> Result<QubitOperator> {
    Ok(entangle_op(k)?.adjoint().with_label(format!("Den({k})")))
}

/// Whether `m`-qubit operators can index a complete `N`-qubit basis by
/// dimension count: `m >= N/2`.
pub fn validate_arity(n: usize, m: usize) -> bool {
    2 * m >= n
}

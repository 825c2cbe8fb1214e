//! Measurement bases: Bell, the GHZ-class complete set, the `π±`-product
//! teleportation bases and the dense-to-teleport conversion.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gates::{cnot, compose, hadamard, pauli_on, Pauli, QubitOperator};
use crate::json::ComplexPairs;
use crate::qla::{c, StateVector, C64};

/// Largest register for [`ghz_class_basis`].
pub const MAX_GHZ_CLASS_QUBITS: usize = 12;

/// Above this dimension the completeness sum is accumulated sparsely.
const DENSE_COMPLETENESS_MAX_DIM: usize = 1024;

/// Bits `b1 … bN`, with `b1` the most significant bit of the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: usize,
    len: usize,
}

impl BitString {
    pub fn new(value: usize, len: usize) -> Result<Self> {
        if len == 0 || len >= usize::BITS as usize || value >> len != 0 {
            return Err(Error::Usage(format!("{value} does not fit in {len} bits")));
        }
        Ok(Self { value, len })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Usage(format!("not a bit string: {bits:?}")));
        }
        let value = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Self::new(value, bits.len())
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Usage(format!("not a bit string: {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn len(self) -> usize {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Bit `b_k`, 1-based.
    pub fn bit(self, k: usize) -> u8 {
        assert!((1..=self.len).contains(&k), "bit {k} of a {}-bit string", self.len);
        ((self.value >> (self.len - k)) & 1) as u8
    }

    pub fn bits(self) -> Vec<u8> {
        (1..=self.len).map(|k| self.bit(k)).collect()
    }

    /// All `2^len` strings in increasing value order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |value| BitString { value, len })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.len)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An indexed orthonormal basis of an `N`-qubit space.
#[derive(Debug, Clone)]
pub struct ProjectiveBasis {
    label: String,
    num_qubits: usize,
    elements: Vec<StateVector>,
    supports: Vec<Vec<usize>>,
}

/// Numerical residuals of a basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisResiduals {
    /// `max |⟨e_i|e_j⟩ − δ_ij|`
    pub orthonormality: f64,
    /// `max |Σ_x |e_x⟩⟨e_x| − I|` entrywise
    pub completeness: f64,
}

impl ProjectiveBasis {
    /// Requires exactly `2^N` elements of `N` qubits each.
    pub fn new(label: impl Into<String>, elements: Vec<StateVector>) -> Result<Self> {
        let num_qubits = elements
            .first()
            .ok_or_else(|| Error::Usage("empty basis".into()))?
            .num_qubits();
        if let Some(bad) = elements.iter().find(|e| e.num_qubits() != num_qubits) {
            return Err(Error::DimensionMismatch {
                expected: num_qubits,
                actual: bad.num_qubits(),
            });
        }
        if elements.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << num_qubits,
                actual: elements.len(),
            });
        }
        let supports = elements.iter().map(StateVector::support).collect();
        Ok(Self {
            label: label.into(),
            num_qubits,
            elements,
            supports,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, x: usize) -> &StateVector {
        &self.elements[x]
    }

    pub fn elements(&self) -> &[StateVector] {
        &self.elements
    }

    fn dot(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (self.elements[i].amplitudes(), self.elements[j].amplitudes());
        let (short, other) = if self.supports[i].len() <= self.supports[j].len() {
            (&self.supports[i], &self.supports[j])
        } else {
            (&self.supports[j], &self.supports[i])
        };
        if short.is_empty() || other.is_empty() {
            return c(0.0, 0.0);
        }
        short.iter().map(|&k| a[k].conj() * b[k]).sum()
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in i..self.len() {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.dot(i, j) - c(expected, 0.0)).norm());
            }
        }
        worst
    }

    pub fn completeness_residual(&self) -> f64 {
        let dim = 1usize << self.num_qubits;
        let delta = |r: usize, col: usize| c(if r == col { 1.0 } else { 0.0 }, 0.0);
        if dim <= DENSE_COMPLETENESS_MAX_DIM {
            let mut acc = vec![c(0.0, 0.0); dim * dim];
            for (e, supp) in self.elements.iter().zip(&self.supports) {
                let a = e.amplitudes();
                for &r in supp {
                    for &col in supp {
                        acc[r * dim + col] += a[r] * a[col].conj();
                    }
                }
            }
            acc.iter()
                .enumerate()
                .map(|(k, &z)| (z - delta(k / dim, k % dim)).norm())
                .fold(0.0, f64::max)
        } else {
            let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
            for (e, supp) in self.elements.iter().zip(&self.supports) {
                let a = e.amplitudes();
                for &r in supp {
                    for &col in supp {
                        *acc.entry((r, col)).or_insert(c(0.0, 0.0)) += a[r] * a[col].conj();
                    }
                }
            }
            // diagonal entries never touched are off by one
            let missing_diagonal = (0..dim).any(|k| !acc.contains_key(&(k, k)));
            let worst = acc
                .iter()
                .map(|(&(r, col), &z)| (z - delta(r, col)).norm())
                .fold(0.0, f64::max);
            if missing_diagonal {
                worst.max(1.0)
            } else {
                worst
            }
        }
    }

    pub fn residuals(&self) -> BasisResiduals {
        BasisResiduals {
            orthonormality: self.orthonormality_residual(),
            completeness: self.completeness_residual(),
        }
    }

    /// Probability of each outcome when `on_qubits` of `psi` are measured.
    pub fn outcome_probabilities(&self, psi: &StateVector, on_qubits: &[usize]) -> Result<Vec<f64>> {
        self.elements
            .iter()
            .map(|e| Ok(psi.project(e, on_qubits)?.probability))
            .collect()
    }

    /// The outcome of a measurement whose result is certain.
    pub fn certain_outcome(&self, psi: &StateVector, on_qubits: &[usize]) -> Result<usize> {
        let probs = self.outcome_probabilities(psi, on_qubits)?;
        let (x, &p) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("bases are nonempty");
        if (p - 1.0).abs() > crate::qla::TOL {
            return Err(Error::Verification(format!(
                "measurement in {} is not deterministic: max probability {p}",
                self.label
            )));
        }
        Ok(x)
    }
}

impl Serialize for ProjectiveBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let elements: Vec<ComplexPairs<'_>> =
            self.elements.iter().map(|e| ComplexPairs(e.amplitudes())).collect();
        let mut s = serializer.serialize_struct("ProjectiveBasis", 3)?;
        s.serialize_field("label", &self.label)?;
        s.serialize_field("num_qubits", &self.num_qubits)?;
        s.serialize_field("elements", &elements)?;
        s.end()
    }
}

/// `(|0⟩ ± |1⟩)/√2`; `minus` selects the sign.
pub fn pi_state(minus: bool) -> StateVector {
    let s = if minus { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    StateVector::from_real(&[FRAC_1_SQRT_2, s]).expect("normalized")
}

/// Bell index `x` of `(1 ⊗ U_x)Ω`: Φ⁺, Ψ⁺, Φ⁻, Ψ⁻ for `U_x` = 1, σx, σz, −iσy.
///
/// This equals the lexicographic index `b1 b2` of the two-qubit GHZ-class set.
pub fn bell_operator(x: usize) -> Pauli {
    [Pauli::I, Pauli::X, Pauli::Z, Pauli::MinusIY][x & 3]
}

pub fn bell_state(x: usize) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let amps: [f64; 4] = match x & 3 {
        0 => [h, 0.0, 0.0, h],
        1 => [0.0, h, h, 0.0],
        2 => [h, 0.0, 0.0, -h],
        _ => [0.0, h, -h, 0.0],
    };
    StateVector::from_real(&amps).expect("normalized")
}

/// Φ⁺, Ψ⁺, Φ⁻, Ψ⁻ at x = 0..3.
pub fn bell_basis() -> ProjectiveBasis {
    ProjectiveBasis::new("bell", (0..4).map(bell_state).collect()).expect("4 two-qubit states")
}

fn check_ghz_class_size(n: usize) -> Result<()> {
    if !(2..=MAX_GHZ_CLASS_QUBITS).contains(&n) {
        return Err(Error::Usage(format!(
            "GHZ-class basis needs 2 <= N <= {MAX_GHZ_CLASS_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

/// `(|0 b2…bN⟩ + (−1)^b1 |1 b̄2…b̄N⟩)/√2`.
pub fn ghz_class_element(bits: BitString) -> Result<StateVector> {
    let n = bits.len();
    check_ghz_class_size(n)?;
    let low_mask = (1usize << (n - 1)) - 1;
    let tail = bits.value() & low_mask;
    let sign = if bits.bit(1) == 1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let mut amps = vec![c(0.0, 0.0); 1 << n];
    amps[tail] = c(FRAC_1_SQRT_2, 0.0);
    amps[(1 << (n - 1)) | (!tail & low_mask)] = c(sign, 0.0);
    StateVector::new(amps)
}

/// The `2^N` maximally entangled states `Φ_x(N)`, indexed by `x = b1…bN`.
pub fn ghz_class_basis(n: usize) -> Result<ProjectiveBasis> {
    check_ghz_class_size(n)?;
    let elements = BitString::all(n).map(ghz_class_element).collect::<Result<Vec<_>>>()?;
    ProjectiveBasis::new(format!("ghz-class({n})"), elements)
}

/// Single-qubit factors of `U_x(N−1) = σx^b2 σz^b1 ⊗ σx^b3 ⊗ … ⊗ σx^bN` on
/// qubits `2..=N`.
pub fn generating_factors(bits: BitString) -> Result<Vec<QubitOperator>> {
    let n = bits.len();
    if n < 2 {
        return Err(Error::Usage(format!("generating operator needs N >= 2, got {n}")));
    }
    let head = match (bits.bit(1), bits.bit(2)) {
        (0, 0) => Pauli::I,
        (0, _) => Pauli::X,
        (_, 0) => Pauli::Z,
        _ => Pauli::MinusIY,
    };
    let mut factors = vec![pauli_on(head, 2)?];
    for k in 3..=n {
        let p = if bits.bit(k) == 1 { Pauli::X } else { Pauli::I };
        factors.push(pauli_on(p, k)?);
    }
    Ok(factors)
}

/// The factorized `(N−1)`-qubit operator with `(1 ⊗ U_x)Ω = Φ_x(N)`.
pub fn generating_operator(bits: BitString) -> Result<QubitOperator> {
    let factors = generating_factors(bits)?;
    let op = factors
        .iter()
        .skip(1)
        .try_fold(factors[0].clone(), |acc, f| acc.tensor(f))?;
    Ok(op.with_label(format!("U_{bits}")))
}

/// `π^{s} ⊗ Bell` over 3 qubits, ordered as the eight-outcome GHZ
/// teleportation table: bit 1 selects Ψ over Φ, bit 2 the π sign, bit 3 the
/// Bell sign.
pub fn teleport_basis_ghz() -> ProjectiveBasis {
    let elements = (0..8)
        .map(|x| {
            let (psi, pi_minus, bell_minus) = (x >> 2, (x >> 1) & 1, x & 1);
            pi_state(pi_minus == 1)
                .tensor(&bell_state(2 * bell_minus + psi))
                .expect("3 qubits")
        })
        .collect();
    ProjectiveBasis::new("pi-bell", elements).expect("8 three-qubit states")
}

/// `π^{s1} ⊗ … ⊗ π^{s(N−2)} ⊗ Bell` over `N` qubits. The sign bits occupy the
/// high `N−2` bits of the index (a set bit selects π⁻) and the Bell index the
/// low two.
pub fn nparty_teleport_basis(n: usize) -> Result<ProjectiveBasis> {
    if n < 3 {
        return Err(Error::Usage(format!("N-party teleport basis needs N >= 3, got {n}")));
    }
    let pis = [pi_state(false), pi_state(true)];
    let elements = (0..1usize << n)
        .map(|x| {
            let signs = x >> 2;
            let mut state = pis[(signs >> (n - 3)) & 1].clone();
            for k in (0..n - 3).rev() {
                state = state.tensor(&pis[(signs >> k) & 1])?;
            }
            state.tensor(&bell_state(x & 3))
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectiveBasis::new(format!("pi-bell({n})"), elements)
}

/// Operators `(B, C)` encoding a 3-bit message `m1 m2 m3` on qubits 2 and 3
/// of the GHZ channel: `B = σx^m1 σz^m2`, `C = σx^m3`.
pub fn ghz_dense_operators(message: BitString) -> Result<(QubitOperator, QubitOperator)> {
    if message.len() != 3 {
        return Err(Error::Usage(format!("GHZ dense coding takes 3 bits, got {message}")));
    }
    let b = match (message.bit(1), message.bit(2)) {
        (0, 0) => Pauli::I,
        (1, 0) => Pauli::X,
        (0, _) => Pauli::Z,
        _ => Pauli::MinusIY,
    };
    let cp = if message.bit(3) == 1 { Pauli::X } else { Pauli::I };
    Ok((pauli_on(b, 2)?, pauli_on(cp, 3)?))
}

/// GHZ-class index of the state encoding `message`: `m2 m1 m3`.
pub fn ghz_dense_index(message: BitString) -> usize {
    let bits = message.bits();
    ((bits[1] as usize) << 2) | ((bits[0] as usize) << 1) | bits[2] as usize
}

/// Inverse of [`ghz_dense_index`].
pub fn ghz_dense_message(index: usize) -> BitString {
    let swapped = ((index & 0b010) << 1) | ((index & 0b100) >> 1) | (index & 1);
    BitString::new(swapped, 3).expect("3 bits")
}

/// `D_x = (1 ⊗ B_x ⊗ C_x)|GHZ⟩`.
pub fn ghz_dense_state(message: BitString) -> Result<StateVector> {
    let (b, cx) = ghz_dense_operators(message)?;
    cx.apply(&b.apply(&StateVector::ghz(3)?)?)
}

/// `H_C C_BC` on `(A, B, C) = (1, 2, 3)`. It maps every `D_x` to
/// `Bell_AB ⊗ π±_C`.
pub fn dense_to_teleport_converter() -> Result<QubitOperator> {
    Ok(compose(&[hadamard(2)?, cnot(1, 2)?], 2)?
        .on(&[2, 3])?
        .with_label("H_C C_BC"))
}

/// Register order under which a converted state is an element of
/// [`teleport_basis_ghz`]: the `π` qubit first, then the Bell pair.
pub const CONVERTED_ORDER: [usize; 3] = [3, 1, 2];

/// `H_C C_BC D_x`.
pub fn convert_dense_to_teleport(message: BitString) -> Result<StateVector> {
    dense_to_teleport_converter()?.apply(&ghz_dense_state(message)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::embed;

    fn bits(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn bitstring_layout() {
        let b = bits("101");
        assert_eq!(b.value(), 5);
        assert_eq!(b.bits(), vec![1, 0, 1]);
        assert_eq!(b.to_string(), "101");
        assert_eq!(BitString::new(2, 3).unwrap().to_string(), "010");
        assert!(BitString::new(8, 3).is_err());
        assert!(BitString::parse("10a").is_err());
        assert_eq!(BitString::all(2).count(), 4);
    }

    #[test]
    fn bell_table() {
        let h = FRAC_1_SQRT_2;
        let basis = bell_basis();
        assert_eq!(basis.element(0), &StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap());
        assert_eq!(basis.element(2), &StateVector::from_real(&[h, 0.0, 0.0, -h]).unwrap());
        assert!(basis.completeness_residual() < 1e-15);
        let omega = bell_state(0);
        for x in 0..4 {
            let u = pauli_on(bell_operator(x), 2).unwrap();
            let out = u.apply(&omega).unwrap();
            assert!(out.max_abs_diff(basis.element(x)).unwrap() < 1e-15, "x = {x}");
        }
        // same order as the two-qubit GHZ-class set
        let lex = ghz_class_basis(2).unwrap();
        for x in 0..4 {
            assert!(lex.element(x).max_abs_diff(basis.element(x)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn ghz_class_three_qubits() {
        let basis = ghz_class_basis(3).unwrap();
        assert_eq!(basis.element(0), &StateVector::ghz(3).unwrap());
        // x = 101: (|001⟩ − |110⟩)/√2
        let e = basis.element(0b101);
        assert!((e.amplitude(0b001).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e.amplitude(0b110).re + FRAC_1_SQRT_2).abs() < 1e-15);
        let r = basis.residuals();
        assert!(r.orthonormality < 1e-15 && r.completeness < 1e-15);
        assert!(ghz_class_basis(1).is_err());
        assert!(ghz_class_basis(13).is_err());
    }

    #[test]
    fn generating_operator_reproduces_basis() {
        for n in 2..=5 {
            let omega = StateVector::ghz(n).unwrap();
            let basis = ghz_class_basis(n).unwrap();
            for b in BitString::all(n) {
                let u = generating_operator(b).unwrap();
                assert_eq!(u.arity(), n - 1);
                let out = u.apply(&omega).unwrap();
                assert!(out.max_abs_diff(basis.element(b.value())).unwrap() < 1e-12, "{b}");
            }
        }
        let u = generating_operator(bits("10")).unwrap();
        assert_eq!(u.matrix(), &Pauli::Z.matrix());
    }

    #[test]
    fn teleport_basis_rows() {
        let basis = teleport_basis_ghz();
        let expect0 = pi_state(false).tensor(&bell_state(0)).unwrap();
        let expect7 = pi_state(true).tensor(&bell_state(3)).unwrap();
        assert_eq!(basis.element(0), &expect0);
        assert_eq!(basis.element(7), &expect7);
        let r = basis.residuals();
        assert!(r.orthonormality < 1e-15 && r.completeness < 1e-15);
    }

    #[test]
    fn nparty_basis_matches_three_qubit_case() {
        let np = nparty_teleport_basis(3).unwrap();
        let ghz = teleport_basis_ghz();
        for x in 0..8 {
            let (psi, s, bs) = (x >> 2, (x >> 1) & 1, x & 1);
            let y = (s << 2) | (2 * bs + psi);
            assert_eq!(ghz.element(x), np.element(y));
        }
        assert!(nparty_teleport_basis(2).is_err());
        let b5 = nparty_teleport_basis(5).unwrap();
        assert!(b5.completeness_residual() < 1e-14);
    }

    #[test]
    fn dense_table_rows() {
        // 101 -> (σx, σx) -> (|011⟩ + |100⟩)/√2
        let d = ghz_dense_state(bits("101")).unwrap();
        assert!((d.amplitude(0b011).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d.amplitude(0b100).re - FRAC_1_SQRT_2).abs() < 1e-15);
        // 010 -> (σz, 1) -> (|000⟩ − |111⟩)/√2
        let d = ghz_dense_state(bits("010")).unwrap();
        assert!((d.amplitude(0b111).re + FRAC_1_SQRT_2).abs() < 1e-15);
        let basis = ghz_class_basis(3).unwrap();
        for m in BitString::all(3) {
            let d = ghz_dense_state(m).unwrap();
            let idx = ghz_dense_index(m);
            assert!(d.fidelity(basis.element(idx)).unwrap() > 1.0 - 1e-12);
            assert_eq!(ghz_dense_message(idx), m);
        }
    }

    #[test]
    fn converter_lands_in_teleport_basis() {
        let target = teleport_basis_ghz();
        let conv = dense_to_teleport_converter().unwrap();
        for m in BitString::all(3) {
            let image = convert_dense_to_teleport(m).unwrap().permute(&CONVERTED_ORDER).unwrap();
            let hits = target
                .elements()
                .iter()
                .filter(|e| e.fidelity(&image).unwrap() > 1.0 - 1e-12)
                .count();
            assert_eq!(hits, 1, "{m}");
            let back = conv.adjoint().apply(&convert_dense_to_teleport(m).unwrap()).unwrap();
            assert!(back.max_abs_diff(&ghz_dense_state(m).unwrap()).unwrap() < 1e-12);
        }
        let id = embed(&pauli_on(Pauli::I, 1).unwrap(), 3).unwrap();
        assert!(id.max_abs_diff(&compose(&[conv.adjoint(), conv.clone()], 3).unwrap()).unwrap() < 1e-12);
        let reference = compose(&[hadamard(3).unwrap(), cnot(2, 3).unwrap()], 3).unwrap();
        assert!(reference.max_abs_diff(&embed(&conv, 3).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn incomplete_element_list_is_flagged() {
        let mut elems: Vec<StateVector> = bell_basis().elements().to_vec();
        elems[3] = bell_state(0);
        let basis = ProjectiveBasis::new("dup", elems).unwrap();
        assert!(basis.orthonormality_residual() > 0.9);
        assert!(basis.completeness_residual() > 0.4);
        assert!(ProjectiveBasis::new("short", vec![bell_state(0)]).is_err());
    }
}

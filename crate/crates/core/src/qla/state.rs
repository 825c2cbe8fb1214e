use std::fmt;

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{
    complement, is_finite, DensityMatrix, TargetLayout, C64, MAX_STATE_QUBITS, TOL,
    ZERO_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::json::ComplexPairs;

/// A normalized pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

/// Outcome of projecting part of a register onto a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    pub residual: Residual,
}

/// Post-measurement state of the unmeasured qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    State(StateVector),
    /// Every qubit was measured.
    Empty,
    /// The projection had probability below the zero cutoff.
    Undefined,
}

impl Residual {
    pub fn state(&self) -> Option<&StateVector> {
        match self {
            Residual::State(s) => Some(s),
            _ => None,
        }
    }
}

fn num_qubits_for(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            requested: n,
            cap: MAX_STATE_QUBITS,
        });
    }
    Ok(n)
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = num_qubits_for(amps.len())?;
        if !amps.iter().all(|&a| is_finite(a)) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm} differs from 1"
            )));
        }
        Ok(Self { num_qubits, amps })
    }

    /// Builds a state, rescaling the amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = num_qubits_for(amps.len())?;
        if !amps.iter().all(|&a| is_finite(a)) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            num_qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Usage("a register needs at least one qubit".into()));
        }
        if num_qubits > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: num_qubits,
                cap: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Usage(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`, the GHZ-class reference state.
    pub fn ghz(num_qubits: usize) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::Usage("GHZ state needs at least one qubit".into()));
        }
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut s = Self::basis(num_qubits, 0)?;
        let last = s.amps.len() - 1;
        s.amps[0] = h;
        s.amps[last] = h;
        Ok(s)
    }

    /// `α|0…0⟩ + β|1…1⟩`, normalized.
    pub fn superpose_extremes(num_qubits: usize, alpha: C64, beta: C64) -> Result<Self> {
        let mut s = Self::basis(num_qubits, 0)?;
        let last = s.amps.len() - 1;
        s.amps[0] = alpha;
        s.amps[last] = beta;
        Self::normalized(s.amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n,
                cap: MAX_STATE_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Largest amplitude difference after removing the relative global phase.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 1e-300 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise amplitude difference, phase included.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self)
    }

    /// Reduced density matrix of `keep`, computed without forming the full
    /// `2^N x 2^N` outer product.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::Usage("partial trace needs a nonempty keep set".into()));
        }
        let kept = TargetLayout::new(keep, self.num_qubits)?;
        let traced = complement(keep, self.num_qubits);
        let env = TargetLayout::new(&traced, self.num_qubits)?;
        let k = 1usize << keep.len();
        let mut m = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
        for e in 0..1usize << traced.len() {
            let base = env.scatter(0, e);
            for i in 0..k {
                let ai = self.amps[kept.scatter(base, i)];
                if ai == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..k {
                    m[(i, j)] += ai * self.amps[kept.scatter(base, j)].conj();
                }
            }
        }
        DensityMatrix::from_matrix_trusted(m)
    }

    /// Projects `on_qubits` onto `projector_state`.
    ///
    /// The residual keeps the unmeasured qubits in their original relative
    /// order and is renormalized.
    pub fn project(&self, projector_state: &StateVector, on_qubits: &[usize]) -> Result<Projection> {
        if projector_state.num_qubits != on_qubits.len() {
            return Err(Error::DimensionMismatch {
                expected: on_qubits.len(),
                actual: projector_state.num_qubits,
            });
        }
        let measured = TargetLayout::new(on_qubits, self.num_qubits)?;
        let rest = complement(on_qubits, self.num_qubits);
        if rest.is_empty() {
            let overlap: C64 = self
                .amps
                .iter()
                .enumerate()
                .map(|(idx, &a)| projector_state.amps[measured.gather(idx)].conj() * a)
                .sum();
            return Ok(Projection {
                probability: overlap.norm_sqr().min(1.0),
                residual: Residual::Empty,
            });
        }
        let rest_layout = TargetLayout::new(&rest, self.num_qubits)?;
        let mut residual = vec![C64::new(0.0, 0.0); 1 << rest.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let p = projector_state.amps[measured.gather(idx)];
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            residual[rest_layout.gather(idx)] += p.conj() * a;
        }
        let probability: f64 = residual.iter().map(|a| a.norm_sqr()).sum();
        if probability < ZERO_PROBABILITY {
            return Ok(Projection {
                probability,
                residual: Residual::Undefined,
            });
        }
        let norm = probability.sqrt();
        let amps = residual.into_iter().map(|a| a / norm).collect();
        Ok(Projection {
            probability: probability.min(1.0),
            residual: Residual::State(StateVector {
                num_qubits: rest.len(),
                amps,
            }),
        })
    }

    /// Reorders qubits: qubit `i` of the result is qubit `order[i-1]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: order.len(),
            });
        }
        let layout = TargetLayout::new(order, self.num_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); self.dim()];
        for (idx, &a) in self.amps.iter().enumerate() {
            amps[layout.gather(idx)] = a;
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }

    /// Multiplies every amplitude by `factor` (a unit-modulus phase).
    pub fn with_phase(&self, factor: C64) -> Result<StateVector> {
        StateVector::new(self.amps.iter().map(|a| a * factor).collect())
    }

    pub(crate) fn apply_local(&self, matrix: &DMatrix<C64>, targets: &[usize]) -> Result<StateVector> {
        let layout = TargetLayout::new(targets, self.num_qubits)?;
        if matrix.nrows() != 1 << targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                actual: matrix.nrows(),
            });
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps: layout.apply(matrix, &self.amps),
        })
    }

    /// Indices of the nonzero amplitudes.
    pub fn support(&self) -> Vec<usize> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

fn format_coefficient(a: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-5 { 0.0 } else { x };
    let (re, im) = (clean(a.re), clean(a.im));
    if im == 0.0 {
        format!("{re:.4}")
    } else if re == 0.0 {
        format!("{im:.4}i")
    } else {
        format!("({re:.4}{im:+.4}i)")
    }
}

/// Ket notation, e.g. `0.7071|000⟩ + 0.7071|111⟩`.
impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            let coeff = format_coefficient(*a);
            let ket = format!("|{:0width$b}⟩", idx, width = self.num_qubits);
            if first {
                write!(f, "{coeff}{ket}")?;
                first = false;
            } else if let Some(stripped) = coeff.strip_prefix('-') {
                write!(f, " - {stripped}{ket}")?;
            } else {
                write!(f, " + {coeff}{ket}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("StateVector", 2)?;
        s.serialize_field("num_qubits", &self.num_qubits)?;
        s.serialize_field("amplitudes", &ComplexPairs(&self.amps))?;
        s.end()
    }
}

use nalgebra::DMatrix;

use super::{check_qubits, C64};
use crate::error::Result;

/// Maps between a full register index and the local index of an ordered
/// subset of its qubits. The first listed qubit is the most significant bit
/// of the local index.
#[derive(Debug, Clone)]
pub struct TargetLayout {
    num_qubits: usize,
    shifts: Vec<usize>,
    mask: usize,
}

impl TargetLayout {
    pub fn new(targets: &[usize], num_qubits: usize) -> Result<Self> {
        check_qubits(targets, num_qubits)?;
        let shifts: Vec<usize> = targets.iter().map(|&q| num_qubits - q).collect();
        let mask = shifts.iter().fold(0, |m, &s| m | (1 << s));
        Ok(Self {
            num_qubits,
            shifts,
            mask,
        })
    }

    pub fn arity(&self) -> usize {
        self.shifts.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gather(&self, full: usize) -> usize {
        self.shifts
            .iter()
            .fold(0, |acc, &s| (acc << 1) | ((full >> s) & 1))
    }

    pub fn scatter(&self, base: usize, local: usize) -> usize {
        let m = self.shifts.len();
        let mut full = base & !self.mask;
        for (i, &s) in self.shifts.iter().enumerate() {
            let bit = (local >> (m - 1 - i)) & 1;
            full |= bit << s;
        }
        full
    }

    /// All register indices whose target bits are zero.
    pub fn bases(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.num_qubits).filter(move |i| i & self.mask == 0)
    }

    /// Applies a `2^m x 2^m` matrix to the targets of a full amplitude vector.
    pub fn apply(&self, matrix: &DMatrix<C64>, amps: &[C64]) -> Vec<C64> {
        let local_dim = 1 << self.arity();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        let mut scratch = vec![C64::new(0.0, 0.0); local_dim];
        for base in self.bases() {
            for (l, slot) in scratch.iter_mut().enumerate() {
                *slot = amps[self.scatter(base, l)];
            }
            for (l, &a) in scratch.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (r, &m) in matrix.column(l).iter().enumerate() {
                    out[self.scatter(base, r)] += m * a;
                }
            }
        }
        out
    }

    /// The full `2^N x 2^N` matrix acting as `matrix` on the targets and as
    /// identity elsewhere.
    pub fn embed(&self, matrix: &DMatrix<C64>) -> DMatrix<C64> {
        let dim = 1 << self.num_qubits;
        let local_dim = 1 << self.arity();
        let mut full = DMatrix::zeros(dim, dim);
        for base in self.bases() {
            for lc in 0..local_dim {
                let col = self.scatter(base, lc);
                for lr in 0..local_dim {
                    full[(self.scatter(base, lr), col)] = matrix[(lr, lc)];
                }
            }
        }
        full
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_scatter_roundtrip() {
        let layout = TargetLayout::new(&[3, 1], 4).unwrap();
        // |b1 b2 b3 b4⟩ = |1 0 0 1⟩ -> local (b3, b1) = (0, 1)
        assert_eq!(layout.gather(0b1001), 0b01);
        assert_eq!(layout.scatter(0b0001, 0b01), 0b1001);
        assert_eq!(layout.scatter(0b0001, 0b10), 0b0011);
        assert_eq!(layout.bases().count(), 4);
    }

    #[test]
    fn rejects_duplicates_and_range() {
        assert!(TargetLayout::new(&[1, 1], 2).is_err());
        assert!(TargetLayout::new(&[3], 2).is_err());
        assert!(TargetLayout::new(&[0], 2).is_err());
    }
}

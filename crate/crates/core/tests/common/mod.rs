//! Reference arithmetic on plain amplitude vectors, independent of the library.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qchannel::qla::StateVector;

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn re(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn kron(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// `⟨p| ⊗ 1` applied to `psi`, with `p` on the leading qubits.
pub fn contract_leading(p: &[C], psi: &[C]) -> Vec<C> {
    let rest = psi.len() / p.len();
    (0..rest)
        .map(|j| p.iter().enumerate().map(|(i, pi)| pi.conj() * psi[i * rest + j]).sum())
        .collect()
}

pub fn norm_sqr(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn normalize(v: &[C]) -> Vec<C> {
    let n = norm_sqr(v).sqrt();
    v.iter().map(|z| z / n).collect()
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|⟨a|b⟩|²` for normalized inputs.
pub fn overlap(a: &[C], b: &[C]) -> f64 {
    inner(a, b).norm_sqr()
}

/// Largest entrywise gap after aligning `b` to the phase of `a`.
pub fn phase_gap(a: &[C], b: &[C]) -> f64 {
    let ip = inner(b, a);
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { re(1.0) };
    a.iter().zip(b).map(|(x, y)| (x - y * phase).norm()).fold(0.0, f64::max)
}

pub fn amps(s: &StateVector) -> Vec<C> {
    s.amplitudes().to_vec()
}

pub fn basis_vec(n: usize, index: usize) -> Vec<C> {
    let mut v = vec![re(0.0); 1 << n];
    v[index] = re(1.0);
    v
}

/// `(|b⟩ + sign |b̄⟩)/√2` on `n` qubits.
pub fn ghz_pair(n: usize, b: usize, sign: f64) -> Vec<C> {
    let mut v = vec![re(0.0); 1 << n];
    let mask = (1 << n) - 1;
    v[b] += re(H);
    v[!b & mask] += re(sign * H);
    v
}

/// Bell states in the order Φ⁺, Ψ⁺, Φ⁻, Ψ⁻.
pub fn bell(x: usize) -> Vec<C> {
    match x {
        0 => ghz_pair(2, 0b00, 1.0),
        1 => ghz_pair(2, 0b01, 1.0),
        2 => ghz_pair(2, 0b00, -1.0),
        _ => ghz_pair(2, 0b01, -1.0),
    }
}

pub fn pi(minus: bool) -> Vec<C> {
    vec![re(H), re(if minus { -H } else { H })]
}

/// Entropy in bits of a Hermitian 2×2 matrix `[[a, b], [b*, d]]`.
pub fn qubit_entropy(a: f64, b: C, d: f64) -> f64 {
    let mean = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    [mean + r, mean - r]
        .into_iter()
        .filter(|&l| l > 1e-15)
        .map(|l| -l * l.log2())
        .sum()
}

/// Reduced density matrix of one qubit (1-based, MSB first) as `(ρ00, ρ01, ρ11)`.
pub fn single_qubit_reduction(psi: &[C], n: usize, q: usize) -> (f64, C, f64) {
    let bit = 1 << (n - q);
    let (mut a, mut b, mut d) = (0.0, re(0.0), 0.0);
    for i in 0..psi.len() {
        if i & bit == 0 {
            a += psi[i].norm_sqr();
            b += psi[i] * psi[i | bit].conj();
        } else {
            d += psi[i].norm_sqr();
        }
    }
    (a, b, d)
}

pub fn h2(p: f64) -> f64 {
    [p, 1.0 - p].into_iter().filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

//! Reference computations written independently of the library internals:
//! explicit index loops, a plain trapezoid quadrature and nalgebra's own
//! Hermitian eigensolver.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;

/// `E[exp(-i (φ_B u + φ_L v))]` for independent zero-mean Gaussians, by
/// trapezoid quadrature on ±10σ.
pub fn gaussian_phase_average(u: f64, v: f64, sb: f64, sl: f64) -> Complex64 {
    fn avg(k: f64, s: f64) -> Complex64 {
        if s == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let n = 4001;
        let h = 20.0 * s / (n - 1) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let x = -10.0 * s + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let pdf = (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
            acc += Complex64::from_polar(w * pdf * h, -k * x);
        }
        acc
    }
    avg(u, sb) * avg(v, sl)
}

/// CJ state (factor order `S1 S1' S2 S2'`, unit trace) of two-qubit Gaussian
/// phase noise where basis state `|z1 z2>` (z = ±1) picks up the phase
/// `φ_B (a z1 + b z2) + φ_L z2`.
pub fn dephasing_cj(a: f64, b: f64, sb: f64, sl: f64) -> M {
    let z = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
    let mut cj = M::zeros(16, 16);
    for s1 in 0..2 {
        for s2 in 0..2 {
            for t1 in 0..2 {
                for t2 in 0..2 {
                    let u = a * (z(s1) - z(t1)) + b * (z(s2) - z(t2));
                    let v = z(s2) - z(t2);
                    let row = s1 * 8 + s1 * 4 + s2 * 2 + s2;
                    let col = t1 * 8 + t1 * 4 + t2 * 2 + t2;
                    cj[(row, col)] = gaussian_phase_average(u, v, sb, sl) * 0.25;
                }
            }
        }
    }
    cj
}

/// Partial trace keeping the listed qubits of an `n`-qubit matrix.
pub fn keep_qubits(m: &M, n: usize, keep: &[usize]) -> M {
    let k = keep.len();
    let mut out = M::zeros(1 << k, 1 << k);
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    for i in 0..(1usize << n) {
        for j in 0..(1usize << n) {
            let traced_equal = (0..n).filter(|q| !keep.contains(q)).all(|q| bit(i, q) == bit(j, q));
            if !traced_equal {
                continue;
            }
            let r = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
            let c = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(j, q));
            out[(r, c)] += m[(i, j)];
        }
    }
    out
}

pub fn entropy_bits(m: &M) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Normalized total correlations of a qubit-party CJ state (`S1 S1' S2 S2' ...`).
pub fn ibar_of_cj(cj: &M, m: usize) -> f64 {
    let n = 2 * m;
    let marginals: f64 = (0..m).map(|i| entropy_bits(&keep_qubits(cj, n, &[2 * i, 2 * i + 1]))).sum();
    (marginals - entropy_bits(cj)) / (2.0 * m as f64)
}

pub fn trace_norm(m: &M) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum()
}

//! Random states, unitaries, channels and observables for property checks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::QuantumChannel;
use crate::linalg::{c64, hermitian_map, CMatrix, DensityMatrix, Observable};

/// RNG stream `stream` derived from `seed`; independent of scheduling order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Matrix of iid standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary via QR with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1., 0.) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random full-rank density matrix `G G† / Tr(G G†)` (Hilbert–Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let n: usize = dims.iter().product();
    random_density_rank(dims, n, rng)
}

pub fn random_density_rank<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = ginibre(n, rank.max(1), rng);
    DensityMatrix::from_psd_unnormalized(dims.to_vec(), &g * g.adjoint())
}

pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    random_density_rank(dims, 1, rng)
}

/// Random CPTP map with `rank` Kraus operators, from a random isometry.
pub fn random_channel<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> QuantumChannel {
    let n: usize = dims.iter().product();
    let rank = rank.max(1);
    let g = ginibre(n * rank, n, rng);
    // V = G (G†G)^{-1/2} is an isometry, so its n×n blocks are a Kraus set.
    let inv_sqrt = hermitian_map(&(g.adjoint() * &g), |v| 1.0 / v.sqrt())
        .expect("Gram matrix eigendecomposition");
    let v = g * inv_sqrt;
    let kraus = (0..rank)
        .map(|k| v.rows(k * n, n).into_owned())
        .collect();
    QuantumChannel::new(dims.to_vec(), kraus).expect("isometry blocks are trace preserving")
}

pub fn random_unitary_channel<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> QuantumChannel {
    let n: usize = dims.iter().product();
    QuantumChannel::unitary(dims.to_vec(), random_unitary(n, rng)).expect("unitary")
}

/// Random Hermitian observable on a `d`-dimensional space.
pub fn random_observable<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Observable {
    let g = ginibre(d, d, rng);
    Observable::new(vec![d], (&g + g.adjoint()).scale(0.5)).expect("hermitian by construction")
}

//! Noise processes: Gaussian random-phase dephasing from a shared magnetic
//! field (plus an optional laser phase on one qubit), and independent
//! spontaneous decay sampled as quantum-jump trajectories.
//!
//! For a single realization the register picks up the diagonal unitary
//! `U = exp(-i φ_B Σ_i s_i σ_i^z) · exp(-i φ_L σ_L^z)` where `s_i` is the
//! susceptibility of qubit `i` and `L` the laser-addressed qubit. Averaging
//! over Gaussian phases multiplies the coherence `ρ_xy` by
//! `exp(-½ σ_B² (Σ_i s_i Δz_i)² - ½ σ_L² Δz_L²)` with `Δz_i = z_i(x) - z_i(y)`.

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{PauliOpBasis, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{c64, identity, kron_all, CMatrix, CVector, DensityMatrix};
use crate::random::stream_rng;

/// Trajectories per reduction chunk. Fixed so sums are bit-stable.
const CHUNK: usize = 64;

/// Nodes per phase variable in the Gauss–Hermite evaluation of the process matrix.
pub const QUADRATURE_NODES: usize = 64;

/// `z_i(x)`: `+1` if qubit `i` of basis index `x` is `|0>`, else `-1`.
#[inline]
fn z_value(x: usize, qubit: usize, n: usize) -> f64 {
    if (x >> (n - 1 - qubit)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Gaussian phase noise on an `n`-qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseModel {
    /// Width (radians) of the shared magnetic phase `φ_B`.
    pub sigma_b: f64,
    /// Width (radians) of the laser phase `φ_L`.
    pub sigma_l: f64,
    /// Per-qubit susceptibility coefficients.
    pub suscept: Vec<f64>,
    /// Qubit that sees the laser phase.
    pub laser_qubit: usize,
}

impl PhaseNoiseModel {
    pub fn new(sigma_b: f64, sigma_l: f64, suscept: Vec<f64>) -> Result<Self> {
        if suscept.is_empty() {
            return Err(Error::InvalidParameter("no qubits".into()));
        }
        if !(sigma_b >= 0.0 && sigma_l >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phase widths must be nonnegative (sigma_b={sigma_b}, sigma_l={sigma_l})"
            )));
        }
        let laser_qubit = suscept.len() - 1;
        Ok(Self {
            sigma_b,
            sigma_l,
            suscept,
            laser_qubit,
        })
    }

    /// The two-qubit model with coefficients `a`, `b`; the laser addresses qubit 2.
    pub fn two_qubit(a: f64, b: f64, sigma_b: f64, sigma_l: f64) -> Result<Self> {
        Self::new(sigma_b, sigma_l, vec![a, b])
    }

    /// Model after waiting time `t`, given the coherence time `tau` of qubit 0.
    ///
    /// The single-qubit coherence `exp(-2 s_0² σ_B²)` decays as `exp(-t/tau)`,
    /// so `σ_B(t) = sqrt(t / (2 tau)) / |s_0|`.
    pub fn at_time(suscept: Vec<f64>, sigma_l: f64, t: f64, tau: f64) -> Result<Self> {
        if tau.is_nan() || tau <= 0.0 || t < 0.0 {
            return Err(Error::InvalidParameter(format!("t={t}, tau={tau}")));
        }
        let s0 = suscept
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidParameter("no qubits".into()))?;
        if s0 == 0.0 {
            return Err(Error::InvalidParameter(
                "reference qubit has zero susceptibility".into(),
            ));
        }
        Self::new(sigma_b_at(t, tau, s0), sigma_l, suscept)
    }

    pub fn n_qubits(&self) -> usize {
        self.suscept.len()
    }

    fn field_weight(&self, x: usize) -> f64 {
        let n = self.n_qubits();
        self.suscept
            .iter()
            .enumerate()
            .map(|(i, s)| s * z_value(x, i, n))
            .sum()
    }

    fn laser_weight(&self, x: usize) -> f64 {
        z_value(x, self.laser_qubit, self.n_qubits())
    }

    /// Exact Gaussian average of `exp(-i(θ_x - θ_y))` for all basis pairs.
    pub fn coherence_matrix(&self) -> CMatrix {
        let dim = 1 << self.n_qubits();
        CMatrix::from_fn(dim, dim, |x, y| {
            let db = self.field_weight(x) - self.field_weight(y);
            let dl = self.laser_weight(x) - self.laser_weight(y);
            let e = -0.5 * (db * db * self.sigma_b * self.sigma_b + dl * dl * self.sigma_l * self.sigma_l);
            c64(e.exp(), 0.0)
        })
    }

    fn phases(&self, phi_b: f64, phi_l: f64) -> CVector {
        let dim = 1 << self.n_qubits();
        CVector::from_fn(dim, |x, _| {
            let theta = phi_b * self.field_weight(x) + phi_l * self.laser_weight(x);
            c64(theta.cos(), -theta.sin())
        })
    }
}

/// `σ_B` after waiting `t` for a qubit with coefficient `s` and coherence time `tau`.
pub fn sigma_b_at(t: f64, tau: f64, s: f64) -> f64 {
    (t / (2.0 * tau)).sqrt() / s.abs()
}

/// Decay factors of the two-qubit CJ-state coherences.
///
/// Basis labels `1, 2` map to `|0>, |1>`; `a1112` is the coherence between
/// `|00>` and `|01>` (qubit 2 flipped), `a1121` flips qubit 1, `a1122` pairs
/// `|00>` with `|11>` and `a1221` pairs `|01>` with `|10>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaCoefficients {
    pub a1112: f64,
    pub a1121: f64,
    pub a1122: f64,
    pub a1221: f64,
}

impl AlphaCoefficients {
    pub fn from_model(model: &PhaseNoiseModel) -> Result<Self> {
        require_two_qubits(model)?;
        let (a, b) = (model.suscept[0], model.suscept[1]);
        let sb2 = model.sigma_b * model.sigma_b;
        let sl2 = model.sigma_l * model.sigma_l;
        Ok(Self {
            a1112: (-2.0 * (b * b * sb2 + sl2)).exp(),
            a1121: (-2.0 * a * a * sb2).exp(),
            a1122: (-2.0 * ((a + b).powi(2) * sb2 + sl2)).exp(),
            a1221: (-2.0 * ((a - b).powi(2) * sb2 + sl2)).exp(),
        })
    }

    /// Coherence multipliers on `|00>, |01>, |10>, |11>`.
    pub fn matrix(&self) -> CMatrix {
        let r = |v: f64| c64(v, 0.0);
        let one = r(1.0);
        CMatrix::from_row_slice(
            4,
            4,
            &[
                one, r(self.a1112), r(self.a1121), r(self.a1122),
                r(self.a1112), one, r(self.a1221), r(self.a1121),
                r(self.a1121), r(self.a1221), one, r(self.a1112),
                r(self.a1122), r(self.a1121), r(self.a1112), one,
            ],
        )
    }

    /// Recovers the coefficients from a process matrix in the `1, Z⊗1, 1⊗Z, Z⊗Z` basis.
    pub fn from_chi(chi: &CMatrix) -> Self {
        let g = |a: usize, b: usize| chi[(a, b)].re;
        Self {
            a1112: g(0, 0) + g(1, 1) - g(2, 2) - g(3, 3),
            a1121: g(0, 0) - g(1, 1) + g(2, 2) - g(3, 3),
            a1122: g(0, 0) + 2.0 * g(0, 3) - g(1, 1) - 2.0 * g(1, 2) - g(2, 2) + g(3, 3),
            a1221: g(0, 0) - 2.0 * g(0, 3) - g(1, 1) + 2.0 * g(1, 2) - g(2, 2) + g(3, 3),
        }
    }
}

fn require_two_qubits(model: &PhaseNoiseModel) -> Result<()> {
    if model.n_qubits() != 2 {
        return Err(Error::InvalidParameter(format!(
            "closed-form dephasing is defined for 2 qubits, got {}",
            model.n_qubits()
        )));
    }
    Ok(())
}

/// Process matrix in [`PauliOpBasis::z_dephasing`] from a coherence multiplier:
/// `chi_ab = D^-2 Σ_xy g_a(x) M_xy g_b(y)`.
fn chi_from_multiplier(m: &CMatrix, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let g = |alpha: usize, x: usize| -> f64 {
        (0..n)
            .filter(|i| alpha >> i & 1 == 1)
            .map(|i| z_value(x, i, n))
            .product()
    };
    let norm = 1.0 / (dim * dim) as f64;
    CMatrix::from_fn(dim, dim, |a, b| {
        let mut acc = c64(0.0, 0.0);
        for x in 0..dim {
            for y in 0..dim {
                acc += m[(x, y)] * (g(a, x) * g(b, y));
            }
        }
        acc * norm
    })
}

/// Closed-form process matrix of the two-qubit Gaussian dephasing channel.
pub fn chi_closed_form(model: &PhaseNoiseModel) -> Result<CMatrix> {
    let alpha = AlphaCoefficients::from_model(model)?;
    Ok(chi_from_multiplier(&alpha.matrix(), 2))
}

/// The two-qubit dephasing channel built from the closed-form coefficients.
pub fn analytic_dephasing_channel(model: &PhaseNoiseModel) -> Result<QuantumChannel> {
    let chi = chi_closed_form(model)?;
    QuantumChannel::from_chi(&chi, &PauliOpBasis::z_dephasing(2))
}

/// Exact Gaussian-averaged dephasing on any number of qubits, as a mixture of
/// diagonal unitaries.
pub fn gaussian_dephasing_channel(model: &PhaseNoiseModel) -> Result<QuantumChannel> {
    QuantumChannel::schur_multiplier(vec![2; model.n_qubits()], &model.coherence_matrix())
}

/// Gauss–Hermite nodes and weights for `∫ e^{-x²} f(x) dx` (Golub–Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Expectation nodes for a centred Gaussian of width `sigma`: `(points, probabilities)`.
fn gaussian_nodes(sigma: f64, n: usize) -> Vec<(f64, f64)> {
    if sigma == 0.0 {
        return vec![(0.0, 1.0)];
    }
    let (x, w) = gauss_hermite(n);
    let norm = 1.0 / std::f64::consts::PI.sqrt();
    x.iter()
        .zip(w.iter())
        .map(|(&xi, &wi)| (std::f64::consts::SQRT_2 * sigma * xi, wi * norm))
        .collect()
}

/// Process matrix of the two-qubit model by quadrature over both phases,
/// expanding the single-realization unitary as
/// `cos(aφ_B)cos(bφ_B+φ_L) 1 - i sin(aφ_B)cos(..) Z₁ - i cos(aφ_B)sin(..) Z₂ - sin(aφ_B)sin(..) Z₁Z₂`.
pub fn chi_by_quadrature(model: &PhaseNoiseModel, nodes: usize) -> Result<CMatrix> {
    require_two_qubits(model)?;
    let (a, b) = (model.suscept[0], model.suscept[1]);
    let nb = gaussian_nodes(model.sigma_b, nodes);
    let nl = gaussian_nodes(model.sigma_l, nodes);
    let mut chi = CMatrix::zeros(4, 4);
    for &(pb, wb) in &nb {
        for &(pl, wl) in &nl {
            let (s1, c1) = (a * pb).sin_cos();
            let (s2, c2) = (b * pb + pl).sin_cos();
            let coeffs = CVector::from_vec(vec![
                c64(c1 * c2, 0.0),
                c64(0.0, -s1 * c2),
                c64(0.0, -c1 * s2),
                c64(-s1 * s2, 0.0),
            ]);
            chi += (&coeffs * coeffs.adjoint()) * c64(wb * wl, 0.0);
        }
    }
    Ok(chi)
}

/// Sums `n` per-trajectory matrices in fixed chunks, then pairwise in order,
/// so the result does not depend on thread count.
fn deterministic_sum<F>(n: usize, dim: usize, f: F) -> CMatrix
where
    F: Fn(usize) -> CMatrix + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let mut partial: Vec<CMatrix> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).fold(CMatrix::zeros(dim, dim), |acc, i| acc + f(i))
        })
        .collect();
    while partial.len() > 1 {
        partial = partial
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => a + b,
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    partial.pop().unwrap_or_else(|| CMatrix::zeros(dim, dim))
}

/// Empirical coherence multiplier `mean_j u_j u_j†` over `n_traj` phase draws.
pub fn empirical_multiplier(model: &PhaseNoiseModel, n_traj: usize, seed: u64) -> Result<CMatrix> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter("need at least one trajectory".into()));
    }
    let dim = 1 << model.n_qubits();
    let sum = deterministic_sum(n_traj, dim, |j| {
        let mut rng = stream_rng(seed, j as u64);
        let zb: f64 = rng.sample(StandardNormal);
        let zl: f64 = rng.sample(StandardNormal);
        let u = model.phases(model.sigma_b * zb, model.sigma_l * zl);
        &u * u.adjoint()
    });
    Ok(sum.unscale(n_traj as f64))
}

/// Average of `U ρ U†` over `n_traj` random-phase realizations.
pub fn sample_dephasing_trajectories(
    model: &PhaseNoiseModel,
    rho_in: &DensityMatrix,
    n_traj: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    if rho_in.dim() != 1 << model.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit noise model applied to a {}-dimensional state",
            model.n_qubits(),
            rho_in.dim()
        )));
    }
    let m = empirical_multiplier(model, n_traj, seed)?;
    Ok(DensityMatrix::from_raw(
        rho_in.dims().to_vec(),
        m.component_mul(rho_in.matrix()),
    ))
}

/// The random-unitary channel defined by the same `n_traj` draws that
/// [`sample_dephasing_trajectories`] uses for a given seed.
pub fn sample_dephasing_channel(
    model: &PhaseNoiseModel,
    n_traj: usize,
    seed: u64,
) -> Result<QuantumChannel> {
    let m = empirical_multiplier(model, n_traj, seed)?;
    QuantumChannel::schur_multiplier(vec![2; model.n_qubits()], &m)
}

/// Independent spontaneous decay `|0> -> |1>` on selected qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    /// Effective lifetime of the excited level, seconds.
    pub t_spont: f64,
    pub qubits: Vec<usize>,
}

impl DecayModel {
    pub fn new(t_spont: f64, qubits: Vec<usize>) -> Result<Self> {
        if t_spont.is_nan() || t_spont <= 0.0 {
            return Err(Error::InvalidParameter(format!("t_spont must be > 0, got {t_spont}")));
        }
        Ok(Self { t_spont, qubits })
    }

    /// Jump probability after waiting `t`.
    pub fn gamma(&self, t: f64) -> f64 {
        1.0 - (-t / self.t_spont).exp()
    }

    /// Exact channel: amplitude damping on each affected qubit.
    pub fn exact_channel(&self, t: f64, n_qubits: usize) -> Result<QuantumChannel> {
        self.check_qubits(n_qubits)?;
        let damp = QuantumChannel::amplitude_damping(self.gamma(t))?;
        let id = QuantumChannel::identity(vec![2]);
        let per_qubit: Vec<QuantumChannel> = (0..n_qubits)
            .map(|q| if self.qubits.contains(&q) { damp.clone() } else { id.clone() })
            .collect();
        crate::channels::tensor_all(&per_qubit)
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        match self.qubits.iter().find(|&&q| q >= n) {
            Some(&q) => Err(Error::InvalidParameter(format!(
                "decay on qubit {q} of a {n}-qubit register"
            ))),
            None => Ok(()),
        }
    }
}

fn embed(op: &CMatrix, qubit: usize, n: usize) -> CMatrix {
    let id = identity(2);
    let factors: Vec<&CMatrix> = (0..n).map(|q| if q == qubit { op } else { &id }).collect();
    kron_all(factors)
}

/// Quantum-jump unravelling of independent decay.
///
/// In each trajectory every affected qubit either jumps (Kraus `√γ |1><0|`)
/// with probability `γ <0|ρ_q|0>` or evolves with the no-jump operator; the
/// state is renormalized after each branch and the trajectories averaged.
pub fn sample_decay_trajectories(
    model: &DecayModel,
    rho_in: &DensityMatrix,
    t: f64,
    n_traj: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("negative time {t}")));
    }
    if n_traj == 0 {
        return Err(Error::InvalidParameter("need at least one trajectory".into()));
    }
    let n = rho_in.dims().len();
    if rho_in.dims().iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch("decay acts on qubit registers".into()));
    }
    model.check_qubits(n)?;
    let gamma = model.gamma(t);
    let mut k0 = CMatrix::zeros(2, 2);
    k0[(0, 0)] = c64((1.0 - gamma).sqrt(), 0.0);
    k0[(1, 1)] = c64(1.0, 0.0);
    let mut k1 = CMatrix::zeros(2, 2);
    k1[(1, 0)] = c64(gamma.sqrt(), 0.0);
    let ops: Vec<(CMatrix, CMatrix)> = model
        .qubits
        .iter()
        .map(|&q| (embed(&k0, q, n), embed(&k1, q, n)))
        .collect();
    let dim = rho_in.dim();
    let sum = deterministic_sum(n_traj, dim, |j| {
        let mut rng = stream_rng(seed, j as u64);
        let mut rho = rho_in.matrix().clone();
        for (no_jump, jump) in &ops {
            let jumped = jump * &rho * jump.adjoint();
            let p_jump = jumped.trace().re;
            let u: f64 = rng.random();
            rho = if u < p_jump {
                jumped.unscale(p_jump)
            } else {
                let stay = no_jump * &rho * no_jump.adjoint();
                let p = stay.trace().re;
                stay.unscale(p)
            };
        }
        rho
    });
    Ok(DensityMatrix::from_raw(
        rho_in.dims().to_vec(),
        sum.unscale(n_traj as f64),
    ))
}

/// Long-time dephased states of `|+>^{⊗n}` under perfectly (or partly)
/// correlated noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LongTimeConfig {
    /// Two qubits, same encoding.
    Sym2,
    /// Four qubits, same encoding.
    Sym4,
    /// Qubits 1,2 in one encoding and 3,4 in the other.
    Mixed22,
    /// Qubits 1–3 in one encoding and qubit 4 in the other.
    Mixed31,
}

impl std::str::FromStr for LongTimeConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sym2" => Ok(Self::Sym2),
            "sym4" => Ok(Self::Sym4),
            "mixed22" => Ok(Self::Mixed22),
            "mixed31" => Ok(Self::Mixed31),
            _ => Err(Error::UnknownScenario(s.to_string())),
        }
    }
}

impl LongTimeConfig {
    pub fn n_qubits(self) -> usize {
        match self {
            Self::Sym2 => 2,
            _ => 4,
        }
    }
}

/// Normalized equal superposition of the `n`-qubit basis states with `k` ones.
fn dicke(n: usize, k: usize) -> CVector {
    let dim = 1usize << n;
    let mut v = CVector::zeros(dim);
    for x in 0..dim {
        if x.count_ones() as usize == k {
            v[x] = c64(1.0, 0.0);
        }
    }
    let norm = v.norm();
    v.unscale(norm)
}

/// Block-diagonal mixture `Σ_k p_k |D_k><D_k|` of Dicke projectors with the
/// binomial weights of `|+>^{⊗n}`.
fn dephased_dicke_mixture(n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..=n {
        let weight = binomial(n, k) as f64 / dim as f64;
        let d = dicke(n, k);
        m += (&d * d.adjoint()).scale(weight);
    }
    m
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Closed-form long-time state for the given configuration.
pub fn long_time_state(config: LongTimeConfig) -> DensityMatrix {
    match config {
        LongTimeConfig::Sym2 => DensityMatrix::from_raw(vec![2, 2], dephased_dicke_mixture(2)),
        LongTimeConfig::Sym4 => DensityMatrix::from_raw(vec![2; 4], dephased_dicke_mixture(4)),
        LongTimeConfig::Mixed22 => {
            let pair = DensityMatrix::from_raw(vec![2, 2], dephased_dicke_mixture(2));
            pair.tensor(&pair)
        }
        LongTimeConfig::Mixed31 => {
            let triple = DensityMatrix::from_raw(vec![2; 3], dephased_dicke_mixture(3));
            triple.tensor(&DensityMatrix::maximally_mixed(vec![2]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{approx_eq, pauli};

    #[test]
    fn gauss_hermite_integrates_moments() {
        let (x, w) = gauss_hermite(QUADRATURE_NODES);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m0 - sqrt_pi).abs() < 1e-12);
        assert!((m2 - sqrt_pi / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_width_is_identity() {
        let model = PhaseNoiseModel::two_qubit(1.0, 1.0, 0.0, 0.0).unwrap();
        let ch = analytic_dephasing_channel(&model).unwrap();
        let rho = DensityMatrix::plus_state(2);
        assert!(ch.apply(&rho).unwrap().approx_eq(&rho, 1e-12));
        let quad = chi_by_quadrature(&model, QUADRATURE_NODES).unwrap();
        assert!((quad[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_requirement() {
        let model = PhaseNoiseModel::new(1.0, 0.0, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(analytic_dephasing_channel(&model).is_err());
        assert!(AlphaCoefficients::from_model(&model).is_err());
    }

    #[test]
    fn alpha_matrix_matches_general_coherences() {
        let model = PhaseNoiseModel::two_qubit(1.0, -0.83, 0.7, 0.3).unwrap();
        let alpha = AlphaCoefficients::from_model(&model).unwrap().matrix();
        assert!(approx_eq(&alpha, &model.coherence_matrix(), 1e-14));
    }

    #[test]
    fn long_time_sym2_display() {
        let rho = long_time_state(LongTimeConfig::Sym2);
        let s = 1.0 / 2f64.sqrt();
        let psi = CVector::from_vec(vec![c64(0., 0.), c64(s, 0.), c64(s, 0.), c64(0., 0.)]);
        let bell = &psi * psi.adjoint();
        let mut expect = bell.scale(0.5);
        expect[(0, 0)] += c64(0.25, 0.);
        expect[(3, 3)] += c64(0.25, 0.);
        assert!(approx_eq(rho.matrix(), &expect, 1e-15));
        assert!(DensityMatrix::new(rho.dims().to_vec(), rho.matrix().clone()).is_ok());
    }

    #[test]
    fn long_time_sym4_weights() {
        let rho = long_time_state(LongTimeConfig::Sym4);
        let weights: Vec<f64> = (0..=4)
            .map(|k| {
                let d = dicke(4, k);
                (d.adjoint() * rho.matrix() * &d)[(0, 0)].re
            })
            .collect();
        let expect = [1. / 16., 0.25, 0.375, 0.25, 1. / 16.];
        for (w, e) in weights.iter().zip(expect) {
            assert!((w - e).abs() < 1e-14);
        }
        let xxxx = pauli::from_label("XXXX").unwrap();
        assert!((rho.expectation(&xxxx) - 0.375).abs() < 1e-14);
    }

    #[test]
    fn unknown_config_is_an_error() {
        assert!("sym3".parse::<LongTimeConfig>().is_err());
        assert_eq!("mixed31".parse::<LongTimeConfig>().unwrap(), LongTimeConfig::Mixed31);
    }

    #[test]
    fn decay_edge_cases() {
        let model = DecayModel::new(7e-6, vec![0, 1]).unwrap();
        let rho = DensityMatrix::plus_state(2);
        let same = sample_decay_trajectories(&model, &rho, 0.0, 10, 1).unwrap();
        assert!(same.approx_eq(&rho, 1e-12));
        let late = sample_decay_trajectories(&model, &rho, 1.0, 10, 1).unwrap();
        let ground = DensityMatrix::basis_state(vec![2, 2], 3).unwrap();
        assert!(late.approx_eq(&ground, 1e-9));
        assert!(DecayModel::new(0.0, vec![0]).is_err());
        assert!(sample_decay_trajectories(&model, &DensityMatrix::plus_state(1), 1.0, 1, 0).is_err());
    }

    #[test]
    fn single_trajectory_without_noise_is_unchanged() {
        let model = PhaseNoiseModel::two_qubit(1.0, 1.0, 0.0, 0.0).unwrap();
        let rho = DensityMatrix::plus_state(2);
        let out = sample_dephasing_trajectories(&model, &rho, 1, 3).unwrap();
        assert!(out.approx_eq(&rho, 1e-15));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let model = PhaseNoiseModel::new(0.8, 0.2, vec![1.0, -0.83, 1.0]).unwrap();
        let rho = DensityMatrix::plus_state(3);
        let a = sample_dephasing_trajectories(&model, &rho, 300, 9).unwrap();
        let b = sample_dephasing_trajectories(&model, &rho, 300, 9).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = sample_dephasing_trajectories(&model, &rho, 300, 10).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }
}

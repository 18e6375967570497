//! CPTP maps in Kraus, Choi–Jamiołkowski and process-matrix form.
//!
//! The Choi–Jamiołkowski (CJ) state of a channel on parties `S_1..S_M` is
//! `(E ⊗ 1)(|Φ><Φ|)` with `|Φ> = ⊗_i |ψ+>_{S_i S'_i}`, normalized to unit
//! trace and stored with the party-interleaved factor order
//! `S_1 S'_1 S_2 S'_2 ... S_M S'_M`. Reduced states on a single party block
//! `S_i S'_i` are therefore contiguous pairs of factors.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, eigh, identity, kron, max_abs_diff, partial_trace, pauli,
    permute_subsystems, CMatrix, DensityMatrix, EIG_CUTOFF,
};
use crate::measure::PartyStructure;

/// Completeness tolerance for `sum_k K_k† K_k = 1`.
pub const TP_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dims: Vec<usize>,
    kraus: Vec<CMatrix>,
}

fn completeness_deviation(kraus: &[CMatrix], n: usize) -> f64 {
    let sum = kraus
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
    max_abs_diff(&sum, &identity(n))
}

impl QuantumChannel {
    /// Channel from a Kraus set; checks shapes and trace preservation.
    pub fn new(dims: Vec<usize>, kraus: Vec<CMatrix>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("empty Kraus set".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.nrows() != n || k.ncols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, dims {dims:?} need {n}x{n}",
                k.nrows(),
                k.ncols()
            )));
        }
        let dev = completeness_deviation(&kraus, n);
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { dims, kraus })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            kraus: vec![identity(n)],
        }
    }

    pub fn unitary(dims: Vec<usize>, u: CMatrix) -> Result<Self> {
        Self::new(dims, vec![u])
    }

    /// SWAP of two `d`-dimensional subsystems.
    pub fn swap(d: usize) -> Self {
        let mut u = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                u[(j * d + i, i * d + j)] = c64(1., 0.);
            }
        }
        Self {
            dims: vec![d, d],
            kraus: vec![u],
        }
    }

    /// Projective dephasing in the computational basis of a `d`-level system.
    pub fn full_dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|k| {
                let mut p = CMatrix::zeros(d, d);
                p[(k, k)] = c64(1., 0.);
                p
            })
            .collect();
        Self {
            dims: vec![d],
            kraus,
        }
    }

    /// Completely depolarizing channel `rho -> Tr(rho) 1/D`.
    pub fn depolarizing(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let s = 1.0 / (n as f64).sqrt();
        let mut kraus = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut k = CMatrix::zeros(n, n);
                k[(i, j)] = c64(s, 0.);
                kraus.push(k);
            }
        }
        Self { dims, kraus }
    }

    /// Single-qubit amplitude damping from `|0>` (excited) to `|1>` (ground).
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("damping {gamma} not in [0,1]")));
        }
        let mut k0 = CMatrix::zeros(2, 2);
        k0[(0, 0)] = c64((1.0 - gamma).sqrt(), 0.);
        k0[(1, 1)] = c64(1., 0.);
        let mut k1 = CMatrix::zeros(2, 2);
        k1[(1, 0)] = c64(gamma.sqrt(), 0.);
        Ok(Self {
            dims: vec![2],
            kraus: vec![k0, k1],
        })
    }

    /// Channel `rho -> M ∘ rho` (entry-wise product) for a PSD multiplier with
    /// unit diagonal, i.e. a mixture of diagonal unitaries.
    pub fn schur_multiplier(dims: Vec<usize>, multiplier: &CMatrix) -> Result<Self> {
        let n: usize = dims.iter().product();
        if multiplier.nrows() != n || multiplier.ncols() != n {
            return Err(Error::DimensionMismatch("multiplier size".into()));
        }
        let (vals, vecs) = eigh(multiplier)?;
        if vals[0] < -TP_TOL {
            return Err(Error::NegativeEigenvalue(vals[0]));
        }
        let kraus: Vec<CMatrix> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > EIG_CUTOFF)
            .map(|(j, &v)| {
                let col = vecs.column(j).scale(v.sqrt());
                CMatrix::from_diagonal(&DVector::from_iterator(n, col.iter().copied()))
            })
            .collect();
        Self::new(dims, kraus)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(&self.kraus, self.dim())
    }

    /// `E(rho) = sum_k K_k rho K_k†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {} applied to state of dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(DensityMatrix::from_raw(
            rho.dims().to_vec(),
            self.apply_matrix(rho.matrix()),
        ))
    }

    pub(crate) fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let n = self.dim();
        self.kraus
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, k| acc + k * m * k.adjoint())
    }

    /// `a ⊗ b` acting on the concatenated register.
    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| kron(a, b)))
            .collect();
        QuantumChannel { dims, kraus }.compressed()
    }

    /// `outer ∘ inner`: apply `inner` first.
    pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<QuantumChannel> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose channels on dimensions {} and {}",
                outer.dim(),
                inner.dim()
            )));
        }
        let kraus = outer
            .kraus
            .iter()
            .flat_map(|a| inner.kraus.iter().map(move |b| a * b))
            .collect();
        Ok(QuantumChannel {
            dims: inner.dims.clone(),
            kraus,
        }
        .compressed())
    }

    /// Re-derives a minimal Kraus set when the current one exceeds `D²`.
    fn compressed(self) -> QuantumChannel {
        let n = self.dim();
        if self.kraus.len() <= n * n {
            return self;
        }
        let choi = self.choi_matrix_natural();
        match kraus_from_natural_choi(&choi, n) {
            Ok(kraus) => QuantumChannel {
                dims: self.dims,
                kraus,
            },
            Err(_) => self,
        }
    }

    /// Unit-trace Choi matrix in `S ⊗ S'` (system then reference) order.
    pub fn choi_matrix_natural(&self) -> CMatrix {
        let n = self.dim();
        let scale = 1.0 / n as f64;
        let mut choi = CMatrix::zeros(n * n, n * n);
        for k in &self.kraus {
            // vec_k[(s, s')] = K[s, s'] / sqrt(n)
            let v = DVector::from_iterator(
                n * n,
                (0..n).flat_map(|s| (0..n).map(move |sp| (s, sp))).map(|(s, sp)| k[(s, sp)]),
            );
            choi += (&v * v.adjoint()).scale(scale);
        }
        choi
    }

    /// The normalized CJ state ordered `S_1 S'_1 ... S_M S'_M`.
    pub fn choi_state(&self, parties: &PartyStructure) -> Result<DensityMatrix> {
        parties.check_channel_dims(&self.dims)?;
        let natural = self.choi_matrix_natural();
        Ok(DensityMatrix::from_raw(
            parties.cj_dims(),
            interleave(&natural, parties)?,
        ))
    }

    /// Inverse of [`QuantumChannel::choi_state`]: Kraus operators from the
    /// eigendecomposition of the CJ state, dropping eigenvalues below 1e-12.
    pub fn from_choi_state(
        choi: &DensityMatrix,
        parties: &PartyStructure,
        dims: Vec<usize>,
    ) -> Result<Self> {
        parties.check_channel_dims(&dims)?;
        if choi.dims() != parties.cj_dims().as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "CJ state dims {:?} do not match parties {:?}",
                choi.dims(),
                parties.dims()
            )));
        }
        let natural = deinterleave(choi.matrix(), parties)?;
        let n = parties.total_dim();
        Self::new(dims, kraus_from_natural_choi(&natural, n)?)
    }

    /// Channel from a unit-trace Choi matrix in `S ⊗ S'` (system then reference) order.
    pub(crate) fn from_natural_choi(dims: Vec<usize>, choi: &CMatrix) -> Result<Self> {
        let n: usize = dims.iter().product();
        if choi.nrows() != n * n || choi.ncols() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of size {} for channel dimension {n}",
                choi.nrows()
            )));
        }
        Self::new(dims, kraus_from_natural_choi(choi, n)?)
    }

    /// Process matrix `chi` with `E(rho) = sum chi_ab G_a rho G_b`.
    ///
    /// Fails when a Kraus operator is not in the span of the basis.
    pub fn to_chi(&self, basis: &PauliOpBasis) -> Result<CMatrix> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch("basis and channel dimensions".into()));
        }
        let m = basis.len();
        let mut chi = CMatrix::zeros(m, m);
        for k in &self.kraus {
            let coeffs = basis.coefficients(k)?;
            chi += &coeffs * coeffs.adjoint();
        }
        Ok(chi)
    }

    /// Channel from a process matrix. `chi` must be Hermitian, PSD within 1e-9
    /// and satisfy `sum chi_ab G_b G_a = 1`.
    pub fn from_chi(chi: &CMatrix, basis: &PauliOpBasis) -> Result<Self> {
        let m = basis.len();
        if chi.nrows() != m || chi.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "chi is {}x{}, basis has {m} elements",
                chi.nrows(),
                chi.ncols()
            )));
        }
        let dev = max_abs_diff(chi, &chi.adjoint());
        if dev > TP_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let (vals, vecs) = eigh(chi)?;
        if vals[0] < -TP_TOL {
            return Err(Error::ChiNotPositive(vals[0]));
        }
        let n = basis.dim();
        let kraus: Vec<CMatrix> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > EIG_CUTOFF)
            .map(|(j, &v)| {
                let s = v.sqrt();
                basis
                    .elements
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros(n, n), |acc, (a, g)| {
                        acc + g * (vecs[(a, j)] * s)
                    })
            })
            .collect();
        Self::new(vec![2; basis.n], kraus)
    }
}

/// Kraus operators from a unit-trace Choi matrix in `S ⊗ S'` order.
fn kraus_from_natural_choi(choi: &CMatrix, n: usize) -> Result<Vec<CMatrix>> {
    let (vals, vecs) = eigh(choi)?;
    if vals[0] < -TP_TOL {
        return Err(Error::NegativeEigenvalue(vals[0]));
    }
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > EIG_CUTOFF)
        .map(|(j, &v)| {
            let s = (v * n as f64).sqrt();
            CMatrix::from_fn(n, n, |r, c| vecs[(r * n + c, j)] * s)
        })
        .collect())
}

/// Permutation taking `S_1..S_M S'_1..S'_M` to `S_1 S'_1 .. S_M S'_M`.
fn interleave_perm(m: usize) -> Vec<usize> {
    (0..m).flat_map(|i| [i, m + i]).collect()
}

fn natural_dims(parties: &PartyStructure) -> Vec<usize> {
    let mut d = parties.dims().to_vec();
    d.extend_from_slice(parties.dims());
    d
}

fn interleave(natural: &CMatrix, parties: &PartyStructure) -> Result<CMatrix> {
    permute_subsystems(natural, &natural_dims(parties), &interleave_perm(parties.len()))
}

fn deinterleave(cj: &CMatrix, parties: &PartyStructure) -> Result<CMatrix> {
    let m = parties.len();
    let fwd = interleave_perm(m);
    let mut inv = vec![0; 2 * m];
    for (new, &old) in fwd.iter().enumerate() {
        inv[old] = new;
    }
    permute_subsystems(cj, &parties.cj_dims(), &inv)
}

/// Applies a channel given only by its CJ state:
/// `E(rho) = D · Tr_{S'}[(1 ⊗ rho^T) rho_CJ]` in natural order.
pub fn apply_via_choi(
    choi: &DensityMatrix,
    parties: &PartyStructure,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let n = parties.total_dim();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch("state and CJ dimensions".into()));
    }
    let natural = deinterleave(choi.matrix(), parties)?;
    let lifted = kron(&identity(n), &rho.matrix().transpose());
    let prod = (lifted * natural).scale(n as f64);
    let out = partial_trace(&prod, &[n, n], &[0])?;
    Ok(DensityMatrix::from_raw(rho.dims().to_vec(), out))
}

/// Operator basis of `n`-qubit Pauli products.
#[derive(Clone, Debug)]
pub struct PauliOpBasis {
    n: usize,
    labels: Vec<String>,
    elements: Vec<CMatrix>,
}

impl PauliOpBasis {
    /// All `4^n` products of `{1, X, Y, Z}`, qubit 0 varying slowest.
    pub fn full(n: usize) -> Self {
        let mut labels = vec![String::new()];
        for _ in 0..n {
            labels = labels
                .into_iter()
                .flat_map(|l| "IXYZ".chars().map(move |c| format!("{l}{c}")))
                .collect();
        }
        Self::from_labels(n, labels)
    }

    /// The `2^n` products of `{1, Z}` that span diagonal dephasing dynamics.
    ///
    /// Element `a` carries `Z` on qubit `i` iff bit `i` of `a` is set, so for
    /// two qubits the order is `1⊗1, Z⊗1, 1⊗Z, Z⊗Z`.
    pub fn z_dephasing(n: usize) -> Self {
        let labels = (0..1usize << n)
            .map(|a| {
                (0..n)
                    .map(|i| if a >> i & 1 == 1 { 'Z' } else { 'I' })
                    .collect()
            })
            .collect();
        Self::from_labels(n, labels)
    }

    fn from_labels(n: usize, labels: Vec<String>) -> Self {
        let elements = labels
            .iter()
            .map(|l| pauli::from_label(l).expect("valid Pauli label"))
            .collect();
        Self {
            n,
            labels,
            elements,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Expansion coefficients of `op`; errors if `op` is outside the span.
    pub fn coefficients(&self, op: &CMatrix) -> Result<DVector<num_complex::Complex64>> {
        let d = self.dim() as f64;
        let coeffs = DVector::from_iterator(
            self.len(),
            self.elements.iter().map(|g| (g * op).trace() / d),
        );
        let rebuilt = self
            .elements
            .iter()
            .zip(coeffs.iter())
            .fold(CMatrix::zeros(op.nrows(), op.ncols()), |acc, (g, &c)| acc + g * c);
        let residual = max_abs_diff(&rebuilt, op);
        if residual > TP_TOL {
            return Err(Error::InvalidParameter(format!(
                "operator not in the span of the basis (residual {residual:.3e})"
            )));
        }
        Ok(coeffs)
    }

    /// `sum_ab chi_ab G_b G_a`, which equals the identity for trace-preserving chi.
    pub fn completeness(&self, chi: &CMatrix) -> CMatrix {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        for (a, ga) in self.elements.iter().enumerate() {
            for (b, gb) in self.elements.iter().enumerate() {
                acc += (gb * ga) * chi[(a, b)];
            }
        }
        acc
    }
}

/// Tensor product of per-party channels in party order.
pub fn tensor_all(channels: &[QuantumChannel]) -> Result<QuantumChannel> {
    let (first, rest) = channels
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("no channels to tensor".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, c| acc.tensor(c)))
}

use super::{
    approx_eq, c64, eigh, eigvalsh, hermitian_deviation, hermitian_map, kron, operator_norm,
    partial_trace, permute_subsystems, trace_norm, trace_re, CMatrix, CVector, HERMITIAN_TOL,
    NEG_EIG_SLACK, TRACE_TOL,
};
use crate::error::{Error, Result};

fn check_layout(dims: &[usize], mat: &CMatrix) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions must be >= 2, got {dims:?}"
        )));
    }
    let total: usize = dims.iter().product();
    if mat.nrows() != total || mat.ncols() != total {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} imply {total}x{total}, matrix is {}x{}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    Ok(())
}

/// A positive, unit-trace operator on a register of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian within 1e-10, trace 1 within 1e-10 and
    /// minimum eigenvalue at least -1e-9.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        check_layout(&dims, &matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = trace_re(&matrix);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace(tr));
        }
        let min = eigvalsh(&matrix)?[0];
        if min < -NEG_EIG_SLACK {
            return Err(Error::NegativeEigenvalue(min));
        }
        Ok(Self { dims, matrix })
    }

    /// Builds a density matrix from a PSD operator by normalizing its trace and
    /// symmetrizing. Only checks the layout.
    pub(crate) fn from_psd_unnormalized(dims: Vec<usize>, matrix: CMatrix) -> Self {
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        let tr = trace_re(&sym);
        Self {
            dims,
            matrix: sym.unscale(tr),
        }
    }

    pub(crate) fn from_raw(dims: Vec<usize>, matrix: CMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self { dims, matrix }
    }

    pub fn from_pure(dims: Vec<usize>, psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v = psi.unscale(norm);
        let m = &v * v.adjoint();
        check_layout(&dims, &m)?;
        Ok(Self { dims, matrix: m })
    }

    /// `|k><k|` in the computational basis.
    pub fn basis_state(dims: Vec<usize>, k: usize) -> Result<Self> {
        let n: usize = dims.iter().product();
        if k >= n {
            return Err(Error::InvalidParameter(format!("basis index {k} >= {n}")));
        }
        let mut psi = CVector::zeros(n);
        psi[k] = c64(1., 0.);
        Self::from_pure(dims, &psi)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            dims,
            matrix: CMatrix::identity(n, n).unscale(n as f64),
        }
    }

    /// `|+>^{⊗n}` on `n` qubits.
    pub fn plus_state(n: usize) -> Self {
        let dim = 1 << n;
        let amp = 1.0 / (dim as f64).sqrt();
        let psi = CVector::from_element(dim, c64(amp, 0.));
        Self {
            dims: vec![2; n],
            matrix: &psi * psi.adjoint(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    pub fn product<'a, I: IntoIterator<Item = &'a DensityMatrix>>(factors: I) -> Result<Self> {
        let mut it = factors.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        Ok(it.fold(first.clone(), |acc, f| acc.tensor(f)))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mat = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        Ok(DensityMatrix {
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
            matrix: mat,
        })
    }

    pub fn permute(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let matrix = permute_subsystems(&self.matrix, &self.dims, perm)?;
        Ok(DensityMatrix {
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
            matrix,
        })
    }

    /// `Tr(rho A)` (real part; exact for Hermitian `A`).
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        // Tr(rho A) = sum_ij rho_ij A_ji
        let n = self.dim();
        let mut acc = c64(0., 0.);
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc.re
    }

    pub fn conjugate_by(&self, u: &CMatrix) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: u * &self.matrix * u.adjoint(),
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        let sq = hermitian_map(&self.matrix, |v| v.max(0.0).sqrt())?;
        let inner = &sq * &other.matrix * &sq;
        let s: f64 = eigvalsh(&inner)?.iter().map(|v| v.max(0.0).sqrt()).sum();
        Ok(s * s)
    }

    /// `½‖rho − sigma‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        Ok(0.5 * trace_norm(&(&self.matrix - &other.matrix))?)
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.dims == other.dims && approx_eq(&self.matrix, &other.matrix, tol)
    }

    /// Eigendecomposition `(values ascending, vectors)`.
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        eigh(&self.matrix)
    }
}

/// Hermitian operator with its spectral norm cached.
#[derive(Clone, Debug)]
pub struct Observable {
    dims: Vec<usize>,
    matrix: CMatrix,
    op_norm: f64,
}

impl Observable {
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        check_layout(&dims, &matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let op_norm = operator_norm(&matrix)?;
        Ok(Self {
            dims,
            matrix,
            op_norm,
        })
    }

    /// Single- or multi-qubit Pauli product from a label such as `"X"` or `"XZ"`.
    pub fn pauli(label: &str) -> Result<Self> {
        let m = super::pauli::from_label(label)?;
        Ok(Self {
            dims: vec![2; label.chars().count()],
            matrix: m,
            op_norm: 1.0,
        })
    }

    /// Local tensor composition `self ⊗ other`.
    pub fn tensor(&self, other: &Observable) -> Observable {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Observable {
            dims,
            matrix: kron(&self.matrix, &other.matrix),
            op_norm: self.op_norm * other.op_norm,
        }
    }

    pub fn scaled(&self, factor: f64) -> Observable {
        Observable {
            dims: self.dims.clone(),
            matrix: self.matrix.scale(factor),
            op_norm: self.op_norm * factor.abs(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }
}

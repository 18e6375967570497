//! Dense complex linear algebra for multi-qubit operators.
//!
//! Subsystem ordering convention used everywhere in the crate: for a register
//! with dimension list `dims`, `dims[0]` is the leftmost tensor factor, so the
//! basis index of `|x_0 x_1 ... x_{n-1}>` is `sum_i x_i * prod_{j>i} dims[j]`.
//! Computational basis state `|0>` is the `+1` eigenstate of `sigma_z`.

mod entropy;
mod serial;
mod state;

pub use entropy::{mutual_information, relative_entropy, von_neumann_entropy, RelativeEntropy};
pub use serial::MatrixJson;
pub use state::{DensityMatrix, Observable};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this are treated as zero in entropies and support tests.
pub const EIG_CUTOFF: f64 = 1e-12;
/// Negative eigenvalues down to `-NEG_EIG_SLACK` are clamped to zero.
pub const NEG_EIG_SLACK: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a sequence, left to right. An empty sequence gives `[[1]]`.
pub fn kron_all<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Largest absolute entry-wise difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Entry-wise equality within an absolute tolerance. Shapes must agree.
pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_diff(a, b) <= tol
}

pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && hermitian_deviation(a) <= tol
}

pub fn trace_re(a: &CMatrix) -> f64 {
    a.trace().re
}

fn ensure_square(a: &CMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        })
    }
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first.
///
/// Returns eigenvalues in ascending order with the matching eigenvectors as
/// columns.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    ensure_square(a)?;
    let sym = (a + a.adjoint()).scale(0.5);
    let n = sym.nrows();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &CMatrix) -> Result<Vec<f64>> {
    ensure_square(a)?;
    let sym = (a + a.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map<F: Fn(f64) -> f64>(a: &CMatrix, f: F) -> Result<CMatrix> {
    let (vals, vecs) = eigh(a)?;
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    Ok(scaled * vecs.adjoint())
}

/// Trace norm `Tr sqrt(A† A)`, the sum of singular values.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    ensure_square(a)?;
    if is_hermitian(a, HERMITIAN_TOL) {
        return Ok(eigvalsh(a)?.iter().map(|v| v.abs()).sum());
    }
    Ok(a.clone().svd(false, false).singular_values.sum())
}

/// Spectral norm of a Hermitian matrix: largest absolute eigenvalue.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    Ok(eigvalsh(a)?.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Offsets into the full index space for every multi-index over `subset`.
fn subset_offsets(dims: &[usize], strides: &[usize], subset: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &i in subset {
        let mut next = Vec::with_capacity(offsets.len() * dims[i]);
        for &o in &offsets {
            for x in 0..dims[i] {
                next.push(o + x * strides[i]);
            }
        }
        offsets = next;
    }
    offsets
}

fn check_dims(mat: &CMatrix, dims: &[usize]) -> Result<()> {
    ensure_square(mat)?;
    let total: usize = dims.iter().product();
    if total != mat.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} imply size {total}, matrix is {}",
            mat.nrows()
        )));
    }
    Ok(())
}

/// Partial trace keeping the subsystems in `keep` (in original order).
pub fn partial_trace(mat: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(mat, dims)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::SubsystemOutOfRange {
            index: bad,
            count: dims.len(),
        });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let st = strides(dims);
    let ko = subset_offsets(dims, &st, &keep);
    let to = subset_offsets(dims, &st, &traced);
    let n = ko.len();
    Ok(CMatrix::from_fn(n, n, |a, b| {
        to.iter().map(|&t| mat[(ko[a] + t, ko[b] + t)]).sum()
    }))
}

/// Index map for reordering subsystems: new factor `j` is old factor `perm[j]`.
/// Entry `y` of the result is the old basis index corresponding to new index `y`.
pub fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "permutation {perm:?} does not match {} subsystems",
            dims.len()
        )));
    }
    for &p in perm {
        if p >= dims.len() || seen[p] {
            return Err(Error::DimensionMismatch(format!(
                "{perm:?} is not a permutation"
            )));
        }
        seen[p] = true;
    }
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides_in_new_order: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    Ok(subset_offsets(
        &new_dims,
        &old_strides_in_new_order,
        &(0..dims.len()).collect::<Vec<_>>(),
    ))
}

/// Reorders the tensor factors of an operator: new factor `j` is old factor `perm[j]`.
pub fn permute_subsystems(mat: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    check_dims(mat, dims)?;
    let map = permutation_index_map(dims, perm)?;
    let n = map.len();
    Ok(CMatrix::from_fn(n, n, |a, b| mat[(map[a], map[b])]))
}

/// Single-qubit Pauli matrices.
pub mod pauli {
    use super::{c64, CMatrix};
    use crate::error::{Error, Result};

    pub fn i2() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
    }

    pub fn from_char(c: char) -> Result<CMatrix> {
        match c.to_ascii_uppercase() {
            'I' => Ok(i2()),
            'X' => Ok(x()),
            'Y' => Ok(y()),
            'Z' => Ok(z()),
            _ => Err(Error::InvalidLabel(c.to_string())),
        }
    }

    /// Tensor product of Paulis from a label such as `"XZI"`.
    pub fn from_label(label: &str) -> Result<CMatrix> {
        let mats = label.chars().map(from_char).collect::<Result<Vec<_>>>()?;
        Ok(super::kron_all(mats.iter()))
    }
}

use super::{eigh, eigvalsh, DensityMatrix, EIG_CUTOFF, NEG_EIG_SLACK};
use crate::error::{Error, Result};

fn clamp_spectrum(vals: &mut [f64]) -> Result<()> {
    for v in vals.iter_mut() {
        if *v < -NEG_EIG_SLACK {
            return Err(Error::NegativeEigenvalue(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Shannon entropy in bits of a spectrum, with `0 log 0 = 0` below the cutoff.
pub(crate) fn spectrum_entropy(vals: &[f64]) -> f64 {
    vals.iter()
        .filter(|&&p| p > EIG_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy `-Tr rho log2 rho` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut vals = eigvalsh(rho.matrix())?;
    clamp_spectrum(&mut vals)?;
    Ok(spectrum_entropy(&vals))
}

/// Outcome of a relative entropy evaluation.
///
/// When the support of `rho` is not contained in the support of `sigma` the
/// value is `+inf` and `support_violation` is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeEntropy {
    pub value: f64,
    pub support_violation: bool,
}

impl RelativeEntropy {
    pub fn is_finite(&self) -> bool {
        !self.support_violation
    }
}

/// Quantum relative entropy `S(rho || sigma)` in bits.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelativeEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of {}-dim and {}-dim states",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_entropy = -von_neumann_entropy(rho)?;
    let (mut svals, svecs) = eigh(sigma.matrix())?;
    clamp_spectrum(&mut svals)?;
    let mut cross = 0.0;
    for (j, &lam) in svals.iter().enumerate() {
        let v = svecs.column(j);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if lam <= EIG_CUTOFF {
            if weight > EIG_CUTOFF {
                return Ok(RelativeEntropy {
                    value: f64::INFINITY,
                    support_violation: true,
                });
            }
            continue;
        }
        cross += weight * lam.log2();
    }
    Ok(RelativeEntropy {
        value: neg_entropy - cross,
        support_violation: false,
    })
}

/// Mutual information `S(A) + S(B) - S(AB)` in bits across the cut
/// `keep_a | rest`.
pub fn mutual_information(rho: &DensityMatrix, part_a: &[usize]) -> Result<f64> {
    let n = rho.dims().len();
    let part_b: Vec<usize> = (0..n).filter(|i| !part_a.contains(i)).collect();
    let sa = von_neumann_entropy(&rho.partial_trace(part_a)?)?;
    let sb = von_neumann_entropy(&rho.partial_trace(&part_b)?)?;
    Ok(sa + sb - von_neumann_entropy(rho)?)
}

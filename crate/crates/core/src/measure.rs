//! The normalized correlation measure of a channel, computed from the mutual
//! information of its CJ state across the party blocks `S_i S'_i`.

use serde::Serialize;

use crate::channels::{tensor_all, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{relative_entropy, von_neumann_entropy, DensityMatrix};

/// Tolerance used when deciding whether correlations vanish or a law holds.
pub const MEASURE_TOL: f64 = 1e-9;

/// The party decomposition of a register: one dimension per party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartyStructure {
    dims: Vec<usize>,
}

impl PartyStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParties("no parties".into()));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidParties(format!(
                "party dimensions must be >= 2, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// `m` parties of dimension `d` each.
    pub fn uniform(m: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; m])
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// The shared party dimension, if all parties agree.
    pub fn common_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    /// Factor dimensions of the CJ register `S_1 S'_1 ... S_M S'_M`.
    pub fn cj_dims(&self) -> Vec<usize> {
        self.dims.iter().flat_map(|&d| [d, d]).collect()
    }

    /// Checks that consecutive channel subsystems group exactly into parties.
    pub fn check_channel_dims(&self, channel_dims: &[usize]) -> Result<()> {
        let mut it = channel_dims.iter();
        for &pd in &self.dims {
            let mut acc = 1usize;
            while acc < pd {
                match it.next() {
                    Some(&d) => acc *= d,
                    None => break,
                }
            }
            if acc != pd {
                return Err(Error::InvalidParties(format!(
                    "parties {:?} do not match channel dims {channel_dims:?}",
                    self.dims
                )));
            }
        }
        if it.next().is_some() {
            return Err(Error::InvalidParties(format!(
                "parties {:?} do not cover channel dims {channel_dims:?}",
                self.dims
            )));
        }
        Ok(())
    }

    pub(crate) fn uniform_dim_for_measure(&self) -> Result<usize> {
        if self.len() < 2 {
            return Err(Error::InvalidParties(
                "correlations need at least two parties".into(),
            ));
        }
        self.common_dim()
            .ok_or_else(|| Error::UnequalPartyDims(self.dims.clone()))
    }
}

/// Entropic breakdown of the correlation measure. Entropies are in bits.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    /// Raw value of the measure, not clamped.
    pub i_bar: f64,
    /// `S` of each party block `S_i S'_i` of the CJ state.
    pub entropies: Vec<f64>,
    pub joint_entropy: f64,
    /// `2 M log2 d`.
    pub normalization: f64,
}

impl CorrelationReport {
    /// `i_bar` clamped to `[0, 1]` for display.
    pub fn i_bar_clamped(&self) -> f64 {
        self.i_bar.clamp(0.0, 1.0)
    }
}

/// Total normalized correlations of a channel over the given parties.
pub fn measure_ibar(channel: &QuantumChannel, parties: &PartyStructure) -> Result<CorrelationReport> {
    parties.uniform_dim_for_measure()?;
    let cj = channel.choi_state(parties)?;
    ibar_from_choi(&cj, parties)
}

/// Same as [`measure_ibar`] for a channel available only as its CJ state
/// (party-interleaved, unit trace).
pub fn ibar_from_choi(cj: &DensityMatrix, parties: &PartyStructure) -> Result<CorrelationReport> {
    let d = parties.uniform_dim_for_measure()?;
    if cj.dims() != parties.cj_dims().as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "CJ state dims {:?} do not match parties {:?}",
            cj.dims(),
            parties.dims()
        )));
    }
    let m = parties.len();
    let entropies = (0..m)
        .map(|i| von_neumann_entropy(&cj.partial_trace(&[2 * i, 2 * i + 1])?))
        .collect::<Result<Vec<_>>>()?;
    let joint_entropy = von_neumann_entropy(cj)?;
    let normalization = 2.0 * m as f64 * (d as f64).log2();
    let i_bar = (entropies.iter().sum::<f64>() - joint_entropy) / normalization;
    Ok(CorrelationReport {
        i_bar,
        entropies,
        joint_entropy,
        normalization,
    })
}

/// The measure written as a relative entropy between the CJ state and the
/// product of its party marginals. Returns `+inf` on a support violation.
pub fn ibar_relative_entropy_form(channel: &QuantumChannel, parties: &PartyStructure) -> Result<f64> {
    let d = parties.uniform_dim_for_measure()?;
    let cj = channel.choi_state(parties)?;
    let m = parties.len();
    let marginals = (0..m)
        .map(|i| cj.partial_trace(&[2 * i, 2 * i + 1]))
        .collect::<Result<Vec<_>>>()?;
    let product = DensityMatrix::product(&marginals)?;
    let rel = relative_entropy(&cj, &product)?;
    Ok(rel.value / (2.0 * m as f64 * (d as f64).log2()))
}

/// Result of composing a channel with local maps before and after.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FundamentalLawCheck {
    pub before: f64,
    pub after: f64,
    pub holds: bool,
}

/// Evaluates the measure of `channel` and of
/// `(⊗ post_i) ∘ channel ∘ (⊗ pre_i)`; the law holds when it did not increase.
///
/// `locals[i] = (pre_i, post_i)` acts on party `i` only.
pub fn check_fundamental_law(
    channel: &QuantumChannel,
    locals: &[(QuantumChannel, QuantumChannel)],
    parties: &PartyStructure,
) -> Result<FundamentalLawCheck> {
    if locals.len() != parties.len() {
        return Err(Error::InvalidParties(format!(
            "{} local map pairs for {} parties",
            locals.len(),
            parties.len()
        )));
    }
    for ((pre, post), &d) in locals.iter().zip(parties.dims()) {
        if pre.dim() != d || post.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "local maps must act on a single party of dimension {d}"
            )));
        }
    }
    let pre: Vec<QuantumChannel> = locals.iter().map(|(p, _)| p.clone()).collect();
    let post: Vec<QuantumChannel> = locals.iter().map(|(_, p)| p.clone()).collect();
    let pre = tensor_all(&pre)?;
    let post = tensor_all(&post)?;
    let composed = QuantumChannel::compose(&post, &QuantumChannel::compose(channel, &pre)?)?;
    let before = measure_ibar(channel, parties)?.i_bar;
    let after = measure_ibar(&regroup(composed, channel.dims()), parties)?.i_bar;
    Ok(FundamentalLawCheck {
        before,
        after,
        holds: after <= before + MEASURE_TOL,
    })
}

fn regroup(channel: QuantumChannel, dims: &[usize]) -> QuantumChannel {
    QuantumChannel::new(dims.to_vec(), channel.kraus().to_vec())
        .unwrap_or(channel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn party_structure_validation() {
        assert!(PartyStructure::new(vec![]).is_err());
        assert!(PartyStructure::new(vec![2, 1]).is_err());
        let p = PartyStructure::uniform(2, 4).unwrap();
        assert!(p.check_channel_dims(&[2, 2, 2, 2]).is_ok());
        assert!(p.check_channel_dims(&[4, 4]).is_ok());
        assert!(p.check_channel_dims(&[2, 2, 2]).is_err());
        assert!(p.check_channel_dims(&[8, 2]).is_err());
        assert_eq!(p.cj_dims(), vec![4, 4, 4, 4]);
    }

    #[test]
    fn identity_has_no_correlations() {
        let p = PartyStructure::uniform(2, 2).unwrap();
        let r = measure_ibar(&QuantumChannel::identity(vec![2, 2]), &p).unwrap();
        assert!(r.i_bar.abs() < 1e-9);
        assert_eq!(r.entropies.len(), 2);
        assert!((r.normalization - 4.0).abs() < 1e-15);
    }

    #[test]
    fn swap_is_maximally_correlated() {
        let p = PartyStructure::uniform(2, 2).unwrap();
        let r = measure_ibar(&QuantumChannel::swap(2), &p).unwrap();
        assert!((r.i_bar - 1.0).abs() < 1e-9);
        assert!((r.entropies[0] - 2.0).abs() < 1e-9);
        assert!(r.joint_entropy.abs() < 1e-9);
    }

    #[test]
    fn unequal_parties_are_rejected() {
        let p = PartyStructure::new(vec![2, 4]).unwrap();
        let ch = QuantumChannel::identity(vec![2, 4]);
        assert!(matches!(measure_ibar(&ch, &p), Err(Error::UnequalPartyDims(_))));
        // the CJ state itself is still well defined
        assert!(ch.choi_state(&p).is_ok());
    }

    #[test]
    fn identity_locals_leave_measure_unchanged() {
        let p = PartyStructure::uniform(2, 2).unwrap();
        let id = QuantumChannel::identity(vec![2]);
        let locals = vec![(id.clone(), id.clone()), (id.clone(), id)];
        let chk = check_fundamental_law(&QuantumChannel::swap(2), &locals, &p).unwrap();
        assert!((chk.after - chk.before).abs() < 1e-12);
        assert!(chk.holds);
    }
}

//! Lower bounds on the correlation measure from product-state preparation and
//! local observables: `Ī ≥ C² / (4 M ln d Π‖X_i‖²)` with the connected
//! correlator `C = ⟨X_1 ⊗ … ⊗ X_M⟩ - Π ⟨X_i⟩` of the evolved state.

use rand_distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{kron_all, relative_entropy, trace_norm, DensityMatrix, Observable};
use crate::measure::{measure_ibar, PartyStructure};
use crate::random::stream_rng;
use crate::tomography::{Basis, MeasurementRecord};

/// Connected correlator and the resulting bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelatorResult {
    pub joint: f64,
    pub singles: Vec<f64>,
    pub c: f64,
    pub lower_bound: f64,
    /// Present when estimated from finite shots.
    pub std_err: Option<f64>,
}

/// `4 M ln d Π‖X_i‖²`.
fn bound_denominator(m: usize, d: usize, norms: &[f64]) -> f64 {
    4.0 * m as f64 * (d as f64).ln() * norms.iter().map(|n| n * n).product::<f64>()
}

/// Subsystem indices of `dims` belonging to each party (consecutive grouping).
pub(crate) fn party_groups(parties: &PartyStructure, dims: &[usize]) -> Result<Vec<Vec<usize>>> {
    parties.check_channel_dims(dims)?;
    let mut groups = Vec::with_capacity(parties.len());
    let mut next = 0;
    for &pd in parties.dims() {
        let mut acc = 1;
        let mut g = Vec::new();
        while acc < pd {
            acc *= dims[next];
            g.push(next);
            next += 1;
        }
        groups.push(g);
    }
    Ok(groups)
}

fn check_observables(obs: &[Observable], parties: &PartyStructure) -> Result<()> {
    if obs.len() != parties.len() {
        return Err(Error::InvalidParties(format!(
            "{} observables for {} parties",
            obs.len(),
            parties.len()
        )));
    }
    for (i, (o, &d)) in obs.iter().zip(parties.dims()).enumerate() {
        if o.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "observable {i} has dimension {}, party has {d}",
                o.dim()
            )));
        }
    }
    Ok(())
}

/// Exact joint and single expectations. `lower_bound` is filled in only when
/// the parties admit the bound (equal dimensions, nonzero norms), else 0.
pub fn connected_correlator(
    rho: &DensityMatrix,
    obs: &[Observable],
    parties: &PartyStructure,
) -> Result<CorrelatorResult> {
    check_observables(obs, parties)?;
    let groups = party_groups(parties, rho.dims())?;
    let joint = rho.expectation(&kron_all(obs.iter().map(|o| o.matrix())));
    let singles = groups
        .iter()
        .zip(obs)
        .map(|(g, o)| Ok(rho.partial_trace(g)?.expectation(o.matrix())))
        .collect::<Result<Vec<f64>>>()?;
    let c = joint - singles.iter().product::<f64>();
    let norms: Vec<f64> = obs.iter().map(|o| o.op_norm()).collect();
    let lower_bound = match parties.uniform_dim_for_measure() {
        Ok(d) if norms.iter().all(|&n| n > 0.0) => c * c / bound_denominator(parties.len(), d, &norms),
        _ => 0.0,
    };
    Ok(CorrelatorResult {
        joint,
        singles,
        c,
        lower_bound,
        std_err: None,
    })
}

/// Bound from an exact output state.
pub fn lower_bound_from_state(
    rho: &DensityMatrix,
    obs: &[Observable],
    parties: &PartyStructure,
) -> Result<CorrelatorResult> {
    if obs.iter().any(|o| o.op_norm() == 0.0) {
        return Err(Error::ZeroNormObservable);
    }
    parties.uniform_dim_for_measure()?;
    connected_correlator(rho, obs, parties)
}

/// Two-party bound between qubits `i` and `j` of a qubit register, with all
/// other qubits traced out.
pub fn pairwise_lower_bound(
    rho: &DensityMatrix,
    i: usize,
    j: usize,
    obs_i: &Observable,
    obs_j: &Observable,
) -> Result<CorrelatorResult> {
    if i == j {
        return Err(Error::InvalidParties("pair needs two distinct qubits".into()));
    }
    let (lo, hi, a, b) = if i < j { (i, j, obs_i, obs_j) } else { (j, i, obs_j, obs_i) };
    let reduced = rho.partial_trace(&[lo, hi])?;
    let parties = PartyStructure::new(reduced.dims().to_vec())?;
    lower_bound_from_state(&reduced, &[a.clone(), b.clone()], &parties)
}

/// The Pauli pair with the largest two-qubit bound (a convenience scan over
/// the nine `σ_a ⊗ σ_b`, not an optimizer over all observables).
pub fn best_pauli_pair(rho: &DensityMatrix, i: usize, j: usize) -> Result<(String, CorrelatorResult)> {
    let mut best: Option<(String, CorrelatorResult)> = None;
    for a in ["X", "Y", "Z"] {
        for b in ["X", "Y", "Z"] {
            let r = pairwise_lower_bound(rho, i, j, &Observable::pauli(a)?, &Observable::pauli(b)?)?;
            if best.as_ref().is_none_or(|(_, r0)| r.lower_bound > r0.lower_bound) {
                best = Some((format!("{a}{b}"), r));
            }
        }
    }
    Ok(best.expect("nine candidates"))
}

/// How the statistical error of a counts-based estimate is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorMethod {
    /// First-order propagation of the multinomial covariance.
    Delta,
    /// Standard deviation over parametric multinomial resamples.
    Bootstrap { resamples: usize, seed: u64 },
}

impl ErrorMethod {
    pub fn bootstrap(seed: u64) -> Self {
        Self::Bootstrap {
            resamples: 1000,
            seed,
        }
    }
}

/// Per-party Pauli labels resolved to qubits of the record.
struct CountsPlan {
    /// For each kept party, the qubit positions carrying a non-identity Pauli.
    supports: Vec<Vec<usize>>,
    /// Qubits whose basis is fixed by some label (with the required basis).
    fixed: Vec<(usize, Basis)>,
    d: usize,
}

fn plan_counts(record: &MeasurementRecord, labels: &[&str], parties: &PartyStructure) -> Result<CountsPlan> {
    if labels.len() != parties.len() {
        return Err(Error::InvalidParties(format!(
            "{} labels for {} parties",
            labels.len(),
            parties.len()
        )));
    }
    let total: usize = labels.iter().map(|l| l.chars().count()).sum();
    if total != record.n {
        return Err(Error::DimensionMismatch(format!(
            "labels cover {total} qubits, record has {}",
            record.n
        )));
    }
    let mut supports = Vec::new();
    let mut fixed = Vec::new();
    let mut kept_dims = Vec::new();
    let mut q = 0;
    for (label, &pd) in labels.iter().zip(parties.dims()) {
        let len = label.chars().count();
        if 1usize << len != pd {
            return Err(Error::DimensionMismatch(format!(
                "label {label:?} does not fit a party of dimension {pd}"
            )));
        }
        let mut support = Vec::new();
        for c in label.chars() {
            match c.to_ascii_uppercase() {
                'I' => {}
                other => {
                    fixed.push((q, Basis::from_char(other)?));
                    support.push(q);
                }
            }
            q += 1;
        }
        if !support.is_empty() {
            supports.push(support);
            kept_dims.push(pd);
        }
    }
    let kept = PartyStructure::new(kept_dims)?;
    let d = kept.uniform_dim_for_measure()?;
    Ok(CountsPlan { supports, fixed, d })
}

/// Outcome counts pooled over every setting whose bases agree with the
/// labels, marginalized onto the labelled qubits. Discarded qubits may have
/// been measured in any basis.
fn pooled_counts(record: &MeasurementRecord, plan: &CountsPlan, labels: &[&str]) -> Result<(Vec<usize>, Vec<f64>, u64)> {
    let qubits: Vec<usize> = plan.fixed.iter().map(|&(q, _)| q).collect();
    let n = record.n;
    let mut pooled = vec![0u64; 1 << qubits.len()];
    let mut total = 0;
    for (s, counts) in record.settings.iter().zip(&record.counts) {
        if plan.fixed.iter().all(|&(q, b)| s.bases[q] == b) {
            for (k, &c) in counts.iter().enumerate() {
                let sub = qubits
                    .iter()
                    .fold(0usize, |acc, &q| (acc << 1) | ((k >> (n - 1 - q)) & 1));
                pooled[sub] += c;
            }
            total += counts.iter().sum::<u64>();
        }
    }
    if total == 0 {
        return Err(Error::MissingSetting(labels.join(",")));
    }
    let freqs = pooled.iter().map(|&c| c as f64 / total as f64).collect();
    Ok((qubits, freqs, total))
}

/// `(joint value, party values)` of outcome `k` over the pooled qubits.
fn outcome_values(k: usize, qubits: &[usize], supports: &[Vec<usize>]) -> (f64, Vec<f64>) {
    let m = qubits.len();
    let sign = |q: usize| {
        let pos = qubits.iter().position(|&x| x == q).expect("pooled qubit");
        if (k >> (m - 1 - pos)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let parts: Vec<f64> = supports
        .iter()
        .map(|s| s.iter().map(|&q| sign(q)).product())
        .collect();
    (parts.iter().product(), parts)
}

fn estimate(freqs: &[f64], values: &[(f64, Vec<f64>)]) -> (f64, Vec<f64>, f64) {
    let m = values[0].1.len();
    let joint: f64 = freqs.iter().zip(values).map(|(p, v)| p * v.0).sum();
    let singles: Vec<f64> = (0..m)
        .map(|i| freqs.iter().zip(values).map(|(p, v)| p * v.1[i]).sum())
        .collect();
    let c = joint - singles.iter().product::<f64>();
    (joint, singles, c)
}

/// Plug-in estimate of the bound from measured counts.
///
/// `labels[i]` is a Pauli string for party `i` (one letter per qubit, `I`
/// for an unmeasured qubit). Parties labelled entirely with `I` are
/// discarded, so `["X", "I", "X", "I"]` on four qubits bounds the pair (1, 3)
/// with `M = 2`.
pub fn lower_bound_from_counts(
    record: &MeasurementRecord,
    labels: &[&str],
    parties: &PartyStructure,
    method: ErrorMethod,
) -> Result<CorrelatorResult> {
    record.validate()?;
    let plan = plan_counts(record, labels, parties)?;
    let (qubits, freqs, shots) = pooled_counts(record, &plan, labels)?;
    let values: Vec<(f64, Vec<f64>)> = (0..freqs.len())
        .map(|k| outcome_values(k, &qubits, &plan.supports))
        .collect();
    let (joint, singles, c) = estimate(&freqs, &values);
    let m = plan.supports.len();
    let denom = bound_denominator(m, plan.d, &vec![1.0; m]);
    let lower_bound = c * c / denom;
    let std_err = match method {
        ErrorMethod::Delta => {
            // dc/dp_k = J_k - Σ_i s_ik Π_{j≠i} s_j
            let grad: Vec<f64> = values
                .iter()
                .map(|(jk, sk)| {
                    let mut g = *jk;
                    for i in 0..m {
                        let others: f64 = (0..m).filter(|&j| j != i).map(|j| singles[j]).product();
                        g -= sk[i] * others;
                    }
                    g
                })
                .collect();
            let mean: f64 = freqs.iter().zip(&grad).map(|(p, g)| p * g).sum();
            let second: f64 = freqs.iter().zip(&grad).map(|(p, g)| p * g * g).sum();
            let var_c = ((second - mean * mean) / shots as f64).max(0.0);
            2.0 * c.abs() * var_c.sqrt() / denom
        }
        ErrorMethod::Bootstrap { resamples, seed } => {
            let samples: Vec<f64> = (0..resamples)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(seed, r as u64);
                    let draw = resample(shots, &freqs, &mut rng);
                    let (_, _, cb) = estimate(&draw, &values);
                    cb * cb / denom
                })
                .collect();
            let n = samples.len().max(2) as f64;
            let mean = samples.iter().sum::<f64>() / samples.len().max(1) as f64;
            (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        }
    };
    Ok(CorrelatorResult {
        joint,
        singles,
        c,
        lower_bound,
        std_err: Some(std_err),
    })
}

fn resample<R: rand::Rng + ?Sized>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<f64> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        let draw = if i + 1 == probs.len() {
            left
        } else if left == 0 || mass <= 0.0 {
            0
        } else {
            rand_distr::Binomial::new(left, (p / mass).clamp(0.0, 1.0))
                .expect("valid probability")
                .sample(rng)
        };
        out.push(draw as f64 / shots as f64);
        left -= draw;
        mass -= p;
    }
    out
}

/// Every step between the measure and the observable bound, evaluated for one
/// channel, product input and set of local observables. Each entry should
/// not exceed the one before it.
#[derive(Clone, Debug, Serialize)]
pub struct BoundChain {
    pub ibar: f64,
    /// `S(ρ' ‖ ⊗ρ'_i) / (2 M log₂ d)`.
    pub relative_entropy_term: f64,
    /// `‖ρ' - ⊗ρ'_i‖₁² / (4 M ln d)`.
    pub trace_norm_term: f64,
    /// `C² / (4 M ln d Π‖X_i‖²)`.
    pub observable_term: f64,
}

impl BoundChain {
    /// Whether each link holds within `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.relative_entropy_term <= self.ibar + tol
            && self.trace_norm_term <= self.relative_entropy_term + tol
            && self.observable_term <= self.trace_norm_term + tol
    }
}

pub fn bound_chain(
    channel: &QuantumChannel,
    inputs: &[DensityMatrix],
    obs: &[Observable],
    parties: &PartyStructure,
) -> Result<BoundChain> {
    let d = parties.uniform_dim_for_measure()?;
    let m = parties.len();
    let rho_in = DensityMatrix::product(inputs)?;
    let rho = channel.apply(&rho_in)?;
    let groups = party_groups(parties, rho.dims())?;
    let marginals = groups
        .iter()
        .map(|g| rho.partial_trace(g))
        .collect::<Result<Vec<_>>>()?;
    let product = DensityMatrix::product(&marginals)?;
    let rel = relative_entropy(&rho, &product)?;
    let dist = trace_norm(&(rho.matrix() - product.matrix()))?;
    Ok(BoundChain {
        ibar: measure_ibar(channel, parties)?.i_bar,
        relative_entropy_term: rel.value / (2.0 * m as f64 * (d as f64).log2()),
        trace_norm_term: dist * dist / (4.0 * m as f64 * (d as f64).ln()),
        observable_term: lower_bound_from_state(&rho, obs, parties)?.lower_bound,
    })
}

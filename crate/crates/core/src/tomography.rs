//! Tomographic measurement settings, finite-shot record simulation and
//! iterative maximum-likelihood reconstruction of states and processes.
//!
//! Conventions: a setting measures every qubit in the eigenbasis of `X`, `Y`
//! or `Z` (equivalently, rotate by `H` or `H S†` and read out in the
//! computational basis). Outcome bit `0` is the `+1` eigenvalue, and outcome
//! index `k` stores qubit 0 in its most significant bit.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{c64, identity, kron, partial_trace, CMatrix, CVector, DensityMatrix};
use crate::random::stream_rng;

/// Default shots per setting.
pub const DEFAULT_SHOTS: u64 = 100;

/// Local measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'X' => Ok(Self::X),
            'Y' => Ok(Self::Y),
            'Z' => Ok(Self::Z),
            _ => Err(Error::InvalidLabel(c.to_string())),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    /// Eigenvector for outcome bit `bit` (`0` = eigenvalue `+1`).
    pub fn eigenvector(self, bit: usize) -> CVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        let v = match self {
            Self::Z if bit == 0 => [c64(1.0, 0.0), c64(0.0, 0.0)],
            Self::Z => [c64(0.0, 0.0), c64(1.0, 0.0)],
            Self::X => [c64(s, 0.0), c64(sign * s, 0.0)],
            Self::Y => [c64(s, 0.0), c64(0.0, sign * s)],
        };
        CVector::from_column_slice(&v)
    }
}

/// Single-qubit preparation for process tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InputState {
    /// `|0>`
    Zero,
    /// `|1>`
    One,
    /// `|+>`
    Plus,
    /// `|+i>`
    PlusI,
}

impl InputState {
    pub const ALL: [InputState; 4] = [Self::Zero, Self::One, Self::Plus, Self::PlusI];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Self::Zero),
            '1' => Ok(Self::One),
            '+' => Ok(Self::Plus),
            'i' | 'I' => Ok(Self::PlusI),
            _ => Err(Error::InvalidLabel(c.to_string())),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::Zero => '0',
            Self::One => '1',
            Self::Plus => '+',
            Self::PlusI => 'i',
        }
    }

    pub fn vector(self) -> CVector {
        match self {
            Self::Zero => Basis::Z.eigenvector(0),
            Self::One => Basis::Z.eigenvector(1),
            Self::Plus => Basis::X.eigenvector(0),
            Self::PlusI => Basis::Y.eigenvector(0),
        }
    }
}

/// One measurement configuration: optional product input and a basis per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SettingJson", into = "SettingJson")]
pub struct MeasurementSetting {
    pub input: Option<Vec<InputState>>,
    pub bases: Vec<Basis>,
}

#[derive(Serialize, Deserialize)]
struct SettingJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    bases: String,
}

impl TryFrom<SettingJson> for MeasurementSetting {
    type Error = Error;

    fn try_from(j: SettingJson) -> Result<Self> {
        let bases = parse_bases(&j.bases)?;
        let input = j.input.as_deref().map(parse_inputs).transpose()?;
        Self::new(input, bases)
    }
}

impl From<MeasurementSetting> for SettingJson {
    fn from(s: MeasurementSetting) -> Self {
        SettingJson {
            input: s
                .input
                .as_ref()
                .map(|v| v.iter().map(|i| i.as_char()).collect()),
            bases: s.bases.iter().map(|b| b.as_char()).collect(),
        }
    }
}

/// Parses a basis string such as `"XZY"`.
pub fn parse_bases(s: &str) -> Result<Vec<Basis>> {
    s.chars().map(Basis::from_char).collect()
}

/// Parses an input string such as `"0+i1"`.
pub fn parse_inputs(s: &str) -> Result<Vec<InputState>> {
    s.chars().map(InputState::from_char).collect()
}

impl MeasurementSetting {
    pub fn new(input: Option<Vec<InputState>>, bases: Vec<Basis>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::InvalidLabel("empty basis string".into()));
        }
        if let Some(inp) = &input {
            if inp.len() != bases.len() {
                return Err(Error::InvalidLabel(format!(
                    "{} inputs for {} measured qubits",
                    inp.len(),
                    bases.len()
                )));
            }
        }
        Ok(Self { input, bases })
    }

    /// State-tomography setting with no preparation label.
    pub fn state(bases: Vec<Basis>) -> Self {
        Self { input: None, bases }
    }

    pub fn n_qubits(&self) -> usize {
        self.bases.len()
    }

    pub fn bases_label(&self) -> String {
        self.bases.iter().map(|b| b.as_char()).collect()
    }

    /// Product eigenvector for outcome `k`.
    pub fn outcome_vector(&self, k: usize) -> CVector {
        let n = self.n_qubits();
        self.bases
            .iter()
            .enumerate()
            .map(|(q, b)| b.eigenvector((k >> (n - 1 - q)) & 1))
            .reduce(|a, b| kron_vec(&a, &b))
            .expect("nonempty")
    }

    /// Product input state vector, if any.
    pub fn input_vector(&self) -> Option<CVector> {
        self.input.as_ref().map(|inp| {
            inp.iter()
                .map(|i| i.vector())
                .reduce(|a, b| kron_vec(&a, &b))
                .expect("nonempty")
        })
    }

    fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            input: self
                .input
                .as_ref()
                .map(|v| perm.iter().map(|&q| v[q]).collect()),
            bases: perm.iter().map(|&q| self.bases[q]).collect(),
        }
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(inp) = &self.input {
            let s: String = inp.iter().map(|i| i.as_char()).collect();
            write!(f, "{s}|")?;
        }
        write!(f, "{}", self.bases_label())
    }
}

fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// All `3^n` Pauli basis settings, qubit 0 varying slowest.
pub fn state_tomography_settings(n: usize) -> Vec<MeasurementSetting> {
    basis_strings(n).into_iter().map(MeasurementSetting::state).collect()
}

/// All `4^n × 3^n = 12^n` input/basis combinations, inputs outermost.
pub fn process_tomography_settings(n: usize) -> Vec<MeasurementSetting> {
    let bases = basis_strings(n);
    let inputs = product_strings(n, &InputState::ALL);
    inputs
        .iter()
        .flat_map(|inp| {
            bases.iter().map(move |b| MeasurementSetting {
                input: Some(inp.clone()),
                bases: b.clone(),
            })
        })
        .collect()
}

fn basis_strings(n: usize) -> Vec<Vec<Basis>> {
    product_strings(n, &Basis::ALL)
}

fn product_strings<T: Copy>(n: usize, alphabet: &[T]) -> Vec<Vec<T>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |&a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect()
    })
}

/// Finite-shot outcome histograms for a list of settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub n: usize,
    pub settings: Vec<MeasurementSetting>,
    pub counts: Vec<Vec<u64>>,
    pub shots: Vec<u64>,
    pub seed: u64,
}

impl MeasurementRecord {
    /// Checks shapes and that every histogram sums to its shot count.
    pub fn validate(&self) -> Result<()> {
        let k = 1usize << self.n;
        if self.settings.len() != self.counts.len() || self.settings.len() != self.shots.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} settings, {} histograms, {} shot counts",
                self.settings.len(),
                self.counts.len(),
                self.shots.len()
            )));
        }
        for ((s, c), &shots) in self.settings.iter().zip(&self.counts).zip(&self.shots) {
            if s.n_qubits() != self.n || c.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "setting {s} does not match a {}-qubit record",
                    self.n
                )));
            }
            let total: u64 = c.iter().sum();
            if total != shots || shots == 0 {
                return Err(Error::InvalidParameter(format!(
                    "setting {s}: counts sum to {total}, shots = {shots}"
                )));
            }
        }
        Ok(())
    }

    /// Index of the setting with the given basis string (and input, if any).
    pub fn find(&self, input: Option<&[InputState]>, bases: &[Basis]) -> Option<usize> {
        self.settings
            .iter()
            .position(|s| s.bases == bases && s.input.as_deref() == input)
    }

    /// Relabels qubits: new qubit `j` is old qubit `perm[j]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of {n} qubits")));
        }
        let remap = |k: usize| -> usize {
            (0..n).fold(0, |acc, j| (acc << 1) | ((k >> (n - 1 - perm[j])) & 1))
        };
        let counts = self
            .counts
            .iter()
            .map(|c| {
                let mut out = vec![0; c.len()];
                for (k, &v) in c.iter().enumerate() {
                    out[remap(k)] = v;
                }
                out
            })
            .collect();
        Ok(Self {
            n,
            settings: self.settings.iter().map(|s| s.permuted(perm)).collect(),
            counts,
            shots: self.shots.clone(),
            seed: self.seed,
        })
    }
}

/// What a record is simulated from.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    State(&'a DensityMatrix),
    Channel(&'a QuantumChannel),
    /// Output state for each product input, e.g. from trajectory sampling
    /// that has no fixed channel representation.
    Outputs(&'a HashMap<Vec<InputState>, DensityMatrix>),
}

impl<'a> From<&'a DensityMatrix> for Source<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        Source::State(r)
    }
}

impl<'a> From<&'a QuantumChannel> for Source<'a> {
    fn from(c: &'a QuantumChannel) -> Self {
        Source::Channel(c)
    }
}

impl<'a> From<&'a HashMap<Vec<InputState>, DensityMatrix>> for Source<'a> {
    fn from(m: &'a HashMap<Vec<InputState>, DensityMatrix>) -> Self {
        Source::Outputs(m)
    }
}

/// Every product input of the process-tomography grid on `n` qubits.
pub fn all_inputs(n: usize) -> Vec<Vec<InputState>> {
    product_strings(n, &InputState::ALL)
}

/// The product state prepared by an input label.
pub fn input_state(input: &[InputState]) -> Result<DensityMatrix> {
    let psi = input
        .iter()
        .map(|i| i.vector())
        .reduce(|a, b| kron_vec(&a, &b))
        .ok_or_else(|| Error::InvalidLabel("empty input".into()))?;
    DensityMatrix::from_pure(vec![2; input.len()], &psi)
}

fn check_qubit_source(source: Source<'_>, settings: &[MeasurementSetting]) -> Result<usize> {
    let dims = match source {
        Source::State(r) => r.dims(),
        Source::Channel(c) => c.dims(),
        Source::Outputs(map) => map
            .values()
            .next()
            .ok_or_else(|| Error::InvalidParameter("no prepared outputs".into()))?
            .dims(),
    };
    let dim: usize = dims.iter().product();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::DimensionMismatch(format!("{dims:?} is not a qubit register")));
    }
    let n = dim.trailing_zeros() as usize;
    for s in settings {
        if s.n_qubits() != n {
            return Err(Error::DimensionMismatch(format!("setting {s} on a {n}-qubit source")));
        }
        match (source, &s.input) {
            (Source::Outputs(map), Some(inp)) if !map.contains_key(inp) => {
                return Err(Error::MissingSetting(format!("output for input {s}")))
            }
            (Source::Channel(_) | Source::Outputs(_), None) => {
                return Err(Error::InvalidLabel(format!("setting {s} lacks an input state")))
            }
            (Source::State(_), Some(_)) => {
                return Err(Error::InvalidLabel(format!(
                    "setting {s} prepares an input but the source is a state"
                )))
            }
            _ => {}
        }
    }
    Ok(n)
}

/// Exact Born-rule outcome distributions for each setting.
pub fn outcome_probabilities(
    source: Source<'_>,
    settings: &[MeasurementSetting],
) -> Result<Vec<Vec<f64>>> {
    check_qubit_source(source, settings)?;
    let mut cache: HashMap<Vec<InputState>, CMatrix> = HashMap::new();
    settings
        .iter()
        .map(|s| {
            let rho = match (source, &s.input) {
                (Source::State(r), _) => r.matrix().clone(),
                (Source::Channel(c), Some(inp)) => cache
                    .entry(inp.clone())
                    .or_insert_with(|| {
                        let psi = s.input_vector().expect("input present");
                        c.apply_matrix(&(&psi * psi.adjoint()))
                    })
                    .clone(),
                (Source::Outputs(map), Some(inp)) => map[inp].matrix().clone(),
                (Source::Channel(_) | Source::Outputs(_), None) => unreachable!("checked above"),
            };
            let e = outcome_matrix(s);
            let probs = (e.adjoint() * rho * &e).diagonal();
            Ok(normalize_probs(probs.iter().map(|p| p.re)))
        })
        .collect()
}

fn normalize_probs(p: impl Iterator<Item = f64>) -> Vec<f64> {
    let v: Vec<f64> = p.map(|x| x.max(0.0)).collect();
    let total: f64 = v.iter().sum();
    v.into_iter().map(|x| x / total).collect()
}

/// Columns are the outcome eigenvectors of a setting.
fn outcome_matrix(s: &MeasurementSetting) -> CMatrix {
    let k = 1usize << s.n_qubits();
    let cols: Vec<CVector> = (0..k).map(|j| s.outcome_vector(j)).collect();
    CMatrix::from_columns(&cols)
}

/// Multinomial draw by sequential binomials.
fn multinomial<R: rand::Rng + ?Sized>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() || left == 0 {
            out.push(left);
            left = 0;
            continue;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, q).expect("valid probability").sample(rng);
        out.push(draw);
        left -= draw;
        mass -= p;
    }
    out
}

/// Simulates projection-noise-limited histograms: `shots` multinomial draws
/// per setting, each setting on its own random stream of `seed`.
pub fn simulate_record<'a>(
    source: impl Into<Source<'a>>,
    settings: &[MeasurementSetting],
    shots: u64,
    seed: u64,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let source = source.into();
    let n = check_qubit_source(source, settings)?;
    let probs = outcome_probabilities(source, settings)?;
    let counts = probs
        .par_iter()
        .enumerate()
        .map(|(i, p)| multinomial(shots, p, &mut stream_rng(seed, i as u64)))
        .collect();
    Ok(MeasurementRecord {
        n,
        settings: settings.to_vec(),
        counts,
        shots: vec![shots; settings.len()],
        seed,
    })
}

/// Relative outcome frequencies with per-setting weights; the input of the
/// likelihood maximization. Can hold exact probabilities (infinite shots).
#[derive(Clone, Debug)]
pub struct Frequencies {
    pub n: usize,
    pub settings: Vec<MeasurementSetting>,
    pub freqs: Vec<Vec<f64>>,
    /// Relative weight of each setting (shot fraction), summing to 1.
    pub weights: Vec<f64>,
}

impl Frequencies {
    pub fn from_record(record: &MeasurementRecord) -> Result<Self> {
        record.validate()?;
        let total: u64 = record.shots.iter().sum();
        Ok(Self {
            n: record.n,
            settings: record.settings.clone(),
            freqs: record
                .counts
                .iter()
                .zip(&record.shots)
                .map(|(c, &s)| c.iter().map(|&x| x as f64 / s as f64).collect())
                .collect(),
            weights: record.shots.iter().map(|&s| s as f64 / total as f64).collect(),
        })
    }

    /// Exact outcome probabilities, as if every setting had infinitely many shots.
    pub fn exact<'a>(source: impl Into<Source<'a>>, settings: &[MeasurementSetting]) -> Result<Self> {
        let source = source.into();
        let n = check_qubit_source(source, settings)?;
        let freqs = outcome_probabilities(source, settings)?;
        let w = 1.0 / settings.len() as f64;
        Ok(Self {
            n,
            settings: settings.to_vec(),
            freqs,
            weights: vec![w; settings.len()],
        })
    }
}

/// Stopping rule and completeness policy for the iterative reconstructions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Stop once the mean log-likelihood per shot improves by less than this.
    pub tol: f64,
    /// Accept a subset of the complete setting grid, with a warning.
    pub allow_incomplete: bool,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            tol: 1e-10,
            allow_incomplete: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StateEstimate {
    pub state: DensityMatrix,
    /// Mean log-likelihood per shot after each accepted iteration (starting point first).
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ProcessEstimate {
    pub channel: QuantumChannel,
    /// Unit-trace Choi matrix, system then reference order.
    pub choi: CMatrix,
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Outcome projectors `e e†` sharing one preparation, with observed weights.
struct Group {
    /// `1 ⊗ conj(ψ)` as a `D² × D` map (process tomography only).
    lift: Option<CMatrix>,
    /// `conj(ψ) conj(ψ)†` on the reference factor (process tomography only).
    reference: Option<CMatrix>,
    /// Columns are outcome vectors `e_j`.
    e: CMatrix,
    weights: Vec<f64>,
}

/// Product measurement operators `(e e†) ⊗ (ψ̄ ψ̄†)` grouped by preparation;
/// probabilities are `p = e† (V† M V) e` with `V = 1 ⊗ ψ̄` (or `V = 1` for
/// state tomography).
struct Design {
    groups: Vec<Group>,
}

impl Design {
    fn probabilities(&self, m: &CMatrix) -> Vec<Vec<f64>> {
        self.groups
            .iter()
            .map(|g| {
                let reduced;
                let rho = match &g.lift {
                    Some(v) => {
                        reduced = v.adjoint() * m * v;
                        &reduced
                    }
                    None => m,
                };
                let re = rho * &g.e;
                g.e.column_iter()
                    .zip(re.column_iter())
                    .map(|(e, v)| e.dotc(&v).re.max(f64::MIN_POSITIVE))
                    .collect()
            })
            .collect()
    }

    fn log_likelihood(&self, probs: &[Vec<f64>]) -> f64 {
        self.groups
            .iter()
            .zip(probs)
            .map(|(g, p)| g.weights.iter().zip(p).map(|(f, p)| f * p.ln()).sum::<f64>())
            .sum()
    }

    /// `Σ_j weight_j / p_j · (e_j e_j†) ⊗ (ψ̄ ψ̄†)`.
    fn gradient_operator(&self, probs: &[Vec<f64>], dim: usize) -> CMatrix {
        let mut out = CMatrix::zeros(dim, dim);
        for (g, p) in self.groups.iter().zip(probs) {
            let mut scaled = g.e.clone();
            for (mut col, (f, p)) in scaled.column_iter_mut().zip(g.weights.iter().zip(p)) {
                col *= c64(f / p, 0.0);
            }
            let a = scaled * g.e.adjoint();
            match &g.reference {
                Some(r) => out += kron(&a, r),
                None => out += a,
            }
        }
        out
    }
}

fn state_design(data: &Frequencies) -> Design {
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    for ((s, f), &wt) in data.settings.iter().zip(&data.freqs).zip(&data.weights) {
        for (j, &fj) in f.iter().enumerate() {
            if fj > 0.0 {
                cols.push(s.outcome_vector(j));
                weights.push(wt * fj);
            }
        }
    }
    Design {
        groups: vec![Group {
            lift: None,
            reference: None,
            e: CMatrix::from_columns(&cols),
            weights,
        }],
    }
}

fn process_design(data: &Frequencies) -> Design {
    let dim = 1usize << data.n;
    let mut by_input: Vec<(Vec<InputState>, Vec<CVector>, Vec<f64>)> = Vec::new();
    for ((s, f), &wt) in data.settings.iter().zip(&data.freqs).zip(&data.weights) {
        let input = s.input.clone().expect("process setting has an input");
        let idx = match by_input.iter().position(|(i, _, _)| *i == input) {
            Some(i) => i,
            None => {
                by_input.push((input, Vec::new(), Vec::new()));
                by_input.len() - 1
            }
        };
        let (_, cols, weights) = &mut by_input[idx];
        for (j, &fj) in f.iter().enumerate() {
            if fj > 0.0 {
                cols.push(s.outcome_vector(j));
                weights.push(wt * fj);
            }
        }
    }
    let groups = by_input
        .into_iter()
        .filter(|(_, cols, _)| !cols.is_empty())
        .map(|(input, cols, weights)| {
            let setting = MeasurementSetting {
                input: Some(input),
                bases: vec![Basis::Z; data.n],
            };
            let psi = setting.input_vector().expect("input present").conjugate();
            let psi_col = CMatrix::from_column_slice(dim, 1, psi.as_slice());
            Group {
                lift: Some(kron(&identity(dim), &psi_col)),
                reference: Some(&psi_col * psi_col.adjoint()),
                e: CMatrix::from_columns(&cols),
                weights,
            }
        })
        .collect();
    Design { groups }
}

/// Shared ascent loop: take the fixed-point proposal, then halve the step
/// toward it (convex combination) until the likelihood does not decrease.
fn ascend<F>(
    design: &Design,
    start: CMatrix,
    opts: &MleOptions,
    mut propose: F,
) -> (CMatrix, Vec<f64>, usize)
where
    F: FnMut(&CMatrix, &CMatrix) -> CMatrix,
{
    let mut current = start;
    let mut probs = design.probabilities(&current);
    let mut ll = design.log_likelihood(&probs);
    let mut trace = vec![ll];
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let grad = design.gradient_operator(&probs, current.nrows());
        let full = propose(&grad, &current);
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-8 {
            let trial = if step == 1.0 {
                full.clone()
            } else {
                current.scale(1.0 - step) + full.scale(step)
            };
            let trial_probs = design.probabilities(&trial);
            let trial_ll = design.log_likelihood(&trial_probs);
            if trial_ll >= ll {
                accepted = Some((trial, trial_probs, trial_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_probs, next_ll)) = accepted else { break };
        let gain = next_ll - ll;
        current = next;
        probs = next_probs;
        ll = next_ll;
        trace.push(ll);
        if gain < opts.tol {
            break;
        }
    }
    (current, trace, iterations)
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn missing_state_bases(data: &Frequencies) -> Vec<String> {
    let present: BTreeSet<String> = data.settings.iter().map(|s| s.bases_label()).collect();
    basis_strings(data.n)
        .into_iter()
        .map(|b| b.iter().map(|x| x.as_char()).collect::<String>())
        .filter(|b| !present.contains(b))
        .collect()
}

fn summarize(missing: &[String]) -> String {
    const SHOW: usize = 12;
    let mut s = missing.iter().take(SHOW).cloned().collect::<Vec<_>>().join(", ");
    if missing.len() > SHOW {
        s.push_str(&format!(" and {} more", missing.len() - SHOW));
    }
    s
}

/// Maximum-likelihood state from a record.
pub fn mle_state_tomography(record: &MeasurementRecord, opts: &MleOptions) -> Result<StateEstimate> {
    mle_state(&Frequencies::from_record(record)?, opts)
}

/// Maximum-likelihood state from outcome frequencies (`ρ ← RρR / Tr`).
pub fn mle_state(data: &Frequencies, opts: &MleOptions) -> Result<StateEstimate> {
    if data.settings.iter().any(|s| s.input.is_some()) {
        return Err(Error::InvalidLabel("state tomography settings carry no inputs".into()));
    }
    let mut warnings = Vec::new();
    let missing = missing_state_bases(data);
    if !missing.is_empty() {
        let msg = summarize(&missing);
        if !opts.allow_incomplete {
            return Err(Error::InsufficientSettings(msg));
        }
        warnings.push(format!("incomplete basis set; missing {msg}"));
    }
    let dim = 1usize << data.n;
    let design = state_design(data);
    let start = identity(dim).unscale(dim as f64);
    let (rho, trace, iterations) = ascend(&design, start, opts, |r, rho| {
        let next = hermitize(&(r * rho * r));
        let t = next.trace().re;
        next.unscale(t)
    });
    Ok(StateEstimate {
        state: DensityMatrix::from_psd_unnormalized(vec![2; data.n], rho),
        log_likelihood: trace,
        iterations,
        warnings,
    })
}

/// Maximum-likelihood channel from a record.
pub fn mle_process_tomography(
    record: &MeasurementRecord,
    opts: &MleOptions,
) -> Result<ProcessEstimate> {
    mle_process(&Frequencies::from_record(record)?, opts)
}

/// Maximum-likelihood channel with trace preservation enforced every step:
/// on the Choi matrix `C` (system ⊗ reference, `Tr_S C = 1`),
/// `C ← λ⁻¹ K C K λ⁻¹` with `λ = (Tr_S K C K)^{1/2}` acting on the reference.
pub fn mle_process(data: &Frequencies, opts: &MleOptions) -> Result<ProcessEstimate> {
    if data.settings.iter().any(|s| s.input.is_none()) {
        return Err(Error::InvalidLabel("process tomography settings need inputs".into()));
    }
    let mut warnings = Vec::new();
    let present: BTreeSet<String> = data.settings.iter().map(|s| s.to_string()).collect();
    let missing: Vec<String> = process_tomography_settings(data.n)
        .iter()
        .map(|s| s.to_string())
        .filter(|s| !present.contains(s))
        .collect();
    if !missing.is_empty() {
        let msg = summarize(&missing);
        if !opts.allow_incomplete {
            return Err(Error::InsufficientSettings(msg));
        }
        warnings.push(format!("incomplete input/basis grid; missing {msg}"));
    }
    let dim = 1usize << data.n;
    let design = process_design(data);
    // Maximally depolarizing start: Tr_S C = 1.
    let start = identity(dim * dim).unscale(dim as f64);
    let mut failure = None;
    let (choi, trace, iterations) = ascend(&design, start, opts, |k, c| {
        let kck = hermitize(&(k * c * k));
        let reduced = match partial_trace(&kck, &[dim, dim], &[1]) {
            Ok(r) => r,
            Err(e) => {
                failure.get_or_insert(e.to_string());
                return c.clone();
            }
        };
        match crate::linalg::hermitian_map(&reduced, |x| 1.0 / x.max(1e-300).sqrt()) {
            Ok(inv_sqrt) => {
                let lift = kron(&identity(dim), &inv_sqrt);
                hermitize(&(&lift * kck * &lift))
            }
            Err(e) => {
                failure.get_or_insert(e.to_string());
                c.clone()
            }
        }
    });
    if let Some(f) = failure {
        warnings.push(format!("numerical issue during iteration: {f}"));
    }
    let unit = choi.unscale(dim as f64);
    let channel = QuantumChannel::from_natural_choi(vec![2; data.n], &unit)?;
    Ok(ProcessEstimate {
        channel,
        choi: unit,
        log_likelihood: trace,
        iterations,
        warnings,
    })
}

/// Fidelity between the normalized Choi states of two channels.
pub fn process_fidelity(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch("channels act on different spaces".into()));
    }
    let d = a.dim();
    let ca = DensityMatrix::from_raw(vec![d, d], a.choi_matrix_natural());
    let cb = DensityMatrix::from_raw(vec![d, d], b.choi_matrix_natural());
    ca.fidelity(&cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setting_counts() {
        assert_eq!(state_tomography_settings(2).len(), 9);
        assert_eq!(process_tomography_settings(1).len(), 12);
        assert_eq!(process_tomography_settings(2).len(), 144);
        assert_eq!(state_tomography_settings(2)[1].bases_label(), "XY");
    }

    #[test]
    fn eigenvectors_have_expected_eigenvalues() {
        use crate::linalg::pauli;
        for (b, p) in [(Basis::X, pauli::x()), (Basis::Y, pauli::y()), (Basis::Z, pauli::z())] {
            for bit in 0..2 {
                let v = b.eigenvector(bit);
                let ev = (v.adjoint() * &p * &v)[(0, 0)].re;
                assert!((ev - if bit == 0 { 1.0 } else { -1.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn setting_json_round_trip() {
        let s = MeasurementSetting::new(Some(parse_inputs("0+i1").unwrap()), parse_bases("XYZZ").unwrap()).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"input":"0+i1","bases":"XYZZ"}"#);
        let back: MeasurementSetting = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<MeasurementSetting>(r#"{"bases":"XQ"}"#).is_err());
        assert!(MeasurementSetting::new(Some(vec![InputState::Zero]), vec![Basis::X, Basis::X]).is_err());
    }

    #[test]
    fn ground_state_z_counts_are_deterministic() {
        let rho = DensityMatrix::basis_state(vec![2], 0).unwrap();
        let rec = simulate_record(&rho, &[MeasurementSetting::state(vec![Basis::Z])], 500, 1).unwrap();
        assert_eq!(rec.counts[0], vec![500, 0]);
        rec.validate().unwrap();
    }

    #[test]
    fn multinomial_conserves_shots() {
        let mut rng = stream_rng(4, 0);
        let c = multinomial(1000, &[0.1, 0.2, 0.3, 0.4], &mut rng);
        assert_eq!(c.iter().sum::<u64>(), 1000);
        assert_eq!(multinomial(7, &[0.0, 1.0], &mut rng), vec![0, 7]);
    }

    #[test]
    fn source_mismatch_is_rejected() {
        let ch = QuantumChannel::identity(vec![2]);
        assert!(simulate_record(&ch, &state_tomography_settings(1), 10, 0).is_err());
        let rho = DensityMatrix::plus_state(1);
        assert!(simulate_record(&rho, &process_tomography_settings(1), 10, 0).is_err());
        assert!(simulate_record(&rho, &state_tomography_settings(2), 10, 0).is_err());
        assert!(simulate_record(&rho, &state_tomography_settings(1), 0, 0).is_err());
    }

    #[test]
    fn incomplete_settings() {
        let rho = DensityMatrix::plus_state(2);
        let mut settings = state_tomography_settings(2);
        settings.truncate(5);
        let rec = simulate_record(&rho, &settings, 50, 2).unwrap();
        match mle_state_tomography(&rec, &MleOptions::default()) {
            Err(Error::InsufficientSettings(m)) => assert!(m.contains("ZZ")),
            other => panic!("unexpected {other:?}"),
        }
        let opts = MleOptions {
            allow_incomplete: true,
            ..Default::default()
        };
        let est = mle_state_tomography(&rec, &opts).unwrap();
        assert_eq!(est.warnings.len(), 1);
    }

    #[test]
    fn exact_data_recovers_plus_state() {
        let rho = DensityMatrix::plus_state(1);
        let data = Frequencies::exact(&rho, &state_tomography_settings(1)).unwrap();
        let est = mle_state(&data, &MleOptions::default()).unwrap();
        assert!(est.state.fidelity(&rho).unwrap() > 0.9999);
        assert!(est.log_likelihood.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn exact_data_recovers_identity_channel() {
        let ch = QuantumChannel::identity(vec![2]);
        let data = Frequencies::exact(&ch, &process_tomography_settings(1)).unwrap();
        let est = mle_process(&data, &MleOptions::default()).unwrap();
        assert!(process_fidelity(&est.channel, &ch).unwrap() > 0.999);
        assert!(est.channel.completeness_deviation() < 1e-9);
    }
}

//! JSON file formats for channels, states and noise scenarios.
//!
//! Matrices use [`MatrixJson`]: row-major rows of `[re, im]` pairs with an
//! optional `dims` list.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, MatrixJson};
use crate::measure::PartyStructure;
use crate::noise::{gaussian_dephasing_channel, sample_dephasing_channel, sigma_b_at, DecayModel, PhaseNoiseModel};

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// A channel file holds either Kraus operators (with `dims`) or a CJ state.
///
/// The CJ state is unit-trace and party-interleaved; its `dims` list is
/// `[d_1, d_1, d_2, d_2, ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parties: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
}

impl ChannelFile {
    /// Kraus form of a channel.
    pub fn kraus_form(channel: &QuantumChannel, parties: Option<&PartyStructure>) -> Self {
        Self {
            dims: Some(channel.dims().to_vec()),
            parties: parties.map(|p| p.dims().to_vec()),
            kraus: Some(channel.kraus().iter().map(|k| MatrixJson::from_matrix(k, None)).collect()),
            choi: None,
        }
    }

    /// CJ-state form of a channel over the given parties.
    pub fn choi_form(channel: &QuantumChannel, parties: &PartyStructure) -> Result<Self> {
        let cj = channel.choi_state(parties)?;
        Ok(Self {
            dims: Some(channel.dims().to_vec()),
            parties: Some(parties.dims().to_vec()),
            kraus: None,
            choi: Some(MatrixJson::from_matrix(cj.matrix(), Some(cj.dims().to_vec()))),
        })
    }

    /// Party structure stored in the file, falling back to the channel dims
    /// (one party per subsystem) or to the CJ dims.
    pub fn stored_parties(&self) -> Result<Option<PartyStructure>> {
        if let Some(p) = &self.parties {
            return PartyStructure::new(p.clone()).map(Some);
        }
        if let Some(d) = &self.dims {
            return PartyStructure::new(d.clone()).map(Some);
        }
        if let Some(cj_dims) = self.choi.as_ref().and_then(|c| c.dims.as_ref()) {
            if cj_dims.len() % 2 == 0 && cj_dims.chunks(2).all(|c| c[0] == c[1]) {
                return PartyStructure::new(cj_dims.iter().step_by(2).copied().collect()).map(Some);
            }
        }
        Ok(None)
    }

    /// The channel and the party structure to analyze it with. `parties`
    /// overrides whatever the file stores.
    pub fn to_channel(&self, parties: Option<&PartyStructure>) -> Result<(QuantumChannel, PartyStructure)> {
        let parties = match parties {
            Some(p) => p.clone(),
            None => self
                .stored_parties()?
                .ok_or_else(|| Error::InvalidParameter("channel file has no dims or parties".into()))?,
        };
        let channel = match (&self.kraus, &self.choi) {
            (Some(kraus), None) => {
                let ops = kraus.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
                let dims = self.dims.clone().unwrap_or_else(|| parties.dims().to_vec());
                QuantumChannel::new(dims, ops)?
            }
            (None, Some(choi)) => {
                let cj = DensityMatrix::new(parties.cj_dims(), choi.to_matrix()?)?;
                let dims = self.dims.clone().unwrap_or_else(|| parties.dims().to_vec());
                QuantumChannel::from_choi_state(&cj, &parties, dims)?
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "channel file needs exactly one of \"kraus\" or \"choi\"".into(),
                ))
            }
        };
        parties.check_channel_dims(channel.dims())?;
        Ok((channel, parties))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path)
    }
}

/// State file: a [`MatrixJson`] whose `dims` default to a single system.
pub fn state_to_json(rho: &DensityMatrix) -> MatrixJson {
    MatrixJson::from_matrix(rho.matrix(), Some(rho.dims().to_vec()))
}

pub fn state_from_json(m: &MatrixJson) -> Result<DensityMatrix> {
    let matrix = m.to_matrix()?;
    let dims = m.dims.clone().unwrap_or_else(|| vec![matrix.nrows()]);
    DensityMatrix::new(dims, matrix)
}

pub fn load_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&read_json(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Dephasing,
    Decay,
}

/// Noise scenario file.
///
/// Dephasing takes `sigmaB` directly or derives it from `time` and
/// `tauCoherence`; decay needs `tSpont` and `time`. The register size is
/// the length of `suscept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NoiseScenario {
    pub model: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_b: Option<f64>,
    #[serde(default)]
    pub sigma_l: f64,
    pub suscept: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_spont: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_coherence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default = "default_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_traj() -> usize {
    crate::experiments::DEFAULT_TRAJECTORIES
}

impl NoiseScenario {
    pub fn n_qubits(&self) -> usize {
        self.suscept.len()
    }

    fn missing(field: &str) -> Error {
        Error::InvalidParameter(format!("noise scenario needs \"{field}\""))
    }

    /// Phase-noise model of a dephasing scenario.
    pub fn phase_model(&self) -> Result<PhaseNoiseModel> {
        if self.model != NoiseKind::Dephasing {
            return Err(Error::InvalidParameter("not a dephasing scenario".into()));
        }
        let sigma_b = match (self.sigma_b, self.time, self.tau_coherence) {
            (Some(s), _, _) => s,
            (None, Some(t), Some(tau)) => {
                let s0 = *self.suscept.first().ok_or_else(|| Self::missing("suscept"))?;
                sigma_b_at(t, tau, s0)
            }
            _ => return Err(Self::missing("sigmaB (or time and tauCoherence)")),
        };
        PhaseNoiseModel::new(sigma_b, self.sigma_l, self.suscept.clone())
    }

    /// Exact channel of the scenario.
    pub fn exact_channel(&self) -> Result<QuantumChannel> {
        match self.model {
            NoiseKind::Dephasing => gaussian_dephasing_channel(&self.phase_model()?),
            NoiseKind::Decay => {
                let t_spont = self.t_spont.ok_or_else(|| Self::missing("tSpont"))?;
                let t = self.time.ok_or_else(|| Self::missing("time"))?;
                let n = self.n_qubits();
                DecayModel::new(t_spont, (0..n).collect())?.exact_channel(t, n)
            }
        }
    }

    /// Monte-Carlo estimate of a dephasing channel from `nTraj` phase samples.
    pub fn sampled_channel(&self) -> Result<QuantumChannel> {
        sample_dephasing_channel(&self.phase_model()?, self.n_traj, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_file_round_trips_both_forms() {
        let ch = QuantumChannel::swap(2);
        let parties = PartyStructure::uniform(2, 2).unwrap();
        for file in [
            ChannelFile::kraus_form(&ch, Some(&parties)),
            ChannelFile::choi_form(&ch, &parties).unwrap(),
        ] {
            let text = serde_json::to_string(&file).unwrap();
            let back: ChannelFile = serde_json::from_str(&text).unwrap();
            let (ch2, p2) = back.to_channel(None).unwrap();
            assert_eq!(p2, parties);
            let a = ch.choi_state(&parties).unwrap();
            let b = ch2.choi_state(&parties).unwrap();
            assert!(a.approx_eq(&b, 1e-9));
        }
    }

    #[test]
    fn choi_only_file_infers_parties() {
        let ch = QuantumChannel::identity(vec![2, 2]);
        let parties = PartyStructure::uniform(2, 2).unwrap();
        let mut file = ChannelFile::choi_form(&ch, &parties).unwrap();
        file.dims = None;
        file.parties = None;
        let (_, p) = file.to_channel(None).unwrap();
        assert_eq!(p.dims(), &[2, 2]);
    }

    #[test]
    fn channel_file_needs_one_form() {
        let file = ChannelFile {
            dims: Some(vec![2]),
            parties: None,
            kraus: None,
            choi: None,
        };
        assert!(file.to_channel(None).is_err());
    }

    #[test]
    fn noise_scenario_parses() {
        let s: NoiseScenario = serde_json::from_str(
            r#"{"model":"dephasing","sigmaB":0.5,"sigmaL":0.1,"suscept":[1,-0.83],"nTraj":100,"seed":3}"#,
        )
        .unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert!(s.exact_channel().is_ok());
        assert!(s.sampled_channel().is_ok());
        let d: NoiseScenario =
            serde_json::from_str(r#"{"model":"decay","suscept":[1,1],"tSpont":1.0,"time":0.5}"#).unwrap();
        assert_eq!(d.n_traj, crate::experiments::DEFAULT_TRAJECTORIES);
        assert!(d.exact_channel().is_ok());
        let bad: NoiseScenario = serde_json::from_str(r#"{"model":"decay","suscept":[1]}"#).unwrap();
        assert!(bad.exact_channel().is_err());
    }
}

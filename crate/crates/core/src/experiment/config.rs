use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, FadingModel};
use crate::simulate::{CapacitySweepConfig, ConditionalSerConfig, SchemeSpec, SweepConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ber,
    Capacity,
    Bounds,
    ConditionalSer,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ber => "ber",
            Command::Capacity => "capacity",
            Command::Bounds => "bounds",
            Command::ConditionalSer => "conditional-ser",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Rayleigh,
    Rician,
    Nakagami,
}

/// `[channel]`: flat form of [`ChannelSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub model: ModelName,
    /// Rician K-factor (linear).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Nakagami shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    pub n_rx: usize,
    /// Defaults to the scheme's antenna count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_tx: Option<usize>,
    #[serde(default)]
    pub rho: f64,
    #[serde(default)]
    pub tau: f64,
    /// CSI error variance.
    #[serde(default)]
    pub gamma2: f64,
}

impl ChannelSection {
    pub fn rayleigh(n_rx: usize) -> Self {
        ChannelSection {
            model: ModelName::Rayleigh,
            k: None,
            m: None,
            n_rx,
            n_tx: None,
            rho: 0.0,
            tau: 0.0,
            gamma2: 0.0,
        }
    }

    pub fn model(&self) -> Result<FadingModel> {
        let stray = |name: &str| Error::config(format!("`{name}` does not apply to the {:?} model", self.model));
        match self.model {
            ModelName::Rayleigh => {
                if self.k.is_some() {
                    return Err(stray("k"));
                }
                if self.m.is_some() {
                    return Err(stray("m"));
                }
                Ok(FadingModel::Rayleigh)
            }
            ModelName::Rician => {
                if self.m.is_some() {
                    return Err(stray("m"));
                }
                let k = self.k.ok_or_else(|| Error::config("rician channel needs `k`"))?;
                Ok(FadingModel::Rician { k })
            }
            ModelName::Nakagami => {
                if self.k.is_some() {
                    return Err(stray("k"));
                }
                let m = self.m.ok_or_else(|| Error::config("nakagami channel needs `m`"))?;
                Ok(FadingModel::Nakagami { m })
            }
        }
    }

    /// Full channel spec; `scheme_n_tx` fills in a missing `n_tx`.
    pub fn spec(&self, scheme_n_tx: usize) -> Result<ChannelSpec> {
        let n_tx = self.n_tx.unwrap_or(scheme_n_tx);
        if n_tx != scheme_n_tx {
            return Err(Error::config(format!(
                "channel has {n_tx} transmit antennas but the scheme needs {scheme_n_tx}"
            )));
        }
        let spec = ChannelSpec::new(self.model()?, self.n_rx, n_tx)
            .with_correlation(self.rho, self.tau)
            .with_csi_error(self.gamma2);
        spec.validate()?;
        Ok(spec)
    }
}

fn default_max_trials() -> u64 {
    100_000_000
}
fn default_target() -> u64 {
    200
}
fn default_trials() -> u64 {
    200
}
fn default_quad() -> usize {
    64
}

/// `[sweep]`: SNR grid, stopping rule and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub min_trials: u64,
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    #[serde(default = "default_target")]
    pub target_bit_errors: u64,
    /// Fixed trial count for capacity and conditional-SER runs.
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Gauss-Legendre nodes for the BER bound.
    #[serde(default = "default_quad")]
    pub quad_nodes: usize,
}

impl SweepSection {
    pub fn new(snr_db: Vec<f64>) -> Self {
        SweepSection {
            snr_db,
            seed: 0,
            min_trials: 0,
            max_trials: default_max_trials(),
            target_bit_errors: default_target(),
            trials: default_trials(),
            quad_nodes: default_quad(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VaryParam {
    K,
    M,
    Rho,
    Tau,
    Gamma2,
}

/// `[vary]`: repeat a BER sweep over values of one channel parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarySection {
    pub param: VaryParam,
    pub values: Vec<f64>,
}

impl VarySection {
    pub fn apply(&self, ch: &ChannelSection, value: f64) -> Result<ChannelSection> {
        let mut ch = ch.clone();
        match (self.param, ch.model) {
            (VaryParam::K, ModelName::Rician) => ch.k = Some(value),
            (VaryParam::M, ModelName::Nakagami) => ch.m = Some(value),
            (VaryParam::Rho, _) => ch.rho = value,
            (VaryParam::Tau, _) => ch.tau = value,
            (VaryParam::Gamma2, _) => ch.gamma2 = value,
            (p, m) => {
                return Err(Error::config(format!("cannot vary {p:?} on a {m:?} channel")));
            }
        }
        Ok(ch)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    pub path: String,
}

/// One experiment as read from a TOML recipe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Not used by `conditional-ser`, which fixes SM(2) + QPSK.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSpec>,
    pub channel: ChannelSection,
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vary: Option<VarySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("bad config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialize")
    }

    pub fn scheme(&self) -> Result<&SchemeSpec> {
        self.scheme
            .as_ref()
            .ok_or_else(|| Error::config("config has no [scheme] section"))
    }

    pub fn output_path(&self) -> Result<&str> {
        self.output
            .as_ref()
            .map(|o| o.path.as_str())
            .ok_or_else(|| Error::config("no output path: set [output] path or pass --out"))
    }

    fn channel_spec(&self, channel: &ChannelSection) -> Result<ChannelSpec> {
        let n_tx = self.scheme()?.build()?.alphabet.n_tx();
        channel.spec(n_tx)
    }

    pub fn ber_config(&self) -> Result<SweepConfig> {
        self.ber_config_for(&self.channel)
    }

    pub(crate) fn ber_config_for(&self, channel: &ChannelSection) -> Result<SweepConfig> {
        let s = &self.sweep;
        let cfg = SweepConfig {
            scheme: self.scheme()?.clone(),
            channel: self.channel_spec(channel)?,
            snr_db: s.snr_db.clone(),
            min_trials: s.min_trials,
            max_trials: s.max_trials,
            target_bit_errors: s.target_bit_errors,
            seed: s.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn capacity_config(&self) -> Result<CapacitySweepConfig> {
        self.check_grid()?;
        if self.sweep.trials == 0 {
            return Err(Error::config("capacity needs trials >= 1"));
        }
        Ok(CapacitySweepConfig {
            scheme: self.scheme()?.clone(),
            channel: self.channel_spec(&self.channel)?,
            snr_db: self.sweep.snr_db.clone(),
            trials: self.sweep.trials,
            seed: self.sweep.seed,
        })
    }

    pub fn conditional_config(&self) -> Result<ConditionalSerConfig> {
        self.check_grid()?;
        if self.scheme.is_some() {
            return Err(Error::config("conditional-ser uses a fixed SM(2) + QPSK scheme; remove [scheme]"));
        }
        let ch = &self.channel;
        let plain = ch.model == ModelName::Rayleigh
            && ch.rho == 0.0
            && ch.tau == 0.0
            && ch.gamma2 == 0.0
            && ch.n_tx.is_none_or(|n| n == 2);
        if !plain {
            return Err(Error::config(
                "conditional-ser runs on an uncorrelated 2-antenna Rayleigh channel with perfect CSI",
            ));
        }
        ch.spec(2)?;
        if self.sweep.trials == 0 {
            return Err(Error::config("conditional-ser needs trials >= 1"));
        }
        Ok(ConditionalSerConfig {
            n_rx: ch.n_rx,
            snr_db: self.sweep.snr_db.clone(),
            trials: self.sweep.trials,
            seed: self.sweep.seed,
        })
    }

    fn check_grid(&self) -> Result<()> {
        let g = &self.sweep.snr_db;
        if g.is_empty() || g.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("SNR grid must be nonempty and finite"));
        }
        Ok(())
    }

    /// Full validation for `command`, run before anything is computed.
    pub fn validate(&self, command: Command) -> Result<()> {
        self.output_path()?;
        if self.vary.is_some() && command != Command::Ber {
            return Err(Error::config("[vary] is only supported by the ber command"));
        }
        match command {
            Command::Ber => {
                self.ber_config()?;
                if let Some(v) = &self.vary {
                    if v.values.is_empty() {
                        return Err(Error::config("[vary] values is empty"));
                    }
                    for &x in &v.values {
                        self.ber_config_for(&v.apply(&self.channel, x)?)?;
                    }
                }
            }
            Command::Capacity => {
                self.capacity_config()?;
            }
            Command::Bounds => {
                self.check_grid()?;
                self.channel_spec(&self.channel)?;
                if self.sweep.quad_nodes < 2 {
                    return Err(Error::config("quad_nodes must be >= 2"));
                }
            }
            Command::ConditionalSer => {
                self.conditional_config()?;
            }
        }
        Ok(())
    }
}

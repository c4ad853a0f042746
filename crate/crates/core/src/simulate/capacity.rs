use serde::{Deserialize, Serialize};

use super::{with_workers, SchemeSpec};
use crate::analysis::capacity_mc;
use crate::channel::ChannelSpec;
use crate::{noise_variance, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySweepConfig {
    pub scheme: SchemeSpec,
    pub channel: ChannelSpec,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub snr_db: f64,
    pub capacity_bits: f64,
    pub std_err: f64,
}

/// Monte Carlo capacity at every SNR point; SNR index `i` uses RNG stream `i`.
pub fn run_capacity_sweep(cfg: &CapacitySweepConfig, workers: usize) -> Result<Vec<CapacityRow>> {
    if cfg.snr_db.is_empty() {
        return Err(Error::config("SNR grid is empty"));
    }
    cfg.channel.validate()?;
    let a = cfg.scheme.build()?.alphabet;
    with_workers(workers, || {
        cfg.snr_db
            .iter()
            .enumerate()
            .map(|(idx, &snr)| {
                let est = capacity_mc(&a, &cfg.channel, noise_variance(snr), cfg.trials, cfg.seed, idx as u64)?;
                Ok(CapacityRow {
                    snr_db: snr,
                    capacity_bits: est.capacity,
                    std_err: est.std_err,
                })
            })
            .collect()
    })
}

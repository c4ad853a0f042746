use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{wilson_interval, with_workers, Detector, Scheme, SchemeSpec};
use crate::channel::{cscg, ChannelSampler, ChannelSpec};
use crate::detect::MlDetector;
use crate::rng::trial_rng;
use crate::{noise_variance, Error, Result, C64};

/// Trials per batch; the stopping rule is checked between batches so the
/// trial count never depends on the worker count.
pub const BATCH_TRIALS: u64 = 1024;

/// Bit-error-rate sweep over an SNR grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scheme: SchemeSpec,
    pub channel: ChannelSpec,
    pub snr_db: Vec<f64>,
    pub min_trials: u64,
    pub max_trials: u64,
    pub target_bit_errors: u64,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::config("SNR grid is empty"));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("SNR values must be finite"));
        }
        if self.max_trials == 0 || self.min_trials > self.max_trials {
            return Err(Error::config(format!(
                "need 1 <= max_trials and min_trials <= max_trials, got {} / {}",
                self.min_trials, self.max_trials
            )));
        }
        if self.target_bit_errors == 0 {
            return Err(Error::config("target_bit_errors must be >= 1"));
        }
        self.channel.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerRow {
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// One transmission: uniform symbol, channel draw, noise, detection.
///
/// Returns `(bits_sent, bit_errors)`.
pub fn run_ber_trial<R: Rng + ?Sized>(
    scheme: &Scheme,
    sampler: &ChannelSampler,
    sigma2: f64,
    rng: &mut R,
) -> (u64, u64) {
    run_ber_trial_with(scheme, sampler, sigma2, rng, |r, h_hat, _| {
        let det = MlDetector::new(h_hat, &scheme.alphabet);
        match scheme.detector {
            Detector::Ml => det.detect(r).index,
            Detector::Suboptimal(cfg) => det.detect_suboptimal(r, cfg).index,
        }
    })
}

/// [`run_ber_trial`] with a custom decision rule `(r, H_hat, sent) -> index`.
pub fn run_ber_trial_with<R: Rng + ?Sized>(
    scheme: &Scheme,
    sampler: &ChannelSampler,
    sigma2: f64,
    rng: &mut R,
    decide: impl FnOnce(&DVector<C64>, &DMatrix<C64>, usize) -> usize,
) -> (u64, u64) {
    let a = &scheme.alphabet;
    let sent = rng.random_range(0..a.len());
    let draw = sampler.sample(rng);
    let mut r = &draw.h * DVector::from_column_slice(a.vector(sent));
    if sigma2 > 0.0 {
        r.iter_mut().for_each(|v| *v += cscg(rng, sigma2));
    }
    let got = decide(&r, &draw.h_hat, sent);
    let errors = (a.label(sent) ^ a.label(got)).count_ones() as u64;
    (a.bits() as u64, errors)
}

/// Runs every SNR point until `target_bit_errors` (after at least
/// `min_trials`) or `max_trials`, on a pool of `workers` threads.
pub fn run_ber_sweep(cfg: &SweepConfig, workers: usize) -> Result<Vec<BerRow>> {
    cfg.validate()?;
    let scheme = cfg.scheme.build()?;
    if cfg.channel.n_tx != scheme.alphabet.n_tx() {
        return Err(Error::config(format!(
            "channel has {} transmit antennas but the scheme needs {}",
            cfg.channel.n_tx,
            scheme.alphabet.n_tx()
        )));
    }
    let sampler = cfg.channel.sampler()?;
    let bits = scheme.alphabet.bits() as u64;
    with_workers(workers, || {
        Ok(cfg
            .snr_db
            .iter()
            .enumerate()
            .map(|(idx, &snr)| {
                let sigma2 = noise_variance(snr);
                let (mut trials, mut errors) = (0u64, 0u64);
                loop {
                    let end = (trials + BATCH_TRIALS).min(cfg.max_trials);
                    errors += (trials..end)
                        .into_par_iter()
                        .map(|t| {
                            let mut rng = trial_rng(cfg.seed, idx as u64, t);
                            run_ber_trial(&scheme, &sampler, sigma2, &mut rng).1
                        })
                        .sum::<u64>();
                    trials = end;
                    let done = trials >= cfg.max_trials
                        || (trials >= cfg.min_trials && errors >= cfg.target_bit_errors);
                    if done {
                        break;
                    }
                }
                let sent = trials * bits;
                let (lo, hi) = wilson_interval(errors, sent);
                BerRow {
                    snr_db: snr,
                    trials,
                    bit_errors: errors,
                    ber: errors as f64 / sent as f64,
                    ci95_low: lo,
                    ci95_high: hi,
                }
            })
            .collect())
    })
}

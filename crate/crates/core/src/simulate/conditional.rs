use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{wilson_interval, with_workers};
use crate::channel::{cscg, ChannelSpec, FadingModel};
use crate::detect::MlDetector;
use crate::rng::trial_rng;
use crate::signal_space::{build_constellation, build_sm_codebook, scm_alphabet, ConstellationKind};
use crate::{noise_variance, Error, Result};

/// Rows with fewer conditioned samples than this are flagged insufficient.
pub const MIN_CONDITIONED_SAMPLES: u64 = 100;

/// 2 x N spatial modulation with QPSK and ML detection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalSerConfig {
    pub n_rx: usize,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Symbol error rate split by whether the active antenna was detected
/// correctly. Intervals are Wilson 95%.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSerRow {
    pub snr_db: f64,
    pub trials: u64,
    pub n_correct: u64,
    pub ser_correct: f64,
    pub ser_correct_low: f64,
    pub ser_correct_high: f64,
    pub n_wrong: u64,
    pub ser_wrong: f64,
    pub ser_wrong_low: f64,
    pub ser_wrong_high: f64,
    /// Both conditioning sets hold at least [`MIN_CONDITIONED_SAMPLES`].
    pub sufficient: bool,
}

pub fn run_conditional_ser(cfg: &ConditionalSerConfig, workers: usize) -> Result<Vec<ConditionalSerRow>> {
    if cfg.snr_db.is_empty() || cfg.trials == 0 {
        return Err(Error::config("conditional SER needs a nonempty SNR grid and trials >= 1"));
    }
    let spec = ChannelSpec::new(FadingModel::Rayleigh, cfg.n_rx, 2);
    spec.validate()?;
    let sampler = spec.sampler()?;
    let a = scm_alphabet(
        &build_sm_codebook(2)?,
        &build_constellation(ConstellationKind::Psk, 4)?,
    );
    with_workers(workers, || {
        Ok(cfg
            .snr_db
            .iter()
            .enumerate()
            .map(|(idx, &snr)| {
                let sigma2 = noise_variance(snr);
                // (correct antenna, symbol errors | correct, wrong antenna, symbol errors | wrong)
                let counts = (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trial_rng(cfg.seed, idx as u64, t);
                        let sent = rng.random_range(0..a.len());
                        let h = sampler.sample(&mut rng).h;
                        let mut r = &h * DVector::from_column_slice(a.vector(sent));
                        r.iter_mut().for_each(|v| *v += cscg(&mut rng, sigma2));
                        let got = MlDetector::new(&h, &a).detect(&r).index;
                        let (c0, s0) = a.split(sent);
                        let (c1, s1) = a.split(got);
                        let sym_err = (s0 != s1) as u64;
                        if c0 == c1 {
                            [1, sym_err, 0, 0]
                        } else {
                            [0, 0, 1, sym_err]
                        }
                    })
                    .reduce(|| [0; 4], |x, y| [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]);
                let rate = |e: u64, n: u64| if n == 0 { f64::NAN } else { e as f64 / n as f64 };
                let (cl, ch) = wilson_interval(counts[1], counts[0]);
                let (wl, wh) = wilson_interval(counts[3], counts[2]);
                ConditionalSerRow {
                    snr_db: snr,
                    trials: cfg.trials,
                    n_correct: counts[0],
                    ser_correct: rate(counts[1], counts[0]),
                    ser_correct_low: cl,
                    ser_correct_high: ch,
                    n_wrong: counts[2],
                    ser_wrong: rate(counts[3], counts[2]),
                    ser_wrong_low: wl,
                    ser_wrong_high: wh,
                    sufficient: counts[0] >= MIN_CONDITIONED_SAMPLES
                        && counts[2] >= MIN_CONDITIONED_SAMPLES,
                }
            })
            .collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correct_antenna_helps_and_noiseless_is_clean() {
        let cfg = ConditionalSerConfig {
            n_rx: 2,
            snr_db: vec![5.0, 80.0],
            trials: 20_000,
            seed: 1,
        };
        let rows = run_conditional_ser(&cfg, 1).unwrap();
        assert!(rows[0].sufficient);
        assert!(rows[0].ser_correct < rows[0].ser_wrong);
        assert_eq!(rows[0].n_correct + rows[0].n_wrong, 20_000);
        assert_eq!(rows[1].ser_correct, 0.0);
        assert!(!rows[1].sufficient);
    }
}

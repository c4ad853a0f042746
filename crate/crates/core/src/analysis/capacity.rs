use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cscg, ChannelSampler, ChannelSpec};
use crate::rng::trial_rng;
use crate::signal_space::ScmAlphabet;
use crate::{Error, Result, C64};

/// Monte Carlo capacity estimate in bits per channel use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub capacity: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// Ergodic capacity of the uniform-input SCM alphabet,
/// `log L - (1/L) sum_i E[log2 sum_j exp((||u||^2 - ||u + H(x_i - x_j)||^2) / sigma^2)]`.
///
/// Each trial draws an independent `(H, u)` for every transmitted index `i`
/// and averages the `L` terms; the estimate is the mean over trials. Trial
/// `t` uses [`trial_rng`]`(seed, stream, t)`, so the value does not depend on
/// the rayon pool it runs in. The receiver knows `H` exactly; any CSI error
/// in `spec` is ignored.
pub fn capacity_mc(
    alphabet: &ScmAlphabet,
    spec: &ChannelSpec,
    sigma2: f64,
    trials: u64,
    seed: u64,
    stream: u64,
) -> Result<CapacityEstimate> {
    if trials == 0 {
        return Err(Error::config("capacity estimation needs at least one trial"));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::config(format!("sigma2 must be > 0, got {sigma2}")));
    }
    if spec.n_tx != alphabet.n_tx() {
        return Err(Error::config(format!(
            "channel has {} transmit antennas but the alphabet needs {}",
            spec.n_tx,
            alphabet.n_tx()
        )));
    }
    let sampler = spec.sampler()?;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, stream, t);
            capacity_trial(alphabet, &sampler, sigma2, &mut rng)
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(CapacityEstimate {
        capacity: mean,
        std_err: (var / n).sqrt(),
        trials,
    })
}

fn capacity_trial<R: Rng + ?Sized>(
    a: &ScmAlphabet,
    sampler: &ChannelSampler,
    sigma2: f64,
    rng: &mut R,
) -> f64 {
    let l = a.len();
    let log_l = (l as f64).log2();
    if l < 2 {
        return 0.0;
    }
    let cb = a.codebook();
    let points = a.constellation().points();
    let order = points.len();
    let n = sampler.spec().n_rx;
    let s_norm2: Vec<f64> = points.iter().map(|p| p.norm_sqr()).collect();
    let mut cols: Vec<DVector<C64>> = vec![DVector::zeros(n); cb.len()];
    let mut exps = vec![0.0; l];
    let mut acc = 0.0;
    for i in 0..l {
        let h = sampler.sample(rng).h;
        for (c, col) in cols.iter_mut().enumerate() {
            col.fill(C64::new(0.0, 0.0));
            for ant in 0..cb.m() {
                if cb.is_active(c, ant) {
                    *col += h.column(ant as usize);
                }
            }
            *col *= C64::new(a.gain(c), 0.0);
        }
        let u = DVector::from_fn(n, |_, _| cscg(rng, sigma2));
        let (ci, si) = a.split(i);
        let r = &cols[ci] * points[si] + &u;
        let r2 = r.norm_squared();
        let u2 = u.norm_squared();
        // ||r - t_c s||^2 = ||r||^2 + |s|^2 ||t_c||^2 - 2 Re(conj(s) t_c^H r)
        for (c, col) in cols.iter().enumerate() {
            let z = col.dotc(&r);
            let tn = col.norm_squared();
            for (s, p) in points.iter().enumerate() {
                let d2 = (r2 + s_norm2[s] * tn - 2.0 * (p.conj() * z).re).max(0.0);
                exps[c * order + s] = (u2 - d2) / sigma2;
            }
        }
        // the transmitted term is exactly zero in exact arithmetic
        exps[i] = 0.0;
        let max = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln();
        acc += lse / std::f64::consts::LN_2;
    }
    log_l - acc / l as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingModel;
    use crate::noise_variance;
    use crate::signal_space::{
        build_constellation, build_scm_codebook, scm_alphabet, ConstellationKind,
    };

    fn table5_bpsk() -> ScmAlphabet {
        scm_alphabet(
            &build_scm_codebook(3, 1, None).unwrap(),
            &build_constellation(ConstellationKind::Psk, 2).unwrap(),
        )
    }

    #[test]
    fn vanishes_at_very_low_snr() {
        let a = table5_bpsk();
        let spec = ChannelSpec::new(FadingModel::Rayleigh, 2, 3);
        let est = capacity_mc(&a, &spec, 1e8, 200, 1, 0).unwrap();
        assert!(est.capacity.abs() < 1e-3 + 3.0 * est.std_err, "{est:?}");
    }

    #[test]
    fn saturates_at_high_snr() {
        let a = table5_bpsk();
        let spec = ChannelSpec::new(FadingModel::Rayleigh, 2, 3);
        let est = capacity_mc(&a, &spec, noise_variance(50.0), 200, 1, 0).unwrap();
        assert!((est.capacity - 2.0).abs() < 1e-3, "{est:?}");
    }

    #[test]
    fn deterministic_and_pool_independent() {
        let a = table5_bpsk();
        let spec = ChannelSpec::new(FadingModel::Rician { k: 3.0 }, 2, 3).with_correlation(0.3, 0.3);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| capacity_mc(&a, &spec, noise_variance(5.0), 300, 9, 2).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.capacity.to_bits(), four.capacity.to_bits());
        assert_eq!(one.std_err.to_bits(), four.std_err.to_bits());
    }

    #[test]
    fn lower_bound_holds_against_monte_carlo() {
        use crate::analysis::{capacity_lower_bound, BoundInput};
        use crate::channel::moments;
        let a = table5_bpsk();
        let spec = ChannelSpec::new(FadingModel::Rayleigh, 2, 3);
        let s2 = noise_variance(30.0);
        let est = capacity_mc(&a, &spec, s2, 2000, 3, 0).unwrap();
        let mo = moments(&spec).unwrap();
        let lb = capacity_lower_bound(&BoundInput { sigma2: s2, moments: &mo, alphabet: &a, gamma2: 0.0 }).unwrap();
        assert!(lb <= est.capacity + 3.0 * est.std_err, "{lb} vs {est:?}");
    }

    #[test]
    fn strict_bound_holds_where_the_short_form_overshoots() {
        use crate::analysis::{capacity_lower_bound, capacity_lower_bound_strict, BoundInput};
        use crate::channel::moments;
        let a = scm_alphabet(
            &build_scm_codebook(8, 4, None).unwrap(),
            &build_constellation(ConstellationKind::Qam, 16).unwrap(),
        );
        let spec = ChannelSpec::new(FadingModel::Rician { k: 7.0 }, 1, 8).with_correlation(0.0, 0.5);
        let mo = moments(&spec).unwrap();
        let s2 = noise_variance(35.0);
        let est = capacity_mc(&a, &spec, s2, 1000, 4, 0).unwrap();
        let input = BoundInput { sigma2: s2, moments: &mo, alphabet: &a, gamma2: 0.0 };
        let short = capacity_lower_bound(&input).unwrap();
        let strict = capacity_lower_bound_strict(&input).unwrap();
        assert!((short - strict - (std::f64::consts::E / 2.0).log2()).abs() < 1e-12);
        assert!(strict <= est.capacity, "{strict} vs {est:?}");
        assert!(short > est.capacity + 3.0 * est.std_err, "{short} vs {est:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = table5_bpsk();
        let spec = ChannelSpec::new(FadingModel::Rayleigh, 2, 3);
        assert!(capacity_mc(&a, &spec, 1.0, 0, 1, 0).is_err());
        assert!(capacity_mc(&a, &spec, 0.0, 1, 1, 0).is_err());
        assert!(capacity_mc(&a, &ChannelSpec::new(FadingModel::Rayleigh, 2, 4), 1.0, 1, 1, 0).is_err());
    }
}

//! Monte Carlo harness: BER and capacity sweeps and the conditional-SER
//! experiment. All results are reproducible for a fixed seed regardless of
//! the number of worker threads.

mod ber;
mod capacity;
mod conditional;
mod scheme;

pub use ber::{run_ber_sweep, run_ber_trial, run_ber_trial_with, BerRow, SweepConfig, BATCH_TRIALS};
pub use capacity::{run_capacity_sweep, CapacityRow, CapacitySweepConfig};
pub use conditional::{
    run_conditional_ser, ConditionalSerConfig, ConditionalSerRow, MIN_CONDITIONED_SAMPLES,
};
pub use scheme::{rate_matched_order, Detector, DetectorKind, Scheme, SchemeSpec};

use crate::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` out of `n`.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The endpoints are exact at p = 0 and p = 1; avoid cancellation there.
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Run `f` on a dedicated rayon pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::config("worker count must be >= 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start {workers} workers: {e}")))?
        .install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wilson_reference_values() {
        // 10 / 100: standard tables give [0.0552, 0.1744].
        let (lo, hi) = wilson_interval(10, 100);
        assert_abs_diff_eq!(lo, 0.05523, epsilon = 1e-4);
        assert_abs_diff_eq!(hi, 0.17437, epsilon = 1e-4);
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
        assert_eq!(wilson_interval(50, 50).1, 1.0);
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Command, ExperimentConfig, OutputSection};
use super::io::{read_sidecar, sidecar_path, write_atomic, Sidecar, Table};
use crate::analysis::{BoundEvaluator, QuadratureRule};
use crate::channel::{moments, ChannelSpec};
use crate::signal_space::ScmAlphabet;
use crate::simulate::{run_ber_sweep, run_capacity_sweep, run_conditional_ser};
use crate::{noise_variance, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub snr_db: f64,
    /// NaN under imperfect CSI, where the bound is not defined.
    pub capacity_lb: f64,
    pub ber_ub: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaryBerRow {
    /// Value of the varied channel parameter.
    pub value: f64,
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// Capacity lower bound and BER union bound on an SNR grid.
pub fn bounds_table(
    alphabet: &ScmAlphabet,
    channel: &ChannelSpec,
    snr_db: &[f64],
    quad_nodes: usize,
) -> Result<Vec<BoundsRow>> {
    let mo = moments(channel)?;
    let eval = BoundEvaluator::new(&mo, alphabet, channel.csi_error_var)?;
    let quad = QuadratureRule::gauss_legendre(quad_nodes)?;
    snr_db
        .iter()
        .map(|&snr| {
            let sigma2 = noise_variance(snr);
            let capacity_lb = if channel.csi_error_var == 0.0 {
                eval.capacity_lower_bound(sigma2)?
            } else {
                f64::NAN
            };
            Ok(BoundsRow {
                snr_db: snr,
                capacity_lb,
                ber_ub: eval.ber_union_bound(sigma2, &quad)?,
            })
        })
        .collect()
}

/// Validate and run `command`; nothing is written.
pub fn run(command: Command, cfg: &ExperimentConfig, workers: usize) -> Result<Table> {
    cfg.validate(command)?;
    Ok(match command {
        Command::Ber => match &cfg.vary {
            None => Table::Ber(run_ber_sweep(&cfg.ber_config()?, workers)?),
            Some(v) => {
                let mut rows = Vec::new();
                for &value in &v.values {
                    let sweep = cfg.ber_config_for(&v.apply(&cfg.channel, value)?)?;
                    rows.extend(run_ber_sweep(&sweep, workers)?.into_iter().map(|r| VaryBerRow {
                        value,
                        snr_db: r.snr_db,
                        trials: r.trials,
                        bit_errors: r.bit_errors,
                        ber: r.ber,
                        ci95_low: r.ci95_low,
                        ci95_high: r.ci95_high,
                    }));
                }
                Table::VaryBer(rows)
            }
        },
        Command::Capacity => Table::Capacity(run_capacity_sweep(&cfg.capacity_config()?, workers)?),
        Command::Bounds => {
            let a = cfg.scheme()?.build()?.alphabet;
            let ch = cfg.channel.spec(a.n_tx())?;
            Table::Bounds(bounds_table(&a, &ch, &cfg.sweep.snr_db, cfg.sweep.quad_nodes)?)
        }
        Command::ConditionalSer => {
            Table::ConditionalSer(run_conditional_ser(&cfg.conditional_config()?, workers)?)
        }
    })
}

/// Run `command` and write the CSV and its sidecar. Returns the CSV path.
///
/// On failure no output file is left behind.
pub fn execute(command: Command, cfg: &ExperimentConfig, workers: usize) -> Result<PathBuf> {
    cfg.validate(command)?;
    let csv = PathBuf::from(cfg.output_path()?);
    let table = run(command, cfg, workers)?;
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    write_atomic(&csv, &table.to_csv())?;
    if let Err(e) = write_atomic(sidecar_path(&csv), &Sidecar::new(command, cfg).to_json()) {
        let _ = std::fs::remove_file(&csv);
        return Err(e);
    }
    Ok(csv)
}

/// Re-run the experiment recorded in a sidecar, optionally to a new path.
pub fn replay(sidecar: impl AsRef<Path>, out: Option<&str>, workers: usize) -> Result<PathBuf> {
    let sc = read_sidecar(sidecar)?;
    let mut cfg = sc.config;
    if let Some(out) = out {
        cfg.output = Some(OutputSection { path: out.to_string() });
    }
    execute(sc.command, &cfg, workers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{read_table, ChannelSection, SweepSection};
    use crate::signal_space::ConstellationKind;
    use crate::simulate::SchemeSpec;

    fn cfg(dir: &Path) -> ExperimentConfig {
        let mut sweep = SweepSection::new(vec![0.0, 6.0]);
        sweep.max_trials = 3000;
        sweep.seed = 9;
        ExperimentConfig {
            scheme: Some(SchemeSpec::scm(3, 1, ConstellationKind::Psk, 2)),
            channel: ChannelSection::rayleigh(2),
            sweep,
            vary: None,
            output: Some(OutputSection {
                path: dir.join("ber.csv").display().to_string(),
            }),
        }
    }

    #[test]
    fn execute_then_replay_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(dir.path());
        let csv = execute(Command::Ber, &c, 1).unwrap();
        let other = dir.path().join("again.csv");
        let again = replay(sidecar_path(&csv), Some(other.to_str().unwrap()), 2).unwrap();
        assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());
        assert!(matches!(read_table(&std::fs::read(&csv).unwrap()).unwrap(), Table::Ber(r) if r.len() == 2));
    }

    #[test]
    fn failed_validation_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(dir.path());
        c.sweep.snr_db.clear();
        assert!(execute(Command::Ber, &c, 1).is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn bounds_mark_capacity_undefined_under_csi_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(dir.path());
        let Table::Bounds(perfect) = run(Command::Bounds, &c, 1).unwrap() else { panic!() };
        c.channel.gamma2 = 0.01;
        let Table::Bounds(icsi) = run(Command::Bounds, &c, 1).unwrap() else { panic!() };
        for (p, i) in perfect.iter().zip(&icsi) {
            assert!(p.capacity_lb.is_finite() && i.capacity_lb.is_nan());
            assert!(i.ber_ub >= p.ber_ub);
        }
    }
}

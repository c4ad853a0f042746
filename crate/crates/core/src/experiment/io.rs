use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::{Command, ExperimentConfig};
use super::run::{BoundsRow, VaryBerRow};
use crate::simulate::{BerRow, CapacityRow, ConditionalSerRow};
use crate::{Error, Result};

pub const BER_HEADER: &str = "snr_db,trials,bit_errors,ber,ci95_low,ci95_high";
pub const VARY_BER_HEADER: &str = "value,snr_db,trials,bit_errors,ber,ci95_low,ci95_high";
pub const CAPACITY_HEADER: &str = "snr_db,capacity_bits,std_err";
pub const BOUNDS_HEADER: &str = "snr_db,capacity_lb,ber_ub";
pub const CONDITIONAL_HEADER: &str = "snr_db,trials,n_correct,ser_correct,ser_correct_low,ser_correct_high,\
n_wrong,ser_wrong,ser_wrong_low,ser_wrong_high,sufficient";

/// The rows produced by one command.
#[derive(Clone, Debug, PartialEq)]
pub enum Table {
    Ber(Vec<BerRow>),
    VaryBer(Vec<VaryBerRow>),
    Capacity(Vec<CapacityRow>),
    Bounds(Vec<BoundsRow>),
    ConditionalSer(Vec<ConditionalSerRow>),
}

impl Table {
    pub fn header(&self) -> &'static str {
        match self {
            Table::Ber(_) => BER_HEADER,
            Table::VaryBer(_) => VARY_BER_HEADER,
            Table::Capacity(_) => CAPACITY_HEADER,
            Table::Bounds(_) => BOUNDS_HEADER,
            Table::ConditionalSer(_) => CONDITIONAL_HEADER,
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        match self {
            Table::Ber(r) => rows_to_csv(r),
            Table::VaryBer(r) => rows_to_csv(r),
            Table::Capacity(r) => rows_to_csv(r),
            Table::Bounds(r) => rows_to_csv(r),
            Table::ConditionalSer(r) => rows_to_csv(r),
        }
    }
}

fn rows_to_csv<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("plain rows always serialize");
    }
    w.into_inner().expect("writing to memory cannot fail")
}

fn rows_from_csv<T: DeserializeOwned>(bytes: &[u8], header: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(bytes);
    let got = r
        .headers()
        .map_err(|e| Error::validation(format!("bad CSV: {e}")))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if got != header {
        return Err(Error::validation(format!("unexpected CSV header `{got}`, want `{header}`")));
    }
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::validation(format!("bad CSV row: {e}")))
}

/// Parse a CSV written by this tool, identifying the table by its header.
pub fn read_table(bytes: &[u8]) -> Result<Table> {
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let first = String::from_utf8_lossy(first);
    Ok(match first.trim_end() {
        BER_HEADER => Table::Ber(rows_from_csv(bytes, BER_HEADER)?),
        VARY_BER_HEADER => Table::VaryBer(rows_from_csv(bytes, VARY_BER_HEADER)?),
        CAPACITY_HEADER => Table::Capacity(rows_from_csv(bytes, CAPACITY_HEADER)?),
        BOUNDS_HEADER => Table::Bounds(rows_from_csv(bytes, BOUNDS_HEADER)?),
        CONDITIONAL_HEADER => Table::ConditionalSer(rows_from_csv(bytes, CONDITIONAL_HEADER)?),
        other => return Err(Error::validation(format!("unrecognised CSV header `{other}`"))),
    })
}

/// Provenance record written next to every CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub seed: u64,
    /// Fully resolved config, flag overrides included.
    pub config: ExperimentConfig,
}

impl Sidecar {
    pub fn new(command: Command, config: &ExperimentConfig) -> Self {
        Sidecar {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            seed: config.sweep.seed,
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut s = serde_json::to_vec_pretty(self).expect("sidecars always serialize");
        s.push(b'\n');
        s
    }
}

pub fn read_sidecar(path: impl AsRef<Path>) -> Result<Sidecar> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let sc: Sidecar = serde_json::from_slice(&bytes)
        .map_err(|e| Error::validation(format!("{}: bad sidecar: {e}", path.display())))?;
    if sc.seed != sc.config.sweep.seed {
        return Err(Error::validation("sidecar seed disagrees with its config"));
    }
    Ok(sc)
}

/// `out.csv` -> `out.json`.
pub fn sidecar_path(csv: impl AsRef<Path>) -> PathBuf {
    csv.as_ref().with_extension("json")
}

/// Write via a temporary sibling and rename, so readers never see a
/// partial file. The temporary is removed on failure.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::config(format!("output path `{}` has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}

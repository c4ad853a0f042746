use serde::{Deserialize, Serialize};

use crate::detect::SuboptimalConfig;
use crate::signal_space::{
    build_constellation, build_gsm_codebook, build_scm_codebook, build_sm_codebook,
    build_table_codebook, builtin_table, parse_table, scm_alphabet, CodebookScheme,
    ConstellationKind, ScmAlphabet, ScmVariant, SpatialCodebook,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    #[default]
    Ml,
    Suboptimal,
}

/// Serializable description of a transmission scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub codebook: CodebookScheme,
    /// Transmit antennas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Spatial bits (SCM only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Active antennas (GSM only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<ScmVariant>,
    /// Built-in table name (`table1`..`table5`) or path to a table file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    pub constellation: ConstellationKind,
    pub order: usize,
    #[serde(default)]
    pub detector: DetectorKind,
    /// Candidate-set size `T` for the suboptimal detector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
}

impl SchemeSpec {
    pub fn scm(m: u32, k: u32, constellation: ConstellationKind, order: usize) -> Self {
        SchemeSpec {
            codebook: CodebookScheme::Scm,
            m: Some(m),
            k: Some(k),
            w: None,
            variant: None,
            table: None,
            constellation,
            order,
            detector: DetectorKind::Ml,
            candidates: None,
        }
    }

    pub fn gsm(m: u32, w: u32, constellation: ConstellationKind, order: usize) -> Self {
        SchemeSpec {
            codebook: CodebookScheme::Gsm,
            k: None,
            w: Some(w),
            ..SchemeSpec::scm(m, 0, constellation, order)
        }
    }

    pub fn sm(m: u32, constellation: ConstellationKind, order: usize) -> Self {
        SchemeSpec {
            codebook: CodebookScheme::Sm,
            k: None,
            ..SchemeSpec::scm(m, 0, constellation, order)
        }
    }

    pub fn with_suboptimal(mut self, candidates: usize) -> Self {
        self.detector = DetectorKind::Suboptimal;
        self.candidates = Some(candidates);
        self
    }

    pub fn codebook(&self) -> Result<SpatialCodebook> {
        let need = |v: Option<u32>, name: &str| {
            v.ok_or_else(|| Error::config(format!("{:?} codebook needs `{name}`", self.codebook)))
        };
        match self.codebook {
            CodebookScheme::Scm => {
                build_scm_codebook(need(self.m, "m")?, need(self.k, "k")?, self.variant)
            }
            CodebookScheme::Sm => build_sm_codebook(need(self.m, "m")?),
            CodebookScheme::Gsm => build_gsm_codebook(need(self.m, "m")?, need(self.w, "w")?),
            CodebookScheme::Table => {
                let name = self
                    .table
                    .as_deref()
                    .ok_or_else(|| Error::config("table codebook needs `table`"))?;
                let text = match builtin_table(name) {
                    Some(t) => t.to_string(),
                    None => std::fs::read_to_string(name).map_err(|source| Error::Io {
                        path: name.to_string(),
                        source,
                    })?,
                };
                build_table_codebook(&parse_table(&text)?)
            }
        }
    }

    pub fn build(&self) -> Result<Scheme> {
        let cb = self.codebook()?;
        let cons = build_constellation(self.constellation, self.order)?;
        let alphabet = scm_alphabet(&cb, &cons);
        let detector = match self.detector {
            DetectorKind::Ml => {
                if self.candidates.is_some() {
                    return Err(Error::config("`candidates` only applies to the suboptimal detector"));
                }
                Detector::Ml
            }
            DetectorKind::Suboptimal => {
                let t = self
                    .candidates
                    .ok_or_else(|| Error::config("suboptimal detector needs `candidates`"))?;
                Detector::Suboptimal(SuboptimalConfig::new(t, &cb)?)
            }
        };
        Ok(Scheme { alphabet, detector })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    Ml,
    Suboptimal(SuboptimalConfig),
}

/// A built alphabet plus the detector used at the receiver.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub alphabet: ScmAlphabet,
    pub detector: Detector,
}

/// Constellation order that brings `k` spatial bits up to `rate` bits per use.
pub fn rate_matched_order(rate: u32, k: u32) -> Result<usize> {
    if rate <= k {
        return Err(Error::config(format!(
            "rate {rate} leaves no bits for the constellation after {k} spatial bits"
        )));
    }
    Ok(1usize << (rate - k))
}

//! Joint ML detection and the angle-pruned two-step detector.

use nalgebra::{DMatrix, DVector};

use crate::signal_space::{ScmAlphabet, SpatialCodebook};
use crate::{Error, Result, C64};

/// A detector decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Detection {
    /// Alphabet index of the decided vector.
    pub index: usize,
    /// Spatial (codeword) label bits.
    pub codeword_label: u32,
    /// APM symbol label bits.
    pub apm_label: u32,
}

impl Detection {
    pub fn from_index(a: &ScmAlphabet, index: usize) -> Self {
        let (c, s) = a.split(index);
        Detection {
            index,
            codeword_label: a.codebook().labels()[c],
            apm_label: s as u32,
        }
    }

    /// Full bit label, spatial bits first.
    pub fn label(&self, a: &ScmAlphabet) -> u32 {
        (self.codeword_label << a.constellation().bits()) | self.apm_label
    }
}

/// Candidate-set size `T` of the suboptimal detector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuboptimalConfig {
    pub candidates: usize,
}

impl SuboptimalConfig {
    pub fn new(candidates: usize, cb: &SpatialCodebook) -> Result<Self> {
        if candidates == 0 || candidates > cb.len() {
            return Err(Error::config(format!(
                "candidate set size must lie in [1, {}], got {candidates}",
                cb.len()
            )));
        }
        Ok(SuboptimalConfig { candidates })
    }
}

/// Reference ML detector: direct `argmin_i ||r - H x_i||^2`.
pub fn ml_detect(r: &DVector<C64>, h_hat: &DMatrix<C64>, a: &ScmAlphabet) -> Detection {
    let mut best = (f64::INFINITY, 0usize);
    for (i, x) in a.vectors().iter().enumerate() {
        let hx = h_hat * DVector::from_column_slice(x);
        let d = (r - hx).norm_squared();
        if d < best.0 {
            best = (d, i);
        }
    }
    Detection::from_index(a, best.1)
}

/// ML detector prepared for one channel realisation.
///
/// Uses `||r - t_c s||^2 = ||r||^2 + |s|^2 ||t_c||^2 - 2 Re(conj(s) t_c^H r)` with
/// `t_c = H c / sqrt(w(c))`, so each trial costs `O(N 2^k + L)`.
#[derive(Clone, Debug)]
pub struct MlDetector<'a> {
    alphabet: &'a ScmAlphabet,
    /// `t_c` per codeword.
    t: Vec<DVector<C64>>,
    /// `||t_c||^2` per codeword.
    t_norm2: Vec<f64>,
    /// `|s|^2` per symbol label.
    s_norm2: Vec<f64>,
}

impl<'a> MlDetector<'a> {
    pub fn new(h_hat: &DMatrix<C64>, alphabet: &'a ScmAlphabet) -> Self {
        let cb = alphabet.codebook();
        let t: Vec<DVector<C64>> = (0..cb.len())
            .map(|c| {
                let mut col = DVector::zeros(h_hat.nrows());
                for ant in 0..cb.m() {
                    if cb.is_active(c, ant) {
                        col += h_hat.column(ant as usize);
                    }
                }
                col * C64::new(alphabet.gain(c), 0.0)
            })
            .collect();
        let t_norm2 = t.iter().map(|v| v.norm_squared()).collect();
        let s_norm2 = alphabet
            .constellation()
            .points()
            .iter()
            .map(|p| p.norm_sqr())
            .collect();
        MlDetector {
            alphabet,
            t,
            t_norm2,
            s_norm2,
        }
    }

    /// Effective columns `H c / sqrt(w(c))`.
    pub fn effective_columns(&self) -> &[DVector<C64>] {
        &self.t
    }

    /// Best `(metric, index)` over the given codewords and all symbols.
    /// The metric omits the constant `||r||^2`.
    fn search(&self, r: &DVector<C64>, codewords: impl Iterator<Item = usize>) -> (f64, usize) {
        let points = self.alphabet.constellation().points();
        let order = points.len();
        let mut best = (f64::INFINITY, usize::MAX);
        for c in codewords {
            let z = self.t[c].dotc(r);
            let tn = self.t_norm2[c];
            for (s, p) in points.iter().enumerate() {
                let metric = self.s_norm2[s] * tn - 2.0 * (p.conj() * z).re;
                let idx = c * order + s;
                if metric < best.0 || (metric == best.0 && idx < best.1) {
                    best = (metric, idx);
                }
            }
        }
        best
    }

    pub fn detect(&self, r: &DVector<C64>) -> Detection {
        let (_, idx) = self.search(r, 0..self.t.len());
        Detection::from_index(self.alphabet, idx)
    }

    /// Angles `alpha_c` between `t_c` and `r`, then the `T` smallest.
    pub fn candidates(&self, r: &DVector<C64>, t: usize) -> Vec<usize> {
        let rn = r.norm();
        if rn == 0.0 {
            return (0..t.min(self.t.len())).collect();
        }
        let mut scored: Vec<(f64, usize)> = self
            .t
            .iter()
            .enumerate()
            .map(|(c, tc)| (angle(tc, r, rn), c))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.into_iter().take(t).map(|(_, c)| c).collect()
    }

    pub fn detect_suboptimal(&self, r: &DVector<C64>, cfg: SuboptimalConfig) -> Detection {
        if cfg.candidates >= self.t.len() {
            return self.detect(r);
        }
        let cand = self.candidates(r, cfg.candidates);
        let (_, idx) = self.search(r, cand.into_iter());
        Detection::from_index(self.alphabet, idx)
    }
}

fn angle(t: &DVector<C64>, r: &DVector<C64>, rn: f64) -> f64 {
    let tn = t.norm();
    if tn == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    (t.dotc(r).norm() / (tn * rn)).clamp(0.0, 1.0).acos()
}

/// Indices of the `T` codewords whose columns `H c` make the smallest angle
/// with `r`, in ascending-angle order.
///
/// The angle is scale-invariant, so using `H c` or `H c / sqrt(w(c))` gives
/// the same set.
pub fn candidate_set(
    r: &DVector<C64>,
    h_hat: &DMatrix<C64>,
    cb: &SpatialCodebook,
    t: usize,
) -> Result<Vec<usize>> {
    if t == 0 || t > cb.len() {
        return Err(Error::config(format!(
            "candidate set size must lie in [1, {}], got {t}",
            cb.len()
        )));
    }
    let rn = r.norm();
    if rn == 0.0 {
        return Ok((0..t).collect());
    }
    let mut scored: Vec<(f64, usize)> = (0..cb.len())
        .map(|c| {
            let mut col = DVector::zeros(h_hat.nrows());
            for ant in 0..cb.m() {
                if cb.is_active(c, ant) {
                    col += h_hat.column(ant as usize);
                }
            }
            (angle(&col, r, rn), c)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(t).map(|(_, c)| c).collect())
}

/// ML restricted to the candidate codewords times the full constellation.
pub fn suboptimal_detect(
    r: &DVector<C64>,
    h_hat: &DMatrix<C64>,
    a: &ScmAlphabet,
    cfg: SuboptimalConfig,
) -> Result<Detection> {
    let cand = candidate_set(r, h_hat, a.codebook(), cfg.candidates)?;
    let det = MlDetector::new(h_hat, a);
    let (_, idx) = det.search(r, cand.into_iter());
    Ok(Detection::from_index(a, idx))
}

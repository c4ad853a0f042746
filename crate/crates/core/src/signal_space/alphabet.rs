use super::{Constellation, SpatialCodebook};
use crate::C64;

/// The `L = 2^k |S|` composite transmit vectors `x = c s / sqrt(w(c))`.
///
/// Index layout is `codeword_index * |S| + symbol_label`, and the bit label
/// of each vector is the spatial label followed by the APM label.
#[derive(Clone, Debug)]
pub struct ScmAlphabet {
    codebook: SpatialCodebook,
    constellation: Constellation,
    vectors: Vec<Vec<C64>>,
    labels: Vec<u32>,
    /// `1 / sqrt(w(c))` per codeword.
    gains: Vec<f64>,
}

/// Combine a spatial codebook and a constellation into the SCM alphabet.
pub fn scm_alphabet(cb: &SpatialCodebook, cons: &Constellation) -> ScmAlphabet {
    let m = cb.m() as usize;
    let s = cons.order();
    let gains: Vec<f64> = (0..cb.len())
        .map(|c| (cb.weight(c) as f64).sqrt().recip())
        .collect();
    let mut vectors = Vec::with_capacity(cb.len() * s);
    let mut labels = Vec::with_capacity(cb.len() * s);
    for (c, &g) in gains.iter().enumerate() {
        for sym in 0..s {
            let amp = cons.point(sym) * g;
            let x = (0..m as u32)
                .map(|a| if cb.is_active(c, a) { amp } else { C64::new(0.0, 0.0) })
                .collect();
            vectors.push(x);
            labels.push((cb.labels()[c] << cons.bits()) | sym as u32);
        }
    }
    ScmAlphabet {
        codebook: cb.clone(),
        constellation: cons.clone(),
        vectors,
        labels,
        gains,
    }
}

impl ScmAlphabet {
    /// Alphabet size `L`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Bits per channel use, `log2 L = k + log2 |S|`.
    pub fn bits(&self) -> u32 {
        self.codebook.k() + self.constellation.bits()
    }

    pub fn n_tx(&self) -> usize {
        self.codebook.m() as usize
    }

    pub fn codebook(&self) -> &SpatialCodebook {
        &self.codebook
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[C64] {
        &self.vectors[i]
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// `1 / sqrt(w(c))` for codeword `c`.
    pub fn gain(&self, codeword: usize) -> f64 {
        self.gains[codeword]
    }

    pub fn index(&self, codeword: usize, symbol: usize) -> usize {
        codeword * self.constellation.order() + symbol
    }

    /// Split an alphabet index into `(codeword index, symbol label)`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        let s = self.constellation.order();
        (i / s, i % s)
    }

    /// `x_i - x_j`.
    pub fn delta(&self, i: usize, j: usize) -> Vec<C64> {
        self.vectors[i]
            .iter()
            .zip(&self.vectors[j])
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `min_{i != j} ||x_i - x_j||^2`.
    pub fn min_sq_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in 0..i {
                let d: f64 = self.delta(i, j).iter().map(|v| v.norm_sqr()).sum();
                best = best.min(d);
            }
        }
        best
    }

    /// `sum_i sum_j d(x_i, x_j)` over bit labels.
    pub fn distance_sum(&self) -> u64 {
        let mut total = 0u64;
        for i in 0..self.len() {
            for j in 0..self.len() {
                total += label_distance(self, i, j) as u64;
            }
        }
        total
    }

    /// Mean of `||x_i||^2` over the alphabet.
    pub fn average_power(&self) -> f64 {
        self.vectors
            .iter()
            .map(|x| x.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / self.len() as f64
    }
}

/// Hamming distance between the bit labels of `x_i` and `x_j`.
pub fn label_distance(a: &ScmAlphabet, i: usize, j: usize) -> u32 {
    (a.labels[i] ^ a.labels[j]).count_ones()
}

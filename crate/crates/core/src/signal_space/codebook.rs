use serde::{Deserialize, Serialize};

use super::{bits_to_string, parse_bits};
use crate::{Error, Result};

const TABLE_SM_4: &str = include_str!("../../fixtures/table1_sm_4.txt");
const TABLE_SCM_4_1_D3: &str = include_str!("../../fixtures/table2_scm_4_1_d3.txt");
const TABLE_SCM_4_1_D4: &str = include_str!("../../fixtures/table3_scm_4_1_d4.txt");
const TABLE_GSM_3_2: &str = include_str!("../../fixtures/table4_gsm_3_2.txt");
const TABLE_SCM_3_1: &str = include_str!("../../fixtures/table5_scm_3_1.txt");

/// Largest antenna count accepted by the generators.
pub const MAX_ANTENNAS: u32 = 24;
/// Largest number of spatial bits accepted by the generators.
pub const MAX_SPATIAL_BITS: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodebookScheme {
    Scm,
    Sm,
    Gsm,
    Table,
}

/// Which of the two published (4,1) codebooks to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScmVariant {
    D3,
    D4,
}

/// A set of `2^k` distinct, nonzero antenna activation patterns of length `M`.
///
/// Codeword bit `M - 1 - l` is antenna `l` (0-based), i.e. the bit string is
/// read left to right starting from antenna #1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialCodebook {
    m: u32,
    k: u32,
    codewords: Vec<u32>,
    labels: Vec<u32>,
    scheme: CodebookScheme,
}

impl SpatialCodebook {
    fn new(
        m: u32,
        k: u32,
        codewords: Vec<u32>,
        labels: Vec<u32>,
        scheme: CodebookScheme,
    ) -> Result<Self> {
        let cb = SpatialCodebook {
            m,
            k,
            codewords,
            labels,
            scheme,
        };
        cb.check()?;
        Ok(cb)
    }

    fn check(&self) -> Result<()> {
        if self.codewords.len() != 1usize << self.k || self.labels.len() != self.codewords.len() {
            return Err(Error::validation(format!(
                "codebook must hold 2^k = {} codewords, got {}",
                1usize << self.k,
                self.codewords.len()
            )));
        }
        let mut seen_cw = std::collections::HashSet::new();
        let mut seen_label = std::collections::HashSet::new();
        for (&c, &l) in self.codewords.iter().zip(&self.labels) {
            if c == 0 {
                return Err(Error::validation("all-zero activation pattern"));
            }
            if c >> self.m != 0 || l >> self.k != 0 {
                return Err(Error::validation("codeword or label wider than declared"));
            }
            if !seen_cw.insert(c) || !seen_label.insert(l) {
                return Err(Error::validation("duplicate codeword or label"));
            }
        }
        Ok(())
    }

    /// Number of transmit antennas (code length).
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Spatial bits per channel use.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[u32] {
        &self.codewords
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn scheme(&self) -> CodebookScheme {
        self.scheme
    }

    /// Hamming weight of codeword `idx`, i.e. the number of active antennas.
    pub fn weight(&self, idx: usize) -> u32 {
        self.codewords[idx].count_ones()
    }

    /// Whether antenna `antenna` (0-based) is active in codeword `idx`.
    pub fn is_active(&self, idx: usize, antenna: u32) -> bool {
        (self.codewords[idx] >> (self.m - 1 - antenna)) & 1 == 1
    }

    pub fn codeword_string(&self, idx: usize) -> String {
        bits_to_string(self.codewords[idx], self.m)
    }

    pub fn label_string(&self, idx: usize) -> String {
        bits_to_string(self.labels[idx], self.k)
    }

    /// Rows in the fixture file format, `<label> <codeword>` per line.
    pub fn to_table(&self) -> String {
        (0..self.len())
            .map(|i| format!("{} {}\n", self.label_string(i), self.codeword_string(i)))
            .collect()
    }
}

/// Minimum pairwise Hamming distance over all codeword pairs.
pub fn min_hamming_distance(cb: &SpatialCodebook) -> Result<u32> {
    let cw = cb.codewords();
    if cw.len() < 2 {
        return Err(Error::validation(
            "minimum distance is undefined for fewer than two codewords",
        ));
    }
    let mut best = u32::MAX;
    for i in 0..cw.len() {
        for j in 0..i {
            best = best.min((cw[i] ^ cw[j]).count_ones());
        }
    }
    Ok(best)
}

/// Conventional SM: one active antenna, antenna `l` carries label `l - 1`.
pub fn build_sm_codebook(m: u32) -> Result<SpatialCodebook> {
    if m < 2 || !m.is_power_of_two() || m > MAX_ANTENNAS {
        return Err(Error::config(format!(
            "SM needs a power-of-two antenna count in 2..={MAX_ANTENNAS}, got {m}"
        )));
    }
    let k = m.trailing_zeros();
    let codewords = (0..m).map(|l| 1u32 << (m - 1 - l)).collect();
    let labels = (0..m).collect();
    SpatialCodebook::new(m, k, codewords, labels, CodebookScheme::Sm)
}

fn binomial(n: u32, r: u32) -> u64 {
    (0..r as u64).fold(1u64, |acc, i| acc * (n as u64 - i) / (i + 1))
}

/// Conventional GSM with `w` active antennas out of `m`.
///
/// Uses the published table for `(3, 2)`; otherwise the first `2^k` weight-`w`
/// patterns in colexicographic order of their antenna sets.
pub fn build_gsm_codebook(m: u32, w: u32) -> Result<SpatialCodebook> {
    if w == 0 || w >= m || m > MAX_ANTENNAS {
        return Err(Error::config(format!(
            "GSM needs 1 <= W < M <= {MAX_ANTENNAS}, got M={m}, W={w}"
        )));
    }
    let combos = binomial(m, w);
    if combos < 2 {
        return Err(Error::config(format!("C({m},{w}) = {combos} < 2")));
    }
    if (m, w) == (3, 2) {
        let mut cb = build_table_codebook(&parse_table(TABLE_GSM_3_2)?)?;
        cb.scheme = CodebookScheme::Gsm;
        return Ok(cb);
    }
    let k = (63 - combos.leading_zeros()).min(MAX_SPATIAL_BITS);
    let count = 1usize << k;
    // Gosper's hack walks weight-w integers in increasing order, which is
    // colex order when bit `a` stands for antenna `a`.
    let mut codewords = Vec::with_capacity(count);
    let mut set: u64 = (1u64 << w) - 1;
    while codewords.len() < count {
        let mut mask = 0u32;
        for a in 0..m {
            if (set >> a) & 1 == 1 {
                mask |= 1 << (m - 1 - a);
            }
        }
        codewords.push(mask);
        let c = set & set.wrapping_neg();
        let r = set + c;
        set = (((r ^ set) >> 2) / c) | r;
    }
    let labels = (0..count as u32).collect();
    SpatialCodebook::new(m, k, codewords, labels, CodebookScheme::Gsm)
}

fn encode(generator: &[u32], message: u32) -> u32 {
    let k = generator.len();
    generator
        .iter()
        .enumerate()
        .filter(|(row, _)| (message >> (k - 1 - row)) & 1 == 1)
        .fold(0, |acc, (_, g)| acc ^ g)
}

fn coset_codebook(m: u32, generator: &[u32], offset: u32) -> Result<SpatialCodebook> {
    let k = generator.len() as u32;
    let codewords = (0..1u32 << k).map(|msg| encode(generator, msg) ^ offset).collect();
    let labels = (0..1u32 << k).collect();
    SpatialCodebook::new(m, k, codewords, labels, CodebookScheme::Scm)
}

// Systematic (7,4) Hamming code, d = 3.
const HAMMING_7_4: [u32; 4] = [0b1000110, 0b0100101, 0b0010011, 0b0001111];
// Its dual, the (7,3) simplex code: every nonzero word has weight 4.
const SIMPLEX_7_3: [u32; 3] = [0b1101100, 0b1011010, 0b0111001];
// (8,4) extended Hamming code, d = 4.
const EXT_HAMMING_8_4: [u32; 4] = [0b10001101, 0b01001011, 0b00100111, 0b00011110];

/// SCM codebook for one of the supported `(M, k)` pairs.
///
/// Linear codes contain the all-zero word, so the generated codebooks are the
/// coset `code + e_M` (last antenna flipped). Translation keeps every pairwise
/// distance, hence `d = 3` for (7,4) and `d = 4` for (7,3) and (8,4). The (9,4)
/// book comes from [`search_codebook`]. `(4,1)` needs a variant to pick between
/// the two published tables.
pub fn build_scm_codebook(m: u32, k: u32, variant: Option<ScmVariant>) -> Result<SpatialCodebook> {
    let from_table = |text: &str| -> Result<SpatialCodebook> {
        let mut cb = build_table_codebook(&parse_table(text)?)?;
        cb.scheme = CodebookScheme::Scm;
        Ok(cb)
    };
    match (m, k, variant) {
        (7, 4, None) => coset_codebook(7, &HAMMING_7_4, 1),
        (7, 3, None) => coset_codebook(7, &SIMPLEX_7_3, 1),
        (8, 4, None) => coset_codebook(8, &EXT_HAMMING_8_4, 1),
        (9, 4, None) => {
            let mut cb = (1..=9)
                .rev()
                .find_map(|d| search_codebook(9, 4, d))
                .expect("distance 1 always succeeds");
            cb.scheme = CodebookScheme::Scm;
            Ok(cb)
        }
        (4, 1, Some(ScmVariant::D3)) => from_table(TABLE_SCM_4_1_D3),
        (4, 1, Some(ScmVariant::D4)) => from_table(TABLE_SCM_4_1_D4),
        (3, 1, None) => from_table(TABLE_SCM_3_1),
        (4, 1, None) => Err(Error::config(
            "SCM(4,1) needs a variant: d3 (0011/1000) or d4 (0001/1110)",
        )),
        _ => Err(Error::config(format!(
            "unsupported SCM({m},{k}){}; supported: (7,4) (7,3) (8,4) (9,4) (4,1)+d3/d4 (3,1), or a table",
            variant.map(|v| format!(" variant {v:?}")).unwrap_or_default()
        ))),
    }
}

/// Greedy lexicographic search for `2^k` nonzero length-`m` words at pairwise
/// distance `>= d`. Returns `None` when the greedy pass runs out of words.
pub fn search_codebook(m: u32, k: u32, d: u32) -> Option<SpatialCodebook> {
    if m == 0 || m > MAX_ANTENNAS || k > MAX_SPATIAL_BITS {
        return None;
    }
    let want = 1usize << k;
    let mut chosen: Vec<u32> = Vec::with_capacity(want);
    for v in 1..(1u32 << m) {
        if chosen.iter().all(|&c| (c ^ v).count_ones() >= d) {
            chosen.push(v);
            if chosen.len() == want {
                let labels = (0..want as u32).collect();
                return SpatialCodebook::new(m, k, chosen, labels, CodebookScheme::Table).ok();
            }
        }
    }
    None
}

/// Parse the fixture format: one `<label_bits> <codeword_bits>` row per line,
/// `#` starts a comment.
pub fn parse_table(text: &str) -> Result<Vec<(String, String)>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::validation(format!(
                "line {}: expected `<label> <codeword>`, got {raw:?}",
                lineno + 1
            )));
        }
        rows.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(rows)
}

/// Build a codebook exactly as given by `(label, codeword)` bit-string rows.
pub fn build_table_codebook<S: AsRef<str>>(rows: &[(S, S)]) -> Result<SpatialCodebook> {
    if rows.is_empty() {
        return Err(Error::validation("empty codebook table"));
    }
    let mut labels = Vec::with_capacity(rows.len());
    let mut codewords = Vec::with_capacity(rows.len());
    let mut dims: Option<(u32, u32)> = None;
    for (n, (label, cw)) in rows.iter().enumerate() {
        let (label, cw) = (label.as_ref(), cw.as_ref());
        let row = |why: &str| Error::validation(format!("row {} `{label} {cw}`: {why}", n + 1));
        let (lv, k) = parse_bits(label).ok_or_else(|| row("label is not a bit string"))?;
        let (cv, m) = parse_bits(cw).ok_or_else(|| row("codeword is not a bit string"))?;
        if m > MAX_ANTENNAS || k > MAX_SPATIAL_BITS {
            return Err(row("too wide"));
        }
        match dims {
            None => dims = Some((m, k)),
            Some(d) if d != (m, k) => return Err(row("length differs from the first row")),
            _ => {}
        }
        if cv == 0 {
            return Err(row("all-zero codeword is not allowed"));
        }
        if codewords.contains(&cv) {
            return Err(row("duplicate codeword"));
        }
        if labels.contains(&lv) {
            return Err(row("duplicate label"));
        }
        labels.push(lv);
        codewords.push(cv);
    }
    let (m, k) = dims.expect("non-empty");
    if rows.len() != 1usize << k {
        return Err(Error::validation(format!(
            "{} rows but {k}-bit labels need exactly {}",
            rows.len(),
            1usize << k
        )));
    }
    SpatialCodebook::new(m, k, codewords, labels, CodebookScheme::Table)
}

/// Text of a shipped mapping table, `"table1"` .. `"table5"`.
pub fn builtin_table(name: &str) -> Option<&'static str> {
    match name {
        "table1" => Some(TABLE_SM_4),
        "table2" => Some(TABLE_SCM_4_1_D3),
        "table3" => Some(TABLE_SCM_4_1_D4),
        "table4" => Some(TABLE_GSM_3_2),
        "table5" => Some(TABLE_SCM_3_1),
        _ => None,
    }
}

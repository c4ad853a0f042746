//! Constellations, spatial codebooks and the composite SCM alphabet.
//!
//! Bit strings are written most significant bit first. For codewords the
//! first character is antenna #1, so `"1000"` activates antenna #1 only and
//! is stored as the integer `0b1000`.

mod alphabet;
mod codebook;
mod constellation;

pub use alphabet::{label_distance, scm_alphabet, ScmAlphabet};
pub use codebook::{
    build_gsm_codebook, build_scm_codebook, build_sm_codebook, build_table_codebook, builtin_table,
    min_hamming_distance, parse_table, search_codebook, CodebookScheme, ScmVariant,
    SpatialCodebook,
};
pub use constellation::{build_constellation, Constellation, ConstellationKind};

/// Render `value` as a `len`-character bit string, MSB first.
pub fn bits_to_string(value: u32, len: u32) -> String {
    (0..len)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a `0`/`1` string, MSB first. Returns the value and the bit length.
pub fn parse_bits(s: &str) -> Option<(u32, u32)> {
    if s.is_empty() || s.len() > 32 {
        return None;
    }
    let mut v = 0u32;
    for ch in s.chars() {
        v = (v << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => return None,
            };
    }
    Some((v, s.len() as u32))
}

/// Gray code of `p`.
pub(crate) fn gray(p: u32) -> u32 {
    p ^ (p >> 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_string_round_trip() {
        assert_eq!(parse_bits("0011"), Some((3, 4)));
        assert_eq!(bits_to_string(3, 4), "0011");
        assert_eq!(parse_bits("10a"), None);
        assert_eq!(parse_bits(""), None);
    }
}

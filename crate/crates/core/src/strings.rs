//! Binary strings and the exact classical reference algorithms.
//!
//! Positions in the public API are 1-indexed (`u[i, j]` is `u_i .. u_j`),
//! storage is 0-indexed.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Immutable sequence of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Builds a string from 0/1 values.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBits(format!("symbol {b} is not a bit")));
        }
        Ok(BitString { bits })
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        BitString {
            bits: bits.into_iter().map(u8::from).collect(),
        }
    }

    /// Expands bytes into bits, most significant bit of each byte first.
    pub fn from_ascii(bytes: &[u8]) -> Self {
        BitString {
            bits: bytes
                .iter()
                .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1))
                .collect(),
        }
    }

    pub fn empty() -> Self {
        BitString::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// All bits, 0-indexed.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// `u_i` for `1 <= i <= |u|`.
    pub fn symbol(&self, i: usize) -> Option<u8> {
        i.checked_sub(1).and_then(|k| self.bits.get(k).copied())
    }

    /// View of `u[i, j]`; `u[i, i-1]` is the empty string.
    pub fn slice(&self, i: usize, j: usize) -> Result<&[u8]> {
        if i == 0 || i > j + 1 || j > self.len() {
            return Err(Error::SubstringRange {
                start: i,
                end: j,
                len: self.len(),
            });
        }
        Ok(&self.bits[i - 1..j])
    }

    /// Owned copy of `u[i, j]`.
    pub fn substring(&self, i: usize, j: usize) -> Result<BitString> {
        self.slice(i, j).map(|s| BitString { bits: s.to_vec() })
    }

    /// Prefix `u[1, x]`.
    pub fn prefix(&self, x: usize) -> &[u8] {
        &self.bits[..x.min(self.len())]
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidBits(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| BitString { bits })
    }
}

/// Text `s` of length `n` and pattern `w` of length `m`, `1 <= m <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchInstance {
    text: BitString,
    pattern: BitString,
}

impl MatchInstance {
    pub fn new(text: BitString, pattern: BitString) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidInstance("pattern must be non-empty".into()));
        }
        if pattern.len() > text.len() {
            return Err(Error::InvalidInstance(format!(
                "pattern length {} exceeds text length {}",
                pattern.len(),
                text.len()
            )));
        }
        Ok(MatchInstance { text, pattern })
    }

    pub fn text(&self) -> &BitString {
        &self.text
    }

    pub fn pattern(&self) -> &BitString {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.text.len()
    }

    pub fn m(&self) -> usize {
        self.pattern.len()
    }

    /// Number of windows `N = n - m + 1`.
    pub fn window_count(&self) -> usize {
        self.n() - self.m() + 1
    }

    /// Window `s^d = s[d, d+m-1]`, 1-indexed.
    pub fn window(&self, d: usize) -> Option<&[u8]> {
        if d == 0 || d > self.window_count() {
            return None;
        }
        Some(&self.text.bits()[d - 1..d - 1 + self.m()])
    }

    /// Whether `s[d, d+m-1] = w`.
    pub fn occurs_at(&self, d: usize) -> bool {
        self.window(d) == Some(self.pattern.bits())
    }
}

/// Length of the longest common prefix.
pub fn lcp_classical(u: &BitString, v: &BitString) -> usize {
    u.bits()
        .iter()
        .zip(v.bits())
        .take_while(|(a, b)| a == b)
        .count()
}

/// Lexicographic comparison by the three-case rule on `t = lcp(u, v) + 1`.
pub fn compare_classical(u: &BitString, v: &BitString) -> Ordering {
    let t = lcp_classical(u, v) + 1;
    match (u.symbol(t), v.symbol(t)) {
        (Some(a), Some(b)) => a.cmp(&b),
        // t - 1 = |u| < |v|
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Maps an ordering to the `-1 / 0 / +1` verdict encoding.
pub fn verdict(ordering: Ordering) -> i8 {
    match ordering {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Every 1-indexed `d` with `s[d, d+m-1] = w`, by direct comparison.
pub fn naive_match_all(inst: &MatchInstance) -> Vec<usize> {
    let w = inst.pattern().bits();
    inst.text()
        .bits()
        .windows(w.len())
        .enumerate()
        .filter(|(_, window)| *window == w)
        .map(|(k, _)| k + 1)
        .collect()
}

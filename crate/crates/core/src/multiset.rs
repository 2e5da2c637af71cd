use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The multiset `{1^k1, 2^k2, ..., n^kn}` given by its multiplicity vector.
///
/// Values are the integers `1..=n` and every multiplicity is at least 1.
/// `total()` is the number of elements counted with multiplicity, written
/// `K` throughout the crate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Multiset {
    mult: Vec<u32>,
}

impl Multiset {
    pub fn new(mult: Vec<u32>) -> Result<Self> {
        if mult.is_empty() {
            return Err(Error::EmptyMultiset);
        }
        if let Some(k) = mult.iter().find(|&&k| k == 0) {
            return Err(Error::InvalidMultiplicity(k.to_string()));
        }
        Ok(Multiset { mult })
    }

    /// Number of distinct values.
    pub fn n(&self) -> usize {
        self.mult.len()
    }

    /// Total multiplicity `K = k1 + ... + kn`.
    pub fn total(&self) -> u32 {
        self.mult.iter().sum()
    }

    /// Multiplicity of `value` (1-based); zero for values outside `1..=n`.
    pub fn multiplicity(&self, value: u32) -> u32 {
        if value == 0 || value as usize > self.mult.len() {
            0
        } else {
            self.mult[value as usize - 1]
        }
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mult
    }

    pub fn values(&self) -> impl Iterator<Item = u32> + '_ {
        1..=self.mult.len() as u32
    }

    /// The multiset `{1^(K-n+1), 2, 3, ..., n}` with the same total and the
    /// same number of distinct values, all repetition pushed onto value 1.
    pub fn reduction_target(&self) -> Multiset {
        let n = self.n();
        let k = self.total();
        let mut mult = vec![1u32; n];
        mult[0] = k - n as u32 + 1;
        Multiset { mult }
    }

    /// True when every value has the same multiplicity `k`.
    pub fn uniform_multiplicity(&self) -> Option<u32> {
        let k = self.mult[0];
        if self.mult.iter().all(|&x| x == k) {
            Some(k)
        } else {
            None
        }
    }

    /// Guard for exhaustive enumeration: errors when `total() > cap`.
    pub fn ensure_within(&self, cap: u32) -> Result<()> {
        let total = self.total();
        if total > cap {
            Err(Error::SizeCap { total, cap })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mult.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Multiset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Err(Error::EmptyMultiset);
        }
        let mut mult = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let k: u32 = tok
                .parse()
                .map_err(|_| Error::InvalidMultiplicity(tok.to_string()))?;
            if k == 0 {
                return Err(Error::InvalidMultiplicity(tok.to_string()));
            }
            mult.push(k);
        }
        Multiset::new(mult)
    }
}

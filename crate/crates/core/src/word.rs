use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::poly::{binomial, catalan, factorial};

/// A value extended with sentinels, used for the first/last statistics of
/// possibly-empty words and trees.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtValue {
    NegInf,
    Finite(u32),
    PosInf,
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInf => write!(f, "-inf"),
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::PosInf => write!(f, "+inf"),
        }
    }
}

/// A finite sequence over the positive integers; permutations of a multiset
/// are words whose content matches its multiplicities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v == 0) {
            return Err(Error::InvalidWordToken(v.to_string()));
        }
        Ok(Word(values))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the word uses exactly the content of `spec`.
    pub fn matches(&self, spec: &Multiset) -> bool {
        let mut counts = vec![0u32; spec.n()];
        for &v in &self.0 {
            if v as usize > counts.len() {
                return false;
            }
            counts[v as usize - 1] += 1;
        }
        counts == spec.multiplicities()
    }

    /// Multiset whose content is exactly this word; errors when some value
    /// in `1..=max` is missing.
    pub fn derived_multiset(&self) -> Result<Multiset> {
        if self.0.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = *self.0.iter().max().unwrap() as usize;
        let mut counts = vec![0u32; n];
        for &v in &self.0 {
            counts[v as usize - 1] += 1;
        }
        if let Some(v) = counts.iter().position(|&k| k == 0) {
            return Err(Error::WordMismatch(format!("value {} is absent", v + 1)));
        }
        Multiset::new(counts)
    }
}

impl fmt::Display for Word {
    /// Compact digit string when all values are single digits, otherwise
    /// dot-separated (`2.7.1.7.5.6.3.3.5.4.5`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&v| v <= 9) {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        if s.contains('.') {
            let mut values = Vec::new();
            for tok in s.split('.') {
                let v: u32 = tok
                    .parse()
                    .map_err(|_| Error::InvalidWordToken(tok.to_string()))?;
                values.push(v);
            }
            Word::new(values)
        } else {
            let mut values = Vec::new();
            for ch in s.chars() {
                let v = ch
                    .to_digit(10)
                    .ok_or_else(|| Error::InvalidWordToken(ch.to_string()))?;
                values.push(v);
            }
            Word::new(values)
        }
    }
}

/// Iterator over all permutations of a multiset in lexicographic order.
pub struct Words {
    state: Option<Vec<u32>>,
}

impl Iterator for Words {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.state.take()?;
        let out = Word(cur.clone());
        self.state = next_permutation(cur);
        Some(out)
    }
}

fn next_permutation(mut a: Vec<u32>) -> Option<Vec<u32>> {
    if a.len() < 2 {
        return None;
    }
    let i = (0..a.len() - 1).rev().find(|&i| a[i] < a[i + 1])?;
    let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    Some(a)
}

/// All permutations of `spec` in lexicographic order, starting from the
/// ascending arrangement.
pub fn enumerate_words(spec: &Multiset) -> Words {
    let mut start = Vec::with_capacity(spec.total() as usize);
    for v in spec.values() {
        for _ in 0..spec.multiplicity(v) {
            start.push(v);
        }
    }
    Words { state: Some(start) }
}

/// Number of permutations of `spec`, `K! / (k1! ... kn!)`.
pub fn word_count(spec: &Multiset) -> BigInt {
    let mut acc = BigInt::one();
    let mut seen = 0u64;
    for &k in spec.multiplicities() {
        seen += k as u64;
        acc *= binomial(seen, k as i64);
    }
    acc
}

/// No two distinct values may alternate as `abab`: there are no indices
/// `i < j < k < l` with `w_i = w_k`, `w_j = w_l`, and `w_i != w_j`.
///
/// Checked via the arcs joining consecutive occurrences of each value: an
/// alternation exists exactly when two arcs of distinct values cross.
pub fn is_quasi_stirling(w: &Word) -> bool {
    let vals = w.values();
    let mut last = std::collections::HashMap::new();
    let mut arcs: Vec<(usize, usize, u32)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if let Some(p) = last.insert(v, i) {
            arcs.push((p, i, v));
        }
    }
    for (x, &(s1, e1, v1)) in arcs.iter().enumerate() {
        for &(s2, e2, v2) in &arcs[x + 1..] {
            if v1 == v2 {
                continue;
            }
            if (s1 < s2 && s2 < e1 && e1 < e2) || (s2 < s1 && s1 < e2 && e2 < e1) {
                return false;
            }
        }
    }
    true
}

/// Between two equal values every entry is at least that value.
pub fn is_stirling(w: &Word) -> bool {
    let vals = w.values();
    let mut first = std::collections::HashMap::new();
    let mut last = std::collections::HashMap::new();
    for (i, &v) in vals.iter().enumerate() {
        first.entry(v).or_insert(i);
        last.insert(v, i);
    }
    for (&v, &f) in &first {
        if vals[f..last[&v]].iter().skip(1).any(|&x| x < v) {
            return false;
        }
    }
    true
}

/// Descent statistic: the number of strict descents plus one, so every
/// nonempty word has `des >= 1`. Errors on the empty word.
pub fn des(w: &Word) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let vals = w.values();
    Ok(vals.windows(2).filter(|p| p[0] > p[1]).count() + 1)
}

/// First and last letters, with sentinels `(+inf, -inf)` for the empty word.
pub fn ends(w: &Word) -> (ExtValue, ExtValue) {
    match (w.values().first(), w.values().last()) {
        (Some(&f), Some(&l)) => (ExtValue::Finite(f), ExtValue::Finite(l)),
        _ => (ExtValue::PosInf, ExtValue::NegInf),
    }
}

/// Closed-form counts known for uniform multiplicities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpecialCounts {
    /// Total number of quasi-Stirling words; known for `k = 2`: `n! C_n`.
    pub total: Option<BigInt>,
    /// Number of quasi-Stirling words with the maximal descent statistic
    /// `n`; known for uniform `k >= 2`: `((k-1)n + 1)^(n-1)`.
    pub top_descents: Option<BigInt>,
}

pub fn special_counts(spec: &Multiset) -> SpecialCounts {
    let n = spec.n() as u64;
    match spec.uniform_multiplicity() {
        Some(2) => SpecialCounts {
            total: Some(factorial(n) * catalan(n)),
            top_descents: Some(BigInt::from(n + 1).pow(n as u32 - 1)),
        },
        Some(k) if k > 2 => SpecialCounts {
            total: None,
            top_descents: Some(BigInt::from((k as u64 - 1) * n + 1).pow(n as u32 - 1)),
        },
        _ => SpecialCounts {
            total: None,
            top_descents: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    #[test]
    fn lexicographic_enumeration() {
        let words: Vec<String> = enumerate_words(&ms("1,2")).map(|w| w.to_string()).collect();
        assert_eq!(words, ["122", "212", "221"]);
        assert_eq!(enumerate_words(&ms("2,2")).count(), 6);
        assert_eq!(word_count(&ms("2,2")), BigInt::from(6));
        let spec = ms("1,2,1,3");
        assert_eq!(
            BigInt::from(enumerate_words(&spec).count()),
            word_count(&spec)
        );
    }

    #[test]
    fn quasi_stirling_detects_crossings() {
        assert!(is_quasi_stirling(&w("1122")));
        assert!(is_quasi_stirling(&w("1221")));
        assert!(!is_quasi_stirling(&w("1212")));
        assert!(!is_quasi_stirling(&w("2121")));
        assert!(is_quasi_stirling(&w("212")));
        // four copies of one value alternate only with themselves
        assert!(is_quasi_stirling(&w("1111")));
        assert!(is_quasi_stirling(&w("21113111")));
        assert!(is_quasi_stirling(&w("12131")));
        assert!(!is_quasi_stirling(&w("12132")));
        assert!(is_quasi_stirling(&w("27175633545")));
    }

    #[test]
    fn stirling_requires_larger_between_equal_values() {
        assert!(is_stirling(&w("122")));
        assert!(!is_stirling(&w("212")));
        assert!(is_stirling(&w("221")));
        // equal intermediate entries are allowed
        assert!(is_stirling(&w("1121")));
        assert!(is_stirling(&w("111")));
        assert!(!is_stirling(&w("233212")));
    }

    #[test]
    fn stirling_words_are_quasi_stirling_at_small_sizes() {
        for spec in ["2,2", "1,2,1", "3,2", "1,1,2,1"] {
            for word in enumerate_words(&ms(spec)) {
                if is_stirling(&word) {
                    assert!(is_quasi_stirling(&word), "{word}");
                }
            }
        }
    }

    #[test]
    fn descent_statistic() {
        assert_eq!(des(&w("1122")).unwrap(), 1);
        assert_eq!(des(&w("27175633545")).unwrap(), 5);
        assert_eq!(des(&w("1")).unwrap(), 1);
        assert_eq!(des(&Word::empty()), Err(Error::EmptyWord));
    }

    #[test]
    fn end_statistics() {
        assert_eq!(
            ends(&w("27175633545")),
            (ExtValue::Finite(2), ExtValue::Finite(5))
        );
        assert_eq!(ends(&Word::empty()), (ExtValue::PosInf, ExtValue::NegInf));
        assert_eq!(ends(&w("1")), (ExtValue::Finite(1), ExtValue::Finite(1)));
        assert!(ExtValue::NegInf < ExtValue::Finite(1));
        assert!(ExtValue::Finite(9) < ExtValue::PosInf);
    }

    #[test]
    fn word_formats() {
        assert_eq!(w("2.7.1.7.5.6.3.3.5.4.5"), w("27175633545"));
        let long = Word::new(vec![10, 2, 10]).unwrap();
        assert_eq!(long.to_string(), "10.2.10");
        assert_eq!(long.to_string().parse::<Word>().unwrap(), long);
        assert!(matches!(
            "1a2".parse::<Word>(),
            Err(Error::InvalidWordToken(_))
        ));
    }

    #[test]
    fn content_checks() {
        assert!(w("27175633545").matches(&ms("1,1,2,1,3,1,2")));
        assert!(!w("2211").matches(&ms("1,2")));
        assert_eq!(w("212").derived_multiset().unwrap(), ms("1,2"));
        assert!(w("133").derived_multiset().is_err());
    }

    #[test]
    fn special_count_families() {
        let c = special_counts(&ms("2,2,2"));
        assert_eq!(c.total, Some(BigInt::from(30)));
        assert_eq!(c.top_descents, Some(BigInt::from(16)));
        let c = special_counts(&ms("3,3"));
        assert_eq!(c.total, None);
        assert_eq!(c.top_descents, Some(BigInt::from(5)));
        let c = special_counts(&ms("1,2,1"));
        assert_eq!(c.total, None);
        assert_eq!(c.top_descents, None);
        let c = special_counts(&ms("1,1,1"));
        assert_eq!(c.top_descents, None);
    }
}

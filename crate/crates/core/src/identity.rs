use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Result;
use crate::multiset::Multiset;
use crate::poly::{binomial, IntPoly};
use crate::tree::tree_polynomial;
use crate::word::{des, enumerate_words, is_quasi_stirling, is_stirling};

/// How to assemble the quasi-Stirling descent polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PolyMethod {
    /// Filter all permutations of the multiset by the crossing condition.
    Words,
    /// Sum cyclic descents over the tree family.
    Trees,
}

/// Descent polynomial of the quasi-Stirling permutations of `spec`.
///
/// Both methods agree; offering them separately keeps the tree route an
/// independent check on the word route.
pub fn quasi_stirling_polynomial(spec: &Multiset, method: PolyMethod, cap: u32) -> Result<IntPoly> {
    match method {
        PolyMethod::Trees => tree_polynomial(spec, cap),
        PolyMethod::Words => {
            spec.ensure_within(cap)?;
            let mut coeffs = vec![BigInt::zero(); spec.total() as usize + 1];
            for w in enumerate_words(spec) {
                if is_quasi_stirling(&w) {
                    coeffs[des(&w).expect("nonempty")] += 1;
                }
            }
            Ok(IntPoly::from_coeffs(coeffs))
        }
    }
}

/// Descent polynomial of the Stirling permutations of `spec`.
pub fn stirling_polynomial(spec: &Multiset, cap: u32) -> Result<IntPoly> {
    spec.ensure_within(cap)?;
    let mut coeffs = vec![BigInt::zero(); spec.total() as usize + 1];
    for w in enumerate_words(spec) {
        if is_stirling(&w) {
            coeffs[des(&w).expect("nonempty")] += 1;
        }
    }
    Ok(IntPoly::from_coeffs(coeffs))
}

/// Leading coefficients of `p(t) / (1 - t)^(k_total + 1)` as a power series.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesPrefix {
    pub k_total: u32,
    /// `coeffs[m]` for `m = 0..=m_max`.
    pub coeffs: Vec<BigInt>,
}

/// Expands `p(t) / (1 - t)^(k_total + 1)` up to `t^m_max` using
/// `1 / (1 - t)^(K + 1) = sum_m C(K + m, K) t^m`.
pub fn expand_series(p: &IntPoly, k_total: u32, m_max: usize) -> SeriesPrefix {
    let k = k_total as u64;
    let coeffs = (0..=m_max)
        .map(|m| {
            p.coeffs()
                .iter()
                .enumerate()
                .take(m + 1)
                .map(|(j, c)| c * binomial(k + (m - j) as u64, k as i64))
                .sum()
        })
        .collect();
    SeriesPrefix { k_total, coeffs }
}

/// The division-free series coefficient `m^(n-1) C(K-n+m, K-n+1)`, equal to
/// the `t^m` coefficient of the expanded descent polynomial and to the
/// number of coded structures of size `m`.
pub fn closed_form_coefficient(spec: &Multiset, m: usize) -> BigInt {
    let n = spec.n() as u64;
    let k = spec.total() as u64;
    let power = if n == 1 {
        BigInt::from(1)
    } else {
        BigInt::from(m as u64).pow(n as u32 - 1)
    };
    power * binomial(k - n + m as u64, (k - n + 1) as i64)
}

/// One compared coefficient of the series identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdentityRow {
    pub m: usize,
    pub series: BigInt,
    pub closed_form: BigInt,
    pub ok: bool,
}

/// Outcome of checking the series identity for one multiset.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdentityReport {
    pub multiset: Multiset,
    pub n: usize,
    pub k_total: u32,
    pub m_max: usize,
    /// Quasi-Stirling descent polynomial (the two assembly routes agree
    /// whenever `methods_agree` holds).
    pub polynomial: IntPoly,
    pub methods_agree: bool,
    pub rows: Vec<IdentityRow>,
    pub pass: bool,
}

/// Checks that the descent polynomial expanded over `(1 - t)^(K + 1)`
/// reproduces the closed-form coefficients for all `m <= m_max`, computing
/// the polynomial by both routes.
pub fn verify_identity(spec: &Multiset, m_max: usize, cap: u32) -> Result<IdentityReport> {
    let via_words = quasi_stirling_polynomial(spec, PolyMethod::Words, cap)?;
    let via_trees = quasi_stirling_polynomial(spec, PolyMethod::Trees, cap)?;
    let methods_agree = via_words == via_trees;
    let series = expand_series(&via_words, spec.total(), m_max);
    let rows: Vec<IdentityRow> = series
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let closed = closed_form_coefficient(spec, m);
            IdentityRow {
                m,
                ok: *c == closed,
                series: c.clone(),
                closed_form: closed,
            }
        })
        .collect();
    let pass = methods_agree && rows.iter().all(|r| r.ok);
    Ok(IdentityReport {
        multiset: spec.clone(),
        n: spec.n(),
        k_total: spec.total(),
        m_max,
        polynomial: via_words,
        methods_agree,
        rows,
        pass,
    })
}

/// Both sides of the weighted binomial sum identity
/// `sum_{l=1}^{m} l C(n+m-l-1, n-1) = C(n+m, n+1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SumIdentityCheck {
    pub lhs: BigInt,
    pub rhs: BigInt,
    pub equal: bool,
}

pub fn binomial_sum_identity(n: u64, m: u64) -> SumIdentityCheck {
    assert!(n >= 1 && m >= 1);
    let lhs: BigInt = (1..=m)
        .map(|l| BigInt::from(l) * binomial(n + m - l - 1, n as i64 - 1))
        .sum();
    let rhs = binomial(n + m, n as i64 + 1);
    SumIdentityCheck {
        equal: lhs == rhs,
        lhs,
        rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn descent_polynomials_by_both_routes() {
        for spec in ["1,2,1", "1,2", "2,2", "1", "3", "2,2,2", "1,1,1"] {
            let spec = ms(spec);
            let w = quasi_stirling_polynomial(&spec, PolyMethod::Words, 9).unwrap();
            let t = quasi_stirling_polynomial(&spec, PolyMethod::Trees, 9).unwrap();
            assert_eq!(w, t, "{spec}");
        }
        assert_eq!(
            quasi_stirling_polynomial(&ms("1,2,1"), PolyMethod::Words, 9).unwrap(),
            IntPoly::from_i64(&[0, 1, 7, 4])
        );
        assert_eq!(
            quasi_stirling_polynomial(&ms("1,2"), PolyMethod::Words, 9).unwrap(),
            IntPoly::from_i64(&[0, 1, 2])
        );
        assert_eq!(
            quasi_stirling_polynomial(&ms("2,2"), PolyMethod::Words, 9).unwrap(),
            IntPoly::from_i64(&[0, 1, 3])
        );
    }

    #[test]
    fn stirling_polynomial_values() {
        assert_eq!(
            stirling_polynomial(&ms("2,1,1"), 9).unwrap(),
            IntPoly::from_i64(&[0, 1, 7, 4])
        );
        assert_eq!(
            stirling_polynomial(&ms("2"), 9).unwrap(),
            IntPoly::from_i64(&[0, 1])
        );
        // with all multiplicities one this is the classical descent polynomial
        for n in 1..=6 {
            let spec = Multiset::new(vec![1; n]).unwrap();
            assert_eq!(
                stirling_polynomial(&spec, 9).unwrap(),
                crate::poly::eulerian_polynomial(n)
            );
        }
    }

    #[test]
    fn series_expansion_examples() {
        let got = expand_series(&IntPoly::from_i64(&[0, 1, 3]), 4, 2);
        assert_eq!(got.coeffs, vec![big(0), big(1), big(8)]);
        let got = expand_series(&IntPoly::from_i64(&[0, 1, 7, 4]), 4, 3);
        assert_eq!(got.coeffs, vec![big(0), big(1), big(12), big(54)]);
        let got = expand_series(&IntPoly::zero(), 3, 2);
        assert_eq!(got.coeffs, vec![big(0), big(0), big(0)]);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_coefficient(&ms("1,2,1"), 0), big(0));
        assert_eq!(closed_form_coefficient(&ms("1,2,1"), 3), big(54));
        // single value: the coefficient is just m
        for m in 0..6 {
            assert_eq!(closed_form_coefficient(&ms("1"), m), big(m as i64));
        }
        // all multiplicities one with n = K: coefficient m^n
        assert_eq!(closed_form_coefficient(&ms("1,1,1"), 2), big(8));
    }

    #[test]
    fn identity_report_on_the_worked_example() {
        let r = verify_identity(&ms("1,2,1"), 10, 9).unwrap();
        assert!(r.pass);
        assert!(r.methods_agree);
        assert_eq!(r.polynomial, IntPoly::from_i64(&[0, 1, 7, 4]));
        assert_eq!(r.rows.len(), 11);
        assert_eq!(r.rows[3].series, big(54));
        assert_eq!(r.k_total, 4);
        assert_eq!(r.n, 3);
    }

    #[test]
    fn sum_identity_examples() {
        let c = binomial_sum_identity(2, 2);
        assert_eq!(c.lhs, big(4));
        assert_eq!(c.rhs, big(4));
        assert!(c.equal);
        for m in 1..8 {
            assert_eq!(binomial_sum_identity(1, m).rhs, binomial(1 + m, 2));
        }
    }
}

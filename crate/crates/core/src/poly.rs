use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense polynomial in `t` with arbitrary-precision integer coefficients.
///
/// Canonical form: the coefficient vector carries no trailing zeros and the
/// zero polynomial is the empty vector, so structural equality is polynomial
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    /// Builds from `coeffs[d]` = coefficient of `t^d`, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn monomial(coeff: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = coeff;
        Self::from_coeffs(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient, or `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Coefficient of `t^d` (zero beyond the degree).
    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, c)| c * BigInt::from(d))
            .collect();
        IntPoly::from_coeffs(coeffs)
    }

    /// Sum of all coefficients, i.e. the value at `t = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Divides out `t^shift`; panics if some lower coefficient is nonzero.
    pub fn shr_t(&self, shift: usize) -> IntPoly {
        assert!(self.coeffs.iter().take(shift).all(|c| c.is_zero()));
        IntPoly::from_coeffs(self.coeffs.iter().skip(shift).cloned().collect())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![BigInt::zero(); len];
        for (d, c) in self.coeffs.iter().enumerate() {
            out[d] += c;
        }
        for (d, c) in rhs.coeffs.iter().enumerate() {
            out[d] += c;
        }
        IntPoly::from_coeffs(out)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }
}

impl fmt::Display for IntPoly {
    /// Renders in descending degree, e.g. `4*t^3 + 7*t^2 + t`; zero terms
    /// are omitted and unit coefficients are left implicit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for d in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[d];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            match (d, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{d}")?,
                (_, false) => write!(f, "{mag}*t^{d}")?,
            }
        }
        Ok(())
    }
}

/// Binomial coefficient `C(a, b)`; zero when `b < 0` or `b > a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::one();
    for i in 1..=b {
        acc = acc * BigInt::from(a - b + i) / BigInt::from(i);
    }
    acc
}

/// `n`-th Catalan number `C(2n, n) / (n + 1)`.
pub fn catalan(n: u64) -> BigInt {
    binomial(2 * n, n as i64) / BigInt::from(n + 1)
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Descent polynomial of all permutations of `{1, ..., n}`, with the descent
/// statistic counting strict descents plus one, so `A_1 = t` and
/// `A_3 = t + 4t^2 + t^3`. Computed by the classical triangle recurrence.
pub fn eulerian_polynomial(n: usize) -> IntPoly {
    assert!(n >= 1, "eulerian_polynomial requires n >= 1");
    // row[j] counts permutations of [i] with j strict descents
    let mut row = vec![BigInt::one()];
    for i in 2..=n {
        let mut next = vec![BigInt::zero(); i];
        for (j, c) in row.iter().enumerate() {
            next[j] += c * BigInt::from(j as u64 + 1);
            next[j + 1] += c * BigInt::from((i - j - 1) as u64);
        }
        row = next;
    }
    let mut coeffs = vec![BigInt::zero()];
    coeffs.extend(row);
    IntPoly::from_coeffs(coeffs)
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::identity::{quasi_stirling_polynomial, stirling_polynomial, PolyMethod};
use crate::multiset::Multiset;
use crate::poly::IntPoly;

/// Rational polynomial, just enough arithmetic for Sturm chains.
#[derive(Clone, Debug)]
struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    fn from_int(p: &IntPoly) -> Self {
        RatPoly {
            coeffs: p
                .coeffs()
                .iter()
                .map(|c| BigRational::from(c.clone()))
                .collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    fn degree(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    fn derivative(&self) -> RatPoly {
        RatPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
                .collect(),
        }
        .trim()
    }

    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }

    fn rem(&self, div: &RatPoly) -> RatPoly {
        let d = div.degree();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= d {
            let shift = r.degree() - d;
            let factor = r.leading() / div.leading();
            for i in 0..=d {
                let sub = &div.coeffs[i] * &factor;
                r.coeffs[i + shift] -= sub;
            }
            r = r.trim();
        }
        r
    }

    fn div_exact(&self, div: &RatPoly) -> RatPoly {
        let d = div.degree();
        let mut q = vec![BigRational::zero(); self.coeffs.len().saturating_sub(d)];
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= d {
            let shift = r.degree() - d;
            let factor = r.leading() / div.leading();
            for i in 0..=d {
                let sub = &div.coeffs[i] * &factor;
                r.coeffs[i + shift] -= sub;
            }
            q[shift] = factor;
            r = r.trim();
        }
        debug_assert!(r.is_zero(), "division was not exact");
        RatPoly { coeffs: q }.trim()
    }

    fn gcd(mut a: RatPoly, mut b: RatPoly) -> RatPoly {
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

fn to_primitive_int(p: &RatPoly) -> IntPoly {
    debug_assert!(!p.is_zero());
    let mut scale = BigInt::one();
    for c in &p.coeffs {
        scale = scale.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs
        .iter()
        .map(|c| c.numer() * (&scale / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    let mut out: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
    if out.last().is_some_and(|c| c.is_negative()) {
        for c in &mut out {
            *c = -c.clone();
        }
    }
    IntPoly::from_coeffs(out)
}

fn sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy)]
enum Point {
    NegInf,
    Zero,
    PosInf,
}

fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    let mut chain = vec![p.clone()];
    if p.degree() == 0 {
        return chain;
    }
    chain.push(p.derivative());
    loop {
        let r = chain[chain.len() - 2].rem(&chain[chain.len() - 1]);
        if r.is_zero() {
            return chain;
        }
        chain.push(r.neg());
    }
}

fn variations(chain: &[RatPoly], at: Point) -> usize {
    let mut prev = 0i8;
    let mut count = 0;
    for p in chain {
        let s = match at {
            Point::PosInf => sign(p.leading()),
            Point::NegInf => {
                let s = sign(p.leading());
                if p.degree() % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
            Point::Zero => sign(&p.coeffs[0]),
        };
        if s == 0 {
            continue;
        }
        if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// The polynomial with every repeated factor collapsed to multiplicity one,
/// in primitive integer form with a positive leading coefficient.
pub fn squarefree_part(p: &IntPoly) -> Result<IntPoly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let rp = RatPoly::from_int(p);
    if rp.degree() == 0 {
        return Ok(IntPoly::one());
    }
    let g = RatPoly::gcd(rp.clone(), rp.derivative());
    Ok(to_primitive_int(&rp.div_exact(&g)))
}

/// Exact count of distinct real roots of a squarefree polynomial, by sign
/// variations of its Sturm chain at the two infinities.
pub fn count_distinct_real_roots(p: &IntPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let rp = RatPoly::from_int(p);
    if rp.degree() == 0 {
        return Ok(0);
    }
    if RatPoly::gcd(rp.clone(), rp.derivative()).degree() > 0 {
        return Err(Error::NotSquarefree);
    }
    let chain = sturm_chain(&rp);
    Ok(variations(&chain, Point::NegInf) - variations(&chain, Point::PosInf))
}

/// Root structure of a polynomial: factor out `t`, collapse to the
/// squarefree part, and count real roots exactly.
#[derive(Clone, Debug)]
pub struct RootReport {
    pub polynomial: IntPoly,
    pub t_valuation: usize,
    pub squarefree: IntPoly,
    pub distinct_real_roots: usize,
    pub all_real: bool,
    pub all_nonpositive: bool,
}

pub fn is_real_rooted(p: &IntPoly) -> Result<RootReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let t_valuation = p.valuation().expect("nonzero polynomial");
    let stripped = p.shr_t(t_valuation);
    let squarefree = squarefree_part(&stripped)?;
    let deg = squarefree.degree().expect("nonzero polynomial");
    if deg == 0 {
        return Ok(RootReport {
            polynomial: p.clone(),
            t_valuation,
            squarefree,
            distinct_real_roots: 0,
            all_real: true,
            all_nonpositive: true,
        });
    }
    let chain = sturm_chain(&RatPoly::from_int(&squarefree));
    let at_neg = variations(&chain, Point::NegInf);
    let at_zero = variations(&chain, Point::Zero);
    let at_pos = variations(&chain, Point::PosInf);
    let distinct_real_roots = at_neg - at_pos;
    Ok(RootReport {
        polynomial: p.clone(),
        t_valuation,
        squarefree,
        distinct_real_roots,
        all_real: distinct_real_roots == deg,
        all_nonpositive: at_zero == at_pos,
    })
}

fn support_run(p: &IntPoly) -> Result<&[BigInt]> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if let Some(i) = p.coeffs().iter().position(|c| c.is_negative()) {
        return Err(Error::NegativeCoefficient(i));
    }
    Ok(&p.coeffs()[p.valuation().expect("nonzero polynomial")..])
}

/// Whether each internal coefficient squared dominates the product of its
/// neighbours, across the run from the lowest nonzero term to the top.
pub fn is_log_concave(p: &IntPoly) -> Result<bool> {
    let run = support_run(p)?;
    Ok(run.windows(3).all(|w| &w[1] * &w[1] >= &w[0] * &w[2]))
}

/// Whether the coefficients rise weakly and then fall weakly across the same
/// run.
pub fn is_unimodal(p: &IntPoly) -> Result<bool> {
    let run = support_run(p)?;
    let rising = run.windows(2).take_while(|w| w[0] <= w[1]).count();
    Ok(run[rising..].windows(2).all(|w| w[0] >= w[1]))
}

/// Outcome of replacing the multiset by {1^{K-n+1}, 2, …, n}: the descent
/// polynomial over quasi-Stirling words must survive the replacement as the
/// descent polynomial over Stirling words.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub m_prime: Multiset,
    pub polynomial: IntPoly,
    pub reduced: IntPoly,
    pub equal: bool,
}

pub fn stirling_reduction(spec: &Multiset, cap: u32) -> Result<ReductionReport> {
    let m_prime = spec.reduction_target();
    let polynomial = quasi_stirling_polynomial(spec, PolyMethod::Trees, cap)?;
    let reduced = stirling_polynomial(&m_prime, cap)?;
    let equal = polynomial == reduced;
    Ok(ReductionReport {
        m_prime,
        polynomial,
        reduced,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn squarefree_part_collapses_multiplicity() {
        assert_eq!(squarefree_part(&p(&[0, 0, 1])).unwrap(), p(&[0, 1]));
        assert_eq!(
            squarefree_part(&p(&[0, 1, 7, 4])).unwrap(),
            p(&[0, 1, 7, 4])
        );
        // (t+t^2)^2
        assert_eq!(
            squarefree_part(&p(&[0, 0, 1, 2, 1])).unwrap(),
            p(&[0, 1, 1])
        );
        assert_eq!(squarefree_part(&p(&[5])).unwrap(), IntPoly::one());
        assert!(matches!(
            squarefree_part(&IntPoly::zero()),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn real_root_counting() {
        assert_eq!(count_distinct_real_roots(&p(&[1, 7, 4])).unwrap(), 2);
        assert_eq!(count_distinct_real_roots(&p(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(count_distinct_real_roots(&p(&[0, 1])).unwrap(), 1);
        assert_eq!(count_distinct_real_roots(&p(&[7])).unwrap(), 0);
        assert!(matches!(
            count_distinct_real_roots(&p(&[0, 0, 1])),
            Err(Error::NotSquarefree)
        ));
        // (t+1)(t+2)(t+3)(t+4)
        let prod = &(&p(&[1, 1]) * &p(&[2, 1])) * &(&p(&[3, 1]) * &p(&[4, 1]));
        assert_eq!(count_distinct_real_roots(&prod).unwrap(), 4);
    }

    #[test]
    fn root_reports() {
        let r = is_real_rooted(&p(&[0, 1, 7, 4])).unwrap();
        assert_eq!(r.t_valuation, 1);
        assert_eq!(r.squarefree, p(&[1, 7, 4]));
        assert_eq!(r.distinct_real_roots, 2);
        assert!(r.all_real);
        assert!(r.all_nonpositive);

        let r = is_real_rooted(&p(&[0, 1, 3])).unwrap();
        assert!(r.all_real && r.all_nonpositive);

        // t^2 + t^3 + t^4: the cyclotomic factor has no real roots
        let r = is_real_rooted(&p(&[0, 0, 1, 1, 1])).unwrap();
        assert_eq!(r.t_valuation, 2);
        assert!(!r.all_real);
        assert!(r.all_nonpositive);

        // t - 1 has a positive root
        let r = is_real_rooted(&p(&[-1, 1])).unwrap();
        assert!(r.all_real);
        assert!(!r.all_nonpositive);

        let r = is_real_rooted(&p(&[0, 1])).unwrap();
        assert_eq!(
            (r.distinct_real_roots, r.all_real, r.all_nonpositive),
            (0, true, true)
        );
    }

    #[test]
    fn coefficient_shape_checks() {
        assert!(is_log_concave(&p(&[0, 1, 7, 4])).unwrap());
        assert!(is_unimodal(&p(&[0, 1, 7, 4])).unwrap());
        assert!(is_log_concave(&p(&[1, 1])).unwrap());
        assert!(is_unimodal(&p(&[1, 1])).unwrap());
        assert!(!is_log_concave(&p(&[1, 1, 2])).unwrap());
        assert!(is_unimodal(&p(&[1, 1, 2])).unwrap());
        // an internal zero breaks both
        assert!(!is_log_concave(&p(&[0, 1, 0, 2])).unwrap());
        assert!(!is_unimodal(&p(&[0, 1, 0, 2])).unwrap());
        assert!(matches!(
            is_log_concave(&p(&[1, -1, 1])),
            Err(Error::NegativeCoefficient(1))
        ));
        assert!(matches!(
            is_unimodal(&IntPoly::zero()),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn reduction_to_the_stirling_side() {
        let r = stirling_reduction(&"1,2,1".parse().unwrap(), 9).unwrap();
        assert_eq!(r.m_prime.to_string(), "2,1,1");
        assert_eq!(r.polynomial, p(&[0, 1, 7, 4]));
        assert!(r.equal);

        let r = stirling_reduction(&"2,2".parse().unwrap(), 9).unwrap();
        assert_eq!(r.m_prime.to_string(), "3,1");
        assert_eq!(r.polynomial, p(&[0, 1, 3]));
        assert!(r.equal);

        let r = stirling_reduction(&"1,1,1".parse().unwrap(), 9).unwrap();
        assert_eq!(r.m_prime.to_string(), "1,1,1");
        assert!(r.equal);
    }
}

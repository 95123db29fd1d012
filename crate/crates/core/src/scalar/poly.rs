//! Dense univariate polynomials over the rationals, the building block of the
//! rational-function field in the formal parameter `q`.

use super::{Rat, Scalar};
use crate::error::{Error, Result};
use std::fmt;

/// Polynomial in one variable `q` with exact rational coefficients.
/// Invariant: no trailing zero coefficients; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        QPoly::from_coeffs(vec![c])
    }

    /// The variable `q` itself.
    pub fn gen() -> Self {
        QPoly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// `c * q^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        QPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree of the zero polynomial is `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).add(&rhs.coeff(k))).collect();
        QPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        QPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        QPoly::from_coeffs(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    /// Division with remainder: `self = q * rhs + r` with `deg r < deg rhs`.
    pub fn div_rem(&self, rhs: &Self) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = rhs.degree().unwrap();
        let lead_inv = rhs.leading_coeff().try_inv().unwrap();
        let mut rem = self.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(d)];
        while let Some(rd) = rem.degree() {
            if rd < d {
                break;
            }
            let factor = rem.leading_coeff().mul(&lead_inv);
            let shift = rd - d;
            quot[shift] = factor.clone();
            rem = rem.sub(&rhs.mul(&QPoly::monomial(factor, shift)));
        }
        Ok((QPoly::from_coeffs(quot), rem))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, rhs: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(rhs)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InvalidInput("inexact polynomial division".into()))
        }
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn make_monic(&self) -> Self {
        match self.leading_coeff().try_inv() {
            Some(inv) => self.scale(&inv),
            None => QPoly::zero(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = QPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Horner evaluation at an element of any scalar ring.
    pub fn eval_at<S: Scalar>(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&S::from_rat(c));
        }
        acc
    }

    /// Canonical string: terms by increasing exponent, e.g. `1/1*q^0 + -2/1*q^1`.
    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{c}*q^{k}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the canonical string form.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(QPoly::zero());
        }
        let mut acc = QPoly::zero();
        for term in s.split('+') {
            let term = term.trim();
            let (c, k) = term
                .split_once("*q^")
                .ok_or_else(|| Error::InvalidInput(format!("bad polynomial term {term:?}")))?;
            let c = Rat::parse(c)?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad exponent in {term:?}")))?;
            acc = acc.add(&QPoly::monomial(c, k));
        }
        Ok(acc)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> QPoly {
        QPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn mul_and_degree() {
        // (1+q)(1-q) = 1-q^2
        assert_eq!(p(&[1, 1]).mul(&p(&[1, -1])), p(&[1, 0, -1]));
        assert_eq!(p(&[1, 0, -1]).degree(), Some(2));
        assert_eq!(QPoly::zero().degree(), None);
    }

    #[test]
    fn div_rem_exact_and_inexact() {
        let (q, r) = p(&[1, 0, -1]).div_rem(&p(&[1, -1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert!(p(&[1, 1]).div_exact(&p(&[0, 1])).is_err());
    }

    #[test]
    fn gcd_is_monic() {
        // gcd(q^2-1, q^2+2q+1) = q+1
        let g = p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1]));
        assert_eq!(g, p(&[1, 1]));
    }

    #[test]
    fn eval_horner() {
        let f = p(&[1, -2, 3]); // 1 - 2q + 3q^2
        assert_eq!(f.eval_at(&Rat::from_int(2)), Rat::from_int(9));
    }

    #[test]
    fn string_round_trip() {
        let f = p(&[1, 0, -2]);
        assert_eq!(QPoly::parse(&f.canonical_string()).unwrap(), f);
        assert_eq!(QPoly::parse("0").unwrap(), QPoly::zero());
    }
}

//! The field of rational functions in one formal parameter `q`.
//!
//! Working with a formal `q` certifies "not a root of unity" hypotheses:
//! a q-integer like `1+q+q^2` is nonzero as a polynomial, so it is invertible
//! here even though it vanishes at specific roots of unity.

use super::{FieldScalar, QPoly, Rat, Scalar};
use crate::error::{Error, Result};
use std::fmt;

/// Reduced fraction of polynomials in `q`. Invariants: the denominator is
/// nonzero and monic, and gcd(num, den) = 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QRat {
    num: QPoly,
    den: QPoly,
}

impl QRat {
    /// The formal parameter `q`.
    pub fn gen() -> Self {
        QRat {
            num: QPoly::gen(),
            den: QPoly::one(),
        }
    }

    pub fn from_poly(p: QPoly) -> Self {
        QRat {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QRat::reduced(num, den))
    }

    fn reduced(num: QPoly, den: QPoly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return QRat {
                num: QPoly::zero(),
                den: QPoly::one(),
            };
        }
        if den.is_one() {
            return QRat {
                num,
                den: QPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        // make the denominator monic
        let lead = den.leading_coeff();
        if lead.is_one() {
            QRat { num, den }
        } else {
            let inv = lead.try_inv().unwrap();
            QRat {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numerator(&self) -> &QPoly {
        &self.num
    }

    pub fn denominator(&self) -> &QPoly {
        &self.den
    }

    /// A rational function with denominator 1, viewed as a polynomial.
    pub fn as_poly(&self) -> Option<&QPoly> {
        self.den.is_one().then_some(&self.num)
    }

    /// Specialize `q` to an exact rational; errors when the denominator
    /// vanishes there.
    pub fn eval_at(&self, q: &Rat) -> Result<Rat> {
        let den = self.den.eval_at(q);
        let inv = den.try_inv().ok_or(Error::DivisionByZero)?;
        Ok(self.num.eval_at(q).mul(&inv))
    }

    pub fn pow(&self, e: u64) -> Self {
        QRat {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Parses `"<poly> / <poly>"` or a bare polynomial string.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(" / ") {
            Some((num, den)) => QRat::new(QPoly::parse(num)?, QPoly::parse(den)?),
            None => Ok(QRat::from_poly(QPoly::parse(s)?)),
        }
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num.canonical_string())
        } else {
            write!(
                f,
                "{} / {}",
                self.num.canonical_string(),
                self.den.canonical_string()
            )
        }
    }
}

impl Scalar for QRat {
    fn zero() -> Self {
        QRat::from_poly(QPoly::zero())
    }
    fn one() -> Self {
        QRat::from_poly(QPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        QRat::reduced(num, self.den.mul(&rhs.den))
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        QRat::reduced(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
    fn neg(&self) -> Self {
        QRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(QRat::reduced(self.den.clone(), self.num.clone()))
        }
    }
    fn from_rat(r: &Rat) -> Self {
        QRat::from_poly(QPoly::constant(r.clone()))
    }
}

impl FieldScalar for QRat {}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> QPoly {
        QPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn reduction_cancels_common_factors() {
        // (1-q^2)/(1-q) = 1+q
        let x = QRat::new(poly(&[1, 0, -1]), poly(&[1, -1])).unwrap();
        assert_eq!(x, QRat::from_poly(poly(&[1, 1])));
        assert!(x.as_poly().is_some());
    }

    #[test]
    fn denominator_is_monic() {
        // 1/(2-2q) has denominator q-1 after normalization (sign flip folded in)
        let x = QRat::new(poly(&[1]), poly(&[2, -2])).unwrap();
        assert!(x.denominator().leading_coeff().is_one());
        let back = x.mul(&QRat::from_poly(poly(&[2, -2])));
        assert!(back.is_one());
    }

    #[test]
    fn field_inverse() {
        let x = QRat::new(poly(&[0, 1]), poly(&[1, 1])).unwrap(); // q/(1+q)
        let y = x.try_inv().unwrap();
        assert!(x.mul(&y).is_one());
        assert!(QRat::zero().try_inv().is_none());
    }

    #[test]
    fn specialization() {
        // (1-q^3)/(1-q) at q=2 -> 7
        let x = QRat::new(poly(&[1, 0, 0, -1]), poly(&[1, -1])).unwrap();
        assert_eq!(x.eval_at(&Rat::from_int(2)).unwrap(), Rat::from_int(7));
    }

    #[test]
    fn display_round_trip() {
        let x = QRat::new(poly(&[1, 2]), poly(&[-1, 0, 1])).unwrap();
        let s = x.to_string();
        assert_eq!(QRat::parse(&s).unwrap(), x);
    }
}

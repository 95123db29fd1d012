//! Exact coefficient arithmetic: rationals, rational functions in a formal
//! parameter `q`, truncated power series in the deformation parameter `t`,
//! and q-combinatorics. No floating point anywhere.

mod poly;
mod qcomb;
mod qrat;
mod series;

pub use poly::QPoly;
pub use qcomb::{binomial, factorial, q_binomial, q_binomial_poly, q_integer, q_integer_poly, q_pochhammer};
pub use qrat::QRat;
pub use series::TSeries;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A commutative ring element with exact arithmetic. Implemented by [`Rat`],
/// [`QRat`] and [`TSeries`] over either of them.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` when the element is not invertible.
    fn try_inv(&self) -> Option<Self>;
    /// Embed an exact rational.
    fn from_rat(r: &Rat) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rat(&Rat::from_int(n))
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        rhs.try_inv()
            .map(|i| self.mul(&i))
            .ok_or(Error::DivisionByZero)
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Canonical exact string form, used verbatim in machine output.
    fn canonical_string(&self) -> String {
        self.to_string()
    }

    /// For truncated series: the lowest power of t with a nonzero
    /// coefficient. `None` for plain scalars and for zero.
    fn lowest_t_order(&self) -> Option<usize> {
        None
    }
}

/// Marker for scalars forming a field: every nonzero element is invertible.
/// Required by the exact elimination layer.
pub trait FieldScalar: Scalar {}

/// Exact rational number. Stored reduced with positive denominator; zero is 0/1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    /// Parses "p/q" or a plain integer "p".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
        match s.split_once('/') {
            Some((num, den)) => {
                let num: BigInt = num.trim().parse().map_err(|_| bad())?;
                let den: BigInt = den.trim().parse().map_err(|_| bad())?;
                Rat::new(num, den)
            }
            None => {
                let num: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rat(BigRational::from_integer(num)))
            }
        }
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn one() -> Self {
        Rat(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rat(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rat(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }
    fn neg(&self) -> Self {
        Rat(-&self.0)
    }
    fn try_inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl FieldScalar for Rat {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_add() {
        let x = Rat::from_frac(1, 2);
        let y = Rat::from_frac(1, 3);
        assert_eq!(x.add(&y), Rat::from_frac(5, 6));
    }

    #[test]
    fn canonical_form_reduced() {
        let x = Rat::from_frac(2, 4);
        assert_eq!(x.canonical_string(), "1/2");
        let z = Rat::from_frac(0, 7);
        assert_eq!(z.canonical_string(), "0/1");
        let n = Rat::from_frac(3, -6);
        assert_eq!(n.canonical_string(), "-1/2");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let x = Rat::from_int(1);
        assert_eq!(x.div(&Rat::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["5/6", "-7/3", "0/1", "4/1"] {
            assert_eq!(Rat::parse(s).unwrap().canonical_string(), s);
        }
        assert_eq!(Rat::parse("3").unwrap(), Rat::from_int(3));
        assert!(Rat::parse("1/0").is_err());
        assert!(Rat::parse("x").is_err());
    }
}

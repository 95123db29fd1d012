//! q-combinatorics: q-integers, q-Pochhammer symbols and Gaussian binomial
//! coefficients, plus the ordinary integer combinatorics they specialize to.

use super::{QPoly, QRat, Rat, Scalar};
use crate::error::{Error, Result};

/// `[k] = (1-q^k)/(1-q) = 1 + q + ... + q^{k-1}`, with `[0] = 0`.
pub fn q_integer(k: u32) -> QRat {
    QRat::from_poly(q_integer_poly(k))
}

/// `[k]` as a polynomial, for evaluation at arbitrary scalar values of q.
pub fn q_integer_poly(k: u32) -> QPoly {
    QPoly::from_coeffs(vec![Rat::one(); k as usize])
}

/// `(q;q)_i = (1-q)(1-q^2)...(1-q^i)`, with `(q;q)_{-1} = (q;q)_0 = 1`.
pub fn q_pochhammer(i: i64) -> Result<QRat> {
    if i < -1 {
        return Err(Error::InvalidInput(format!(
            "q-Pochhammer index {i} below -1"
        )));
    }
    let mut acc = QPoly::one();
    for j in 1..=i.max(0) {
        // 1 - q^j
        let factor = QPoly::one().sub(&QPoly::monomial(Rat::one(), j as usize));
        acc = acc.mul(&factor);
    }
    Ok(QRat::from_poly(acc))
}

/// Gaussian binomial `[k choose i]_q = (q;q)_k / ((q;q)_i (q;q)_{k-i})`,
/// computed by the Pochhammer ratio. Requires `0 <= i <= k`.
pub fn q_binomial(k: u32, i: u32) -> Result<QRat> {
    if i > k {
        return Err(Error::InvalidInput(format!(
            "q-binomial requires i <= k, got k={k}, i={i}"
        )));
    }
    let num = q_pochhammer(k as i64)?;
    let den = q_pochhammer(i as i64)?.mul(&q_pochhammer((k - i) as i64)?);
    let ratio = num.div(&den)?;
    debug_assert!(ratio.as_poly().is_some(), "Gaussian binomial is a polynomial");
    Ok(ratio)
}

/// Gaussian binomial as a polynomial via the Pascal-type recurrence
/// `[k,i]_q = [k-1,i]_q + q^{k-i} [k-1,i-1]_q`. Independent of [`q_binomial`];
/// out-of-range `i` gives the zero polynomial. Used where the coefficient must
/// be evaluated at an arbitrary scalar value of `q`.
pub fn q_binomial_poly(k: u32, i: u32) -> QPoly {
    if i > k {
        return QPoly::zero();
    }
    // row-by-row Pascal triangle
    let mut row = vec![QPoly::one()]; // [0 choose 0]
    for n in 1..=k {
        let mut next = Vec::with_capacity(row.len() + 1);
        for j in 0..=n {
            let left = if j <= n - 1 { row[j as usize].clone() } else { QPoly::zero() };
            let up = if j >= 1 {
                row[(j - 1) as usize].mul(&QPoly::monomial(Rat::one(), (n - j) as usize))
            } else {
                QPoly::zero()
            };
            next.push(left.add(&up));
        }
        row = next;
    }
    row[i as usize].clone()
}

/// Ordinary binomial coefficient as an exact rational; zero when `i > m`.
pub fn binomial(m: u32, i: u32) -> Rat {
    if i > m {
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for j in 0..i {
        acc = acc.mul(&Rat::from_int((m - j) as i64));
        acc = acc.div(&Rat::from_int((j + 1) as i64)).unwrap();
    }
    acc
}

pub fn factorial(n: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 2..=n {
        acc = acc.mul(&Rat::from_int(j as i64));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> QPoly {
        QPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn q_integers() {
        assert!(q_integer(0).is_zero());
        assert!(q_integer(1).is_one());
        assert_eq!(q_integer(3), QRat::from_poly(poly(&[1, 1, 1])));
    }

    #[test]
    fn q_pochhammer_conventions() {
        assert!(q_pochhammer(-1).unwrap().is_one());
        assert!(q_pochhammer(0).unwrap().is_one());
        // (1-q)(1-q^2) = 1 - q - q^2 + q^3
        assert_eq!(
            q_pochhammer(2).unwrap(),
            QRat::from_poly(poly(&[1, -1, -1, 1]))
        );
        assert!(q_pochhammer(-2).is_err());
    }

    #[test]
    fn gaussian_binomials() {
        assert!(q_binomial(0, 0).unwrap().is_one());
        assert_eq!(q_binomial(2, 1).unwrap(), QRat::from_poly(poly(&[1, 1])));
        // [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4
        assert_eq!(
            q_binomial(4, 2).unwrap(),
            QRat::from_poly(poly(&[1, 1, 2, 1, 1]))
        );
        assert!(q_binomial(1, 2).is_err());
    }

    #[test]
    fn pascal_recurrence_matches_pochhammer_ratio() {
        for k in 0..=8u32 {
            for i in 0..=k {
                let via_ratio = q_binomial(k, i).unwrap();
                let via_pascal = QRat::from_poly(q_binomial_poly(k, i));
                assert_eq!(via_ratio, via_pascal, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn specializes_to_ordinary_binomial_at_q_one() {
        for k in 0..=8u32 {
            for i in 0..=k {
                let at_one = q_binomial_poly(k, i).eval_at(&Rat::one());
                assert_eq!(at_one, binomial(k, i), "k={k} i={i}");
            }
        }
    }

    #[test]
    fn integer_combinatorics() {
        assert_eq!(binomial(4, 2), Rat::from_int(6));
        assert_eq!(binomial(2, 5), Rat::zero());
        assert_eq!(factorial(5), Rat::from_int(120));
    }
}

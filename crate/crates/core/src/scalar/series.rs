//! Truncated formal power series in the deformation parameter `t`,
//! i.e. arithmetic in k[[t]]/(t^{N+1}).

use super::Scalar;
use crate::error::{Error, Result};
use std::fmt;

/// Order for constants produced without context (`zero`, `one`, `from_rat`).
/// Any arithmetic with a real series truncates to that series' order.
const UNBOUNDED: usize = usize::MAX;

/// A power series truncated at a fixed order `N`: coefficients `c_0..c_N`.
/// Mixed-order arithmetic truncates to the minimum order; equality compares
/// coefficientwise up to the common order.
#[derive(Clone, Debug)]
pub struct TSeries<B: Scalar> {
    coeffs: Vec<B>, // trailing zeros trimmed; index i is the t^i coefficient
    order: usize,
}

impl<B: Scalar> TSeries<B> {
    pub fn new(order: usize, mut coeffs: Vec<B>) -> Self {
        coeffs.truncate(order.saturating_add(1));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TSeries { coeffs, order }
    }

    pub fn constant(order: usize, c: B) -> Self {
        TSeries::new(order, vec![c])
    }

    /// `t^k` at the given truncation order.
    pub fn t_power(order: usize, k: usize) -> Self {
        let mut coeffs = vec![B::zero(); k + 1];
        coeffs[k] = B::one();
        TSeries::new(order, coeffs)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `t^n`; errors beyond the truncation order.
    pub fn coefficient(&self, n: usize) -> Result<B> {
        if n > self.order {
            return Err(Error::CoefficientOutOfRange {
                index: n,
                order: self.order,
            });
        }
        Ok(self.coeffs.get(n).cloned().unwrap_or_else(B::zero))
    }

    /// All coefficients `c_0..c_N`, zero-padded to the truncation order.
    pub fn coefficients(&self) -> Vec<B> {
        let n = if self.order == UNBOUNDED {
            self.coeffs.len().saturating_sub(1)
        } else {
            self.order
        };
        (0..=n)
            .map(|i| self.coeffs.get(i).cloned().unwrap_or_else(B::zero))
            .collect()
    }

    pub fn constant_term(&self) -> B {
        self.coeffs.first().cloned().unwrap_or_else(B::zero)
    }

    fn common_order(&self, rhs: &Self) -> usize {
        self.order.min(rhs.order)
    }

    /// Minimal `n` with a nonzero `t^n` coefficient, if any.
    pub fn lowest_order_term(&self) -> Option<(usize, B)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
    }
}

impl<B: Scalar> PartialEq for TSeries<B> {
    fn eq(&self, other: &Self) -> bool {
        let n = self.common_order(other);
        let len = self.coeffs.len().max(other.coeffs.len());
        for i in 0..len.min(n.saturating_add(1)) {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            let eq = match (a, b) {
                (Some(a), Some(b)) => a == b,
                (Some(a), None) => a.is_zero(),
                (None, Some(b)) => b.is_zero(),
                (None, None) => true,
            };
            if !eq {
                return false;
            }
        }
        true
    }
}

impl<B: Scalar> fmt::Display for TSeries<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients().iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl<B: Scalar> Scalar for TSeries<B> {
    fn zero() -> Self {
        TSeries {
            coeffs: Vec::new(),
            order: UNBOUNDED,
        }
    }
    fn one() -> Self {
        TSeries {
            coeffs: vec![B::one()],
            order: UNBOUNDED,
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        let order = self.common_order(rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(B::zero);
                match rhs.coeffs.get(i) {
                    Some(b) => a.add(b),
                    None => a,
                }
            })
            .collect();
        TSeries::new(order, coeffs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let order = self.common_order(rhs);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return TSeries::new(order, Vec::new());
        }
        let len = (self.coeffs.len() + rhs.coeffs.len() - 1).min(order.saturating_add(1));
        let mut coeffs = vec![B::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        TSeries::new(order, coeffs)
    }
    fn neg(&self) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            order: self.order,
        }
    }

    /// Inverse exists iff the constant term is invertible in the base ring.
    fn try_inv(&self) -> Option<Self> {
        let c0 = self.constant_term().try_inv()?;
        if self.order == UNBOUNDED {
            // a bare constant
            if self.coeffs.len() > 1 {
                return None;
            }
            return Some(TSeries {
                coeffs: vec![c0],
                order: UNBOUNDED,
            });
        }
        // inv_n = -c0^{-1} * sum_{k=1..n} c_k * inv_{n-k}
        let mut inv = vec![c0.clone()];
        for n in 1..=self.order {
            let mut acc = B::zero();
            for k in 1..=n {
                let ck = self.coeffs.get(k).cloned().unwrap_or_else(B::zero);
                if !ck.is_zero() {
                    acc = acc.add(&ck.mul(&inv[n - k]));
                }
            }
            inv.push(acc.mul(&c0).neg());
        }
        Some(TSeries::new(self.order, inv))
    }

    fn from_rat(r: &super::Rat) -> Self {
        TSeries {
            coeffs: vec![B::from_rat(r)],
            order: UNBOUNDED,
        }
    }

    fn lowest_t_order(&self) -> Option<usize> {
        self.lowest_order_term().map(|(i, _)| i)
    }
}

#[cfg(test)]
mod tests {
    use super::super::Rat;
    use super::*;

    fn s(order: usize, coeffs: &[(i64, i64)]) -> TSeries<Rat> {
        TSeries::new(
            order,
            coeffs.iter().map(|&(n, d)| Rat::from_frac(n, d)).collect(),
        )
    }

    #[test]
    fn truncation_drops_high_terms() {
        // (1+t)(1-t) at order 1 -> 1
        let x = s(1, &[(1, 1), (1, 1)]);
        let y = s(1, &[(1, 1), (-1, 1)]);
        let p = x.mul(&y);
        assert_eq!(p, s(1, &[(1, 1)]));
        assert_eq!(p.coefficient(1).unwrap(), Rat::zero());
    }

    #[test]
    fn coefficient_extraction() {
        // 1 + t + (c + 1/2) t^2 with c = 1/3
        let x = s(2, &[(1, 1), (1, 1), (5, 6)]);
        assert_eq!(x.coefficient(1).unwrap(), Rat::from_int(1));
        assert_eq!(x.coefficient(0).unwrap(), Rat::from_int(1));
        assert!(x.coefficient(3).is_err());
        // (1+t)^2 at order 2 -> t^2 coefficient 1
        let y = s(2, &[(1, 1), (1, 1)]);
        assert_eq!(y.mul(&y).coefficient(2).unwrap(), Rat::from_int(1));
    }

    #[test]
    fn inverse_needs_unit_constant_term() {
        let x = s(3, &[(1, 1), (2, 1)]);
        let inv = x.try_inv().unwrap();
        assert!(x.mul(&inv).is_one());
        let t = TSeries::<Rat>::t_power(3, 1);
        assert!(t.try_inv().is_none());
    }

    #[test]
    fn mixed_order_truncates_to_minimum() {
        let x = s(4, &[(1, 1), (1, 1), (1, 1)]);
        let y = s(2, &[(1, 1)]);
        assert_eq!(x.mul(&y).order(), 2);
        assert!(x.sub(&x).is_zero());
    }
}

//! Dense univariate polynomials over `Ratio`.
//!
//! Used for the exact r̂-series of the random-cluster limit computations; all
//! series bookkeeping is polynomial identity work, never floating truncation.

use crate::ratio::{self, Ratio};
use num::{One, Zero};
use std::fmt;

/// Polynomial in one variable; `coeffs[k]` is the coefficient of `t^k`.
/// Trailing zero coefficients are trimmed, so `deg(0) = None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Ratio>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(ratio::one())
    }

    pub fn constant(c: Ratio) -> Self {
        Poly { coeffs: vec![c] }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<Ratio>) -> Self {
        Poly { coeffs }.trimmed()
    }

    /// `c * t^k`
    pub fn monomial(c: Ratio, k: usize) -> Self {
        let mut coeffs = vec![Ratio::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }.trimmed()
    }

    /// `1 - t`
    pub fn one_minus_t() -> Self {
        Poly::from_coeffs(vec![ratio::one(), ratio::int(-1)])
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Ratio {
        self.coeffs.get(k).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        Poly { coeffs }.trimmed()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&ratio::int(-1)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Ratio::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }.trimmed()
    }

    pub fn scale(&self, c: &Ratio) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
        .trimmed()
    }

    pub fn pow(&self, mut e: usize) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, t: &Ratio) -> Ratio {
        let mut acc = Ratio::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// `t^k (1-t)^(m-k)`, the Bernoulli weight of a k-of-m configuration.
    pub fn bernoulli_weight(k: usize, m: usize) -> Poly {
        Poly::monomial(Ratio::one(), k).mul(&Poly::one_minus_t().pow(m - k))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};

    #[test]
    fn arithmetic() {
        let p = Poly::from_coeffs(vec![int(1), int(2)]); // 1 + 2t
        let q = Poly::from_coeffs(vec![int(-1), int(0), int(3)]); // -1 + 3t^2
        assert_eq!(p.add(&q), Poly::from_coeffs(vec![int(0), int(2), int(3)]));
        assert_eq!(
            p.mul(&q),
            Poly::from_coeffs(vec![int(-1), int(-2), int(3), int(6)])
        );
        assert_eq!(p.eval(&ratio(1, 2)), int(2));
    }

    #[test]
    fn bernoulli_weights_sum_to_one() {
        // sum_k C(m,k) t^k (1-t)^(m-k) = 1
        let m = 5;
        let mut acc = Poly::zero();
        for k in 0..=m {
            acc = acc.add(&Poly::bernoulli_weight(k, m).scale(&crate::ratio::binomial(m, k)));
        }
        assert_eq!(acc, Poly::one());
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::from_coeffs(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        let z = Poly::from_coeffs(vec![int(0)]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }
}

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};

use super::{rat, BigRat, ExactError};

/// Dense univariate polynomial over ℚ in the variable `z`.
///
/// Coefficients are stored by ascending power with no trailing zeros, so
/// the zero polynomial is the empty sequence and `degree()` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(rat(1))
    }

    pub fn constant(c: BigRat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `z` itself.
    pub fn var() -> Self {
        Self::from_coeffs(vec![rat(0), rat(1)])
    }

    /// c·z^k.
    pub fn monomial(c: BigRat, k: usize) -> Self {
        let mut coeffs = vec![BigRat::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// Build from ascending-power coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// Convenience constructor from integer coefficients, ascending powers.
    pub fn from_ints(ints: &[i64]) -> Self {
        Self::from_coeffs(ints.iter().map(|&n| rat(n)).collect())
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    /// Coefficient of z^k (zero when k exceeds the degree).
    pub fn coeff(&self, k: usize) -> BigRat {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = −1, for degree comparisons.
    pub fn degree_i64(&self) -> i64 {
        self.degree().map_or(-1, |d| d as i64)
    }

    pub fn leading_coeff(&self) -> Option<&BigRat> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * rat(k as i64))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// n-th derivative.
    pub fn derivative_n(&self, n: usize) -> UniPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    pub fn scale(&self, c: &BigRat) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by z^k.
    pub fn shift(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigRat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs }
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading_coeff() {
            None => UniPoly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Euclidean division: a = q·b + r with deg r < deg b.
    pub fn divmod(&self, b: &UniPoly) -> Result<(UniPoly, UniPoly), ExactError> {
        let db = b.degree().ok_or(ExactError::DivisionByZero)?;
        let lb = b.leading_coeff().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = vec![BigRat::zero(); self.coeffs.len().saturating_sub(db)];
        while let Some(dr) = rem.degree() {
            if dr < db {
                break;
            }
            let factor = rem.leading_coeff().unwrap() / &lb;
            let shift = dr - db;
            quot[shift] = factor.clone();
            // rem -= factor * z^shift * b
            let mut coeffs = rem.coeffs;
            for (k, c) in b.coeffs.iter().enumerate() {
                let v = &coeffs[shift + k] - c * &factor;
                coeffs[shift + k] = v;
            }
            rem = UniPoly::from_coeffs(coeffs);
        }
        Ok((UniPoly::from_coeffs(quot), rem))
    }

    /// Monic greatest common divisor via the Euclidean algorithm.
    pub fn gcd(&self, other: &UniPoly) -> Result<UniPoly, ExactError> {
        if self.is_zero() && other.is_zero() {
            return Err(ExactError::GcdOfZeros);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Exact quotient; None when the division leaves a remainder.
    pub fn exact_div(&self, b: &UniPoly) -> Result<Option<UniPoly>, ExactError> {
        let (q, r) = self.divmod(b)?;
        Ok(if r.is_zero() { Some(q) } else { None })
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        UniPoly::from_coeffs(coeffs)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        UniPoly::from_coeffs(coeffs)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let v = &coeffs[i + j] + a * b;
                coeffs[i + j] = v;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

fn fmt_rat(c: &BigRat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for UniPoly {
    /// Canonical rendering: descending powers, explicit `*`, rationals as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigRat::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", fmt_rat(&mag))?;
            }
            if k > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if k == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(ints: &[i64]) -> UniPoly {
        UniPoly::from_ints(ints)
    }

    #[test]
    fn divmod_factorization() {
        // (z^2 - 1) / (z - 1) = z + 1 rem 0
        let (q, r) = p(&[-1, 0, 1]).divmod(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn divmod_z_cubed() {
        let (q, r) = p(&[0, 0, 0, 1]).divmod(&p(&[0, 1])).unwrap();
        assert_eq!(q, p(&[0, 0, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn divmod_with_remainder() {
        // z^2 + 1 = z·z + 1, by long division
        let (q, r) = p(&[1, 0, 1]).divmod(&p(&[0, 1])).unwrap();
        assert_eq!(q, p(&[0, 1]));
        assert_eq!(r, p(&[1]));
    }

    #[test]
    fn divmod_by_zero_errors() {
        assert!(p(&[1, 2]).divmod(&UniPoly::zero()).is_err());
    }

    #[test]
    fn gcd_basic() {
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[-1, 1])).unwrap(), p(&[-1, 1]));
        assert_eq!(p(&[0, 1]).gcd(&p(&[1])).unwrap(), p(&[1]));
        // Euclid by hand: gcd(z^3 - z, z^2 - 1) = z^2 - 1
        assert_eq!(p(&[0, -1, 0, 1]).gcd(&p(&[-1, 0, 1])).unwrap(), p(&[-1, 0, 1]));
    }

    #[test]
    fn gcd_of_zeros_errors() {
        assert!(UniPoly::zero().gcd(&UniPoly::zero()).is_err());
    }

    #[test]
    fn display_canonical() {
        let q = UniPoly::from_coeffs(vec![rat(1), rat(-1), super::super::ratio(3, 2)]);
        assert_eq!(q.to_string(), "3/2*z^2 - z + 1");
        assert_eq!(UniPoly::zero().to_string(), "0");
        assert_eq!(UniPoly::var().to_string(), "z");
    }
}

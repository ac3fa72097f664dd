use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{BigRat, UniPoly};

/// Reduced rational function num/den with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: UniPoly::one() };
        }
        let g = num.gcd(&den).unwrap();
        let num = num.exact_div(&g).unwrap().unwrap();
        let den = den.exact_div(&g).unwrap().unwrap();
        let lc = den.leading_coeff().unwrap().clone();
        RatFunc {
            num: num.scale(&lc.recip()),
            den: den.scale(&lc.recip()),
        }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc { num: p, den: UniPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_polynomial(&self) -> Option<UniPoly> {
        self.is_polynomial().then(|| self.num.clone())
    }

    pub fn recip(&self) -> RatFunc {
        assert!(!self.is_zero(), "reciprocal of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Quotient-rule derivative, reduced.
    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    pub fn derivative_n(&self, n: usize) -> RatFunc {
        let mut r = self.clone();
        for _ in 0..n {
            r = r.derivative();
        }
        r
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    #[test]
    fn reduction_and_monic_denominator() {
        // (2z^2 - 2) / (4z - 4) = (z + 1)/2
        let r = RatFunc::new(UniPoly::from_ints(&[-2, 0, 2]), UniPoly::from_ints(&[-4, 4]));
        assert_eq!(r.num(), &UniPoly::from_coeffs(vec![rat(1) / rat(2), rat(1) / rat(2)]));
        assert_eq!(r.den(), &UniPoly::one());
    }

    #[test]
    fn derivative_of_inverse() {
        // (1/z)' = -1/z^2
        let r = RatFunc::new(UniPoly::one(), UniPoly::var());
        let d = r.derivative();
        assert_eq!(d.num(), &UniPoly::from_ints(&[-1]));
        assert_eq!(d.den(), &UniPoly::from_ints(&[0, 0, 1]));
    }

    #[test]
    fn field_arithmetic() {
        let z = RatFunc::from_poly(UniPoly::var());
        let inv = z.recip();
        assert_eq!(&z * &inv, RatFunc::one());
        assert_eq!(&(&z + &inv) - &z, inv);
    }
}

//! Sparse exact multivariate polynomials in `z, y1..yn` over ℚ.
//!
//! Terms are kept in a BTreeMap under graded lexicographic order, so
//! iteration (and therefore printing and reporting) is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};

use crate::exact::{rat, BigRat, UniPoly};

/// Default cap on total degree of any intermediate result.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Variable of the ring ℚ[z, y1..yn]: `Y(j)` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    Z,
    Y(usize),
}

/// Exponent vector (e_z, e_1, …, e_n), ordered graded-lexicographically:
/// total degree first, then lexicographic with z before y1 before y2 …
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Total degree in the y-variables only.
    pub fn y_degree(&self) -> u32 {
        self.0[1..].iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MPolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),
    #[error("variable index out of range: y{0} with nvars {1}")]
    VarOutOfRange(usize, usize),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("total degree {0} exceeds the cap {1}")]
    DegreeCap(usize, usize),
}

/// Sparse multivariate polynomial in z, y1..yn with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars + 1]), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, rat(1))
    }

    pub fn var(nvars: usize, v: Var) -> Result<Self, MPolyError> {
        let mut exps = vec![0u32; nvars + 1];
        match v {
            Var::Z => exps[0] = 1,
            Var::Y(j) => {
                if j == 0 || j > nvars {
                    return Err(MPolyError::VarOutOfRange(j, nvars));
                }
                exps[j] = 1;
            }
        }
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial(exps), rat(1));
        Ok(p)
    }

    pub fn from_term(nvars: usize, exps: Vec<u32>, c: BigRat) -> Self {
        assert_eq!(exps.len(), nvars + 1);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    /// Embed a univariate polynomial in z.
    pub fn from_unipoly(nvars: usize, u: &UniPoly) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in u.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut exps = vec![0u32; nvars + 1];
                exps[0] = k as u32;
                p.terms.insert(Monomial(exps), c.clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn constant_part(&self) -> BigRat {
        self.terms
            .get(&Monomial(vec![0; self.nvars + 1]))
            .cloned()
            .unwrap_or_else(BigRat::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Max total degree in the y-variables.
    pub fn y_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.y_degree()).max()
    }

    pub fn z_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.0[0]).max()
    }

    /// Leading term under graded lex.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigRat)> {
        self.terms.iter().next_back()
    }

    /// Some(p as UniPoly) when no y-variable occurs.
    pub fn as_unipoly(&self) -> Option<UniPoly> {
        if self.terms.keys().any(|m| m.y_degree() > 0) {
            return None;
        }
        let deg = self.z_degree().map_or(0, |d| d as usize);
        let mut coeffs = vec![BigRat::zero(); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[0] as usize] = c.clone();
        }
        Some(UniPoly::from_coeffs(coeffs))
    }

    fn check_nvars(&self, other: &MultiPoly) -> Result<(), MPolyError> {
        if self.nvars != other.nvars {
            return Err(MPolyError::NvarsMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn insert_add(&mut self, m: Monomial, c: BigRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_checked(&self, rhs: &MultiPoly) -> Result<MultiPoly, MPolyError> {
        self.check_nvars(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub_checked(&self, rhs: &MultiPoly) -> Result<MultiPoly, MPolyError> {
        self.check_nvars(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn mul_checked(&self, rhs: &MultiPoly) -> Result<MultiPoly, MPolyError> {
        self.check_nvars(rhs)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.insert_add(Monomial(exps), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut out = MultiPoly::one(self.nvars);
        for _ in 0..k {
            out = out.mul_checked(self).unwrap();
        }
        out
    }

    /// Formal partial derivative with respect to `var`.
    pub fn partial_derivative(&self, var: Var) -> Result<MultiPoly, MPolyError> {
        let idx = match var {
            Var::Z => 0,
            Var::Y(j) => {
                if j == 0 || j > self.nvars {
                    return Err(MPolyError::VarOutOfRange(j, self.nvars));
                }
                j
            }
        };
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.insert_add(Monomial(exps), c * rat(e as i64));
        }
        Ok(out)
    }

    /// Exact division by reduction against the single divisor under graded
    /// lex. `Ok(None)` means "not divisible" — a meaningful verdict here,
    /// not an error.
    pub fn exact_divide(&self, b: &MultiPoly) -> Result<Option<MultiPoly>, MPolyError> {
        self.check_nvars(b)?;
        let (lead_m, lead_c) = b.leading_term().ok_or(MPolyError::DivisionByZero)?;
        let lead_m = lead_m.clone();
        let lead_c = lead_c.clone();
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            let Some(exps) = rm
                .0
                .iter()
                .zip(&lead_m.0)
                .map(|(a, b)| a.checked_sub(*b))
                .collect::<Option<Vec<u32>>>()
            else {
                return Ok(None);
            };
            let factor = MultiPoly::from_term(self.nvars, exps, rc / &lead_c);
            quot = quot.add_checked(&factor)?;
            rem = rem.sub_checked(&factor.mul_checked(b)?)?;
        }
        Ok(Some(quot))
    }

    /// Decompose by total degree in the y-variables. Returns (degree, component)
    /// pairs in ascending degree; summing them reconstructs `self`.
    pub fn y_homogeneous_components(&self) -> Vec<(u32, MultiPoly)> {
        let mut map: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            map.entry(m.y_degree())
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .insert_add(m.clone(), c.clone());
        }
        map.into_iter().collect()
    }

    /// Coefficients q_0..q_m with self = Σ q_k·y_j^k and each q_k free of y_j.
    pub fn coefficients_in(&self, j: usize) -> Result<Vec<MultiPoly>, MPolyError> {
        if j == 0 || j > self.nvars {
            return Err(MPolyError::VarOutOfRange(j, self.nvars));
        }
        let top = self.terms.keys().map(|m| m.0[j]).max().unwrap_or(0);
        let mut out = vec![MultiPoly::zero(self.nvars); top as usize + 1];
        for (m, c) in &self.terms {
            let k = m.0[j] as usize;
            let mut exps = m.0.clone();
            exps[j] = 0;
            out[k].insert_add(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Fail fast when an intermediate result outgrows the cap.
    pub fn check_degree_cap(&self, cap: usize) -> Result<(), MPolyError> {
        if let Some(d) = self.total_degree() {
            if d as usize > cap {
                return Err(MPolyError::DegreeCap(d as usize, cap));
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.add_checked(rhs).expect("nvars mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.sub_checked(rhs).expect("nvars mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_checked(rhs).expect("nvars mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&rat(-1))
    }
}

fn fmt_rat(c: &BigRat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    /// Descending graded lex, explicit `*`, variables z, y1..yn.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
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
            let is_const_term = m.total_degree() == 0;
            let show_coeff = is_const_term || !mag.is_one();
            if show_coeff {
                write!(f, "{}", fmt_rat(&mag))?;
            }
            let mut need_star = show_coeff;
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if need_star {
                    write!(f, "*")?;
                }
                need_star = true;
                if idx == 0 {
                    write!(f, "z")?;
                } else {
                    write!(f, "y{}", idx)?;
                }
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
            Ok(())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    pub fn y(nvars: usize, j: usize) -> MultiPoly {
        MultiPoly::var(nvars, Var::Y(j)).unwrap()
    }

    pub fn z(nvars: usize) -> MultiPoly {
        MultiPoly::var(nvars, Var::Z).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        assert_eq!((&y1 * &y2).to_string(), "y1*y2");
        let zz = z(2);
        let prod = &(&y1 + &zz) * &(&y1 - &zz);
        assert_eq!(prod, &(&y1 * &y1) - &(&zz * &zz));
        // (y2^2 - z·y1^2) + z·y1^2 = y2^2
        let a = &(&y2 * &y2) - &(&zz * &(&y1 * &y1));
        let b = &zz * &(&y1 * &y1);
        assert_eq!(&a + &b, &y2 * &y2);
    }

    #[test]
    fn nvars_mismatch_errors() {
        assert!(y(2, 1).add_checked(&y(3, 1)).is_err());
    }

    #[test]
    fn partial_derivatives() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        let zz = z(2);
        // ∂(z·y1^2)/∂y1 = 2z·y1
        let p = &zz * &(&y1 * &y1);
        assert_eq!(
            p.partial_derivative(Var::Y(1)).unwrap(),
            (&zz * &y1).scale(&rat(2))
        );
        // ∂(y2^3)/∂z = 0
        assert!(y2.pow(3).partial_derivative(Var::Z).unwrap().is_zero());
        // ∂(z^2·y1·y2)/∂z = 2z·y1·y2
        let q = &(&zz * &zz) * &(&y1 * &y2);
        assert_eq!(
            q.partial_derivative(Var::Z).unwrap(),
            (&(&zz * &y1) * &y2).scale(&rat(2))
        );
        assert!(y1.partial_derivative(Var::Y(5)).is_err());
    }

    #[test]
    fn exact_divide_examples() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        let zz = z(2);
        // (y1^2 - z^2) / (y1 - z) = y1 + z
        let a = &(&y1 * &y1) - &(&zz * &zz);
        let b = &y1 - &zz;
        assert_eq!(a.exact_divide(&b).unwrap(), Some(&y1 + &zz));
        // ((z+1)·(y2^2 - z·y1^2)) / (y2^2 - z·y1^2) = z + 1
        let core = &(&y2 * &y2) - &(&zz * &(&y1 * &y1));
        let zp1 = &zz + &MultiPoly::one(2);
        let prod = &zp1 * &core;
        assert_eq!(prod.exact_divide(&core).unwrap(), Some(zp1));
        // y1 + 1 not divisible by y2
        let c = &y1 + &MultiPoly::one(2);
        assert_eq!(c.exact_divide(&y2).unwrap(), None);
        // divisor zero is an error
        assert!(c.exact_divide(&MultiPoly::zero(2)).is_err());
    }

    #[test]
    fn homogeneous_components() {
        let (y1, y2) = (y(2, 1), y(2, 2));
        let zz = z(2);
        // y2^2 - z·y1^2 + z^3 → [(0, z^3), (2, y2^2 - z·y1^2)]
        let p = &(&(&y2 * &y2) - &(&zz * &(&y1 * &y1))) + &zz.pow(3);
        let comps = p.y_homogeneous_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], (0, zz.pow(3)));
        assert_eq!(comps[1], (2, &(&y2 * &y2) - &(&zz * &(&y1 * &y1))));
        // y1·y2 + y1 → [(1, y1), (2, y1·y2)]
        let q = &(&y1 * &y2) + &y1;
        assert_eq!(
            q.y_homogeneous_components(),
            vec![(1, y1.clone()), (2, &y1 * &y2)]
        );
        assert!(MultiPoly::zero(2).y_homogeneous_components().is_empty());
    }

    #[test]
    fn coefficients_in_examples() {
        let (y1, y2, y3) = (y(3, 1), y(3, 2), y(3, 3));
        let zz = z(3);
        // p = y2^2 - z·y1^2 + y3 in powers of y3 → [y2^2 - z·y1^2, 1]
        let p = &(&(&y2 * &y2) - &(&zz * &(&y1 * &y1))) + &y3;
        let qs = p.coefficients_in(3).unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0], &(&y2 * &y2) - &(&zz * &(&y1 * &y1)));
        assert_eq!(qs[1], MultiPoly::one(3));
        // p = y1^2 in powers of y2 → [y1^2]
        let p2 = y(2, 1).pow(2);
        assert_eq!(p2.coefficients_in(2).unwrap(), vec![p2.clone()]);
        // p = y2^3 in powers of y2 → [0, 0, 0, 1]
        let p3 = y(2, 2).pow(3);
        let qs3 = p3.coefficients_in(2).unwrap();
        assert_eq!(qs3.len(), 4);
        assert!(qs3[0].is_zero() && qs3[1].is_zero() && qs3[2].is_zero());
        assert_eq!(qs3[3], MultiPoly::one(2));
    }

    #[test]
    fn display_rational_coefficients() {
        let p = &z(1).scale(&ratio(3, 2)) + &MultiPoly::one(1);
        assert_eq!(p.to_string(), "3/2*z + 1");
    }
}

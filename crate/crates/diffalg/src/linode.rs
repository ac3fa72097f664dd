//! Linear differential operators with polynomial coefficients: formal
//! adjoints, the bilinear concomitant and Lagrange identity, bounded
//! polynomial/rational solution spaces, Riccati-based irreducibility
//! evidence for order 2, and the antiderivative-algebraicity decision.

use std::fmt;

use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::exact::{rational_roots, rat, BigRat, ExactError, RatFunc, UniPoly};
use crate::linalg::QMat;
use crate::mpoly::{MultiPoly, Var};
use crate::vfield::{make_derivation, PolyVectorField};

/// Default cap on candidate solution degrees.
pub const DEFAULT_SOLUTION_DEGREE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinodeError {
    #[error("operator with zero leading coefficient")]
    ZeroOperator,
    #[error("leading coefficient does not split over Q: denominator bound unavailable")]
    NonSplittingLeading,
    #[error("Riccati analysis requires an order-2 operator, got order {0}")]
    NotOrderTwo(usize),
    #[error("Riccati analysis requires a constant leading coefficient")]
    NonConstantLeading,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Operator Σ a_i ∂^i with UniPoly coefficients, a_n ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOperator {
    coeffs: Vec<UniPoly>,
}

impl DiffOperator {
    /// Coefficients a_0..a_n by derivative order; trailing zeros trimmed.
    pub fn new(mut coeffs: Vec<UniPoly>) -> Result<Self, LinodeError> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(LinodeError::ZeroOperator);
        }
        Ok(DiffOperator { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    /// ∂² − z.
    pub fn airy() -> Self {
        DiffOperator::new(vec![-&UniPoly::var(), UniPoly::zero(), UniPoly::one()]).unwrap()
    }

    pub fn apply_poly(&self, p: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero();
        let mut deriv = p.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                deriv = deriv.derivative();
            }
            acc = &acc + &(a * &deriv);
        }
        acc
    }

    pub fn apply_ratfunc(&self, r: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero();
        let mut deriv = r.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                deriv = deriv.derivative();
            }
            acc = &acc + &(&RatFunc::from_poly(a.clone()) * &deriv);
        }
        acc
    }

    /// Formal adjoint L*(v) = Σ (−1)^i (a_i·v)^(i), expanded to standard
    /// form b_j = Σ_{i≥j} (−1)^i C(i,j)·a_i^{(i−j)}.
    pub fn adjoint(&self) -> DiffOperator {
        let n = self.order();
        let mut b = vec![UniPoly::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
            for (j, bj) in b.iter_mut().enumerate().take(i + 1) {
                let c = binomial(i, j);
                *bj = &*bj + &a.derivative_n(i - j).scale(&(&sign * &c));
            }
        }
        DiffOperator::new(b).expect("adjoint preserves the leading coefficient up to sign")
    }
}

fn binomial(n: usize, k: usize) -> BigRat {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from((n - i) as i64);
        den *= BigInt::from((i + 1) as i64);
    }
    BigRat::new(num, den)
}

impl fmt::Display for DiffOperator {
    /// Rendering like `D^2 - z` or `(z^2 + 1)*D + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let (lead_sign, body) = render_coeff_term(a, i);
            if first {
                if lead_sign {
                    write!(f, "-")?;
                }
                first = false;
            } else if lead_sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", body)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn render_coeff_term(a: &UniPoly, i: usize) -> (bool, String) {
    let d_part = match i {
        0 => String::new(),
        1 => "D".to_string(),
        _ => format!("D^{}", i),
    };
    if i == 0 {
        let neg = a.coeffs().iter().rev().next().map(|c| c < &BigRat::zero()).unwrap_or(false);
        let shown = if neg && a.coeffs().iter().filter(|c| !c.is_zero()).count() == 1 {
            (-a).to_string()
        } else if neg {
            return (false, format!("({})", a));
        } else {
            a.to_string()
        };
        return (neg, shown);
    }
    let nonzero_terms = a.coeffs().iter().filter(|c| !c.is_zero()).count();
    if a.is_constant() {
        let c = a.coeff(0);
        let neg = c < BigRat::zero();
        let mag = if neg { -&c } else { c };
        if mag.is_one() {
            (neg, d_part)
        } else if mag.denom().is_one() {
            (neg, format!("{}*{}", mag.numer(), d_part))
        } else {
            (neg, format!("{}/{}*{}", mag.numer(), mag.denom(), d_part))
        }
    } else if nonzero_terms == 1 {
        let neg = a.leading_coeff().unwrap() < &BigRat::zero();
        let shown = if neg { (-a).to_string() } else { a.to_string() };
        (neg, format!("{}*{}", shown, d_part))
    } else {
        (false, format!("({})*{}", a, d_part))
    }
}

/// Table c_{ij} with π(u,v) = Σ c_{ij}·u^{(i)}·v^{(j)}, 0 ≤ i,j ≤ n−1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearConcomitant {
    table: Vec<Vec<UniPoly>>,
}

impl BilinearConcomitant {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &UniPoly {
        &self.table[i][j]
    }

    /// Coefficient of u^{(i)} after substituting a rational v: Σ_j c_{ij}·v^{(j)}.
    pub fn u_coefficients(&self, v: &RatFunc) -> Vec<RatFunc> {
        let n = self.order();
        let mut vder = Vec::with_capacity(n);
        let mut cur = v.clone();
        for _ in 0..n {
            vder.push(cur.clone());
            cur = cur.derivative();
        }
        (0..n)
            .map(|i| {
                let mut acc = RatFunc::zero();
                for (j, vj) in vder.iter().enumerate() {
                    acc = &acc + &(&RatFunc::from_poly(self.table[i][j].clone()) * vj);
                }
                acc
            })
            .collect()
    }
}

/// Bilinear concomitant of L from the single-term expansion
/// v·a_m·u^{(m)} − u·(−1)^m(a_m v)^{(m)} = ∂[Σ_{j+k=m−1} (−1)^j (a_m v)^{(j)} u^{(k)}].
pub fn concomitant(op: &DiffOperator) -> BilinearConcomitant {
    let n = op.order();
    let mut table = vec![vec![UniPoly::zero(); n]; n];
    for (m, a) in op.coeffs().iter().enumerate() {
        for j in 0..m {
            let k = m - 1 - j;
            let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
            // (a v)^{(j)} = Σ_l C(j,l) a^{(j−l)} v^{(l)}
            for l in 0..=j {
                let c = binomial(j, l);
                table[k][l] = &table[k][l] + &a.derivative_n(j - l).scale(&(&sign * &c));
            }
        }
    }
    BilinearConcomitant { table }
}

/// Symbolic check of v·L(u) − u·L*(v) = ∂π(u,v) in the differential
/// polynomial ring with formal variables u, u', …, v, v', ….
pub fn verify_lagrange(op: &DiffOperator) -> bool {
    let n = op.order();
    // variables: y1..y_{n+1} = u..u^{(n)}, y_{n+2}..y_{2n+2} = v..v^{(n)}
    let nv = 2 * (n + 1);
    let var = |j: usize| MultiPoly::var(nv, Var::Y(j)).unwrap();
    // shift derivation: each formal derivative maps to the next; the top
    // ones are never differentiated because π has order ≤ n−1
    let mut comps = Vec::with_capacity(nv);
    for j in 1..=nv {
        if j == n + 1 || j == 2 * n + 2 {
            comps.push(MultiPoly::zero(nv));
        } else {
            comps.push(var(j + 1));
        }
    }
    let d = make_derivation(PolyVectorField::new(comps).unwrap());
    let embed = |p: &UniPoly| MultiPoly::from_unipoly(nv, p);
    let u = |i: usize| var(i + 1);
    let v = |i: usize| var(n + 2 + i);
    let mut vlu = MultiPoly::zero(nv);
    for (i, a) in op.coeffs().iter().enumerate() {
        vlu = &vlu + &(&(&embed(a) * &u(i)) * &v(0));
    }
    let adj = op.adjoint();
    let mut ulsv = MultiPoly::zero(nv);
    for (i, b) in adj.coeffs().iter().enumerate() {
        ulsv = &ulsv + &(&(&embed(b) * &v(i)) * &u(0));
    }
    let pi = concomitant(op);
    let mut pi_poly = MultiPoly::zero(nv);
    for i in 0..n {
        for j in 0..n {
            let c = pi.entry(i, j);
            if !c.is_zero() {
                pi_poly = &pi_poly + &(&(&embed(c) * &u(i)) * &v(j));
            }
        }
    }
    let lhs = &vlu - &ulsv;
    let rhs = d.apply(&pi_poly).expect("same ring");
    lhs == rhs
}

/// Affine solution space: particular solution plus homogeneous basis.
/// `None` only occurs for inhomogeneous problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineSpace<T> {
    None,
    Space { particular: T, basis: Vec<T> },
}

impl<T> AffineSpace<T> {
    pub fn is_none(&self) -> bool {
        matches!(self, AffineSpace::None)
    }
}

/// All polynomial solutions of L(p) = rhs, with the candidate degree taken
/// from the operator's indicial function at infinity (capped).
pub fn polynomial_solutions(op: &DiffOperator, rhs: &UniPoly) -> AffineSpace<UniPoly> {
    polynomial_solutions_capped(op, rhs, DEFAULT_SOLUTION_DEGREE_CAP)
}

pub fn polynomial_solutions_capped(
    op: &DiffOperator,
    rhs: &UniPoly,
    cap: usize,
) -> AffineSpace<UniPoly> {
    // L(z^m) has top z-degree m + δ with δ = max_i (deg a_i − i); the
    // coefficient there is the indicial function P(m). Polynomial solutions
    // of degree m need P(m) = 0 or m + δ ≤ deg rhs.
    let mut delta = i64::MIN;
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        delta = delta.max(a.degree_i64() - i as i64);
    }
    let mut indicial = UniPoly::zero();
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() || a.degree_i64() - (i as i64) != delta {
            continue;
        }
        // lc(a_i) · m(m−1)…(m−i+1) as a polynomial in m
        let mut ff = UniPoly::constant(a.leading_coeff().unwrap().clone());
        for j in 0..i {
            ff = &ff * &UniPoly::from_coeffs(vec![rat(-(j as i64)), rat(1)]);
        }
        indicial = &indicial + &ff;
    }
    let mut dmax: i64 = rhs.degree_i64() - delta;
    if !indicial.is_zero() {
        for root in rational_roots(&indicial).unwrap_or_default() {
            if root.value.denom().is_one() && root.value >= BigRat::zero() {
                use num::ToPrimitive;
                if let Some(m) = root.value.numer().to_i64() {
                    dmax = dmax.max(m);
                }
            }
        }
    }
    let dmax = dmax.min(cap as i64);
    if dmax < 0 {
        return if rhs.is_zero() {
            AffineSpace::Space {
                particular: UniPoly::zero(),
                basis: Vec::new(),
            }
        } else {
            AffineSpace::None
        };
    }
    // Unknown coefficients c_0..c_dmax; match every z-power of L(p) − rhs.
    let d = dmax as usize;
    let images: Vec<UniPoly> = (0..=d)
        .map(|k| op.apply_poly(&UniPoly::monomial(rat(1), k)))
        .collect();
    let nrows = images
        .iter()
        .map(|p| p.coeffs().len())
        .chain(std::iter::once(rhs.coeffs().len()))
        .max()
        .unwrap();
    let mut mat = QMat::zeros(nrows, d + 1);
    for (col, img) in images.iter().enumerate() {
        for (row, c) in img.coeffs().iter().enumerate() {
            mat[(row, col)] = c.clone();
        }
    }
    let mut b = vec![BigRat::zero(); nrows];
    for (row, c) in rhs.coeffs().iter().enumerate() {
        b[row] = c.clone();
    }
    match mat.solve_affine(&b) {
        None => AffineSpace::None,
        Some((part, basis)) => AffineSpace::Space {
            particular: UniPoly::from_coeffs(part),
            basis: basis.into_iter().map(UniPoly::from_coeffs).collect(),
        },
    }
}

/// All rational solutions of L(y) = rhs via a universal denominator from
/// indicial analysis at the finite singular points (roots of the leading
/// coefficient, which must split over ℚ).
pub fn rational_solutions(
    op: &DiffOperator,
    rhs: &UniPoly,
) -> Result<AffineSpace<RatFunc>, LinodeError> {
    let n = op.order();
    let lead = &op.coeffs()[n];
    let roots = if lead.is_constant() {
        Vec::new()
    } else {
        let roots = rational_roots(lead)?;
        let total: usize = roots.iter().map(|r| r.multiplicity).sum();
        if total != lead.degree().unwrap() {
            return Err(LinodeError::NonSplittingLeading);
        }
        roots
    };
    let mut den = UniPoly::one();
    for root in &roots {
        let bound = pole_bound(op, &root.value);
        if bound > 0 {
            let lin = UniPoly::from_coeffs(vec![-&root.value, rat(1)]);
            for _ in 0..bound {
                den = &den * &lin;
            }
        }
    }
    if den.is_constant() {
        return Ok(match polynomial_solutions(op, rhs) {
            AffineSpace::None => AffineSpace::None,
            AffineSpace::Space { particular, basis } => AffineSpace::Space {
                particular: RatFunc::from_poly(particular),
                basis: basis.into_iter().map(RatFunc::from_poly).collect(),
            },
        });
    }
    // Substitute y = Y/den: L(Y/den) = Σ_j b_j·Y^{(j)} with
    // b_j = Σ_{i≥j} C(i,j)·a_i·(1/den)^{(i−j)}, then clear denominators.
    let inv_den = RatFunc::from_poly(den.clone()).recip();
    let mut inv_ders = Vec::with_capacity(n + 1);
    let mut cur = inv_den;
    for _ in 0..=n {
        inv_ders.push(cur.clone());
        cur = cur.derivative();
    }
    let clear = {
        let mut p = UniPoly::one();
        for _ in 0..=n {
            p = &p * &den;
        }
        RatFunc::from_poly(p)
    };
    let mut new_coeffs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut bj = RatFunc::zero();
        for (i, a) in op.coeffs().iter().enumerate().skip(j) {
            let c = binomial(i, j);
            let term = &RatFunc::from_poly(a.scale(&c)) * &inv_ders[i - j];
            bj = &bj + &term;
        }
        let cleared = &bj * &clear;
        new_coeffs.push(
            cleared
                .as_polynomial()
                .expect("den^{n+1} clears all poles of the conjugated operator"),
        );
    }
    let new_rhs = (&RatFunc::from_poly(rhs.clone()) * &clear)
        .as_polynomial()
        .expect("clearing factor is polynomial");
    let m = DiffOperator::new(new_coeffs)?;
    Ok(match polynomial_solutions(&m, &new_rhs) {
        AffineSpace::None => AffineSpace::None,
        AffineSpace::Space { particular, basis } => AffineSpace::Space {
            particular: RatFunc::new(particular, den.clone()),
            basis: basis
                .into_iter()
                .map(|y| RatFunc::new(y, den.clone()))
                .collect(),
        },
    })
}

/// Pole-order bound at x0: the most negative integer root −e of the local
/// indicial polynomial gives e; no negative integer root means no pole.
fn pole_bound(op: &DiffOperator, x0: &BigRat) -> usize {
    // expand each a_i around x0 and find the local indicial polynomial
    let shifted: Vec<UniPoly> = op.coeffs().iter().map(|a| shift_poly(a, x0)).collect();
    let mut lambda = i64::MAX;
    for (i, a) in shifted.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let val = a.coeffs().iter().position(|c| !c.is_zero()).unwrap() as i64;
        lambda = lambda.min(val - i as i64);
    }
    let mut ind = UniPoly::zero();
    for (i, a) in shifted.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let val = a.coeffs().iter().position(|c| !c.is_zero()).unwrap();
        if val as i64 - i as i64 != lambda {
            continue;
        }
        // c_i · r(r−1)…(r−i+1)
        let mut ff = UniPoly::constant(a.coeff(val));
        for j in 0..i {
            ff = &ff * &UniPoly::from_coeffs(vec![rat(-(j as i64)), rat(1)]);
        }
        ind = &ind + &ff;
    }
    if ind.is_zero() {
        return 0;
    }
    let mut bound = 0usize;
    for root in rational_roots(&ind).unwrap_or_default() {
        if root.value.denom().is_one() && root.value < BigRat::zero() {
            use num::ToPrimitive;
            if let Some(r) = root.value.numer().to_i64() {
                bound = bound.max((-r) as usize);
            }
        }
    }
    bound
}

/// a(z + x0), coefficients around the shifted origin.
fn shift_poly(a: &UniPoly, x0: &BigRat) -> UniPoly {
    let mut out = UniPoly::zero();
    let lin = UniPoly::from_coeffs(vec![x0.clone(), rat(1)]);
    for c in a.coeffs().iter().rev() {
        out = &(&out * &lin) + &UniPoly::constant(c.clone());
    }
    out
}

/// Outcome of the order-2 Riccati rational-solution analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RiccatiOutcome {
    /// Degree/valuation analysis at ∞ applies: the dominant balance
    /// w² ≈ −a0 forces half-integer growth, so no rational w exists at
    /// any degree.
    NonexistenceCertified,
    /// Rational solutions of w' + w² + a1·w + a0 = 0 found within bounds.
    Found { solutions: Vec<RatFunc> },
    NoneInBounds { bound: usize },
}

/// Rational solutions of the Riccati equation attached to a monic-order-2
/// operator; nonexistence doubles as first-order-factor irreducibility
/// evidence.
pub fn riccati_rational_nonexistence(
    op: &DiffOperator,
    search_bound: usize,
) -> Result<RiccatiOutcome, LinodeError> {
    if op.order() != 2 {
        return Err(LinodeError::NotOrderTwo(op.order()));
    }
    if !op.coeffs()[2].is_constant() {
        return Err(LinodeError::NonConstantLeading);
    }
    let lead = op.coeffs()[2].coeff(0);
    let a1 = op.coeffs()[1].scale(&lead.recip());
    let a0 = op.coeffs()[0].scale(&lead.recip());
    // Certificate at ∞: deg a0 odd and deg a0 ≥ 2(1 + deg a1).
    let d0 = a0.degree_i64();
    let d1 = a1.degree_i64();
    if d0 >= 0 && d0 % 2 == 1 && d0 >= 2 * (1 + d1) {
        return Ok(RiccatiOutcome::NonexistenceCertified);
    }
    // Bounded search with the ansatz w = f'/f + g, f monic polynomial,
    // g polynomial. Substituting shows f must satisfy
    // f'' + (2g + a1)·f' + (g² + g' + a1·g + a0)·f = 0.
    let mut g_candidates = vec![UniPoly::zero()];
    g_candidates.extend(balanced_polynomial_part(&a0, &a1, search_bound));
    let mut found: Vec<RatFunc> = Vec::new();
    for g in &g_candidates {
        let b1 = &g.scale(&rat(2)) + &a1;
        let b0 = &(&(&(g * g) + &g.derivative()) + &(&a1 * g)) + &a0;
        let aux = DiffOperator::new(vec![b0, b1, UniPoly::one()]).unwrap();
        if let AffineSpace::Space { basis, .. } =
            polynomial_solutions_capped(&aux, &UniPoly::zero(), search_bound)
        {
            for f in basis {
                if f.is_zero() {
                    continue;
                }
                let f = f.monic();
                let w = &RatFunc::new(f.derivative(), f.clone()) + &RatFunc::from_poly(g.clone());
                // re-verify: w' + w² + a1·w + a0 = 0
                let resid = &(&(&w.derivative() + &(&w * &w))
                    + &(&RatFunc::from_poly(a1.clone()) * &w))
                    + &RatFunc::from_poly(a0.clone());
                if resid.is_zero() && !found.contains(&w) {
                    found.push(w);
                }
            }
        }
    }
    if found.is_empty() {
        Ok(RiccatiOutcome::NoneInBounds {
            bound: search_bound,
        })
    } else {
        found.sort_by_key(|w| w.to_string());
        Ok(RiccatiOutcome::Found { solutions: found })
    }
}

/// Polynomial parts g with g² balancing −a0 at ∞, determined coefficient
/// by coefficient from the top. Empty when no balance exists over ℚ.
fn balanced_polynomial_part(a0: &UniPoly, a1: &UniPoly, bound: usize) -> Vec<UniPoly> {
    let d0 = a0.degree_i64();
    if d0 < 0 || d0 % 2 != 0 {
        return Vec::new();
    }
    let k = (d0 / 2) as usize;
    if k > bound {
        return Vec::new();
    }
    let neg_lc = -a0.leading_coeff().unwrap();
    let Some(lead) = sqrt_rat(&neg_lc) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for sign in [rat(1), rat(-1)] {
        let top = &lead * &sign;
        let mut g = UniPoly::monomial(top.clone(), k);
        let mut ok = true;
        for j in (0..k).rev() {
            // adding c_j z^j changes the z^{k+j} coefficient of
            // g' + g² + a1·g + a0 by (2·top + a1_k)·c_j
            let resid = &(&(&g.derivative() + &(&g * &g)) + &(a1 * &g)) + a0;
            let r = resid.coeff(k + j);
            let denom = &top * rat(2) + a1.coeff(k);
            if denom.is_zero() {
                ok = false;
                break;
            }
            let cj = -r / denom;
            g = &g + &UniPoly::monomial(cj, j);
        }
        if ok {
            out.push(g);
        }
    }
    out
}

fn sqrt_rat(r: &BigRat) -> Option<BigRat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRat::new(n, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TranscendenceVerdict {
    AntiderivativeTranscendental,
    AntiderivativeAlgebraic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicWitness {
    pub v: RatFunc,
    /// Rendering of U = c − π(u,v) with v substituted.
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscendenceCertificate {
    pub operator: DiffOperator,
    pub verdict: TranscendenceVerdict,
    pub witness: Option<AlgebraicWitness>,
    /// Which irreducibility evidence (if any) backs the verdict.
    pub caveats: Vec<String>,
}

/// Decide whether an antiderivative of a solution of L(u) = 0 is algebraic
/// over the solution field: algebraic iff L*(v) = 1 has a rational
/// solution v, in which case U = c − π(u,v).
pub fn antiderivative_algebraicity(
    op: &DiffOperator,
    search_bound: usize,
    assert_irreducible: bool,
) -> Result<TranscendenceCertificate, LinodeError> {
    let adj = op.adjoint();
    let sols = rational_solutions(&adj, &UniPoly::one())?;
    if let AffineSpace::Space { particular, .. } = sols {
        // re-verify the witness exactly
        let check = adj.apply_ratfunc(&particular);
        assert_eq!(check, RatFunc::one(), "adjoint witness must satisfy L*(v) = 1");
        let pi = concomitant(op);
        let relation = render_relation(&pi, &particular);
        return Ok(TranscendenceCertificate {
            operator: op.clone(),
            verdict: TranscendenceVerdict::AntiderivativeAlgebraic,
            witness: Some(AlgebraicWitness {
                v: particular,
                relation,
            }),
            caveats: vec!["adjoint witness verified by exact substitution".into()],
        });
    }
    // No rational v. The transcendence direction needs L irreducible.
    let mut caveats = Vec::new();
    let mut evidence = false;
    if op.order() == 1 {
        evidence = true;
        caveats.push("order-1 operators are irreducible".into());
    } else if op.order() == 2 && op.coeffs()[2].is_constant() {
        match riccati_rational_nonexistence(op, search_bound)? {
            RiccatiOutcome::NonexistenceCertified => {
                evidence = true;
                caveats.push(
                    "irreducibility: Riccati rational nonexistence certified by expansion at infinity"
                        .into(),
                );
            }
            RiccatiOutcome::Found { .. } => {
                caveats.push("operator is reducible (rational Riccati solution found)".into());
            }
            RiccatiOutcome::NoneInBounds { bound } => {
                caveats.push(format!(
                    "Riccati search found nothing within degree {}, which is not a proof of irreducibility",
                    bound
                ));
            }
        }
    }
    if !evidence && assert_irreducible {
        evidence = true;
        caveats.push("irreducibility asserted by the caller, not verified".into());
    }
    Ok(TranscendenceCertificate {
        operator: op.clone(),
        verdict: if evidence {
            TranscendenceVerdict::AntiderivativeTranscendental
        } else {
            TranscendenceVerdict::Inconclusive
        },
        witness: None,
        caveats,
    })
}

fn render_relation(pi: &BilinearConcomitant, v: &RatFunc) -> String {
    let coeffs = pi.u_coefficients(v);
    let mut body = String::new();
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if !first {
            body.push_str(" + ");
        }
        first = false;
        let u_part = match i {
            0 => "u".to_string(),
            1 => "u'".to_string(),
            k => format!("u^({})", k),
        };
        body.push_str(&format!("({})*{}", c, u_part));
    }
    if body.is_empty() {
        body.push('0');
    }
    format!("U = c - ({})", body)
}

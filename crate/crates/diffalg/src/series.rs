//! Exact truncated power series over ℚ, the Airy fundamental system, and
//! coefficient-growth classification.

use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::exact::{rat, BigRat, UniPoly};
use crate::linode::DiffOperator;
use crate::mpoly::MultiPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("operator is singular at 0 (leading coefficient vanishes there)")]
    SingularAtZero,
    #[error("initial data has length {0}, expected the operator order {1}")]
    InitialLength(usize, usize),
    #[error("truncation order {0} is below the operator order {1}")]
    OrderTooSmall(usize, usize),
    #[error("argument count {0} does not match nvars {1}")]
    ArgCount(usize, usize),
    #[error("growth window [{0}, {1}] needs at least 10 nonzero coefficients, found {2}")]
    WindowTooSparse(usize, usize, usize),
    #[error("growth window [{0}, {1}] exceeds the series order {2}")]
    WindowOutOfRange(usize, usize, usize),
}

/// Truncated power series Σ c_k z^k, k ≤ order, with exact coefficients.
/// Arithmetic carries the minimum of the operand orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigRat>,
}

impl TruncSeries {
    /// Build from coefficients c_0..c_N (order N = len − 1).
    pub fn from_coeffs(coeffs: Vec<BigRat>) -> Self {
        assert!(!coeffs.is_empty());
        TruncSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![BigRat::zero(); order + 1],
        }
    }

    pub fn constant(c: BigRat, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The identity series z.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = rat(1);
        }
        s
    }

    pub fn from_unipoly(p: &UniPoly, order: usize) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in p.coeffs().iter().enumerate() {
            if k > order {
                break;
            }
            s.coeffs[k] = c.clone();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRat {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> TruncSeries {
        let n = order.min(self.order());
        TruncSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    pub fn add(&self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=n).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
    }

    pub fn sub(&self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=n).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product at the minimum of the operand orders.
    pub fn mul(&self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![BigRat::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                let v = &coeffs[i + j] + &(a * b);
                coeffs[i + j] = v;
            }
        }
        TruncSeries { coeffs }
    }

    pub fn pow(&self, k: u32) -> TruncSeries {
        let mut out = TruncSeries::constant(rat(1), self.order());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Termwise derivative; the order drops by one.
    pub fn derivative(&self) -> TruncSeries {
        if self.order() == 0 {
            return TruncSeries::zero(0);
        }
        TruncSeries {
            coeffs: (1..=self.order())
                .map(|k| &self.coeffs[k] * rat(k as i64))
                .collect(),
        }
    }

    /// Termwise antiderivative with explicit integration constant; the
    /// order grows by one.
    pub fn antiderivative(&self, c0: BigRat) -> TruncSeries {
        let mut coeffs = vec![c0];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / rat(k as i64 + 1));
        }
        TruncSeries { coeffs }
    }

    pub fn is_zero_through(&self, order: usize) -> bool {
        self.coeffs
            .iter()
            .take(order + 1)
            .all(|c| c.is_zero())
    }

    /// First order ≤ `through` where self and rhs disagree.
    pub fn first_difference(&self, rhs: &TruncSeries, through: usize) -> Option<usize> {
        (0..=through).find(|&k| self.coeff(k) != rhs.coeff(k))
    }

    /// Apply a differential operator termwise (exactly, with order loss
    /// equal to the operator order).
    pub fn apply_operator(&self, op: &DiffOperator) -> TruncSeries {
        let mut acc = TruncSeries::zero(self.order().saturating_sub(op.order()));
        let mut deriv = self.clone();
        for (i, a) in op.coeffs().iter().enumerate() {
            if i > 0 {
                deriv = deriv.derivative();
            }
            if a.is_zero() {
                continue;
            }
            let ai = TruncSeries::from_unipoly(a, deriv.order());
            acc = acc.add(&ai.mul(&deriv));
        }
        acc
    }
}

impl std::fmt::Display for TruncSeries {
    /// `1 + 1/6*z^3 + 1/180*z^6 + O(z^7)` — ascending powers, zero
    /// coefficients skipped, the truncation order always shown.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{}", mag)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", mag)?;
                    }
                    if k == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{}", k)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

/// Unique truncated solution of L(u) = rhs at the ordinary point 0 with
/// initial data u(0), u'(0), …, u^(n−1)(0).
pub fn ode_series_solve(
    op: &DiffOperator,
    rhs: &UniPoly,
    initial: &[BigRat],
    order: usize,
) -> Result<TruncSeries, SeriesError> {
    let n = op.order();
    if initial.len() != n {
        return Err(SeriesError::InitialLength(initial.len(), n));
    }
    if order < n {
        return Err(SeriesError::OrderTooSmall(order, n));
    }
    let lead_at_zero = op.coeffs()[n].coeff(0);
    if lead_at_zero.is_zero() {
        return Err(SeriesError::SingularAtZero);
    }
    let mut c: Vec<BigRat> = vec![BigRat::zero(); order + 1];
    let mut fact = BigRat::one();
    for (j, u0) in initial.iter().enumerate() {
        if j > 0 {
            fact = fact * rat(j as i64);
        }
        c[j] = u0 / &fact;
    }
    // falling factorial m!/(m−i)!
    let falling = |m: usize, i: usize| -> BigRat {
        let mut f = BigRat::one();
        for v in (m - i + 1)..=m {
            f = f * rat(v as i64);
        }
        f
    };
    for t in 0..=(order - n) {
        // coefficient of z^t in Σ_i a_i u^{(i)} = rhs
        let mut acc = BigRat::zero();
        for (i, a) in op.coeffs().iter().enumerate() {
            for (s, coef) in a.coeffs().iter().enumerate() {
                if coef.is_zero() || s > t {
                    continue;
                }
                let m = t - s + i;
                if m == t + n && i == n {
                    continue; // the unknown, handled below
                }
                acc = acc + coef * &c[m] * falling(m, i);
            }
        }
        // a_n(0)·c_{t+n}·(t+n)!/t! + acc = rhs_t
        let target = rhs.coeff(t) - acc;
        c[t + n] = target / (&lead_at_zero * falling(t + n, n));
    }
    Ok(TruncSeries::from_coeffs(c))
}

/// The standard Airy fundamental system as exact truncated series:
/// u1 = ₀F₁(2/3; z³/9), u2 = z·₀F₁(4/3; z³/9).
pub fn airy_basis(order: usize) -> (TruncSeries, TruncSeries) {
    assert!(order >= 2, "airy_basis needs order >= 2");
    let mut u1 = TruncSeries::zero(order);
    let mut u2 = TruncSeries::zero(order);
    // u1: coefficient of z^{3k} is ∏_{j=1..k}(3j−2) / (3k)!
    // u2: coefficient of z^{3k+1} is ∏_{j=1..k}(3j−1) / (3k+1)!
    let mut num1 = BigInt::one();
    let mut num2 = BigInt::one();
    let mut fact = BigInt::one(); // running m!
    let mut m = 0usize;
    let mut k = 0usize;
    loop {
        let i1 = 3 * k;
        let i2 = 3 * k + 1;
        if i1 > order && i2 > order {
            break;
        }
        if k > 0 {
            num1 *= BigInt::from(3 * k as i64 - 2);
            num2 *= BigInt::from(3 * k as i64 - 1);
        }
        while m < i1 {
            m += 1;
            fact *= BigInt::from(m as i64);
        }
        if i1 <= order {
            u1.coeffs[i1] = BigRat::new(num1.clone(), fact.clone());
        }
        if i2 <= order {
            while m < i2 {
                m += 1;
                fact *= BigInt::from(m as i64);
            }
            u2.coeffs[i2] = BigRat::new(num2.clone(), fact.clone());
        }
        k += 1;
    }
    (u1, u2)
}

/// Substitute series for the y-variables (and the identity for z) into a
/// multivariate polynomial, truncated at `order`.
pub fn eval_mpoly(p: &MultiPoly, args: &[TruncSeries], order: usize) -> TruncSeries {
    assert_eq!(args.len(), p.nvars(), "argument count");
    let no = args
        .iter()
        .map(|s| s.order())
        .chain(std::iter::once(order))
        .min()
        .unwrap();
    let z = TruncSeries::identity(no);
    let mut acc = TruncSeries::zero(no);
    for (m, c) in p.terms() {
        let mut term = TruncSeries::constant(c.clone(), no);
        if m.0[0] > 0 {
            term = term.mul(&z.pow(m.0[0]));
        }
        for (j, &e) in m.0[1..].iter().enumerate() {
            if e > 0 {
                term = term.mul(&args[j].truncate(no).pow(e));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationVerdict {
    IdenticallyZeroToOrder(usize),
    ConstantToOrder(BigRat),
    Nonzero { first_failing_order: usize },
}

/// Substitute series into p and classify the result through order N.
pub fn verify_polynomial_relation(
    p: &MultiPoly,
    args: &[TruncSeries],
    order: usize,
) -> Result<RelationVerdict, SeriesError> {
    if args.len() != p.nvars() {
        return Err(SeriesError::ArgCount(args.len(), p.nvars()));
    }
    let s = eval_mpoly(p, args, order);
    let through = s.order();
    let first_nonzero = (0..=through).find(|&k| !s.coeff(k).is_zero());
    Ok(match first_nonzero {
        None => RelationVerdict::IdenticallyZeroToOrder(through),
        Some(0) => {
            if s.coeffs()[1..].iter().all(|c| c.is_zero()) {
                RelationVerdict::ConstantToOrder(s.coeff(0))
            } else {
                RelationVerdict::Nonzero {
                    first_failing_order: 0,
                }
            }
        }
        Some(k) => RelationVerdict::Nonzero {
            first_failing_order: k,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EVerdict {
    NotEFunction,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum GVerdict {
    NotGFunction,
    Inconclusive,
}

/// One sampled coefficient in a growth report: c_n = a_n/n! = 1/a'_n.
#[derive(Debug, Clone)]
pub struct GrowthSample {
    pub n: usize,
    /// n!·c_n as an exact rational; integral for the Airy series.
    pub a_n: BigRat,
    /// 1/c_n as an exact rational.
    pub a_prime_n: BigRat,
    pub a_n_integral: bool,
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub window: (usize, usize),
    pub samples: Vec<GrowthSample>,
    /// Fitted exponent of log|a_n| against n·log n.
    pub alpha_hat: f64,
    /// Fitted exponent of log|a'_n| against n·log n.
    pub beta_hat: f64,
    pub margin: f64,
    pub e_verdict: EVerdict,
    pub g_verdict: GVerdict,
}

pub const GROWTH_MARGIN: f64 = 0.1;

/// Classify coefficient growth over a tail window. E-functions need the
/// a_n exponent to be 0 and G-functions need the denominator exponent to
/// be 0 (up to geometric factors), so a fitted exponent clearly above 0
/// excludes the class.
pub fn growth_classify(
    s: &TruncSeries,
    window: (usize, usize),
) -> Result<GrowthReport, SeriesError> {
    let (lo, hi) = window;
    if hi > s.order() || lo > hi {
        return Err(SeriesError::WindowOutOfRange(lo, hi, s.order()));
    }
    let mut samples = Vec::new();
    let mut fact = factorial_upto(lo);
    for n in lo..=hi {
        if n > lo {
            fact *= BigInt::from(n as i64);
        }
        let c = s.coeff(n);
        if c.is_zero() {
            continue;
        }
        let a_n = &c * BigRat::from_integer(fact.clone());
        let a_prime_n = c.recip();
        samples.push(GrowthSample {
            n,
            a_n_integral: a_n.denom().is_one(),
            a_n,
            a_prime_n,
        });
    }
    if samples.len() < 10 {
        return Err(SeriesError::WindowTooSparse(lo, hi, samples.len()));
    }
    let xs: Vec<f64> = samples
        .iter()
        .map(|sm| sm.n as f64 * (sm.n as f64).ln())
        .collect();
    let ya: Vec<f64> = samples.iter().map(|sm| log_abs(&sm.a_n)).collect();
    let yb: Vec<f64> = samples.iter().map(|sm| log_abs(&sm.a_prime_n)).collect();
    let alpha_hat = slope(&xs, &ya);
    let beta_hat = slope(&xs, &yb);
    Ok(GrowthReport {
        window,
        samples,
        alpha_hat,
        beta_hat,
        margin: GROWTH_MARGIN,
        e_verdict: if alpha_hat > GROWTH_MARGIN {
            EVerdict::NotEFunction
        } else {
            EVerdict::Inconclusive
        },
        g_verdict: if beta_hat > GROWTH_MARGIN {
            GVerdict::NotGFunction
        } else {
            GVerdict::Inconclusive
        },
    })
}

fn factorial_upto(n: usize) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k as i64);
    }
    f
}

/// Natural log of |r| for a big rational, via bit lengths. Accurate to
/// roughly double precision, which is far inside the 0.1 verdict margin.
fn log_abs(r: &BigRat) -> f64 {
    log_abs_int(r.numer()) - log_abs_int(r.denom())
}

fn log_abs_int(n: &BigInt) -> f64 {
    let n = n.abs();
    let bits = n.bits();
    if bits <= 1000 {
        return big_to_f64(&n).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    big_to_f64(&top).ln() + shift as f64 * std::f64::consts::LN_2
}

fn big_to_f64(n: &BigInt) -> f64 {
    use num::ToPrimitive;
    n.to_f64().unwrap_or(f64::MAX)
}

/// Least-squares slope with intercept.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn airy_op() -> DiffOperator {
        // ∂² − z
        DiffOperator::new(vec![
            -&UniPoly::var(),
            UniPoly::zero(),
            UniPoly::one(),
        ])
        .unwrap()
    }

    #[test]
    fn airy_series_displayed_coefficients() {
        let (u1, u2) = airy_basis(12);
        assert_eq!(u1.coeff(0), rat(1));
        assert_eq!(u1.coeff(3), ratio(1, 6)); // 1/3!
        assert_eq!(u1.coeff(6), ratio(1, 180)); // 1·4/6!
        assert_eq!(u1.coeff(9), ratio(28, 362880)); // 1·4·7/9!
        assert_eq!(u2.coeff(1), rat(1));
        assert_eq!(u2.coeff(4), ratio(2, 24)); // 2/4!
        assert_eq!(u2.coeff(7), ratio(10, 5040)); // 2·5/7!
        assert_eq!(u2.coeff(10), ratio(80, 3628800)); // 2·5·8/10!
        let (u1s, u2s) = airy_basis(2);
        assert_eq!(u1s.coeffs(), &[rat(1), rat(0), rat(0)]);
        assert_eq!(u2s.coeffs(), &[rat(0), rat(1), rat(0)]);
    }

    #[test]
    fn ode_solver_matches_airy_basis() {
        let op = airy_op();
        let u1 = ode_series_solve(&op, &UniPoly::zero(), &[rat(1), rat(0)], 24).unwrap();
        let u2 = ode_series_solve(&op, &UniPoly::zero(), &[rat(0), rat(1)], 24).unwrap();
        let (b1, b2) = airy_basis(24);
        assert_eq!(u1, b1);
        assert_eq!(u2, b2);
        // substituting back annihilates through order N − 2
        let res = u1.apply_operator(&op);
        assert!(res.is_zero_through(22));
    }

    #[test]
    fn ode_solver_trivial_and_errors() {
        let d = DiffOperator::new(vec![UniPoly::zero(), UniPoly::one()]).unwrap(); // ∂
        let s = ode_series_solve(&d, &UniPoly::zero(), &[rat(1)], 5).unwrap();
        assert_eq!(s, TruncSeries::constant(rat(1), 5));
        // z∂ is singular at 0
        let zd = DiffOperator::new(vec![UniPoly::zero(), UniPoly::var()]).unwrap();
        assert_eq!(
            ode_series_solve(&zd, &UniPoly::zero(), &[rat(1)], 5).unwrap_err(),
            SeriesError::SingularAtZero
        );
        assert!(ode_series_solve(&d, &UniPoly::zero(), &[], 5).is_err());
    }

    #[test]
    fn calculus_round_trips() {
        let (u1, u2) = airy_basis(20);
        let anti = u1.antiderivative(rat(0));
        assert_eq!(anti.coeff(4), ratio(1, 24)); // (1/6)/4
        assert_eq!(anti.derivative(), u1);
        assert_eq!(u1.mul(&u2).coeff(1), rat(1));
    }

    #[test]
    fn wronskian_constant_one() {
        let n = 64;
        let (u1, u2) = airy_basis(n);
        let w = u1.mul(&u2.derivative()).sub(&u1.derivative().mul(&u2));
        assert_eq!(w.coeff(0), rat(1));
        assert!(w.sub(&TruncSeries::constant(rat(1), w.order())).is_zero_through(n - 2));
    }

    #[test]
    fn closing_identity_relation() {
        use crate::mpoly::Var;
        let n = 40;
        let (u1, _) = airy_basis(n + 2);
        let du1 = u1.derivative();
        let int_u1sq = u1.pow(2).antiderivative(rat(0));
        // p = y2² − z·y1² + y3
        let y1 = MultiPoly::var(3, Var::Y(1)).unwrap();
        let y2 = MultiPoly::var(3, Var::Y(2)).unwrap();
        let y3 = MultiPoly::var(3, Var::Y(3)).unwrap();
        let z = MultiPoly::var(3, Var::Z).unwrap();
        let p = &(&y2.pow(2) - &(&z * &y1.pow(2))) + &y3;
        let verdict =
            verify_polynomial_relation(&p, &[u1.clone(), du1.clone(), int_u1sq], n).unwrap();
        assert!(matches!(verdict, RelationVerdict::IdenticallyZeroToOrder(_)));
        // Wronskian as a relation: constant 1
        let (u1w, u2w) = airy_basis(40);
        let p4 = {
            let a = MultiPoly::var(4, Var::Y(1)).unwrap();
            let b = MultiPoly::var(4, Var::Y(2)).unwrap();
            let c = MultiPoly::var(4, Var::Y(3)).unwrap();
            let d = MultiPoly::var(4, Var::Y(4)).unwrap();
            &(&a * &d) - &(&b * &c)
        };
        let verdict = verify_polynomial_relation(
            &p4,
            &[u1w.clone(), u1w.derivative(), u2w.clone(), u2w.derivative()],
            40,
        )
        .unwrap();
        assert_eq!(verdict, RelationVerdict::ConstantToOrder(rat(1)));
        // p = y1 on u1 is nonzero at order 0
        let py1 = MultiPoly::var(1, Var::Y(1)).unwrap();
        let verdict = verify_polynomial_relation(&py1, &[u1], 10).unwrap();
        assert_eq!(verdict, RelationVerdict::Nonzero { first_failing_order: 0 });
    }

    #[test]
    fn u1_coefficient_ratio() {
        // a_{3(k+1)}/a_{3k} = 3k + 1 for a_n = n!·c_n of u1
        let (u1, _) = airy_basis(64);
        let mut fact = BigRat::one();
        let mut a = vec![BigRat::zero(); 65];
        for n in 0..=64usize {
            if n > 0 {
                fact = fact * rat(n as i64);
            }
            a[n] = u1.coeff(n) * fact.clone();
        }
        for k in 0..20usize {
            let lhs = &a[3 * (k + 1)] / &a[3 * k];
            assert_eq!(lhs, rat(3 * k as i64 + 1));
        }
    }

    #[test]
    fn growth_of_exponential_is_not_excluded() {
        // exp series: a_n = 1, α ≈ 0
        let mut coeffs = vec![BigRat::zero(); 201];
        let mut fact = BigRat::one();
        for (n, c) in coeffs.iter_mut().enumerate() {
            if n > 0 {
                fact = fact * rat(n as i64);
            }
            *c = fact.recip();
        }
        let s = TruncSeries::from_coeffs(coeffs);
        let report = growth_classify(&s, (50, 200)).unwrap();
        assert!(report.alpha_hat.abs() < 0.05);
        assert_eq!(report.e_verdict, EVerdict::Inconclusive);
        assert_eq!(report.g_verdict, GVerdict::NotGFunction);
    }

    #[test]
    fn growth_window_errors() {
        let (u1, _) = airy_basis(50);
        assert!(growth_classify(&u1, (10, 100)).is_err());
        assert!(growth_classify(&u1, (40, 50)).is_err()); // < 10 nonzero
    }
}

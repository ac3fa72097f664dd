//! Polynomial vector fields, their derivations, and bounded-degree
//! Darboux-polynomial / first-integral searches.
//!
//! A field y_j' = f_j(z, y) induces the derivation
//! D = ∂/∂z + Σ_j f_j ∂/∂y_j on ℚ[z, y1..yn]; Dp evaluates the total
//! derivative of p along solutions. The searches here reduce Dp = ωp and
//! Dp + c·forcing = 0 to exact linear algebra on bounded monomial spaces.

use std::collections::BTreeMap;

use num::traits::Zero;

use crate::exact::{rational_roots, rat, BigRat, UniPoly};
use crate::linalg::QMat;
use crate::mpoly::{Monomial, MultiPoly, Var, DEFAULT_DEGREE_CAP};
use crate::series::TruncSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VFieldError {
    #[error("component count {0} does not match nvars {1}")]
    ComponentCount(usize, usize),
    #[error("variable count mismatch between field and polynomial")]
    NvarsMismatch,
    #[error("cofactor of the zero polynomial")]
    ZeroPolynomial,
    #[error("search bounds (dz={0}, dy={1}) exceed the degree cap {2}")]
    BoundsExceedCap(usize, usize, usize),
    #[error("Darboux search with cofactor degree >= 1 requires a linear field")]
    NonlinearDarboux,
    #[error(
        "cofactor degree {0} with field z-degree {1} is outside the supported \
         elimination scheme (need min(d_omega, field z-degree) <= 1)"
    )]
    UnsupportedCofactorDegree(usize, usize),
    #[error("series argument count {0} does not match field nvars {1}")]
    SolutionCount(usize, usize),
    #[error("series do not solve component y{0}' = f{0}: first mismatch at order {1}")]
    OdeCheckFailed(usize, usize),
    #[error(transparent)]
    MPoly(#[from] crate::mpoly::MPolyError),
    #[error(transparent)]
    Exact(#[from] crate::exact::ExactError),
}

/// ODE system y_j' = f_j(z, y), 1-based components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    nvars: usize,
    components: Vec<MultiPoly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, VFieldError> {
        let nvars = components.len();
        for f in &components {
            if f.nvars() != nvars {
                return Err(VFieldError::ComponentCount(f.nvars(), nvars));
            }
        }
        Ok(PolyVectorField { nvars, components })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    /// Linear homogeneous case: every term of every component has total
    /// y-degree exactly 1, so f_j = Σ_k A_jk(z)·y_k.
    pub fn is_linear(&self) -> bool {
        self.components
            .iter()
            .flat_map(|f| f.terms())
            .all(|(m, _)| m.y_degree() == 1)
    }

    /// The matrix A with f_j = Σ_k A_jk·y_k, when the field is linear.
    pub fn linear_matrix(&self) -> Option<Vec<Vec<UniPoly>>> {
        if !self.is_linear() {
            return None;
        }
        let n = self.nvars;
        let mut a = vec![vec![UniPoly::zero(); n]; n];
        for (j, f) in self.components.iter().enumerate() {
            for (m, c) in f.terms() {
                let k = (1..=n).find(|&k| m.0[k] == 1).unwrap();
                let mono = UniPoly::monomial(c.clone(), m.0[0] as usize);
                a[j][k - 1] = &a[j][k - 1] + &mono;
            }
        }
        Some(a)
    }

    /// Max z-degree over the components (−1 when all are zero).
    pub fn z_degree(&self) -> i64 {
        self.components
            .iter()
            .filter_map(|f| f.z_degree())
            .max()
            .map_or(-1, |d| d as i64)
    }
}

/// Derivation D = ∂/∂z + Σ f_j ∂/∂y_j attached to a field.
#[derive(Debug, Clone)]
pub struct Derivation {
    field: PolyVectorField,
}

pub fn make_derivation(field: PolyVectorField) -> Derivation {
    Derivation { field }
}

impl Derivation {
    pub fn field(&self) -> &PolyVectorField {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.field.nvars
    }

    pub fn apply(&self, p: &MultiPoly) -> Result<MultiPoly, VFieldError> {
        if p.nvars() != self.field.nvars {
            return Err(VFieldError::NvarsMismatch);
        }
        let mut out = p.partial_derivative(Var::Z)?;
        for (j, f) in self.field.components.iter().enumerate() {
            let dp = p.partial_derivative(Var::Y(j + 1))?;
            out = out.add_checked(&f.mul_checked(&dp)?)?;
        }
        Ok(out)
    }

    /// ω ∈ ℚ[z] with Dp = ω·p, when it exists.
    pub fn cofactor_of(&self, p: &MultiPoly) -> Result<Option<UniPoly>, VFieldError> {
        if p.is_zero() {
            return Err(VFieldError::ZeroPolynomial);
        }
        let dp = self.apply(p)?;
        match dp.exact_divide(p)? {
            None => Ok(None),
            Some(q) => Ok(q.as_unipoly()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SearchBounds {
    pub dz: usize,
    pub dy: usize,
}

/// One cofactor together with a basis of the Darboux polynomials sharing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxPair {
    pub cofactor: UniPoly,
    pub basis: Vec<MultiPoly>,
}

/// Result of `solve_affine_darboux`, by case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DarbouxOutcome {
    /// Forcing ≠ 0: basis of the solution space of Dp + c·forcing = 0,
    /// as (p, c) pairs.
    Affine(Vec<(MultiPoly, BigRat)>),
    /// Forcing = 0, dω = 0: basis of first integrals modulo constants.
    FirstIntegrals(Vec<MultiPoly>),
    /// Forcing = 0, dω ≥ 1: all (ω, basis) pairs found in bounds.
    Darboux(Vec<DarbouxPair>),
}

/// Bounded-degree affine/Darboux solve. See `DarbouxOutcome` for the
/// three cases selected by `forcing` and `cofactor_degree`.
pub fn solve_affine_darboux(
    d: &Derivation,
    forcing: &MultiPoly,
    bounds: SearchBounds,
    cofactor_degree: usize,
) -> Result<DarbouxOutcome, VFieldError> {
    if bounds.dz > DEFAULT_DEGREE_CAP || bounds.dy > DEFAULT_DEGREE_CAP {
        return Err(VFieldError::BoundsExceedCap(
            bounds.dz,
            bounds.dy,
            DEFAULT_DEGREE_CAP,
        ));
    }
    if forcing.nvars() != d.nvars() {
        return Err(VFieldError::NvarsMismatch);
    }
    if !forcing.is_zero() {
        return solve_affine_forced(d, forcing, bounds);
    }
    if cofactor_degree == 0 {
        return first_integrals(d, bounds).map(DarbouxOutcome::FirstIntegrals);
    }
    darboux_search(d, bounds, cofactor_degree).map(DarbouxOutcome::Darboux)
}

/// All monomials with z-exponent ≤ dz and y-degree ≤ dy, ascending graded lex.
fn monomial_basis(nvars: usize, bounds: SearchBounds) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars + 1];
    fn rec(out: &mut Vec<Monomial>, exps: &mut Vec<u32>, var: usize, dy_left: usize) {
        if var == exps.len() {
            out.push(Monomial(exps.clone()));
            return;
        }
        for e in 0..=dy_left {
            exps[var] = e as u32;
            rec(out, exps, var + 1, dy_left - e);
        }
        exps[var] = 0;
    }
    for dz in 0..=bounds.dz {
        exps[0] = dz as u32;
        rec(&mut out, &mut exps, 1, bounds.dy);
    }
    out.sort();
    out
}

/// y-monomials of total degree exactly m (z-exponent 0), ascending.
fn y_monomials_of_degree(nvars: usize, m: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars + 1];
    fn rec(out: &mut Vec<Monomial>, exps: &mut Vec<u32>, var: usize, left: usize) {
        if var == exps.len() - 1 {
            exps[var] = left as u32;
            out.push(Monomial(exps.clone()));
            exps[var] = 0;
            return;
        }
        for e in 0..=left {
            exps[var] = e as u32;
            rec(out, exps, var + 1, left - e);
        }
        exps[var] = 0;
    }
    rec(&mut out, &mut exps, 1, m);
    out.sort();
    out
}

fn monomial_poly(nvars: usize, m: &Monomial) -> MultiPoly {
    MultiPoly::from_term(nvars, m.0.clone(), rat(1))
}

/// Stack polynomial images into a matrix: rows are the (sorted) union of
/// monomials appearing in any image, columns are the images.
fn images_to_matrix(nvars: usize, images: &[MultiPoly]) -> (QMat, Vec<Monomial>) {
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for img in images {
        for (m, _) in img.terms() {
            let next = rows.len();
            rows.entry(m.clone()).or_insert(next);
        }
    }
    // Re-index in sorted order.
    let sorted: Vec<Monomial> = rows.keys().cloned().collect();
    let index: BTreeMap<&Monomial, usize> = sorted.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = QMat::zeros(sorted.len(), images.len());
    for (col, img) in images.iter().enumerate() {
        for (m, c) in img.terms() {
            mat[(index[m], col)] = c.clone();
        }
    }
    let _ = nvars;
    (mat, sorted)
}

fn vector_to_poly(nvars: usize, basis: &[Monomial], v: &[BigRat]) -> MultiPoly {
    let mut p = MultiPoly::zero(nvars);
    for (m, c) in basis.iter().zip(v) {
        if !c.is_zero() {
            p = p.add_checked(&MultiPoly::from_term(nvars, m.0.clone(), c.clone())).unwrap();
        }
    }
    p
}

/// Case (i): kernel of p ↦ Dp + c·forcing over (coefficients of p, c).
fn solve_affine_forced(
    d: &Derivation,
    forcing: &MultiPoly,
    bounds: SearchBounds,
) -> Result<DarbouxOutcome, VFieldError> {
    let nvars = d.nvars();
    let basis = monomial_basis(nvars, bounds);
    let mut images: Vec<MultiPoly> = basis
        .iter()
        .map(|m| d.apply(&monomial_poly(nvars, m)))
        .collect::<Result<_, _>>()?;
    images.push(forcing.clone());
    let (mat, _) = images_to_matrix(nvars, &images);
    let kernel = mat.nullspace();
    let pairs = kernel
        .into_iter()
        .map(|v| {
            let (pv, c) = v.split_at(basis.len());
            (vector_to_poly(nvars, &basis, pv), c[0].clone())
        })
        .collect();
    Ok(DarbouxOutcome::Affine(pairs))
}

/// Case (ii): kernel of D on the bounded space, constants quotiented out.
fn first_integrals(d: &Derivation, bounds: SearchBounds) -> Result<Vec<MultiPoly>, VFieldError> {
    let nvars = d.nvars();
    let basis = monomial_basis(nvars, bounds);
    let images: Vec<MultiPoly> = basis
        .iter()
        .map(|m| d.apply(&monomial_poly(nvars, m)))
        .collect::<Result<_, _>>()?;
    let (mat, _) = images_to_matrix(nvars, &images);
    let kernel = mat.nullspace();
    // Drop the constant part of each kernel element (D kills constants, so
    // p minus its constant term is still a first integral), then re-reduce.
    let const_idx = basis
        .iter()
        .position(|m| m.total_degree() == 0)
        .expect("constant monomial in basis");
    let mut rows: Vec<Vec<BigRat>> = kernel
        .into_iter()
        .map(|mut v| {
            v[const_idx] = BigRat::zero();
            v
        })
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect();
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let mut mat = QMat::from_rows(std::mem::take(&mut rows));
    let pivots = mat.rref();
    Ok(pivots
        .iter()
        .enumerate()
        .map(|(ri, _)| vector_to_poly(nvars, &basis, mat.row(ri)))
        .collect())
}

/// Case (iii): Dp = ωp on a linear field, deg ω ≤ dω, solved per
/// y-homogeneous component by eigenvalue-candidate elimination.
fn darboux_search(
    d: &Derivation,
    bounds: SearchBounds,
    cofactor_degree: usize,
) -> Result<Vec<DarbouxPair>, VFieldError> {
    let field = d.field();
    if !field.is_linear() {
        return Err(VFieldError::NonlinearDarboux);
    }
    let s = field.z_degree().max(0) as usize;
    // ω coefficients above the field z-degree are forced to zero by the top
    // z-level of Dp = ωp; what remains must be resolvable one eigenproblem
    // at a time, which needs min(dω, s) ≤ 1.
    let effective = cofactor_degree.min(s);
    if effective > 1 {
        return Err(VFieldError::UnsupportedCofactorDegree(cofactor_degree, s));
    }
    let nvars = d.nvars();
    // Collected per cofactor, keyed by its coefficient vector.
    let mut found: BTreeMap<Vec<BigRat>, Vec<MultiPoly>> = BTreeMap::new();
    for m in 0..=bounds.dy {
        let ymons = y_monomials_of_degree(nvars, m);
        // V-basis: z^dz_i · μ, ascending (d, μ).
        let vbasis: Vec<Monomial> = (0..=bounds.dz)
            .flat_map(|dz| {
                ymons.iter().map(move |mu| {
                    let mut e = mu.0.clone();
                    e[0] = dz as u32;
                    Monomial(e)
                })
            })
            .collect();
        let d_images: Vec<MultiPoly> = vbasis
            .iter()
            .map(|mo| d.apply(&monomial_poly(nvars, mo)))
            .collect::<Result<_, _>>()?;

        // Candidates for the z^1 coefficient of ω.
        let w1_candidates: Vec<BigRat> = if effective == 1 {
            // Top z-level of Dp = ωp: B_s·p_top = w1·p_top, so w1 is a
            // rational eigenvalue of the constant top-degree action on the
            // degree-m y-monomials.
            let b_s_images: Vec<MultiPoly> = ymons
                .iter()
                .map(|mu| {
                    let img = d.apply(&monomial_poly(nvars, mu))?;
                    // keep only the z^s part, as a y-polynomial
                    let mut part = MultiPoly::zero(nvars);
                    for (mo, c) in img.terms() {
                        if mo.0[0] == s as u32 {
                            let mut e = mo.0.clone();
                            e[0] = 0;
                            part = part
                                .add_checked(&MultiPoly::from_term(nvars, e, c.clone()))?;
                        }
                    }
                    Ok::<_, VFieldError>(part)
                })
                .collect::<Result<_, _>>()?;
            let mut bs = QMat::zeros(ymons.len(), ymons.len());
            let index: BTreeMap<&Monomial, usize> =
                ymons.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
            for (col, img) in b_s_images.iter().enumerate() {
                for (mo, c) in img.terms() {
                    bs[(index[mo], col)] = c.clone();
                }
            }
            let cp = bs.char_poly();
            rational_roots(&cp)?.into_iter().map(|r| r.value).collect()
        } else {
            vec![BigRat::zero()]
        };

        for w1 in &w1_candidates {
            // Images of p ↦ Dp − w1·z·p on the V-basis.
            let adj_images: Vec<MultiPoly> = vbasis
                .iter()
                .zip(&d_images)
                .map(|(mo, img)| {
                    let mut e = mo.0.clone();
                    e[0] += 1;
                    let zshift = MultiPoly::from_term(nvars, e, w1.clone());
                    img.sub_checked(&zshift)
                })
                .collect::<Result<_, _>>()?;
            let (cmat, tmons) = images_to_matrix(nvars, &adj_images);
            // Split target rows: "low" rows match a V-basis monomial (the
            // identity embedding E), "high" rows do not.
            let vindex: BTreeMap<&Monomial, usize> =
                vbasis.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
            let ncols = vbasis.len();
            let low_rows: Vec<(usize, usize)> = tmons
                .iter()
                .enumerate()
                .filter_map(|(ri, mo)| vindex.get(mo).map(|&vi| (ri, vi)))
                .collect();
            let high_rows: Vec<usize> = tmons
                .iter()
                .enumerate()
                .filter(|(_, mo)| !vindex.contains_key(mo))
                .map(|(ri, _)| ri)
                .collect();
            // Kernel of the high block.
            let high_mat = QMat::from_rows(
                high_rows.iter().map(|&ri| cmat.row(ri).to_vec()).collect(),
            );
            let kernel = if high_rows.is_empty() {
                QMat::identity(ncols)
            } else {
                let vecs = high_mat.nullspace();
                if vecs.is_empty() {
                    continue;
                }
                let k = vecs.len();
                let mut q = QMat::zeros(ncols, k);
                for (col, v) in vecs.iter().enumerate() {
                    for (row, c) in v.iter().enumerate() {
                        q[(row, col)] = c.clone();
                    }
                }
                q
            };
            let k = kernel.cols;
            // C_low restricted along E: (C_low)[vi, :] from row ri.
            let mut clow = QMat::zeros(ncols, ncols);
            for &(ri, vi) in &low_rows {
                for j in 0..ncols {
                    clow[(vi, j)] = cmat[(ri, j)].clone();
                }
            }
            let cq = clow.mul_mat(&kernel);
            // Independent rows of the kernel matrix.
            let mut qt = QMat::zeros(k, ncols);
            for i in 0..ncols {
                for j in 0..k {
                    qt[(j, i)] = kernel[(i, j)].clone();
                }
            }
            let row_sel = qt.clone().rref_pivot_rows(ncols);
            let qs = QMat::from_rows(row_sel.iter().map(|&i| kernel.row(i).to_vec()).collect());
            let cqs = QMat::from_rows(row_sel.iter().map(|&i| cq.row(i).to_vec()).collect());
            let g = solve_square(&qs, &cqs);
            let w0_candidates: Vec<BigRat> = {
                let cp = g.char_poly();
                rational_roots(&cp)?.into_iter().map(|r| r.value).collect()
            };
            for w0 in w0_candidates {
                // Verify exactly: nullspace of (C − w0·E).
                let mut full = cmat.clone();
                for &(ri, vi) in &low_rows {
                    let v = &full[(ri, vi)] - &w0;
                    full[(ri, vi)] = v;
                }
                let null = full.nullspace();
                if null.is_empty() {
                    continue;
                }
                let omega = UniPoly::from_coeffs(vec![w0.clone(), w1.clone()]);
                let key = vec![w0.clone(), w1.clone()];
                let entry = found.entry(key).or_default();
                for v in null {
                    let p = vector_to_poly(nvars, &vbasis, &v);
                    // Re-verify the certificate by exact division.
                    debug_assert_eq!(
                        d.apply(&p).unwrap(),
                        MultiPoly::from_unipoly(nvars, &omega)
                            .mul_checked(&p)
                            .unwrap()
                    );
                    entry.push(p);
                }
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|(key, basis)| DarbouxPair {
            cofactor: UniPoly::from_coeffs(key),
            basis,
        })
        .collect())
}

/// Solve A·X = B for square invertible A.
fn solve_square(a: &QMat, b: &QMat) -> QMat {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.rows);
    let n = a.rows;
    let k = b.cols;
    let mut aug = QMat::zeros(n, n + k);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        for j in 0..k {
            aug[(i, n + j)] = b[(i, j)].clone();
        }
    }
    let pivots = aug.rref();
    assert_eq!(pivots.len(), n, "singular matrix in solve_square");
    let mut x = QMat::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            x[(i, j)] = aug[(i, n + j)].clone();
        }
    }
    x
}

impl QMat {
    /// Row indices of a maximal independent row set (pivot columns of the
    /// transpose passed in as `self`).
    fn rref_pivot_rows(mut self, _orig_cols: usize) -> Vec<usize> {
        self.rref()
    }
}

/// Checks d/dz q(z, w(z)) = (Dq)(z, w(z)) as truncated series, after
/// verifying that the series actually solve the field's ODE system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TotalDerivativeVerdict {
    Verified { order: usize },
}

pub fn verify_total_derivative(
    d: &Derivation,
    q: &MultiPoly,
    sols: &[TruncSeries],
    order: usize,
) -> Result<TotalDerivativeVerdict, VFieldError> {
    let nvars = d.nvars();
    if sols.len() != nvars {
        return Err(VFieldError::SolutionCount(sols.len(), nvars));
    }
    if q.nvars() != nvars {
        return Err(VFieldError::NvarsMismatch);
    }
    // ODE check: w_j' = f_j(z, w) through order `order` − 1.
    for (j, f) in d.field().components.iter().enumerate() {
        let lhs = sols[j].derivative();
        let rhs = crate::series::eval_mpoly(f, sols, order.saturating_sub(1));
        if let Some(ord) = lhs.first_difference(&rhs, order.saturating_sub(1)) {
            return Err(VFieldError::OdeCheckFailed(j + 1, ord));
        }
    }
    let lhs = crate::series::eval_mpoly(q, sols, order).derivative();
    let dq = d.apply(q)?;
    let rhs = crate::series::eval_mpoly(&dq, sols, order.saturating_sub(1));
    let check_to = order.saturating_sub(1);
    match lhs.first_difference(&rhs, check_to) {
        None => Ok(TotalDerivativeVerdict::Verified { order: check_to }),
        Some(ord) => Err(VFieldError::OdeCheckFailed(0, ord)),
    }
}

/// Built-in fields from the studied systems.
pub mod builtin {
    use super::*;

    fn y(nvars: usize, j: usize) -> MultiPoly {
        MultiPoly::var(nvars, Var::Y(j)).unwrap()
    }

    fn z(nvars: usize) -> MultiPoly {
        MultiPoly::var(nvars, Var::Z).unwrap()
    }

    /// y1' = y2, y2' = z·y1 (the Airy system).
    pub fn airy2() -> PolyVectorField {
        PolyVectorField::new(vec![y(2, 2), &z(2) * &y(2, 1)]).unwrap()
    }

    /// Airy extended by an antiderivative: y3' = y1.
    pub fn airy3() -> PolyVectorField {
        PolyVectorField::new(vec![y(3, 2), &z(3) * &y(3, 1), y(3, 1)]).unwrap()
    }

    /// Airy extended by an antiderivative of u²: y3' = y1².
    pub fn airy_u2() -> PolyVectorField {
        PolyVectorField::new(vec![y(3, 2), &z(3) * &y(3, 1), y(3, 1).pow(2)]).unwrap()
    }

    /// Two independent copies of the Airy system.
    pub fn airy_double() -> PolyVectorField {
        PolyVectorField::new(vec![
            y(4, 2),
            &z(4) * &y(4, 1),
            y(4, 4),
            &z(4) * &y(4, 3),
        ])
        .unwrap()
    }

    /// Painlevé II (zero parameter) extended by an antiderivative of u²:
    /// y1' = y2, y2' = z·y1 + 2·y1³, y3' = y1².
    pub fn painleve2_u2() -> PolyVectorField {
        let cubic = y(3, 1).pow(3).scale(&rat(2));
        PolyVectorField::new(vec![
            y(3, 2),
            &(&z(3) * &y(3, 1)) + &cubic,
            y(3, 1).pow(2),
        ])
        .unwrap()
    }

    /// Look up a field by its CLI name.
    pub fn by_name(name: &str) -> Option<PolyVectorField> {
        match name {
            "airy2" => Some(airy2()),
            "airy3" => Some(airy3()),
            "airy-u2" => Some(airy_u2()),
            "airy-double" => Some(airy_double()),
            "painleve2-u2" => Some(painleve2_u2()),
            _ => None,
        }
    }
}

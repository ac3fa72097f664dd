//! Exact linear algebra over ℚ: reduced row echelon form, nullspaces,
//! affine solves, and characteristic polynomials. Dense and unhurried —
//! the matrices here come from bounded-degree coefficient comparisons.

use num::traits::Zero;

use crate::exact::{rat, BigRat, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRat>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![BigRat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = rat(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols));
        QMat {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[BigRat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[BigRat]) -> Vec<BigRat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigRat::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = &out[(i, j)] + &(&a * &other[(k, j)]);
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    /// In-place Gauss–Jordan; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = &self[(i, j)] - &(&f * &self[(r, j)]);
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right nullspace, one vector per free column, in
    /// ascending free-column order (deterministic).
    pub fn nullspace(&self) -> Vec<Vec<BigRat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![BigRat::zero(); self.cols];
                v[fc] = rat(1);
                for (ri, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&m[(ri, fc)];
                }
                v
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Solve A·x = b. Returns (particular, homogeneous basis) or None when
    /// the system is inconsistent.
    pub fn solve_affine(&self, b: &[BigRat]) -> Option<(Vec<BigRat>, Vec<Vec<BigRat>>)> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut particular = vec![BigRat::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            particular[pc] = aug[(ri, self.cols)].clone();
        }
        Some((particular, self.nullspace()))
    }

    /// Characteristic polynomial det(x·I − A) by Faddeev–LeVerrier.
    pub fn char_poly(&self) -> UniPoly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![BigRat::zero(); n + 1];
        coeffs[n] = rat(1);
        let mut m = QMat::identity(n);
        for k in 1..=n {
            m = self.mul_mat(&m);
            let tr = (0..n).fold(BigRat::zero(), |acc, i| acc + &m[(i, i)]);
            let c = -(tr / rat(k as i64));
            coeffs[n - k] = c.clone();
            for i in 0..n {
                let v = &m[(i, i)] + &c;
                m[(i, i)] = v;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRat;
    fn index(&self, (i, j): (usize, usize)) -> &BigRat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRat {
        &mut self.data[i * self.cols + j]
    }
}

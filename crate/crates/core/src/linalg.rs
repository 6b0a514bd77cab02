//! Dense matrices over `F_q` and the row-reduction routines everything else is built on.
//!
//! Matrices do not carry their field; every operation takes it explicitly so that matrices can
//! be hashed and compared directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fe::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds a matrix from rows of equal length; an empty list gives a `0 × cols` matrix.
    pub fn from_rows(rows: &[Vec<Fe>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Mat { rows: rows.len(), cols, data })
    }

    /// Convenience constructor from small integers (reduced into the prime field).
    pub fn from_ints(k: &Field, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| k.from_int(x))).collect();
        Mat { rows: rows.len(), cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat, k: &Field) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] = k.add(out[(i, j)], k.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat, k: &Field) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(&a, &b)| k.add(a, b)).collect() }
    }

    pub fn sub(&self, other: &Mat, k: &Field) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(&a, &b)| k.sub(a, b)).collect() }
    }

    pub fn scale(&self, c: Fe, k: &Field) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| k.mul(a, c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Fe], k: &Field) -> Vec<Fe> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Fe::ZERO; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = k.add(*o, k.mul(a, self[(i, j)]));
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Fe], k: &Field) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Fe::ZERO, |acc, (&a, &b)| k.add(acc, k.mul(a, b))))
            .collect()
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// The block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut out = Mat::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        out
    }

    /// Reduced row echelon form with zero rows dropped, and the pivot columns.
    pub fn rref(&self, k: &Field) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m, k, self.cols);
        let r = pivots.len();
        m.data.truncate(r * m.cols);
        m.rows = r;
        (m, pivots)
    }

    pub fn rank(&self, k: &Field) -> usize {
        let mut m = self.clone();
        rref_in_place(&mut m, k, self.cols).len()
    }

    /// Basis (as rows) of `{x : M x = 0}`.
    pub fn nullspace(&self, k: &Field) -> Mat {
        let (r, pivots) = self.rref(k);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            out[(b, fc)] = Fe::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                out[(b, pc)] = k.neg(r[(i, fc)]);
            }
        }
        out
    }

    /// Basis (as rows) of `{x : x M = 0}`.
    pub fn left_nullspace(&self, k: &Field) -> Mat {
        self.transpose().nullspace(k)
    }

    pub fn inverse(&self, k: &Field) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hstack(&Mat::identity(n));
        let pivots = rref_in_place(&mut aug, k, n);
        if pivots.len() < n {
            return None;
        }
        Some(aug.block(0, n, n, 2 * n))
    }

    pub fn det(&self, k: &Field) -> Fe {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Fe::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Fe::ZERO;
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = k.neg(det);
            }
            let piv = m[(c, c)];
            det = k.mul(det, piv);
            let inv = k.inv(piv).unwrap();
            for r in c + 1..n {
                let f = k.mul(m[(r, c)], inv);
                if !f.is_zero() {
                    for j in c..n {
                        m[(r, j)] = k.sub(m[(r, j)], k.mul(f, m[(c, j)]));
                    }
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Fe;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Fe {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fe {
        &mut self.data[i * self.cols + j]
    }
}

/// Gauss-Jordan elimination restricted to pivots in the first `pivot_cols` columns.
/// Nonzero rows end up first; returns the pivot columns.
fn rref_in_place(m: &mut Mat, k: &Field, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        m.swap_rows(pr, r);
        let inv = k.inv(m[(r, c)]).unwrap();
        for j in 0..m.cols {
            m[(r, j)] = k.mul(m[(r, j)], inv);
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let f = m[(i, c)];
            if f.is_zero() {
                continue;
            }
            for j in 0..m.cols {
                let v = k.mul(f, m[(r, j)]);
                m[(i, j)] = k.sub(m[(i, j)], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `x · R = v` for a fixed set of rows `R`.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    echelon: Mat,
    pivots: Vec<usize>,
    // echelon = transform · R
    transform: Mat,
}

impl SpanSolver {
    pub fn new(rows: &Mat, k: &Field) -> Self {
        let n = rows.rows();
        let mut aug = rows.hstack(&Mat::identity(n));
        let pivots = rref_in_place(&mut aug, k, rows.cols());
        let r = pivots.len();
        SpanSolver {
            echelon: aug.block(0, r, 0, rows.cols()),
            pivots,
            transform: aug.block(0, r, rows.cols(), rows.cols() + n),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Coordinates of `v` on the reduced basis, or `None` if `v` is outside the span.
    pub fn echelon_coords(&self, v: &[Fe], k: &Field) -> Option<Vec<Fe>> {
        let mut rest = v.to_vec();
        let mut y = Vec::with_capacity(self.pivots.len());
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = rest[pc];
            y.push(c);
            if !c.is_zero() {
                for (j, x) in rest.iter_mut().enumerate() {
                    *x = k.sub(*x, k.mul(c, self.echelon[(i, j)]));
                }
            }
        }
        rest.iter().all(|x| x.is_zero()).then_some(y)
    }

    pub fn contains(&self, v: &[Fe], k: &Field) -> bool {
        self.echelon_coords(v, k).is_some()
    }

    /// Some `x` with `x · R = v`.
    pub fn solve(&self, v: &[Fe], k: &Field) -> Option<Vec<Fe>> {
        let y = self.echelon_coords(v, k)?;
        Some(self.transform.vec_mul(&y, k))
    }
}

/// Row space of `a` contained in that of `b`.
pub fn span_contains(b: &Mat, a: &Mat, k: &Field) -> bool {
    let s = SpanSolver::new(b, k);
    (0..a.rows()).all(|i| s.contains(a.row(i), k))
}

pub fn same_span(a: &Mat, b: &Mat, k: &Field) -> bool {
    a.rank(k) == b.rank(k) && span_contains(b, a, k)
}

/// Basis of the intersection of two row spaces.
pub fn intersect_rows(a: &Mat, b: &Mat, k: &Field) -> Mat {
    // x a + y b = 0  ⇒  x a ∈ span(a) ∩ span(b)
    let (a, _) = a.rref(k);
    let (b, _) = b.rref(k);
    let stacked = a.vstack(&b);
    let left = stacked.left_nullspace(k);
    let xs = left.block(0, left.rows(), 0, a.rows());
    xs.mul(&a, k).rref(k).0
}

/// Extends `sub` (rows, independent) by rows chosen from `sup` to a basis of `span(sup)`;
/// returns only the added rows.
pub fn complement_rows(sup: &Mat, sub: &Mat, k: &Field) -> Mat {
    let mut current = sub.clone();
    let mut added: Vec<Vec<Fe>> = Vec::new();
    let mut rank = current.rank(k);
    for i in 0..sup.rows() {
        let trial = current.vstack(&Mat::from_rows(&[sup.row(i).to_vec()], sup.cols()).unwrap());
        let r = trial.rank(k);
        if r > rank {
            rank = r;
            current = trial;
            added.push(sup.row(i).to_vec());
        }
    }
    Mat::from_rows(&added, sup.cols()).unwrap()
}

/// Enumerates every vector `x · B` for `x ∈ F_q^{rows(B)}`, in lexicographic order of `x`.
pub fn span_elements(b: &Mat, k: &Field) -> Vec<Vec<Fe>> {
    let q = k.order() as usize;
    let d = b.rows();
    let total = q.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut x = vec![Fe::ZERO; d];
    for idx in 0..total {
        let mut t = idx;
        for i in (0..d).rev() {
            x[i] = Fe((t % q) as u32);
            t /= q;
        }
        out.push(if d == 0 { vec![Fe::ZERO; b.cols()] } else { b.vec_mul(&x, k) });
    }
    out
}

/// Every vector of `F_q^n`, lexicographic with the first coordinate most significant.
pub fn all_vectors(n: usize, k: &Field) -> Vec<Vec<Fe>> {
    span_elements(&Mat::identity(n), k)
}

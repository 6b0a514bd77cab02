//! Lagrangian subspaces: canonical bases, matrix-pair coordinates and the group action.
//!
//! A lagrangian is stored as the reduced row echelon form of an `m × 2m` basis, so equality and
//! hashing are structural. In the standard space, `L_{a,b}` is the span of the rows of
//! `a P + b Q = [a b]` and its canonical coordinates are the two halves of that RREF.
//!
//! `L_{a,b} = L_{a',b'}` holds exactly when `(a', b') = (c a, c b)` for an *invertible* `c`;
//! non-invertible `c` would drop the rank of `[a b]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Fe, Field};
use crate::linalg::{intersect_rows, Mat};
use crate::symp::{SpElement, SympSpace};

/// A maximal isotropic subspace, as its RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Lagrangian {
    basis: Mat,
    #[serde(skip)]
    pivots: Vec<usize>,
}

impl Lagrangian {
    /// Span of `rows`; fails unless it is lagrangian in `space`.
    pub fn new(space: &SympSpace, rows: &Mat) -> Result<Self> {
        if rows.cols() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: rows.cols() });
        }
        let (basis, pivots) = rows.rref(space.field());
        if basis.rows() != space.m() || !space.is_isotropic(&basis) {
            return Err(Error::NotLagrangian);
        }
        Ok(Lagrangian { basis, pivots })
    }

    /// Trusts that `rows` span a lagrangian.
    pub(crate) fn from_rows_unchecked(k: &Field, rows: &Mat) -> Self {
        let (basis, pivots) = rows.rref(k);
        Lagrangian { basis, pivots }
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Span of the first `m` standard basis vectors `p_1..p_m`.
    pub fn p_frame(space: &SympSpace) -> Self {
        Self::frame(space, 0)
    }

    /// Span of `q_1..q_m`.
    pub fn q_frame(space: &SympSpace) -> Self {
        Self::frame(space, space.m())
    }

    fn frame(space: &SympSpace, offset: usize) -> Self {
        let m = space.m();
        let mut b = Mat::zeros(m, 2 * m);
        for i in 0..m {
            b[(i, offset + i)] = Fe::ONE;
        }
        Self::from_rows_unchecked(space.field(), &b)
    }

    /// Whether `v` lies in the subspace, read off the RREF pivots.
    pub fn contains(&self, v: &[Fe], k: &Field) -> bool {
        let y = self.component(v, k);
        y == v
    }

    /// The element of `L` agreeing with `v` on the pivot coordinates.
    pub fn component(&self, v: &[Fe], k: &Field) -> Vec<Fe> {
        let mut y = vec![Fe::ZERO; self.basis.cols()];
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            for (j, yj) in y.iter_mut().enumerate() {
                *yj = k.add(*yj, k.mul(c, self.basis[(i, j)]));
            }
        }
        y
    }
}

/// The pair `(a, b)` with `L = L_{a,b}`, canonical when `[a b]` is in RREF.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LagCoords {
    pub a: Mat,
    pub b: Mat,
}

impl LagCoords {
    /// Checks the coprimality and symmetry conditions without canonicalising.
    pub fn validate(&self, k: &Field) -> Result<()> {
        let m = self.a.rows();
        if self.a.cols() != m || self.b.rows() != m || self.b.cols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: self.b.rows() });
        }
        let rank = self.a.hstack(&self.b).rank(k);
        if rank < m {
            return Err(Error::NotCoprime(rank));
        }
        if self.a.mul(&self.b.transpose(), k) != self.b.mul(&self.a.transpose(), k) {
            return Err(Error::NotSymmetric);
        }
        Ok(())
    }

    /// `a · bᵀ`, symmetric for valid coordinates.
    pub fn symmetric_product(&self, k: &Field) -> Mat {
        self.a.mul(&self.b.transpose(), k)
    }
}

/// `L_{a,b}`.
pub fn from_coords(space: &SympSpace, c: &LagCoords) -> Result<Lagrangian> {
    if !space.is_standard() {
        return Err(Error::NotStandardSpace);
    }
    if c.a.rows() != space.m() {
        return Err(Error::DimensionMismatch { expected: space.m(), found: c.a.rows() });
    }
    c.validate(space.field())?;
    Ok(Lagrangian::from_rows_unchecked(space.field(), &c.a.hstack(&c.b)))
}

/// Canonical coordinates of `L`.
pub fn to_coords(space: &SympSpace, l: &Lagrangian) -> Result<LagCoords> {
    if !space.is_standard() {
        return Err(Error::NotStandardSpace);
    }
    let m = space.m();
    Ok(LagCoords { a: l.basis.block(0, m, 0, m), b: l.basis.block(0, m, m, 2 * m) })
}

/// `g(L)`, transforming the basis vector by vector.
pub fn act(space: &SympSpace, g: &SpElement, l: &Lagrangian) -> Lagrangian {
    let k = space.field();
    let rows: Vec<Vec<Fe>> = (0..l.dim()).map(|i| g.apply(l.basis.row(i), k)).collect();
    Lagrangian::from_rows_unchecked(k, &Mat::from_rows(&rows, space.dim()).unwrap())
}

/// `g(L_{[a,b]}) = L_{[a,b] g*}` with `g* = Mᵀ`: with `M = [[A, B], [C, D]]`,
/// `[a b] Mᵀ = [a Aᵀ + b Bᵀ, a Cᵀ + b Dᵀ]`.
pub fn act_coords(space: &SympSpace, g: &SpElement, c: &LagCoords) -> Result<LagCoords> {
    if !space.is_standard() {
        return Err(Error::NotStandardSpace);
    }
    let k = space.field();
    let m = space.m();
    let mat = g.mat();
    let (ba, bb) = (mat.block(0, m, 0, m), mat.block(0, m, m, 2 * m));
    let (bc, bd) = (mat.block(m, 2 * m, 0, m), mat.block(m, 2 * m, m, 2 * m));
    let a2 = c.a.mul(&ba.transpose(), k).add(&c.b.mul(&bb.transpose(), k), k);
    let b2 = c.a.mul(&bc.transpose(), k).add(&c.b.mul(&bd.transpose(), k), k);
    let (canon, _) = a2.hstack(&b2).rref(k);
    Ok(LagCoords { a: canon.block(0, m, 0, m), b: canon.block(0, m, m, 2 * m) })
}

/// Intersection and sum of two subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetJoin {
    pub meet: Mat,
    pub join: Mat,
    pub meet_dim: usize,
    pub join_dim: usize,
}

pub fn meet_join(k: &Field, l1: &Lagrangian, l2: &Lagrangian) -> MeetJoin {
    let meet = intersect_rows(&l1.basis, &l2.basis, k);
    let (join, _) = l1.basis.vstack(&l2.basis).rref(k);
    MeetJoin { meet_dim: meet.rows(), join_dim: join.rows(), meet, join }
}

/// `dim(L1 ∩ L2)`.
pub fn meet_dim(k: &Field, l1: &Lagrangian, l2: &Lagrangian) -> usize {
    l1.dim() + l2.dim() - l1.basis.vstack(&l2.basis).rank(k)
}

/// Number of lagrangians, `∏_{i=1..m} (q^i + 1)`.
pub fn lagrangian_count(q: u64, m: u32) -> u128 {
    (1..=m).map(|i| (q as u128).pow(i) + 1).product()
}

/// Every lagrangian of `space`, sorted by canonical basis.
///
/// Walks RREF pivot patterns row by row, pruning as soon as a new row fails to be orthogonal
/// to the rows above it.
pub fn enumerate_lagrangians(space: &SympSpace) -> Vec<Lagrangian> {
    let n = space.dim();
    let m = space.m();
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(m);
    choose_pivots(space, n, m, 0, &mut pivots, &mut out);
    out.sort();
    out
}

fn choose_pivots(space: &SympSpace, n: usize, m: usize, start: usize, pivots: &mut Vec<usize>, out: &mut Vec<Lagrangian>) {
    if pivots.len() == m {
        let mut rows: Vec<Vec<Fe>> = Vec::with_capacity(m);
        fill_rows(space, pivots, &mut rows, out);
        return;
    }
    for c in start..n {
        pivots.push(c);
        choose_pivots(space, n, m, c + 1, pivots, out);
        pivots.pop();
    }
}

fn fill_rows(space: &SympSpace, pivots: &[usize], rows: &mut Vec<Vec<Fe>>, out: &mut Vec<Lagrangian>) {
    let n = space.dim();
    let i = rows.len();
    if i == pivots.len() {
        let basis = Mat::from_rows(rows, n).unwrap();
        out.push(Lagrangian { basis, pivots: pivots.to_vec() });
        return;
    }
    let free: Vec<usize> = (pivots[i] + 1..n).filter(|c| !pivots.contains(c)).collect();
    let q = space.field().order() as usize;
    let total = q.pow(free.len() as u32);
    for idx in 0..total {
        let mut row = vec![Fe::ZERO; n];
        row[pivots[i]] = Fe::ONE;
        let mut t = idx;
        for &c in free.iter().rev() {
            row[c] = Fe((t % q) as u32);
            t /= q;
        }
        if rows.iter().all(|r| space.pair(r, &row).is_zero()) {
            rows.push(row);
            fill_rows(space, pivots, rows, out);
            rows.pop();
        }
    }
}

/// `rg u`: the dimension of the span of the components of `u ∈ W^m` (rows of `u`).
pub fn module_rank(k: &Field, u: &Mat) -> usize {
    u.rank(k)
}

/// `B(u, v) = (A(u_i, v_j))_{ij}`.
pub fn module_form(space: &SympSpace, u: &Mat, v: &Mat) -> Mat {
    space.cross_gram(u, v)
}

/// `λ · u = Σ λ_i u_i`.
pub fn module_scalar(k: &Field, lambda: &[Fe], u: &Mat) -> Vec<Fe> {
    u.vec_mul(lambda, k)
}

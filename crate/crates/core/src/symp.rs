//! Symplectic spaces over `F_q` and elements of their symplectic groups.
//!
//! Vectors are stored as rows. A group element `g` is stored as the matrix `M` of its action on
//! column vectors, `g(x) = M x`; on a stored row `x` that is `x Mᵀ`. Composition is then the
//! ordinary matrix product: `(g h)(x) = g(h(x))` has matrix `M_g M_h`. [`ACTION_CONVENTION`]
//! records this, and `compose_matches_sequential_action` pins it.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Fe, Field};
use crate::linalg::{all_vectors, same_span, span_contains, complement_rows, Mat, SpanSolver};

/// Group elements act on column vectors from the left: `g(x) = M x`.
pub const ACTION_CONVENTION: &str = "g(x) = M x on column vectors; rows transform as x -> x M^T";

/// A nondegenerate alternating space `(F_q^{2m}, A)` with `A(u, v) = u · gram · vᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympSpace {
    field: Field,
    m: usize,
    gram: Mat,
    standard: bool,
}

/// The standard gram matrix `[[0, I], [-I, 0]]` in the basis `p_1..p_m, q_1..q_m`.
pub fn standard_gram(field: &Field, m: usize) -> Mat {
    let mut j = Mat::zeros(2 * m, 2 * m);
    let minus_one = field.neg(Fe::ONE);
    for i in 0..m {
        j[(i, m + i)] = Fe::ONE;
        j[(m + i, i)] = minus_one;
    }
    j
}

impl SympSpace {
    pub fn standard(field: &Field, m: usize) -> Self {
        SympSpace { field: field.clone(), m, gram: standard_gram(field, m), standard: true }
    }

    /// A space with an arbitrary gram matrix, which must be alternating and invertible.
    pub fn with_gram(field: &Field, gram: Mat) -> Result<Self> {
        let n = gram.rows();
        if gram.cols() != n || !n.is_multiple_of(2) {
            return Err(Error::InvalidForm);
        }
        for i in 0..n {
            if !gram[(i, i)].is_zero() {
                return Err(Error::InvalidForm);
            }
            for j in 0..n {
                if gram[(i, j)] != field.neg(gram[(j, i)]) {
                    return Err(Error::InvalidForm);
                }
            }
        }
        if gram.rank(field) != n {
            return Err(Error::InvalidForm);
        }
        let standard = gram == standard_gram(field, n / 2);
        Ok(SympSpace { field: field.clone(), m: n / 2, gram, standard })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Half the dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// `A(u, v)`.
    pub fn form(&self, u: &[Fe], v: &[Fe]) -> Result<Fe> {
        let n = self.dim();
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: u.len() });
        }
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        Ok(self.pair(u, v))
    }

    /// `A(u, v)` without length checks.
    #[inline]
    pub fn pair(&self, u: &[Fe], v: &[Fe]) -> Fe {
        let k = &self.field;
        if self.standard {
            let m = self.m;
            let mut acc = Fe::ZERO;
            for i in 0..m {
                acc = k.add(acc, k.mul(u[i], v[m + i]));
                acc = k.sub(acc, k.mul(u[m + i], v[i]));
            }
            acc
        } else {
            let gv = self.gram.mul_vec(v, k);
            u.iter().zip(&gv).fold(Fe::ZERO, |acc, (&a, &b)| k.add(acc, k.mul(a, b)))
        }
    }

    /// Gram matrix of the form on the rows of `a` against the rows of `b`.
    pub fn cross_gram(&self, a: &Mat, b: &Mat) -> Mat {
        let mut out = Mat::zeros(a.rows(), b.rows());
        for i in 0..a.rows() {
            for j in 0..b.rows() {
                out[(i, j)] = self.pair(a.row(i), b.row(j));
            }
        }
        out
    }

    pub fn is_isotropic(&self, rows: &Mat) -> bool {
        (0..rows.rows()).all(|i| (i + 1..rows.rows()).all(|j| self.pair(rows.row(i), rows.row(j)).is_zero()))
    }

    /// `gᵀ J g = J`.
    pub fn is_symplectic(&self, g: &Mat) -> bool {
        let n = self.dim();
        if g.rows() != n || g.cols() != n {
            return false;
        }
        let k = &self.field;
        g.transpose().mul(&self.gram, k).mul(g, k) == self.gram
    }

    /// Checks membership and wraps `g`.
    pub fn element(&self, g: Mat) -> Result<SpElement> {
        if self.is_symplectic(&g) {
            Ok(SpElement { mat: g })
        } else {
            Err(Error::NotSymplectic)
        }
    }

    pub fn identity(&self) -> SpElement {
        SpElement { mat: Mat::identity(self.dim()) }
    }

    /// The transvection `x ↦ x + λ A(x, v) v`.
    pub fn transvection(&self, v: &[Fe], lambda: Fe) -> SpElement {
        let n = self.dim();
        let k = &self.field;
        let mut mat = Mat::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Fe::ZERO; n];
            e[j] = Fe::ONE;
            let c = k.mul(lambda, self.pair(&e, v));
            for i in 0..n {
                mat[(i, j)] = k.add(e[i], k.mul(c, v[i]));
            }
        }
        SpElement { mat }
    }

    /// All distinct nontrivial transvections.
    pub fn all_transvections(&self) -> Vec<SpElement> {
        let k = &self.field;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for v in all_vectors(self.dim(), k).into_iter().filter(|v| v.iter().any(|x| !x.is_zero())) {
            for lambda in k.nonzero() {
                let t = self.transvection(&v, lambda);
                if seen.insert(t.mat.clone()) {
                    out.push(t);
                }
            }
        }
        out.sort();
        out
    }

    /// Quotient `U / R` where `R` must be the radical of `A` restricted to `U`.
    pub fn quotient_symplectic(&self, u: &Mat, r: &Mat) -> Result<Quotient> {
        let k = &self.field;
        let (u, _) = u.rref(k);
        let (r, _) = r.rref(k);
        if !span_contains(&u, &r, k) {
            return Err(Error::NotCoisotropicPair);
        }
        // radical of A|_U: x U with x (U J Uᵀ) = 0
        let g_u = self.cross_gram(&u, &u);
        let radical = g_u.left_nullspace(k).mul(&u, k);
        if !same_span(&radical, &r, k) {
            return Err(Error::NotCoisotropicPair);
        }
        let complement = complement_rows(&u, &r, k);
        let gram = self.cross_gram(&complement, &complement);
        let space = SympSpace::with_gram(k, gram).map_err(|_| Error::NotCoisotropicPair)?;
        let solver = SpanSolver::new(&r.vstack(&complement), k);
        Ok(Quotient { space, radical_dim: r.rows(), complement, solver })
    }
}

/// The quotient space `U / R` with its projection from `U` and a linear section back.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: SympSpace,
    radical_dim: usize,
    complement: Mat,
    solver: SpanSolver,
}

impl Quotient {
    /// Coordinates in the quotient of a vector of `U`.
    pub fn project(&self, u: &[Fe]) -> Result<Vec<Fe>> {
        let k = self.space.field();
        let x = self.solver.solve(u, k).ok_or(Error::NotInSubspace)?;
        Ok(x[self.radical_dim..].to_vec())
    }

    /// Projects every row.
    pub fn project_rows(&self, rows: &Mat) -> Result<Mat> {
        let images = (0..rows.rows()).map(|i| self.project(rows.row(i))).collect::<Result<Vec<_>>>()?;
        Mat::from_rows(&images, self.space.dim())
    }

    /// The lift `c ↦ c · C` through the chosen complement of `R` in `U`.
    pub fn section(&self, c: &[Fe]) -> Vec<Fe> {
        if self.complement.rows() == 0 {
            return vec![Fe::ZERO; self.complement.cols()];
        }
        self.complement.vec_mul(c, self.space.field())
    }
}

/// An element of `Sp(A)`, stored as the matrix of its action on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpElement {
    mat: Mat,
}

impl SpElement {
    /// Wraps a matrix without checking it; use [`SympSpace::element`] for untrusted input.
    pub fn from_mat_unchecked(mat: Mat) -> Self {
        SpElement { mat }
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    /// `g(x)`.
    pub fn apply(&self, x: &[Fe], k: &Field) -> Vec<Fe> {
        self.mat.mul_vec(x, k)
    }

    /// Applies `g` to each row.
    pub fn apply_rows(&self, rows: &Mat, k: &Field) -> Mat {
        rows.mul(&self.mat.transpose(), k)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SpElement, k: &Field) -> SpElement {
        SpElement { mat: self.mat.mul(&other.mat, k) }
    }

    pub fn inverse(&self, k: &Field) -> SpElement {
        SpElement { mat: self.mat.inverse(k).expect("symplectic matrices are invertible") }
    }

    pub fn is_identity(&self) -> bool {
        self.mat == Mat::identity(self.mat.rows())
    }
}

/// `|Sp(2m, q)| = q^{m²} ∏_{i=1..m} (q^{2i} - 1)`.
pub fn sp_order(q: u64, m: u32) -> u128 {
    let q = q as u128;
    (1..=m).fold(q.pow(m * m), |acc, i| acc * (q.pow(2 * i) - 1))
}

/// Breadth-first closure of the generators under composition, sorted.
pub fn group_closure(space: &SympSpace, generators: &[SpElement], cap: usize) -> Result<Vec<SpElement>> {
    let k = space.field();
    let id = space.identity();
    let mut seen: HashSet<SpElement> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.compose(s, k);
            if !seen.contains(&h) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                seen.insert(h.clone());
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<SpElement> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;

    fn f3() -> Field {
        make_field(3, 1).unwrap()
    }

    #[test]
    fn form_examples() {
        let k = f3();
        let w = SympSpace::standard(&k, 2);
        let e = |i: usize| {
            let mut v = vec![Fe::ZERO; 4];
            v[i] = Fe::ONE;
            v
        };
        let (p1, p2, q1) = (e(0), e(1), e(2));
        assert_eq!(w.form(&p1, &q1).unwrap(), Fe::ONE);
        assert_eq!(w.form(&p1, &p2).unwrap(), Fe::ZERO);
        assert_eq!(w.form(&q1, &p1).unwrap(), k.neg(Fe::ONE));
        assert!(matches!(w.form(&p1, &[Fe::ZERO]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn is_symplectic_examples() {
        let k = f3();
        let w = SympSpace::standard(&k, 1);
        assert!(w.is_symplectic(&Mat::identity(2)));
        assert!(!w.is_symplectic(&Mat::from_ints(&k, &[&[2, 0], &[0, 1]])));
        assert!(w.is_symplectic(&Mat::from_ints(&k, &[&[2, 0], &[0, 2]])));
    }

    #[test]
    fn transvection_examples() {
        let k = f3();
        let w = SympSpace::standard(&k, 1);
        let p = vec![Fe::ONE, Fe::ZERO];
        assert!(w.transvection(&p, Fe::ZERO).is_identity());
        assert!(w.transvection(&[Fe::ZERO, Fe::ZERO], Fe::ONE).is_identity());
        let t = w.transvection(&p, Fe::ONE);
        assert!(w.is_symplectic(t.mat()));
        // q ↦ q + A(q, p) p = q - p
        assert_eq!(t.apply(&[Fe::ZERO, Fe::ONE], &k), vec![k.neg(Fe::ONE), Fe::ONE]);
    }

    #[test]
    fn compose_matches_sequential_action() {
        let k = f3();
        let w = SympSpace::standard(&k, 2);
        let ts = w.all_transvections();
        let (g, h) = (&ts[3], &ts[17]);
        let x = vec![Fe(1), Fe(2), Fe(0), Fe(1)];
        assert_eq!(g.compose(h, &k).apply(&x, &k), g.apply(&h.apply(&x, &k), &k));
    }

    #[test]
    fn closure_orders() {
        let k = f3();
        let w = SympSpace::standard(&k, 1);
        let g = group_closure(&w, &w.all_transvections(), 1000).unwrap();
        assert_eq!(g.len() as u128, sp_order(3, 1));
        assert_eq!(g.len(), 24);
        assert!(g.iter().all(|x| w.is_symplectic(x.mat())));
        let trivial = group_closure(&w, &[w.identity()], 10).unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(group_closure(&w, &w.all_transvections(), 10), Err(Error::CapExceeded(10)));
        assert_eq!(sp_order(3, 2), 51840);
    }

    #[test]
    fn quotient_examples() {
        let k = f3();
        let w = SympSpace::standard(&k, 2);
        let full = Mat::identity(4);
        let zero = Mat::zeros(0, 4);
        let qw = w.quotient_symplectic(&full, &zero).unwrap();
        assert_eq!(qw.space.dim(), 4);
        // L' = <p1, p2>, L'' = <p1, q2>
        let l1 = Mat::from_ints(&k, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let l2 = Mat::from_ints(&k, &[&[1, 0, 0, 0], &[0, 0, 0, 1]]);
        let u = l1.vstack(&l2);
        let r = Mat::from_ints(&k, &[&[1, 0, 0, 0]]);
        let quo = w.quotient_symplectic(&u, &r).unwrap();
        assert_eq!(quo.space.dim(), 2);
        let c = vec![Fe(2), Fe(1)];
        assert_eq!(quo.project(&quo.section(&c)).unwrap(), c);
        let lag = l1.clone();
        assert_eq!(w.quotient_symplectic(&lag, &lag).unwrap().space.dim(), 0);
        assert_eq!(w.quotient_symplectic(&u, &zero).unwrap_err(), Error::NotCoisotropicPair);
    }
}

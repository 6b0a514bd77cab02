//! Geometric Gauss sums `S_L(L', L'')` and classical Gauss sums of quadratic forms.
//!
//! `S_L(L', L'') = Σ_{ζ ∈ L ∩ (L' + L'')} ψ(A(ζ', ζ''))` where `ζ = ζ' + ζ''` is any
//! decomposition with `ζ' ∈ L'`, `ζ'' ∈ L''`. Three independent routes are provided: the direct
//! sum, the classical sum of `a bᵀ` for the standard pair `(⟨P⟩, ⟨Q⟩)`, and the reduction to the
//! quotient `(L' + L'') / (L' ∩ L'')`.

use crate::cyclo::{CycInt, Psi};
use crate::error::{Error, Result};
use crate::galois::{Fe, Field};
use crate::lag::{from_coords, meet_dim, meet_join, LagCoords, Lagrangian};
use crate::linalg::{all_vectors, intersect_rows, span_elements, Mat, SpanSolver};
use crate::symp::SympSpace;

/// The quadratic form `Q(ζ) = A(ζ', ζ'')` on `L ∩ (L' + L'')`, tabulated.
#[derive(Clone, Debug)]
pub struct QuadFormOnSubspace {
    /// Basis (rows) of the domain.
    pub domain: Mat,
    /// Domain points, in the order of [`span_elements`] on `domain`.
    pub points: Vec<Vec<Fe>>,
    pub values: Vec<Fe>,
}

/// Splits `ζ ∈ L' + L''` as `(ζ', ζ'')`.
struct Splitter {
    solver: SpanSolver,
    first: Mat,
    second: Mat,
}

impl Splitter {
    fn new(k: &Field, l1: &Mat, l2: &Mat) -> Self {
        Splitter { solver: SpanSolver::new(&l1.vstack(l2), k), first: l1.clone(), second: l2.clone() }
    }

    fn split(&self, k: &Field, z: &[Fe]) -> Option<(Vec<Fe>, Vec<Fe>)> {
        let x = self.solver.solve(z, k)?;
        let r = self.first.rows();
        let a = self.first.vec_mul(&x[..r], k);
        let b = self.second.vec_mul(&x[r..], k);
        Some((a, b))
    }
}

pub fn quad_form(space: &SympSpace, l: &Lagrangian, l1: &Lagrangian, l2: &Lagrangian) -> QuadFormOnSubspace {
    quad_form_on(space, l.basis(), l1.basis(), l2.basis())
}

fn quad_form_on(space: &SympSpace, l: &Mat, l1: &Mat, l2: &Mat) -> QuadFormOnSubspace {
    let k = space.field();
    let sum = l1.vstack(l2).rref(k).0;
    let domain = intersect_rows(l, &sum, k);
    let splitter = Splitter::new(k, l1, l2);
    let points = span_elements(&domain, k);
    let values = points
        .iter()
        .map(|z| {
            let (a, b) = splitter.split(k, z).expect("domain lies in L' + L''");
            space.pair(&a, &b)
        })
        .collect();
    QuadFormOnSubspace { domain, points, values }
}

impl QuadFormOnSubspace {
    /// `Σ ψ(Q(ζ))`.
    pub fn gauss_sum(&self, psi: &Psi) -> CycInt {
        let p = psi.field().p();
        let mut counts = vec![0i64; p as usize];
        for &v in &self.values {
            counts[psi.exponent(v) as usize] += 1;
        }
        CycInt::from_cyclic(p, &counts)
    }
}

/// Re-evaluates `A(ζ', ζ'')` with the decomposition shifted by `t ∈ L' ∩ L''`:
/// `(ζ' + t, ζ'' - t)`. Used to confirm the form is independent of the decomposition.
pub fn quad_value_shifted(space: &SympSpace, l1: &Lagrangian, l2: &Lagrangian, z: &[Fe], t: &[Fe]) -> Fe {
    let k = space.field();
    let splitter = Splitter::new(k, l1.basis(), l2.basis());
    let (a, b) = splitter.split(k, z).expect("point lies in L' + L''");
    let a2: Vec<Fe> = a.iter().zip(t).map(|(&x, &y)| k.add(x, y)).collect();
    let b2: Vec<Fe> = b.iter().zip(t).map(|(&x, &y)| k.sub(x, y)).collect();
    space.pair(&a2, &b2)
}

/// `S_L(L', L'')` by direct summation.
pub fn geometric_gauss(space: &SympSpace, psi: &Psi, l: &Lagrangian, l1: &Lagrangian, l2: &Lagrangian) -> CycInt {
    quad_form(space, l, l1, l2).gauss_sum(psi)
}

/// `Σ_{x ∈ F_q^r} ψ(x s xᵀ)` for a symmetric `r × r` matrix `s`.
pub fn classical_gauss(k: &Field, psi: &Psi, s: &Mat) -> Result<CycInt> {
    let r = s.rows();
    if s.cols() != r || *s != s.transpose() {
        return Err(Error::NotSymmetric);
    }
    let p = k.p();
    let mut counts = vec![0i64; p as usize];
    for x in all_vectors(r, k) {
        let sx = s.mul_vec(&x, k);
        let v = x.iter().zip(&sx).fold(Fe::ZERO, |acc, (&a, &b)| k.add(acc, k.mul(a, b)));
        counts[psi.exponent(v) as usize] += 1;
    }
    Ok(CycInt::from_cyclic(p, &counts))
}

/// `S_{L_{a,b}}(⟨P⟩, ⟨Q⟩) = S(a bᵀ)`.
pub fn gauss_via_coords(space: &SympSpace, psi: &Psi, c: &LagCoords) -> Result<CycInt> {
    from_coords(space, c)?;
    classical_gauss(space.field(), psi, &c.symmetric_product(space.field()))
}

/// `S_L(L', L'') = |L ∩ L' ∩ L''| · S_{L̃/R}(L'/R, L''/R)` computed in the quotient
/// `(L' + L'') / R`, `R = L' ∩ L''`, `L̃ = L ∩ (L' + L'') + R`.
pub fn gauss_via_reduction(space: &SympSpace, psi: &Psi, l: &Lagrangian, l1: &Lagrangian, l2: &Lagrangian) -> Result<CycInt> {
    let k = space.field();
    let mj = meet_join(k, l1, l2);
    let (u, r) = (mj.join, mj.meet);
    let domain = intersect_rows(l.basis(), &u, k);
    let tilde = domain.vstack(&r);
    Lagrangian::new(space, &tilde).map_err(|_| Error::InternalInconsistency("L∩(L'+L'') + L'∩L'' is not lagrangian".into()))?;

    let triple = intersect_rows(l.basis(), &r, k).rows();
    let quotient = space.quotient_symplectic(&u, &r)?;
    let qs = &quotient.space;
    let push = |rows: &Mat| -> Result<Lagrangian> {
        let img = quotient.project_rows(rows)?;
        Lagrangian::new(qs, &img).map_err(|_| Error::InternalInconsistency("image is not lagrangian in the quotient".into()))
    };
    let (lt, q1, q2) = (push(&tilde)?, push(l1.basis())?, push(l2.basis())?);
    let inner = geometric_gauss(qs, psi, &lt, &q1, &q2);
    Ok(inner.scale((k.order() as i64).pow(triple as u32)))
}

/// `k` with `|S_L(L', L'')|² = q^k`: `dim(L ∩ L'') + dim(L' ∩ L) + m - dim(L'' ∩ L')`.
pub fn modulus_exponent(space: &SympSpace, l: &Lagrangian, l1: &Lagrangian, l2: &Lagrangian) -> u32 {
    let k = space.field();
    (meet_dim(k, l, l2) + meet_dim(k, l1, l) + space.m() - meet_dim(k, l2, l1)) as u32
}

/// `3m - rank(a) - rank(b)`, the exponent for the standard pair.
pub fn modulus_exponent_coords(k: &Field, c: &LagCoords) -> u32 {
    (3 * c.a.rows() - c.a.rank(k) - c.b.rank(k)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;

    #[test]
    fn geometric_examples() {
        let k = make_field(3, 1).unwrap();
        let psi = Psi::standard(&k);
        let w = SympSpace::standard(&k, 1);
        let lp = Lagrangian::p_frame(&w);
        let lq = Lagrangian::q_frame(&w);
        let diag = Lagrangian::new(&w, &Mat::from_ints(&k, &[&[1, 1]])).unwrap();
        let s = geometric_gauss(&w, &psi, &diag, &lp, &lq);
        assert_eq!(s.coeffs(), &[1, 2]);
        assert_eq!(s.norm_sq().as_integer(), Some(3));
        assert_eq!(modulus_exponent(&w, &diag, &lp, &lq), 1);
        assert_eq!(geometric_gauss(&w, &psi, &lp, &lp, &lp).as_integer(), Some(3));
        assert_eq!(modulus_exponent(&w, &lp, &lp, &lp), 2);
    }

    #[test]
    fn classical_examples() {
        let k = make_field(3, 1).unwrap();
        let psi = Psi::standard(&k);
        assert_eq!(classical_gauss(&k, &psi, &Mat::zeros(0, 0)).unwrap(), CycInt::one(3));
        assert_eq!(classical_gauss(&k, &psi, &Mat::from_ints(&k, &[&[1]])).unwrap().coeffs(), &[1, 2]);
        assert_eq!(classical_gauss(&k, &psi, &Mat::from_ints(&k, &[&[0]])).unwrap().as_integer(), Some(3));
        assert_eq!(classical_gauss(&k, &psi, &Mat::from_ints(&k, &[&[0, 1], &[0, 0]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn coords_examples() {
        let k = make_field(3, 1).unwrap();
        let psi = Psi::standard(&k);
        let w = SympSpace::standard(&k, 1);
        let zero = Mat::zeros(1, 1);
        let one = Mat::identity(1);
        let c = LagCoords { a: one.clone(), b: zero };
        assert_eq!(gauss_via_coords(&w, &psi, &c).unwrap().as_integer(), Some(3));
        let c = LagCoords { a: one.clone(), b: one };
        assert_eq!(gauss_via_coords(&w, &psi, &c).unwrap().coeffs(), &[1, 2]);
        assert_eq!(modulus_exponent_coords(&k, &c), 1);
    }

    #[test]
    fn reduction_transverse_and_degenerate() {
        let k = make_field(3, 1).unwrap();
        let psi = Psi::standard(&k);
        let w = SympSpace::standard(&k, 2);
        let ls = crate::lag::enumerate_lagrangians(&w);
        for l in &ls[..10] {
            for l1 in &ls[..10] {
                for l2 in &ls[..10] {
                    assert_eq!(gauss_via_reduction(&w, &psi, l, l1, l2).unwrap(), geometric_gauss(&w, &psi, l, l1, l2));
                }
            }
        }
    }
}

//! Exact arithmetic in `Z[ζ_p]` and matrices scaled by powers of `√q`.
//!
//! A [`CycInt`] is stored on the basis `1, ζ, ..., ζ^{p-2}`; the relation
//! `1 + ζ + ... + ζ^{p-1} = 0` makes that representation canonical. Intermediate products are
//! accumulated in the cyclic basis `1, ..., ζ^{p-1}` (arithmetic mod `x^p - 1`) and reduced at
//! the end.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::galois::{Fe, Field};

type Coeffs = SmallVec<[i64; 8]>;

/// An element of `Z[ζ_p]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u32,
    c: Coeffs,
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c.as_slice())
    }
}

impl Serialize for CycInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.c.as_slice().serialize(s)
    }
}

/// Reduces a cyclic coefficient vector (length `p`) into the canonical basis.
fn reduce_cyclic(p: u32, cyc: &[i64]) -> Coeffs {
    let top = cyc[p as usize - 1];
    cyc[..p as usize - 1].iter().map(|&x| x - top).collect()
}

impl CycInt {
    pub fn zero(p: u32) -> Self {
        CycInt { p, c: smallvec![0; p as usize - 1] }
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        let mut z = Self::zero(p);
        z.c[0] = n;
        z
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// `ζ^k`.
    pub fn root(p: u32, k: u32) -> Self {
        let k = k % p;
        if k == p - 1 {
            CycInt { p, c: smallvec![-1; p as usize - 1] }
        } else {
            let mut z = Self::zero(p);
            z.c[k as usize] = 1;
            z
        }
    }

    /// `n·ζ^k`.
    pub fn monomial(p: u32, n: i64, k: u32) -> Self {
        let mut cyc = vec![0i64; p as usize];
        cyc[(k % p) as usize] = n;
        CycInt { p, c: reduce_cyclic(p, &cyc) }
    }

    /// Builds from canonical coefficients (length `p - 1`).
    pub fn from_coeffs(p: u32, coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() != p as usize - 1 {
            return Err(Error::DimensionMismatch { expected: p as usize - 1, found: coeffs.len() });
        }
        Ok(CycInt { p, c: coeffs.iter().copied().collect() })
    }

    /// `Σ counts[k] ζ^k` with `counts` of length `p`.
    pub fn from_cyclic(p: u32, counts: &[i64]) -> Self {
        debug_assert_eq!(counts.len(), p as usize);
        CycInt { p, c: reduce_cyclic(p, counts) }
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// The integer value when the element lies in `Z`.
    pub fn as_integer(&self) -> Option<i64> {
        self.c[1..].iter().all(|&x| x == 0).then_some(self.c[0])
    }

    /// Decomposes `n·ζ^k` into `(n, k)`; `None` for anything else (including zero).
    pub fn as_monomial(&self) -> Option<(i64, u32)> {
        let p = self.p as usize;
        let nz: Vec<usize> = (0..p - 1).filter(|&i| self.c[i] != 0).collect();
        match nz.len() {
            1 => Some((self.c[nz[0]], nz[0] as u32)),
            n if n == p - 1 && self.c.iter().all(|&x| x == self.c[0]) => Some((-self.c[0], self.p - 1)),
            _ => None,
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing cyclotomic orders");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        CycInt { p: self.p, c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        CycInt { p: self.p, c: self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        CycInt { p: self.p, c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, n: i64) -> Self {
        CycInt { p: self.p, c: self.c.iter().map(|a| a * n).collect() }
    }

    /// Adds `self · other` into a cyclic accumulator of length `p`.
    #[inline]
    pub fn mul_acc_cyclic(&self, other: &Self, acc: &mut [i64]) {
        let p = self.p as usize;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if b != 0 {
                    let k = i + j;
                    acc[if k >= p { k - p } else { k }] += a * b;
                }
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut acc: Coeffs = smallvec![0; self.p as usize];
        self.mul_acc_cyclic(other, &mut acc);
        CycInt { p: self.p, c: reduce_cyclic(self.p, &acc) }
    }

    /// Multiplication by `ζ^k`.
    pub fn mul_root(&self, k: u32) -> Self {
        let p = self.p as usize;
        let mut acc: Coeffs = smallvec![0; p];
        for (i, &a) in self.c.iter().enumerate() {
            acc[(i + k as usize) % p] += a;
        }
        CycInt { p: self.p, c: reduce_cyclic(self.p, &acc) }
    }

    /// Complex conjugation `ζ^k ↦ ζ^{p-k}`.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut acc: Coeffs = smallvec![0; p];
        for (k, &a) in self.c.iter().enumerate() {
            acc[(p - k) % p] += a;
        }
        CycInt { p: self.p, c: reduce_cyclic(self.p, &acc) }
    }

    /// `z · conj(z)`.
    pub fn norm_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Image under `ζ ↦ exp(2πi/p)`.
    pub fn to_complex(&self) -> Complex64 {
        let w = 2.0 * PI / self.p as f64;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(k, &a)| Complex64::from_polar(a as f64, w * k as f64))
            .sum()
    }
}

/// The additive character `ψ_a(x) = ζ_p^{Tr(a·x)}`.
#[derive(Clone, Debug)]
pub struct Psi {
    field: Field,
    scale: Fe,
}

impl Psi {
    /// The standard character `x ↦ ζ^{Tr(x)}`.
    pub fn standard(field: &Field) -> Self {
        Psi { field: field.clone(), scale: Fe::ONE }
    }

    /// `x ↦ ζ^{Tr(a x)}` for a nonzero `a`.
    pub fn scaled(field: &Field, a: Fe) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Parse("character scale must be nonzero".into()));
        }
        Ok(Psi { field: field.clone(), scale: a })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn scale(&self) -> Fe {
        self.scale
    }

    /// Exponent `k` with `ψ(x) = ζ^k`.
    #[inline]
    pub fn exponent(&self, x: Fe) -> u32 {
        self.field.trace(self.field.mul(self.scale, x))
    }

    pub fn value(&self, x: Fe) -> CycInt {
        CycInt::root(self.field.p(), self.exponent(x))
    }
}

/// The value `q^{e/2} · value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaledCyc {
    pub value: CycInt,
    pub e: i32,
    #[serde(skip)]
    pub q: u32,
}

fn pow_q(q: u32, k: u32) -> i64 {
    (q as i64).pow(k)
}

impl ScaledCyc {
    pub fn new(q: u32, value: CycInt, e: i32) -> Self {
        ScaledCyc { value, e, q }
    }

    pub fn one(q: u32, p: u32) -> Self {
        ScaledCyc { value: CycInt::one(p), e: 0, q }
    }

    pub fn mul(&self, other: &Self) -> Self {
        ScaledCyc { value: self.value.mul(&other.value), e: self.e + other.e, q: self.q }
    }

    pub fn conj(&self) -> Self {
        ScaledCyc { value: self.value.conj(), e: self.e, q: self.q }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex() * (self.q as f64).powf(self.e as f64 / 2.0)
    }

    /// Exact equality; fails with `ParityMismatch` when the exponents differ in parity.
    pub fn eq_exact(&self, other: &Self) -> Result<bool> {
        if (self.e - other.e).rem_euclid(2) != 0 {
            return Err(Error::ParityMismatch(self.e, other.e));
        }
        let d = (other.e - self.e) / 2;
        Ok(if d >= 0 {
            self.value == other.value.scale(pow_q(self.q, d as u32))
        } else {
            self.value.scale(pow_q(self.q, (-d) as u32)) == other.value
        })
    }

    /// Exact when parity permits, otherwise numeric at `tol`.
    pub fn eq_auto(&self, other: &Self, tol: f64) -> bool {
        match self.eq_exact(other) {
            Ok(b) => b,
            Err(_) => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }
}

/// Comparison mode for [`ScaledMatrix::scaled_eq`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum EqMode {
    Exact,
    Numeric(f64),
}

/// Numeric tolerance used whenever an exact comparison is blocked by exponent parity.
pub const NUMERIC_TOL: f64 = 1e-9;

/// Row or column labels: the coset representatives indexing a fiber basis.
pub type Labels = Option<Arc<Vec<Vec<u32>>>>;

fn labels_compatible(a: &Labels, b: &Labels) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => Arc::ptr_eq(x, y) || x == y,
        _ => true,
    }
}

/// A matrix over `Z[ζ_p]` carrying a global factor `q^{e/2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaledMatrix {
    #[serde(skip)]
    pub p: u32,
    #[serde(skip)]
    pub q: u32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<CycInt>,
    pub e: i32,
    pub row_labels: Labels,
    pub col_labels: Labels,
}

impl ScaledMatrix {
    pub fn zeros(p: u32, q: u32, rows: usize, cols: usize) -> Self {
        ScaledMatrix {
            p,
            q,
            rows,
            cols,
            entries: vec![CycInt::zero(p); rows * cols],
            e: 0,
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn identity(p: u32, q: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, q, n, n);
        for i in 0..n {
            m.entries[i * n + i] = CycInt::one(p);
        }
        m
    }

    pub fn with_labels(mut self, rows: Labels, cols: Labels) -> Self {
        self.row_labels = rows;
        self.col_labels = cols;
        self
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &CycInt {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: CycInt) {
        self.entries[i * self.cols + j] = z;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Exact product; exponents add.
    pub fn scaled_mul(&self, other: &ScaledMatrix) -> Result<ScaledMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        if !labels_compatible(&self.col_labels, &other.row_labels) {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let p = self.p as usize;
        let mut out = Vec::with_capacity(self.rows * other.cols);
        let mut acc = vec![0i64; p];
        // transpose-free: gather the nonzero pattern of each row of `self` once
        for i in 0..self.rows {
            let row: Vec<(usize, &CycInt)> =
                (0..self.cols).map(|k| (k, self.get(i, k))).filter(|(_, z)| !z.is_zero()).collect();
            for j in 0..other.cols {
                acc.iter_mut().for_each(|x| *x = 0);
                for &(k, a) in &row {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        a.mul_acc_cyclic(b, &mut acc);
                    }
                }
                out.push(CycInt::from_cyclic(self.p, &acc));
            }
        }
        Ok(ScaledMatrix {
            p: self.p,
            q: self.q,
            rows: self.rows,
            cols: other.cols,
            entries: out,
            e: self.e + other.e,
            row_labels: self.row_labels.clone(),
            col_labels: other.col_labels.clone(),
        })
    }

    /// Multiplies every entry by a scaled scalar.
    pub fn scale_by(&self, s: &ScaledCyc) -> ScaledMatrix {
        let mut out = self.clone();
        out.entries = self.entries.iter().map(|z| z.mul(&s.value)).collect();
        out.e += s.e;
        out
    }

    /// Conjugate transpose, same scale.
    pub fn adjoint(&self) -> ScaledMatrix {
        let mut out = Self::zeros(self.p, self.q, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out.row_labels = self.col_labels.clone();
        out.col_labels = self.row_labels.clone();
        out.e = self.e;
        out
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        let s = (self.q as f64).powf(self.e as f64 / 2.0);
        self.entries.iter().map(|z| z.to_complex() * s).collect()
    }

    pub fn trace_complex(&self) -> Complex64 {
        let s = (self.q as f64).powf(self.e as f64 / 2.0);
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).to_complex()).sum::<Complex64>() * s
    }

    pub fn scaled_eq(&self, other: &ScaledMatrix, mode: EqMode) -> Result<bool> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        match mode {
            EqMode::Exact => {
                if (self.e - other.e).rem_euclid(2) != 0 {
                    return Err(Error::ParityMismatch(self.e, other.e));
                }
                let d = (other.e - self.e) / 2;
                let (fa, fb) = if d >= 0 { (1, pow_q(self.q, d as u32)) } else { (pow_q(self.q, (-d) as u32), 1) };
                Ok(self.entries.iter().zip(&other.entries).all(|(a, b)| a.scale(fa) == b.scale(fb)))
            }
            EqMode::Numeric(tol) => Ok(self
                .to_complex()
                .iter()
                .zip(other.to_complex())
                .all(|(a, b)| (a - b).norm() <= tol)),
        }
    }

    /// Exact comparison when exponent parity permits, numeric at [`NUMERIC_TOL`] otherwise.
    pub fn eq_auto(&self, other: &ScaledMatrix) -> bool {
        match self.scaled_eq(other, EqMode::Exact) {
            Ok(b) => b,
            Err(Error::ParityMismatch(..)) => self.scaled_eq(other, EqMode::Numeric(NUMERIC_TOL)).unwrap_or(false),
            Err(_) => false,
        }
    }

    /// `M · M^*` equals the identity under the scale, checked exactly: the unscaled product must be
    /// `q^{-e}` times the identity.
    pub fn is_unitary(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = match self.scaled_mul(&self.adjoint()) {
            Ok(m) => m,
            Err(_) => return false,
        };
        // prod carries exponent 2e, so its entries must be q^{-e} on the diagonal
        if self.e > 0 {
            return false;
        }
        let diag = CycInt::from_int(self.p, pow_q(self.q, (-self.e) as u32));
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let z = prod.get(i, j);
                if i == j {
                    *z == diag
                } else {
                    z.is_zero()
                }
            })
        })
    }
}

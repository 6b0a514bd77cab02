//! Finite fields `F_q` of odd characteristic.
//!
//! Elements are stored as `Fe(index)` where `index = c_0 + c_1 p + ... + c_{f-1} p^{f-1}`
//! and `c_0 + c_1 α + ... + c_{f-1} α^{f-1}` is the element in the polynomial basis of the
//! modulus. With this encoding `0` and `1` are the additive and multiplicative identities and
//! the prime subfield is exactly the indices `< p`. All arithmetic is table driven, so a
//! [`Field`] is meant for the small orders used in exhaustive verification.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1024;

/// An element of a [`Field`], identified by its coefficient index.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    trace: Vec<u32>,
}

/// The field `F_q`, `q = p^f`, with the lexicographically smallest monic irreducible modulus.
///
/// Cloning is cheap; all clones share the same tables.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.f == other.t.f
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}(p={}, modulus={:?})", self.t.q, self.t.p, self.t.modulus)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^f`; `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut f = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

// Polynomials over Z_p, coefficients low to high.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], monic: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let d = monic.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for (i, &c) in monic.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    poly_trim(out.into_iter().map(|c| c as u32).collect())
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p` digits of `k`.
fn monic_from_index(k: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(deg as usize + 1);
    let mut k = k;
    for _ in 0..deg {
        c.push((k % p as u64) as u32);
        k /= p as u64;
    }
    c.push(1);
    c
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    for d in 1..=deg / 2 {
        for k in 0..(p as u64).pow(d) {
            let cand = monic_from_index(k, d, p);
            if poly_rem(poly, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `f`, comparing the coefficient tuple
/// `(c_0, c_1, ..., c_{f-1})` low degree first.
fn smallest_irreducible(p: u32, f: u32) -> Vec<u32> {
    let total = (p as u64).pow(f);
    for rank in 0..total {
        // c_0 is the most significant digit of the lexicographic rank
        let mut c = vec![0u32; f as usize];
        let mut r = rank;
        for i in (0..f as usize).rev() {
            c[i] = (r % p as u64) as u32;
            r /= p as u64;
        }
        c.push(1);
        if is_irreducible(&c, p) {
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Builds `F_{p^f}`.
pub fn make_field(p: u64, f: u32) -> Result<Field> {
    if p == 2 {
        return Err(Error::EvenCharacteristic(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::Parse("extension degree must be at least 1".into()));
    }
    let q = p.checked_pow(f).filter(|&q| q <= MAX_ORDER).ok_or(Error::FieldTooLarge(p.saturating_pow(f)))?;
    let p = p as u32;
    let q = q as u32;
    let modulus = smallest_irreducible(p, f);

    let coeffs = |x: u32| -> Vec<u32> {
        let mut c = Vec::with_capacity(f as usize);
        let mut x = x;
        for _ in 0..f {
            c.push(x % p);
            x /= p;
        }
        c
    };
    let index = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };

    let n = q as usize;
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..q {
        let ca = coeffs(a);
        for b in 0..q {
            let cb = coeffs(b);
            let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
            add[a as usize * n + b as usize] = index(&s);
            let prod = poly_rem(&poly_mul(&poly_trim(ca.clone()), &poly_trim(cb.clone()), p), &modulus, p);
            let mut padded = prod;
            padded.resize(f as usize, 0);
            mul[a as usize * n + b as usize] = index(&padded);
        }
    }
    let mut neg = vec![0u32; n];
    let mut inv = vec![0u32; n];
    for a in 0..n {
        neg[a] = (0..n).find(|&b| add[a * n + b] == 0).unwrap() as u32;
        if a != 0 {
            inv[a] = (0..n).find(|&b| mul[a * n + b] == 1).unwrap() as u32;
        }
    }
    // Tr(x) = x + x^p + ... + x^{p^{f-1}}
    let mut trace = vec![0u32; n];
    for a in 0..n {
        let mut acc = 0u32;
        let mut frob = a as u32;
        for _ in 0..f {
            acc = add[acc as usize * n + frob as usize];
            let mut pw = 1u32;
            for _ in 0..p {
                pw = mul[pw as usize * n + frob as usize];
            }
            frob = pw;
        }
        debug_assert!(acc < p);
        trace[a] = acc;
    }

    Ok(Field {
        t: Arc::new(Tables { p, f, q, modulus, add, mul, neg, inv, trace }),
    })
}

/// Builds `F_q` from its order.
pub fn field_of_order(q: u64) -> Result<Field> {
    if q.is_multiple_of(2) && q > 0 && q.is_power_of_two() {
        return Err(Error::EvenCharacteristic(2));
    }
    let (p, f) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    make_field(p, f)
}

impl Field {
    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.t.f
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.t.q
    }

    /// Modulus coefficients, low degree first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.t.add[a.0 as usize * self.t.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.t.mul[a.0 as usize * self.t.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.t.neg[a.0 as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (!a.is_zero()).then(|| Fe(self.t.inv[a.0 as usize]))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace to the prime field, as a residue in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: Fe) -> u32 {
        self.t.trace[a.0 as usize]
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.t.p as i64) as u32)
    }

    /// Element with the given coefficients (low degree first). Missing coefficients are zero.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.t.f as usize || coeffs.iter().any(|&c| c >= self.t.p) {
            return Err(Error::Parse(format!("invalid coefficients {coeffs:?} for F_{}", self.t.q)));
        }
        Ok(Fe(coeffs.iter().rev().fold(0, |acc, &d| acc * self.t.p + d)))
    }

    pub fn element(&self, index: u32) -> Result<Fe> {
        if index < self.t.q {
            Ok(Fe(index))
        } else {
            Err(Error::Parse(format!("{index} is not an element index of F_{}", self.t.q)))
        }
    }

    /// Coefficient tuple, low degree first, always of length `f`.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut x = a.0;
        (0..self.t.f)
            .map(|_| {
                let c = x % self.t.p;
                x /= self.t.p;
                c
            })
            .collect()
    }

    /// The root `α` of the modulus (equal to `0` when `f = 1`, since the modulus is `x`).
    pub fn generator_alpha(&self) -> Fe {
        if self.t.f == 1 {
            Fe(0)
        } else {
            Fe(self.t.p)
        }
    }

    /// Basis `1, α, ..., α^{f-1}` of `F_q` over `F_p`.
    pub fn prime_basis(&self) -> Vec<Fe> {
        (0..self.t.f).map(|i| Fe(self.t.p.pow(i))).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.t.q).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + '_ {
        (1..self.t.q).map(Fe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible_deg2(p: u32) -> Vec<u32> {
        // first (c0, c1) in lexicographic order with no root in F_p
        for c0 in 0..p {
            for c1 in 0..p {
                let has_root = (0..p).any(|x| (x * x + c1 * x + c0) % p == 0);
                if !has_root {
                    return vec![c0, c1, 1];
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let k = make_field(3, 1).unwrap();
        assert_eq!(k.modulus(), &[0, 1]);
        assert_eq!(k.order(), 3);
    }

    #[test]
    fn f9_modulus_matches_brute_force() {
        let k = make_field(3, 2).unwrap();
        assert_eq!(k.modulus(), brute_irreducible_deg2(3).as_slice());
        assert_eq!(k.modulus(), &[1, 0, 1]);
        for p in [5u32, 7] {
            assert_eq!(make_field(p as u64, 2).unwrap().modulus(), brute_irreducible_deg2(p).as_slice());
        }
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert_eq!(make_field(2, 1).unwrap_err(), Error::EvenCharacteristic(2));
        assert_eq!(make_field(9, 1).unwrap_err(), Error::NotPrime(9));
        assert_eq!(field_of_order(8).unwrap_err(), Error::EvenCharacteristic(2));
        assert_eq!(field_of_order(15).unwrap_err(), Error::NotPrimePower(15));
        assert!(field_of_order(2048 * 3).is_err());
    }

    #[test]
    fn trace_examples() {
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(f3.trace(Fe::ONE), 1);
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.trace(Fe::ONE), 2);
        let alpha = f9.generator_alpha();
        assert_eq!(f9.coeffs(alpha), vec![0, 1]);
        assert_eq!(f9.trace(alpha), 0);
        // α² = -1
        assert_eq!(f9.mul(alpha, alpha), f9.neg(Fe::ONE));
    }

    #[test]
    fn trace_is_linear_and_nonzero() {
        for (p, f) in [(3, 2), (5, 2), (3, 3)] {
            let k = make_field(p, f).unwrap();
            let mut nonzero = false;
            for a in k.elements() {
                nonzero |= k.trace(a) != 0;
                for b in k.elements() {
                    assert_eq!(k.trace(k.add(a, b)), (k.trace(a) + k.trace(b)) % k.p());
                }
                for c in 0..k.p() {
                    let c_fe = k.from_int(c as i64);
                    assert_eq!(k.trace(k.mul(c_fe, a)), c * k.trace(a) % k.p());
                }
            }
            assert!(nonzero);
        }
    }

    #[test]
    fn serialization_coefficients() {
        let f9 = make_field(3, 2).unwrap();
        let x = f9.from_coeffs(&[2, 1]).unwrap();
        assert_eq!(f9.coeffs(x), vec![2, 1]);
        assert_eq!(x, f9.add(f9.from_int(2), f9.generator_alpha()));
    }
}

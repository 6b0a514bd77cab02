//! The symplectic space `W` built from exterior powers of `V = F_q^n`, the embedding of `SL(V)`
//! into `Sp(W)`, and the restricted Weil representation with its intertwiners.
//!
//! `W = Λ¹V ⊕ Λ³V ⊕ … ⊕ Λ^{n-1}V` for even `n` and `Λ¹V ⊕ … ⊕ Λ^{n-1}V` for odd `n`, paired into
//! `ΛⁿV ≅ k` by `e_1 ∧ … ∧ e_n ↦ 1`. Vectors of `W` in *monomial coordinates* follow the wedge
//! basis: degrees ascending, sorted index tuples lexicographic within a degree.
//!
//! The representation is built on a standard symplectic basis of signed monomials. For every
//! monomial `e_S` of degree below `n/2` the pair is `(p, q) = (ε e_{S^c}, e_S)`, so the sum of the
//! low degrees is `⟨Q⟩` and is stable under `SL(V)`. A self-paired middle degree pairs
//! `(e_S, ε e_{S^c})` with `S` lexicographically smaller than `S^c`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::Bundle;
use crate::cyclo::{Psi, ScaledMatrix};
use crate::error::{Error, Result};
use crate::galois::{Fe, Field};
use crate::lag::Lagrangian;
use crate::linalg::Mat;
use crate::symp::{SpElement, SympSpace};
use crate::weil::{commutant_dim, is_one, numeric_rank, proportionality, WeilRep};

/// Tolerance on `|λ| = 1` for intertwiner scalars.
pub const UNIT_TOL: f64 = 1e-9;

/// Default number of centralizer elements examined before falling back to sampling.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct ExtSpace {
    n: usize,
    field: Field,
    degrees: Vec<usize>,
    monomials: Vec<Vec<usize>>,
    gram: Mat,
    // rows: the standard symplectic basis in monomial coordinates (a signed permutation)
    change: Mat,
    space: SympSpace,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sign of the permutation listing `s` then `t`, or 0 if they overlap.
fn concat_sign(s: &[usize], t: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for &a in s {
        for &b in t {
            if a == b {
                return 0;
            }
            if a > b {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl ExtSpace {
    pub fn new(field: &Field, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        let degrees: Vec<usize> = if n.is_multiple_of(2) { (1..n).step_by(2).collect() } else { (1..n).collect() };
        let monomials: Vec<Vec<usize>> = degrees.iter().flat_map(|&d| subsets(n, d)).collect();
        let dim = monomials.len();
        let index_of = |s: &[usize]| monomials.iter().position(|t| t.as_slice() == s).expect("monomial in basis");

        let mut gram = Mat::zeros(dim, dim);
        for (i, s) in monomials.iter().enumerate() {
            for (j, t) in monomials.iter().enumerate() {
                if s.len() + t.len() != n {
                    continue;
                }
                let mut sign = concat_sign(s, t);
                if n % 2 == 1 && t.len() % 2 == 1 {
                    sign = -sign;
                }
                gram[(i, j)] = field.from_int(sign);
            }
        }

        let complement = |s: &[usize]| (0..n).filter(|i| !s.contains(i)).collect::<Vec<_>>();
        // (p row, q row) pairs as (monomial index, sign)
        let mut pairs: Vec<((usize, Fe), (usize, Fe))> = Vec::new();
        for (i, s) in monomials.iter().enumerate() {
            if 2 * s.len() < n {
                let c = index_of(&complement(s));
                pairs.push(((c, gram[(c, i)]), (i, Fe::ONE)));
            }
        }
        for (i, s) in monomials.iter().enumerate() {
            if 2 * s.len() == n {
                let sc = complement(s);
                if *s < sc {
                    let c = index_of(&sc);
                    pairs.push(((i, Fe::ONE), (c, gram[(i, c)])));
                }
            }
        }
        let m = pairs.len();
        let mut change = Mat::zeros(dim, dim);
        for (r, &((pi, ps), (qi, qs))) in pairs.iter().enumerate() {
            change[(r, pi)] = ps;
            change[(m + r, qi)] = qs;
        }
        let space = SympSpace::standard(field, m);
        debug_assert_eq!(change.mul(&gram, field).mul(&change.transpose(), field), *space.gram());
        Ok(ExtSpace { n, field: field.clone(), degrees, monomials, gram, change, space })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `D = Σ C(n, i)` over the degrees.
    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn monomials(&self) -> &[Vec<usize>] {
        &self.monomials
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Gram matrix of the pairing in monomial coordinates.
    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// Rows are the standard symplectic basis `p_1..p_m, q_1..q_m` in monomial coordinates.
    pub fn change_of_basis(&self) -> &Mat {
        &self.change
    }

    /// `W` in the standard symplectic basis.
    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    /// Monomial coordinates of `e_S` (indices from 0).
    pub fn monomial(&self, s: &[usize]) -> Option<Vec<Fe>> {
        let i = self.monomials.iter().position(|t| t.as_slice() == s)?;
        let mut v = vec![Fe::ZERO; self.dim()];
        v[i] = Fe::ONE;
        Some(v)
    }

    /// `(ω ∧ ζ)_n` for even `n`, `(ω ∧ ζ^∨)_n` for odd `n`; monomial coordinates.
    pub fn ext_form(&self, w: &[Fe], z: &[Fe]) -> Result<Fe> {
        let d = self.dim();
        if w.len() != d || z.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: w.len().max(z.len()) });
        }
        let k = &self.field;
        let gz = self.gram.mul_vec(z, k);
        Ok(w.iter().zip(&gz).fold(Fe::ZERO, |acc, (&a, &b)| k.add(acc, k.mul(a, b))))
    }

    /// Symplectic coordinates of a vector given in monomial coordinates.
    pub fn to_symplectic(&self, x: &[Fe]) -> Vec<Fe> {
        // the change matrix is a signed permutation, so its inverse is its transpose
        self.change.mul_vec(x, &self.field)
    }

    pub fn to_monomial(&self, y: &[Fe]) -> Vec<Fe> {
        self.change.vec_mul(y, &self.field)
    }

    /// `⊕ Λⁱg` in monomial coordinates; entry `(S, T)` is the minor `det g[S, T]`.
    pub fn wedge_matrix(&self, g: &Mat) -> Result<Mat> {
        let n = self.n;
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.rows() });
        }
        let k = &self.field;
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for (i, s) in self.monomials.iter().enumerate() {
            for (j, t) in self.monomials.iter().enumerate() {
                if s.len() != t.len() {
                    continue;
                }
                let r = s.len();
                let data = s.iter().flat_map(|&a| t.iter().map(move |&b| g[(a, b)])).collect();
                out[(i, j)] = Mat::from_vec(r, r, data)?.det(k);
            }
        }
        Ok(out)
    }

    /// A monomial-coordinate endomorphism expressed in the symplectic basis: `C M Cᵀ`.
    pub fn to_symplectic_mat(&self, mono: &Mat) -> Mat {
        let k = &self.field;
        self.change.mul(mono, k).mul(&self.change.transpose(), k)
    }

    /// `SL(V) → Sp(W)` in the symplectic basis.
    pub fn embed_sl(&self, g: &Mat) -> Result<SpElement> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: g.rows() });
        }
        if g.det(&self.field) != Fe::ONE {
            return Err(Error::NotUnimodular);
        }
        let mono = self.wedge_matrix(g)?;
        self.space.element(self.to_symplectic_mat(&mono))
    }

    /// Elementary transvections `E_ij(λ) = 1 + λ e_ij`, `i ≠ j`, `λ` over the prime-field basis.
    pub fn sl_generators(&self) -> Vec<Mat> {
        let k = &self.field;
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for lambda in k.prime_basis() {
                    let mut g = Mat::identity(n);
                    g[(i, j)] = lambda;
                    out.push(g);
                }
            }
        }
        out
    }
}

/// The Weil representation of `Sp(W)` restricted along [`ExtSpace::embed_sl`].
pub struct RestrictedRep {
    ext: Arc<ExtSpace>,
    rep: WeilRep,
    generators: Vec<Mat>,
    embedded: Vec<SpElement>,
}

impl RestrictedRep {
    /// Base point `⟨Q⟩`, the sum of the low exterior degrees.
    pub fn new(ext: Arc<ExtSpace>, psi: Psi) -> Result<Self> {
        let base = Lagrangian::q_frame(ext.space());
        Self::with_base(ext, psi, base)
    }

    pub fn with_base(ext: Arc<ExtSpace>, psi: Psi, base: Lagrangian) -> Result<Self> {
        let bundle = Arc::new(Bundle::new(ext.space().clone(), psi));
        let rep = WeilRep::new(bundle, base);
        let generators = ext.sl_generators();
        let embedded = generators.iter().map(|g| ext.embed_sl(g)).collect::<Result<Vec<_>>>()?;
        Ok(RestrictedRep { ext, rep, generators, embedded })
    }

    pub fn ext(&self) -> &Arc<ExtSpace> {
        &self.ext
    }

    pub fn rep(&self) -> &WeilRep {
        &self.rep
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn embedded_generators(&self) -> &[SpElement] {
        &self.embedded
    }

    /// `q^{D/2}`.
    pub fn fiber_dim(&self) -> usize {
        self.rep.dim()
    }

    /// `ρ(embed(g))`.
    pub fn rho_sl(&self, g: &Mat) -> Result<Arc<ScaledMatrix>> {
        Ok(self.rep.rho(&self.ext.embed_sl(g)?))
    }

    /// Basis (flattened `D × D` rows) of `{x ∈ End(W) : x h = h x}` over the embedded generators.
    pub fn centralizer_basis(&self) -> Vec<Mat> {
        let k = self.ext.field();
        let d = self.ext.dim();
        // row-major unknowns x_{ab}; (x h - h x)_{ij} = Σ_t x_{it} h_{tj} - h_{it} x_{tj}
        let mut eqs: Vec<Vec<Fe>> = Vec::new();
        for h in &self.embedded {
            let h = h.mat();
            for i in 0..d {
                for j in 0..d {
                    let mut row = vec![Fe::ZERO; d * d];
                    for t in 0..d {
                        row[i * d + t] = k.add(row[i * d + t], h[(t, j)]);
                        row[t * d + j] = k.sub(row[t * d + j], h[(i, t)]);
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        eqs.push(row);
                    }
                }
            }
        }
        let system = Mat::from_rows(&eqs, d * d).expect("rows of equal length");
        let null = system.nullspace(k);
        (0..null.rows()).map(|r| Mat::from_vec(d, d, null.row(r).to_vec()).expect("d*d entries")).collect()
    }

    /// Symplectic elements of the centralizer and their operators `Φ = γ_{L₀, φL₀} τ_φ`.
    ///
    /// All `q^{dim C}` elements are examined when that is at most `cap`; otherwise `cap` seeded
    /// random combinations are drawn and `exhaustive` is false.
    pub fn centralizer_intertwiners(&self, cap: usize, seed: u64) -> Result<Intertwiners> {
        let k = self.ext.field().clone();
        let basis = self.centralizer_basis();
        let dim_c = basis.len();
        let q = k.order() as u128;
        let total = (0..dim_c).try_fold(1u128, |acc, _| acc.checked_mul(q));
        let exhaustive = matches!(total, Some(t) if t <= cap as u128);

        let combine = |coeffs: &[Fe]| -> Mat {
            let d = self.ext.dim();
            basis.iter().zip(coeffs).fold(Mat::zeros(d, d), |acc, (b, &c)| acc.add(&b.scale(c, &k), &k))
        };
        let mut candidates: Vec<Vec<Fe>> = Vec::new();
        if exhaustive {
            candidates = crate::linalg::all_vectors(dim_c, &k);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..cap {
                candidates.push((0..dim_c).map(|_| Fe(rng.gen_range(0..k.order()))).collect());
            }
        }

        let space = self.ext.space();
        let mut phis: Vec<SpElement> = candidates
            .iter()
            .filter_map(|c| space.element(combine(c)).ok())
            .collect();
        phis.sort();
        phis.dedup();
        let operators = phis.iter().map(|phi| self.rep.rho(phi)).collect();
        Ok(Intertwiners { centralizer_dim: dim_c, exhaustive, phis, operators })
    }

    /// `Φ ρ(h) = λ ρ(h) Φ` with `|λ| = 1` for every generator `h`.
    pub fn intertwines(&self, phi: &ScaledMatrix) -> Result<bool> {
        for h in &self.embedded {
            let rh = self.rep.rho(h);
            let lhs = phi.scaled_mul(&rh)?;
            let rhs = rh.scaled_mul(phi)?;
            match proportionality(&lhs, &rhs) {
                Ok(lambda) => {
                    if (lambda.to_complex().norm() - 1.0).abs() > UNIT_TOL {
                        return Ok(false);
                    }
                }
                Err(Error::NotProportional) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    }

    /// Whether `c(h, h') = 1` for all ordered pairs of generators.
    pub fn cocycle_trivial_on_generators(&self) -> Result<bool> {
        for g in &self.embedded {
            for h in &self.embedded {
                if !is_one(&self.rep.cocycle(g, h)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Dimension, intertwiner span and commutant data for this restriction.
    pub fn commutant_report(&self, cap: usize, seed: u64) -> Result<SlReport> {
        let gens: Vec<Arc<ScaledMatrix>> = self.embedded.iter().map(|h| self.rep.rho(h)).collect();
        let commutant = commutant_dim(&gens.iter().map(|m| m.as_ref()).collect::<Vec<_>>())?;
        let tw = self.centralizer_intertwiners(cap, seed)?;
        let mut all_intertwine = true;
        for phi in &tw.operators {
            all_intertwine &= self.intertwines(phi)?;
        }
        let rows: Vec<Vec<Complex64>> = tw.operators.iter().map(|m| m.to_complex()).collect();
        let span = numeric_rank(&rows)?;
        if span < 1 || span > commutant {
            return Err(Error::InternalInconsistency(format!(
                "intertwiner span {span} outside [1, {commutant}]"
            )));
        }
        Ok(SlReport {
            n: self.ext.n(),
            q: self.ext.field().order(),
            d: self.ext.dim(),
            fiber_dim: self.fiber_dim(),
            commutant_dim: commutant,
            span_dim: span,
            ratio: span as f64 / commutant as f64,
            intertwiner_count: tw.phis.len(),
            centralizer_dim: tw.centralizer_dim,
            intertwiners_exhaustive: tw.exhaustive,
            intertwiners_equivariant: all_intertwine,
            cocycle_trivial_on_generators: self.cocycle_trivial_on_generators()?,
        })
    }
}

pub struct Intertwiners {
    pub centralizer_dim: usize,
    pub exhaustive: bool,
    pub phis: Vec<SpElement>,
    pub operators: Vec<Arc<ScaledMatrix>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlReport {
    pub n: usize,
    pub q: u32,
    #[serde(rename = "D")]
    pub d: usize,
    pub fiber_dim: usize,
    pub commutant_dim: usize,
    pub span_dim: usize,
    pub ratio: f64,
    pub intertwiner_count: usize,
    pub centralizer_dim: usize,
    pub intertwiners_exhaustive: bool,
    pub intertwiners_equivariant: bool,
    pub cocycle_trivial_on_generators: bool,
}

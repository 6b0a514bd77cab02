//! The projective Weil representation attached to a base lagrangian `L₀`.
//!
//! `ρ(g) = γ_{L₀, gL₀} ∘ τ_g` acts on `E_{L₀}`. It is projective: `ρ(g) ρ(h) = c(g, h) ρ(gh)`
//! with `|c| = 1`, and the scalar is kept as data rather than normalised away.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::bundle::Bundle;
use crate::cyclo::{CycInt, ScaledCyc, ScaledMatrix, NUMERIC_TOL};
use crate::error::{Error, Result};
use crate::gauss::{geometric_gauss, modulus_exponent};
use crate::lag::{act, Lagrangian};
use crate::symp::SpElement;

/// Singular values at or below this are treated as zero.
pub const RANK_TOL: f64 = 1e-7;

/// Singular values within this factor of [`RANK_TOL`] (either side) make the rank ambiguous.
const UNSTABLE_BAND: f64 = 100.0;

/// Largest dense residual system (entries) the numeric commutant solver will build.
const MAX_DENSE_ENTRIES: usize = 40_000_000;

pub struct WeilRep {
    bundle: Arc<Bundle>,
    base: Lagrangian,
    cache: RwLock<HashMap<SpElement, Arc<ScaledMatrix>>>,
}

/// Operator cocycle next to the Gauss-phase value for one pair.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleRecord {
    pub c_operator: ScaledCyc,
    pub c_gauss: ScaledCyc,
    /// `c_operator = S / |S|`.
    pub agree: bool,
    /// `c_operator = conj(S) / |S|`.
    pub agree_conjugate: bool,
}

impl WeilRep {
    pub fn new(bundle: Arc<Bundle>, base: Lagrangian) -> Self {
        WeilRep { bundle, base, cache: RwLock::new(HashMap::new()) }
    }

    pub fn bundle(&self) -> &Arc<Bundle> {
        &self.bundle
    }

    pub fn base(&self) -> &Lagrangian {
        &self.base
    }

    /// `q^m`.
    pub fn dim(&self) -> usize {
        self.bundle.fiber(&self.base).dim()
    }

    /// `ρ(g) = γ_{L₀, gL₀} τ_g`, cached.
    pub fn rho(&self, g: &SpElement) -> Arc<ScaledMatrix> {
        if let Some(m) = self.cache.read().unwrap().get(g) {
            return m.clone();
        }
        let space = self.bundle.space();
        let gl = act(space, g, &self.base);
        let tau = self.bundle.tau_matrix(g, &self.base);
        let m = Arc::new(self.bundle.gamma(&self.base, &gl).scaled_mul(&tau).expect("fiber dimensions agree"));
        self.cache.write().unwrap().entry(g.clone()).or_insert(m).clone()
    }

    /// The scalar `c` with `ρ(g) ρ(h) = c ρ(gh)`, read off the largest entry of `ρ(gh)` and then
    /// checked on every entry.
    pub fn cocycle(&self, g: &SpElement, h: &SpElement) -> Result<ScaledCyc> {
        let k = self.bundle.space().field();
        let gh = g.compose(h, k);
        let x = self.rho(g).scaled_mul(&self.rho(h))?;
        proportionality(&x, &self.rho(&gh))
    }

    /// `S_{L₀}(gL₀, ghL₀) / |S|`.
    pub fn gauss_cocycle(&self, g: &SpElement, h: &SpElement) -> ScaledCyc {
        let space = self.bundle.space();
        let k = space.field();
        let gl = act(space, g, &self.base);
        let ghl = act(space, &g.compose(h, k), &self.base);
        let s = geometric_gauss(space, self.bundle.psi(), &self.base, &gl, &ghl);
        let e = modulus_exponent(space, &self.base, &gl, &ghl);
        ScaledCyc::new(k.order(), s, -(e as i32))
    }

    pub fn cocycle_record(&self, g: &SpElement, h: &SpElement) -> Result<CocycleRecord> {
        let c_operator = self.cocycle(g, h)?;
        let c_gauss = self.gauss_cocycle(g, h);
        let agree = c_operator.eq_auto(&c_gauss, NUMERIC_TOL);
        let agree_conjugate = c_operator.eq_auto(&c_gauss.conj(), NUMERIC_TOL);
        Ok(CocycleRecord { c_operator, c_gauss, agree, agree_conjugate })
    }

    /// `c(g, h) c(gh, k) = c(g, hk) c(h, k)`.
    pub fn cocycle_identity_check(&self, g: &SpElement, h: &SpElement, l: &SpElement) -> Result<bool> {
        let k = self.bundle.space().field();
        let gh = g.compose(h, k);
        let hl = h.compose(l, k);
        let lhs = self.cocycle(g, h)?.mul(&self.cocycle(&gh, l)?);
        let rhs = self.cocycle(g, &hl)?.mul(&self.cocycle(h, l)?);
        Ok(lhs.eq_auto(&rhs, NUMERIC_TOL))
    }

    /// `trace ρ(g)` in `C`.
    pub fn character(&self, g: &SpElement) -> Complex64 {
        self.rho(g).trace_complex()
    }

    /// Commutant dimension of the operators `ρ(g)` for the given generators.
    pub fn commutant_dim(&self, generators: &[SpElement]) -> Result<usize> {
        let mats: Vec<Arc<ScaledMatrix>> = generators.iter().map(|g| self.rho(g)).collect();
        commutant_dim(&mats.iter().map(|m| m.as_ref()).collect::<Vec<_>>())
    }
}

/// The scalar `c` with `x = c · y`, checked on every entry.
pub fn proportionality(x: &ScaledMatrix, y: &ScaledMatrix) -> Result<ScaledCyc> {
    let c = extract_ratio(x, y)?;
    if x.eq_auto(&y.scale_by(&c)) {
        Ok(c)
    } else {
        Err(Error::NotProportional)
    }
}

/// `c` with `x = c · y`, read from the largest-modulus entry of `y`.
fn extract_ratio(x: &ScaledMatrix, y: &ScaledMatrix) -> Result<ScaledCyc> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, z) in y.entries.iter().enumerate() {
        let r = z.to_complex().norm();
        if r > best.map_or(1e-12, |b| b.1) {
            best = Some((idx, r));
        }
    }
    let (idx, _) = best.ok_or(Error::NotProportional)?;
    let (n, k) = y.entries[idx]
        .as_monomial()
        .ok_or_else(|| Error::InternalInconsistency("rho entry is not a scaled root of unity".into()))?;
    let q = y.q as i64;
    let (mut d, mut rest) = (0i32, n.abs());
    while rest > 1 && rest % q == 0 {
        rest /= q;
        d += 1;
    }
    if rest != 1 {
        return Err(Error::InternalInconsistency(format!("rho entry magnitude {n} is not a power of q")));
    }
    // x_ij / (±q^d ζ^k) = ± x_ij ζ^{-k} q^{-d}
    let p = y.p;
    let mut value = x.entries[idx].mul_root(p - k % p);
    if n < 0 {
        value = value.neg();
    }
    Ok(ScaledCyc::new(y.q, value, x.e - y.e - 2 * d))
}

/// A matrix with one nonzero entry `±n ζ^k` (fixed `|n|`) per column and row.
struct Monomial {
    // column j has its entry in row perm[j]
    perm: Vec<usize>,
    // phase of that entry as an exponent of ζ_{2p}
    phase: Vec<u32>,
}

fn as_monomial(m: &ScaledMatrix) -> Option<Monomial> {
    let n = m.rows;
    let p = m.p;
    let mut perm = vec![usize::MAX; n];
    let mut phase = vec![0u32; n];
    let mut seen_row = vec![false; n];
    let mut magnitude = None;
    for j in 0..n {
        for i in 0..n {
            let z = m.get(i, j);
            if z.is_zero() {
                continue;
            }
            if perm[j] != usize::MAX || seen_row[i] {
                return None;
            }
            let (c, k) = z.as_monomial()?;
            if *magnitude.get_or_insert(c.abs()) != c.abs() {
                return None;
            }
            perm[j] = i;
            seen_row[i] = true;
            phase[j] = (2 * k + if c < 0 { p } else { 0 }) % (2 * p);
        }
        if perm[j] == usize::MAX {
            return None;
        }
    }
    Some(Monomial { perm, phase })
}

/// Union-find over matrix positions with `ζ_{2p}` potentials: `X_u = ζ_{2p}^{pot[u]} X_root`.
struct PhaseUnionFind {
    parent: Vec<usize>,
    pot: Vec<u32>,
    broken: Vec<bool>,
    modulus: u32,
}

impl PhaseUnionFind {
    fn new(n: usize, modulus: u32) -> Self {
        PhaseUnionFind { parent: (0..n).collect(), pot: vec![0; n], broken: vec![false; n], modulus }
    }

    fn find(&mut self, u: usize) -> (usize, u32) {
        let mut path = Vec::new();
        let mut r = u;
        while self.parent[r] != r {
            path.push(r);
            r = self.parent[r];
        }
        // compress, accumulating potentials from the top down
        for &v in path.iter().rev() {
            let par = self.parent[v];
            if par != r {
                self.pot[v] = (self.pot[v] + self.pot[par]) % self.modulus;
            }
            self.parent[v] = r;
        }
        (r, self.pot[u] * (u != r) as u32)
    }

    /// Records `X_b = ζ_{2p}^w X_a`.
    fn relate(&mut self, a: usize, b: usize, w: u32) {
        let md = self.modulus;
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if (pa + w) % md != pb {
                self.broken[ra] = true;
            }
            return;
        }
        // pb X_rb = w pa X_ra  ⇒  X_rb = (w + pa - pb) X_ra
        self.parent[rb] = ra;
        self.pot[rb] = (w + pa + md - pb) % md;
        let merged = self.broken[ra] || self.broken[rb];
        self.broken[ra] = merged;
    }
}

/// Dimension of `{T : T M = M T for every M}` for square matrices acting on one space.
///
/// Monomial generators are handled exactly: `X M = M X` ties entries of `X` pairwise, so the
/// solutions are the orbit classes of matrix positions whose phase holonomy is trivial. Any
/// remaining generators are imposed numerically on that reduced space, one at a time, by
/// SVD with rank tolerance [`RANK_TOL`].
pub fn commutant_dim(mats: &[&ScaledMatrix]) -> Result<usize> {
    let Some(first) = mats.first() else {
        return Err(Error::Parse("commutant of an empty generator list".into()));
    };
    let n = first.rows;
    if mats.iter().any(|m| m.rows != n || m.cols != n) {
        return Err(Error::DimensionMismatch { expected: n, found: mats.iter().map(|m| m.rows).max().unwrap_or(0) });
    }
    let p = first.p;
    let modulus = 2 * p;
    let mut uf = PhaseUnionFind::new(n * n, modulus);
    let mut dense: Vec<&ScaledMatrix> = Vec::new();
    for m in mats {
        match as_monomial(m) {
            Some(mono) => {
                // X_{π(i), π(j)} = (α_i / α_j) X_{i, j}
                for i in 0..n {
                    for j in 0..n {
                        let w = (mono.phase[i] + modulus - mono.phase[j]) % modulus;
                        uf.relate(i * n + j, mono.perm[i] * n + mono.perm[j], w);
                    }
                }
            }
            None => dense.push(m),
        }
    }

    // consistent classes form the reduced basis
    let mut class_of_root: HashMap<usize, usize> = HashMap::new();
    let mut members: Vec<Vec<(usize, u32)>> = Vec::new();
    for u in 0..n * n {
        let (r, pot) = uf.find(u);
        if uf.broken[r] {
            continue;
        }
        let c = *class_of_root.entry(r).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[c].push((u, pot));
    }
    let s = members.len();
    if dense.is_empty() || s == 0 {
        return Ok(s);
    }
    if n * n * s > MAX_DENSE_ENTRIES {
        return Err(Error::TooLarge(n * n * s));
    }

    let unit = |e: u32| Complex64::from_polar(1.0, std::f64::consts::PI * e as f64 / p as f64);
    let basis: Vec<Vec<(usize, usize, Complex64)>> = members
        .iter()
        .map(|cls| {
            let norm = 1.0 / (cls.len() as f64).sqrt();
            cls.iter().map(|&(u, pot)| (u / n, u % n, unit(pot) * norm)).collect()
        })
        .collect();

    // columns of `kernel` span the current solution space in class coordinates
    let mut kernel = DMatrix::<Complex64>::identity(s, s);
    for m in dense {
        let a = m.to_complex();
        let mut residual = DMatrix::<Complex64>::zeros(n * n, s);
        for (c, entries) in basis.iter().enumerate() {
            let mut col = vec![Complex64::new(0.0, 0.0); n * n];
            for &(row, colx, v) in entries {
                // (X A)_{row, *} += v A_{colx, *};  (A X)_{*, colx} += v A_{*, row}
                for t in 0..n {
                    col[row * n + t] += v * a[colx * n + t];
                    col[t * n + colx] -= v * a[t * n + row];
                }
            }
            for (r, z) in col.into_iter().enumerate() {
                residual[(r, c)] = z;
            }
        }
        let reduced = residual * &kernel;
        let null = null_space(&reduced)?;
        if null.ncols() == 0 {
            return Ok(0);
        }
        kernel *= null;
    }
    Ok(kernel.ncols())
}

/// Orthonormal basis of the right null space, decided at [`RANK_TOL`].
fn null_space(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut z = DMatrix::<Complex64>::zeros(cols, cols);
        z.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        z
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    check_band(svd.singular_values.iter().copied())?;
    let null_rows: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= RANK_TOL).collect();
    let mut out = DMatrix::<Complex64>::zeros(cols, null_rows.len());
    for (c, &i) in null_rows.iter().enumerate() {
        for r in 0..cols {
            out[(r, c)] = vt[(i, r)].conj();
        }
    }
    Ok(out)
}

fn check_band(values: impl Iterator<Item = f64>) -> Result<()> {
    for s in values {
        if s > RANK_TOL / UNSTABLE_BAND && s < RANK_TOL * UNSTABLE_BAND {
            return Err(Error::RankUnstable(s));
        }
    }
    Ok(())
}

/// Numerical rank of a dense complex matrix at [`RANK_TOL`].
pub fn numeric_rank(rows: &[Vec<Complex64>]) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    let cols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let svd = m.svd(false, false);
    check_band(svd.singular_values.iter().copied())?;
    Ok(svd.singular_values.iter().filter(|&&s| s > RANK_TOL).count())
}

/// Exact scalar identity check helper: `value == 1`.
pub fn is_one(c: &ScaledCyc) -> bool {
    c.eq_auto(&ScaledCyc::new(c.q, CycInt::one(c.value.order()), 0), NUMERIC_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::Psi;
    use crate::galois::make_field;
    use crate::symp::{group_closure, SympSpace};

    fn rep(q: u64, m: usize) -> WeilRep {
        let k = make_field(q, 1).unwrap();
        let space = SympSpace::standard(&k, m);
        let base = Lagrangian::q_frame(&space);
        WeilRep::new(Arc::new(Bundle::new(space, Psi::standard(&k))), base)
    }

    #[test]
    fn rho_identity_and_dimension() {
        let r = rep(3, 1);
        let id = r.bundle().space().identity();
        assert!(r.rho(&id).eq_auto(&ScaledMatrix::identity(3, 3, 3)));
        assert!((r.character(&id) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(is_one(&r.cocycle(&id, &id).unwrap()));
    }

    #[test]
    fn stabilizer_elements_act_monomially() {
        let r = rep(3, 1);
        let space = r.bundle().space().clone();
        let group = group_closure(&space, &space.all_transvections(), 100).unwrap();
        let stab: Vec<&SpElement> = group.iter().filter(|g| act(&space, g, r.base()) == *r.base()).collect();
        assert_eq!(stab.len(), 6);
        for g in stab {
            assert!(as_monomial(&r.rho(g)).is_some());
        }
    }

    #[test]
    fn cocycle_with_inverse() {
        let r = rep(3, 1);
        let space = r.bundle().space().clone();
        let k = space.field().clone();
        let g = space.all_transvections()[2].compose(&space.all_transvections()[5], &k);
        let ginv = g.inverse(&k);
        let c = r.cocycle(&g, &ginv).unwrap();
        let prod = r.rho(&g).scaled_mul(&r.rho(&ginv)).unwrap();
        let id = ScaledMatrix::identity(3, 3, 3).scale_by(&c);
        assert!(prod.eq_auto(&id));
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        let r = rep(3, 1);
        let id = r.bundle().space().identity();
        assert_eq!(r.commutant_dim(&[id]).unwrap(), 9);
    }

    #[test]
    fn numeric_rank_flags_ambiguous_values() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(numeric_rank(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(1e-13)]]).unwrap(), 1);
        assert!(matches!(numeric_rank(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(1e-7)]]), Err(Error::RankUnstable(_))));
    }

    #[test]
    fn union_find_detects_holonomy() {
        let mut uf = PhaseUnionFind::new(3, 6);
        uf.relate(0, 1, 2);
        uf.relate(1, 2, 2);
        uf.relate(0, 2, 4);
        let (r, _) = uf.find(2);
        assert!(!uf.broken[r]);
        uf.relate(2, 0, 1);
        let (r, _) = uf.find(0);
        assert!(uf.broken[r]);
    }
}

//! The bundle of fibers `E_L` over the lagrangians, the action `τ` and the connection `Γ`.
//!
//! `E_L` is the space of functions on `W` with `f(x + y) = ψ(A(x, y)) f(x)` for `y ∈ L`. Such
//! a function is fixed by its values on a set of coset representatives of `W / L`; we use the
//! vectors supported on the non-pivot coordinates of `L`'s RREF, enumerated lexicographically
//! (first free coordinate most significant, field elements by index). The basis function `f_r`
//! is 1 at `r`, `ψ(A(r, y))` at `r + y` and 0 off `r + L`, so a matrix column lists the values
//! of the image function at the target representatives.
//!
//! The connection map `γ_{L',L}: E_L → E_{L'}` is
//! `(γ f)(ω) = (|L| |L ∩ L'|)^{-1/2} Σ_{ζ ∈ L'} ψ(-A(ω, ζ)) f(ω + ζ)`. Only the minus sign in the
//! kernel lands in `E_{L'}`; [`KernelSign::Plus`] is kept to exhibit the failure.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::cyclo::{CycInt, Labels, Psi, ScaledCyc, ScaledMatrix};
use crate::galois::{Fe, Field};
use crate::gauss::geometric_gauss;
use crate::lag::{act, meet_dim, meet_join, Lagrangian};
use crate::linalg::{all_vectors, complement_rows, span_elements};
use crate::symp::{SpElement, SympSpace};

/// Sign of the phase in the connection kernel `ψ(± A(ω, ζ))`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelSign {
    /// `ψ(-A(ω, ζ))`, the consistent choice.
    #[default]
    Minus,
    /// `ψ(+A(ω, ζ))`; images fail the fiber condition.
    Plus,
}

impl KernelSign {
    fn apply(self, k: &Field, x: Fe) -> Fe {
        match self {
            KernelSign::Minus => k.neg(x),
            KernelSign::Plus => x,
        }
    }
}

/// A lagrangian with its ordered coset representatives.
#[derive(Debug)]
pub struct Fiber {
    lagrangian: Lagrangian,
    free: Vec<usize>,
    reps: Vec<Vec<Fe>>,
    labels: Arc<Vec<Vec<u32>>>,
    q: usize,
}

impl Fiber {
    pub fn new(space: &SympSpace, l: &Lagrangian) -> Self {
        let k = space.field();
        let n = space.dim();
        let free: Vec<usize> = (0..n).filter(|c| !l.pivots().contains(c)).collect();
        let reps: Vec<Vec<Fe>> = all_vectors(free.len(), k)
            .into_iter()
            .map(|vals| {
                let mut v = vec![Fe::ZERO; n];
                for (&c, x) in free.iter().zip(vals) {
                    v[c] = x;
                }
                v
            })
            .collect();
        let labels = Arc::new(reps.iter().map(|r| r.iter().map(|x| x.index()).collect()).collect());
        Fiber { lagrangian: l.clone(), free, reps, labels, q: k.order() as usize }
    }

    pub fn lagrangian(&self) -> &Lagrangian {
        &self.lagrangian
    }

    /// `q^m`.
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Vec<Fe>] {
        &self.reps
    }

    pub fn labels(&self) -> Labels {
        Some(self.labels.clone())
    }

    /// Writes `w = r_i + y` with `y ∈ L`; returns `(i, y)`.
    pub fn decompose(&self, w: &[Fe], k: &Field) -> (usize, Vec<Fe>) {
        let y = self.lagrangian.component(w, k);
        // w - y vanishes on the pivots, so its free coordinates name the representative
        let idx = self
            .free
            .iter()
            .fold(0usize, |acc, &c| acc * self.q + k.sub(w[c], y[c]).index() as usize);
        (idx, y)
    }
}

/// The exponent `k` with `f_{r_x}(w) = ζ^k`, or `None` off the support.
fn basis_phase(space: &SympSpace, psi: &Psi, fiber: &Fiber, x: usize, w: &[Fe]) -> Option<u32> {
    let (i, y) = fiber.decompose(w, space.field());
    (i == x).then(|| psi.exponent(space.pair(&fiber.reps[x], &y)))
}

/// `f_x(w)` for the basis function attached to representative `x`.
pub fn evaluate_basis(space: &SympSpace, psi: &Psi, fiber: &Fiber, x: usize, w: &[Fe]) -> CycInt {
    let p = space.field().p();
    basis_phase(space, psi, fiber, x, w).map_or_else(|| CycInt::zero(p), |e| CycInt::root(p, e))
}

/// The bundle over all lagrangians of one space, with cached fibers and connection matrices.
pub struct Bundle {
    space: SympSpace,
    psi: Psi,
    sign: KernelSign,
    fibers: RwLock<HashMap<Lagrangian, Arc<Fiber>>>,
    gammas: RwLock<HashMap<(Lagrangian, Lagrangian), Arc<ScaledMatrix>>>,
}

impl Bundle {
    pub fn new(space: SympSpace, psi: Psi) -> Self {
        Self::with_sign(space, psi, KernelSign::Minus)
    }

    pub fn with_sign(space: SympSpace, psi: Psi, sign: KernelSign) -> Self {
        Bundle { space, psi, sign, fibers: RwLock::new(HashMap::new()), gammas: RwLock::new(HashMap::new()) }
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn psi(&self) -> &Psi {
        &self.psi
    }

    pub fn sign(&self) -> KernelSign {
        self.sign
    }

    fn p(&self) -> u32 {
        self.space.field().p()
    }

    fn q(&self) -> u32 {
        self.space.field().order()
    }

    pub fn fiber(&self, l: &Lagrangian) -> Arc<Fiber> {
        if let Some(f) = self.fibers.read().unwrap().get(l) {
            return f.clone();
        }
        let f = Arc::new(Fiber::new(&self.space, l));
        self.fibers.write().unwrap().entry(l.clone()).or_insert(f).clone()
    }

    /// `f_x(w)` in the fiber over `l`.
    pub fn evaluate_basis(&self, l: &Lagrangian, x: usize, w: &[Fe]) -> CycInt {
        evaluate_basis(&self.space, &self.psi, &self.fiber(l), x, w)
    }

    /// Matrix of `τ_g: E_L → E_{gL}`, `(τ_g f)(x) = f(g⁻¹ x)`.
    pub fn tau_matrix(&self, g: &SpElement, l: &Lagrangian) -> ScaledMatrix {
        let k = self.space.field();
        let gl = act(&self.space, g, l);
        let from = self.fiber(l);
        let to = self.fiber(&gl);
        let ginv = g.inverse(k);
        let n = from.dim();
        let mut out = ScaledMatrix::zeros(self.p(), self.q(), n, n).with_labels(to.labels(), from.labels());
        for (i, r) in to.reps().iter().enumerate() {
            let w = ginv.apply(r, k);
            let (j, y) = from.decompose(&w, k);
            let e = self.psi.exponent(self.space.pair(&from.reps[j], &y));
            out.set(i, j, CycInt::root(self.p(), e));
        }
        out
    }

    /// Cached `γ_{to, from}`.
    pub fn gamma(&self, to: &Lagrangian, from: &Lagrangian) -> Arc<ScaledMatrix> {
        let key = (to.clone(), from.clone());
        if let Some(g) = self.gammas.read().unwrap().get(&key) {
            return g.clone();
        }
        let g = Arc::new(self.gamma_matrix(to, from));
        self.gammas.write().unwrap().entry(key).or_insert(g).clone()
    }

    /// Matrix of `γ_{to, from}: E_from → E_to`, with scale exponent `-(m + d)` where
    /// `d = dim(from ∩ to)`.
    ///
    /// For the minus kernel the defining sum collapses: the terms with `r' + ζ ∈ r + L` form a
    /// coset of `L ∩ L'` along which the phase is constant, so each nonzero entry is
    /// `q^d ψ(A(r, y₀) - A(r', ζ₀))` where `r - r' = ζ₀ - y₀`, `ζ₀ ∈ L'`, `y₀ ∈ L`.
    pub fn gamma_matrix(&self, to: &Lagrangian, from: &Lagrangian) -> ScaledMatrix {
        if self.sign == KernelSign::Plus {
            return self.gamma_matrix_raw(to, from);
        }
        let k = self.space.field();
        let m = self.space.m();
        let fto = self.fiber(to);
        let ffrom = self.fiber(from);
        let mj = meet_join(k, from, to);
        let d = mj.meet_dim;
        let transversal = complement_rows(from.basis(), &mj.meet, k);
        let shifts = span_elements(&transversal, k);
        let n = ffrom.dim();
        let weight = (self.q() as i64).pow(d as u32);
        let mut out = ScaledMatrix::zeros(self.p(), self.q(), n, n).with_labels(fto.labels(), ffrom.labels());
        for (j, r) in ffrom.reps().iter().enumerate() {
            for y0 in &shifts {
                let w: Vec<Fe> = r.iter().zip(y0).map(|(&a, &b)| k.add(a, b)).collect();
                let (i, zeta0) = fto.decompose(&w, k);
                let rp = &fto.reps()[i];
                let phase = k.sub(self.space.pair(r, y0), self.space.pair(rp, &zeta0));
                out.set(i, j, CycInt::monomial(self.p(), weight, self.psi.exponent(phase)));
            }
        }
        out.e = -((m + d) as i32);
        out
    }

    /// `γ_{to, from}` from the raw `|L'|`-term sum, honouring the kernel sign.
    pub fn gamma_matrix_raw(&self, to: &Lagrangian, from: &Lagrangian) -> ScaledMatrix {
        let k = self.space.field();
        let m = self.space.m();
        let d = meet_dim(k, from, to);
        let fto = self.fiber(to);
        let ffrom = self.fiber(from);
        let zetas = span_elements(to.basis(), k);
        let n = ffrom.dim();
        let p = self.p();
        let mut out = ScaledMatrix::zeros(p, self.q(), n, n).with_labels(fto.labels(), ffrom.labels());
        for (i, rp) in fto.reps().iter().enumerate() {
            let mut rows = vec![vec![0i64; p as usize]; n];
            for zeta in &zetas {
                let w: Vec<Fe> = rp.iter().zip(zeta).map(|(&a, &b)| k.add(a, b)).collect();
                let (j, y) = ffrom.decompose(&w, k);
                let kernel = self.psi.exponent(self.sign.apply(k, self.space.pair(rp, zeta)));
                let value = self.psi.exponent(self.space.pair(&ffrom.reps()[j], &y));
                rows[j][((kernel + value) % p) as usize] += 1;
            }
            for (j, counts) in rows.iter().enumerate() {
                out.set(i, j, CycInt::from_cyclic(p, counts));
            }
        }
        out.e = -((m + d) as i32);
        out
    }

    /// `(γ_{to, from} f)(ω)` for `f = Σ_j coeffs[j] f_{r_j} ∈ E_from`, evaluated straight from
    /// the defining sum at an arbitrary point and without the scale factor.
    pub fn apply_gamma_raw(&self, to: &Lagrangian, from: &Lagrangian, coeffs: &[CycInt], omega: &[Fe]) -> CycInt {
        let k = self.space.field();
        let ffrom = self.fiber(from);
        let p = self.p();
        let mut acc = CycInt::zero(p);
        for zeta in span_elements(to.basis(), k) {
            let w: Vec<Fe> = omega.iter().zip(&zeta).map(|(&a, &b)| k.add(a, b)).collect();
            let (j, y) = ffrom.decompose(&w, k);
            if coeffs[j].is_zero() {
                continue;
            }
            let kernel = self.psi.exponent(self.sign.apply(k, self.space.pair(omega, &zeta)));
            let value = self.psi.exponent(self.space.pair(&ffrom.reps()[j], &y));
            acc = acc.add(&coeffs[j].mul_root(kernel + value));
        }
        acc
    }

    /// Whether a function on `W` satisfies `F(ω + η) = ψ(A(ω, η)) F(ω)` for all `ω ∈ W`,
    /// `η ∈ L`.
    pub fn is_section(&self, l: &Lagrangian, f: impl Fn(&[Fe]) -> CycInt) -> bool {
        let k = self.space.field();
        let points = all_vectors(self.space.dim(), k);
        let values: HashMap<&[Fe], CycInt> = points.iter().map(|w| (w.as_slice(), f(w))).collect();
        let etas = span_elements(l.basis(), k);
        points.iter().all(|w| {
            etas.iter().all(|eta| {
                let shifted: Vec<Fe> = w.iter().zip(eta).map(|(&a, &b)| k.add(a, b)).collect();
                let expect = values[w.as_slice()].mul_root(self.psi.exponent(self.space.pair(w, eta)));
                values[shifted.as_slice()] == expect
            })
        })
    }

    /// `μ(L2, L1, L0) = |L2 ∩ L1|^{1/2} (|L0 ∩ L2| |L1 ∩ L0| |L0|)^{-1/2} S_{L0}(L1, L2)`,
    /// the scalar with `γ_{L2,L1} γ_{L1,L0} = μ γ_{L2,L0}`.
    pub fn multiplier(&self, l2: &Lagrangian, l1: &Lagrangian, l0: &Lagrangian) -> ScaledCyc {
        let k = self.space.field();
        let m = self.space.m() as i32;
        let d21 = meet_dim(k, l2, l1) as i32;
        let d02 = meet_dim(k, l0, l2) as i32;
        let d10 = meet_dim(k, l1, l0) as i32;
        let s = geometric_gauss(&self.space, &self.psi, l0, l1, l2);
        ScaledCyc::new(self.q(), s, d21 - d02 - d10 - m)
    }

    /// Checks `γ_{L2,L1} γ_{L1,L0} = μ(L2, L1, L0) γ_{L2,L0}`.
    pub fn composition_law_holds(&self, l2: &Lagrangian, l1: &Lagrangian, l0: &Lagrangian) -> bool {
        let lhs = self.gamma(l2, l1).scaled_mul(&self.gamma(l1, l0)).expect("fiber dimensions agree");
        let rhs = self.gamma(l2, l0).scale_by(&self.multiplier(l2, l1, l0));
        lhs.eq_auto(&rhs)
    }

    /// Checks `τ_g γ_{to,from} = γ_{g to, g from} τ_g`.
    pub fn equivariance_holds(&self, g: &SpElement, to: &Lagrangian, from: &Lagrangian) -> bool {
        let gto = act(&self.space, g, to);
        let gfrom = act(&self.space, g, from);
        let lhs = self.tau_matrix(g, to).scaled_mul(&self.gamma(to, from)).expect("shapes agree");
        let rhs = self.gamma(&gto, &gfrom).scaled_mul(&self.tau_matrix(g, from)).expect("shapes agree");
        lhs.eq_auto(&rhs)
    }

    /// Applies `γ_{to,from}` to each basis function of `E_from` by the raw sum and checks that
    /// every image satisfies the covariance condition of `E_to`.
    pub fn gamma_images_are_sections(&self, to: &Lagrangian, from: &Lagrangian) -> bool {
        let p = self.p();
        let n = self.fiber(from).dim();
        (0..n).all(|j| {
            let mut coeffs = vec![CycInt::zero(p); n];
            coeffs[j] = CycInt::one(p);
            self.is_section(to, |w| self.apply_gamma_raw(to, from, &coeffs, w))
        })
    }
}

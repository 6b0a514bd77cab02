//! Serializable verification cases, suite generation and parallel execution.
//!
//! A [`Case`] carries all of its inputs as plain integer matrices, so together with a [`Setup`]
//! it is a self-contained, replayable counterexample. Suites run their cases on the rayon pool
//! and report in generation order, which is the canonical order.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, KernelSign};
use crate::cyclo::{Psi, ScaledMatrix};
use crate::error::{Error, Result};
use crate::galois::{field_of_order, Fe, Field};
use crate::gauss::{
    classical_gauss, gauss_via_coords, gauss_via_reduction, geometric_gauss, modulus_exponent, modulus_exponent_coords,
};
use crate::lag::{act, act_coords, enumerate_lagrangians, from_coords, meet_dim, to_coords, LagCoords, Lagrangian};
use crate::linalg::Mat;
use crate::symp::{group_closure, sp_order, SpElement, SympSpace};
use crate::weil::WeilRep;

pub const SCHEMA: u32 = 1;

/// Groups up to this order are enumerated; larger ones are sampled by random words.
pub const CLOSURE_LIMIT: u128 = 60_000;

/// A field element on the wire: its integer for a prime field, its coefficient list otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireEntry {
    Prime(u32),
    Ext(Vec<u32>),
}

pub type WireMatrix = Vec<Vec<WireEntry>>;

pub fn encode_fe(k: &Field, x: Fe) -> WireEntry {
    if k.degree() == 1 {
        WireEntry::Prime(x.index())
    } else {
        WireEntry::Ext(k.coeffs(x))
    }
}

pub fn decode_fe(k: &Field, w: &WireEntry) -> Result<Fe> {
    match w {
        WireEntry::Prime(i) if k.degree() == 1 => k.element(*i),
        WireEntry::Prime(i) => Err(Error::Parse(format!("expected a coefficient list over F_{}, found {i}", k.order()))),
        WireEntry::Ext(c) => k.from_coeffs(c),
    }
}

pub fn encode_mat(k: &Field, m: &Mat) -> WireMatrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&x| encode_fe(k, x)).collect()).collect()
}

pub fn decode_mat(k: &Field, w: &WireMatrix, cols: usize) -> Result<Mat> {
    let rows = w
        .iter()
        .map(|r| {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            r.iter().map(|e| decode_fe(k, e)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Mat::from_rows(&rows, cols)
}

/// Parameters of one run; `base` is `(a, b)` with `L₀ = L_{a,b}`, default `⟨Q⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub q: u64,
    pub m: usize,
    #[serde(default = "default_psi_scale")]
    pub psi_scale: u32,
    #[serde(default)]
    pub base: Option<(WireMatrix, WireMatrix)>,
    #[serde(default)]
    pub kernel_sign: KernelSign,
}

fn default_psi_scale() -> u32 {
    1
}

impl Setup {
    pub fn new(q: u64, m: usize) -> Self {
        Setup { q, m, psi_scale: 1, base: None, kernel_sign: KernelSign::Minus }
    }
}

/// Everything a case needs, built once per run.
pub struct Context {
    pub setup: Setup,
    pub field: Field,
    pub space: SympSpace,
    pub bundle: Arc<Bundle>,
    pub rep: WeilRep,
}

impl Context {
    pub fn new(setup: &Setup) -> Result<Self> {
        let field = field_of_order(setup.q)?;
        if setup.m == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let space = SympSpace::standard(&field, setup.m);
        let psi = Psi::scaled(&field, field.element(setup.psi_scale)?)?;
        let bundle = Arc::new(Bundle::with_sign(space.clone(), psi, setup.kernel_sign));
        let base = match &setup.base {
            None => Lagrangian::q_frame(&space),
            Some((a, b)) => {
                let c = LagCoords { a: decode_mat(&field, a, setup.m)?, b: decode_mat(&field, b, setup.m)? };
                from_coords(&space, &c)?
            }
        };
        let rep = WeilRep::new(bundle.clone(), base);
        Ok(Context { setup: setup.clone(), field, space, bundle, rep })
    }

    pub fn lag(&self, w: &WireMatrix) -> Result<Lagrangian> {
        Lagrangian::new(&self.space, &decode_mat(&self.field, w, self.space.dim())?)
    }

    pub fn elem(&self, w: &WireMatrix) -> Result<SpElement> {
        self.space.element(decode_mat(&self.field, w, self.space.dim())?)
    }

    pub fn wire_lag(&self, l: &Lagrangian) -> WireMatrix {
        encode_mat(&self.field, l.basis())
    }

    pub fn wire_elem(&self, g: &SpElement) -> WireMatrix {
        encode_mat(&self.field, g.mat())
    }

    /// The whole group when it is small, else `None`.
    pub fn group(&self) -> Option<Vec<SpElement>> {
        if sp_order(self.field.order() as u64, self.space.m() as u32) > CLOSURE_LIMIT {
            return None;
        }
        group_closure(&self.space, &self.space.all_transvections(), CLOSURE_LIMIT as usize).ok()
    }

    /// A random product of transvections.
    pub fn random_element(&self, rng: &mut impl Rng, transvections: &[SpElement]) -> SpElement {
        let len = 8 * self.space.m() + 4;
        (0..len).fold(self.space.identity(), |acc, _| {
            acc.compose(transvections.choose(rng).expect("nonempty"), &self.field)
        })
    }
}

/// One checkable identity with all of its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Case {
    /// `γ_{L,L} = Id`.
    GammaIdentity { l: WireMatrix },
    /// `γ_{L,L'} γ_{L',L} = Id`.
    GammaInverse { l: WireMatrix, l1: WireMatrix },
    /// `γ_{L2,L1} γ_{L1,L0} = μ(L2, L1, L0) γ_{L2,L0}`.
    Composition { l2: WireMatrix, l1: WireMatrix, l0: WireMatrix },
    /// Every column of `γ_{to,from}` is a section of `E_to`.
    Membership { to: WireMatrix, from: WireMatrix },
    /// `τ_g γ_{to,from} = γ_{g to, g from} τ_g`.
    Equivariance { g: WireMatrix, to: WireMatrix, from: WireMatrix },
    /// `τ(gh, L) = τ(g, hL) τ(h, L)`.
    TauComposition { g: WireMatrix, h: WireMatrix, l: WireMatrix },
    /// `from_coords(to_coords(L)) = L`.
    CoordsRoundTrip { l: WireMatrix },
    /// `act_coords` agrees with `act`.
    ActCoords { g: WireMatrix, l: WireMatrix },
    /// Direct and reduced Gauss sums agree, and the general modulus law holds.
    GaussTriple { l: WireMatrix, l1: WireMatrix, l2: WireMatrix },
    /// `S_L(⟨P⟩, ⟨Q⟩) = S(a bᵀ)` three ways, and the standard modulus law holds.
    GaussStandard { l: WireMatrix },
    /// Operator cocycle against `S_{L₀}(gL₀, ghL₀)`.
    Cocycle { g: WireMatrix, h: WireMatrix },
    /// `c(g,h) c(gh,k) = c(g,hk) c(h,k)`.
    CocycleIdentity { g: WireMatrix, h: WireMatrix, k: WireMatrix },
    /// `ρ(g)` is unitary; for `g = 1` also `ρ(1) = Id`.
    Unitary { g: WireMatrix },
}

/// Result of one case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    /// For cocycle cases: whether `c = S / |S|` literally.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub literal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Verdict {
    fn of(pass: bool) -> Self {
        Verdict { pass, literal: None, error: None }
    }
}

impl Case {
    pub fn check(&self, ctx: &Context) -> Verdict {
        match self.try_check(ctx) {
            Ok(v) => v,
            Err(e) => Verdict { pass: false, literal: None, error: Some(e.to_string()) },
        }
    }

    fn try_check(&self, ctx: &Context) -> Result<Verdict> {
        let k = &ctx.field;
        let b = &ctx.bundle;
        let space = &ctx.space;
        let p = k.p();
        let q = k.order();
        Ok(match self {
            Case::GammaIdentity { l } => {
                let l = ctx.lag(l)?;
                let n = b.fiber(&l).dim();
                Verdict::of(b.gamma(&l, &l).eq_auto(&ScaledMatrix::identity(p, q, n)))
            }
            Case::GammaInverse { l, l1 } => {
                let (l, l1) = (ctx.lag(l)?, ctx.lag(l1)?);
                let prod = b.gamma(&l, &l1).scaled_mul(&b.gamma(&l1, &l))?;
                Verdict::of(prod.eq_auto(&ScaledMatrix::identity(p, q, prod.rows)))
            }
            Case::Composition { l2, l1, l0 } => {
                let (l2, l1, l0) = (ctx.lag(l2)?, ctx.lag(l1)?, ctx.lag(l0)?);
                Verdict::of(b.composition_law_holds(&l2, &l1, &l0))
            }
            Case::Membership { to, from } => Verdict::of(b.gamma_images_are_sections(&ctx.lag(to)?, &ctx.lag(from)?)),
            Case::Equivariance { g, to, from } => {
                Verdict::of(b.equivariance_holds(&ctx.elem(g)?, &ctx.lag(to)?, &ctx.lag(from)?))
            }
            Case::TauComposition { g, h, l } => {
                let (g, h, l) = (ctx.elem(g)?, ctx.elem(h)?, ctx.lag(l)?);
                let hl = act(space, &h, &l);
                let lhs = b.tau_matrix(&g.compose(&h, k), &l);
                let rhs = b.tau_matrix(&g, &hl).scaled_mul(&b.tau_matrix(&h, &l))?;
                Verdict::of(lhs == rhs)
            }
            Case::CoordsRoundTrip { l } => {
                let l = ctx.lag(l)?;
                Verdict::of(from_coords(space, &to_coords(space, &l)?)? == l)
            }
            Case::ActCoords { g, l } => {
                let (g, l) = (ctx.elem(g)?, ctx.lag(l)?);
                let via = from_coords(space, &act_coords(space, &g, &to_coords(space, &l)?)?)?;
                Verdict::of(via == act(space, &g, &l))
            }
            Case::GaussTriple { l, l1, l2 } => {
                let (l, l1, l2) = (ctx.lag(l)?, ctx.lag(l1)?, ctx.lag(l2)?);
                let psi = b.psi();
                let s = geometric_gauss(space, psi, &l, &l1, &l2);
                let reduced = gauss_via_reduction(space, psi, &l, &l1, &l2)?;
                // |S|² |L''∩L'| = |L∩L''| |L'∩L| |L|
                let qq = q as i64;
                let lhs = s.norm_sq().scale(qq.pow(meet_dim(k, &l2, &l1) as u32));
                let rhs = qq.pow((meet_dim(k, &l, &l2) + meet_dim(k, &l1, &l) + space.m()) as u32);
                let exponent_ok = s.norm_sq().as_integer() == Some(qq.pow(modulus_exponent(space, &l, &l1, &l2)));
                Verdict::of(s == reduced && lhs.as_integer() == Some(rhs) && exponent_ok)
            }
            Case::GaussStandard { l } => {
                let l = ctx.lag(l)?;
                let psi = b.psi();
                let c = to_coords(space, &l)?;
                let s = geometric_gauss(space, psi, &l, &Lagrangian::p_frame(space), &Lagrangian::q_frame(space));
                let via = gauss_via_coords(space, psi, &c)?;
                let classical = classical_gauss(k, psi, &c.symmetric_product(k))?;
                let expected = (q as i64).pow(modulus_exponent_coords(k, &c));
                Verdict::of(s == via && via == classical && s.norm_sq().as_integer() == Some(expected))
            }
            Case::Cocycle { g, h } => {
                let r = ctx.rep.cocycle_record(&ctx.elem(g)?, &ctx.elem(h)?)?;
                Verdict { pass: r.agree_conjugate, literal: Some(r.agree), error: None }
            }
            Case::CocycleIdentity { g, h, k: l } => {
                Verdict::of(ctx.rep.cocycle_identity_check(&ctx.elem(g)?, &ctx.elem(h)?, &ctx.elem(l)?)?)
            }
            Case::Unitary { g } => {
                let g = ctx.elem(g)?;
                let r = ctx.rep.rho(&g);
                let id_ok = !g.is_identity() || r.eq_auto(&ScaledMatrix::identity(p, q, r.rows));
                Verdict::of(r.is_unitary() && id_ok)
            }
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Connection,
    Membership,
    Equivariance,
    Lagrangians,
    Gauss,
    Cocycle,
    CocycleIdentity,
    Unitarity,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Connection,
        Suite::Membership,
        Suite::Equivariance,
        Suite::Lagrangians,
        Suite::Gauss,
        Suite::Cocycle,
        Suite::CocycleIdentity,
        Suite::Unitarity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Connection => "connection",
            Suite::Membership => "membership",
            Suite::Equivariance => "equivariance",
            Suite::Lagrangians => "lagrangians",
            Suite::Gauss => "gauss",
            Suite::Cocycle => "cocycle",
            Suite::CocycleIdentity => "cocycle-identity",
            Suite::Unitarity => "unitarity",
        }
    }

    fn tag(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64 + 1
    }
}

/// All `arity`-tuples of `items` when there are at most `samples`, else `samples` uniform draws.
pub fn tuples<T: Clone>(items: &[T], arity: usize, samples: usize, rng: &mut impl Rng) -> (Vec<Vec<T>>, bool) {
    let n = items.len();
    let total = (0..arity).try_fold(1usize, |acc, _| acc.checked_mul(n));
    match total {
        Some(t) if t <= samples => {
            let mut out = Vec::with_capacity(t);
            for mut idx in 0..t {
                let mut tuple = Vec::with_capacity(arity);
                for _ in 0..arity {
                    tuple.push(items[idx % n].clone());
                    idx /= n;
                }
                tuple.reverse();
                out.push(tuple);
            }
            (out, true)
        }
        _ => {
            let out = (0..samples).map(|_| (0..arity).map(|_| items[rng.gen_range(0..n)].clone()).collect()).collect();
            (out, false)
        }
    }
}

/// Group elements for sampling: the whole group when small, else `size` random words.
pub struct Pool {
    pub elements: Vec<SpElement>,
    pub whole_group: bool,
}

impl Pool {
    pub fn new(ctx: &Context, rng: &mut impl Rng, size: usize) -> Pool {
        match ctx.group() {
            Some(elements) => Pool { elements, whole_group: true },
            None => {
                let tv = ctx.space.all_transvections();
                let elements = (0..size).map(|_| ctx.random_element(rng, &tv)).collect();
                Pool { elements, whole_group: false }
            }
        }
    }
}

/// The cases of a suite, in canonical order, and whether they are exhaustive.
pub fn suite_cases(ctx: &Context, suite: Suite, samples: usize, seed: u64) -> (Vec<Case>, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ suite.tag());
    let lags = enumerate_lagrangians(&ctx.space);
    let wl = |l: &Lagrangian| ctx.wire_lag(l);
    let we = |g: &SpElement| ctx.wire_elem(g);
    match suite {
        Suite::Connection => {
            let mut cases: Vec<Case> = lags.iter().map(|l| Case::GammaIdentity { l: wl(l) }).collect();
            let (pairs, ex2) = tuples(&lags, 2, samples, &mut rng);
            cases.extend(pairs.iter().map(|t| Case::GammaInverse { l: wl(&t[0]), l1: wl(&t[1]) }));
            let (triples, ex3) = tuples(&lags, 3, samples, &mut rng);
            cases.extend(triples.iter().map(|t| Case::Composition { l2: wl(&t[0]), l1: wl(&t[1]), l0: wl(&t[2]) }));
            (cases, ex2 && ex3)
        }
        Suite::Membership => {
            // each case evaluates on all of W, so the budget is smaller
            let budget = samples.min(200);
            let (pairs, ex) = tuples(&lags, 2, budget, &mut rng);
            (pairs.iter().map(|t| Case::Membership { to: wl(&t[0]), from: wl(&t[1]) }).collect(), ex)
        }
        Suite::Equivariance => {
            let pool = Pool::new(ctx, &mut rng, 20);
            let gs: Vec<SpElement> = (0..20).map(|_| pool.elements.choose(&mut rng).unwrap().clone()).collect();
            let (pairs, ex) = tuples(&lags, 2, samples / 20, &mut rng);
            let mut cases = Vec::new();
            for g in &gs {
                for t in &pairs {
                    cases.push(Case::Equivariance { g: we(g), to: wl(&t[0]), from: wl(&t[1]) });
                }
            }
            let (tau, _) = tuples(&pool.elements, 2, 500.min(samples), &mut rng);
            for t in tau {
                let l = lags.choose(&mut rng).unwrap();
                cases.push(Case::TauComposition { g: we(&t[0]), h: we(&t[1]), l: wl(l) });
            }
            (cases, ex)
        }
        Suite::Lagrangians => {
            let mut cases: Vec<Case> = lags.iter().map(|l| Case::CoordsRoundTrip { l: wl(l) }).collect();
            let pool = Pool::new(ctx, &mut rng, samples);
            let total = pool.elements.len().saturating_mul(lags.len());
            let exhaustive = pool.whole_group && total <= samples;
            if exhaustive {
                for g in &pool.elements {
                    for l in &lags {
                        cases.push(Case::ActCoords { g: we(g), l: wl(l) });
                    }
                }
            } else {
                for _ in 0..samples {
                    let g = pool.elements.choose(&mut rng).unwrap();
                    let l = lags.choose(&mut rng).unwrap();
                    cases.push(Case::ActCoords { g: we(g), l: wl(l) });
                }
            }
            (cases, exhaustive)
        }
        Suite::Gauss => {
            let mut cases: Vec<Case> = lags.iter().map(|l| Case::GaussStandard { l: wl(l) }).collect();
            let (triples, ex) = tuples(&lags, 3, samples, &mut rng);
            cases.extend(triples.iter().map(|t| Case::GaussTriple { l: wl(&t[0]), l1: wl(&t[1]), l2: wl(&t[2]) }));
            (cases, ex)
        }
        Suite::Cocycle => {
            let pool = Pool::new(ctx, &mut rng, samples);
            let (pairs, ex) = tuples(&pool.elements, 2, samples, &mut rng);
            (pairs.iter().map(|t| Case::Cocycle { g: we(&t[0]), h: we(&t[1]) }).collect(), ex && pool.whole_group)
        }
        Suite::CocycleIdentity => {
            let pool = Pool::new(ctx, &mut rng, samples);
            let (triples, ex) = tuples(&pool.elements, 3, samples, &mut rng);
            let cases = triples.iter().map(|t| Case::CocycleIdentity { g: we(&t[0]), h: we(&t[1]), k: we(&t[2]) });
            (cases.collect(), ex && pool.whole_group)
        }
        Suite::Unitarity => {
            let pool = Pool::new(ctx, &mut rng, samples);
            let (singles, ex) = tuples(&pool.elements, 1, samples, &mut rng);
            let mut cases = vec![Case::Unitary { g: we(&ctx.space.identity()) }];
            cases.extend(singles.iter().map(|t| Case::Unitary { g: we(&t[0]) }));
            (cases, ex && pool.whole_group)
        }
    }
}

/// A failing case with the setup needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub schema: u32,
    pub setup: Setup,
    pub suite: Suite,
    pub case: Case,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub passed: usize,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub literal_agree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Counterexample>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }
}

/// Runs cases in parallel; the report follows the order of `cases`.
pub fn run_cases(ctx: &Context, suite: Suite, cases: Vec<Case>, exhaustive: bool) -> SuiteReport {
    let verdicts: Vec<Verdict> = cases.par_iter().map(|c| c.check(ctx)).collect();
    let passed = verdicts.iter().filter(|v| v.pass).count();
    let literal = verdicts.iter().any(|v| v.literal.is_some());
    let literal_agree = literal.then(|| verdicts.iter().filter(|v| v.literal == Some(true)).count());
    let first_failure = verdicts.iter().position(|v| !v.pass).map(|i| Counterexample {
        schema: SCHEMA,
        setup: ctx.setup.clone(),
        suite,
        case: cases[i].clone(),
        verdict: verdicts[i].clone(),
    });
    SuiteReport { suite, cases: cases.len(), passed, exhaustive, literal_agree, first_failure }
}

pub fn run_suite(ctx: &Context, suite: Suite, samples: usize, seed: u64) -> SuiteReport {
    let (cases, exhaustive) = suite_cases(ctx, suite, samples, seed);
    run_cases(ctx, suite, cases, exhaustive)
}

/// Re-checks a stored counterexample.
pub fn replay(cx: &Counterexample) -> Result<Verdict> {
    let ctx = Context::new(&cx.setup)?;
    Ok(cx.case.check(&ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_round_trip() {
        let k = field_of_order(9).unwrap();
        let m = Mat::from_vec(1, 2, vec![Fe(4), Fe(7)]).unwrap();
        let w = encode_mat(&k, &m);
        assert_eq!(w[0][0], WireEntry::Ext(vec![1, 1]));
        assert_eq!(decode_mat(&k, &w, 2).unwrap(), m);
        let k3 = field_of_order(3).unwrap();
        assert!(decode_mat(&k3, &vec![vec![WireEntry::Prime(3)]], 1).is_err());
    }

    #[test]
    fn tuples_exhaustive_in_lex_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (t, ex) = tuples(&[0, 1, 2], 2, 100, &mut rng);
        assert!(ex);
        assert_eq!(t[0], vec![0, 0]);
        assert_eq!(t[1], vec![0, 1]);
        assert_eq!(t[8], vec![2, 2]);
        let (t, ex) = tuples(&[0, 1, 2], 3, 5, &mut rng);
        assert!(!ex);
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn small_suites_pass() {
        let ctx = Context::new(&Setup::new(3, 1)).unwrap();
        for s in [Suite::Connection, Suite::Membership, Suite::Lagrangians, Suite::Gauss, Suite::Unitarity] {
            let r = run_suite(&ctx, s, 1000, 7);
            assert!(r.ok(), "{:?}", r.first_failure);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let ctx = Context::new(&Setup::new(3, 1)).unwrap();
        let a = suite_cases(&ctx, Suite::Equivariance, 200, 3).0;
        let b = suite_cases(&ctx, Suite::Equivariance, 200, 3).0;
        assert_eq!(a, b);
    }

    #[test]
    fn plus_sign_fails_membership_and_replays() {
        let mut setup = Setup::new(3, 1);
        setup.kernel_sign = KernelSign::Plus;
        let ctx = Context::new(&setup).unwrap();
        let r = run_suite(&ctx, Suite::Membership, 100, 0);
        let cx = r.first_failure.expect("a failing pair");
        assert_eq!(cx.suite, Suite::Membership);
        assert!(!replay(&cx).unwrap().pass);
    }
}

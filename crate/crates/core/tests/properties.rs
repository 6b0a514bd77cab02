use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use weil_core::bundle::Bundle;
use weil_core::cyclo::{CycInt, Psi};
use weil_core::extrep::ExtSpace;
use weil_core::galois::{field_of_order, Fe, Field};
use weil_core::gauss::{
    classical_gauss, gauss_via_coords, gauss_via_reduction, geometric_gauss, quad_form, quad_value_shifted,
};
use weil_core::lag::{act, enumerate_lagrangians, from_coords, meet_dim, meet_join, to_coords, LagCoords, Lagrangian};
use weil_core::linalg::{span_elements, Mat};
use weil_core::symp::{SpElement, SympSpace};
use weil_core::weil::WeilRep;

struct Fixture {
    field: Field,
    space: SympSpace,
    bundle: Arc<Bundle>,
    lags: Vec<Lagrangian>,
    transvections: Vec<SpElement>,
}

fn build(q: u64, m: usize) -> Fixture {
    let field = field_of_order(q).unwrap();
    let space = SympSpace::standard(&field, m);
    let bundle = Arc::new(Bundle::new(space.clone(), Psi::standard(&field)));
    let lags = enumerate_lagrangians(&space);
    let transvections = space.all_transvections();
    Fixture { field, space, bundle, lags, transvections }
}

fn f31() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| build(3, 1))
}

fn f32() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| build(3, 2))
}

fn f92() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| build(9, 1))
}

impl Fixture {
    fn word(&self, idx: &[usize]) -> SpElement {
        idx.iter().fold(self.space.identity(), |acc, &i| {
            acc.compose(&self.transvections[i % self.transvections.len()], &self.field)
        })
    }

    fn lag(&self, i: usize) -> &Lagrangian {
        &self.lags[i % self.lags.len()]
    }
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..10_000, 1..16)
}

fn fields() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 9, 25, 27])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(q in fields(), a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
        let k = field_of_order(q).unwrap();
        let (a, b, c) = (Fe(a % k.order()), Fe(b % k.order()), Fe(c % k.order()));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.add(k.add(a, b), c), k.add(a, k.add(b, c)));
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.add(a, k.neg(a)), Fe::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), Fe::ONE);
        }
    }

    #[test]
    fn complex_embedding_respects_norm(p in prop::sample::select(vec![3u32, 5, 7]), coeffs in prop::collection::vec(-3i64..=3, 6)) {
        let z = CycInt::from_coeffs(p, &coeffs[..p as usize - 1]).unwrap();
        let lhs = z.norm_sq().to_complex();
        let rhs = z.to_complex().norm_sqr();
        prop_assert!((lhs.re - rhs).abs() <= 1e-12 * (1.0 + rhs));
        prop_assert!(lhs.im.abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn symplectic_closed_under_products_and_inverses(w1 in word(), w2 in word()) {
        let fx = f32();
        let (g, h) = (fx.word(&w1), fx.word(&w2));
        prop_assert!(fx.space.is_symplectic(g.compose(&h, &fx.field).mat()));
        prop_assert!(fx.space.is_symplectic(g.inverse(&fx.field).mat()));
        prop_assert!(g.compose(&g.inverse(&fx.field), &fx.field).is_identity());
    }

    #[test]
    fn action_convention(w1 in word(), w2 in word(), l in 0usize..1000) {
        let fx = f32();
        let (g, h) = (fx.word(&w1), fx.word(&w2));
        let l = fx.lag(l);
        prop_assert_eq!(act(&fx.space, &g, &act(&fx.space, &h, l)), act(&fx.space, &g.compose(&h, &fx.field), l));
    }

    #[test]
    fn quotient_is_symplectic(i in 0usize..1000, j in 0usize..1000) {
        let fx = f32();
        let mj = meet_join(&fx.field, fx.lag(i), fx.lag(j));
        let quotient = fx.space.quotient_symplectic(&mj.join, &mj.meet).unwrap();
        let g = quotient.space.gram();
        prop_assert_eq!(g.transpose(), g.scale(fx.field.from_int(-1), &fx.field));
        prop_assert_eq!(g.rank(&fx.field), quotient.space.dim());
        prop_assert_eq!(quotient.space.dim(), 2 * (fx.space.m() - mj.meet_dim));
    }

    #[test]
    fn coordinates_characterise_lagrangians(entries in prop::collection::vec(0u32..3, 8)) {
        let fx = f32();
        let k = &fx.field;
        let a = Mat::from_vec(2, 2, entries[..4].iter().map(|&x| Fe(x)).collect()).unwrap();
        let b = Mat::from_vec(2, 2, entries[4..].iter().map(|&x| Fe(x)).collect()).unwrap();
        let rows = a.hstack(&b);
        let direct = rows.rank(k) == 2 && fx.space.is_isotropic(&rows);
        let c = LagCoords { a, b };
        prop_assert_eq!(from_coords(&fx.space, &c).is_ok(), direct);
    }

    #[test]
    fn symmetric_product_rank(i in 0usize..1000) {
        let fx = f32();
        let k = &fx.field;
        let c = to_coords(&fx.space, fx.lag(i)).unwrap();
        let m = fx.space.m();
        prop_assert_eq!(c.symmetric_product(k).rank(k), c.a.rank(k) + c.b.rank(k) - m);
    }

    #[test]
    fn action_preserves_meets(w in word(), i in 0usize..1000, j in 0usize..1000) {
        let fx = f32();
        let g = fx.word(&w);
        let (a, b) = (fx.lag(i), fx.lag(j));
        let (ga, gb) = (act(&fx.space, &g, a), act(&fx.space, &g, b));
        prop_assert_eq!(meet_dim(&fx.field, &ga, &gb), meet_dim(&fx.field, a, b));
    }

    #[test]
    fn gauss_methods_agree(i in 0usize..1000, j in 0usize..1000, l in 0usize..1000) {
        for fx in [f32(), f92()] {
            let psi = fx.bundle.psi();
            let (a, b, c) = (fx.lag(i), fx.lag(j), fx.lag(l));
            let s = geometric_gauss(&fx.space, psi, a, b, c);
            prop_assert_eq!(&s, &gauss_via_reduction(&fx.space, psi, a, b, c).unwrap());
            let q = fx.field.order() as i64;
            let n = s.norm_sq().as_integer().unwrap();
            prop_assert!((0..=4 * fx.space.m() as u32).any(|e| q.pow(e) == n));

            let co = to_coords(&fx.space, a).unwrap();
            let std = geometric_gauss(&fx.space, psi, a, &Lagrangian::p_frame(&fx.space), &Lagrangian::q_frame(&fx.space));
            prop_assert_eq!(&std, &gauss_via_coords(&fx.space, psi, &co).unwrap());
            prop_assert_eq!(&std, &classical_gauss(&fx.field, psi, &co.symmetric_product(&fx.field)).unwrap());
        }
    }

    #[test]
    fn quadratic_form_ignores_decomposition(i in 0usize..1000, j in 0usize..1000, l in 0usize..1000, t in 0usize..1000) {
        let fx = f32();
        let (a, b, c) = (fx.lag(i), fx.lag(j), fx.lag(l));
        let shared = meet_join(&fx.field, b, c).meet;
        prop_assume!(shared.rows() > 0);
        let form = quad_form(&fx.space, a, b, c);
        let shifts = span_elements(&shared, &fx.field);
        let shift = &shifts[t % shifts.len()];
        for (z, &v) in form.points.iter().zip(&form.values) {
            prop_assert_eq!(quad_value_shifted(&fx.space, b, c, z, shift), v);
        }
    }

    #[test]
    fn rho_is_unitary(w in word()) {
        let fx = f32();
        let rep = WeilRep::new(fx.bundle.clone(), Lagrangian::q_frame(&fx.space));
        prop_assert!(rep.rho(&fx.word(&w)).is_unitary());
    }

    #[test]
    fn character_modulus_ignores_base_point(w in word(), i in 0usize..1000) {
        let fx = f32();
        let g = fx.word(&w);
        let a = WeilRep::new(fx.bundle.clone(), Lagrangian::q_frame(&fx.space));
        let b = WeilRep::new(fx.bundle.clone(), fx.lag(i).clone());
        prop_assert!((a.character(&g).norm() - b.character(&g).norm()).abs() < 1e-9);
    }

    #[test]
    fn tau_composes(w1 in word(), w2 in word(), i in 0usize..1000) {
        let fx = f32();
        let (g, h) = (fx.word(&w1), fx.word(&w2));
        let l = fx.lag(i);
        let lhs = fx.bundle.tau_matrix(&g.compose(&h, &fx.field), l);
        let rhs = fx.bundle.tau_matrix(&g, &act(&fx.space, &h, l)).scaled_mul(&fx.bundle.tau_matrix(&h, l)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_is_unitary(i in 0usize..1000, j in 0usize..1000) {
        let fx = f32();
        prop_assert!(fx.bundle.gamma(fx.lag(i), fx.lag(j)).is_unitary());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_embedding_is_multiplicative(n in 2usize..=4, q in prop::sample::select(vec![3u64, 5]), w1 in word(), w2 in word()) {
        let k = field_of_order(q).unwrap();
        let e = ExtSpace::new(&k, n).unwrap();
        let gens = e.sl_generators();
        let pick = |w: &[usize]| w.iter().fold(Mat::identity(n), |acc, &i| acc.mul(&gens[i % gens.len()], &k));
        let (a, b) = (pick(&w1), pick(&w2));
        let (ea, eb) = (e.embed_sl(&a).unwrap(), e.embed_sl(&b).unwrap());
        prop_assert_eq!(e.embed_sl(&a.mul(&b, &k)).unwrap(), ea.compose(&eb, &k));
    }

    #[test]
    fn equivariance_sampled(w in word(), i in 0usize..1000, j in 0usize..1000) {
        let fx = f31();
        let g = fx.word(&w);
        prop_assert!(fx.bundle.equivariance_holds(&g, fx.lag(i), fx.lag(j)));
    }
}

#[test]
fn trace_is_linear_and_nonzero() {
    for q in [9, 25] {
        let k = field_of_order(q).unwrap();
        let p = k.p();
        assert!(k.elements().any(|x| k.trace(x) != 0));
        for a in k.elements() {
            for b in k.elements() {
                assert_eq!(k.trace(k.add(a, b)), (k.trace(a) + k.trace(b)) % p);
            }
            for c in 0..p {
                assert_eq!(k.trace(k.mul(k.from_int(c as i64), a)), (c * k.trace(a)) % p);
            }
        }
    }
}

#[test]
fn character_is_a_homomorphism_with_zero_sum() {
    for q in [3, 5, 7, 9, 11, 13, 25] {
        let k = field_of_order(q).unwrap();
        let psi = Psi::standard(&k);
        let p = k.p();
        let mut sum = CycInt::zero(p);
        for a in k.elements() {
            sum = sum.add(&psi.value(a));
            for b in k.elements() {
                assert_eq!(psi.value(k.add(a, b)), psi.value(a).mul(&psi.value(b)));
            }
        }
        assert!(sum.is_zero());
    }
}

#[test]
fn coordinates_exhaustive_small() {
    let fx = f31();
    let k = &fx.field;
    for a in k.elements() {
        for b in k.elements() {
            let rows = Mat::from_vec(1, 2, vec![a, b]).unwrap();
            let direct = rows.rank(k) == 1;
            let c = LagCoords { a: Mat::from_vec(1, 1, vec![a]).unwrap(), b: Mat::from_vec(1, 1, vec![b]).unwrap() };
            assert_eq!(from_coords(&fx.space, &c).is_ok(), direct);
        }
    }
}

#[test]
fn decomposition_independence_exhaustive() {
    let fx = f32();
    for a in fx.lags.iter().step_by(3) {
        for b in &fx.lags {
            for c in &fx.lags {
                let shared = meet_join(&fx.field, b, c).meet;
                if shared.rows() == 0 {
                    continue;
                }
                let form = quad_form(&fx.space, a, b, c);
                for t in span_elements(&shared, &fx.field) {
                    for (z, &v) in form.points.iter().zip(&form.values) {
                        assert_eq!(quad_value_shifted(&fx.space, b, c, z, &t), v);
                    }
                }
            }
        }
    }
}

//! Worked examples checked against hand-computed values.

use std::sync::Arc;

use num_complex::Complex64;

use weil_core::bundle::Bundle;
use weil_core::cyclo::{CycInt, EqMode, Psi, ScaledMatrix};
use weil_core::extrep::{ExtSpace, RestrictedRep, DEFAULT_ENUMERATION_CAP};
use weil_core::galois::{field_of_order, make_field, Fe};
use weil_core::gauss::{classical_gauss, gauss_via_coords, gauss_via_reduction, geometric_gauss, modulus_exponent};
use weil_core::lag::{
    act, act_coords, enumerate_lagrangians, from_coords, meet_join, module_form, module_rank, to_coords, LagCoords,
    Lagrangian,
};
use weil_core::linalg::Mat;
use weil_core::symp::{group_closure, SympSpace};
use weil_core::weil::WeilRep;
use weil_core::Error;

fn unit(m: usize, i: usize) -> Vec<Fe> {
    let mut v = vec![Fe::ZERO; 2 * m];
    v[i] = Fe::ONE;
    v
}

#[test]
fn field_moduli_and_traces() {
    assert_eq!(make_field(3, 1).unwrap().modulus(), &[0, 1]);
    let f9 = make_field(3, 2).unwrap();
    assert_eq!(f9.modulus(), &[1, 0, 1]);
    assert!(matches!(make_field(2, 1), Err(Error::EvenCharacteristic(2))));
    assert_eq!(make_field(3, 1).unwrap().trace(Fe::ONE), 1);
    assert_eq!(f9.trace(Fe::ONE), 2);
    assert_eq!(f9.trace(f9.generator_alpha()), 0);
}

#[test]
fn character_values() {
    let f3 = field_of_order(3).unwrap();
    let psi = Psi::standard(&f3);
    assert_eq!(psi.value(Fe::ZERO), CycInt::one(3));
    assert_eq!(psi.value(Fe::ONE).coeffs(), &[0, 1]);
    let f9 = field_of_order(9).unwrap();
    assert_eq!(Psi::standard(&f9).value(f9.generator_alpha()), CycInt::one(3));
}

#[test]
fn cyclotomic_norms() {
    assert_eq!(CycInt::one(3).conj(), CycInt::one(3));
    assert_eq!(CycInt::one(3).norm_sq(), CycInt::one(3));
    let z = CycInt::from_coeffs(3, &[1, 2]).unwrap();
    assert_eq!(z.norm_sq().as_integer(), Some(3));
    assert_eq!(CycInt::root(3, 1).norm_sq().as_integer(), Some(1));
}

#[test]
fn scaled_matrix_arithmetic() {
    let mut m = ScaledMatrix::identity(3, 3, 2);
    m.set(0, 1, CycInt::root(3, 1));
    let id = ScaledMatrix::identity(3, 3, 2);
    assert_eq!(id.scaled_mul(&m).unwrap(), m);
    let a = ScaledMatrix { e: -1, ..m.clone() };
    let b = ScaledMatrix { e: -3, ..m.clone() };
    assert_eq!(a.scaled_mul(&b).unwrap().e, -4);
    assert_eq!(m.scaled_eq(&m, EqMode::Exact), Ok(true));
    let two = ScaledMatrix { e: 2, ..m.clone() };
    let tripled = ScaledMatrix { entries: m.entries.iter().map(|z| z.scale(3)).collect(), ..m.clone() };
    assert_eq!(two.scaled_eq(&tripled, EqMode::Exact), Ok(true));
    let odd = ScaledMatrix { e: 1, ..m.clone() };
    assert_eq!(odd.scaled_eq(&m, EqMode::Exact), Err(Error::ParityMismatch(1, 0)));
}

#[test]
fn symplectic_form_and_membership() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 2);
    assert_eq!(w.form(&unit(2, 0), &unit(2, 2)).unwrap(), Fe::ONE);
    assert_eq!(w.form(&unit(2, 0), &unit(2, 1)).unwrap(), Fe::ZERO);
    assert_eq!(w.form(&unit(2, 2), &unit(2, 0)).unwrap(), k.from_int(-1));

    let w1 = SympSpace::standard(&k, 1);
    assert!(w1.is_symplectic(&Mat::identity(2)));
    assert!(!w1.is_symplectic(&Mat::from_ints(&k, &[&[2, 0], &[0, 1]])));
    assert!(w1.is_symplectic(&Mat::from_ints(&k, &[&[2, 0], &[0, 2]])));
}

#[test]
fn transvections_and_closure() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 1);
    assert!(w.transvection(&unit(1, 0), Fe::ZERO).is_identity());
    assert!(w.transvection(&[Fe::ZERO, Fe::ZERO], Fe::ONE).is_identity());
    assert!(w.is_symplectic(w.transvection(&unit(1, 0), Fe::ONE).mat()));
    assert_eq!(group_closure(&w, &w.all_transvections(), 1000).unwrap().len(), 24);
    assert_eq!(group_closure(&w, &[w.identity()], 10).unwrap(), vec![w.identity()]);
    let w2 = SympSpace::standard(&k, 2);
    assert_eq!(group_closure(&w2, &w2.all_transvections(), 60_000).unwrap().len(), 51_840);
}

#[test]
fn quotients() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 2);
    let whole = w.quotient_symplectic(&Mat::identity(4), &Mat::zeros(0, 4)).unwrap();
    assert_eq!(whole.space.dim(), 4);
    let l1 = Lagrangian::new(&w, &Mat::from_ints(&k, &[&[1, 0, 0, 0], &[0, 1, 0, 0]])).unwrap();
    let l2 = Lagrangian::new(&w, &Mat::from_ints(&k, &[&[1, 0, 0, 0], &[0, 0, 0, 1]])).unwrap();
    let mj = meet_join(&k, &l1, &l2);
    assert_eq!((mj.meet_dim, mj.join_dim), (1, 3));
    assert_eq!(w.quotient_symplectic(&mj.join, &mj.meet).unwrap().space.dim(), 2);
    assert_eq!(w.quotient_symplectic(l1.basis(), l1.basis()).unwrap().space.dim(), 0);
}

#[test]
fn lagrangian_enumeration_and_coordinates() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 1);
    let ls = enumerate_lagrangians(&w);
    let lines: Vec<Mat> = ls.iter().map(|l| l.basis().clone()).collect();
    for row in [[1, 0], [0, 1], [1, 1], [1, 2]] {
        assert!(lines.contains(&Mat::from_ints(&k, &[&row])));
    }
    assert_eq!(enumerate_lagrangians(&SympSpace::standard(&k, 2)).len(), 40);
    assert_eq!(enumerate_lagrangians(&SympSpace::standard(&field_of_order(5).unwrap(), 1)).len(), 6);

    let one = Mat::identity(1);
    let zero = Mat::zeros(1, 1);
    assert_eq!(from_coords(&w, &LagCoords { a: one.clone(), b: zero.clone() }).unwrap(), Lagrangian::p_frame(&w));
    let diag = from_coords(&w, &LagCoords { a: one.clone(), b: one.clone() }).unwrap();
    assert_eq!(*diag.basis(), Mat::from_ints(&k, &[&[1, 1]]));
    assert_eq!(from_coords(&w, &LagCoords { a: zero.clone(), b: zero }), Err(Error::NotCoprime(0)));
}

#[test]
fn actions() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 1);
    // p ↦ q, q ↦ -p
    let g = w.element(Mat::from_ints(&k, &[&[0, -1], &[1, 0]])).unwrap();
    let (lp, lq) = (Lagrangian::p_frame(&w), Lagrangian::q_frame(&w));
    assert_eq!(act(&w, &w.identity(), &lp), lp);
    assert_eq!(act(&w, &g, &lp), lq);
    let c = act_coords(&w, &g, &to_coords(&w, &lp).unwrap()).unwrap();
    assert_eq!(c, LagCoords { a: Mat::zeros(1, 1), b: Mat::identity(1) });
    let group = group_closure(&w, &w.all_transvections(), 100).unwrap();
    let mut orbit: Vec<Lagrangian> = group.iter().map(|g| act(&w, g, &lp)).collect();
    orbit.sort();
    orbit.dedup();
    assert_eq!(orbit, enumerate_lagrangians(&w));
}

#[test]
fn module_form_of_frames() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 2);
    let p = Lagrangian::p_frame(&w).basis().clone();
    let q = Lagrangian::q_frame(&w).basis().clone();
    assert_eq!(module_form(&w, &p, &q), Mat::identity(2));
    assert_eq!(module_form(&w, &q, &p), Mat::identity(2).scale(k.from_int(-1), &k));
    assert_eq!(module_rank(&k, &p), 2);
}

#[test]
fn gauss_sums() {
    let k = field_of_order(3).unwrap();
    let psi = Psi::standard(&k);
    let w = SympSpace::standard(&k, 1);
    let (lp, lq) = (Lagrangian::p_frame(&w), Lagrangian::q_frame(&w));
    let diag = Lagrangian::new(&w, &Mat::from_ints(&k, &[&[1, 1]])).unwrap();
    let s = geometric_gauss(&w, &psi, &diag, &lp, &lq);
    assert_eq!(s.coeffs(), &[1, 2]);
    assert_eq!(s.norm_sq().as_integer(), Some(3));
    assert_eq!(modulus_exponent(&w, &diag, &lp, &lq), 1);
    assert_eq!(geometric_gauss(&w, &psi, &lp, &lp, &lp).as_integer(), Some(3));
    assert_eq!(modulus_exponent(&w, &lp, &lp, &lp), 2);

    assert_eq!(classical_gauss(&k, &psi, &Mat::zeros(0, 0)).unwrap(), CycInt::one(3));
    assert_eq!(classical_gauss(&k, &psi, &Mat::identity(1)).unwrap().coeffs(), &[1, 2]);
    assert_eq!(classical_gauss(&k, &psi, &Mat::zeros(1, 1)).unwrap().as_integer(), Some(3));

    let c = LagCoords { a: Mat::identity(1), b: Mat::identity(1) };
    assert_eq!(gauss_via_coords(&w, &psi, &c).unwrap(), s);

    // transverse pair: the reduction is the identity
    assert_eq!(gauss_via_reduction(&w, &psi, &diag, &lp, &lq).unwrap(), s);

    let w2 = SympSpace::standard(&k, 2);
    let (p2, q2) = (Lagrangian::p_frame(&w2), Lagrangian::q_frame(&w2));
    for l in enumerate_lagrangians(&w2) {
        let c = to_coords(&w2, &l).unwrap();
        assert_eq!(gauss_via_coords(&w2, &psi, &c).unwrap(), geometric_gauss(&w2, &psi, &l, &p2, &q2));
        for l2 in enumerate_lagrangians(&w2).iter().step_by(7) {
            assert_eq!(gauss_via_reduction(&w2, &psi, &l, &l, l2).unwrap(), geometric_gauss(&w2, &psi, &l, &l, l2));
        }
    }
}

#[test]
fn bundle_basis_values() {
    let k = field_of_order(3).unwrap();
    let w = SympSpace::standard(&k, 1);
    let b = Bundle::new(w.clone(), Psi::standard(&k));
    let lq = Lagrangian::q_frame(&w);
    let fiber = b.fiber(&lq);
    let zero_idx = fiber.reps().iter().position(|r| r.iter().all(|x| x.is_zero())).unwrap();
    assert_eq!(b.evaluate_basis(&lq, zero_idx, &unit(1, 1)), CycInt::one(3));
    assert_eq!(b.evaluate_basis(&lq, zero_idx, &[Fe::ZERO, Fe::ZERO]), CycInt::one(3));
    assert!(b.evaluate_basis(&lq, zero_idx, &unit(1, 0)).is_zero());
}

fn weil(q: u64, m: usize) -> WeilRep {
    let k = field_of_order(q).unwrap();
    let w = SympSpace::standard(&k, m);
    let base = Lagrangian::q_frame(&w);
    WeilRep::new(Arc::new(Bundle::new(w, Psi::standard(&k))), base)
}

#[test]
fn weil_dimensions_and_character_norm() {
    for m in 1..=3 {
        let r = weil(3, m);
        let id = r.bundle().space().identity();
        assert!((r.character(&id) - Complex64::new(3f64.powi(m as i32), 0.0)).norm() < 1e-9);
    }
    let r = weil(3, 1);
    let w = r.bundle().space().clone();
    let group = group_closure(&w, &w.all_transvections(), 100).unwrap();
    let total: f64 = group.iter().map(|g| r.character(g).norm_sqr()).sum();
    assert!((total / group.len() as f64 - 2.0).abs() < 1e-9);
}

#[test]
fn weil_commutants() {
    let r = weil(3, 1);
    assert_eq!(r.commutant_dim(&[r.bundle().space().identity()]), Ok(9));
    let r = weil(3, 2);
    assert_eq!(r.commutant_dim(&[r.bundle().space().identity()]), Ok(81));
    for q in [3, 5] {
        let r = weil(q, 1);
        assert_eq!(r.commutant_dim(&r.bundle().space().all_transvections()), Ok(2));
    }
}

#[test]
fn exterior_restrictions() {
    let k = field_of_order(3).unwrap();
    let dims: Vec<usize> = [2, 3, 4]
        .iter()
        .map(|&n| RestrictedRep::new(Arc::new(ExtSpace::new(&k, n).unwrap()), Psi::standard(&k)).unwrap().fiber_dim())
        .collect();
    assert_eq!(dims, vec![3, 27, 81]);

    for q in [3, 5, 7] {
        let k = field_of_order(q).unwrap();
        let r = RestrictedRep::new(Arc::new(ExtSpace::new(&k, 2).unwrap()), Psi::standard(&k)).unwrap();
        let report = r.commutant_report(DEFAULT_ENUMERATION_CAP, 0).unwrap();
        assert_eq!(report.commutant_dim, 2);
    }

    let r = RestrictedRep::new(Arc::new(ExtSpace::new(&k, 3).unwrap()), Psi::standard(&k)).unwrap();
    let tw = r.centralizer_intertwiners(DEFAULT_ENUMERATION_CAP, 0).unwrap();
    assert!(tw.phis.iter().any(|phi| phi.is_identity()));
    let id_op = tw.phis.iter().position(|phi| phi.is_identity()).unwrap();
    assert!(tw.operators[id_op].eq_auto(&ScaledMatrix::identity(3, 3, 27)));
    let report = r.commutant_report(DEFAULT_ENUMERATION_CAP, 0).unwrap();
    assert!(1 <= report.span_dim && report.span_dim <= report.commutant_dim);
}

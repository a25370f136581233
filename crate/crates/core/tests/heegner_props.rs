use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use x0n::heegner::*;
use x0n::moduli::{twist_factor, EllCurve};
use x0n::rational::q;
use x0n::tables;

fn max_den() -> BigInt {
    BigInt::from(10u64).pow(18u32)
}

#[test]
fn reconstruct_random_rationals_and_reject_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let d: u64 = rng.gen_range(1..=1_000_000_000_000_000_000);
        let n: i64 = rng.gen_range(-(1i64 << 62)..(1i64 << 62));
        let x = BigRational::new(n.into(), d.into());
        let got = rational_reconstruct(&BigFloat::from_rational(&x, 256), &max_den()).unwrap();
        assert_eq!(got, x);
    }
    assert!(rational_reconstruct(&pi(256), &max_den()).is_err());
}

#[test]
fn doubling_precision_keeps_the_result() {
    let a = cm_invariants(19, 1000).unwrap();
    let b = cm_invariants(19, 2000).unwrap();
    assert_eq!(a.quadruple, b.quadruple);
}

#[test]
fn halving_the_term_count_is_detected() {
    let tau = heegner_tau(163).unwrap();
    let prec = 4000;
    let full = term_count(tau.im_f64(), prec, 1_000_000).unwrap();
    let q = tau.q(prec + 64);
    let a = eval_form_terms(FormSource::E4, &q, full);
    let b = eval_form_terms(FormSource::E4, &q, full / 2);
    let drift = a.re.sub(&b.re).abs().to_rational();
    let residual = cm_invariants(163, prec).unwrap().residual;
    assert!(drift > residual, "truncated sum indistinguishable from the full one");
}

#[test]
fn level_163_j_and_twists() {
    let r = cm_invariants_with(163, &heegner_tau(163).unwrap(), 4000, E2Normalization::Difference).unwrap();
    let [a4, a6, a4p, a6p] = r.quadruple.clone();
    let e = EllCurve::new(a4, a6).unwrap();
    let j = -BigRational::from_integer(BigInt::from(640320)).pow(3u32);
    assert_eq!(e.j_invariant(), j);
    let e2 = EllCurve::new(a4p, a6p).unwrap();
    let cat = x0n::catalog::Catalog::embedded();
    let d = twist_factor(&cat.get("26569.a1").unwrap().short, &e).unwrap();
    let dp = twist_factor(&cat.get("26569.a1").unwrap().short, &e2).unwrap();
    assert!(x0n::moduli::same_square_class(&dp, &(&d * BigInt::from(-163))));
    assert!(x0n::moduli::same_square_class(&d, &BigInt::from(4344)));
}

#[test]
fn level_27_at_a_supplied_point_matches_the_table() {
    let tau = Tau::new(q(-1, 2), q(1, 108)).unwrap();
    let r = cm_invariants_at(27, &tau, 2000).unwrap();
    let row = tables::rows(3).unwrap().iter().find(|r| r.level == 27).unwrap();
    assert_eq!(r.quadruple, row.invariants());
}

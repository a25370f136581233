//! Strategies and property checks shared by the property suites and the
//! acceptance binary.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseResult;
use x0n::forms;
use x0n::series::QSeries;

pub fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// Laurent series with a nonzero leading coefficient.
pub fn series() -> impl Strategy<Value = QSeries> {
    (-3i64..=3, nonzero_rational(), prop::collection::vec(rational(), 0..10)).prop_map(|(v, lead, rest)| {
        let mut c = vec![lead];
        c.extend(rest);
        QSeries::new(v, c)
    })
}

/// Equality on the common window.
pub fn agree(a: &QSeries, b: &QSeries) -> bool {
    let m = a.trunc().min(b.trunc());
    a.truncate(m) == b.truncate(m)
}

pub fn ring_laws(f: &QSeries, g: &QSeries, h: &QSeries) -> TestCaseResult {
    prop_assert!(agree(&(f + g), &(g + f)), "add commutes");
    prop_assert!(agree(&(f * g), &(g * f)), "mul commutes");
    prop_assert!(agree(&(&(f + g) + h), &(f + &(g + h))), "add associates");
    prop_assert!(agree(&(&(f * g) * h), &(f * &(g * h))), "mul associates");
    prop_assert!(agree(&(f * &(g + h)), &(&(f * g) + &(f * h))), "distributive");
    Ok(())
}

pub fn invert_round_trip(f: &QSeries) -> TestCaseResult {
    let inv = f.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let one = QSeries::one(f.known_len() as i64);
    prop_assert_eq!(&(f * &inv), &one);
    prop_assert_eq!(&(&inv * f), &one);
    Ok(())
}

pub fn substitution_morphism(f: &QSeries, g: &QSeries, n: u32) -> TestCaseResult {
    let lhs = (f * g).substitute_qn(n);
    let rhs = &f.substitute_qn(n) * &g.substitute_qn(n);
    prop_assert!(agree(&lhs, &rhs));
    prop_assert!(agree(&(f + g).substitute_qn(n), &(&f.substitute_qn(n) + &g.substitute_qn(n))));
    Ok(())
}

/// Re-truncating a result agrees with operating on pre-truncated inputs.
pub fn truncation_monotone(f: &QSeries, g: &QSeries, cut: i64) -> TestCaseResult {
    let (fs, gs) = (f.truncate(f.trunc() - cut), g.truncate(g.trunc() - cut));
    prop_assert!(agree(&(f * g), &(&fs * &gs)), "mul");
    prop_assert!(agree(&(f + g), &(&fs + &gs)), "add");
    prop_assert!(agree(&(f - g), &(&fs - &gs)), "sub");
    if !fs.is_zero() {
        let (a, b) = (f.invert().unwrap(), fs.invert().unwrap());
        prop_assert!(agree(&a, &b), "invert");
    }
    prop_assert!(agree(&f.substitute_qn(2), &fs.substitute_qn(2)), "substitute");
    Ok(())
}

/// `q * prod (1 - q^n)^24` by direct multiplication, to `O(q^m)`.
pub fn delta_by_product(m: usize) -> QSeries {
    let mut c = vec![BigInt::zero(); m];
    c[1] = BigInt::from(1);
    for n in 1..m {
        for _ in 0..24 {
            for k in (n..m).rev() {
                let t = c[k - n].clone();
                c[k] -= t;
            }
        }
    }
    QSeries::from_integers(0, c)
}

/// `E4^3 - E6^2 = 1728 Delta` to `O(q^m)`, Delta from the product.
pub fn eisenstein_identity(m: usize) -> std::result::Result<(), String> {
    let (e4, e6) = (forms::eisenstein(4, m), forms::eisenstein(6, m));
    let lhs = &(&e4.square() * &e4) - &e6.square();
    let rhs = delta_by_product(m).scale_int(1728);
    if lhs.trunc() < m as i64 {
        return Err(format!("window shrank to {}", lhs.trunc()));
    }
    if lhs != rhs {
        return Err("E4^3 - E6^2 != 1728 Delta".into());
    }
    if forms::delta(m) != delta_by_product(m) {
        return Err("delta() disagrees with the product".into());
    }
    Ok(())
}

/// Both j-identities and the discriminant identity at level `n`, checked on
/// a window reaching at least `O(q^want)`.
pub fn j_identities(n: u64, want: i64) -> std::result::Result<(), String> {
    // the codomain discriminant has valuation N, so its quotient loses N terms
    let m = want as usize + 2 * n as usize + 4;
    let q = forms::invariant_quadruple(n, m);
    let j = forms::j_series(m);
    let dom = forms::j_of_series(&q.a4, &q.a6);
    if !agree(&dom, &j) || dom.trunc().min(j.trunc()) < want {
        return Err(format!("N={n}: j(a4, a6) != j(tau)"));
    }
    let jn = j.substitute_qn(n as u32);
    let cod = forms::j_of_series(&q.a4p, &q.a6p);
    if !agree(&cod, &jn) || cod.trunc().min(jn.trunc()) < want {
        return Err(format!("N={n}: j(a4', a6') != j(N tau)"));
    }
    // 4 a4^3 + 27 a6^2 = -Delta / (16 E2N^6)
    let disc = &(&q.a4.square() * &q.a4).scale_int(4) + &q.a6.square().scale_int(27);
    let e2 = forms::e2n(n, m);
    let e2_6 = e2.pow_int(6).unwrap();
    let want_disc = forms::delta(m).div(&e2_6.scale_int(-16)).unwrap();
    if !agree(&disc, &want_disc) || disc.trunc().min(want_disc.trunc()) < want {
        return Err(format!("N={n}: discriminant identity fails"));
    }
    Ok(())
}

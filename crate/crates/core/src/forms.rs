//! q-expansions of the Eisenstein series and of the invariant functions
//! a4, a6, a4', a6' of level N.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::qi;
use crate::series::QSeries;

/// Bernoulli number `B_k` (with `B_1 = -1/2`), via `sum_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli(k: u32) -> BigRational {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=k as u64 {
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j))) * bj;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b.pop().unwrap()
}

/// Divisor power sum `sum_{d | n} d^k`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    assert!(n >= 1);
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// `sigma_e(n)` for `0 <= n < m` by sieving (`n = 0` maps to 0).
pub fn sigma_table(e: u32, m: usize) -> Vec<BigInt> {
    if e <= 5 && m <= 1 << 20 {
        // n^5 * (small factor) stays far below 2^127 in this range
        let mut t = vec![0u128; m];
        for d in 1..m {
            let pw = (d as u128).pow(e);
            for n in (d..m).step_by(d) {
                t[n] += pw;
            }
        }
        return t.into_iter().map(BigInt::from).collect();
    }
    let mut t = vec![BigInt::zero(); m];
    for d in 1..m {
        let pw = BigInt::from(d).pow(e);
        for n in (d..m).step_by(d) {
            t[n] += &pw;
        }
    }
    t
}

/// Integer coefficients of `E_4` (`1 + 240 sum sigma_3(n) q^n`) below `q^m`.
pub fn e4_integers(m: usize) -> Vec<BigInt> {
    eisenstein_integers(4, m).0
}

/// Integer coefficients of `E_6` below `q^m`.
pub fn e6_integers(m: usize) -> Vec<BigInt> {
    eisenstein_integers(6, m).0
}

/// `E_k = (num[n]) / den` with integer `num`.
fn eisenstein_integers(k: u32, m: usize) -> (Vec<BigInt>, BigInt) {
    let c = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k);
    let s = sigma_table(k - 1, m);
    let den = c.denom().clone();
    let mut out: Vec<BigInt> = s.into_iter().map(|x| x * c.numer()).collect();
    if m > 0 {
        out[0] = den.clone();
    }
    (out, den)
}

/// Normalized Eisenstein series `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n` to `O(q^m)`.
pub fn eisenstein(k: u32, m: usize) -> QSeries {
    assert!(k >= 4 && k.is_multiple_of(2), "weight must be even and at least 4");
    let (num, den) = eisenstein_integers(k, m);
    QSeries::from_parts(0, num, den)
}

/// `24 * E_2^(N)`, i.e. `(N - 1) + 24 sum sigma_1(n) (q^n - N q^{Nn})`, below `q^m`.
pub fn e2n_integers(n: u64, m: usize) -> Vec<BigInt> {
    assert!(n >= 2, "level must be at least 2");
    let s = sigma_table(1, m);
    let mut out: Vec<BigInt> = s.iter().map(|x| x * 24).collect();
    if m > 0 {
        out[0] = BigInt::from(n - 1);
    }
    let nb = BigInt::from(n) * 24;
    let mut k = 1usize;
    while (n as usize) * k < m {
        out[n as usize * k] -= &s[k] * &nb;
        k += 1;
    }
    out
}

/// `E_2^(N) = (N-1)/24 + sum sigma_1(n) (q^n - N q^{Nn})` to `O(q^m)`.
pub fn e2n(n: u64, m: usize) -> QSeries {
    QSeries::from_parts(0, e2n_integers(n, m), BigInt::from(24))
}

/// `Delta = (E_4^3 - E_6^2) / 1728` to `O(q^m)`.
pub fn delta(m: usize) -> QSeries {
    let e4 = eisenstein(4, m);
    let e6 = eisenstein(6, m);
    let d = &e4.square().mul(&e4) - &e6.square();
    d.scale(&BigRational::new(1.into(), 1728.into()))
}

/// `j = E_4^3 / Delta`, a Laurent series starting at `q^-1`, known to `O(q^(m-1))`.
pub fn j_series(m: usize) -> QSeries {
    let e4 = eisenstein(4, m);
    e4.square().mul(&e4).div(&delta(m)).expect("Delta has leading coefficient 1")
}

/// The four level-N invariant functions, all to the same order.
#[derive(Clone, Debug)]
pub struct InvariantQuadruple {
    pub level: u64,
    pub a4: QSeries,
    pub a6: QSeries,
    pub a4p: QSeries,
    pub a6p: QSeries,
}

/// `a4 = -E4/(48 E2N^2)`, `a6 = E6/(864 E2N^3)` and the primed pair with
/// `E4(N tau)`, `E6(N tau)`, all to `O(q^m)`.
pub fn invariant_quadruple(n: u64, m: usize) -> InvariantQuadruple {
    assert!(n >= 2 && m >= 1);
    let e4 = eisenstein(4, m);
    let e6 = eisenstein(6, m);
    let e4n = eisenstein(4, m.div_ceil(n as usize)).substitute_qn(n as u32).truncate(m as i64);
    let e6n = eisenstein(6, m.div_ceil(n as usize)).substitute_qn(n as u32).truncate(m as i64);
    let inv = e2n(n, m).invert().expect("E2N has constant term (N-1)/24");
    let inv2 = inv.square();
    let inv3 = inv2.mul(&inv);
    let c4 = BigRational::new((-1).into(), 48.into());
    let c6 = BigRational::new(1.into(), 864.into());
    InvariantQuadruple {
        level: n,
        a4: e4.mul(&inv2).scale(&c4),
        a6: e6.mul(&inv3).scale(&c6),
        a4p: e4n.mul(&inv2).scale(&c4),
        a6p: e6n.mul(&inv3).scale(&c6),
    }
}

/// Short-model j-invariant of a pair of series: `6912 A^3 / (4 A^3 + 27 B^2)`.
pub fn j_of_series(a: &QSeries, b: &QSeries) -> QSeries {
    let a3 = a.square().mul(a);
    let den = &a3.scale(&qi(4)) + &b.square().scale(&qi(27));
    a3.scale(&qi(6912)).div(&den).expect("discriminant series vanishes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(6), q(1, 42));
        assert_eq!(bernoulli(12), q(-691, 2730));
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 6), BigInt::from(12));
        assert_eq!(sigma(0, 6), BigInt::from(4));
        assert_eq!(sigma(3, 2), BigInt::from(9));
        assert_eq!(sigma(5, 1), BigInt::from(1));
        let t = sigma_table(3, 50);
        for n in 1..50u64 {
            assert_eq!(t[n as usize], sigma(3, n));
        }
    }

    #[test]
    fn eisenstein_heads() {
        assert_eq!(eisenstein(4, 3), QSeries::from_i64s(0, &[1, 240, 2160]));
        assert_eq!(eisenstein(6, 3), QSeries::from_i64s(0, &[1, -504, -16632]));
        assert_eq!(eisenstein(4, 1), QSeries::from_i64s(0, &[1]));
        let sq = eisenstein(4, 3).square();
        assert_eq!(sq, QSeries::from_i64s(0, &[1, 480, 61920]));
        let s2 = eisenstein(4, 3).substitute_qn(2);
        assert_eq!(s2.coefficient(2).unwrap(), qi(240));
    }

    #[test]
    fn e2n_heads() {
        let e = e2n(11, 2);
        assert_eq!(e.coefficient(0).unwrap(), q(5, 12));
        assert_eq!(e.coefficient(1).unwrap(), qi(1));
        let e = e2n(2, 3);
        assert_eq!(e, QSeries::new(0, vec![q(1, 24), qi(1), qi(1)]));
        assert_eq!(e2n(163, 1).coefficient(0).unwrap(), q(27, 4));
        assert_eq!(e2n(11, 5).invert().unwrap().coefficient(0).unwrap(), q(12, 5));
    }

    #[test]
    fn delta_head() {
        let d = delta(6);
        assert_eq!(d, QSeries::from_i64s(1, &[1, -24, 252, -1472, 4830]));
        assert_eq!(d.coefficient(0).unwrap(), qi(0));
    }

    #[test]
    fn level_11_invariants() {
        let inv = invariant_quadruple(11, 6);
        let a4: Vec<BigRational> = (0..6).map(|n| inv.a4.coefficient(n).unwrap()).collect();
        assert_eq!(
            a4,
            vec![
                q(-3, 25),
                q(-3528, 125),
                q(-75816, 625),
                q(1097856, 3125),
                q(593496, 3125),
                q(-106231824, 78125)
            ]
        );
        let a6: Vec<BigRational> = (0..6).map(|n| inv.a6.coefficient(n).unwrap()).collect();
        assert_eq!(
            a6,
            vec![
                q(2, 125),
                q(-5112, 625),
                q(-649512, 3125),
                q(-485856, 3125),
                // the printed expansion has 229154456 here; PARI agrees with this value
                q(29154456, 15625),
                q(634190256, 390625)
            ]
        );
        assert_eq!(inv.a4p.coefficient(0).unwrap(), q(-3, 25));
        assert_eq!(inv.a4p.trunc(), 6);
    }
}

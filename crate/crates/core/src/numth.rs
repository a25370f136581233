//! Integer factorization for squarefree parts and perfect-power tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mod_pow(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    b.modpow(e, m)
}

/// Miller-Rabin with the first twelve prime bases; deterministic below
/// 3.3e24 and a strong probable-prime test beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if *n == BigInt::from(p) {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    let nm1: BigInt = n - 1;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'witness: for &a in &BASES {
        let mut x = mod_pow(&BigInt::from(a), &d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the odd composite `n` (Pollard-Brent).
fn pollard_brent(n: &BigInt) -> BigInt {
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut g) = (BigInt::from(2), BigInt::from(2), BigInt::one());
        let mut q = BigInt::one();
        let mut ys = y.clone();
        let mut r = 1u64;
        const M: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..M.min(r - k) {
                    y = f(&y);
                    q = q * (&x - &y).abs() % n;
                }
                g = q.gcd(n);
                k += M;
            }
            r *= 2;
        }
        if g == *n {
            // backtrack one step at a time
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization of `|n|`, primes ascending.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if n.is_zero() {
        return out;
    }
    let push = |p: BigInt, out: &mut Vec<(BigInt, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    for p in 2u32..1000 {
        let pb = BigInt::from(p);
        while (&n % p).is_zero() {
            n /= p;
            push(pb.clone(), &mut out);
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, &mut out);
            continue;
        }
        if let Some(r) = perfect_root(&m) {
            stack.extend(std::iter::repeat_n(r.0, r.1 as usize));
            continue;
        }
        let d = pollard_brent(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    out
}

/// `(r, k)` with `r^k = m` and `k > 1` largest, if `m` is a perfect power.
fn perfect_root(m: &BigInt) -> Option<(BigInt, u32)> {
    let bits = m.bits() as u32;
    for k in (2..=bits).rev() {
        let r = m.nth_root(k);
        if r > BigInt::one() && r.pow(k) == *m {
            return Some((r, k));
        }
    }
    None
}

/// Squarefree integer `d` with `n = d * s^2`, sign kept.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero(), "squarefree part of zero");
    let mut d = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, e) in factor(n) {
        if e % 2 == 1 {
            d *= p;
        }
    }
    d
}

/// Squarefree `d` with `r = d * s^2` for a rational `s`.
pub fn squarefree_part_rational(r: &BigRational) -> BigInt {
    squarefree_part(&(r.numer() * r.denom()))
}

/// Exact `k`-th root of a rational, if it exists (sign allowed for odd `k`).
pub fn rational_root(r: &BigRational, k: u32) -> Option<BigRational> {
    let root = |n: &BigInt| -> Option<BigInt> {
        if n.is_negative() {
            if k.is_multiple_of(2) {
                return None;
            }
            return root_abs(&-n, k).map(|x| -x);
        }
        root_abs(n, k)
    };
    Some(BigRational::new(root(r.numer())?, root(r.denom())?))
}

fn root_abs(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}

/// Small helper for tests and callers holding machine integers.
pub fn squarefree_i64(n: i64) -> i64 {
    squarefree_part(&BigInt::from(n)).to_i64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_composites() {
        assert!(is_probable_prime(&BigInt::from(1_000_000_007u64)));
        assert!(!is_probable_prime(&BigInt::from(561u32)));
        let big: BigInt = "170141183460469231731687303715884105727".parse().unwrap();
        assert!(is_probable_prime(&big));
    }

    #[test]
    fn factors_semiprime() {
        let p: BigInt = "1000000007".parse().unwrap();
        let q: BigInt = "998244353".parse().unwrap();
        let n = &p * &q * &q * BigInt::from(12);
        let f = factor(&n);
        assert_eq!(
            f,
            vec![(BigInt::from(2), 2), (BigInt::from(3), 1), (q.clone(), 2), (p.clone(), 1)]
        );
        assert_eq!(squarefree_part(&n), &p * BigInt::from(3));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_i64(4344), 1086);
        assert_eq!(squarefree_i64(-486), -6);
        assert_eq!(squarefree_i64(4544), 71);
        assert_eq!(squarefree_i64(1), 1);
    }

    #[test]
    fn roots() {
        let r = BigRational::new(BigInt::from(-27), BigInt::from(8));
        assert_eq!(rational_root(&r, 3), Some(BigRational::new(BigInt::from(-3), BigInt::from(2))));
        assert_eq!(rational_root(&r, 2), None);
    }
}

//! Exact kernels of rational matrices.
//!
//! [`nullspace`] is fraction-free elimination over `Z`, fine for small
//! systems. [`modular_kernel_vector`] handles the large relation and map
//! systems: it reduces modulo many word primes, lifts by CRT and rational
//! reconstruction, and hands every candidate to an exact verifier.

pub mod modp;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Basis of the right kernel of `rows`, one vector per free column.
///
/// Pivot rule: columns left to right, first nonzero row from the top.
/// Each basis vector has a 1 at its free column and 0 at the other free
/// columns, so the basis is the reduced-echelon one and is unique.
pub fn nullspace(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let cols = rows.first().map_or(0, |r| r.len());
    // clear denominators row by row
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            r.iter().map(|c| c.numer() * (&l / c.denom())).collect()
        })
        .collect();
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(k) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, k);
        // Bareiss step: exact division by the previous pivot
        for i in r + 1..nrows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        // back substitution over the echelon rows
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let mut s = BigRational::zero();
            for j in pc + 1..cols {
                if !a[i][j].is_zero() && !v[j].is_zero() {
                    s += BigRational::from_integer(a[i][j].clone()) * &v[j];
                }
            }
            v[pc] = -s / BigRational::from_integer(a[i][pc].clone());
        }
        basis.push(v);
    }
    basis
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut w: Vec<BigInt> = v.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    make_primitive(&mut w);
    w
}

pub fn make_primitive(w: &mut [BigInt]) {
    let g = w.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return;
    }
    let flip = w.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
    let g = if flip { -g } else { g };
    for c in w.iter_mut() {
        *c = &*c / &g;
    }
}

/// Wang's rational reconstruction: `n/d ≡ u (mod m)` with `|n|, d < sqrt(m/2)`.
pub fn rational_reconstruct_mod(u: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let qt = &r0 / &r1;
        let r2 = &r0 - &qt * &r1;
        let t2 = &t0 - &qt * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Outcome of a multimodular kernel computation.
#[derive(Debug)]
pub enum Kernel {
    /// The kernel is trivial modulo a good prime.
    Trivial,
    /// The kernel has this dimension modulo every prime tried.
    Wide(usize),
    /// The unique kernel direction, as a primitive integer vector that passed
    /// the exact verifier.
    Vector(Vec<BigInt>),
}

/// Dimension of the kernel modulo the first prime that makes `build` succeed.
pub fn kernel_dimension_mod<F>(build: &F, cols: usize) -> usize
where
    F: Fn(u64) -> Option<Vec<Vec<u64>>>,
{
    for &p in modp::primes() {
        if let Some(mat) = build(p) {
            return modp::kernel_mod(mat, cols, p).kernel.len();
        }
    }
    unreachable!("every prime was rejected by the matrix builder")
}

/// Computes the kernel of a matrix with rational entries presented by its
/// reductions: `build(p)` returns the matrix modulo `p`, or `None` when some
/// denominator vanishes there. When the kernel is a line, its primitive
/// integer generator is reconstructed and must pass `verify` before it is
/// returned.
pub fn modular_kernel_vector<F, V>(build: F, cols: usize, mut verify: V, max_primes: usize) -> Result<Kernel>
where
    F: Fn(u64) -> Option<Vec<Vec<u64>>>,
    V: FnMut(&[BigInt]) -> bool,
{
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = Vec::new();
    let mut profile: Option<(Vec<usize>, usize)> = None;
    let mut last: Option<Vec<BigInt>> = None;
    let mut used = 0;
    for &p in modp::primes() {
        if used >= max_primes {
            break;
        }
        let Some(mat) = build(p) else { continue };
        let ech = modp::kernel_mod(mat, cols, p);
        let dim = ech.kernel.len();
        match &profile {
            None => {
                if dim == 0 {
                    return Ok(Kernel::Trivial);
                }
                if dim > 1 {
                    return Ok(Kernel::Wide(dim));
                }
            }
            Some((piv, _)) => {
                if dim == 0 {
                    // the first prime was unlucky; the true kernel is smaller
                    return Ok(Kernel::Trivial);
                }
                if dim > 1 || &ech.pivots != piv {
                    // a prime dividing some minor; skip it
                    continue;
                }
            }
        }
        used += 1;
        let v = &ech.kernel[0];
        let pb = BigInt::from(p);
        if profile.is_none() {
            let free = (0..cols).find(|c| !ech.pivots.contains(c)).unwrap();
            profile = Some((ech.pivots.clone(), free));
            acc = v.iter().map(|&x| BigInt::from(x)).collect();
            modulus = pb;
        } else {
            // CRT: x ≡ acc (mod modulus), x ≡ v (mod p)
            let minv = BigInt::from(modp::inv_mod(crate::series::mod_bigint(&modulus, p), p));
            for (a, &x) in acc.iter_mut().zip(v.iter()) {
                let diff = (BigInt::from(x) - &*a).mod_floor(&pb);
                let t = (diff * &minv).mod_floor(&pb);
                *a += t * &modulus;
            }
            modulus *= &pb;
        }
        let Some(cand) = reconstruct_vector(&acc, &modulus) else {
            continue;
        };
        if last.as_ref() == Some(&cand) && verify(&cand) {
            return Ok(Kernel::Vector(cand));
        }
        last = Some(cand);
    }
    Err(Error::VerificationFailed {
        what: format!("multimodular kernel after {used} primes"),
        exponent: 0,
    })
}

fn reconstruct_vector(acc: &[BigInt], modulus: &BigInt) -> Option<Vec<BigInt>> {
    // Reconstruct with a running common denominator so most entries become
    // integers after the first few.
    let mut den = BigInt::one();
    let mut nums: Vec<BigRational> = Vec::with_capacity(acc.len());
    for a in acc {
        let scaled = (a * &den).mod_floor(modulus);
        let (n, d) = rational_reconstruct_mod(&scaled, modulus)?;
        let val = BigRational::new(n, &d * &den);
        if !d.is_one() {
            den *= d;
        }
        nums.push(val);
    }
    Some(primitive_integer_vector(&nums))
}

/// Sign-and-magnitude helper for the matrix builders.
pub fn residue(x: &BigInt, p: u64) -> u64 {
    match x.sign() {
        Sign::NoSign => 0,
        _ => crate::series::mod_bigint(x, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn identity_has_trivial_kernel() {
        let m = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert!(nullspace(&m).is_empty());
    }

    #[test]
    fn single_row() {
        let m = vec![vec![qi(1), qi(1)]];
        assert_eq!(nullspace(&m), vec![vec![qi(-1), qi(1)]]);
    }

    #[test]
    fn rational_rows() {
        let m = vec![
            vec![q(1, 2), qi(1), qi(0), q(3, 4)],
            vec![qi(1), qi(2), qi(1), qi(0)],
        ];
        let basis = nullspace(&m);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for row in &m {
                let s: BigRational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn wang_reconstruction() {
        let m: BigInt = BigInt::from(modp::primes()[0]) * BigInt::from(modp::primes()[1]);
        let n = BigInt::from(-12347i64);
        let d = BigInt::from(678910i64);
        let u = (&n * d.modinv(&m).unwrap()).mod_floor(&m);
        assert_eq!(rational_reconstruct_mod(&u, &m), Some((n, d)));
    }

    #[test]
    fn modular_matches_exact() {
        // kernel direction (3, -7/2, 1) scaled to (6, -7, 2)
        let rows: Vec<Vec<BigRational>> = vec![
            vec![qi(1), qi(2), qi(4)],
            vec![qi(7), qi(6), qi(0)],
            vec![qi(8), qi(8), qi(4)],
        ];
        let exact = primitive_integer_vector(&nullspace(&rows)[0]);
        let build = |p: u64| {
            Some(
                rows.iter()
                    .map(|r| r.iter().map(|c| residue(c.numer(), p)).collect())
                    .collect(),
            )
        };
        let k = modular_kernel_vector(build, 3, |_| true, 10).unwrap();
        match k {
            Kernel::Vector(v) => assert_eq!(v, exact),
            other => panic!("unexpected {other:?}"),
        }
    }
}

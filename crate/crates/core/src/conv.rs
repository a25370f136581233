//! Integer convolution through several word-prime NTTs and CRT.
//!
//! Faster than Kronecker substitution once both the length and the
//! coefficient size are large, because num-bigint has no FFT multiply.

use num_bigint::{BigInt, BigUint, Sign};

use crate::linalg::modp::{self, Mont};

/// Residue of `x` modulo `m.p` in Montgomery form, given
/// `limb_pows[i] = 2^(64 i) * R^2 mod p` (also Montgomery-ready).
fn residue(x: &BigInt, m: &Mont, limb_pows: &[u64]) -> u64 {
    let mut acc = 0u64;
    for (d, &pw) in x.iter_u64_digits().zip(limb_pows) {
        // d < 2^64 and pw < p keep the product inside the REDC range
        acc = m.add(acc, m.mul(d, pw));
    }
    if x.sign() == Sign::Minus && acc != 0 {
        m.p - acc
    } else {
        acc
    }
}

fn limb_powers(m: &Mont, limbs: usize) -> Vec<u64> {
    // mul(d, R^(i+2)) = d * 2^(64 i) * R, the Montgomery form of d * 2^(64 i)
    let mut out = Vec::with_capacity(limbs);
    let mut cur = m.r_squared();
    for _ in 0..limbs {
        out.push(cur);
        cur = m.mul(cur, m.r_squared());
    }
    out
}

fn bits_needed(a: &[BigInt], b: &[BigInt]) -> u64 {
    let ba = a.iter().map(|c| c.bits()).max().unwrap_or(0);
    let bb = b.iter().map(|c| c.bits()).max().unwrap_or(0);
    let n = a.len().min(b.len()) as u64;
    ba + bb + (64 - n.leading_zeros() as u64) + 2
}

/// First `len` coefficients of `a * b`.
pub(crate) fn convolve_crt(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let bits = bits_needed(a, b);
    // primes exceed 2^61, so each contributes at least 61 bits
    let k = bits.div_ceil(61) as usize;
    let primes = &modp::primes()[..k];
    let la = a.len().min(len);
    let lb = b.len().min(len);
    let n = (la + lb - 1).next_power_of_two();
    let limbs = a[..la]
        .iter()
        .chain(&b[..lb])
        .map(|c| c.bits().div_ceil(64) as usize)
        .max()
        .unwrap_or(1);

    // residues[i][t]: coefficient t of the product modulo primes[i], plain form
    let mut residues: Vec<Vec<u64>> = Vec::with_capacity(k);
    for &p in primes {
        let m = Mont::new(p);
        let pw = limb_powers(&m, limbs);
        let mut fa = vec![0u64; n];
        for (slot, c) in fa.iter_mut().zip(&a[..la]) {
            *slot = residue(c, &m, &pw);
        }
        let mut fb = vec![0u64; n];
        for (slot, c) in fb.iter_mut().zip(&b[..lb]) {
            *slot = residue(c, &m, &pw);
        }
        let prod = modp::cyclic_convolution(fa, fb, &m);
        residues.push(prod[..len].iter().map(|&v| m.from_mont(v)).collect());
    }
    garner(&residues, primes, len)
}

/// Mixed-radix CRT lift to symmetric residues.
fn garner(residues: &[Vec<u64>], primes: &[u64], len: usize) -> Vec<BigInt> {
    let k = primes.len();
    let monts: Vec<Mont> = primes.iter().map(|&p| Mont::new(p)).collect();
    // pj[i][j] = p_j mod p_i (Montgomery form), inv_prefix[i] = (p_0 ... p_{i-1})^{-1} mod p_i
    let mut pj = vec![vec![0u64; k]; k];
    let mut inv_prefix = vec![0u64; k];
    for i in 0..k {
        let m = &monts[i];
        let mut prod = m.to_mont(1);
        for j in 0..i {
            pj[i][j] = m.to_mont(primes[j] % primes[i]);
            prod = m.mul(prod, pj[i][j]);
        }
        inv_prefix[i] = m.inv(prod);
    }
    let modulus: BigUint = primes.iter().map(|&p| BigUint::from(p)).product();
    let half = &modulus >> 1u32;
    let mut out = Vec::with_capacity(len);
    let mut v = vec![0u64; k];
    // residues is indexed prime-major
    #[allow(clippy::needless_range_loop)]
    for t in 0..len {
        for i in 0..k {
            let m = &monts[i];
            // value of v_0 + v_1 p_0 + ... + v_{i-1} p_0..p_{i-2} modulo p_i, by Horner
            // plain values times Montgomery-form constants stay plain
            let row = &pj[i];
            let mut acc = 0u64;
            for j in (0..i).rev() {
                // v[j] < p_j < 2^62 < 2 p_i since all primes lie in (2^61, 2^62)
                let mut s = m.mul(acc, row[j]) + v[j];
                if s >= m.p {
                    s -= m.p;
                }
                if s >= m.p {
                    s -= m.p;
                }
                acc = s;
            }
            v[i] = m.mul(m.sub(residues[i][t], acc), inv_prefix[i]);
        }
        let mut x = BigUint::from(v[k - 1]);
        for j in (0..k - 1).rev() {
            x *= primes[j];
            x += v[j];
        }
        out.push(if x > half {
            -BigInt::from_biguint(Sign::Plus, &modulus - x)
        } else {
            BigInt::from_biguint(Sign::Plus, x)
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::schoolbook;

    #[test]
    fn matches_schoolbook() {
        let a: Vec<BigInt> = (0..70)
            .map(|i| (BigInt::from(3i64).pow(i as u32 * 7 % 200) - BigInt::from(i * 1000)) * if i % 3 == 0 { -1 } else { 1 })
            .collect();
        let b: Vec<BigInt> = (0..50).map(|i| BigInt::from(7i64).pow(i as u32 * 5 % 120) - 5).collect();
        assert_eq!(convolve_crt(&a, &b, 100), schoolbook(&a, &b, 100));
        assert_eq!(convolve_crt(&a, &b, 40), schoolbook(&a, &b, 40));
        assert_eq!(convolve_crt(&b, &a, 119), schoolbook(&b, &a, 119));
    }
}

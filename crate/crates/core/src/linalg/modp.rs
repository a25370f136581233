//! Arithmetic modulo word-sized primes and row reduction over `F_p`.
//!
//! The primes are of the form `k * 2^24 + 1` just below `2^62`, so the
//! Montgomery representation can run additions without overflow checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `k * 2^24 + 1 < 2^62` in decreasing order.
pub fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let step = 1u64 << 24;
        let mut k = ((1u64 << 62) - 1) / step;
        let mut out = Vec::with_capacity(4096);
        while out.len() < 4096 && k > 0 {
            let p = k * step + 1;
            if p < (1u64 << 62) && is_prime_u64(p) {
                out.push(p);
            }
            k -= 1;
        }
        out
    })
}

/// Montgomery arithmetic modulo an odd `p < 2^62`.
#[derive(Clone, Copy, Debug)]
pub struct Mont {
    pub p: u64,
    /// `-p^{-1} mod 2^64`
    pinv: u64,
    /// `2^128 mod p`
    r2: u64,
}

impl Mont {
    pub fn new(p: u64) -> Mont {
        assert!(p % 2 == 1 && p < (1 << 62));
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = mul_mod(r, r, p);
        Mont { p, pinv: inv.wrapping_neg(), r2 }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    /// `R^2 mod p`; `mul(x, r_squared())` is the Montgomery form of `x`.
    pub fn r_squared(&self) -> u64 {
        self.r2
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.to_mont(inv_mod(self.from_mont(a), self.p))
    }
}

/// Result of reducing a matrix over `F_p` to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct EchelonMod {
    pub pivots: Vec<usize>,
    /// Kernel basis in standard form: one vector per free column `f`, with
    /// entry 1 at `f` and zeros at the other free columns. Plain residues.
    pub kernel: Vec<Vec<u64>>,
}

/// Kernel of `matrix` (rows of plain residues, `cols` wide) modulo `p`.
/// Pivots are chosen column by column, first nonzero row from the top.
pub fn kernel_mod(mut matrix: Vec<Vec<u64>>, cols: usize, p: u64) -> EchelonMod {
    let m = Mont::new(p);
    for row in matrix.iter_mut() {
        debug_assert_eq!(row.len(), cols);
        for v in row.iter_mut() {
            *v = m.to_mont(*v);
        }
    }
    let rows = matrix.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&i| matrix[i][c] != 0) else {
            continue;
        };
        matrix.swap(r, k);
        let inv = m.inv(matrix[r][c]);
        for v in matrix[r][c..].iter_mut() {
            *v = m.mul(*v, inv);
        }
        let (head, tail) = matrix.split_at_mut(r);
        let (prow, below) = tail.split_first_mut().unwrap();
        for other in head.iter_mut().chain(below.iter_mut()) {
            let f = other[c];
            if f == 0 {
                continue;
            }
            for (o, &pv) in other[c..].iter_mut().zip(&prow[c..]) {
                *o = m.sub(*o, m.mul(f, pv));
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut kernel = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (i, &c) in pivots.iter().enumerate() {
            let a = m.from_mont(matrix[i][f]);
            v[c] = if a == 0 { 0 } else { p - a };
        }
        kernel.push(v);
    }
    EchelonMod { pivots, kernel }
}

/// Truncated product of two vectors in Montgomery form.
pub fn mul_trunc(a: &[u64], b: &[u64], len: usize, m: &Mont) -> Vec<u64> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if a.len().min(b.len()) > 48 && (m.p - 1).is_multiple_of(1 << 24) && a.len() + b.len() <= 1 << 24 {
        let mut out = ntt_mul(a, b, m);
        out.resize(len, 0);
        return out;
    }
    let mut out = vec![0u64; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o = m.add(*o, m.mul(x, y));
        }
    }
    out
}

/// An element of multiplicative order exactly `2^24` (plain residue).
fn root_of_unity_2_24(p: u64) -> u64 {
    let k = (p - 1) >> 24;
    for a in 2u64.. {
        let w = pow_mod(a, k, p);
        if pow_mod(w, 1 << 23, p) != 1 {
            return w;
        }
    }
    unreachable!()
}

/// Twiddle factors for transforms of length up to `2^log_n` modulo one prime:
/// `fwd[k] = w^k`, `inv[k] = w^-k` for `k < 2^(log_n - 1)`, Montgomery form,
/// `w` of order `2^log_n`.
struct NttTable {
    log_n: u32,
    fwd: Vec<u64>,
    inv: Vec<u64>,
}

fn ntt_table(m: &Mont, log_n: u32) -> Arc<NttTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<NttTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&m.p) {
        if t.log_n >= log_n {
            return t.clone();
        }
    }
    let log_n = log_n.max(12);
    let w = pow_mod(root_of_unity_2_24(m.p), 1 << (24 - log_n), m.p);
    let half = 1usize << (log_n - 1);
    let wm = m.to_mont(w);
    let wi = m.to_mont(inv_mod(w, m.p));
    let mut fwd = vec![m.to_mont(1); half];
    let mut inv = vec![m.to_mont(1); half];
    for k in 1..half {
        fwd[k] = m.mul(fwd[k - 1], wm);
        inv[k] = m.mul(inv[k - 1], wi);
    }
    let t = Arc::new(NttTable { log_n, fwd, inv });
    cache.lock().unwrap().insert(m.p, t.clone());
    t
}

fn ntt(a: &mut [u64], invert: bool, m: &Mont) {
    let n = a.len();
    let log_n = n.trailing_zeros();
    let table = ntt_table(m, log_n);
    let tw = if invert { &table.inv } else { &table.fwd };
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = 1usize << (table.log_n - len.trailing_zeros());
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = m.mul(hi[k], tw[k * stride]);
                lo[k] = m.add(u, v);
                hi[k] = m.sub(u, v);
            }
        }
        len <<= 1;
    }
    if invert {
        let ninv = m.to_mont(inv_mod(n as u64 % m.p, m.p));
        for v in a.iter_mut() {
            *v = m.mul(*v, ninv);
        }
    }
}

/// Full product of two Montgomery-form vectors by number-theoretic transform.
fn ntt_mul(a: &[u64], b: &[u64], m: &Mont) -> Vec<u64> {
    let need = a.len() + b.len() - 1;
    let n = need.next_power_of_two();
    let mut fa = a.to_vec();
    fa.resize(n, 0);
    let mut fb = b.to_vec();
    fb.resize(n, 0);
    let mut out = cyclic_convolution(fa, fb, m);
    out.truncate(need);
    out
}

/// Cyclic convolution of two Montgomery-form vectors of equal power-of-two length.
pub fn cyclic_convolution(mut fa: Vec<u64>, mut fb: Vec<u64>, m: &Mont) -> Vec<u64> {
    debug_assert!(fa.len().is_power_of_two() && fa.len() == fb.len());
    ntt(&mut fa, false, m);
    ntt(&mut fb, false, m);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = m.mul(*x, *y);
    }
    ntt(&mut fa, true, m);
    fa
}

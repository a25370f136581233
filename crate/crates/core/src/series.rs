//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] knows its coefficients for exponents `valuation..trunc` and
//! nothing above. Every operation returns the tightest window the inputs
//! justify; asking for a coefficient at or beyond `trunc` is an error rather
//! than a silent zero.
//!
//! Internally the coefficients share one positive denominator, so products
//! reduce to integer convolutions. Large convolutions are done by Kronecker
//! substitution: pack the integer vectors into one big integer, multiply once,
//! and unpack with signed digits.

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    /// Exponent of `num[0]`. Equals `trunc` for the zero series.
    val: i64,
    trunc: i64,
    num: Vec<BigInt>,
    /// Positive, coprime to the content of `num`.
    den: BigInt,
}

impl QSeries {
    /// `valuation` is the exponent of `coeffs[0]`; the window ends at
    /// `valuation + coeffs.len()`.
    pub fn new(valuation: i64, coeffs: Vec<BigRational>) -> QSeries {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        QSeries::from_parts(valuation, num, den)
    }

    pub fn from_integers(valuation: i64, coeffs: Vec<BigInt>) -> QSeries {
        QSeries::from_parts(valuation, coeffs, BigInt::one())
    }

    pub fn from_i64s(valuation: i64, coeffs: &[i64]) -> QSeries {
        QSeries::from_integers(valuation, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Builds `num[i] / den * q^(valuation + i)` and normalizes.
    pub(crate) fn from_parts(valuation: i64, num: Vec<BigInt>, den: BigInt) -> QSeries {
        assert!(!den.is_zero(), "zero denominator");
        let trunc = valuation + num.len() as i64;
        let mut s = QSeries { val: valuation, trunc, num, den };
        s.normalize();
        s
    }

    pub fn zero(trunc: i64) -> QSeries {
        QSeries { val: trunc, trunc, num: Vec::new(), den: BigInt::one() }
    }

    /// The constant 1 known to `O(q^trunc)`.
    pub fn one(trunc: i64) -> QSeries {
        QSeries::monomial(BigRational::one(), 0, trunc)
    }

    /// `c * q^exponent + O(q^trunc)`.
    pub fn monomial(c: BigRational, exponent: i64, trunc: i64) -> QSeries {
        if trunc <= exponent {
            return QSeries::zero(trunc);
        }
        let mut num = vec![BigInt::zero(); (trunc - exponent) as usize];
        num[0] = c.numer().clone();
        QSeries::from_parts(exponent, num, c.denom().clone())
    }

    fn normalize(&mut self) {
        let lead = self.num.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.val = self.trunc;
                self.num.clear();
                self.den = BigInt::one();
                return;
            }
            Some(k) if k > 0 => {
                self.num.drain(..k);
                self.val += k as i64;
            }
            _ => {}
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            // reduce first: c is usually far longer than g
            let r = c % &g;
            if !r.is_zero() {
                g = g.gcd(&r);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Number of stored coefficients, `trunc - valuation`.
    pub fn known_len(&self) -> usize {
        self.num.len()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn coefficient(&self, n: i64) -> Result<BigRational> {
        if n >= self.trunc {
            return Err(Error::PrecisionExceeded { exponent: n, trunc: self.trunc });
        }
        if n < self.val {
            return Ok(BigRational::zero());
        }
        Ok(BigRational::new(self.num[(n - self.val) as usize].clone(), self.den.clone()))
    }

    pub fn leading_coefficient(&self) -> Option<BigRational> {
        self.num
            .first()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
    }

    /// `(exponent, coefficient)` pairs over the stored window, zeros included.
    pub fn terms(&self) -> impl Iterator<Item = (i64, BigRational)> + '_ {
        self.num
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.val + i as i64, BigRational::new(c.clone(), self.den.clone())))
    }

    pub(crate) fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub(crate) fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Lowers the truncation point to `m` (no-op when `m >= trunc`).
    pub fn truncate(&self, m: i64) -> QSeries {
        if m >= self.trunc {
            return self.clone();
        }
        if m <= self.val {
            return QSeries::zero(m);
        }
        let keep = (m - self.val) as usize;
        QSeries::from_parts(self.val, self.num[..keep].to_vec(), self.den.clone())
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.trunc);
        }
        let num = self.num.iter().map(|x| x * c.numer()).collect();
        let mut s = QSeries::from_parts(self.val, num, &self.den * c.denom());
        s.trunc = self.trunc;
        s
    }

    pub fn scale_int(&self, c: i64) -> QSeries {
        self.scale(&BigRational::from_integer(c.into()))
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            val: self.val + k,
            trunc: self.trunc + k,
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    fn add_impl(&self, other: &QSeries, negate_other: bool) -> QSeries {
        let trunc = min(self.trunc, other.trunc);
        let val = min(self.val, other.val);
        if trunc <= val {
            return QSeries::zero(trunc);
        }
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let mut num = vec![BigInt::zero(); (trunc - val) as usize];
        for (i, c) in self.num.iter().enumerate() {
            let e = self.val + i as i64;
            if e >= trunc {
                break;
            }
            num[(e - val) as usize] += c * &fa;
        }
        for (i, c) in other.num.iter().enumerate() {
            let e = other.val + i as i64;
            if e >= trunc {
                break;
            }
            let t = c * &fb;
            if negate_other {
                num[(e - val) as usize] -= t;
            } else {
                num[(e - val) as usize] += t;
            }
        }
        let mut s = QSeries::from_parts(val, num, den);
        s.trunc = trunc;
        s
    }

    /// Cauchy product; the window is `min(f.trunc + g.val, g.trunc + f.val)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let trunc = min(self.trunc + other.val, other.trunc + self.val);
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(trunc);
        }
        let val = self.val + other.val;
        let len = (trunc - val) as usize;
        let num = convolve(&self.num, &other.num, len);
        QSeries::from_parts(val, num, &self.den * &other.den)
    }

    pub fn square(&self) -> QSeries {
        self.mul(self)
    }

    /// Multiplicative inverse; the relative precision is preserved.
    pub fn invert(&self) -> Result<QSeries> {
        if self.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let len = self.num.len();
        let (g_num, g_den) = invert_integer_series(&self.num, len);
        // 1/(F/d) = d * G
        let num = g_num.into_iter().map(|c| c * &self.den).collect();
        Ok(QSeries::from_parts(-self.val, num, g_den))
    }

    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn pow_int(&self, k: i64) -> Result<QSeries> {
        if k < 0 {
            return self.invert()?.pow_int(-k);
        }
        let rel = self.num.len() as i64;
        let mut result = QSeries::one(rel);
        let mut base = self.clone();
        let mut e = k as u64;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        if first {
            // f^0 = 1 with the relative precision of f
            return Ok(QSeries::one(if self.is_zero() { 0 } else { rel }));
        }
        Ok(result)
    }

    /// `f(q) -> f(q^n)`, i.e. `tau -> n*tau`.
    pub fn substitute_qn(&self, n: u32) -> QSeries {
        assert!(n >= 1, "substitution exponent must be positive");
        let n = n as i64;
        if self.is_zero() {
            return QSeries::zero(self.trunc * n);
        }
        let len = ((self.trunc - self.val) * n) as usize;
        let mut num = vec![BigInt::zero(); len];
        for (i, c) in self.num.iter().enumerate() {
            num[i * n as usize] = c.clone();
        }
        QSeries::from_parts(self.val * n, num, self.den.clone())
    }

    /// `q d/dq`.
    pub fn q_derivative(&self) -> QSeries {
        let num = self
            .num
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigInt::from(self.val + i as i64))
            .collect();
        let mut s = QSeries::from_parts(self.val, num, self.den.clone());
        s.trunc = self.trunc;
        s
    }

    /// Coefficients reduced modulo `p`, for exponents `start..start+len`.
    /// `None` when the denominator is not invertible mod `p`.
    pub(crate) fn residues(&self, p: u64, start: i64, len: usize) -> Option<Vec<u64>> {
        let d = mod_bigint(&self.den, p);
        if d == 0 {
            return None;
        }
        let dinv = crate::linalg::modp::inv_mod(d, p);
        let mut out = vec![0u64; len];
        for (k, slot) in out.iter_mut().enumerate() {
            let e = start + k as i64;
            assert!(e < self.trunc, "residues requested beyond the known window");
            if e < self.val {
                continue;
            }
            let c = mod_bigint(&self.num[(e - self.val) as usize], p);
            *slot = crate::linalg::modp::mul_mod(c, dinv, p);
        }
        Some(out)
    }
}

pub(crate) fn mod_bigint(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64_digits().1.first().copied().unwrap_or(0)
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.add_impl(rhs, false)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.add_impl(rhs, true)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            val: self.val,
            trunc: self.trunc,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if e == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{e}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "O(q^{})", self.trunc)
        } else {
            write!(f, " + O(q^{})", self.trunc)
        }
    }
}

// ---------------------------------------------------------------------------
// integer polynomial kernels

const KRONECKER_MIN_LEN: usize = 12;
const CRT_MIN_LEN: usize = 64;
const CRT_MIN_BITS: u64 = 5000;

/// First `len` coefficients of the product of two integer polynomials.
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let a = &a[..min(a.len(), len)];
    let b = &b[..min(b.len(), len)];
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); len];
    }
    let short = min(a.len(), b.len());
    if short < KRONECKER_MIN_LEN {
        schoolbook(a, b, len)
    } else if short >= CRT_MIN_LEN && max_bits(a) + max_bits(b) >= CRT_MIN_BITS {
        crate::conv::convolve_crt(a, b, len)
    } else {
        kronecker(a, b, len)
    }
}

pub(crate) fn schoolbook(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate() {
        if i >= len {
            break;
        }
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|c| c.bits()).max().unwrap_or(0)
}

pub(crate) fn kronecker(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let terms = min(a.len(), b.len()) as u64;
    let bits = max_bits(a) + max_bits(b) + (64 - terms.leading_zeros() as u64) + 2;
    let slot = bits.div_ceil(32) as usize;
    let pa = pack(a, slot);
    let pb = pack(b, slot);
    unpack(&(pa * pb), slot, len)
}

fn pack(coeffs: &[BigInt], slot: usize) -> BigInt {
    let mut pos = vec![0u32; coeffs.len() * slot];
    let mut neg: Vec<u32> = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        let (sign, digits) = c.to_u32_digits();
        let target = if sign == Sign::Minus {
            if neg.is_empty() {
                neg = vec![0u32; coeffs.len() * slot];
            }
            &mut neg
        } else {
            &mut pos
        };
        target[i * slot..i * slot + digits.len()].copy_from_slice(&digits);
    }
    let p = BigInt::from_biguint(Sign::Plus, BigUint::new(pos));
    if neg.is_empty() {
        p
    } else {
        p - BigInt::from_biguint(Sign::Plus, BigUint::new(neg))
    }
}

fn unpack(t: &BigInt, slot: usize, count: usize) -> Vec<BigInt> {
    let (sign, digits) = t.to_u32_digits();
    let width = 32 * slot as u64;
    let base = BigInt::one() << width;
    let mut out = Vec::with_capacity(count);
    let mut carry = false;
    for i in 0..count {
        let lo = i * slot;
        let chunk: &[u32] = if lo < digits.len() {
            &digits[lo..min(lo + slot, digits.len())]
        } else {
            &[]
        };
        let mut v = BigUint::from_slice(chunk);
        if carry {
            v += 1u32;
        }
        let mut x = BigInt::from_biguint(Sign::Plus, v);
        if x.bits() >= width {
            x -= &base;
            carry = true;
        } else {
            carry = false;
        }
        if sign == Sign::Minus {
            x = -x;
        }
        out.push(x);
    }
    out
}

/// Inverse of an integer series with nonzero constant term, as `(G, d)` with
/// `1/F = G/d` to `len` terms.
fn invert_integer_series(f: &[BigInt], len: usize) -> (Vec<BigInt>, BigInt) {
    // Newton: g <- g (2 - f g), doubling the precision each round.
    let mut g_num = vec![BigInt::one()];
    let mut g_den = f[0].clone();
    let mut prec = 1usize;
    while prec < len {
        let next = min(2 * prec, len);
        let fg = convolve(&f[..min(f.len(), next)], &g_num, next);
        // 2 - fg/g_den  = (2 g_den - fg) / g_den
        let mut corr: Vec<BigInt> = fg.into_iter().map(|c| -c).collect();
        corr[0] += &g_den * 2;
        let new_num = convolve(&g_num, &corr, next);
        let mut new_den = &g_den * &g_den;
        let mut s = QSeries::from_parts(0, new_num, new_den.clone());
        s.trunc = next as i64;
        // from_parts strips leading zeros; the constant term is never zero here
        debug_assert_eq!(s.val, 0);
        new_den = s.den;
        let mut nn = s.num;
        nn.resize(next, BigInt::zero());
        g_num = nn;
        g_den = new_den;
        prec = next;
    }
    g_num.truncate(len);
    (g_num, g_den)
}

/// Parses coefficient lists like `[1, -2, 3/4]` in tests and fixtures.
pub fn rational_list(items: &[&str]) -> Vec<BigRational> {
    items
        .iter()
        .map(|s| crate::rational::parse_rational(s).expect("bad rational literal"))
        .collect()
}

impl QSeries {
    /// Treats the stored window as exact and pads with known zeros up to `trunc`.
    pub fn extend_zeros(&self, trunc: i64) -> QSeries {
        if trunc <= self.trunc {
            return self.clone();
        }
        if self.is_zero() {
            return QSeries::zero(trunc);
        }
        let mut num = self.num.clone();
        num.resize((trunc - self.val) as usize, BigInt::zero());
        QSeries { val: self.val, trunc, num, den: self.den.clone() }
    }

    /// Largest exponent `<= max(trunc - 1, val)` used for range checks.
    pub fn last_known(&self) -> i64 {
        max(self.trunc - 1, self.val)
    }
}

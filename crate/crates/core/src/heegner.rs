//! Evaluation of the level-N invariants at a CM point to high precision,
//! followed by continued-fraction recovery of the exact rational values.
//!
//! Reals are fixed point: a [`BigFloat`] is `m / 2^prec` with an integer
//! mantissa, which is all a convergent power series at a fixed point needs.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forms::{e2n_integers, e4_integers, e6_integers};

/// Extra bits carried beyond the requested precision.
pub const GUARD: u32 = 64;
/// Default cap on the number of series terms.
pub const TERM_CAP: u64 = 1_000_000;

/// Fixed-point real `m / 2^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    m: BigInt,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> BigFloat {
        BigFloat { m: BigInt::zero(), prec }
    }

    pub fn from_int(n: i64, prec: u32) -> BigFloat {
        BigFloat { m: BigInt::from(n) << prec, prec }
    }

    /// Nearest representable value below `r` in absolute value.
    pub fn from_rational(r: &BigRational, prec: u32) -> BigFloat {
        BigFloat { m: (r.numer() << prec) / r.denom(), prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    /// The exact dyadic value.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.m.clone(), BigInt::one() << self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.m.bits().saturating_sub(60);
        let top = (&self.m >> shift).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.prec as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn at(&self, prec: u32) -> BigInt {
        if prec <= self.prec {
            &self.m >> (self.prec - prec)
        } else {
            &self.m << (prec - self.prec)
        }
    }

    pub fn with_prec(&self, prec: u32) -> BigFloat {
        BigFloat { m: self.at(prec), prec }
    }

    pub fn add(&self, o: &BigFloat) -> BigFloat {
        let p = self.prec.min(o.prec);
        BigFloat { m: self.at(p) + o.at(p), prec: p }
    }

    pub fn sub(&self, o: &BigFloat) -> BigFloat {
        let p = self.prec.min(o.prec);
        BigFloat { m: self.at(p) - o.at(p), prec: p }
    }

    pub fn neg(&self) -> BigFloat {
        BigFloat { m: -&self.m, prec: self.prec }
    }

    pub fn abs(&self) -> BigFloat {
        BigFloat { m: self.m.abs(), prec: self.prec }
    }

    pub fn mul(&self, o: &BigFloat) -> BigFloat {
        let p = self.prec.min(o.prec);
        BigFloat { m: (self.at(p) * o.at(p)) >> p, prec: p }
    }

    pub fn mul_int(&self, k: &BigInt) -> BigFloat {
        BigFloat { m: &self.m * k, prec: self.prec }
    }

    pub fn div_int(&self, k: &BigInt) -> BigFloat {
        BigFloat { m: &self.m / k, prec: self.prec }
    }

    pub fn div(&self, o: &BigFloat) -> Result<BigFloat> {
        let p = self.prec.min(o.prec);
        let d = o.at(p);
        if d.is_zero() {
            return Err(Error::InvalidArgument("division by a vanishing high-precision value".into()));
        }
        Ok(BigFloat { m: (self.at(p) << p) / d, prec: p })
    }

    pub fn sqrt(&self) -> BigFloat {
        assert!(!self.m.is_negative(), "square root of a negative value");
        BigFloat { m: (&self.m << self.prec).sqrt(), prec: self.prec }
    }

    /// `floor(log2 |x|)`, or `None` for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        (!self.m.is_zero()).then(|| self.m.bits() as i64 - 1 - self.prec as i64)
    }

    /// Hexadecimal floating-point text, exact for this dyadic value.
    pub fn to_hex(&self) -> String {
        hex_float(&self.to_rational(), u64::MAX)
    }
}

/// `x` as `[-]0x1.<hex>p<exp>` with at most `bits` mantissa bits after
/// the point (rounded toward zero); exact when `x` is dyadic and fits.
pub fn hex_float(x: &BigRational, bits: u64) -> String {
    if x.is_zero() {
        return "0x0p+0".into();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let (n, d) = (x.numer().abs(), x.denom().clone());
    // e = floor(log2 |x|)
    let mut e = n.bits() as i64 - d.bits() as i64;
    let ge = |e: i64| if e >= 0 { n >= (&d << e as u64) } else { (&n << (-e) as u64) >= d };
    if !ge(e) {
        e -= 1;
    }
    let dyadic = d.trailing_zeros() == Some(d.bits() - 1);
    let nbits = if dyadic { n.bits() - 1 } else { 52 }.min(bits);
    // mantissa m = floor(|x| * 2^(nbits - e)), in [2^nbits, 2^(nbits+1))
    let s = nbits as i64 - e;
    let m = if s >= 0 { (&n << s as u64) / &d } else { &n / (&d << (-s) as u64) };
    let frac = &m - (BigInt::one() << nbits);
    let mut out = format!("{sign}0x1");
    if !frac.is_zero() {
        let pad = nbits.div_ceil(4) * 4;
        let digits = format!("{:x}", frac << (pad - nbits));
        let digits = format!("{}{}", "0".repeat((pad / 4) as usize - digits.len()), digits);
        out.push('.');
        out.push_str(digits.trim_end_matches('0'));
    }
    out.push_str(&format!("p{}{}", if e >= 0 { "+" } else { "" }, e));
    out
}

/// `re + i im` at a common precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> BigComplex {
        let p = re.prec.min(im.prec);
        BigComplex { re: re.with_prec(p), im: im.with_prec(p) }
    }

    pub fn real(re: BigFloat) -> BigComplex {
        let p = re.prec;
        BigComplex { re, im: BigFloat::zero(p) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec.min(self.im.prec)
    }

    pub fn add(&self, o: &BigComplex) -> BigComplex {
        BigComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &BigComplex) -> BigComplex {
        BigComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().min(o.prec());
        let (a, b, c, d) = (self.re.at(p), self.im.at(p), o.re.at(p), o.im.at(p));
        BigComplex {
            re: BigFloat { m: (&a * &c - &b * &d) >> p, prec: p },
            im: BigFloat { m: (a * d + b * c) >> p, prec: p },
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> BigComplex {
        BigComplex { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }

    pub fn div(&self, o: &BigComplex) -> Result<BigComplex> {
        let n2 = o.re.mul(&o.re).add(&o.im.mul(&o.im));
        let conj = BigComplex { re: o.re.clone(), im: o.im.neg() };
        let t = self.mul(&conj);
        Ok(BigComplex { re: t.re.div(&n2)?, im: t.im.div(&n2)? })
    }

    /// `e^z` by halving, a Taylor series and repeated squaring.
    pub fn exp(&self) -> BigComplex {
        let p = self.prec();
        let mag = self.re.to_f64().abs() + self.im.to_f64().abs();
        let k = if mag > 0.25 { (mag / 0.25).log2().ceil() as u32 } else { 0 };
        let wp = p + 32 + k;
        let z = BigComplex {
            re: BigFloat { m: self.re.at(wp) >> k, prec: wp },
            im: BigFloat { m: self.im.at(wp) >> k, prec: wp },
        };
        let mut sum = BigComplex::real(BigFloat::from_int(1, wp));
        let mut term = sum.clone();
        let mut n = 1u64;
        loop {
            term = term.mul(&z).scale_div(n);
            if term.re.is_zero() && term.im.is_zero() {
                break;
            }
            sum = sum.add(&term);
            n += 1;
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        BigComplex { re: sum.re.with_prec(p), im: sum.im.with_prec(p) }
    }

    fn scale_div(&self, n: u64) -> BigComplex {
        let n = BigInt::from(n);
        BigComplex { re: self.re.div_int(&n), im: self.im.div_int(&n) }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}i", self.re.to_f64(), self.im.to_f64())
    }
}

/// `pi` by Machin's formula.
pub fn pi(prec: u32) -> BigFloat {
    let wp = prec + 16;
    let atan_inv = |x: u64| -> BigInt {
        let x = BigInt::from(x);
        let x2 = &x * &x;
        let mut term = (BigInt::one() << wp) / &x;
        let mut sum = term.clone();
        let mut k = 1u64;
        while !term.is_zero() {
            term /= &x2;
            let t = &term / (2 * k + 1);
            if k % 2 == 1 {
                sum -= t;
            } else {
                sum += t;
            }
            k += 1;
        }
        sum
    };
    let m = atan_inv(5) * 16 - atan_inv(239) * 4;
    BigFloat { m, prec: wp }.with_prec(prec)
}

/// `tau = re + i sqrt(im_sq)`, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tau {
    pub re: BigRational,
    pub im_sq: BigRational,
}

impl Tau {
    pub fn new(re: BigRational, im_sq: BigRational) -> Result<Tau> {
        if !im_sq.is_positive() {
            return Err(Error::InvalidArgument("tau must lie in the upper half plane".into()));
        }
        Ok(Tau { re, im_sq })
    }

    pub fn im_f64(&self) -> f64 {
        self.im_sq.to_f64().unwrap_or(0.0).sqrt()
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        BigComplex::new(BigFloat::from_rational(&self.re, prec), BigFloat::from_rational(&self.im_sq, prec).sqrt())
    }

    /// `q = e^(2 pi i tau)`.
    pub fn q(&self, prec: u32) -> BigComplex {
        let t = self.to_complex(prec + 8);
        let two_pi = pi(prec + 8).mul_int(&BigInt::from(2));
        // 2 pi i (x + i y) = -2 pi y + 2 pi x i
        let z = BigComplex { re: t.im.mul(&two_pi).neg(), im: t.re.mul(&two_pi) };
        let q = z.exp();
        BigComplex { re: q.re.with_prec(prec), im: q.im.with_prec(prec) }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i*sqrt({})", self.re, self.im_sq)
    }
}

pub const HEEGNER_LEVELS: [u64; 4] = [19, 43, 67, 163];

/// `(-N + sqrt(-N)) / (2N)` for the class-number-one levels.
pub fn heegner_tau(n: u64) -> Result<Tau> {
    if !HEEGNER_LEVELS.contains(&n) {
        return Err(Error::UnsupportedLevel(n));
    }
    let n = BigInt::from(n);
    Tau::new(BigRational::new(-BigInt::one(), BigInt::from(2)), BigRational::new(BigInt::one(), n * 4))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormSource {
    E4,
    E6,
    /// `E_2^(N)`.
    E2N(u64),
    /// `E_4(N tau)`.
    E4N(u64),
    /// `E_6(N tau)`.
    E6N(u64),
}

/// Terms needed so that the tail is below `2^-(prec + GUARD)` for
/// coefficients of polynomial growth, when `|q| = e^(-2 pi im)`.
pub fn term_count(im: f64, prec: u32, cap: u64) -> Result<u64> {
    if im.is_nan() || im <= 0.0 {
        return Err(Error::InvalidArgument("tau must lie in the upper half plane".into()));
    }
    let decay = 2.0 * std::f64::consts::PI * im / std::f64::consts::LN_2; // bits per term
    let target = (prec + GUARD) as f64;
    let geometric = -(1.0 - (-decay).exp2()).log2();
    let mut t = target / decay;
    for _ in 0..50 {
        if !t.is_finite() || t > cap as f64 {
            break;
        }
        // sigma_5(n) <= 1.04 n^5 times the E6 factor 504
        t = (target + 5.0 * (t + 2.0).log2() + 10.0 + geometric) / decay;
    }
    let needed = if t.is_finite() { t.ceil() as u64 + 1 } else { u64::MAX };
    if needed > cap {
        return Err(Error::PrecisionUnreachable { needed, cap });
    }
    Ok(needed)
}

/// `sum c[n] q^n` by Horner.
fn horner(coeffs: &[BigInt], q: &BigComplex) -> BigComplex {
    let p = q.prec();
    let mut acc = BigComplex::real(BigFloat::zero(p));
    for c in coeffs.iter().rev() {
        acc = acc.mul(q);
        acc.re.m += c << p;
    }
    acc
}

/// Value of a form at `q`, summing `terms` coefficients (in the form's own
/// variable, so `q^N` for the `N tau` forms).
pub fn eval_form_terms(src: FormSource, q: &BigComplex, terms: u64) -> BigComplex {
    let t = terms as usize;
    match src {
        FormSource::E4 => horner(&e4_integers(t), q),
        FormSource::E6 => horner(&e6_integers(t), q),
        FormSource::E2N(n) => {
            let v = horner(&e2n_integers(n, t), q);
            BigComplex { re: v.re.div_int(&BigInt::from(24)), im: v.im.div_int(&BigInt::from(24)) }
        }
        FormSource::E4N(n) | FormSource::E6N(n) => {
            let qn = pow_complex(q, n);
            let k = (t as u64).div_ceil(n).max(1) as usize;
            let c = if matches!(src, FormSource::E4N(_)) { e4_integers(k) } else { e6_integers(k) };
            horner(&c, &qn)
        }
    }
}

fn pow_complex(z: &BigComplex, mut e: u64) -> BigComplex {
    let mut base = z.clone();
    let mut acc = BigComplex::real(BigFloat::from_int(1, z.prec()));
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    acc
}

/// A form at `tau`, accurate to about `2^-prec`; also returns the term count.
pub fn eval_form(src: FormSource, tau: &Tau, prec: u32) -> Result<(BigComplex, u64)> {
    let terms = term_count(tau.im_f64(), prec, TERM_CAP)?;
    let q = tau.q(prec + GUARD);
    Ok((eval_form_terms(src, &q, terms), terms))
}

/// The last continued-fraction convergent of `x` with denominator at most
/// `max_den`, accepted when within `2^-(x.prec/2)` of `x`.
pub fn rational_reconstruct(x: &BigFloat, max_den: &BigInt) -> Result<BigRational> {
    rational_reconstruct_gate(x, max_den, x.prec() / 2)
}

/// As [`rational_reconstruct`] with the acceptance gate `2^-gate_bits`.
pub fn rational_reconstruct_gate(x: &BigFloat, max_den: &BigInt, gate_bits: u32) -> Result<BigRational> {
    let scale = BigInt::one() << x.prec;
    // convergents of m / 2^prec via the Euclidean algorithm
    let (mut a, mut b) = (x.m.clone(), scale.clone());
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut best: Option<(BigInt, BigInt)> = None;
    while !b.is_zero() {
        let (t, r) = a.div_mod_floor(&b);
        let h2 = &t * &h1 + &h0;
        let k2 = &t * &k1 + &k0;
        if &k2 > max_den {
            break;
        }
        best = Some((h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        (a, b) = (b, r);
    }
    let Some((h, k)) = best else {
        return Err(Error::ReconstructionFailed { log2_error: 0 });
    };
    // |m/2^p - h/k| = |m k - h 2^p| / (k 2^p)
    let num = (&x.m * &k - &h * &scale).abs();
    if (&num << gate_bits) < &k * &scale {
        return Ok(BigRational::new(h, k));
    }
    let err = BigRational::new(num, k * scale);
    Err(Error::ReconstructionFailed { log2_error: log2_floor(&err) })
}

fn log2_floor(r: &BigRational) -> i64 {
    if r.is_zero() {
        return i64::MIN;
    }
    let (n, d) = (r.numer().abs(), r.denom());
    let mut e = n.bits() as i64 - d.bits() as i64;
    let ge = if e >= 0 { n >= (d << e as u64) } else { (&n << (-e) as u64) >= *d };
    if !ge {
        e -= 1;
    }
    e
}

/// Scaling of the weight-2 form in the denominators of the invariants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum E2Normalization {
    /// Constant term `(N - 1)/24`, the logarithmic derivative of `eta(N tau)/eta(tau)`.
    #[default]
    Eta,
    /// `E_2(tau) - N E_2(N tau)`, which is `-24` times the above. The
    /// invariants become the twist by `-6` of the `Eta` ones.
    Difference,
}

#[derive(Clone, Debug)]
pub struct CMResult {
    pub level: u64,
    pub tau: Tau,
    pub prec: u32,
    pub normalization: E2Normalization,
    /// `(a4, a6, a4', a6')`.
    pub quadruple: [BigRational; 4],
    /// Largest `|x - p/q|` over the four reconstructions.
    pub residual: BigRational,
    /// Largest imaginary part among the four values.
    pub imag_residual: BigRational,
    pub terms_used: u64,
}

/// Exact invariants at the Heegner point of level `n`.
pub fn cm_invariants(n: u64, prec: u32) -> Result<CMResult> {
    cm_invariants_at(n, &heegner_tau(n)?, prec)
}

/// Exact invariants at a caller-supplied CM point.
pub fn cm_invariants_at(n: u64, tau: &Tau, prec: u32) -> Result<CMResult> {
    cm_invariants_with(n, tau, prec, E2Normalization::Eta)
}

pub fn cm_invariants_with(n: u64, tau: &Tau, prec: u32, normalization: E2Normalization) -> Result<CMResult> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("level must be at least 2, got {n}")));
    }
    if prec < 64 {
        return Err(Error::InvalidArgument("precision must be at least 64 bits".into()));
    }
    let terms = term_count(tau.im_f64(), prec, TERM_CAP)?;
    let wp = prec + GUARD;
    let q = tau.q(wp);
    let sources = [FormSource::E4, FormSource::E6, FormSource::E2N(n), FormSource::E4N(n), FormSource::E6N(n)];
    // wasm32-unknown-unknown has no threads
    #[cfg(target_arch = "wasm32")]
    let vals: Vec<BigComplex> = sources.iter().map(|&src| eval_form_terms(src, &q, terms)).collect();
    #[cfg(not(target_arch = "wasm32"))]
    let vals: Vec<BigComplex> = std::thread::scope(|s| {
        let q = &q;
        let handles: Vec<_> = sources.iter().map(|&src| s.spawn(move || eval_form_terms(src, q, terms))).collect();
        handles.into_iter().map(|h| h.join().expect("form evaluation panicked")).collect()
    });
    let [e4, e6, mut e2, e4n, e6n] = <[BigComplex; 5]>::try_from(vals).unwrap();
    if normalization == E2Normalization::Difference {
        e2 = e2.scale_int(&BigInt::from(-24));
    }
    let e2sq = e2.mul(&e2);
    let e2cu = e2sq.mul(&e2);
    let c48 = BigComplex::real(BigFloat::from_int(-48, wp));
    let c864 = BigComplex::real(BigFloat::from_int(864, wp));
    let d4 = e2sq.mul(&c48);
    let d6 = e2cu.mul(&c864);
    let values = [e4.div(&d4)?, e6.div(&d6)?, e4n.div(&d4)?, e6n.div(&d6)?];

    let gate = prec / 2;
    let max_den = BigInt::one() << (prec / 4);
    let mut imag = BigRational::zero();
    for v in &values {
        let im = v.im.to_rational().abs();
        if (&v.im.m.abs() << gate) >= (BigInt::one() << v.im.prec) {
            return Err(Error::ImaginaryResidueTooLarge { log2_imag: v.im.log2_floor().unwrap_or(0) });
        }
        imag = imag.max(im);
    }
    let mut residual = BigRational::zero();
    let mut out = Vec::with_capacity(4);
    for v in &values {
        let r = rational_reconstruct_gate(&v.re, &max_den, gate)?;
        residual = residual.max((v.re.to_rational() - &r).abs());
        out.push(r);
    }
    Ok(CMResult {
        level: n,
        tau: tau.clone(),
        prec,
        normalization,
        quadruple: out.try_into().unwrap(),
        residual,
        imag_residual: imag,
        terms_used: terms,
    })
}

impl CMResult {
    pub fn residual_hex(&self) -> String {
        hex_float(&self.residual, 52)
    }

    pub fn imag_residual_hex(&self) -> String {
        hex_float(&self.imag_residual, 52)
    }
}

/// Parses `[-]0x1.<hex>p<exp>` (or `0x0p+0`) back to an exact rational.
pub fn parse_hex_float(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a hex float: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let body = body.strip_prefix("0x").ok_or_else(bad)?;
    let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    let m = BigInt::parse_bytes(digits.as_bytes(), 16).ok_or_else(bad)?;
    let e = exp - 4 * frac.len() as i64;
    let mut r = if e >= 0 {
        BigRational::from_integer(m << e as u64)
    } else {
        BigRational::new(m, BigInt::one() << (-e) as u64)
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn pi_digits() {
        let p = pi(200);
        assert!((p.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(rational_reconstruct(&pi(256), &BigInt::from(1_000_000)).is_err());
    }

    #[test]
    fn reconstruct_simple() {
        let x = BigFloat::from_rational(&q(1, 2), 100);
        assert_eq!(rational_reconstruct(&x, &BigInt::from(1000)).unwrap(), q(1, 2));
        let r = q(-543605, 75481344);
        let x = BigFloat::from_rational(&r, 512);
        assert_eq!(rational_reconstruct(&x, &(BigInt::one() << 128)).unwrap(), r);
    }

    #[test]
    fn hex_format() {
        assert_eq!(hex_float(&q(3, 2), 52), "0x1.8p+0");
        assert_eq!(hex_float(&q(-1, 16), 52), "-0x1p-4");
        assert_eq!(hex_float(&q(0, 1), 52), "0x0p+0");
        let tiny = BigRational::new(BigInt::from(3), BigInt::one() << 4101u32);
        assert_eq!(hex_float(&tiny, 52), "0x1.8p-4100");
        assert_eq!(parse_hex_float("0x1.8p-4100").unwrap(), tiny);
        assert_eq!(BigFloat::from_rational(&q(5, 4), 10).to_hex(), "0x1.4p+0");
    }

    #[test]
    fn e4_at_i_matches_direct_sum() {
        let tau = Tau::new(q(0, 1), q(1, 1)).unwrap();
        let (v, _) = eval_form(FormSource::E4, &tau, 128).unwrap();
        let qq = (-2.0 * std::f64::consts::PI).exp();
        let direct: f64 = 1.0
            + (1..40u64)
                .map(|n| {
                    let s3: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum();
                    240.0 * s3 as f64 * qq.powi(n as i32)
                })
                .sum::<f64>();
        assert!((v.re.to_f64() - direct).abs() < 1e-10 * direct);
        assert!(v.im.to_f64().abs() < 1e-30);
    }

    #[test]
    fn constant_terms_far_up() {
        let tau = Tau::new(q(0, 1), q(1_000_000, 1)).unwrap();
        let (v, _) = eval_form(FormSource::E4, &tau, 256).unwrap();
        assert_eq!(v.re.to_rational(), q(1, 1));
        let (v, _) = eval_form(FormSource::E2N(163), &tau, 256).unwrap();
        assert_eq!(rational_reconstruct(&v.re, &BigInt::from(100)).unwrap(), q(27, 4));
    }

    #[test]
    fn unreachable_precision() {
        let tau = Tau::new(q(0, 1), q(1, 10i64.pow(14))).unwrap();
        assert!(matches!(eval_form(FormSource::E4, &tau, 4000), Err(Error::PrecisionUnreachable { .. })));
        assert_eq!(heegner_tau(11), Err(Error::UnsupportedLevel(11)));
    }

    #[test]
    fn level_19() {
        let r = cm_invariants(19, 600).unwrap();
        assert_eq!(r.quadruple, [q(-19, 2), q(-361, 32), q(-1, 38), q(1, 608)]);
    }
}

//! Generators of genus-one X0(N) given by a Weierstrass model.
//!
//! When X0(N) is an elliptic curve `Y^2 + a1 XY + a3 Y = X^3 + a2 X^2 + a4 X + a6`
//! with the cusp at infinity sent to the origin, the coordinate functions
//! satisfy the curve equation and `q dX/dq = l f (2Y + a1 X + a3)`, where `f`
//! is the weight-two newform of level N and `l` a constant. Both equations
//! together fix every coefficient of `X = x0 q^-2 + ...`, `Y = y0 q^-3 + ...`
//! once the leading pair is known. The newform comes from point counts of
//! the model itself, so only the curve equation and a few printed
//! coefficients are needed.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::modp::pow_mod;
use crate::poly::BiPoly;
use crate::series::QSeries;

/// Long Weierstrass model with coefficients `[a1, a2, a3, a4, a6]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weierstrass {
    pub a: [BigRational; 5],
}

impl Weierstrass {
    pub fn new(a: [i64; 5]) -> Weierstrass {
        Weierstrass { a: a.map(|c| BigRational::from_integer(c.into())) }
    }

    /// Accepts `lhs = rhs` or a single polynomial meant to vanish, in `X`, `Y`.
    pub fn parse(eq: &str) -> Result<Weierstrass> {
        let poly = match eq.split_once('=') {
            Some((l, r)) => BiPoly::parse(l)?.sub(&BiPoly::parse(r)?),
            None => BiPoly::parse(eq)?,
        };
        Weierstrass::from_poly(&poly)
    }

    pub fn from_poly(p: &BiPoly) -> Result<Weierstrass> {
        let lead = p.coeff(0, 2);
        if lead.is_zero() {
            return Err(Error::InvalidArgument("curve equation has no Y^2 term".into()));
        }
        let p = p.scale(&lead.recip());
        let allowed = [(0, 2), (1, 1), (0, 1), (3, 0), (2, 0), (1, 0), (0, 0)];
        if p.terms().any(|(e, _)| !allowed.contains(e)) || p.coeff(3, 0) != -BigRational::one() {
            return Err(Error::InvalidArgument("curve equation is not in Weierstrass form".into()));
        }
        Ok(Weierstrass {
            a: [p.coeff(1, 1), -p.coeff(2, 0), p.coeff(0, 1), -p.coeff(1, 0), -p.coeff(0, 0)],
        })
    }

    /// `Y^2 + a1 XY + a3 Y - X^3 - a2 X^2 - a4 X - a6`.
    pub fn poly(&self) -> BiPoly {
        let [a1, a2, a3, a4, a6] = &self.a;
        BiPoly::from_terms([
            ((0, 2), BigRational::one()),
            ((1, 1), a1.clone()),
            ((0, 1), a3.clone()),
            ((3, 0), -BigRational::one()),
            ((2, 0), -a2),
            ((1, 0), -a4),
            ((0, 0), -a6),
        ])
    }

    fn integral(&self) -> Result<[i64; 5]> {
        let mut out = [0i64; 5];
        for (o, c) in out.iter_mut().zip(&self.a) {
            if !c.is_integer() {
                return Err(Error::InvalidArgument("point counts need an integral model".into()));
            }
            *o = c.to_integer().to_i64().ok_or_else(|| Error::InvalidArgument("coefficient too large".into()))?;
        }
        Ok(out)
    }

    /// `p - #{affine points mod p}`: the trace of Frobenius at good primes,
    /// and `1, -1, 0` at bad primes of a minimal model.
    pub fn trace(&self, p: u64) -> Result<i64> {
        let a = self.integral()?.map(|c| c.rem_euclid(p as i64) as u64);
        let [a1, a2, a3, a4, a6] = a;
        let mut count = 0u64;
        if p == 2 {
            for x in 0..2 {
                for y in 0..2 {
                    let lhs = (y * y + a1 * x * y + a3 * y) % 2;
                    let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
                    count += u64::from(lhs == rhs);
                }
            }
        } else {
            for x in 0..p {
                // y^2 + b y - c = 0 has 1 + (b^2 + 4c / p) roots
                let b = (a1 * x + a3) % p;
                let c = (((x * x % p) * x % p) + a2 * (x * x % p) % p + a4 * x % p + a6) % p;
                let disc = (b * b % p + 4 * c % p) % p;
                count += match disc {
                    0 => 1,
                    d if pow_mod(d, (p - 1) / 2, p) == 1 => 2,
                    _ => 0,
                };
            }
        }
        Ok(p as i64 - count as i64)
    }
}

/// Coefficients `a_0 = 0, a_1 = 1, a_2, ..., a_{len-1}` of the newform
/// attached to `curve`, whose conductor is `level`.
pub fn newform_coefficients(curve: &Weierstrass, level: u64, len: usize) -> Result<Vec<i64>> {
    let mut a = vec![0i64; len];
    if len > 1 {
        a[1] = 1;
    }
    // smallest prime factor sieve
    let mut spf = vec![0usize; len];
    for n in 2..len {
        if spf[n] == 0 {
            let mut k = n;
            while k < len {
                if spf[k] == 0 {
                    spf[k] = n;
                }
                k += n;
            }
        }
    }
    for n in 2..len {
        let p = spf[n];
        let mut m = n;
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if m > 1 {
            a[n] = a[m] * a[n / m];
            continue;
        }
        // n = p^e
        let ap = if e == 1 { curve.trace(p as u64)? } else { a[p] };
        a[n] = if e == 1 {
            ap
        } else if level.is_multiple_of(p as u64) {
            ap * a[n / p]
        } else {
            ap * a[n / p] - p as i64 * a[n / (p * p)]
        };
    }
    Ok(a)
}

/// Full expansions of the coordinate functions of `curve` on X0(level),
/// known below `q^trunc`, seeded by the leading coefficients of the partial
/// expansions and checked against every coefficient they supply.
pub fn modular_parametrization(
    curve: &Weierstrass,
    level: u64,
    partial_x: &QSeries,
    partial_y: &QSeries,
    trunc: i64,
) -> Result<(QSeries, QSeries)> {
    if partial_x.valuation() != -2 || partial_y.valuation() != -3 {
        return Err(Error::InvalidArgument(
            "generators must have poles of order 2 and 3 at the cusp at infinity".into(),
        ));
    }
    let x0 = partial_x.leading_coefficient().unwrap();
    let y0 = partial_y.leading_coefficient().unwrap();
    if &y0 * &y0 != &x0 * &x0 * &x0 {
        return Err(Error::InconsistentPartial { exponent: -6 });
    }
    let steps = (trunc + 3).max(1) as usize;
    let f: Vec<BigRational> = newform_coefficients(curve, level, steps + 4)?
        .into_iter()
        .map(|c| BigRational::from_integer(c.into()))
        .collect();
    let lambda = -(&x0 / &y0);
    let [a1, a2, a3, a4, a6] = &curve.a;
    let zero = BigRational::zero();

    // x[t]: coefficient of q^(t-2); y[t]: of q^(t-3)
    let mut x = vec![x0.clone()];
    let mut y = vec![y0.clone()];
    let mut s2 = vec![&x0 * &x0]; // X^2 at q^(n-4)
    let mut xy = vec![&x0 * &y0]; // XY at q^(n-5)
    let at = |v: &Vec<BigRational>, i: i64| -> BigRational {
        if i < 0 {
            BigRational::zero()
        } else {
            v[i as usize].clone()
        }
    };
    let x0sq = &x0 * &x0;
    for t in 1..steps as i64 {
        let tu = t as usize;
        let mut s2p = zero.clone();
        let mut s3p = zero.clone();
        let mut y2p = zero.clone();
        for i in 1..tu {
            s2p += &x[i] * &x[tu - i];
            s3p += &x[i] * &s2[tu - i];
            y2p += &y[i] * &y[tu - i];
        }
        let delta = |k: i64| if t == k { BigRational::one() } else { BigRational::zero() };
        // curve equation at q^(t-6); X^3 there is s3p + x0 s2p + 3 x0^2 x_t,
        // Y^2 is y2p + 2 y0 y_t
        let r1 = -(y2p + a1 * at(&xy, t - 1) + a3 * at(&y, t - 3)
            - &s3p
            - &x0 * &s2p
            - a2 * at(&s2, t - 2)
            - a4 * at(&x, t - 4)
            - a6 * delta(6));
        // differential equation at q^(t-2), unknown part (t-2) x_t - 2 l y_t
        let w = |e: i64| -> BigRational {
            let mut v = BigRational::from_integer(2.into()) * at(&y, e + 3) + a1 * at(&x, e + 2);
            if e == 0 {
                v += a3;
            }
            v
        };
        let mut rhs = a1 * at(&x, t - 1) + if t == 3 { a3.clone() } else { zero.clone() };
        for m in 2..=(t + 1) {
            let fm = &f[m as usize];
            if !fm.is_zero() {
                rhs += fm * w(t - 2 - m);
            }
        }
        let r2 = &lambda * rhs;
        // [-3 x0^2, 2 y0; t - 2, -2 l] (x_t, y_t) = (r1, r2)
        let a11 = -BigRational::from_integer(3.into()) * &x0sq;
        let a12 = BigRational::from_integer(2.into()) * &y0;
        let a21 = BigRational::from_integer((t - 2).into());
        let a22 = -BigRational::from_integer(2.into()) * &lambda;
        let det = &a11 * &a22 - &a12 * &a21;
        let xt = (&r1 * &a22 - &a12 * &r2) / &det;
        let yt = (&a11 * &r2 - &a21 * &r1) / &det;
        x.push(xt.clone());
        y.push(yt);
        s2.push(&s2p + BigRational::from_integer(2.into()) * &x0 * &xt);
        let mut c = zero.clone();
        for i in 0..=tu {
            c += &x[i] * &y[tu - i];
        }
        xy.push(c);
    }
    let xs = QSeries::new(-2, x).truncate(trunc);
    let ys = QSeries::new(-3, y).truncate(trunc);
    check_partial(partial_x, &xs)?;
    check_partial(partial_y, &ys)?;
    Ok((xs, ys))
}

fn check_partial(partial: &QSeries, full: &QSeries) -> Result<()> {
    for (e, c) in partial.terms() {
        if e >= full.trunc() {
            break;
        }
        if full.coefficient(e)? != c {
            return Err(Error::InconsistentPartial { exponent: e });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x011() -> Weierstrass {
        Weierstrass::parse("Y^2 + Y = X^3 - X^2 - 10X - 20").unwrap()
    }

    #[test]
    fn parse_weierstrass() {
        assert_eq!(x011(), Weierstrass::new([0, -1, 1, -10, -20]));
        assert!(Weierstrass::parse("Y^2 = X^4 + 1").is_err());
    }

    #[test]
    fn level_11_newform() {
        // q prod (1 - q^n)^2 (1 - q^11n)^2
        let a = newform_coefficients(&x011(), 11, 14).unwrap();
        assert_eq!(&a[1..14], &[1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4]);
    }

    #[test]
    fn level_11_generators() {
        let px = QSeries::from_i64s(-2, &[1, 2, 4, 5, 8, 1, 7, -11]);
        let py = QSeries::from_i64s(-3, &[1, 3, 7, 12, 17, 26, 19, 37, -15]);
        let (x, y) = modular_parametrization(&x011(), 11, &px, &py, 40).unwrap();
        assert_eq!(x.truncate(6), px);
        assert_eq!(y.truncate(6), py);
        assert!(x011().poly().eval_series(&x, &y).is_zero());
        let bad = QSeries::from_i64s(-2, &[1, 2, 4, 5, 8, 1, 7, -12]);
        assert_eq!(
            modular_parametrization(&x011(), 11, &bad, &py, 40),
            Err(Error::InconsistentPartial { exponent: 5 })
        );
    }
}

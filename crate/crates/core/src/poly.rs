//! Bivariate polynomials, quotients of them, and a few univariate helpers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::fmt_rational;
use crate::series::QSeries;

/// Graded-lex comparison of exponent pairs `(i, j)` for `x^i y^j`, x > y.
pub fn grlex(a: &(u32, u32), b: &(u32, u32)) -> Ordering {
    (a.0 + a.1).cmp(&(b.0 + b.1)).then(a.0.cmp(&b.0))
}

/// Polynomial in `x`, `y` with rational coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BiPoly {
    pub fn zero() -> BiPoly {
        BiPoly::default()
    }

    pub fn constant(c: BigRational) -> BiPoly {
        BiPoly::from_terms([((0, 0), c)])
    }

    pub fn x() -> BiPoly {
        BiPoly::from_terms([((1, 0), BigRational::one())])
    }

    pub fn y() -> BiPoly {
        BiPoly::from_terms([((0, 1), BigRational::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigRational)>>(it: I) -> BiPoly {
        let mut p = BiPoly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn from_int_terms(terms: &[((u32, u32), i64)]) -> BiPoly {
        BiPoly::from_terms(terms.iter().map(|&(e, c)| (e, BigRational::from_integer(c.into()))))
    }

    /// `sum_k c_k x^k`, coefficients low to high.
    pub fn from_univariate_x(coeffs: &[BigRational]) -> BiPoly {
        BiPoly::from_terms(coeffs.iter().enumerate().map(|(k, c)| ((k as u32, 0), c.clone())))
    }

    pub fn add_term(&mut self, e: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Terms in decreasing graded-lex order.
    pub fn sorted_terms(&self) -> Vec<((u32, u32), BigRational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (*e, c.clone())).collect();
        v.sort_by(|a, b| grlex(&b.0, &a.0));
        v
    }

    pub fn leading_term(&self) -> Option<((u32, u32), BigRational)> {
        self.terms
            .iter()
            .max_by(|a, b| grlex(a.0, b.0))
            .map(|(e, c)| (*e, c.clone()))
    }

    pub fn scale(&self, c: &BigRational) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut p = BiPoly::zero();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                p.add_term((a.0 + b.0, a.1 + b.1), c * d);
            }
        }
        p
    }

    /// `(l, content)` with `l` the lcm of denominators and `content` the gcd
    /// of the cleared numerators.
    fn integer_scaling(&self) -> BigRational {
        let l = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let g = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&l / c.denom()))));
        if g.is_zero() {
            return BigRational::one();
        }
        BigRational::new(l, g)
    }

    /// Integer coefficients, content 1, positive graded-lex leading coefficient.
    pub fn canonical(&self) -> BiPoly {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let mut s = self.integer_scaling();
        if self.leading_term().unwrap().1.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn is_canonical(&self) -> bool {
        self == &self.canonical()
    }

    /// Same polynomial up to a nonzero rational factor.
    pub fn proportional(&self, other: &BiPoly) -> bool {
        self.canonical() == other.canonical()
    }

    /// Partial derivative in `y`.
    pub fn derivative_y(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms()
                .filter(|(&(_, j), _)| j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * BigRational::from_integer(BigInt::from(j)))),
        )
    }

    pub fn eval_point(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let xs = powers(x, self.deg_x().unwrap_or(0));
        let ys = powers(y, self.deg_y().unwrap_or(0));
        let mut s = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            s += c * &xs[i as usize] * &ys[j as usize];
        }
        s
    }

    /// `p(X, Y)` as a series. Powers are built once; the polynomial is
    /// grouped by powers of `y` so each group costs one series product.
    pub fn eval_series(&self, x: &QSeries, y: &QSeries) -> QSeries {
        let xs = series_powers(x, self.deg_x().unwrap_or(0));
        let ys = series_powers(y, self.deg_y().unwrap_or(0));
        self.eval_with_powers(&xs, &ys)
    }

    pub(crate) fn eval_with_powers(&self, xs: &[QSeries], ys: &[QSeries]) -> QSeries {
        let trunc = xs.last().unwrap().trunc().min(ys.last().unwrap().trunc());
        let mut total: Option<QSeries> = None;
        for j in 0..=self.deg_y().unwrap_or(0) {
            let row: Vec<(&BigRational, &QSeries)> = self
                .terms
                .iter()
                .filter(|((_, jj), _)| *jj == j)
                .map(|((i, _), c)| (c, &xs[*i as usize]))
                .collect();
            if row.is_empty() {
                continue;
            }
            let part = linear_combination(&row).mul(&ys[j as usize]);
            total = Some(match total {
                None => part,
                Some(t) => &t + &part,
            });
        }
        total.unwrap_or_else(|| QSeries::zero(trunc.max(0)))
    }

    /// Coefficients of `y^j` as univariate polynomials in `x` (low to high).
    pub fn y_coefficients(&self) -> Vec<Vec<BigRational>> {
        let dy = self.deg_y().unwrap_or(0) as usize;
        let mut out = vec![Vec::new(); dy + 1];
        for (&(i, j), c) in &self.terms {
            let v = &mut out[j as usize];
            if v.len() <= i as usize {
                v.resize(i as usize + 1, BigRational::zero());
            }
            v[i as usize] = c.clone();
        }
        out
    }

    /// Parses `3*x^2*y - 5/2*y + 7`; the variables are `x` and `y`
    /// (`X`, `Y` are accepted too).
    pub fn parse(s: &str) -> Result<BiPoly> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = BiPoly::zero();
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (k, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && k > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-BigRational::one(), b.to_string()),
                None => (BigRational::one(), t.trim_start_matches('+').to_string()),
            };
            let (c, i, j) = parse_monomial(&body, sign)?;
            p.add_term((i, j), c);
        }
        Ok(p)
    }
}

/// One product of factors such as `3/2*x^2*y`, `10X` or `x^2y^3`.
fn parse_monomial(body: &str, sign: BigRational) -> Result<(BigRational, u32, u32)> {
    let bad = || Error::Parse(format!("cannot parse term {body:?}"));
    let chars: Vec<char> = body.chars().collect();
    let (mut c, mut i, mut j) = (sign, 0u32, 0u32);
    let mut k = 0;
    let mut seen = false;
    while k < chars.len() {
        let ch = chars[k];
        if ch == '*' {
            k += 1;
            continue;
        }
        let start = k;
        let is_var = matches!(ch, 'x' | 'X' | 'y' | 'Y');
        if is_var {
            k += 1;
        } else {
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '/') {
                k += 1;
            }
            if k == start {
                return Err(bad());
            }
        }
        let base: String = chars[start..k].iter().collect();
        let mut exp = 1u32;
        if k < chars.len() && chars[k] == '^' {
            let e0 = k + 1;
            k = e0;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[e0..k].iter().collect();
            exp = digits.parse().map_err(|_| bad())?;
        }
        match base.as_str() {
            "x" | "X" => i += exp,
            "y" | "Y" => j += exp,
            num => c *= crate::rational::pow(&crate::rational::parse_rational(num)?, exp),
        }
        seen = true;
    }
    if !seen {
        return Err(bad());
    }
    Ok((c, i, j))
}

impl BiPoly {
    /// Text form with the given variable names.
    pub fn display_vars(&self, x: &str, y: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, ((i, j), c)) in self.sorted_terms().into_iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                parts.push(fmt_rational(&mag));
            }
            for (v, e) in [(x, i), (y, j)] {
                match e {
                    0 => {}
                    1 => parts.push(v.into()),
                    _ => parts.push(format!("{v}^{e}")),
                }
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_vars("x", "y"))
    }
}

fn powers(x: &BigRational, n: u32) -> Vec<BigRational> {
    let mut v = vec![BigRational::one()];
    for k in 1..=n as usize {
        let next = &v[k - 1] * x;
        v.push(next);
    }
    v
}

/// `[1, s, s^2, ..., s^n]`, each at the relative precision of `s`.
pub fn series_powers(s: &QSeries, n: u32) -> Vec<QSeries> {
    let rel = s.known_len() as i64;
    let mut v = vec![QSeries::one(rel)];
    for k in 1..=n as usize {
        let next = if k == 1 { s.clone() } else { v[k - 1].mul(s) };
        v.push(next);
    }
    v
}

/// `sum c_k s_k` over a shared window, clearing denominators once.
pub fn linear_combination(items: &[(&BigRational, &QSeries)]) -> QSeries {
    let trunc = items.iter().map(|(_, s)| s.trunc()).min().unwrap();
    let val = items.iter().map(|(_, s)| s.valuation()).min().unwrap().min(trunc);
    let den = items
        .iter()
        .fold(BigInt::one(), |acc, (c, s)| acc.lcm(&(c.denom() * s.denominator())));
    let mut num = vec![BigInt::zero(); (trunc - val) as usize];
    for (c, s) in items {
        if s.is_zero() || c.is_zero() {
            continue;
        }
        let f = c.numer() * (&den / (c.denom() * s.denominator()));
        for (k, a) in s.numerators().iter().enumerate() {
            let e = s.valuation() + k as i64;
            if e >= trunc {
                break;
            }
            if !a.is_zero() {
                num[(e - val) as usize] += a * &f;
            }
        }
    }
    QSeries::from_parts(val, num, den)
}

/// Quotient `num / den` of bivariate polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalExpr {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl RationalExpr {
    /// Joint content 1, integer coefficients, denominator with positive
    /// graded-lex leading coefficient.
    pub fn new(num: BiPoly, den: BiPoly) -> Result<RationalExpr> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let both = BiPoly::from_terms(
            num.terms()
                .map(|(&(i, j), c)| ((i, 2 * j + 1), c.clone()))
                .chain(den.terms().map(|(&(i, j), c)| ((i, 2 * j), c.clone()))),
        );
        let mut s = both.integer_scaling();
        if den.leading_term().unwrap().1.is_negative() {
            s = -s;
        }
        Ok(RationalExpr { num: num.scale(&s), den: den.scale(&s) })
    }

    pub fn identity_x() -> RationalExpr {
        RationalExpr::new(BiPoly::x(), BiPoly::constant(BigRational::one())).unwrap()
    }

    pub fn eval_point(&self, x: &BigRational, y: &BigRational) -> Result<BigRational> {
        let d = self.den.eval_point(x, y);
        if d.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self.num.eval_point(x, y) / d)
    }

    pub fn eval_series(&self, x: &QSeries, y: &QSeries) -> Result<QSeries> {
        self.num.eval_series(x, y).div(&self.den.eval_series(x, y))
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

// ---------------------------------------------------------------------------
// univariate polynomials over Q, coefficient vectors low to high

pub type UPoly = Vec<BigRational>;

pub fn utrim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn udeg(p: &UPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn umul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    utrim(&mut out);
    out
}

pub fn upow(a: &UPoly, k: u32) -> UPoly {
    let mut r: UPoly = vec![BigRational::one()];
    for _ in 0..k {
        r = umul(&r, a);
    }
    r
}

/// Quotient and remainder; `b` must be nonzero.
pub fn udivrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    let db = udeg(b).expect("division by the zero polynomial");
    let mut r = a.clone();
    utrim(&mut r);
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db)];
    let lb = b[db].clone();
    while let Some(dr) = udeg(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lb;
        for (k, bk) in b[..=db].iter().enumerate() {
            r[dr - db + k] -= &c * bk;
        }
        q[dr - db] = c;
        utrim(&mut r);
    }
    utrim(&mut q);
    (q, r)
}

pub fn umonic(a: &UPoly) -> UPoly {
    match udeg(a) {
        None => Vec::new(),
        Some(d) => {
            let l = a[d].clone();
            a[..=d].iter().map(|c| c / &l).collect()
        }
    }
}

pub fn ugcd(a: &UPoly, b: &UPoly) -> UPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    utrim(&mut x);
    utrim(&mut y);
    while udeg(&y).is_some() {
        let (_, r) = udivrem(&x, &y);
        x = y;
        y = r;
    }
    umonic(&x)
}

pub fn uderiv(a: &UPoly) -> UPoly {
    let mut d: UPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(k.into()))
        .collect();
    utrim(&mut d);
    d
}

/// Yun's squarefree decomposition: monic `f_1, f_2, ...` with
/// `a = lc * prod f_k^k`. Entries equal to 1 are omitted.
pub fn squarefree_decomposition(a: &UPoly) -> Vec<(UPoly, u32)> {
    let mut out = Vec::new();
    if udeg(a).unwrap_or(0) == 0 {
        return out;
    }
    let a = umonic(a);
    let da = uderiv(&a);
    let mut b = ugcd(&a, &da);
    let mut c = udivrem(&a, &b).0;
    let mut d = {
        let t = udivrem(&da, &b).0;
        let mut s = t.clone();
        let dc = uderiv(&c);
        s.resize(s.len().max(dc.len()), BigRational::zero());
        for (k, v) in dc.iter().enumerate() {
            s[k] -= v;
        }
        utrim(&mut s);
        s
    };
    let mut k = 1;
    while udeg(&c).unwrap_or(0) > 0 {
        let f = ugcd(&c, &d);
        if udeg(&f).unwrap_or(0) > 0 {
            out.push((f.clone(), k));
        }
        c = udivrem(&c, &f).0;
        let t = udivrem(&d, &f).0;
        let dc = uderiv(&c);
        let mut s = t;
        s.resize(s.len().max(dc.len()), BigRational::zero());
        for (i, v) in dc.iter().enumerate() {
            s[i] -= v;
        }
        utrim(&mut s);
        d = s;
        k += 1;
        b = umonic(&b);
    }
    let _ = b;
    out
}

/// Primitive integer multiple with positive leading coefficient.
pub fn uprimitive(a: &UPoly) -> Vec<BigInt> {
    let l = a.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut v: Vec<BigInt> = a.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return v;
    }
    let g = if v.last().unwrap().is_negative() { -g } else { g };
    v.iter().map(|c| c / &g).collect()
}

pub fn uto_rational(v: &[BigInt]) -> UPoly {
    v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

/// Formats a univariate polynomial in `var`, highest degree first.
pub fn ufmt(a: &UPoly, var: &str) -> String {
    let p = BiPoly::from_univariate_x(a);
    p.to_string().replace('x', var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn u(v: &[i64]) -> UPoly {
        v.iter().map(|&c| qi(c)).collect()
    }

    #[test]
    fn eval_point_examples() {
        let qx = BiPoly::from_int_terms(&[((2, 0), 25), ((1, 0), 86), ((0, 0), 89)]);
        assert_eq!(qx.eval_point(&qi(5), &qi(0)), qi(1144));
        let s = BiPoly::from_int_terms(&[((2, 0), 1), ((0, 2), 1)]);
        assert_eq!(s.eval_point(&qi(0), &qi(0)), qi(0));
    }

    #[test]
    fn eval_series_example() {
        let xy = BiPoly::from_int_terms(&[((1, 1), 1)]);
        let x = QSeries::from_i64s(-1, &[1, 0, 0, 0]);
        let y = QSeries::from_i64s(1, &[1, 0, 0, 0]);
        let r = xy.eval_series(&x, &y);
        assert_eq!(r.coefficient(0).unwrap(), qi(1));
        assert_eq!(r.coefficient(1).unwrap(), qi(0));
    }

    #[test]
    fn canonical_form() {
        let p = BiPoly::from_terms([((0, 1), q(-1, 2)), ((2, 0), q(1, 2))]);
        let c = p.canonical();
        assert_eq!(c, BiPoly::from_int_terms(&[((2, 0), 1), ((0, 1), -1)]));
        assert!(c.is_canonical());
        assert_eq!(c.to_string(), "x^2 - y");
    }

    #[test]
    fn parse_roundtrip() {
        let p = BiPoly::parse("Y^2 + Y - X^3 + X^2 + 10*X + 20").unwrap();
        assert_eq!(p.to_string(), "-x^3 + x^2 + y^2 + 10*x + y + 20");
        assert_eq!(BiPoly::parse(&p.to_string()).unwrap(), p);
        let r = BiPoly::parse("-3/2*x*y^3 - 7").unwrap();
        assert_eq!(r.coeff(1, 3), q(-3, 2));
        assert_eq!(BiPoly::parse("10X^2Y - 2x").unwrap(), BiPoly::from_int_terms(&[((2, 1), 10), ((1, 0), -2)]));
        assert!(BiPoly::parse("3 + z").is_err());
    }

    #[test]
    fn rational_expr_normalizes() {
        let e = RationalExpr::new(
            BiPoly::from_int_terms(&[((1, 0), 4)]),
            BiPoly::from_int_terms(&[((0, 0), -6)]),
        )
        .unwrap();
        assert_eq!(e.num, BiPoly::from_int_terms(&[((1, 0), -2)]));
        assert_eq!(e.den, BiPoly::from_int_terms(&[((0, 0), 3)]));
        assert!(matches!(
            e.eval_point(&qi(1), &qi(1)),
            Ok(v) if v == q(-2, 3)
        ));
    }

    #[test]
    fn squarefree_parts() {
        // (x^2 + 1)^2 (x - 3)
        let a = umul(&upow(&u(&[1, 0, 1]), 2), &u(&[-3, 1]));
        let dec = squarefree_decomposition(&a);
        assert_eq!(dec, vec![(u(&[-3, 1]), 1), (u(&[1, 0, 1]), 2)]);
        let (qq, r) = udivrem(&a, &u(&[1, 0, 1]));
        assert!(r.is_empty());
        assert_eq!(umul(&qq, &u(&[1, 0, 1])), a);
        assert_eq!(uprimitive(&vec![q(1, 2), q(-3, 4)]), vec![BigInt::from(-2), BigInt::from(3)]);
    }
}

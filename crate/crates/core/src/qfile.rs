//! Plain-text q-series files.
//!
//! ```text
//! # comment
//! qseries v=-2 M=6
//! -2 1
//! -1 2
//! 0 4
//! 3 -11/2
//! ```
//!
//! Exponents must increase strictly and lie in `[v, M)`; absent exponents
//! are zero.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational};
use crate::series::QSeries;

pub fn parse_qseries(text: &str) -> Result<QSeries> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty q-series file".into()))?;
    let (v, m) = parse_header(header)?;
    if m < v {
        return Err(Error::Parse(format!("header has M={m} below v={v}")));
    }
    let mut coeffs = vec![BigRational::zero(); (m - v) as usize];
    let mut last: Option<i64> = None;
    for (no, line) in lines {
        let err = |what: &str| Error::Parse(format!("line {}: {what}: {line:?}", no + 1));
        let mut parts = line.split_whitespace();
        let (Some(e), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `<exponent> <coefficient>`"));
        };
        let e: i64 = e.parse().map_err(|_| err("bad exponent"))?;
        if last.is_some_and(|l| e <= l) {
            return Err(err("exponents must increase"));
        }
        if e < v || e >= m {
            return Err(err("exponent outside [v, M)"));
        }
        coeffs[(e - v) as usize] = parse_rational(c).map_err(|_| err("bad coefficient"))?;
        last = Some(e);
    }
    Ok(QSeries::new(v, coeffs))
}

fn parse_header(line: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("bad q-series header {line:?}"));
    let mut parts = line.split_whitespace();
    if parts.next() != Some("qseries") {
        return Err(bad());
    }
    let mut v = None;
    let mut m = None;
    for p in parts {
        match p.split_once('=') {
            Some(("v", x)) => v = Some(x.parse().map_err(|_| bad())?),
            Some(("M", x)) => m = Some(x.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok((v.ok_or_else(bad)?, m.ok_or_else(bad)?))
}

/// Every coefficient of the window, zeros included.
pub fn format_qseries(s: &QSeries) -> String {
    let mut out = format!("qseries v={} M={}\n", s.valuation(), s.trunc());
    for (e, c) in s.terms() {
        out.push_str(&format!("{e} {}\n", fmt_rational(&c)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn roundtrip() {
        let s = QSeries::new(-2, vec![q(1, 1), q(0, 1), q(-7, 3)]).extend_zeros(4);
        let text = format_qseries(&s);
        assert!(text.starts_with("qseries v=-2 M=4\n-2 1\n-1 0\n0 -7/3\n"));
        assert_eq!(parse_qseries(&text).unwrap(), s);
    }

    #[test]
    fn sparse_and_comments() {
        let s = parse_qseries("# X\nqseries v=-1 M=3\n-1 1\n\n2 5\n").unwrap();
        assert_eq!(s.coefficient(0).unwrap(), q(0, 1));
        assert_eq!(s.coefficient(2).unwrap(), q(5, 1));
        assert_eq!(s.trunc(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_qseries("qseries v=0 M=2\n1 1\n0 1\n").is_err());
        assert!(parse_qseries("qseries v=0 M=2\n2 1\n").is_err());
        assert!(parse_qseries("series v=0 M=2\n").is_err());
        assert!(parse_qseries("qseries v=0 M=2\n0 x\n").is_err());
    }
}

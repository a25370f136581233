//! Reference curves for the isogeny classes that occur at the sporadic
//! levels, with an embedded snapshot and a refresh path from LMFDB records.
//!
//! Snapshot lines read `label | a1,a2,a3,a4,a6 | j_num/j_den | deg1,deg2,...`.

use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::moduli::EllCurve;
use crate::rational::{fmt_rational, parse_rational};

const EMBEDDED: &str = include_str!("../data/curves.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefCurve {
    pub label: String,
    pub ainvs: [BigRational; 5],
    pub short: EllCurve,
    pub j: BigRational,
    pub isogeny_degrees: Vec<u64>,
}

impl RefCurve {
    /// Checks the label shape and that `j` matches the model.
    pub fn new(label: &str, ainvs: [BigRational; 5], j: BigRational, mut degrees: Vec<u64>) -> Result<RefCurve> {
        let mismatch = |reason: String| Error::SchemaMismatch { label: label.to_string(), reason };
        if !valid_label(label) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let short = EllCurve::from_ainvs(&ainvs).map_err(|_| mismatch("singular model".into()))?;
        if short.j_invariant() != j {
            return Err(mismatch(format!("j = {} but the model has j = {}", j, short.j_invariant())));
        }
        degrees.sort_unstable();
        degrees.dedup();
        Ok(RefCurve { label: label.to_string(), ainvs, short, j, isogeny_degrees: degrees })
    }

    pub fn conductor(&self) -> u64 {
        self.label.split('.').next().and_then(|c| c.parse().ok()).unwrap_or(0)
    }

    /// One snapshot line.
    pub fn to_line(&self) -> String {
        let a: Vec<String> = self.ainvs.iter().map(fmt_rational).collect();
        let d: Vec<String> = self.isogeny_degrees.iter().map(u64::to_string).collect();
        format!("{} | {} | {}/{} | {}", self.label, a.join(","), self.j.numer(), self.j.denom(), d.join(","))
    }

    fn parse_line(line: &str) -> Result<RefCurve> {
        let bad = |what: &str| Error::Parse(format!("snapshot line {line:?}: {what}"));
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [label, a, j, d] = fields[..] else {
            return Err(bad("expected four fields"));
        };
        let a: Vec<BigRational> = a.split(',').map(parse_rational).collect::<Result<_>>()?;
        let ainvs: [BigRational; 5] = a.try_into().map_err(|_| bad("expected five a-invariants"))?;
        let degrees = d
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| bad("bad isogeny degree")))
            .collect::<Result<_>>()?;
        RefCurve::new(label, ainvs, parse_rational(j)?, degrees)
    }
}

/// `<conductor>.<class letters><index>`, e.g. `121.a1`.
pub fn valid_label(label: &str) -> bool {
    let Some((cond, rest)) = label.split_once('.') else {
        return false;
    };
    let letters = rest.chars().take_while(|c| c.is_ascii_lowercase()).count();
    let index = &rest[letters..];
    !cond.is_empty()
        && cond.bytes().all(|b| b.is_ascii_digit())
        && !cond.starts_with('0')
        && letters > 0
        && !index.is_empty()
        && index.bytes().all(|b| b.is_ascii_digit())
        && !index.starts_with('0')
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    curves: Vec<RefCurve>,
}

impl Catalog {
    /// The snapshot compiled into the library.
    pub fn embedded() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| Catalog::from_text(EMBEDDED).expect("embedded snapshot is well formed"))
    }

    pub fn from_text(text: &str) -> Result<Catalog> {
        let curves = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(RefCurve::parse_line)
            .collect::<Result<_>>()?;
        Ok(Catalog { curves })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# label | a1,a2,a3,a4,a6 | j | isogeny degrees\n");
        for c in &self.curves {
            out.push_str(&c.to_line());
            out.push('\n');
        }
        out
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        Catalog::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn curves(&self) -> &[RefCurve] {
        &self.curves
    }

    pub fn get(&self, label: &str) -> Result<&RefCurve> {
        self.curves
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn with_j<'a>(&'a self, j: &'a BigRational) -> impl Iterator<Item = &'a RefCurve> + 'a {
        self.curves.iter().filter(move |c| &c.j == j)
    }

    /// Replaces the record with the same label, or appends.
    pub fn upsert(&mut self, curve: RefCurve) {
        match self.curves.iter_mut().find(|c| c.label == curve.label) {
            Some(slot) => *slot = curve,
            None => self.curves.push(curve),
        }
    }
}

/// Looks a label up in the embedded snapshot.
pub fn get_curve(label: &str) -> Result<RefCurve> {
    if !valid_label(label) {
        return Err(Error::UnknownLabel(label.to_string()));
    }
    Catalog::embedded().get(label).cloned()
}

/// Number of non-cuspidal rational points on X0(N) for the sporadic levels.
pub fn expected_point_count(n: u64) -> Result<u32> {
    Ok(match n {
        11 => 3,
        14 => 2,
        15 => 4,
        17 => 2,
        19 => 1,
        21 => 4,
        27 => 1,
        37 => 2,
        43 => 1,
        67 => 1,
        163 => 1,
        _ => return Err(Error::UnknownLevel(n)),
    })
}

pub const SPORADIC_LEVELS: [u64; 11] = [11, 14, 15, 17, 19, 21, 27, 37, 43, 67, 163];

/// Reads one LMFDB `ec_curvedata` API response (`{"data": [record]}`).
pub fn parse_lmfdb_response(label: &str, body: &Value) -> Result<RefCurve> {
    let mismatch = |reason: &str| Error::SchemaMismatch { label: label.to_string(), reason: reason.to_string() };
    let data = body.get("data").and_then(Value::as_array).ok_or_else(|| mismatch("no data array"))?;
    let rec = match data.as_slice() {
        [rec] => rec,
        [] => return Err(mismatch("no record for this label")),
        _ => return Err(mismatch("several records for this label")),
    };
    if let Some(l) = rec.get("lmfdb_label").and_then(Value::as_str) {
        if l != label {
            return Err(mismatch(&format!("record is for {l}")));
        }
    }
    let ainvs: Vec<BigRational> = rec
        .get("ainvs")
        .and_then(Value::as_array)
        .ok_or_else(|| mismatch("missing ainvs"))?
        .iter()
        .map(|v| json_integer(v).map(BigRational::from_integer).ok_or_else(|| mismatch("bad ainvs entry")))
        .collect::<Result<_>>()?;
    let ainvs: [BigRational; 5] = ainvs.try_into().map_err(|_| mismatch("ainvs must have five entries"))?;
    let j = match rec.get("jinv") {
        Some(Value::Array(nd)) if nd.len() == 2 => {
            let n = json_integer(&nd[0]).ok_or_else(|| mismatch("bad jinv"))?;
            let d = json_integer(&nd[1]).ok_or_else(|| mismatch("bad jinv"))?;
            if d == BigInt::from(0) {
                return Err(mismatch("jinv has zero denominator"));
            }
            BigRational::new(n, d)
        }
        Some(Value::String(s)) => parse_rational(s).map_err(|_| mismatch("bad jinv"))?,
        _ => return Err(mismatch("missing jinv")),
    };
    let degrees: Vec<u64> = rec
        .get("isogeny_degrees")
        .and_then(Value::as_array)
        .ok_or_else(|| mismatch("missing isogeny_degrees"))?
        .iter()
        .map(|v| v.as_u64().ok_or_else(|| mismatch("bad isogeny degree")))
        .collect::<Result<_>>()?;
    RefCurve::new(label, ainvs, j, degrees)
}

fn json_integer(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse().ok(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// Fetches every label, merges the records into the snapshot at `path` (the
/// embedded one when the file is absent) and replaces the file atomically.
/// An empty label list leaves the file untouched.
pub fn refresh_snapshot<F>(path: &Path, labels: &[String], mut fetch: F) -> Result<Catalog>
where
    F: FnMut(&str) -> Result<RefCurve>,
{
    let mut cat = if path.exists() { Catalog::load(path)? } else { Catalog::embedded().clone() };
    if labels.is_empty() {
        return Ok(cat);
    }
    for label in labels {
        let rec = fetch(label)?;
        if rec.label != *label {
            return Err(Error::SchemaMismatch { label: label.clone(), reason: format!("record is for {}", rec.label) });
        }
        cat.upsert(rec);
    }
    let text = cat.to_text();
    // round-trip before replacing anything
    if Catalog::from_text(&text)? != cat {
        return Err(Error::SchemaMismatch { label: String::new(), reason: "snapshot does not round-trip".into() });
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_parses_and_roundtrips() {
        let cat = Catalog::embedded();
        assert_eq!(cat.curves().len(), 22);
        assert_eq!(&Catalog::from_text(&cat.to_text()).unwrap(), cat);
    }

    #[test]
    fn lookups() {
        let c = get_curve("26569.a1").unwrap();
        assert_eq!(c.j, BigRational::from_integer(-BigInt::from(640320u64).pow(3)));
        assert!(matches!(get_curve("0.z9"), Err(Error::UnknownLabel(_))));
        assert!(matches!(get_curve("11.a9"), Err(Error::UnknownLabel(_))));
        assert_eq!(get_curve("121.a1").unwrap().conductor(), 121);
    }

    #[test]
    fn point_counts() {
        assert_eq!(expected_point_count(11).unwrap(), 3);
        assert_eq!(expected_point_count(15).unwrap(), 4);
        assert_eq!(expected_point_count(163).unwrap(), 1);
        assert_eq!(expected_point_count(12), Err(Error::UnknownLevel(12)));
    }

    #[test]
    fn labels() {
        assert!(valid_label("121.a1"));
        assert!(valid_label("14450.b2"));
        assert!(!valid_label("0.z9"));
        assert!(!valid_label("121a1"));
        assert!(!valid_label("121.1"));
        assert!(!valid_label("121.a"));
    }

    #[test]
    fn lmfdb_record() {
        let body: Value = serde_json::from_str(
            r#"{"data":[{"lmfdb_label":"121.a1","ainvs":[1,1,1,-30,-76],"jinv":[-24729001,1],"isogeny_degrees":[1,11]}]}"#,
        )
        .unwrap();
        assert_eq!(&parse_lmfdb_response("121.a1", &body).unwrap(), Catalog::embedded().get("121.a1").unwrap());
        let empty: Value = serde_json::from_str(r#"{"data":[]}"#).unwrap();
        assert!(matches!(parse_lmfdb_response("121.z1", &empty), Err(Error::SchemaMismatch { label, .. }) if label == "121.z1"));
        let wrong_j: Value = serde_json::from_str(
            r#"{"data":[{"ainvs":[1,1,1,-30,-76],"jinv":[1,1],"isogeny_degrees":[1,11]}]}"#,
        )
        .unwrap();
        assert!(matches!(parse_lmfdb_response("121.a1", &wrong_j), Err(Error::SchemaMismatch { .. })));
    }

    #[test]
    fn refresh_is_atomic_and_idempotent() {
        let dir = std::env::temp_dir().join(format!("x0n-cat-{}", std::process::id()));
        let path = dir.join("curves.txt");
        let _ = std::fs::remove_file(&path);
        let none: Vec<String> = Vec::new();
        refresh_snapshot(&path, &none, |_| unreachable!()).unwrap();
        assert!(!path.exists());
        let labels = vec!["121.a1".to_string()];
        let cat = refresh_snapshot(&path, &labels, |l| Catalog::embedded().get(l).cloned()).unwrap();
        assert_eq!(&cat, Catalog::embedded());
        assert_eq!(Catalog::load(&path).unwrap().get("121.a1").unwrap(), &get_curve("121.a1").unwrap());
        let bad = refresh_snapshot(&path, &["121.z1".to_string()], |l| {
            Err(Error::SchemaMismatch { label: l.into(), reason: "no record".into() })
        });
        assert!(matches!(bad, Err(Error::SchemaMismatch { label, .. }) if label == "121.z1"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

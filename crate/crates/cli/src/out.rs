//! JSON shapes. Objects serialize with sorted keys and every rational is a
//! `"p/q"` string, so parsing and re-serializing any output is byte-identical.

use num_rational::BigRational;
use serde_json::{json, Value};

use x0n::catalog::RefCurve;
use x0n::moduli::{EllCurve, Identification, IsogenyPair};
use x0n::poly::{BiPoly, RationalExpr, UPoly};
use x0n::series::QSeries;
use x0n::tables::{Status, TableReport};

pub fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

/// Always `p/q`, also for integers.
pub fn rq(r: &BigRational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

pub fn series(s: &QSeries) -> Value {
    let coeffs: Vec<Value> = s.terms().map(|(_, c)| rq(&c)).collect();
    json!({ "valuation": s.valuation(), "trunc": s.trunc(), "coefficients": coeffs })
}

/// Terms in graded-lex order, leading term first.
pub fn bipoly(p: &BiPoly) -> Value {
    let terms: Vec<Value> = p.sorted_terms().iter().map(|((i, j), c)| json!({ "i": i, "j": j, "c": rq(c) })).collect();
    json!({ "text": p.display_vars("x", "y"), "terms": terms })
}

pub fn expr(e: &RationalExpr) -> Value {
    json!({
        "num": e.num.display_vars("X", "Y"),
        "den": e.den.display_vars("X", "Y"),
    })
}

/// Coefficients from the constant term up.
pub fn upoly(p: &UPoly) -> Value {
    Value::Array(p.iter().map(rq).collect())
}

fn curve(e: &EllCurve) -> Value {
    json!({ "a4": rq(&e.a), "a6": rq(&e.b), "j": rq(&e.j_invariant()) })
}

pub fn identification(id: &Identification) -> Value {
    json!({ "label": id.label, "d": id.d.to_string(), "label_p": id.label_p, "d_p": id.d_p.to_string() })
}

pub fn pair(p: &IsogenyPair) -> Value {
    let mut v = json!({
        "level": p.level,
        "point": [rq(&p.point.0), rq(&p.point.1)],
        "domain": curve(&p.domain),
        "codomain": curve(&p.codomain),
    });
    if let Some(id) = &p.identification {
        v["identification"] = identification(id);
    }
    v
}

pub fn ref_curve(c: &RefCurve) -> Value {
    json!({
        "label": c.label,
        "ainvs": c.ainvs.iter().map(rq).collect::<Vec<_>>(),
        "short": curve(&c.short),
        "j": rq(&c.j),
        "isogeny_degrees": c.isogeny_degrees,
    })
}

pub fn report(which: u8, r: &TableReport) -> Value {
    let cells: Vec<Value> = r
        .cells
        .iter()
        .map(|c| {
            let (status, detail) = match &c.status {
                Status::Pass => ("PASS", None),
                Status::Fail(w) => ("FAIL", Some(w.clone())),
                Status::Skip(w) => ("BUDGET-SKIP", Some(w.clone())),
            };
            json!({
                "level": c.level,
                "row": c.row + 1,
                "route": c.route,
                "cell": c.name,
                "status": status,
                "detail": detail,
                "note": c.note,
            })
        })
        .collect();
    let failed = r.cells.iter().filter(|c| matches!(c.status, Status::Fail(_))).count();
    json!({
        "table": which,
        "cells": cells,
        "passed": r.count(true),
        "failed": failed,
        "skipped": r.skipped().count(),
    })
}

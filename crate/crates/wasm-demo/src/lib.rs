//! Browser bindings: q-expansions, point evaluation on a level-N model and
//! the Heegner computation. Every call returns a JSON string.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use x0n::catalog::Catalog;
use x0n::error::Error;
use x0n::forms::{e2n, eisenstein, invariant_quadruple};
use x0n::heegner::{cm_invariants_with, heegner_tau, E2Normalization};
use x0n::moduli::{build_model_with, evaluate_pair, identify, CurveModel, EllCurve, ModelOptions};
use x0n::rational::{fmt_rational, parse_rational};

/// Largest level the page will build a model for; beyond this a browser tab
/// spends minutes in exact arithmetic.
pub const MAX_MODEL_LEVEL: u64 = 21;

thread_local! {
    static MODELS: RefCell<HashMap<u64, Rc<CurveModel>>> = RefCell::new(HashMap::new());
}

fn err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn curve(e: &EllCurve) -> Value {
    json!({ "a4": fmt_rational(&e.a), "a6": fmt_rational(&e.b), "j": fmt_rational(&e.j_invariant()) })
}

/// Coefficients of `form` (E4, E6, E2N, a4, a6, a4p, a6p) below `q^order`.
#[wasm_bindgen]
pub fn expand(form: &str, level: u32, order: u32) -> Result<String, JsError> {
    let (n, m) = (level as u64, order as usize);
    if n < 2 || m == 0 || m > 2000 {
        return Err(JsError::new("need level >= 2 and 1 <= order <= 2000"));
    }
    let s = match form {
        "E4" => eisenstein(4, m),
        "E6" => eisenstein(6, m),
        "E2N" => e2n(n, m),
        "a4" | "a6" | "a4p" | "a6p" => {
            let q = invariant_quadruple(n, m);
            match form {
                "a4" => q.a4,
                "a6" => q.a6,
                "a4p" => q.a4p,
                _ => q.a6p,
            }
        }
        _ => return Err(JsError::new(&format!("unknown form {form:?}"))),
    };
    let terms: Vec<Value> = s.terms().map(|(e, c)| json!([e, fmt_rational(&c)])).collect();
    Ok(json!({ "form": form, "level": n, "terms": terms }).to_string())
}

fn model(n: u64) -> Result<Rc<CurveModel>, JsError> {
    if let Some(m) = MODELS.with(|c| c.borrow().get(&n).cloned()) {
        return Ok(m);
    }
    let m = Rc::new(build_model_with(n, &ModelOptions::default()).map_err(err)?);
    MODELS.with(|c| c.borrow_mut().insert(n, m.clone()));
    Ok(m)
}

/// The isogenous pair at the point `(a4, a6)` of the level-`level` model,
/// with catalog labels when the curves are known.
#[wasm_bindgen]
pub fn evaluate(level: u32, a4: &str, a6: &str) -> Result<String, JsError> {
    let n = level as u64;
    if !(2..=MAX_MODEL_LEVEL).contains(&n) {
        return Err(JsError::new(&format!("the demo builds models for levels 2..={MAX_MODEL_LEVEL}")));
    }
    let x = parse_rational(a4).map_err(err)?;
    let y = parse_rational(a6).map_err(err)?;
    let m = model(n)?;
    let pair = evaluate_pair(&m, &x, &y).map_err(err)?;
    let id = identify(&pair, Catalog::embedded()).ok().map(|id| {
        json!({ "label": id.label, "d": id.d.to_string(), "label_p": id.label_p, "d_p": id.d_p.to_string() })
    });
    Ok(json!({
        "level": n,
        "relation_degree": m.relation.total_degree(),
        "domain": curve(&pair.domain),
        "codomain": curve(&pair.codomain),
        "identification": id,
    })
    .to_string())
}

/// Exact invariants at the Heegner point of level 19, 43, 67 or 163.
#[wasm_bindgen]
pub fn heegner(level: u32, prec: u32, difference: bool) -> Result<String, JsError> {
    let n = level as u64;
    let tau = heegner_tau(n).map_err(err)?;
    let norm = if difference { E2Normalization::Difference } else { E2Normalization::Eta };
    let r = cm_invariants_with(n, &tau, prec.clamp(64, 8000), norm).map_err(err)?;
    let [a4, a6, a4p, a6p] = &r.quadruple;
    let dom = EllCurve::new(a4.clone(), a6.clone()).map_err(err)?;
    Ok(json!({
        "level": n,
        "terms": r.terms_used,
        "residual": r.residual_hex(),
        "a4": fmt_rational(a4),
        "a6": fmt_rational(a6),
        "a4p": fmt_rational(a4p),
        "a6p": fmt_rational(a6p),
        "j": fmt_rational(&dom.j_invariant()),
    })
    .to_string())
}

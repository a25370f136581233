//! The bindings called natively; error paths need a JS host and are
//! exercised from the page.

use serde_json::Value;
use x0n_wasm::{evaluate, expand, heegner};

fn parse(s: Result<String, wasm_bindgen::JsError>) -> Value {
    serde_json::from_str(&s.unwrap_or_else(|_| panic!("binding failed"))).unwrap()
}

#[test]
fn expand_returns_terms() {
    let v = parse(expand("a4", 11, 6));
    assert_eq!(v["terms"][5], serde_json::json!([5, "-106231824/78125"]));
}

#[test]
fn evaluate_identifies_the_pair() {
    let v = parse(evaluate(15, "-675", "-79650"));
    assert_eq!(v["codomain"]["a4"], "211/15");
    assert_eq!(v["codomain"]["a6"], "-6214/675");
    assert_eq!(v["identification"]["label"], "50.a1");
}

#[test]
fn heegner_163_printed_normalization() {
    let v = parse(heegner(163, 4000, true));
    assert_eq!(v["a6p"], "-185801/3420558477361152");
    assert_eq!(v["j"], "-262537412640768000");
}

#[test]
fn page_calls_the_exported_functions() {
    let html = include_str!("../www/index.html");
    for f in ["expand(", "evaluate(", "heegner(", "./pkg/x0n_wasm.js"] {
        assert!(html.contains(f), "{f}");
    }
}

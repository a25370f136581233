use x0n::catalog::Catalog;
use x0n::moduli::{build_model, evaluate_pair, EllCurve};
use x0n::relations::{check_expression, check_relation};
use x0n::tables::rows;

#[test]
fn every_table_label_resolves_offline_with_an_n_isogeny() {
    let cat = Catalog::embedded();
    for which in [1, 3] {
        for r in rows(which).unwrap() {
            for label in [r.label, r.label_p] {
                let c = cat.get(label).unwrap();
                assert!(
                    c.isogeny_degrees.iter().any(|d| d % r.level == 0),
                    "{label}: no degree divisible by {}",
                    r.level
                );
            }
        }
    }
}

#[test]
fn level_11_model_is_self_consistent() {
    let m = build_model(11).unwrap();
    let q = &m.quadruple;
    check_relation(&m.relation, &q.a4, &q.a6).unwrap();
    check_expression(&m.map_a4p, &q.a4p, &q.a4, &q.a6).unwrap();
    check_expression(&m.map_a6p, &q.a6p, &q.a4, &q.a6).unwrap();
    assert_eq!(m.relation.total_degree(), Some(6));
    assert!(m.relation.is_canonical());
    // determinism
    assert_eq!(build_model(11).unwrap().relation, m.relation);
}

#[test]
fn table_1_rows_are_fricke_duals() {
    let t = rows(1).unwrap();
    let j = |a: &str, b: &str| EllCurve::new(a.parse().unwrap(), b.parse().unwrap()).unwrap().j_invariant();
    // rows 1 and 2 swap domain and codomain up to isomorphism
    assert_eq!(j(t[0].a4p, t[0].a6p), j(t[1].a4, t[1].a6));
    assert_eq!(j(t[1].a4p, t[1].a6p), j(t[0].a4, t[0].a6));
}

#[test]
fn level_11_rows_evaluate() {
    let m = build_model(11).unwrap();
    for r in rows(3).unwrap().iter().filter(|r| r.level == 11) {
        let [a4, a6, a4p, a6p] = r.invariants();
        let p = evaluate_pair(&m, &a4, &a6).unwrap();
        assert_eq!((p.codomain.a, p.codomain.b), (a4p, a6p));
    }
}

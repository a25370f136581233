//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p x0n --test acceptance [-- 3 5]` runs all criteria or the
//! listed ones. A failure listed in `KNOWN_FAILURES` is still printed as FAIL
//! but does not fail the run, and only if its evidence check also holds.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed};
use proptest::test_runner::{Config, TestRunner};
use x0n::catalog::{Catalog, SPORADIC_LEVELS};
use x0n::forms::invariant_quadruple;
use x0n::heegner::*;
use x0n::moduli::*;
use x0n::poly::{BiPoly, UPoly};
use x0n::rational::{parse_rational, q, qi};
use x0n::relations::find_plane_relation;
use x0n::series::QSeries;
use x0n::tables::{self, x011_model, RunOptions, Status, Twist};

/// Criterion number and the one mismatch it is allowed to report.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    1,
    "a6 q^4: got 29154456/15625, printed 229154456/15625",
)];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 10] = [
        (1, "Eisenstein fidelity", 1, c1_expansions),
        (2, "plane relation N=11", 60, c2_relation),
        (3, "map reconstruction N=11", 300, c3_map),
        (4, "Table 1", 60, c4_table1),
        (5, "Table 3 algebraic levels", 600 * 7, c5_table3),
        (6, "Heegner N=163", 600, c6_heegner163),
        (7, "route agreement", 3600, c7_routes),
        (8, "duality and isogeny degrees", 600, c8_duality),
        (9, "X0(67) quadrics", 60, c9_quadrics),
        (10, "property suites", 600, c10_properties),
    ];
    let mut unexpected = 0;
    for (k, name, limit, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let mut out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed();
        if out.is_ok() && secs > Duration::from_secs(limit) {
            out = Err(format!("took {:.1} s, limit {limit} s", secs.as_secs_f64()));
        }
        match out {
            Ok(detail) => println!("PASS {k} {name} ({:.1} s): {detail}", secs.as_secs_f64()),
            Err(detail) => {
                let known = KNOWN_FAILURES.iter().any(|&(c, d)| c == k && detail.starts_with(d));
                let tag = if known { " [known erratum in the reference values]" } else { "" };
                println!("FAIL {k} {name} ({:.1} s): {detail}{tag}", secs.as_secs_f64());
                if !known {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}

fn rats(items: &[&str]) -> Vec<BigRational> {
    items.iter().map(|s| parse_rational(s).unwrap()).collect()
}

fn ints(items: &[i64]) -> UPoly {
    items.iter().map(|&c| qi(c)).collect()
}

fn check<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

const RELATION_11: &str = "-29241*x^6 - 23955822*x^5 - 1351692*x^4*y + 572544*x^3*y^2 - 15183229435*x^4 \
    + 7092313360*x^3*y - 1934162736*x^2*y^2 + 235016704*x*y^3 - 10061824*y^4 \
    + 103990630700*x^3 - 301970625000*x^2*y + 47640642720*x*y^2 - 4119072320*y^3 \
    - 2009614509375*x^2 + 2923075650000*x*y - 2204530508400*y^2 \
    + 1296871230050*x - 5894869227500*y + 285311670611";

const X11: [&str; 6] = ["-3/25", "-3528/125", "-75816/625", "1097856/3125", "593496/3125", "-106231824/78125"];
const Y11: [&str; 6] = ["2/125", "-5112/625", "-649512/3125", "-485856/3125", "229154456/15625", "634190256/390625"];

fn c1_expansions() -> Outcome {
    let qd = invariant_quadruple(11, 6);
    let mut bad = Vec::new();
    for (name, s, printed) in [("a4", &qd.a4, X11), ("a6", &qd.a6, Y11)] {
        for (e, want) in rats(&printed).into_iter().enumerate() {
            let got = s.coefficient(e as i64).map_err(|e| e.to_string())?;
            if got != want {
                bad.push(format!("{name} q^{e}: got {got}, printed {want}"));
            }
        }
    }
    if bad.is_empty() {
        return Ok("12 coefficients match".into());
    }
    // independent evidence: the degree-6 relation kills the computed series
    // through q^5 but not the printed ones
    let rel = BiPoly::parse(RELATION_11).unwrap();
    let printed = |c: [&str; 6]| QSeries::new(0, rats(&c));
    let on_printed = rel.eval_series(&printed(X11), &printed(Y11));
    let on_computed = rel.eval_series(&qd.a4, &qd.a6);
    let evidence = format!(
        "the degree-6 relation vanishes on the computed series through q^{}; on the printed series it first fails at q^{}",
        on_computed.trunc() - 1,
        on_printed.valuation()
    );
    if bad.len() != 1 || !on_computed.is_zero() || on_printed.valuation() != 4 {
        return Err(format!("{} mismatches: {}; {evidence}", bad.len(), bad.join("; ")));
    }
    Err(format!("{}; {evidence}", bad[0]))
}

fn c2_relation() -> Outcome {
    let qd = invariant_quadruple(11, default_order(default_dmax(11)));
    let got = find_plane_relation(&qd.a4, &qd.a6, default_dmax(11)).map_err(|e| e.to_string())?;
    let printed = BiPoly::parse(RELATION_11).unwrap();
    if !got.proportional(&printed) {
        return Err(format!("computed relation differs: {got}"));
    }
    check("leading coefficient", got.coeff(6, 0).abs(), qi(29241))?;
    check("constant", got.coeff(0, 0).abs(), qi(285311670611))?;
    Ok(format!(
        "all {} printed terms match up to sign, and there are no others (19 terms, not 22)",
        printed.num_terms()
    ))
}

fn c3_map() -> Outcome {
    let model = x011_model(&ModelOptions::default()).map_err(|e| e.to_string())?;
    let ext = model.external.as_ref().ok_or("no external maps")?;
    let s = ext.split().ok_or("maps are not in the Q^2 / Q^3 shape")?;
    check("Q", s.q.clone(), ints(&[89, 86, 25]))?;
    check("A_Y", s.a_y.clone(), ints(&[-107568, -106344, -17640]))?;
    check("A_X", s.a_x.clone(), ints(&[-738867, -881916, -445362, -93972, -75]))?;
    check("B_Y", s.b_y.clone(), ints(&[-45566928, -85057272, -51849288, -10626696, -127800]))?;
    check(
        "B_X",
        s.b_x.clone(),
        ints(&[-220844302, -408243108, -317360754, -136910656, -33335514, -3372780, 250]),
    )?;
    Ok(format!(
        "Q = 25X^2 + 86X + 89 and A_Y, A_X, B_Y, B_X exact; generators known to O(q^{}) and checked against the curve equation",
        ext.x.trunc()
    ))
}

fn report_ok(r: &tables::TableReport) -> Result<(), String> {
    let bad: Vec<String> = r.cells.iter().filter(|c| matches!(c.status, Status::Fail(_))).map(|c| c.to_string()).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

fn c4_table1() -> Outcome {
    let r = tables::run_table1(&RunOptions::default());
    report_ok(&r)?;
    Ok(format!("{} cells, 3 points with labels and twists", r.count(true)))
}

fn c5_table3() -> Outcome {
    let mut times = Vec::new();
    let mut rows = 0;
    for n in [11u64, 14, 15, 17, 19, 21, 27] {
        let t = Instant::now();
        let mut r = tables::run_table3(&[n], &RunOptions::default()).map_err(|e| e.to_string())?;
        r.cells.retain(|c| c.route == "algebraic");
        report_ok(&r)?;
        if r.count(true) != r.cells.len() || r.cells.is_empty() {
            return Err(format!("N={n}: not every cell ran"));
        }
        let secs = t.elapsed().as_secs_f64();
        if secs > 600.0 {
            return Err(format!("N={n} took {secs:.1} s"));
        }
        rows += r.cells.iter().filter(|c| c.name == "a4'").count();
        times.push(format!("{n}: {secs:.1} s"));
    }
    Ok(format!("{rows} rows exact; {}", times.join(", ")))
}

fn c6_heegner163() -> Outcome {
    let row = tables::rows(3).unwrap().iter().find(|r| r.level == 163).unwrap();
    let tau = heegner_tau(163).map_err(|e| e.to_string())?;
    let r = cm_invariants_with(163, &tau, 4000, row.normalization).map_err(|e| e.to_string())?;
    check("quadruple", &r.quadruple, &row.invariants())?;
    check("a6'", r.quadruple[3].clone(), q(-185801, 1) / parse_rational("3420558477361152").unwrap())?;
    let bound = BigRational::new(1.into(), BigInt::from(10u32).pow(600u32));
    if r.imag_residual >= bound {
        return Err(format!("imaginary residual {} is not below 1e-600", r.imag_residual_hex()));
    }
    let [a4, a6, a4p, a6p] = r.quadruple.clone();
    let (e, ep) = (EllCurve::new(a4, a6).unwrap(), EllCurve::new(a4p, a6p).unwrap());
    check("j", e.j_invariant(), -qi(640320).pow(3u32))?;
    let base = Catalog::embedded().get("26569.a1").map_err(|e| e.to_string())?.short.clone();
    let d = twist_factor(&base, &e).map_err(|e| e.to_string())?;
    let dp = twist_factor(&base, &ep).map_err(|e| e.to_string())?;
    if !same_square_class(&dp, &(&d * BigInt::from(-163))) {
        return Err(format!("D' = {dp} is not -163 * D = {}", &d * BigInt::from(-163)));
    }
    let Twist::Either(a, b) = row.d else { return Err("fixture lost the 4344/4544 pair".into()) };
    let verdict = match (same_square_class(&d, &a.into()), same_square_class(&d, &b.into())) {
        (true, false) => a,
        (false, true) => b,
        _ => return Err(format!("D = {d} matches neither {a} nor {b}")),
    };
    // the default normalization gives the twist by -6 of the printed pair
    let eta = cm_invariants(163, 4000).map_err(|e| e.to_string())?;
    let tw = quadratic_twist(&EllCurve::new(eta.quadruple[0].clone(), eta.quadruple[1].clone()).unwrap(), &BigInt::from(-6))
        .map_err(|e| e.to_string())?;
    if twist_factor(&tw, &e).map_err(|e| e.to_string())? != BigInt::from(1) {
        return Err("default normalization is not the -6 twist of the printed one".into());
    }
    Ok(format!(
        "four invariants exact, imaginary residual {}, j = -640320^3, D = {d}, D' = {dp} = -163 D mod squares; {verdict} is correct ({} terms)",
        r.imag_residual_hex(),
        r.terms_used
    ))
}

fn c7_routes() -> Outcome {
    let r = tables::run_table3(&[19, 37, 43, 67], &RunOptions::default()).map_err(|e| e.to_string())?;
    report_ok(&r)?;
    for n in [19u64, 43, 67] {
        let ok = r.cells.iter().filter(|c| c.level == n && c.route == "heegner").all(|c| c.status == Status::Pass);
        let any = r.cells.iter().any(|c| c.level == n && c.route == "heegner" && c.name == "a6'");
        if !(ok && any) {
            return Err(format!("Heegner route incomplete at N={n}"));
        }
    }
    let mut algebraic = Vec::new();
    for n in [37u64, 43, 67] {
        let cells: Vec<_> = r.cells.iter().filter(|c| c.level == n && c.route == "algebraic").collect();
        let skip = cells.iter().find_map(|c| match &c.status {
            Status::Skip(w) => Some(w.clone()),
            _ => None,
        });
        match skip {
            Some(w) if w.contains("dimension") => algebraic.push(format!("{n} BUDGET-SKIP ({w})")),
            Some(w) => return Err(format!("N={n}: skip without a dimension: {w}")),
            None if cells.iter().any(|c| c.name == "a6'") => algebraic.push(format!("{n} reproduced")),
            None => return Err(format!("N={n}: algebraic route produced nothing")),
        }
    }
    Ok(format!("Heegner exact at 19, 43, 67; algebraic: {}", algebraic.join(", ")))
}

fn c8_duality() -> Outcome {
    let model = x011_model(&ModelOptions::default()).map_err(|e| e.to_string())?;
    let one = qi(1);
    let at = |x: i64, y: i64| evaluate_pair_external(&model, [&qi(x), &qi(y), &one]).map_err(|e| e.to_string());
    let (p1, p2) = (at(5, 5)?, at(16, -61)?);
    check("j(E'_1) = j(E_2)", p1.codomain.j_invariant(), p2.domain.j_invariant())?;
    check("j(E'_2) = j(E_1)", p2.codomain.j_invariant(), p1.domain.j_invariant())?;
    let cat = Catalog::embedded();
    let mut rows = 0;
    for r in tables::rows(3).unwrap() {
        for label in [r.label, r.label_p] {
            let c = cat.get(label).map_err(|e| e.to_string())?;
            if !c.isogeny_degrees.iter().any(|d| d % r.level == 0) {
                return Err(format!("N={}: {label} has degrees {:?}", r.level, c.isogeny_degrees));
            }
        }
        rows += 1;
    }
    Ok(format!("Fricke swap holds both ways; N divides an isogeny degree for all {rows} Table 3 rows"))
}

fn c9_quadrics() -> Outcome {
    let basis: [&[i64]; 5] = [
        &[0, 0, 0, 1, -1, -1, 1, 0, -1, 0],
        &[0, 0, 1, 0, 0, -1, -1, -1, -1, 1],
        &[0, 0, 1, -1, -1, 0, -1, 1, 2, 2],
        &[0, 0, 1, 1, 0, 2, -1, -1, 0, -1],
        &[0, 1, 0, 0, 0, 2, 0, 0, 0, -1],
    ];
    let x: Vec<QSeries> = basis.iter().map(|c| QSeries::from_i64s(0, c)).collect();
    // (i, j, coefficient) of x_i x_j
    let quadrics: [&[(usize, usize, i64)]; 3] = [
        &[(0, 0, 1), (0, 2, -1), (0, 4, 1), (1, 1, -1), (1, 3, -1), (1, 4, 1), (2, 2, -1), (2, 3, 1), (2, 4, -1)],
        &[(0, 1, 1), (0, 2, -1), (0, 4, 1), (1, 1, -2), (2, 2, -1), (2, 3, 1), (2, 4, -1), (3, 3, -1), (3, 4, 1)],
        &[(0, 3, 1), (1, 1, -1), (1, 2, 1), (1, 3, 1), (1, 4, -1), (2, 4, 1)],
    ];
    let point = [3i64, -5, -4, 2, 9];
    let mut window = i64::MAX;
    for (k, quad) in quadrics.iter().enumerate() {
        let s = quad.iter().fold(QSeries::zero(i64::MAX / 4), |acc, &(i, j, c)| &acc + &(&x[i] * &x[j]).scale_int(c));
        if !s.is_zero() {
            return Err(format!("quadric {} leaves q^{}", k + 1, s.valuation()));
        }
        window = window.min(s.trunc());
        let v: i64 = quad.iter().map(|&(i, j, c)| c * point[i] * point[j]).sum();
        if v != 0 {
            return Err(format!("quadric {} is {v} at the point", k + 1));
        }
    }
    // the affine chart used for the Table 3 row
    let chart_x = x[3].div(&x[0]).unwrap();
    let chart_y = x[4].div(&x[0]).unwrap();
    check("X", chart_x.truncate(4), QSeries::from_i64s(-1, &[1, 2, 3, 6, 6]))?;
    check("Y", chart_y.truncate(3), QSeries::from_i64s(-2, &[1, 1, 2, 2, 5]))?;
    check("(X, Y)(P)", (q(point[3], point[0]), q(point[4], point[0])), (q(2, 3), qi(3)))?;
    Ok(format!("three quadrics vanish through O(q^{window}) and at [3:-5:-4:2:9]; chart expansions and (2/3, 3) agree"))
}

fn run_prop<S: proptest::strategy::Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> proptest::test_runner::TestCaseResult,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn c10_properties() -> Outcome {
    use common::*;
    run_prop("ring laws", (series(), series(), series()), |(f, g, h)| ring_laws(&f, &g, &h))?;
    run_prop("invert", series(), |f| invert_round_trip(&f))?;
    run_prop("substitute_qN", (series(), series(), 1u32..=7), |(f, g, n)| substitution_morphism(&f, &g, n))?;
    eisenstein_identity(200)?;
    let levels: Vec<u64> = SPORADIC_LEVELS.into_iter().filter(|&n| n <= 67).collect();
    for &n in &levels {
        j_identities(n, 100)?;
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let max_den = BigInt::from(10u64).pow(18u32);
    for _ in 0..1000 {
        let d: u64 = rng.gen_range(1..=1_000_000_000_000_000_000);
        let n: i64 = rng.gen_range(-(1i64 << 62)..(1i64 << 62));
        let x = BigRational::new(n.into(), d.into());
        let got = rational_reconstruct(&BigFloat::from_rational(&x, 256), &max_den).map_err(|e| e.to_string())?;
        if got != x {
            return Err(format!("reconstructed {got} from {x}"));
        }
    }
    if rational_reconstruct(&pi(256), &max_den).is_ok() {
        return Err("pi was accepted as a rational".into());
    }
    Ok(format!(
        "256 cases each for ring laws, invert, substitute_qN; E4^3 - E6^2 = 1728 Delta to O(q^200); j-identities to O(q^100) at {levels:?}; 1000/1000 reconstructions; pi rejected"
    ))
}

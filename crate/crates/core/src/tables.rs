//! Expected isogeny tables and a runner that regenerates them.
//!
//! Twist factors are compared up to rational squares, since the printed
//! values are not always squarefree.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::heegner::{cm_invariants_with, heegner_tau, E2Normalization, HEEGNER_LEVELS};
use crate::moduli::{
    build_model_with, evaluate_pair, evaluate_pair_external, identify, same_square_class, CurveModel, EllCurve,
    IsogenyPair, ModelOptions,
};
use crate::parametrize::{modular_parametrization, Weierstrass};
use crate::rational::{fmt_rational, parse_rational};
use crate::relations::SolveConfig;
use crate::series::QSeries;

/// A printed twist factor; `Either` holds two values printed in different
/// places for the same cell, to be settled by computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    One(i64),
    Either(i64, i64),
}

#[derive(Clone, Copy, Debug)]
pub struct Row {
    pub level: u64,
    /// Point on the printed model of X0(N), as text.
    pub model_point: &'static str,
    pub a4: &'static str,
    pub a6: &'static str,
    pub a4p: &'static str,
    pub a6p: &'static str,
    pub label: &'static str,
    pub d: Twist,
    pub label_p: &'static str,
    pub d_p: Twist,
    /// How the printed invariants normalize the weight-2 form.
    pub normalization: E2Normalization,
}

impl Row {
    pub fn invariants(&self) -> [BigRational; 4] {
        [self.a4, self.a6, self.a4p, self.a6p].map(|s| parse_rational(s).expect("fixture rationals parse"))
    }
}

const fn row(
    level: u64,
    model_point: &'static str,
    inv: [&'static str; 4],
    label: &'static str,
    d: i64,
    label_p: &'static str,
    d_p: i64,
) -> Row {
    Row {
        level,
        model_point,
        a4: inv[0],
        a6: inv[1],
        a4p: inv[2],
        a6p: inv[3],
        label,
        d: Twist::One(d),
        label_p,
        d_p: Twist::One(d_p),
        normalization: E2Normalization::Eta,
    }
}

/// Rational cyclic 11-isogenies from the points of the Weierstrass model of X0(11).
pub const TABLE1: [Row; 3] = [
    row(11, "(5, 5)", ["-4323/169", "-109406/2197", "-3/169", "86/24167"], "121.a1", 39, "121.c1", -429),
    row(11, "(16, -61)", ["-363/169", "-10406/2197", "-393/1859", "9946/265837"], "121.c1", 39, "121.a1", -429),
    row(11, "(5, -6)", ["-33/2", "-847/32", "-3/22", "7/352"], "121.b1", -486, "121.b1", 66),
];

/// Rational cyclic N-isogenies at every sporadic level.
pub const TABLE3: [Row; 22] = [
    row(11, "(5, 5)", ["-4323/169", "-109406/2197", "-3/169", "86/24167"], "121.a1", 39, "121.c1", -429),
    row(11, "(16, -61)", ["-363/169", "-10406/2197", "-393/1859", "9946/265837"], "121.c1", 39, "121.a1", -429),
    row(11, "(5, -6)", ["-33/2", "-847/32", "-3/22", "7/352"], "121.b1", -486, "121.b1", 66),
    row(14, "(2, 2)", ["-2380/121", "-44688/1331", "-20/847", "16/9317"], "49.a2", 22, "49.a1", -154),
    row(14, "(9, -33)", ["-560/121", "-6272/1331", "-85/847", "114/9317"], "49.a1", 11, "49.a2", -77),
    row(15, "(-2, -2)", ["3165", "31070", "-3", "118/5"], "50.b2", -3, "50.a1", -15),
    row(15, "(3, -2)", ["-18075/961", "-935350/29791", "-87/4805", "842/744775"], "50.a2", 93, "50.b1", 465),
    row(15, "(-13/4, 9/8)", ["-675", "-79650", "211/15", "-6214/675"], "50.a1", 1, "50.b2", 5),
    row(15, "(8, -27)", ["-3915/961", "-113670/29791", "-241/2883", "37414/4021785"], "50.b1", -31, "50.a2", -155),
    row(
        17,
        "(11/4, -15/8)",
        ["-87567/5120", "-2230213/81920", "-1119/87040", "14891/23674880"],
        "14450.b1",
        -30,
        "14450.b2",
        -510,
    ),
    row(17, "(7, -21)", ["-19023/5120", "-253147/81920", "-303/5120", "7717/1392640"], "14450.b2", 30, "14450.b1", 510),
    row(19, "(5, -9)", ["-19/2", "-361/32", "-1/38", "1/608"], "361.a1", -2, "361.a1", 38),
    row(
        21,
        "(2, -1)",
        ["-17235/1156", "-435447/19652", "-25/3468", "131/530604"],
        "162.b4",
        102,
        "162.b1",
        102,
    ),
    row(21, "(-1, 2)", ["-1515/4", "-23053/4", "5/4", "1/12"], "162.b3", 2, "162.b2", 2),
    row(21, "(-1/4, 1/8)", ["2205/4", "-3087/4", "-505/588", "23053/37044"], "162.b2", -42, "162.b3", -42),
    row(
        21,
        "(5, -13)",
        ["-3675/1156", "-44933/19652", "-1915/56644", "48383/20221908"],
        "162.b1",
        -238,
        "162.b4",
        -238,
    ),
    row(27, "(3, -9)", ["-15/2", "-253/32", "-5/486", "253/629856"], "27.a2", 6, "27.a2", -2),
    row(
        37,
        "(0, -1)",
        ["-285371/20580", "-180376009/9075780", "-11/20580", "47/9075780"],
        "1225.h2",
        10,
        "1225.h1",
        10,
    ),
    row(
        37,
        "[1:-1:0]",
        ["-15059/20580", "-2380691/9075780", "-285371/28174020", "180376009/459715484340"],
        "1225.h1",
        -370,
        "1225.h2",
        -370,
    ),
    row(43, "(0, -4/3)", ["-215/36", "-12943/2304", "-5/1548", "7/99072"], "1849.a1", -3, "1849.a1", 129),
    row(67, "(2/3, 3)", ["-3685/722", "-974113/219488", "-55/48374", "217/14705696"], "4489.a1", -38, "4489.a1", 2546),
    Row {
        level: 163,
        model_point: "(9/10, -6/5)",
        a4: "-543605/75481344",
        a6: "4936546769/20985021333504",
        a4p: "-3335/12303459072",
        a6p: "-185801/3420558477361152",
        label: "26569.a1",
        d: Twist::Either(4344, 4544),
        label_p: "26569.a1",
        d_p: Twist::One(-708072),
        normalization: E2Normalization::Difference,
    },
];

pub fn rows(which: u8) -> Result<&'static [Row]> {
    match which {
        1 => Ok(&TABLE1),
        3 => Ok(&TABLE3),
        _ => Err(Error::InvalidArgument(format!("no table {which}; expected 1 or 3"))),
    }
}

/// The model Y^2 + Y = X^3 - X^2 - 10X - 20 of X0(11) and the leading coefficients of its coordinates.
pub fn x011_curve() -> Weierstrass {
    Weierstrass::new([0, -1, 1, -10, -20])
}

pub fn x011_partials() -> (QSeries, QSeries) {
    (
        QSeries::from_i64s(-2, &[1, 2, 4, 5, 8, 1, 7, -11]),
        QSeries::from_i64s(-3, &[1, 3, 7, 12, 17, 26, 19, 37, -15]),
    )
}

/// Builds the level-11 model and attaches the generators X, Y of that model, expanded from
/// the curve equation and the partial expansions.
pub fn x011_model(opts: &ModelOptions) -> Result<CurveModel> {
    let model = build_model_with(11, opts)?;
    let (px, py) = x011_partials();
    let trunc = model.quadruple.a4.trunc();
    let curve = x011_curve();
    let (x, y) = modular_parametrization(&curve, 11, &px, &py, trunc)?;
    model.attach_external(curve.poly(), x, y, &opts.solve)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(String),
    Skip(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub level: u64,
    /// Position of the row in its table.
    pub row: usize,
    pub route: &'static str,
    pub name: &'static str,
    pub status: Status,
    pub note: Option<String>,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, why) = match &self.status {
            Status::Pass => ("PASS", None),
            Status::Fail(w) => ("FAIL", Some(w)),
            Status::Skip(w) => ("BUDGET-SKIP", Some(w)),
        };
        write!(f, "{tag} N={} row {} {} {}", self.level, self.row + 1, self.route, self.name)?;
        if let Some(w) = why {
            write!(f, ": {w}")?;
        }
        if let Some(n) = &self.note {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct TableReport {
    pub cells: Vec<Cell>,
}

impl TableReport {
    /// No attempted cell failed.
    pub fn ok(&self) -> bool {
        self.cells.iter().all(|c| !matches!(c.status, Status::Fail(_)))
    }

    pub fn skipped(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| matches!(c.status, Status::Skip(_)))
    }

    pub fn count(&self, pass: bool) -> usize {
        self.cells.iter().filter(|c| (c.status == Status::Pass) == pass).count()
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Largest linear system for the algebraic route at levels 37, 43, 67.
    pub budget: Option<usize>,
    pub heegner_prec: u32,
    pub solve: SolveConfig,
}

/// Default unknown budget for the large algebraic levels.
pub const DEFAULT_BUDGET: usize = 600;

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { budget: Some(DEFAULT_BUDGET), heegner_prec: 4000, solve: SolveConfig::default() }
    }
}

impl RunOptions {
    /// Defaults, with `X0N_MATRIX_BUDGET` overriding the budget.
    pub fn from_env() -> RunOptions {
        let mut o = RunOptions::default();
        if let Some(b) = SolveConfig::from_env().budget {
            o.budget = Some(b);
        }
        o
    }
}

const BUDGETED: [u64; 3] = [37, 43, 67];

struct Emit<'a> {
    cells: &'a mut Vec<Cell>,
    level: u64,
    row: usize,
    route: &'static str,
}

impl Emit<'_> {
    fn push(&mut self, name: &'static str, status: Status, note: Option<String>) {
        self.cells.push(Cell { level: self.level, row: self.row, route: self.route, name, status, note });
    }

    fn eq(&mut self, name: &'static str, got: &BigRational, want: &BigRational) {
        let st = if got == want {
            Status::Pass
        } else {
            Status::Fail(format!("got {}, expected {}", fmt_rational(got), fmt_rational(want)))
        };
        self.push(name, st, None);
    }

    fn err(&mut self, name: &'static str, e: &Error) {
        let st = match e {
            Error::BudgetExceeded { dimension, budget } => {
                Status::Skip(format!("dimension {dimension} exceeds budget {budget}"))
            }
            e => Status::Fail(e.to_string()),
        };
        self.push(name, st, None);
    }

    fn twist(&mut self, name: &'static str, got: &BigInt, want: Twist) {
        let (st, note) = match want {
            Twist::One(d) => (
                if same_square_class(got, &BigInt::from(d)) {
                    Status::Pass
                } else {
                    Status::Fail(format!("computed D = {got}, printed {d}"))
                },
                None,
            ),
            Twist::Either(a, b) => {
                let (ma, mb) = (same_square_class(got, &a.into()), same_square_class(got, &b.into()));
                match (ma, mb) {
                    (true, false) => (Status::Pass, Some(format!("printed values {a} and {b} disagree; computed D = {got} confirms {a}"))),
                    (false, true) => (Status::Pass, Some(format!("printed values {a} and {b} disagree; computed D = {got} confirms {b}"))),
                    _ => (Status::Fail(format!("computed D = {got} matches neither {a} nor {b}")), None),
                }
            }
        };
        self.push(name, st, note);
    }

    fn identification(&mut self, pair: &IsogenyPair, row: &Row, cat: &Catalog) {
        match identify(pair, cat) {
            Ok(id) => {
                self.eq_label("label", &id.label, row.label);
                self.twist("D", &id.d, row.d);
                self.eq_label("label'", &id.label_p, row.label_p);
                self.twist("D'", &id.d_p, row.d_p);
            }
            Err(e) => self.err("identification", &e),
        }
    }

    fn eq_label(&mut self, name: &'static str, got: &str, want: &str) {
        let st = if got == want { Status::Pass } else { Status::Fail(format!("got {got}, expected {want}")) };
        self.push(name, st, None);
    }
}

/// Table 1 through the external model of X0(11).
pub fn run_table1(opts: &RunOptions) -> TableReport {
    let mut cells = Vec::new();
    let cat = Catalog::embedded();
    let model = x011_model(&ModelOptions { solve: opts.solve.clone(), ..ModelOptions::default() });
    for (i, row) in TABLE1.iter().enumerate() {
        let mut em = Emit { cells: &mut cells, level: 11, row: i, route: "external" };
        let model = match &model {
            Ok(m) => m,
            Err(e) => {
                em.err("model", e);
                continue;
            }
        };
        let pt = parse_point(row.model_point).expect("fixture points parse");
        let z = BigRational::from_integer(1.into());
        match evaluate_pair_external(model, [&pt.0, &pt.1, &z]) {
            Ok(pair) => {
                compare_pair(&mut em, &pair, row);
                em.identification(&pair, row, cat);
            }
            Err(e) => em.err("evaluate", &e),
        }
    }
    TableReport { cells }
}

fn compare_pair(em: &mut Emit, pair: &IsogenyPair, row: &Row) {
    let [a4, a6, a4p, a6p] = row.invariants();
    em.eq("a4", &pair.domain.a, &a4);
    em.eq("a6", &pair.domain.b, &a6);
    em.eq("a4'", &pair.codomain.a, &a4p);
    em.eq("a6'", &pair.codomain.b, &a6p);
}

/// Parses `(x, y)` with rational entries.
pub fn parse_point(s: &str) -> Result<(BigRational, BigRational)> {
    let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(|| Error::Parse(s.into()))?;
    let (x, y) = inner.split_once(',').ok_or_else(|| Error::Parse(s.into()))?;
    Ok((parse_rational(x)?, parse_rational(y)?))
}

/// Table 3 for the given levels (all when empty); algebraic route up to 67,
/// Heegner route at the CM levels.
pub fn run_table3(levels: &[u64], opts: &RunOptions) -> Result<TableReport> {
    let mut wanted: Vec<u64> = if levels.is_empty() {
        let mut v: Vec<u64> = TABLE3.iter().map(|r| r.level).collect();
        v.dedup();
        v
    } else {
        levels.to_vec()
    };
    wanted.sort_unstable();
    wanted.dedup();
    for &n in &wanted {
        if !TABLE3.iter().any(|r| r.level == n) {
            return Err(Error::UnknownLevel(n));
        }
    }
    let mut per_level: Vec<Vec<Cell>> = std::thread::scope(|s| {
        let handles: Vec<_> = wanted.iter().map(|&n| s.spawn(move || run_level(n, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("table worker panicked")).collect()
    });
    let mut cells: Vec<Cell> = per_level.drain(..).flatten().collect();
    cells.sort_by_key(|c| (c.level, c.row, c.route != "algebraic"));
    Ok(TableReport { cells })
}

fn run_level(n: u64, opts: &RunOptions) -> Vec<Cell> {
    let cat = Catalog::embedded();
    let rows: Vec<(usize, &Row)> = TABLE3.iter().enumerate().filter(|(_, r)| r.level == n).collect();
    let mut cells = Vec::new();
    if n <= 67 {
        let mut solve = opts.solve.clone();
        if BUDGETED.contains(&n) {
            solve.budget = opts.budget;
        }
        let model = build_model_with(n, &ModelOptions { solve, ..ModelOptions::default() });
        for &(i, row) in &rows {
            let mut em = Emit { cells: &mut cells, level: n, row: i, route: "algebraic" };
            let m = match &model {
                Ok(m) => m,
                Err(e) => {
                    em.err("model", e);
                    continue;
                }
            };
            let [a4, a6, a4p, a6p] = row.invariants();
            match evaluate_pair(m, &a4, &a6) {
                Ok(pair) => {
                    em.push("relation", Status::Pass, None);
                    em.eq("a4'", &pair.codomain.a, &a4p);
                    em.eq("a6'", &pair.codomain.b, &a6p);
                    em.identification(&pair, row, cat);
                }
                Err(e) => em.err("evaluate", &e),
            }
        }
    }
    if HEEGNER_LEVELS.contains(&n) {
        for &(i, row) in &rows {
            let mut em = Emit { cells: &mut cells, level: n, row: i, route: "heegner" };
            let res = heegner_tau(n).and_then(|t| cm_invariants_with(n, &t, opts.heegner_prec, row.normalization));
            match res {
                Ok(r) => {
                    let want = row.invariants();
                    for (k, name) in ["a4", "a6", "a4'", "a6'"].into_iter().enumerate() {
                        em.eq(name, &r.quadruple[k], &want[k]);
                    }
                    let [a4, a6, a4p, a6p] = r.quadruple.clone();
                    let pair = EllCurve::new(a4.clone(), a6.clone()).and_then(|d| {
                        Ok(IsogenyPair {
                            level: n,
                            point: (a4, a6),
                            domain: d,
                            codomain: EllCurve::new(a4p, a6p)?,
                            identification: None,
                        })
                    });
                    match pair {
                        Ok(p) => em.identification(&p, row, cat),
                        Err(e) => em.err("curves", &e),
                    }
                }
                Err(e) => em.err("cm_invariants", &e),
            }
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_reference_the_catalog() {
        let cat = Catalog::embedded();
        for r in TABLE1.iter().chain(TABLE3.iter()) {
            let [a4, a6, a4p, a6p] = r.invariants();
            let d = EllCurve::new(a4, a6).unwrap();
            let c = EllCurve::new(a4p, a6p).unwrap();
            assert_eq!(cat.get(r.label).unwrap().j, d.j_invariant(), "{}", r.label);
            assert_eq!(cat.get(r.label_p).unwrap().j, c.j_invariant(), "{}", r.label_p);
        }
    }

    #[test]
    fn point_syntax() {
        assert!(parse_point("(-13/4, 9/8)").is_ok());
        assert!(parse_point("[1:-1:0]").is_err());
    }
}

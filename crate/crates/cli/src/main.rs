mod lmfdb;
mod out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use x0n::catalog::{refresh_snapshot, Catalog, RefCurve};
use x0n::error::{Error, Result};
use x0n::forms::{e2n, eisenstein, invariant_quadruple};
use x0n::heegner::{cm_invariants_with, heegner_tau, E2Normalization, Tau};
use x0n::moduli::{
    build_model_with, default_dmax, default_order, evaluate_pair, evaluate_pair_external, identify, CurveModel,
    IsogenyPair, ModelOptions,
};
use x0n::parametrize::{modular_parametrization, Weierstrass};
use x0n::poly::BiPoly;
use x0n::qfile::{format_qseries, parse_qseries};
use x0n::rational::{fmt_rational, parse_rational};
use x0n::relations::{bootstrap_generator, find_plane_relation_with, BootstrapBounds, SolveConfig};
use x0n::series::QSeries;
use x0n::tables::{rows, run_table1, run_table3, x011_model, RunOptions, Status, TableReport};

use out::{emit, rq};

#[derive(Parser)]
#[command(name = "x0n", version, about = "Explicit cyclic N-isogenies from rational points on X0(N)")]
struct Cli {
    /// Progress and timings on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the q-expansion of an Eisenstein series or an invariant.
    Expand(ExpandArgs),
    /// Find the plane relation between a4 and a6.
    Relation(RelationArgs),
    /// Express the invariants in external generators X, Y.
    Map(MapArgs),
    /// The isogenous pair attached to a point.
    Evaluate(EvaluateArgs),
    /// Exact invariants at a CM point by high-precision evaluation.
    Heegner(HeegnerArgs),
    /// Regenerate the isogeny tables and compare them cell by cell.
    Table(TableArgs),
    /// Reference curves.
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    #[value(name = "E4")]
    E4,
    #[value(name = "E6")]
    E6,
    #[value(name = "E2N")]
    E2N,
    #[value(name = "a4")]
    A4,
    #[value(name = "a6")]
    A6,
    #[value(name = "a4p")]
    A4p,
    #[value(name = "a6p")]
    A6p,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    form: Form,
    /// Required except for E4 and E6.
    #[arg(long)]
    level: Option<u64>,
    /// Coefficients below q^ORDER.
    #[arg(long, default_value_t = 10)]
    order: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RelationArgs {
    #[arg(long, required_unless_present = "self_test")]
    level: Option<u64>,
    #[arg(long)]
    dmax: Option<u32>,
    #[arg(long)]
    order: Option<usize>,
    /// Run the search on the pair (1/q, 1/q^2) instead.
    #[arg(long)]
    self_test: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    /// Q-series files for X and Y; a few leading coefficients suffice.
    #[arg(long, num_args = 2, value_names = ["FILE_X", "FILE_Y"])]
    generators: Option<Vec<PathBuf>>,
    /// Equation of the model, e.g. "Y^2 + Y = X^3 - X^2 - 10X - 20".
    #[arg(long)]
    curve_eq: Option<String>,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    level: u64,
    #[command(flatten)]
    gens: GeneratorArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Chart {
    A4a6,
    External,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    level: u64,
    #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["X", "Y"])]
    point: Vec<String>,
    /// Third projective coordinate on the external chart.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    z: String,
    #[arg(long, value_enum, default_value_t = Chart::A4a6)]
    chart: Chart,
    /// Name both curves after the reference catalog.
    #[arg(long)]
    identify: bool,
    #[command(flatten)]
    gens: GeneratorArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum E2Arg {
    /// Constant term (N-1)/24.
    Eta,
    /// E2(tau) - N E2(N tau).
    Difference,
}

#[derive(Args)]
struct HeegnerArgs {
    #[arg(long)]
    level: u64,
    #[arg(long, default_value_t = 4000)]
    prec: u32,
    /// Real part and imaginary part; the latter as a rational or `sqrt(r)`.
    #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["RE", "IM"])]
    tau: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = E2Arg::Eta)]
    e2: E2Arg,
    #[arg(long)]
    identify: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_parser = ["1", "3"])]
    which: String,
    /// Comma-separated levels (Table 3 only).
    #[arg(long, value_delimiter = ',')]
    levels: Vec<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Look up one curve.
    Get {
        label: String,
        /// Ask the LMFDB instead of the local snapshot.
        #[arg(long)]
        online: bool,
        #[arg(long)]
        json: bool,
    },
    /// Fetch curves from the LMFDB and merge them into the snapshot.
    Refresh {
        labels: Vec<String>,
        /// Snapshot file; defaults to curves.txt in the cache directory.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut solve = SolveConfig::from_env();
    solve.verbose = cli.verbose;
    let res = match cli.cmd {
        Cmd::Expand(a) => expand(a),
        Cmd::Relation(a) => relation(a, &solve),
        Cmd::Map(a) => map(a, &solve),
        Cmd::Evaluate(a) => evaluate(a, &solve),
        Cmd::Heegner(a) => heegner(a),
        Cmd::Table(a) => table(a, solve),
        Cmd::Catalog(c) => catalog(c),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn check_level(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(usage(format!("level must be at least 2, got {n}")));
    }
    Ok(n)
}

fn expand(a: ExpandArgs) -> Result<u8> {
    if a.order == 0 {
        return Err(usage("order must be positive"));
    }
    let level = a.level.map(check_level).transpose()?;
    let need = || level.ok_or_else(|| usage("this form needs --level"));
    let m = a.order;
    let s = match a.form {
        Form::E4 => eisenstein(4, m),
        Form::E6 => eisenstein(6, m),
        Form::E2N => e2n(need()?, m),
        f => {
            let q = invariant_quadruple(need()?, m);
            match f {
                Form::A4 => q.a4,
                Form::A6 => q.a6,
                Form::A4p => q.a4p,
                _ => q.a6p,
            }
        }
    };
    if a.json {
        let name = a.form.to_possible_value().expect("no skipped variants").get_name().to_string();
        emit(&json!({
            "form": name,
            "level": level,
            "order": m,
            "series": out::series(&s),
        }));
    } else {
        print!("{}", format_qseries(&s));
    }
    Ok(0)
}

fn relation(a: RelationArgs, cfg: &SolveConfig) -> Result<u8> {
    let (rel, level, order) = if a.self_test {
        let m = a.order.unwrap_or(64) as i64;
        let f = QSeries::monomial(BigRational::from_integer(1.into()), -1, m);
        let g = f.square();
        (find_plane_relation_with(&f, &g, a.dmax.unwrap_or(3), cfg)?, None, m as usize)
    } else {
        let n = check_level(a.level.expect("clap enforces --level"))?;
        let dmax = a.dmax.unwrap_or_else(|| default_dmax(n));
        let m = a.order.unwrap_or_else(|| default_order(dmax));
        let q = invariant_quadruple(n, m);
        (find_plane_relation_with(&q.a4, &q.a6, dmax, cfg)?, Some(n), m)
    };
    if a.json {
        emit(&json!({
            "level": level,
            "order": order,
            "degree": rel.total_degree(),
            "relation": out::bipoly(&rel),
        }));
    } else {
        println!("{rel}");
    }
    Ok(0)
}

/// External generators for `level`, extended to the model's window and with
/// their curve equation.
fn external_generators(model: &CurveModel, g: &GeneratorArgs, cfg: &SolveConfig) -> Result<(BiPoly, QSeries, QSeries)> {
    let files = g.generators.as_ref().ok_or_else(|| usage("--generators FILE_X FILE_Y is required"))?;
    let read = |p: &PathBuf| -> Result<QSeries> {
        let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        parse_qseries(&text)
    };
    let (px, py) = (read(&files[0])?, read(&files[1])?);
    let q = &model.quadruple;
    let trunc = q.a4.trunc();
    let weier = g.curve_eq.as_deref().map(Weierstrass::parse);
    let (x, y) = if px.trunc() >= trunc && py.trunc() >= trunc {
        (px.truncate(trunc), py.truncate(trunc))
    } else if let Some(Ok(w)) = &weier {
        modular_parametrization(w, model.level, &px, &py, trunc)?
    } else {
        let d = model.relation.total_degree().unwrap_or(1);
        let b = BootstrapBounds { deg_num: 2 * d, deg_den: 2 * d };
        (
            bootstrap_generator(&px, &q.a4, &q.a6, &model.relation, &b)?,
            bootstrap_generator(&py, &q.a4, &q.a6, &model.relation, &b)?,
        )
    };
    let curve = match &g.curve_eq {
        Some(eq) => match eq.split_once('=') {
            Some((l, r)) => BiPoly::parse(l)?.sub(&BiPoly::parse(r)?),
            None => BiPoly::parse(eq)?,
        },
        None => find_plane_relation_with(&x, &y, default_dmax(model.level), cfg)?,
    };
    Ok((curve, x, y))
}

fn model_options(cfg: &SolveConfig) -> ModelOptions {
    ModelOptions { solve: cfg.clone(), ..ModelOptions::default() }
}

fn map(a: MapArgs, cfg: &SolveConfig) -> Result<u8> {
    let n = check_level(a.level)?;
    let model = build_model_with(n, &model_options(cfg))?;
    let (curve, x, y) = external_generators(&model, &a.gens, cfg)?;
    let model = model.attach_external(curve, x, y, cfg)?;
    let ext = model.external.as_ref().expect("just attached");
    let split = ext.split();
    if a.json {
        let maps = json!({
            "a4": out::expr(&ext.a4),
            "a6": out::expr(&ext.a6),
            "a4p": out::expr(&ext.a4p),
            "a6p": out::expr(&ext.a6p),
        });
        let split = split.as_ref().map(|s| {
            json!({
                "Q": out::upoly(&s.q),
                "A_Y": out::upoly(&s.a_y),
                "A_X": out::upoly(&s.a_x),
                "B_Y": out::upoly(&s.b_y),
                "B_X": out::upoly(&s.b_x),
            })
        });
        emit(&json!({ "level": n, "curve": ext.curve.display_vars("X", "Y"), "maps": maps, "split": split }));
        return Ok(0);
    }
    println!("curve: {} = 0", ext.curve.display_vars("X", "Y"));
    if let Some(s) = &split {
        let p = |v: &Vec<BigRational>| BiPoly::from_univariate_x(v).display_vars("X", "Y");
        println!("Q   = {}", p(&s.q));
        println!("A_Y = {}", p(&s.a_y));
        println!("A_X = {}", p(&s.a_x));
        println!("B_Y = {}", p(&s.b_y));
        println!("B_X = {}", p(&s.b_x));
        println!("a4 = (A_Y Y + A_X) / Q^2, a6 = (B_Y Y + B_X) / Q^3");
    }
    for (name, e) in [("a4", &ext.a4), ("a6", &ext.a6), ("a4'", &ext.a4p), ("a6'", &ext.a6p)] {
        println!("{name} = ({}) / ({})", e.num.display_vars("X", "Y"), e.den.display_vars("X", "Y"));
    }
    Ok(0)
}

fn parse_args_rational(s: &str) -> Result<BigRational> {
    parse_rational(s).map_err(|e| usage(e.to_string()))
}

fn evaluate(a: EvaluateArgs, cfg: &SolveConfig) -> Result<u8> {
    let n = check_level(a.level)?;
    let coords: Vec<BigRational> = a.point.iter().map(|s| parse_args_rational(s)).collect::<Result<_>>()?;
    let z = parse_args_rational(&a.z)?;
    let mut pair = match a.chart {
        Chart::A4a6 => {
            if z != BigRational::from_integer(1.into()) {
                return Err(usage("--z applies to the external chart only"));
            }
            let model = build_model_with(n, &model_options(cfg))?;
            evaluate_pair(&model, &coords[0], &coords[1])?
        }
        Chart::External => {
            let model = if a.gens.generators.is_some() {
                let model = build_model_with(n, &model_options(cfg))?;
                let (curve, x, y) = external_generators(&model, &a.gens, cfg)?;
                model.attach_external(curve, x, y, cfg)?
            } else if n == 11 {
                x011_model(&model_options(cfg))?
            } else {
                return Err(usage("the external chart needs --generators (built in only for level 11)"));
            };
            evaluate_pair_external(&model, [&coords[0], &coords[1], &z])?
        }
    };
    if a.identify {
        pair.identification = Some(identify(&pair, &local_catalog()?)?);
    }
    if a.json {
        emit(&out::pair(&pair));
    } else {
        print_pair(&pair);
    }
    Ok(0)
}

fn print_pair(p: &IsogenyPair) {
    let curve = |a: &BigRational, b: &BigRational| format!("y^2 = x^3 + ({})x + ({})", fmt_rational(a), fmt_rational(b));
    println!("level {}", p.level);
    println!("domain   {}  j = {}", curve(&p.domain.a, &p.domain.b), fmt_rational(&p.domain.j_invariant()));
    println!("codomain {}  j = {}", curve(&p.codomain.a, &p.codomain.b), fmt_rational(&p.codomain.j_invariant()));
    if let Some(id) = &p.identification {
        println!("{}^({}) -> {}^({})", id.label, id.d, id.label_p, id.d_p);
    }
}

/// `sqrt(r)` or a rational `t`, returned as the square of the imaginary part.
fn parse_im_sq(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        return parse_args_rational(inner);
    }
    let t = parse_args_rational(s)?;
    Ok(&t * &t)
}

fn heegner(a: HeegnerArgs) -> Result<u8> {
    let n = check_level(a.level)?;
    let tau = match &a.tau {
        Some(v) => Tau::new(parse_args_rational(&v[0])?, parse_im_sq(&v[1])?).map_err(|e| usage(e.to_string()))?,
        None => heegner_tau(n)?,
    };
    if a.prec < 64 {
        return Err(usage("precision must be at least 64 bits"));
    }
    let norm = match a.e2 {
        E2Arg::Eta => E2Normalization::Eta,
        E2Arg::Difference => E2Normalization::Difference,
    };
    let r = cm_invariants_with(n, &tau, a.prec, norm)?;
    let pair = IsogenyPair {
        level: n,
        point: (r.quadruple[0].clone(), r.quadruple[1].clone()),
        domain: x0n::moduli::EllCurve::new(r.quadruple[0].clone(), r.quadruple[1].clone())?,
        codomain: x0n::moduli::EllCurve::new(r.quadruple[2].clone(), r.quadruple[3].clone())?,
        identification: None,
    };
    let ident = if a.identify { Some(identify(&pair, &local_catalog()?)?) } else { None };
    if a.json {
        let mut v = json!({
            "level": n,
            "prec": r.prec,
            "tau": { "re": rq(&tau.re), "im_squared": rq(&tau.im_sq) },
            "normalization": match norm { E2Normalization::Eta => "eta", E2Normalization::Difference => "difference" },
            "a4": rq(&r.quadruple[0]),
            "a6": rq(&r.quadruple[1]),
            "a4p": rq(&r.quadruple[2]),
            "a6p": rq(&r.quadruple[3]),
            "j": rq(&pair.domain.j_invariant()),
            "jp": rq(&pair.codomain.j_invariant()),
            "residual": r.residual_hex(),
            "imag_residual": r.imag_residual_hex(),
            "terms_used": r.terms_used,
        });
        if let Some(id) = &ident {
            v["identification"] = out::identification(id);
        }
        emit(&v);
        return Ok(0);
    }
    println!("tau = {tau}, {} bits, {} terms", r.prec, r.terms_used);
    for (name, x) in ["a4", "a6", "a4'", "a6'"].iter().zip(&r.quadruple) {
        println!("{name} = {}", fmt_rational(x));
    }
    println!("j  = {}", fmt_rational(&pair.domain.j_invariant()));
    println!("j' = {}", fmt_rational(&pair.codomain.j_invariant()));
    println!("residual {}  imaginary {}", r.residual_hex(), r.imag_residual_hex());
    if let Some(id) = &ident {
        println!("{}^({}) -> {}^({})", id.label, id.d, id.label_p, id.d_p);
    }
    Ok(0)
}

fn table(a: TableArgs, solve: SolveConfig) -> Result<u8> {
    let mut opts = RunOptions::from_env();
    opts.solve = SolveConfig { budget: None, ..solve };
    let which: u8 = a.which.parse().expect("clap restricts the values");
    let report = if which == 1 {
        if !a.levels.is_empty() {
            return Err(usage("--levels applies to table 3 only"));
        }
        run_table1(&opts)
    } else {
        let known: Vec<u64> = rows(3)?.iter().map(|r| r.level).collect();
        if let Some(bad) = a.levels.iter().find(|n| !known.contains(n)) {
            return Err(usage(format!("table 3 has no rows at level {bad}")));
        }
        run_table3(&a.levels, &opts)?
    };
    if a.json {
        emit(&out::report(which, &report));
    } else {
        print_report(&report);
    }
    Ok(if report.ok() { 0 } else { 3 })
}

fn print_report(r: &TableReport) {
    for c in &r.cells {
        println!("{c}");
    }
    let failed = r.cells.iter().filter(|c| matches!(c.status, Status::Fail(_))).count();
    let skipped = r.skipped().count();
    println!("{} passed, {failed} failed, {skipped} skipped", r.count(true));
    for c in r.skipped() {
        println!("skipped: N={} row {} {} {}", c.level, c.row + 1, c.route, c.name);
    }
}

/// The refreshed snapshot in the cache directory when present, else the
/// embedded one.
fn local_catalog() -> Result<Catalog> {
    match lmfdb::snapshot_path() {
        Some(p) if p.exists() => Catalog::load(&p),
        _ => Ok(Catalog::embedded().clone()),
    }
}

fn catalog(c: CatalogCmd) -> Result<u8> {
    match c {
        CatalogCmd::Get { label, online, json } => {
            let curve: RefCurve =
                if online { lmfdb::Client::from_env().get(&label)? } else { local_catalog()?.get(&label)?.clone() };
            if json {
                emit(&out::ref_curve(&curve));
            } else {
                println!("{}", curve.to_line());
                println!("short model: y^2 = x^3 + ({})x + ({})", fmt_rational(&curve.short.a), fmt_rational(&curve.short.b));
            }
        }
        CatalogCmd::Refresh { labels, snapshot, json } => {
            let path = snapshot
                .or_else(lmfdb::snapshot_path)
                .ok_or_else(|| usage("no cache directory; pass --snapshot PATH"))?;
            let client = lmfdb::Client::from_env();
            let cat = refresh_snapshot(&path, &labels, |l| client.fetch(l))?;
            if json {
                emit(&json!({ "snapshot": path.display().to_string(), "curves": cat.curves().len(), "refreshed": labels }));
            } else {
                println!("{}: {} curves, {} refreshed", path.display(), cat.curves().len(), labels.len());
            }
        }
    }
    Ok(0)
}

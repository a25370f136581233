//! Plane relations between two q-series and rational expressions of a
//! target series in two generators.
//!
//! Both problems are linear in the unknown coefficients. Each unknown owns a
//! column (a monomial in the generators, possibly times the target) and each
//! row is one q-exponent. The system is solved on a window of `U + margin`
//! exponents, `U` the number of unknowns, and the answer is then checked
//! exactly on a window twice as long.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{self, modp, Kernel};
use crate::poly::{series_powers, BiPoly, RationalExpr};
use crate::series::QSeries;

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Extra rows beyond the number of unknowns.
    pub margin: usize,
    /// Largest admissible number of unknowns; `None` means unbounded.
    pub budget: Option<usize>,
    /// Cap on CRT primes per kernel.
    pub max_primes: usize,
    /// Print progress to stderr.
    pub verbose: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { margin: 10, budget: None, max_primes: 2000, verbose: false }
    }
}

impl SolveConfig {
    /// Default configuration with the budget taken from `X0N_MATRIX_BUDGET`.
    pub fn from_env() -> SolveConfig {
        let budget = std::env::var("X0N_MATRIX_BUDGET").ok().and_then(|s| s.parse().ok());
        SolveConfig { budget, ..SolveConfig::default() }
    }
}

/// One unknown: the monomial `x^i y^j`, multiplied by `-t` when `times_target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Column {
    i: u32,
    j: u32,
    times_target: bool,
}

struct System<'a> {
    x: &'a QSeries,
    y: &'a QSeries,
    t: Option<&'a QSeries>,
    cols: Vec<Column>,
}

/// Truncated series over `F_p`: coefficient `k` sits at exponent `val + k`.
#[derive(Clone)]
struct ModSeries {
    val: i64,
    c: Vec<u64>,
}

impl ModSeries {
    fn mul(&self, other: &ModSeries, m: &modp::Mont) -> ModSeries {
        let len = self.c.len().min(other.c.len());
        ModSeries { val: self.val + other.val, c: modp::mul_trunc(&self.c, &other.c, len, m) }
    }

    fn one(len: usize, m: &modp::Mont) -> ModSeries {
        let mut c = vec![0u64; len];
        if len > 0 {
            c[0] = m.to_mont(1);
        }
        ModSeries { val: 0, c }
    }
}

fn residues_mont(s: &QSeries, p: u64, len: usize, m: &modp::Mont) -> Option<ModSeries> {
    let r = s.residues(p, s.valuation(), len)?;
    Some(ModSeries { val: s.valuation(), c: r.into_iter().map(|v| m.to_mont(v)).collect() })
}

fn mod_powers(s: &ModSeries, n: u32, m: &modp::Mont) -> Vec<ModSeries> {
    let mut v = vec![ModSeries::one(s.c.len(), m)];
    for k in 1..=n as usize {
        let next = if k == 1 { s.clone() } else { v[k - 1].mul(s, m) };
        v.push(next);
    }
    v
}

impl<'a> System<'a> {
    fn valuation(&self, c: &Column) -> i64 {
        let mut v = c.i as i64 * self.x.valuation() + c.j as i64 * self.y.valuation();
        if c.times_target {
            v += self.t.unwrap().valuation();
        }
        v
    }

    fn v_min(&self) -> i64 {
        self.cols.iter().map(|c| self.valuation(c)).min().unwrap_or(0)
    }

    /// Smallest relative precision among the inputs.
    fn rel_precision(&self) -> usize {
        let mut r = self.x.known_len().min(self.y.known_len());
        if let Some(t) = self.t {
            r = r.min(t.known_len());
        }
        r
    }

    fn max_i(&self) -> u32 {
        self.cols.iter().map(|c| c.i).max().unwrap_or(0)
    }

    fn max_j(&self) -> u32 {
        self.cols.iter().map(|c| c.j).max().unwrap_or(0)
    }

    /// Matrix modulo `p` on exponents `v_min .. v_min + rows`.
    fn matrix_mod(&self, p: u64, rows: usize) -> Option<Vec<Vec<u64>>> {
        let m = modp::Mont::new(p);
        let v_min = self.v_min();
        // relative lengths suffice for every column because v_c >= v_min
        let len = rows;
        let xs = mod_powers(&residues_mont(self.x, p, len, &m)?, self.max_i(), &m);
        let ys = mod_powers(&residues_mont(self.y, p, len, &m)?, self.max_j(), &m);
        let t = match self.t {
            Some(t) => Some(residues_mont(t, p, len, &m)?),
            None => None,
        };
        let mut mat = vec![vec![0u64; self.cols.len()]; rows];
        for (k, col) in self.cols.iter().enumerate() {
            let base = xs[col.i as usize].mul(&ys[col.j as usize], &m);
            let s = if col.times_target {
                let prod = base.mul(t.as_ref().unwrap(), &m);
                ModSeries { val: prod.val, c: prod.c.iter().map(|&v| m.sub(0, v)).collect() }
            } else {
                base
            };
            for (r, row) in mat.iter_mut().enumerate() {
                let e = v_min + r as i64;
                let idx = e - s.val;
                if idx >= 0 && (idx as usize) < s.c.len() {
                    row[k] = m.from_mont(s.c[idx as usize]);
                } else if idx >= 0 {
                    unreachable!("column known to fewer exponents than the window");
                }
            }
        }
        Some(mat)
    }

    /// The polynomials `(P, D)` of a coefficient vector.
    fn split(&self, v: &[BigInt]) -> (BiPoly, BiPoly) {
        let mut num = BiPoly::zero();
        let mut den = BiPoly::zero();
        for (c, a) in self.cols.iter().zip(v) {
            let r = BigRational::from_integer(a.clone());
            if c.times_target {
                den.add_term((c.i, c.j), r);
            } else {
                num.add_term((c.i, c.j), r);
            }
        }
        (num, den)
    }

    /// Exact check that `P(x, y) - t D(x, y)` vanishes below `v_min + len`.
    fn verify_exact(&self, v: &[BigInt], len: usize) -> std::result::Result<(), i64> {
        let (num, den) = self.split(v);
        let end = self.v_min() + len as i64;
        let xt = self.x.truncate(self.x.valuation() + len as i64);
        let yt = self.y.truncate(self.y.valuation() + len as i64);
        let xs = series_powers(&xt, self.max_i());
        let ys = series_powers(&yt, self.max_j());
        let mut lhs = if num.is_zero() { QSeries::zero(end) } else { num.eval_with_powers(&xs, &ys) };
        if let Some(t) = self.t {
            if !den.is_zero() {
                let tt = t.truncate(t.valuation() + len as i64);
                let dd = den.eval_with_powers(&xs, &ys).mul(&tt);
                lhs = &lhs - &dd;
            }
        }
        let lhs = lhs.truncate(end);
        if lhs.is_zero() && lhs.trunc() >= end {
            Ok(())
        } else if lhs.is_zero() {
            Err(lhs.trunc())
        } else {
            Err(lhs.valuation())
        }
    }
}

enum SolveOutcome {
    None,
    Unique(Vec<BigInt>),
    Wide(usize),
}

fn check_budget(cfg: &SolveConfig, unknowns: usize) -> Result<()> {
    match cfg.budget {
        Some(b) if unknowns > b => Err(Error::BudgetExceeded { dimension: unknowns, budget: b }),
        _ => Ok(()),
    }
}

fn required(sys: &System, rows: usize) -> Result<()> {
    let have = sys.rel_precision();
    if have < rows {
        return Err(Error::InsufficientPrecision {
            needed: sys.v_min() + rows as i64,
            available: sys.v_min() + have as i64,
        });
    }
    Ok(())
}

/// Kernel dimension modulo one prime on the solve window.
fn nullity(sys: &System, cfg: &SolveConfig) -> Result<usize> {
    let rows = sys.cols.len() + cfg.margin;
    required(sys, rows)?;
    Ok(linalg::kernel_dimension_mod(&|p| sys.matrix_mod(p, rows), sys.cols.len()))
}

fn solve(sys: &System, cfg: &SolveConfig, what: &str) -> Result<SolveOutcome> {
    let u = sys.cols.len();
    let rows = u + cfg.margin;
    required(sys, 2 * rows)?;
    // Instant is unavailable on wasm32, so only read the clock when asked
    let started = cfg.verbose.then(Instant::now);
    let mut failure: Option<i64> = None;
    let k = linalg::modular_kernel_vector(
        |p| sys.matrix_mod(p, rows),
        u,
        |v| match sys.verify_exact(v, 2 * rows) {
            Ok(()) => true,
            Err(e) => {
                failure = Some(e);
                false
            }
        },
        cfg.max_primes,
    );
    if let Some(t) = started {
        eprintln!("[{what}] {u} unknowns, {rows} rows: {:.2?}", t.elapsed());
    }
    match k {
        Ok(Kernel::Trivial) => Ok(SolveOutcome::None),
        Ok(Kernel::Wide(d)) => Ok(SolveOutcome::Wide(d)),
        Ok(Kernel::Vector(v)) => Ok(SolveOutcome::Unique(v)),
        Err(_) => Err(Error::VerificationFailed {
            what: what.to_string(),
            exponent: failure.unwrap_or(sys.v_min() + 2 * rows as i64),
        }),
    }
}

fn relation_columns(d: u32) -> Vec<Column> {
    let mut cols = Vec::new();
    for j in 0..=d {
        for i in 0..=d - j {
            cols.push(Column { i, j, times_target: false });
        }
    }
    cols
}

/// The nonzero polynomial `P` of least total degree `<= dmax` with
/// `P(f, g) = 0`, in canonical form.
pub fn find_plane_relation(f: &QSeries, g: &QSeries, dmax: u32) -> Result<BiPoly> {
    find_plane_relation_with(f, g, dmax, &SolveConfig::default())
}

pub fn find_plane_relation_with(f: &QSeries, g: &QSeries, dmax: u32, cfg: &SolveConfig) -> Result<BiPoly> {
    for d in 1..=dmax {
        let sys = System { x: f, y: g, t: None, cols: relation_columns(d) };
        check_budget(cfg, sys.cols.len())?;
        if nullity(&sys, cfg)? == 0 {
            if cfg.verbose {
                eprintln!("[relation] no relation in total degree {d}");
            }
            continue;
        }
        return match solve(&sys, cfg, "plane relation")? {
            SolveOutcome::Unique(v) => Ok(sys.split(&v).0.canonical()),
            SolveOutcome::Wide(n) => Err(Error::AmbiguousRelation { degree: d as usize, nullity: n }),
            // the first prime saw a spurious kernel; keep searching
            SolveOutcome::None => continue,
        };
    }
    Err(Error::NoRelationFound { dmax: dmax as usize })
}

/// Columns for a numerator of total degree `<= a` with y-degree `< n` and a
/// denominator `x^0 .. x^b`.
fn expression_columns(a: u32, b: u32, n: u32) -> Vec<Column> {
    let mut cols = Vec::new();
    for j in 0..n.min(a + 1) {
        for i in 0..=a - j {
            cols.push(Column { i, j, times_target: false });
        }
    }
    for i in 0..=b {
        cols.push(Column { i, j: 0, times_target: true });
    }
    cols
}

/// `target = P(X, Y) / D(X)` with `deg_y P < deg_y(relation)`, total degree
/// of `P` at most `deg_num` and degree of `D` at most `deg_den`.
///
/// The admissible degree pairs form a quadrant whose corner is the primitive
/// solution, so the corner is located by bisection on each coordinate and
/// the solution there is unique up to scaling.
pub fn express_in_generators(
    target: &QSeries,
    x: &QSeries,
    y: &QSeries,
    relation: &BiPoly,
    deg_num: u32,
    deg_den: u32,
) -> Result<RationalExpr> {
    express_in_generators_with(target, x, y, relation, deg_num, deg_den, &SolveConfig::default())
}

pub fn express_in_generators_with(
    target: &QSeries,
    x: &QSeries,
    y: &QSeries,
    relation: &BiPoly,
    deg_num: u32,
    deg_den: u32,
    cfg: &SolveConfig,
) -> Result<RationalExpr> {
    let n = relation.deg_y().unwrap_or(0).max(1);
    let feasible = |a: u32, b: u32| -> Result<bool> {
        let cols = expression_columns(a, b, n);
        check_budget(cfg, cols.len())?;
        let sys = System { x, y, t: Some(target), cols };
        Ok(nullity(&sys, cfg)? > 0)
    };
    // grow a common bound until a solution appears
    let mut s = 1u32;
    loop {
        let (a, b) = (s.min(deg_num), s.min(deg_den));
        if feasible(a, b)? {
            break;
        }
        if a == deg_num && b == deg_den {
            return Err(Error::NoExpressionFound);
        }
        s *= 2;
    }
    let (a_hi, b_hi) = (s.min(deg_num), s.min(deg_den));
    let a0 = bisect(0, a_hi, |a| feasible(a, b_hi))?;
    let b0 = bisect(0, b_hi, |b| feasible(a0, b))?;
    if cfg.verbose {
        eprintln!("[map] numerator degree {a0}, denominator degree {b0}");
    }
    let sys = System { x, y, t: Some(target), cols: expression_columns(a0, b0, n) };
    match solve(&sys, cfg, "rational expression")? {
        SolveOutcome::Unique(v) => {
            let (num, den) = sys.split(&v);
            RationalExpr::new(num, den)
        }
        SolveOutcome::Wide(k) => Err(Error::AmbiguousExpression { nullity: k }),
        SolveOutcome::None => Err(Error::NoExpressionFound),
    }
}

/// `target = P(X, Y) / den(X, Y)` for a fixed denominator, with
/// `deg_y P < deg_y(relation)` and total degree of `P` at most `deg_num`.
/// Only the numerator is unknown, so the systems are far smaller than in
/// [`express_in_generators`] when a good denominator is known in advance.
pub fn express_over_denominator(
    target: &QSeries,
    x: &QSeries,
    y: &QSeries,
    relation: &BiPoly,
    den: &BiPoly,
    deg_num: u32,
    cfg: &SolveConfig,
) -> Result<RationalExpr> {
    let n = relation.deg_y().unwrap_or(0).max(1);
    // den(x, y) * target on the full window costs far more than every solve
    // together, so it is expanded only as far as the systems reach
    let full = x.known_len().min(y.known_len()).min(target.known_len());
    let mut scaled: Option<QSeries> = None;
    let mut scaled_for = |need: usize| -> QSeries {
        if let Some(s) = &scaled {
            if s.known_len() >= need || s.known_len() >= full {
                return s.clone();
            }
        }
        let mut len = (need + 16).min(full);
        loop {
            let cut = |s: &QSeries| s.truncate(s.valuation() + len as i64);
            let s = den.eval_series(&cut(x), &cut(y)).mul(&cut(target));
            if s.known_len() >= need || len == full {
                scaled = Some(s.clone());
                return s;
            }
            len = (2 * len).min(full);
        }
    };
    let mut feasible = |a: u32| -> Result<bool> {
        let cols = expression_columns(a, 0, n);
        check_budget(cfg, cols.len())?;
        let t = scaled_for(cols.len() + cfg.margin);
        let sys = System { x, y, t: Some(&t), cols };
        Ok(nullity(&sys, cfg)? > 0)
    };
    let mut s = 1u32;
    while !feasible(s.min(deg_num))? {
        if s >= deg_num {
            return Err(Error::NoExpressionFound);
        }
        s *= 2;
    }
    let a0 = bisect(0, s.min(deg_num), &mut feasible)?;
    if cfg.verbose {
        eprintln!("[map] numerator degree {a0} over a fixed denominator");
    }
    let cols = expression_columns(a0, 0, n);
    let t = scaled_for(2 * (cols.len() + cfg.margin));
    let sys = System { x, y, t: Some(&t), cols };
    match solve(&sys, cfg, "rational expression")? {
        SolveOutcome::Unique(v) => {
            let (num, c) = sys.split(&v);
            RationalExpr::new(num, den.mul(&c))
        }
        SolveOutcome::Wide(k) => Err(Error::AmbiguousExpression { nullity: k }),
        SolveOutcome::None => Err(Error::NoExpressionFound),
    }
}

/// Least `v` in `lo..=hi` with `pred(v)`, given `pred(hi)` and monotonicity.
fn bisect<F: FnMut(u32) -> Result<bool>>(mut lo: u32, mut hi: u32, mut pred: F) -> Result<u32> {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Bounds for [`bootstrap_generator`].
#[derive(Clone, Debug)]
pub struct BootstrapBounds {
    pub deg_num: u32,
    pub deg_den: u32,
}

/// Recovers a function on the curve from a few known coefficients: finds
/// `R = P(X, Y)/D(X)` matching every known coefficient of `partial` and
/// re-expands it to the precision of `X`, `Y`.
///
/// The match uses only the known window of `partial`, so it needs more known
/// coefficients than unknowns at the matching degree; when that is not the
/// case the expansion is reported as not found.
pub fn bootstrap_generator(
    partial: &QSeries,
    x: &QSeries,
    y: &QSeries,
    relation: &BiPoly,
    bounds: &BootstrapBounds,
) -> Result<QSeries> {
    let n = relation.deg_y().unwrap_or(0).max(1);
    let known = partial.known_len();
    let cfg = SolveConfig { margin: 2, ..SolveConfig::default() };
    for total in 0..=(bounds.deg_num + bounds.deg_den) {
        for b in 0..=total.min(bounds.deg_den) {
            let a = total - b;
            if a > bounds.deg_num {
                continue;
            }
            let cols = expression_columns(a, b, n);
            if cols.len() + cfg.margin > known {
                return Err(Error::NoExpressionFound);
            }
            let sys = System { x, y, t: Some(partial), cols };
            let rows = known;
            let k = linalg::modular_kernel_vector(
                |p| sys.matrix_mod(p, rows),
                sys.cols.len(),
                |v| sys.verify_exact(v, rows).is_ok(),
                200,
            );
            let Ok(Kernel::Vector(v)) = k else { continue };
            let (num, den) = sys.split(&v);
            let expr = RationalExpr::new(num, den)?;
            let full = expr.eval_series(x, y)?;
            for (e, c) in partial.terms() {
                if e >= full.trunc() {
                    break;
                }
                if full.coefficient(e)? != c {
                    return Err(Error::InconsistentPartial { exponent: e });
                }
            }
            return Ok(full);
        }
    }
    Err(Error::NoExpressionFound)
}

/// `relation(f, g)` must vanish on the whole common window.
pub fn check_relation(relation: &BiPoly, f: &QSeries, g: &QSeries) -> Result<()> {
    let r = relation.eval_series(f, g);
    if r.is_zero() {
        Ok(())
    } else {
        Err(Error::VerificationFailed { what: "relation".into(), exponent: r.valuation() })
    }
}

/// `expr(x, y) == target` on the common window.
pub fn check_expression(expr: &RationalExpr, target: &QSeries, x: &QSeries, y: &QSeries) -> Result<()> {
    let lhs = expr.num.eval_series(x, y);
    let rhs = expr.den.eval_series(x, y).mul(target);
    let d = &lhs - &rhs;
    if d.is_zero() {
        Ok(())
    } else {
        Err(Error::VerificationFailed { what: "rational expression".into(), exponent: d.valuation() })
    }
}

pub fn identity_expression() -> RationalExpr {
    RationalExpr::new(BiPoly::x(), BiPoly::constant(BigRational::one())).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::invariant_quadruple;

    #[test]
    fn square_relation() {
        let f = QSeries::from_i64s(-1, &[1; 1]).extend_zeros(60);
        let g = f.square();
        let p = find_plane_relation(&f, &g, 3).unwrap();
        assert_eq!(p, BiPoly::from_int_terms(&[((2, 0), 1), ((0, 1), -1)]));
    }

    #[test]
    fn identity_map() {
        let inv = invariant_quadruple(11, 200);
        let rel = find_plane_relation(&inv.a4, &inv.a6, 6).unwrap();
        let e = express_in_generators(&inv.a4, &inv.a4, &inv.a6, &rel, 4, 4).unwrap();
        assert_eq!(e, identity_expression());
    }

    #[test]
    fn level_11_relation_is_sextic() {
        let inv = invariant_quadruple(11, 200);
        let rel = find_plane_relation(&inv.a4, &inv.a6, 6).unwrap();
        assert_eq!(rel.total_degree(), Some(6));
        assert_eq!(rel.num_terms(), 19);
        assert_eq!(rel.coeff(0, 0), BigRational::from_integer((-285311670611i64).into()));
    }

    #[test]
    fn bootstrap_roundtrip() {
        let inv = invariant_quadruple(11, 120);
        let rel = find_plane_relation(&inv.a4, &inv.a6, 6).unwrap();
        let partial = inv.a4.truncate(20);
        let full = bootstrap_generator(&partial, &inv.a4, &inv.a6, &rel, &BootstrapBounds { deg_num: 3, deg_den: 3 }).unwrap();
        assert_eq!(full, inv.a4);
    }
}

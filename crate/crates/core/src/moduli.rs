//! The level-N pipeline: a plane model of X0(N) in the coordinates
//! `(a4, a6)`, the primed invariants as rational functions on it, and the
//! elliptic-curve plumbing needed to read off isogenous pairs.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::forms::{invariant_quadruple, InvariantQuadruple};
use crate::numth::{rational_root, squarefree_part, squarefree_part_rational};
use crate::poly::{squarefree_decomposition, udivrem, umul, uprimitive, upow, BiPoly, RationalExpr, UPoly};
use crate::rational::{pow, qi};
use crate::relations::{
    check_expression, check_relation, express_in_generators_with, express_over_denominator, find_plane_relation_with,
    SolveConfig,
};
use crate::series::QSeries;

/// `y^2 = x^3 + A x + B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EllCurve {
    pub a: BigRational,
    pub b: BigRational,
}

impl EllCurve {
    pub fn new(a: BigRational, b: BigRational) -> Result<EllCurve> {
        let e = EllCurve { a, b };
        if e.disc_factor().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(e)
    }

    /// Short model `(-27 c4, -54 c6)` of a long Weierstrass model.
    pub fn from_ainvs(a: &[BigRational; 5]) -> Result<EllCurve> {
        let [a1, a2, a3, a4, a6] = a;
        let b2 = a1 * a1 + qi(4) * a2;
        let b4 = qi(2) * a4 + a1 * a3;
        let b6 = a3 * a3 + qi(4) * a6;
        let c4 = &b2 * &b2 - qi(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + qi(36) * &b2 * &b4 - qi(216) * &b6;
        EllCurve::new(qi(-27) * c4, qi(-54) * c6)
    }

    /// `4A^3 + 27B^2`.
    fn disc_factor(&self) -> BigRational {
        qi(4) * pow(&self.a, 3) + qi(27) * pow(&self.b, 2)
    }

    pub fn j_invariant(&self) -> BigRational {
        qi(6912) * pow(&self.a, 3) / self.disc_factor()
    }
}

impl fmt::Display for EllCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({})", self.a, self.b)
    }
}

pub fn j_invariant(e: &EllCurve) -> Result<BigRational> {
    if e.disc_factor().is_zero() {
        return Err(Error::SingularCurve);
    }
    Ok(e.j_invariant())
}

/// `(D^2 A, D^3 B)`.
pub fn quadratic_twist(e: &EllCurve, d: &BigInt) -> Result<EllCurve> {
    if d.is_zero() {
        return Err(Error::InvalidArgument("twist by zero".into()));
    }
    let d = BigRational::from_integer(d.clone());
    EllCurve::new(&d * &d * &e.a, &d * &d * &d * &e.b)
}

/// Squarefree `D` with `e2` isomorphic over Q to the twist of `e1` by `D`.
///
/// For `j = 0` and `j = 1728` only quadratic twists are recognised; sextic
/// and quartic twists give `NotQuadraticTwist`.
pub fn twist_factor(e1: &EllCurve, e2: &EllCurve) -> Result<BigInt> {
    if e1.j_invariant() != e2.j_invariant() {
        return Err(Error::NotTwists);
    }
    let d = if e1.a.is_zero() {
        // B2/B1 = (D s^2)^3
        let c = rational_root(&(&e2.b / &e1.b), 3).ok_or(Error::NotQuadraticTwist)?;
        squarefree_part_rational(&c)
    } else if e1.b.is_zero() {
        // A2/A1 = (D s^2)^2, sign of D s^2 is not visible
        let c = rational_root(&(&e2.a / &e1.a), 2).ok_or(Error::NotQuadraticTwist)?;
        squarefree_part_rational(&c.abs())
    } else {
        squarefree_part_rational(&(&e2.b * &e1.a / (&e1.b * &e2.a)))
    };
    // E2 = (D^2 s^4 A1, D^3 s^6 B1) for some rational s
    let tw = quadratic_twist(e1, &d)?;
    let witness = if tw.a.is_zero() {
        rational_root(&(&e2.b / &tw.b), 6).is_some()
    } else if tw.b.is_zero() {
        rational_root(&(&e2.a / &tw.a), 4).is_some()
    } else {
        let s2 = (&e2.b / &tw.b) / (&e2.a / &tw.a);
        rational_root(&s2, 2).is_some() && &s2 * &s2 * &tw.a == e2.a
    };
    if !witness {
        return Err(Error::NotQuadraticTwist);
    }
    Ok(d)
}

/// True when `d1 / d2` is a nonzero rational square.
pub fn same_square_class(d1: &BigInt, d2: &BigInt) -> bool {
    !d1.is_zero() && !d2.is_zero() && squarefree_part(d1) == squarefree_part(d2)
}

/// Maps from a user-supplied model with coordinates `X, Y` to the four
/// invariants.
#[derive(Clone, Debug)]
pub struct ExternalMaps {
    /// `F(X, Y) = 0` for the model.
    pub curve: BiPoly,
    pub x: QSeries,
    pub y: QSeries,
    pub a4: RationalExpr,
    pub a6: RationalExpr,
    pub a4p: RationalExpr,
    pub a6p: RationalExpr,
}

#[derive(Clone, Debug)]
pub struct CurveModel {
    pub level: u64,
    pub quadruple: InvariantQuadruple,
    pub relation: BiPoly,
    pub map_a4p: RationalExpr,
    pub map_a6p: RationalExpr,
    pub external: Option<ExternalMaps>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identification {
    pub label: String,
    pub d: BigInt,
    pub label_p: String,
    pub d_p: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyPair {
    pub level: u64,
    pub point: (BigRational, BigRational),
    pub domain: EllCurve,
    pub codomain: EllCurve,
    pub identification: Option<Identification>,
}

/// Index of Gamma0(N) in SL2(Z).
pub fn psi(n: u64) -> u64 {
    let mut r = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            r = r / p * (p + 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        r = r / m * (m + 1);
    }
    r
}

pub fn default_dmax(n: u64) -> u32 {
    (psi(n) / 2 + 2) as u32
}

pub fn default_order(dmax: u32) -> usize {
    let d = dmax as usize + 1;
    4 * d * d + 64
}

#[derive(Clone, Debug, Default)]
pub struct ModelOptions {
    pub order: Option<usize>,
    pub dmax: Option<u32>,
    pub solve: SolveConfig,
}

pub fn build_model(n: u64) -> Result<CurveModel> {
    build_model_with(n, &ModelOptions { solve: SolveConfig::from_env(), ..ModelOptions::default() })
}

pub fn build_model_with(n: u64, opts: &ModelOptions) -> Result<CurveModel> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("level must be at least 2, got {n}")));
    }
    let dmax = opts.dmax.unwrap_or_else(|| default_dmax(n));
    let order = opts.order.unwrap_or_else(|| default_order(dmax));
    let quadruple = invariant_quadruple(n, order);
    let cfg = &opts.solve;
    let relation = find_plane_relation_with(&quadruple.a4, &quadruple.a6, dmax, cfg)?;
    let map_a4p = primed_map(&quadruple.a4p, &quadruple, &relation, cfg)?;
    let map_a6p = primed_map(&quadruple.a6p, &quadruple, &relation, cfg)?;
    Ok(CurveModel { level: n, quadruple, relation, map_a4p, map_a6p, external: None })
}

/// The primed invariants are regular wherever `a4, a6` are, so on the
/// smooth affine part of the plane model they lie in the coordinate ring
/// divided by `dF/dy`. Trying that denominator first keeps the unknowns to
/// the numerator alone; the general x-denominator search is the fallback.
fn primed_map(target: &QSeries, q: &InvariantQuadruple, relation: &BiPoly, cfg: &SolveConfig) -> Result<RationalExpr> {
    // generous: both searches stop at the first feasible degree
    let cap = 8 * relation.total_degree().unwrap_or(1).max(1);
    let fy = relation.derivative_y();
    if !fy.is_zero() {
        match express_over_denominator(target, &q.a4, &q.a6, relation, &fy, cap, cfg) {
            Err(Error::NoExpressionFound) | Err(Error::AmbiguousExpression { .. }) => {}
            other => return other,
        }
    }
    express_in_generators_with(target, &q.a4, &q.a6, relation, cap, cap, cfg)
}

impl CurveModel {
    /// Re-checks both invariants of the model on the full window.
    pub fn verify(&self) -> Result<()> {
        let q = &self.quadruple;
        check_relation(&self.relation, &q.a4, &q.a6)?;
        check_expression(&self.map_a4p, &q.a4p, &q.a4, &q.a6)?;
        check_expression(&self.map_a6p, &q.a6p, &q.a4, &q.a6)
    }

    /// Expresses all four invariants in external generators `x, y` that
    /// satisfy `curve(x, y) = 0`. The generators must be known at least as
    /// far as the model's invariants.
    pub fn attach_external(mut self, curve: BiPoly, x: QSeries, y: QSeries, cfg: &SolveConfig) -> Result<CurveModel> {
        check_relation(&curve, &x, &y)?;
        let cap = 8 * curve.total_degree().unwrap_or(1).max(1);
        let q = &self.quadruple;
        let expr = |t: &QSeries| express_in_generators_with(t, &x, &y, &curve, cap, cap, cfg);
        let (a4, a6, a4p, a6p) = (expr(&q.a4)?, expr(&q.a6)?, expr(&q.a4p)?, expr(&q.a6p)?);
        self.external = Some(ExternalMaps { curve, x, y, a4, a6, a4p, a6p });
        Ok(self)
    }
}

/// External maps for `(a4, a6)` in the shape `a4 = (A_Y Y + A_X) / Q^2`,
/// `a6 = (B_Y Y + B_X) / Q^3` with `Q` a primitive integer polynomial in `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMaps {
    pub q: UPoly,
    pub a_y: UPoly,
    pub a_x: UPoly,
    pub b_y: UPoly,
    pub b_x: UPoly,
}

impl ExternalMaps {
    /// `None` when the denominators are not a common square and cube, or a
    /// numerator has degree above one in `Y`.
    pub fn split(&self) -> Option<SplitMaps> {
        let den_x = |e: &RationalExpr| -> Option<UPoly> {
            let c = e.den.y_coefficients();
            (c.len() == 1).then(|| c[0].clone())
        };
        let d6 = den_x(&self.a6)?;
        let mut q: UPoly = vec![BigRational::one()];
        for (f, k) in squarefree_decomposition(&d6) {
            if k % 3 != 0 {
                return None;
            }
            q = umul(&q, &upow(&f, k / 3));
        }
        let q: UPoly = uprimitive(&q).into_iter().map(BigRational::from_integer).collect();
        let scale = |den: &UPoly, k: u32| -> Option<BigRational> {
            let (c, r) = udivrem(den, &upow(&q, k));
            (r.is_empty() && c.len() == 1).then(|| c[0].clone())
        };
        let parts = |e: &RationalExpr, k: u32| -> Option<(UPoly, UPoly)> {
            let c = scale(&den_x(e)?, k)?;
            let ys = e.num.scale(&(BigRational::one() / c)).y_coefficients();
            match ys.len() {
                1 => Some((Vec::new(), ys[0].clone())),
                2 => Some((ys[1].clone(), ys[0].clone())),
                _ => None,
            }
        };
        let (a_y, a_x) = parts(&self.a4, 2)?;
        let (b_y, b_x) = parts(&self.a6, 3)?;
        Some(SplitMaps { q, a_y, a_x, b_y, b_x })
    }
}

pub fn evaluate_pair(model: &CurveModel, x: &BigRational, y: &BigRational) -> Result<IsogenyPair> {
    if !model.relation.eval_point(x, y).is_zero() {
        return Err(Error::PointNotOnCurve);
    }
    let xp = model.map_a4p.eval_point(x, y)?;
    let yp = model.map_a6p.eval_point(x, y)?;
    Ok(IsogenyPair {
        level: model.level,
        point: (x.clone(), y.clone()),
        domain: EllCurve::new(x.clone(), y.clone())?,
        codomain: EllCurve::new(xp, yp)?,
        identification: None,
    })
}

/// Evaluates at a point of the external model, given projectively; the
/// point at infinity (`z = 0`) is rejected.
pub fn evaluate_pair_external(model: &CurveModel, xyz: [&BigRational; 3]) -> Result<IsogenyPair> {
    let ext = model
        .external
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("model has no external generator maps".into()))?;
    let [x0, y0, z] = xyz;
    if z.is_zero() {
        return Err(Error::PointAtInfinity);
    }
    let (x0, y0) = (x0 / z, y0 / z);
    if !ext.curve.eval_point(&x0, &y0).is_zero() {
        return Err(Error::PointNotOnCurve);
    }
    let a4 = ext.a4.eval_point(&x0, &y0)?;
    let a6 = ext.a6.eval_point(&x0, &y0)?;
    let a4p = ext.a4p.eval_point(&x0, &y0)?;
    let a6p = ext.a6p.eval_point(&x0, &y0)?;
    if !model.relation.eval_point(&a4, &a6).is_zero() {
        return Err(Error::VerificationFailed { what: "image of external point".into(), exponent: 0 });
    }
    Ok(IsogenyPair {
        level: model.level,
        domain: EllCurve::new(a4.clone(), a6.clone())?,
        codomain: EllCurve::new(a4p, a6p)?,
        point: (a4, a6),
        identification: None,
    })
}

/// Catalog label and twist factor of a single curve.
pub fn identify_curve(e: &EllCurve, catalog: &Catalog) -> Result<(String, BigInt)> {
    let j = e.j_invariant();
    let Some(r) = catalog.with_j(&j).next() else {
        return Err(Error::UnknownCurve { j });
    };
    Ok((r.label.clone(), twist_factor(&r.short, e)?))
}

pub fn identify(pair: &IsogenyPair, catalog: &Catalog) -> Result<Identification> {
    let (label, d) = identify_curve(&pair.domain, catalog)?;
    let (label_p, d_p) = identify_curve(&pair.codomain, catalog)?;
    Ok(Identification { label, d, label_p, d_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn curve(a: BigRational, b: BigRational) -> EllCurve {
        EllCurve::new(a, b).unwrap()
    }

    #[test]
    fn j_examples() {
        assert_eq!(curve(qi(-1), qi(0)).j_invariant(), qi(1728));
        assert_eq!(curve(qi(0), qi(1)).j_invariant(), qi(0));
        assert_eq!(EllCurve::new(qi(-3), qi(2)), Err(Error::SingularCurve));
    }

    #[test]
    fn twists() {
        let e = curve(qi(-1), qi(0));
        assert_eq!(quadratic_twist(&e, &BigInt::from(-1)).unwrap(), e);
        let f = curve(qi(1), qi(1));
        assert_eq!(quadratic_twist(&f, &BigInt::one()).unwrap(), f);
        assert_eq!(twist_factor(&f, &f).unwrap(), BigInt::one());
        let g = quadratic_twist(&f, &BigInt::from(-15)).unwrap();
        // rescale by u = 2/3 to hide the twist
        let u = q(2, 3);
        let g = curve(pow(&u, 4) * &g.a, pow(&u, 6) * &g.b);
        assert_eq!(twist_factor(&f, &g).unwrap(), BigInt::from(-15));
        assert_eq!(twist_factor(&f, &curve(qi(-1), qi(0))), Err(Error::NotTwists));
    }

    #[test]
    fn special_j_twists() {
        let e = curve(qi(0), qi(1));
        assert_eq!(twist_factor(&e, &curve(qi(0), qi(-8))).unwrap(), BigInt::from(-2));
        assert_eq!(twist_factor(&e, &curve(qi(0), qi(2))), Err(Error::NotQuadraticTwist));
        let e = curve(qi(-1), qi(0));
        assert_eq!(twist_factor(&e, &curve(qi(-9), qi(0))).unwrap(), BigInt::from(3));
        assert_eq!(twist_factor(&e, &curve(qi(-2), qi(0))), Err(Error::NotQuadraticTwist));
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(11), 12);
        assert_eq!(psi(14), 24);
        assert_eq!(psi(27), 36);
        assert_eq!(psi(163), 164);
    }
}

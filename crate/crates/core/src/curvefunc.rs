//! Functions on a curve: the coordinate ring `k[x,y]/(y^2 - f)` and its
//! fraction field, with evaluation, valuations, pullback, expansion at the
//! identity, and square roots of functions supported on the 2-torsion.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::Polynomial;
use crate::ratfun::RatFun;
use crate::series::LaurentSeries;
use crate::weierstrass::{Point, WeierstrassCurve};

/// `u(x) + y v(x)` in the coordinate ring of a curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveFunction {
    curve: Arc<WeierstrassCurve>,
    u: Polynomial,
    v: Polynomial,
}

impl CurveFunction {
    pub fn new(curve: Arc<WeierstrassCurve>, u: Polynomial, v: Polynomial) -> Self {
        CurveFunction { curve, u, v }
    }

    pub fn curve(&self) -> &Arc<WeierstrassCurve> {
        &self.curve
    }

    pub fn u(&self) -> &Polynomial {
        &self.u
    }

    pub fn v(&self) -> &Polynomial {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// `u - y v`.
    pub fn conj(&self) -> Self {
        CurveFunction {
            curve: self.curve.clone(),
            u: self.u.clone(),
            v: -&self.v,
        }
    }

    /// `(u + yv)(u - yv) = u^2 - f v^2`.
    pub fn norm(&self) -> Polynomial {
        &(&self.u * &self.u) - &(&(&self.v * &self.v) * self.curve.f())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = self.curve.f();
        let u = &(&self.u * &other.u) + &(&(&self.v * &other.v) * f);
        let v = &(&self.u * &other.v) + &(&self.v * &other.u);
        CurveFunction {
            curve: self.curve.clone(),
            u,
            v,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        CurveFunction {
            curve: self.curve.clone(),
            u: &self.u + &other.u,
            v: &self.v + &other.v,
        }
    }

    pub fn scale_poly(&self, p: &Polynomial) -> Self {
        CurveFunction {
            curve: self.curve.clone(),
            u: &self.u * p,
            v: &self.v * p,
        }
    }

    pub fn eval(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        &self.u.eval(x) + &(y * &self.v.eval(x))
    }
}

/// `(u(x) + y v(x)) / d(x)` in canonical form: `d` monic and
/// `gcd(u, v, d) = 1`. Zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveRationalFunction {
    num: CurveFunction,
    den: Polynomial,
}

/// Result of evaluating a function at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Finite(FieldElement),
    Pole,
}

/// A divisor over the base field: multiplicities at rational points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Divisor {
    pub at_infinity: i64,
    pub points: Vec<(Point, i64)>,
}

impl Divisor {
    pub fn degree(&self) -> i64 {
        self.at_infinity + self.points.iter().map(|(_, m)| m).sum::<i64>()
    }

    pub fn multiplicity(&self, p: &Point) -> i64 {
        match p {
            Point::Infinity => self.at_infinity,
            _ => self
                .points
                .iter()
                .find(|(q, _)| q == p)
                .map_or(0, |(_, m)| *m),
        }
    }

    /// Sum of the points with multiplicity under the group law.
    pub fn sum(&self, curve: &WeierstrassCurve) -> Result<Point> {
        let mut acc = Point::Infinity;
        for (p, m) in &self.points {
            acc = curve.add(&acc, &curve.mul(*m, p)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.points.iter().map(|(p, m)| format!("{m}{p}")).collect();
        if self.at_infinity != 0 {
            parts.push(format!("{}(O)", self.at_infinity));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl CurveRationalFunction {
    pub fn new(num: CurveFunction, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let spec = den.spec();
        if num.is_zero() {
            return Ok(CurveRationalFunction {
                num,
                den: Polynomial::one(spec),
            });
        }
        let mut u = num.u;
        let mut v = num.v;
        let mut d = den;
        if !d.is_one() {
            let g = u.gcd(&v).gcd(&d);
            if !g.is_one() {
                u = u.exact_div(&g).expect("gcd divides");
                v = v.exact_div(&g).expect("gcd divides");
                d = d.exact_div(&g).expect("gcd divides");
            }
            if !d.is_monic() {
                let li = d.lead().inv()?;
                u = u.scale(&li);
                v = v.scale(&li);
                d = d.scale(&li);
            }
        }
        Ok(CurveRationalFunction {
            num: CurveFunction {
                curve: num.curve,
                u,
                v,
            },
            den: d,
        })
    }

    pub fn from_parts(
        curve: &Arc<WeierstrassCurve>,
        u: Polynomial,
        v: Polynomial,
        d: Polynomial,
    ) -> Result<Self> {
        Self::new(CurveFunction::new(curve.clone(), u, v), d)
    }

    /// `a + y b` for x-only rational functions `a`, `b`.
    pub fn from_ratfuns(curve: &Arc<WeierstrassCurve>, a: &RatFun, b: &RatFun) -> Self {
        let l = a.den().lcm(b.den());
        let ua = a.num() * &l.exact_div(a.den()).expect("lcm");
        let vb = b.num() * &l.exact_div(b.den()).expect("lcm");
        Self::from_parts(curve, ua, vb, l).expect("nonzero denominator")
    }

    pub fn from_ratfun(curve: &Arc<WeierstrassCurve>, a: &RatFun) -> Self {
        Self::from_ratfuns(curve, a, &RatFun::zero(curve.spec()))
    }

    pub fn from_poly(curve: &Arc<WeierstrassCurve>, p: Polynomial) -> Self {
        let s = curve.spec();
        Self::from_parts(curve, p, Polynomial::zero(s), Polynomial::one(s)).unwrap()
    }

    pub fn constant(curve: &Arc<WeierstrassCurve>, c: FieldElement) -> Self {
        Self::from_poly(curve, Polynomial::constant(c))
    }

    pub fn one(curve: &Arc<WeierstrassCurve>) -> Self {
        Self::constant(curve, curve.spec().one())
    }

    pub fn zero(curve: &Arc<WeierstrassCurve>) -> Self {
        Self::constant(curve, curve.spec().zero())
    }

    pub fn x(curve: &Arc<WeierstrassCurve>) -> Self {
        Self::from_poly(curve, Polynomial::x(curve.spec()))
    }

    pub fn y(curve: &Arc<WeierstrassCurve>) -> Self {
        let s = curve.spec();
        Self::from_parts(
            curve,
            Polynomial::zero(s),
            Polynomial::one(s),
            Polynomial::one(s),
        )
        .unwrap()
    }

    pub fn curve(&self) -> &Arc<WeierstrassCurve> {
        &self.num.curve
    }

    pub fn spec(&self) -> FieldSpec {
        self.num.curve.spec()
    }

    pub fn u(&self) -> &Polynomial {
        &self.num.u
    }

    pub fn v(&self) -> &Polynomial {
        &self.num.v
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn numerator(&self) -> &CurveFunction {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.v.is_zero() && self.den.is_one() && self.num.u.is_one()
    }

    /// The constant value, if this is a constant function.
    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.num.v.is_zero() && self.den.is_one() && self.num.u.is_constant() {
            Some(self.num.u.coeff(0))
        } else {
            None
        }
    }

    /// The x-only rational function, if `v = 0`.
    pub fn as_ratfun(&self) -> Option<RatFun> {
        if self.num.v.is_zero() {
            RatFun::new(self.num.u.clone(), self.den.clone()).ok()
        } else {
            None
        }
    }

    /// Whether the function lies in the coordinate ring.
    pub fn is_regular(&self) -> bool {
        self.den.is_one()
    }

    fn same_curve(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(self.curve(), other.curve()) || self.curve() == other.curve(),
            "functions on different curves: {} vs {}",
            self.curve(),
            other.curve()
        );
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_curve(other);
        Self::new(self.num.mul(&other.num), &self.den * &other.den).expect("nonzero denominators")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_curve(other);
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone()).unwrap();
        }
        let n = self
            .num
            .scale_poly(&other.den)
            .add(&other.num.scale_poly(&self.den));
        Self::new(n, &self.den * &other.den).unwrap()
    }

    pub fn neg(&self) -> Self {
        CurveRationalFunction {
            num: CurveFunction {
                curve: self.num.curve.clone(),
                u: -&self.num.u,
                v: -&self.num.v,
            },
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::new(
            CurveFunction {
                curve: self.num.curve.clone(),
                u: self.num.u.scale(c),
                v: self.num.v.scale(c),
            },
            self.den.clone(),
        )
        .unwrap()
    }

    /// Multiplicative inverse via the conjugate: `d (u - yv) / (u^2 - f v^2)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let conj = self.num.conj();
        Self::new(conj.scale_poly(&self.den), self.num.norm())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(self.curve());
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// The same function after extending the base field.
    pub fn base_change(&self, curve: &Arc<WeierstrassCurve>) -> Result<Self> {
        let s = curve.spec();
        let emb = |p: &Polynomial| -> Result<Polynomial> {
            Ok(Polynomial::new(
                s,
                p.coeffs()
                    .iter()
                    .map(|c| s.embed(c))
                    .collect::<Result<Vec<_>>>()?,
            ))
        };
        Self::from_parts(curve, emb(self.u())?, emb(self.v())?, emb(&self.den)?)
    }

    /// Value at a point. `0/0` in the canonical form is resolved through the
    /// local structure; it is only an error when a pole and a zero of the
    /// representation genuinely meet, which the valuation then decides.
    pub fn eval(&self, p: &Point) -> Result<Value> {
        let ord = self.ord_at(p)?;
        if ord > 0 {
            return Ok(Value::Finite(self.spec().zero()));
        }
        if ord < 0 {
            return Ok(Value::Pole);
        }
        match p {
            Point::Infinity => Ok(Value::Finite(self.lead_at_infinity()?.1)),
            Point::Affine(x0, y0) => {
                let d0 = self.den.eval(x0);
                let n0 = self.num.eval(x0, y0);
                if !d0.is_zero() {
                    return Ok(Value::Finite(n0.checked_div(&d0)?));
                }
                self.eval_resolving(x0, y0)
            }
        }
    }

    /// Evaluation when the canonical representation reads `0/0` but the
    /// valuation is zero.
    fn eval_resolving(&self, x0: &FieldElement, y0: &FieldElement) -> Result<Value> {
        let lin = Polynomial::linear_root(x0);
        let strip = |mut p: Polynomial| -> (Polynomial, i64) {
            let mut k = 0;
            while let Some(q) = p.exact_div(&lin) {
                p = q;
                k += 1;
            }
            (p, k)
        };
        if y0.is_zero() {
            // ord 0 at a 2-torsion point forces the u-part to dominate.
            let (u, ku) = strip(self.num.u.clone());
            let (d, kd) = strip(self.den.clone());
            if ku != kd {
                return Err(Error::Indeterminate);
            }
            return Ok(Value::Finite(u.eval(x0).checked_div(&d.eval(x0))?));
        }
        let mut u = self.num.u.clone();
        let mut v = self.num.v.clone();
        let mut k = 0i64;
        while u.eval(x0).is_zero() && v.eval(x0).is_zero() {
            u = u.exact_div(&lin).unwrap();
            v = v.exact_div(&lin).unwrap();
            k += 1;
        }
        let stripped = CurveFunction::new(self.num.curve.clone(), u, v);
        let (d, kd) = strip(self.den.clone());
        let n0 = stripped.eval(x0, y0);
        if !n0.is_zero() {
            if k != kd {
                return Err(Error::Indeterminate);
            }
            return Ok(Value::Finite(n0.checked_div(&d.eval(x0))?));
        }
        // (u + yv) = norm / (u - yv), with the conjugate nonzero at the point.
        let c0 = stripped.conj().eval(x0, y0);
        let (n, kn) = strip(stripped.norm());
        if k + kn != kd {
            return Err(Error::Indeterminate);
        }
        Ok(Value::Finite(n.eval(x0).checked_div(&(&c0 * &d.eval(x0)))?))
    }

    /// `(ord_O, leading coefficient)` of the expansion in `T = -x/y`, read off
    /// from degrees: `x = T^-2 + ...`, `y = -T^-3 + ...`.
    pub fn lead_at_infinity(&self) -> Result<(i64, FieldElement)> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let dd = self.den.deg_i();
        let ord_u = if self.num.u.is_zero() {
            i64::MAX
        } else {
            -2 * self.num.u.deg_i()
        };
        let ord_v = if self.num.v.is_zero() {
            i64::MAX
        } else {
            -3 - 2 * self.num.v.deg_i()
        };
        let ld = self.den.lead();
        if ord_u < ord_v {
            Ok((ord_u + 2 * dd, self.num.u.lead().checked_div(&ld)?))
        } else {
            Ok((ord_v + 2 * dd, (-self.num.v.lead()).checked_div(&ld)?))
        }
    }

    /// Valuation at a point of the curve.
    pub fn ord_at(&self, p: &Point) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        match p {
            Point::Infinity => Ok(self.lead_at_infinity()?.0),
            Point::Affine(x0, y0) => {
                if !self.curve().contains(p) {
                    return Err(Error::CurveMismatch(format!(
                        "{p} is not on {}",
                        self.curve()
                    )));
                }
                let mult = |q: &Polynomial| q.root_multiplicity(x0) as i64;
                if y0.is_zero() {
                    // uniformizer y; ord(x - e) = 2
                    let ou = if self.num.u.is_zero() {
                        i64::MAX
                    } else {
                        2 * mult(&self.num.u)
                    };
                    let ov = if self.num.v.is_zero() {
                        i64::MAX
                    } else {
                        1 + 2 * mult(&self.num.v)
                    };
                    return Ok(ou.min(ov) - 2 * mult(&self.den));
                }
                let lin = Polynomial::linear_root(x0);
                let mut u = self.num.u.clone();
                let mut v = self.num.v.clone();
                let mut k = 0i64;
                while u.eval(x0).is_zero() && v.eval(x0).is_zero() {
                    u = u
                        .exact_div(&lin)
                        .unwrap_or_else(|| Polynomial::zero(x0.spec()));
                    v = v
                        .exact_div(&lin)
                        .unwrap_or_else(|| Polynomial::zero(x0.spec()));
                    k += 1;
                }
                let stripped = CurveFunction::new(self.num.curve.clone(), u, v);
                let ord_num = if stripped.eval(x0, y0).is_zero() {
                    k + mult(&stripped.norm())
                } else {
                    k
                };
                Ok(ord_num - mult(&self.den))
            }
        }
    }

    /// Laurent expansion at the identity in `T = -x/y`, with `precision`
    /// known terms starting at the leading one.
    pub fn expand_at_o(&self, precision: usize) -> Result<LaurentSeries> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        if precision < 1 {
            return Err(Error::InsufficientPrecision(
                "at least one term is required".into(),
            ));
        }
        let du = self.num.u.deg_i().max(0);
        let dv = self.num.v.deg_i().max(0);
        let margin = (2 * du.max(dv) + 4) as usize;
        let (xs, ys) = self.curve().expand_coordinates(precision + margin)?;
        let u = xs.eval_polynomial(&self.num.u);
        let v = xs.eval_polynomial(&self.num.v);
        let n = &u + &(&ys * &v);
        let h = if self.den.is_one() {
            n
        } else {
            n.checked_div(&xs.eval_polynomial(&self.den))?
        };
        if h.is_zero() || h.relative_precision() < precision as i64 {
            return Err(Error::InsufficientPrecision(format!(
                "could not resolve {precision} terms"
            )));
        }
        Ok(h.truncate(h.valuation() + precision as i64))
    }

    /// `h ∘ φ` for a map `(x, y) -> (X(x), y Y(x))` from `source`.
    pub fn pullback_maps(
        &self,
        source: &Arc<WeierstrassCurve>,
        xmap: &RatFun,
        ymap: &RatFun,
    ) -> Self {
        let ux = xmap.compose_into(&self.num.u);
        let vx = xmap.compose_into(&self.num.v);
        let dx = xmap.compose_into(&self.den);
        let dinv = dx
            .inv()
            .expect("denominator stays nonzero under a nonconstant map");
        let a = &ux * &dinv;
        let b = &(&vx * ymap) * &dinv;
        Self::from_ratfuns(source, &a, &b)
    }

    /// Divisor over the base field, when all zeros and poles are rational.
    pub fn divisor(&self) -> Result<Divisor> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let curve = self.curve();
        let support = &self.num.norm() * &self.den;
        if !support.splits() {
            return Err(Error::ExtensionRequired(
                "zeros or poles lie over a proper extension".into(),
            ));
        }
        let mut points = Vec::new();
        for x0 in support.roots() {
            let fx = curve.f().eval(&x0);
            let ys = if fx.is_zero() {
                vec![fx]
            } else {
                let r = fx.sqrt().ok_or_else(|| {
                    Error::ExtensionRequired(format!("points over x = {x0} are not rational"))
                })?;
                vec![r.clone(), -r]
            };
            for y0 in ys {
                let p = Point::Affine(x0.clone(), y0);
                let m = self.ord_at(&p)?;
                if m != 0 {
                    points.push((p, m));
                }
            }
        }
        Ok(Divisor {
            at_infinity: self.ord_at(&Point::Infinity)?,
            points,
        })
    }

    /// Square root of a function whose divisor is supported on `{O} ∪ E[2]`.
    ///
    /// Such a function is `c y^ε ∏ (x - e_i)^{k_i}`; its square root exists
    /// (over the base field) exactly when all exponents of the root have a
    /// common parity and the required scalar square root exists.
    pub fn sqrt_two_torsion_supported(&self) -> Result<Option<Self>> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let curve = self.curve().clone();
        let roots = curve.split_roots()?;
        let s = self.spec();
        let mut m = [0i64; 3];
        for (i, e) in roots.iter().enumerate() {
            m[i] = self.ord_at(&Point::Affine(e.clone(), s.zero()))?;
        }
        if m.iter().any(|&k| (k - m[0]).rem_euclid(2) != 0) {
            return Err(Error::NotTwoTorsionSupported);
        }
        let model = two_torsion_monomial(&curve, &roots, &m)?;
        let c = self
            .checked_div(&model)?
            .as_constant()
            .ok_or(Error::NotTwoTorsionSupported)?;
        if m.iter().any(|k| k.rem_euclid(2) != 0) {
            return Ok(None);
        }
        let half = [m[0] / 2, m[1] / 2, m[2] / 2];
        if half.iter().any(|&k| (k - half[0]).rem_euclid(2) != 0) {
            return Ok(None);
        }
        let root_model = two_torsion_monomial(&curve, &roots, &half)?;
        let sc = match c.sqrt() {
            Some(r) => r,
            None => return Ok(None),
        };
        Ok(Some(root_model.scale(&sc)))
    }
}

/// The monic function `y^ε ∏ (x - e_i)^{⌊m_i/2⌋}` with orders `m_i` at the
/// 2-torsion points (all `m_i` of the same parity `ε`).
pub fn two_torsion_monomial(
    curve: &Arc<WeierstrassCurve>,
    roots: &[FieldElement; 3],
    m: &[i64; 3],
) -> Result<CurveRationalFunction> {
    let eps = m[0].rem_euclid(2);
    let mut acc = if eps == 1 {
        CurveRationalFunction::y(curve)
    } else {
        CurveRationalFunction::one(curve)
    };
    for (e, &k) in roots.iter().zip(m) {
        let lin = CurveRationalFunction::from_poly(curve, Polynomial::linear_root(e));
        acc = acc.mul(&lin.powi((k - eps).div_euclid(2))?);
    }
    Ok(acc)
}

fn fmt_y_term(v: &Polynomial) -> String {
    if v.is_constant() {
        v.lead().fmt_coefficient("y")
    } else {
        format!("y*({v})")
    }
}

impl fmt::Display for CurveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "{}", self.u);
        }
        let yt = fmt_y_term(&self.v);
        if self.u.is_zero() {
            return write!(f, "{yt}");
        }
        match yt.strip_prefix('-') {
            Some(rest) => write!(f, "{} - {rest}", self.u),
            None => write!(f, "{} + {yt}", self.u),
        }
    }
}

impl fmt::Display for CurveRationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm() -> Arc<WeierstrassCurve> {
        Arc::new(WeierstrassCurve::from_i64s(FieldSpec::GaussianRationals, 0, -1, 0).unwrap())
    }

    fn poly(c: &Arc<WeierstrassCurve>, coeffs: &[i64]) -> CurveRationalFunction {
        CurveRationalFunction::from_poly(c, Polynomial::from_i64s(c.spec(), coeffs))
    }

    #[test]
    fn ring_relations() {
        let e = cm();
        let y = CurveRationalFunction::y(&e);
        assert_eq!(y.mul(&y), poly(&e, &[0, -1, 0, 1]));
        let x = CurveRationalFunction::x(&e);
        let prod = x.add(&y).mul(&x.sub(&y));
        assert_eq!(prod, poly(&e, &[0, 1, 1, -1]));
        let q = y.checked_div(&x).unwrap();
        assert_eq!(q.den(), &Polynomial::x(e.spec()));
        assert!(q.mul(&x).sub(&y).is_zero());
    }

    #[test]
    fn evaluation() {
        let e = cm();
        let s = e.spec();
        let p0 = Point::Affine(s.zero(), s.zero());
        assert_eq!(
            poly(&e, &[-1, 1]).eval(&p0).unwrap(),
            Value::Finite(s.from_i64(-1))
        );
        let i = s.gaussian(0, 1).unwrap();
        let two_i_x = CurveRationalFunction::x(&e).scale(&s.gaussian(0, 2).unwrap());
        let pt = Point::Affine(i.clone(), &i - &s.one());
        assert!(e.contains(&pt));
        assert_eq!(two_i_x.eval(&pt).unwrap(), Value::Finite(s.from_i64(-2)));
        let inv_x = CurveRationalFunction::x(&e).inv().unwrap();
        assert_eq!(inv_x.eval(&p0).unwrap(), Value::Pole);
    }

    #[test]
    fn valuations() {
        let e = cm();
        let s = e.spec();
        let y = CurveRationalFunction::y(&e);
        assert_eq!(y.ord_at(&Point::Affine(s.zero(), s.zero())).unwrap(), 1);
        assert_eq!(
            CurveRationalFunction::x(&e)
                .ord_at(&Point::Infinity)
                .unwrap(),
            -2
        );
        assert_eq!(
            poly(&e, &[-1, 1])
                .ord_at(&Point::Affine(s.one(), s.zero()))
                .unwrap(),
            2
        );
        assert_eq!(
            CurveRationalFunction::zero(&e).ord_at(&Point::Infinity),
            Err(Error::ZeroFunction)
        );
    }

    #[test]
    fn expansions() {
        let e = cm();
        let s = e.spec();
        let y = CurveRationalFunction::y(&e).expand_at_o(4).unwrap();
        assert_eq!(y.valuation(), -3);
        assert_eq!(y.lead_coeff().unwrap(), &s.from_i64(-1));
        let t = CurveRationalFunction::x(&e)
            .checked_div(&CurveRationalFunction::y(&e))
            .unwrap()
            .neg();
        let ts = t.expand_at_o(6).unwrap();
        assert_eq!(ts, LaurentSeries::t(s, 7));
    }

    #[test]
    fn two_torsion_square_roots() {
        let e = cm();
        assert_eq!(
            poly(&e, &[0, 0, 1]).sqrt_two_torsion_supported().unwrap(),
            Some(CurveRationalFunction::x(&e))
        );
        assert_eq!(
            poly(&e, &[0, -1, 0, 1])
                .sqrt_two_torsion_supported()
                .unwrap(),
            Some(CurveRationalFunction::y(&e))
        );
        assert_eq!(
            poly(&e, &[0, -1, 1]).sqrt_two_torsion_supported().unwrap(),
            None
        );
        assert_eq!(
            poly(&e, &[2, 1]).sqrt_two_torsion_supported(),
            Err(Error::NotTwoTorsionSupported)
        );
    }

    #[test]
    fn divisor_of_y() {
        let e =
            Arc::new(WeierstrassCurve::from_i64s(FieldSpec::prime(13).unwrap(), 0, -1, 0).unwrap());
        let d = CurveRationalFunction::y(&e).divisor().unwrap();
        assert_eq!(d.at_infinity, -3);
        assert_eq!(d.points.len(), 3);
        assert_eq!(d.degree(), 0);
        assert_eq!(d.sum(&e).unwrap(), Point::Infinity);
    }
}

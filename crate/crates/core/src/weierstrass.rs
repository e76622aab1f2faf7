//! Curves `y^2 = x^3 + A2 x^2 + A4 x + A6`, their rational points, and the
//! expansion of the coordinate functions in the local parameter `T = -x/y`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{canonical_cmp, FieldElement, FieldSpec};
use crate::poly::Polynomial;
use crate::series::{LaurentSeries, EXACT};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    spec: FieldSpec,
    a2: FieldElement,
    a4: FieldElement,
    a6: FieldElement,
    f: Polynomial,
}

/// A point on a curve: the identity or an affine pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(FieldElement, FieldElement),
}

impl Point {
    pub fn affine(x: FieldElement, y: FieldElement) -> Self {
        Point::Affine(x, y)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&FieldElement> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&FieldElement> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// The rational two-torsion of a curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTorsion {
    /// Nonzero rational 2-torsion points in canonical order of x-coordinate.
    pub points: Vec<Point>,
    /// Whether `f` splits completely over the base field.
    pub split: bool,
}

impl WeierstrassCurve {
    pub fn new(
        spec: FieldSpec,
        a2: FieldElement,
        a4: FieldElement,
        a6: FieldElement,
    ) -> Result<Self> {
        if spec.characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        for c in [&a2, &a4, &a6] {
            if c.spec() != spec {
                return Err(Error::InvalidField(format!(
                    "coefficient {c} is not in {spec}"
                )));
            }
        }
        let f = Polynomial::new(spec, vec![a6.clone(), a4.clone(), a2.clone(), spec.one()]);
        if !f.gcd(&f.derivative()).is_one() {
            return Err(Error::SingularCurve);
        }
        Ok(WeierstrassCurve {
            spec,
            a2,
            a4,
            a6,
            f,
        })
    }

    pub fn from_i64s(spec: FieldSpec, a2: i64, a4: i64, a6: i64) -> Result<Self> {
        Self::new(
            spec,
            spec.from_i64(a2),
            spec.from_i64(a4),
            spec.from_i64(a6),
        )
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn a2(&self) -> &FieldElement {
        &self.a2
    }

    pub fn a4(&self) -> &FieldElement {
        &self.a4
    }

    pub fn a6(&self) -> &FieldElement {
        &self.a6
    }

    /// The cubic `f` with `y^2 = f(x)`.
    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    /// `b2, b4, b6, b8` of the model (with `a1 = a3 = 0`).
    pub fn b_invariants(&self) -> [FieldElement; 4] {
        let s = self.spec;
        let b2 = &s.from_i64(4) * &self.a2;
        let b4 = &s.from_i64(2) * &self.a4;
        let b6 = &s.from_i64(4) * &self.a6;
        let b8 = &(&s.from_i64(4) * &(&self.a2 * &self.a6)) - &self.a4.square();
        [b2, b4, b6, b8]
    }

    /// Whether the model is `y^2 = x^3 + A4 x` with a square root of -1 in
    /// the field, i.e. it carries `[i]: (x, y) -> (-x, i y)`.
    pub fn has_gaussian_cm(&self) -> bool {
        self.a2.is_zero() && self.a6.is_zero() && self.spec.sqrt_minus_one().is_some()
    }

    /// Same curve over a larger field.
    pub fn base_change(&self, spec: FieldSpec) -> Result<Self> {
        Self::new(
            spec,
            spec.embed(&self.a2)?,
            spec.embed(&self.a4)?,
            spec.embed(&self.a6)?,
        )
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                x.spec() == self.spec && y.spec() == self.spec && y.square() == self.f.eval(x)
            }
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::CurveMismatch(format!("{p} is not on {self}")))
        }
    }

    pub fn neg(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), -y),
        })
    }

    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return Ok(q.clone()),
            (_, Point::Infinity) => return Ok(p.clone()),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Ok(Point::Infinity);
            }
            // tangent slope (3x^2 + 2 A2 x + A4) / (2y)
            self.f.derivative().eval(x1).checked_div(&(y1 + y1))?
        } else {
            (y2 - y1).checked_div(&(x2 - x1))?
        };
        let x3 = &(&(&lambda.square() - &self.a2) - x1) - x2;
        let y3 = -&(&(&lambda * &(&x3 - x1)) + y1);
        Ok(Point::Affine(x3, y3))
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Result<Point> {
        self.add(p, &self.neg(q)?)
    }

    /// `[n] P` by double-and-add.
    pub fn mul(&self, n: i64, p: &Point) -> Result<Point> {
        self.check(p)?;
        let base = if n < 0 { self.neg(p)? } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &b)?;
            }
            k >>= 1;
            if k > 0 {
                b = self.add(&b, &b)?;
            }
        }
        Ok(acc)
    }

    /// The rational 2-torsion points in the fixed ordering used throughout:
    /// x-coordinates sorted canonically (for `y^2 = x^3 - x` this gives
    /// `(0,0), (1,0), (-1,0)`).
    pub fn two_torsion(&self) -> TwoTorsion {
        let mut roots = self.f.roots();
        roots.sort_by(canonical_cmp);
        let split = roots.len() == 3;
        let zero = self.spec.zero();
        TwoTorsion {
            points: roots
                .into_iter()
                .map(|e| Point::Affine(e, zero.clone()))
                .collect(),
            split,
        }
    }

    /// The 2-torsion x-coordinates when `f` splits completely.
    pub fn split_roots(&self) -> Result<[FieldElement; 3]> {
        let t = self.two_torsion();
        if !t.split {
            return Err(Error::ExtensionRequired(format!(
                "the 2-torsion of {self} is not rational"
            )));
        }
        let xs: Vec<FieldElement> = t
            .points
            .into_iter()
            .map(|p| p.x().unwrap().clone())
            .collect();
        Ok([xs[0].clone(), xs[1].clone(), xs[2].clone()])
    }

    /// `x(T)` and `y(T)` to `precision` terms each, where `T = -x/y`.
    ///
    /// Uses `w = -1/y`, which satisfies `w = T^3 + A2 T^2 w + A4 T w^2 + A6 w^3`,
    /// solved by fixed-point iteration; then `x = T/w`, `y = -1/w`.
    pub fn expand_coordinates(&self, precision: usize) -> Result<(LaurentSeries, LaurentSeries)> {
        if precision < 1 {
            return Err(Error::InsufficientPrecision(
                "at least one term is required".into(),
            ));
        }
        let s = self.spec;
        let abs = 3 + precision as i64;
        let t = LaurentSeries::t(s, EXACT);
        let t2 = &t * &t;
        let t3 = &t2 * &t;
        let mut w = t3.truncate(abs);
        for _ in 0..=precision {
            let w2 = &w * &w;
            let w3 = &w2 * &w;
            let next = &(&(&t3 + &(&t2 * &w).scale(&self.a2)) + &(&t * &w2).scale(&self.a4))
                + &w3.scale(&self.a6);
            let next = next.truncate(abs);
            if next == w {
                break;
            }
            w = next;
        }
        let winv = w.invert()?;
        let x = &t * &winv;
        let y = -&winv;
        Ok((x, y))
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E/{}:[{},{},{}]", self.spec, self.a2, self.a4, self.a6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(spec: FieldSpec) -> WeierstrassCurve {
        WeierstrassCurve::from_i64s(spec, 0, -1, 0).unwrap()
    }

    #[test]
    fn construction() {
        assert!(WeierstrassCurve::from_i64s(FieldSpec::Rationals, 0, -11, -14).is_ok());
        assert_eq!(
            WeierstrassCurve::from_i64s(FieldSpec::Rationals, 0, 0, 0),
            Err(Error::SingularCurve)
        );
    }

    #[test]
    fn group_law_examples() {
        let e = cm(FieldSpec::GaussianRationals);
        let s = e.spec();
        let p0 = Point::Affine(s.zero(), s.zero());
        assert_eq!(e.add(&p0, &p0).unwrap(), Point::Infinity);
        let p1 = Point::Affine(s.one(), s.zero());
        let p2 = Point::Affine(s.from_i64(-1), s.zero());
        assert_eq!(e.add(&p1, &p2).unwrap(), p0);

        let f5 = FieldSpec::prime(5).unwrap();
        let e5 = cm(f5);
        let p = Point::Affine(f5.from_i64(2), f5.from_i64(1));
        assert_eq!(e5.mul(2, &p).unwrap(), Point::Affine(f5.zero(), f5.zero()));
    }

    #[test]
    fn two_torsion_ordering() {
        let e = cm(FieldSpec::GaussianRationals);
        let t = e.two_torsion();
        assert!(t.split);
        let xs: Vec<String> = t
            .points
            .iter()
            .map(|p| p.x().unwrap().to_string())
            .collect();
        assert_eq!(xs, vec!["0", "1", "-1"]);
        let e2 = WeierstrassCurve::from_i64s(FieldSpec::Rationals, 0, 0, -2).unwrap();
        let t2 = e2.two_torsion();
        assert!(t2.points.is_empty() && !t2.split);
        assert!(cm(FieldSpec::prime(5).unwrap()).two_torsion().split);
    }

    #[test]
    fn coordinate_expansion_satisfies_curve() {
        let e = WeierstrassCurve::from_i64s(FieldSpec::Rationals, 2, -3, 5).unwrap();
        let (x, y) = e.expand_coordinates(10).unwrap();
        assert_eq!(x.valuation(), -2);
        assert!(x.lead_coeff().unwrap().is_one());
        assert_eq!(y.valuation(), -3);
        assert_eq!(y.lead_coeff().unwrap(), &e.spec().from_i64(-1));
        let lhs = &y * &y;
        let rhs = x.eval_polynomial(e.f());
        let diff = &lhs - &rhs;
        assert!(diff.is_zero(), "{diff}");
        let t = -&(&x * &y.invert().unwrap());
        let expect = LaurentSeries::t(e.spec(), t.precision());
        assert_eq!(t, expect);
    }
}

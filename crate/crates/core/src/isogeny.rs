//! Isogenies as explicit rational maps `(x, y) -> (X(x), y R(x))`.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use crate::curvefunc::CurveRationalFunction;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::Polynomial;
use crate::ratfun::RatFun;
use crate::weierstrass::{Point, WeierstrassCurve};

/// A separable isogeny given by its coordinate maps.
///
/// `lead` is the coefficient `a` with `T' ∘ φ = a T + O(T^2)` for the local
/// parameters `T = -x/y` on source and target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isogeny {
    source: Arc<WeierstrassCurve>,
    target: Arc<WeierstrassCurve>,
    xmap: RatFun,
    ymap: RatFun,
    degree: u64,
    lead: FieldElement,
}

impl Isogeny {
    /// Assembles an isogeny from its maps; `lead` is recomputed from the maps.
    pub fn new(
        source: Arc<WeierstrassCurve>,
        target: Arc<WeierstrassCurve>,
        xmap: RatFun,
        ymap: RatFun,
    ) -> Result<Self> {
        let dn = xmap.num().degree().unwrap_or(0);
        let dd = xmap.den().degree().unwrap_or(0);
        if dn != dd + 1 {
            return Err(Error::Precondition(format!(
                "x-map numerator degree {dn} must exceed the denominator degree {dd} by one"
            )));
        }
        let lead = lead_from_maps(&xmap, &ymap)?;
        if lead.is_zero() {
            return Err(Error::Inseparable(
                "the induced map on differentials vanishes".into(),
            ));
        }
        let iso = Isogeny {
            source,
            target,
            xmap,
            ymap,
            degree: dn as u64,
            lead,
        };
        Ok(iso)
    }

    /// Checks that the maps send the source curve into the target curve.
    pub fn validate(&self) -> Result<()> {
        let lhs = &RatFun::from_poly(self.source.f().clone()) * &(&self.ymap * &self.ymap);
        let rhs = self.xmap.compose_into(self.target.f());
        if lhs != rhs {
            return Err(Error::CurveMismatch(
                "y-map squared differs from f'(x-map)".into(),
            ));
        }
        Ok(())
    }

    pub fn identity(curve: &Arc<WeierstrassCurve>) -> Self {
        let s = curve.spec();
        Isogeny {
            source: curve.clone(),
            target: curve.clone(),
            xmap: RatFun::x(s),
            ymap: RatFun::one(s),
            degree: 1,
            lead: s.one(),
        }
    }

    /// `[i]: (x, y) -> (-x, i y)` on `y^2 = x^3 + A4 x`.
    pub fn gaussian_unit(curve: &Arc<WeierstrassCurve>) -> Result<Self> {
        if !curve.has_gaussian_cm() {
            return Err(Error::NotCmModel);
        }
        let s = curve.spec();
        let i = s.sqrt_minus_one().ok_or(Error::NotCmModel)?;
        Ok(Isogeny {
            source: curve.clone(),
            target: curve.clone(),
            xmap: RatFun::from_poly(Polynomial::monomial(-s.one(), 1)),
            ymap: RatFun::constant(i.clone()),
            degree: 1,
            lead: i,
        })
    }

    /// Vélu's 2-isogeny with kernel `{O, P}`, normalized so that `a = 1`.
    pub fn velu2(curve: &Arc<WeierstrassCurve>, p: &Point) -> Result<Self> {
        let s = curve.spec();
        let x0 = match p {
            Point::Affine(x0, y0) if y0.is_zero() && curve.f().eval(x0).is_zero() => x0.clone(),
            _ => return Err(Error::NotTwoTorsion),
        };
        let t = curve.f().derivative().eval(&x0);
        let a4 = curve.a4() - &(&s.from_i64(5) * &t);
        let a6 = &(curve.a6() - &(&(&s.from_i64(4) * curve.a2()) * &t))
            - &(&(&s.from_i64(7) * &x0) * &t);
        let target = Arc::new(WeierstrassCurve::new(s, curve.a2().clone(), a4, a6)?);
        let lin = Polynomial::linear_root(&x0);
        let xnum = &(&Polynomial::x(s) * &lin) + &Polynomial::constant(t.clone());
        let xmap = RatFun::new(xnum, lin.clone())?;
        let lin2 = &lin * &lin;
        let ymap = RatFun::new(&lin2 - &Polynomial::constant(t), lin2)?;
        Ok(Isogeny {
            source: curve.clone(),
            target,
            xmap,
            ymap,
            degree: 2,
            lead: s.one(),
        })
    }

    pub fn source(&self) -> &Arc<WeierstrassCurve> {
        &self.source
    }

    pub fn target(&self) -> &Arc<WeierstrassCurve> {
        &self.target
    }

    pub fn xmap(&self) -> &RatFun {
        &self.xmap
    }

    /// `R` with `y ∘ φ = y R(x)`.
    pub fn ymap(&self) -> &RatFun {
        &self.ymap
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn lead(&self) -> &FieldElement {
        &self.lead
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    pub fn neg(&self) -> Self {
        Isogeny {
            source: self.source.clone(),
            target: self.target.clone(),
            xmap: self.xmap.clone(),
            ymap: -&self.ymap,
            degree: self.degree,
            lead: -&self.lead,
        }
    }

    /// Pointwise sum, `None` for the zero map.
    pub fn add(&self, other: &Self) -> Result<Option<Self>> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::CurveMismatch(
                "isogenies must share source and target".into(),
            ));
        }
        let tgt = &self.target;
        let s = tgt.spec();
        let f = RatFun::from_poly(self.source.f().clone());
        let (x1, r1, x2, r2) = (&self.xmap, &self.ymap, &other.xmap, &other.ymap);
        // λ = y L(x)
        let l = if x1 == x2 {
            if r1 == &-r2 {
                return Ok(None);
            }
            debug_assert!(r1 == r2);
            let num = x1.compose_into(&tgt.f().derivative());
            let den = &(&f * r1).scale(&s.from_i64(2));
            num.checked_div(den)?
        } else {
            (r2 - r1).checked_div(&(x2 - x1))?
        };
        let a2 = RatFun::constant(tgt.a2().clone());
        let x3 = &(&(&(&f * &(&l * &l)) - &a2) - x1) - x2;
        let r3 = -&(&(&l * &(&x3 - x1)) + r1);
        let lead = &self.lead + &other.lead;
        if lead.is_zero() {
            return Err(Error::Inseparable(format!(
                "sum has vanishing lead coefficient over {s}"
            )));
        }
        let iso = Isogeny::new(self.source.clone(), self.target.clone(), x3, r3)?;
        debug_assert_eq!(iso.lead, lead);
        Ok(Some(iso))
    }

    pub fn sub(&self, other: &Self) -> Result<Option<Self>> {
        self.add(&other.neg())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.target != self.source {
            return Err(Error::CurveMismatch(
                "target of the inner map must be the source of the outer".into(),
            ));
        }
        let xmap = inner.xmap.compose_ratfun(&self.xmap)?;
        let ymap = &inner.ymap * &inner.xmap.compose_ratfun(&self.ymap)?;
        Ok(Isogeny {
            source: inner.source.clone(),
            target: self.target.clone(),
            xmap,
            ymap,
            degree: self.degree * inner.degree,
            lead: &self.lead * &inner.lead,
        })
    }

    /// `[n]` on a curve by a double-and-add ladder of [`Isogeny::add`].
    pub fn multiplication(curve: &Arc<WeierstrassCurve>, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroIsogeny);
        }
        let one = Isogeny::identity(curve);
        let mut acc: Option<Isogeny> = None;
        for bit in (0..64 - n.unsigned_abs().leading_zeros()).rev() {
            if let Some(a) = acc.take() {
                acc = a.add(&a)?;
            }
            if (n.unsigned_abs() >> bit) & 1 == 1 {
                acc = match acc {
                    None => Some(one.clone()),
                    Some(a) => a.add(&one)?,
                };
            }
        }
        let m = acc.ok_or(Error::ZeroIsogeny)?;
        Ok(if n < 0 { m.neg() } else { m })
    }

    /// `[a + b i] = [a] + [b] ∘ [i]` on a curve with complex multiplication.
    pub fn gaussian(curve: &Arc<WeierstrassCurve>, a: i64, b: i64) -> Result<Self> {
        if b == 0 {
            return Self::multiplication(curve, a);
        }
        let bi = Self::multiplication(curve, b)?.compose(&Self::gaussian_unit(curve)?)?;
        if a == 0 {
            return Ok(bi);
        }
        Self::multiplication(curve, a)?
            .add(&bi)?
            .ok_or(Error::ZeroIsogeny)
    }

    /// Monic kernel polynomial: the denominator of the x-map in lowest terms.
    pub fn kernel_polynomial(&self) -> Polynomial {
        self.xmap.den().clone()
    }

    /// The 2-torsion part of the kernel: `g = gcd(K, f)`.
    pub fn kernel_two_torsion(&self) -> Polynomial {
        self.kernel_polynomial().gcd(self.source.f())
    }

    /// Kernel sum `P_φ` and its index in the fixed ordering of `E[2]`
    /// (`0` for the identity, `1..=3` otherwise).
    pub fn kernel_sum(&self) -> Result<(Point, usize)> {
        let g = self.kernel_two_torsion();
        match g.degree() {
            Some(0) | Some(3) => Ok((Point::Infinity, 0)),
            Some(1) => {
                let e = -&g.coeff(0);
                let p = Point::Affine(e, self.source.spec().zero());
                let tt = self.source.two_torsion();
                let idx = tt.points.iter().position(|q| q == &p).ok_or_else(|| {
                    Error::ExtensionRequired("2-torsion point not enumerated".into())
                })?;
                Ok((p, idx + 1))
            }
            _ => Err(Error::Degenerate(format!("kernel meets E[2] in {g}"))),
        }
    }

    pub fn is_biased(&self) -> Result<bool> {
        Ok(self.kernel_sum()?.1 != 0)
    }

    /// Image of a point.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Infinity => Ok(Point::Infinity),
            Point::Affine(x0, y0) => match (self.xmap.eval(x0), self.ymap.eval(x0)) {
                (Some(x), Some(r)) => Ok(Point::Affine(x, y0 * &r)),
                (None, _) => Ok(Point::Infinity),
                (Some(_), None) => {
                    // ymap has a pole of higher order only where xmap does.
                    Err(Error::Indeterminate)
                }
            },
        }
    }

    /// `h ∘ φ`.
    pub fn pullback(&self, h: &CurveRationalFunction) -> Result<CurveRationalFunction> {
        if h.curve() != &self.target {
            return Err(Error::CurveMismatch(
                "function must live on the target".into(),
            ));
        }
        Ok(h.pullback_maps(&self.source, &self.xmap, &self.ymap))
    }
}

/// `a` from `T' ∘ φ = -X/(yR) = a T + ...`.
///
/// With `X ~ c_X x`, `R ~ c_R x^k`, `x ~ T^-2` and `y ~ -T^-3`, the quotient
/// is `(c_X / c_R) T^{1+2k} + ...`; a separable map has `k = 0`.
fn lead_from_maps(xmap: &RatFun, ymap: &RatFun) -> Result<FieldElement> {
    let q = xmap.checked_div(ymap)?;
    if q.num().deg_i() - q.den().deg_i() != 1 {
        return Ok(q.spec().zero());
    }
    q.num().lead().checked_div(&q.den().lead())
}

impl fmt::Display for Isogeny {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x, y) -> ({}, y*({}))", self.xmap, self.ymap)
    }
}

/// Symbolic homomorphism labels.
#[derive(Clone, Debug)]
pub enum HomElement {
    Int(i64),
    /// `a + b i`.
    Gauss(i64, i64),
    Explicit(Arc<Isogeny>, String),
    /// `outer ∘ inner`.
    Compose(Box<HomElement>, Box<HomElement>),
}

impl HomElement {
    pub fn label(&self) -> String {
        match self {
            HomElement::Int(n) => n.to_string(),
            HomElement::Gauss(a, b) => gauss_label(*a, *b),
            HomElement::Explicit(_, l) => l.clone(),
            HomElement::Compose(o, i) => {
                let wrap = |h: &HomElement| match h {
                    HomElement::Gauss(a, b) if *a != 0 && *b != 0 => format!("({})", h.label()),
                    HomElement::Int(n) if *n < 0 => format!("({n})"),
                    HomElement::Gauss(0, b) if *b < 0 => format!("({})", h.label()),
                    _ => h.label(),
                };
                format!("{}∘{}", wrap(o), wrap(i))
            }
        }
    }

    /// Normalizes Gaussian sugar so equal labels compare equal.
    pub fn normalized(&self) -> HomElement {
        match self {
            HomElement::Gauss(a, 0) => HomElement::Int(*a),
            HomElement::Compose(o, i) => {
                HomElement::Compose(Box::new(o.normalized()), Box::new(i.normalized()))
            }
            h => h.clone(),
        }
    }

    /// Gaussian coordinates `(a, b)` when the label is `a + b i` or an integer.
    pub fn gaussian_coords(&self) -> Option<(i64, i64)> {
        match self {
            HomElement::Int(n) => Some((*n, 0)),
            HomElement::Gauss(a, b) => Some((*a, *b)),
            _ => None,
        }
    }

    /// The isogeny on `curve`.
    pub fn to_isogeny(&self, curve: &Arc<WeierstrassCurve>) -> Result<Isogeny> {
        match self {
            HomElement::Int(n) => Isogeny::multiplication(curve, *n),
            HomElement::Gauss(a, b) => {
                if *b != 0 && !curve.has_gaussian_cm() {
                    return Err(Error::NotCmModel);
                }
                Isogeny::gaussian(curve, *a, *b)
            }
            HomElement::Explicit(iso, _) => {
                if iso.source() != curve {
                    return Err(Error::CurveMismatch(format!(
                        "{} is not defined on {curve}",
                        self.label()
                    )));
                }
                Ok((**iso).clone())
            }
            HomElement::Compose(outer, inner) => {
                let i = inner.to_isogeny(curve)?;
                let o = outer.to_isogeny(i.target())?;
                o.compose(&i)
            }
        }
    }
}

impl PartialEq for HomElement {
    fn eq(&self, other: &Self) -> bool {
        self.normalized().label() == other.normalized().label()
    }
}

impl Eq for HomElement {}

impl std::hash::Hash for HomElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.normalized().label().hash(state)
    }
}

impl fmt::Display for HomElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn gauss_label(a: i64, b: i64) -> String {
    let im = match b {
        1 => "i".to_string(),
        -1 => "-i".to_string(),
        _ => format!("{b}i"),
    };
    match (a, b) {
        (_, 0) => a.to_string(),
        (0, _) => im,
        (_, b) if b < 0 => format!("{a}{im}"),
        _ => format!("{a}+{im}"),
    }
}

/// `⟨φ, ψ⟩ = (deg(φ + ψ) - deg φ - deg ψ) / 2`.
pub fn degree_pairing(phi: &Isogeny, psi: &Isogeny) -> Result<Ratio<i64>> {
    let sum = phi.add(psi)?.map_or(0, |s| s.degree() as i64);
    Ok(Ratio::new(
        sum - phi.degree() as i64 - psi.degree() as i64,
        2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn cm() -> Arc<WeierstrassCurve> {
        Arc::new(WeierstrassCurve::from_i64s(FieldSpec::GaussianRationals, 0, -1, 0).unwrap())
    }

    fn q_poly(c: &Arc<WeierstrassCurve>, v: &[i64]) -> Polynomial {
        Polynomial::from_i64s(c.spec(), v)
    }

    #[test]
    fn velu_on_the_cm_curve() {
        let e = cm();
        let s = e.spec();
        let phi = Isogeny::velu2(&e, &Point::Affine(s.one(), s.zero())).unwrap();
        phi.validate().unwrap();
        assert_eq!(phi.target().a4(), &s.from_i64(-11));
        assert_eq!(phi.target().a6(), &s.from_i64(-14));
        assert_eq!(phi.xmap().num(), &q_poly(&e, &[2, -1, 1]));
        assert_eq!(phi.xmap().den(), &q_poly(&e, &[-1, 1]));
        assert_eq!(phi.ymap().num(), &q_poly(&e, &[-1, -2, 1]));
        assert_eq!(phi.ymap().den(), &q_poly(&e, &[1, -2, 1]));
        assert!(phi.lead().is_one());
        let phi0 = Isogeny::velu2(&e, &Point::Affine(s.zero(), s.zero())).unwrap();
        assert_eq!(phi0.xmap().num(), &q_poly(&e, &[-1, 0, 1]));
        assert_eq!(phi0.xmap().den(), &q_poly(&e, &[0, 1]));
        assert_eq!(
            Isogeny::velu2(&e, &Point::Affine(s.from_i64(2), s.zero())),
            Err(Error::NotTwoTorsion)
        );
    }

    #[test]
    fn doubling_matches_the_duplication_formula() {
        let e = cm();
        let two = Isogeny::multiplication(&e, 2).unwrap();
        two.validate().unwrap();
        // (x^2 + 1)^2 / (4 (x^3 - x))
        let num = q_poly(&e, &[1, 0, 1])
            .pow(2)
            .scale(&e.spec().from_ratio(1, 4).unwrap());
        assert_eq!(two.xmap().num(), &num);
        assert_eq!(two.xmap().den(), &q_poly(&e, &[0, -1, 0, 1]));
        assert_eq!(two.degree(), 4);
        assert_eq!(two.lead(), &e.spec().from_i64(2));
        let one = Isogeny::identity(&e);
        assert_eq!(one.add(&one.neg()).unwrap(), None);
    }

    #[test]
    fn gaussian_endomorphisms() {
        let e = cm();
        let s = e.spec();
        let i = Isogeny::gaussian_unit(&e).unwrap();
        assert_eq!(i.lead(), &s.gaussian(0, 1).unwrap());
        let minus_one = i.compose(&i).unwrap();
        assert_eq!(minus_one, Isogeny::identity(&e).neg());
        let one_plus_i = Isogeny::gaussian(&e, 1, 1).unwrap();
        one_plus_i.validate().unwrap();
        assert_eq!(one_plus_i.degree(), 2);
        assert_eq!(one_plus_i.kernel_polynomial(), Polynomial::x(s));
        assert_eq!(one_plus_i.kernel_sum().unwrap().1, 1);
        assert_eq!(Isogeny::gaussian(&e, 1, 2).unwrap().degree(), 5);
    }

    #[test]
    fn kernel_sums_and_pairing() {
        let e = cm();
        let s = e.spec();
        let two = Isogeny::multiplication(&e, 2).unwrap();
        assert_eq!(two.kernel_sum().unwrap(), (Point::Infinity, 0));
        let phi = Isogeny::velu2(&e, &Point::Affine(s.one(), s.zero())).unwrap();
        assert_eq!(
            phi.kernel_sum().unwrap(),
            (Point::Affine(s.one(), s.zero()), 2)
        );
        let comp = phi.compose(&Isogeny::gaussian(&e, 1, 1).unwrap()).unwrap();
        assert_eq!(comp.degree(), 4);
        let one = Isogeny::identity(&e);
        let i = Isogeny::gaussian_unit(&e).unwrap();
        assert_eq!(degree_pairing(&one, &one).unwrap(), Ratio::from_integer(1));
        assert_eq!(degree_pairing(&one, &i).unwrap(), Ratio::from_integer(0));
        assert_eq!(degree_pairing(&one, &two).unwrap(), Ratio::from_integer(2));
    }

    #[test]
    fn pullback_examples() {
        let e = cm();
        let s = e.spec();
        let i = Isogeny::gaussian_unit(&e).unwrap();
        let x = CurveRationalFunction::x(&e);
        assert_eq!(i.pullback(&x).unwrap(), x.neg());
        let phi = Isogeny::velu2(&e, &Point::Affine(s.one(), s.zero())).unwrap();
        let h = CurveRationalFunction::from_poly(phi.target(), q_poly(&e, &[-1, 1]));
        let back = phi.pullback(&h).unwrap();
        assert_eq!(back.u(), &q_poly(&e, &[3, -2, 1]));
        assert_eq!(back.den(), &q_poly(&e, &[-1, 1]));
        assert_eq!(Isogeny::identity(&e).pullback(&x).unwrap(), x);
    }

    #[test]
    fn labels() {
        assert_eq!(HomElement::Gauss(1, 1).label(), "1+i");
        assert_eq!(HomElement::Gauss(2, -1).label(), "2-i");
        assert_eq!(HomElement::Gauss(0, -1).label(), "-i");
        assert_eq!(HomElement::Gauss(3, 0), HomElement::Int(3));
    }
}

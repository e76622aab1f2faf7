//! Rational functions in one variable, kept in lowest terms with a monic
//! denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Polynomial,
    den: Polynomial,
}

impl RatFun {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let spec = num.spec();
        if num.is_zero() {
            return Ok(RatFun {
                num,
                den: Polynomial::one(spec),
            });
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        if !d.is_monic() {
            let li = d.lead().inv()?;
            n = n.scale(&li);
            d = d.scale(&li);
        }
        Ok(RatFun { num: n, den: d })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let spec = p.spec();
        RatFun {
            num: p,
            den: Polynomial::one(spec),
        }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn x(spec: FieldSpec) -> Self {
        Self::from_poly(Polynomial::x(spec))
    }

    pub fn zero(spec: FieldSpec) -> Self {
        Self::from_poly(Polynomial::zero(spec))
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::from_poly(Polynomial::one(spec))
    }

    pub fn spec(&self) -> FieldSpec {
        self.num.spec()
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        RatFun {
            num: self.num.scale(c),
            den: if c.is_zero() {
                Polynomial::one(self.spec())
            } else {
                self.den.clone()
            },
        }
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFun {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Value at `x0`, `None` at a pole.
    pub fn eval(&self, x0: &FieldElement) -> Option<FieldElement> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            None
        } else {
            Some(&self.num.eval(x0) * &d.inv().ok()?)
        }
    }

    /// `p(self)`, using homogeneous evaluation to avoid repeated gcds.
    pub fn compose_into(&self, p: &Polynomial) -> Self {
        let spec = self.spec();
        let n = match p.degree() {
            None => return Self::zero(spec),
            Some(n) => n,
        };
        let (num, den) = homogenize(p, n, &self.num, &self.den);
        RatFun::new(num, den).expect("nonzero denominator")
    }

    /// `other(self)` for a rational function `other`.
    pub fn compose_ratfun(&self, other: &RatFun) -> Result<Self> {
        let spec = self.spec();
        let dn = other.num.degree().unwrap_or(0);
        let dd = other.den.degree().unwrap_or(0);
        let m = dn.max(dd);
        let (a, _) = homogenize(&other.num, m, &self.num, &self.den);
        let (b, _) = homogenize(&other.den, m, &self.num, &self.den);
        if other.num.is_zero() {
            return Ok(Self::zero(spec));
        }
        RatFun::new(a, b)
    }
}

/// `Σ p_k N^k D^{m-k}`, together with `D^m`.
fn homogenize(
    p: &Polynomial,
    m: usize,
    n: &Polynomial,
    d: &Polynomial,
) -> (Polynomial, Polynomial) {
    let spec = p.spec();
    let deg = p.degree().unwrap_or(0);
    let mut npow = vec![Polynomial::one(spec)];
    for k in 1..=deg {
        let next = &npow[k - 1] * n;
        npow.push(next);
    }
    let mut dpow = vec![Polynomial::one(spec)];
    for k in 1..=m {
        let next = &dpow[k - 1] * d;
        dpow.push(next);
    }
    let mut acc = Polynomial::zero(spec);
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = &acc + &(&npow[k] * &dpow[m - k]).scale(c);
    }
    (acc, dpow[m].clone())
}

fn rf_add(a: &RatFun, b: &RatFun) -> RatFun {
    if a.den == b.den {
        return RatFun::new(&a.num + &b.num, a.den.clone()).unwrap();
    }
    RatFun::new(&(&a.num * &b.den) + &(&b.num * &a.den), &a.den * &b.den).unwrap()
}

fn rf_sub(a: &RatFun, b: &RatFun) -> RatFun {
    rf_add(a, &-b)
}

fn rf_mul(a: &RatFun, b: &RatFun) -> RatFun {
    RatFun::new(&a.num * &b.num, &a.den * &b.den).unwrap()
}

macro_rules! rf_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&RatFun> for &RatFun {
            type Output = RatFun;
            fn $method(self, rhs: &RatFun) -> RatFun {
                $f(self, rhs)
            }
        }
        impl $trait<RatFun> for RatFun {
            type Output = RatFun;
            fn $method(self, rhs: RatFun) -> RatFun {
                $f(&self, &rhs)
            }
        }
    };
}

rf_binop!(Add, add, rf_add);
rf_binop!(Sub, sub, rf_sub);
rf_binop!(Mul, mul, rf_mul);

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

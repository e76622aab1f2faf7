//! Exact scalars: the rationals, the Gaussian rationals, prime fields and
//! their quadratic extensions.
//!
//! Every element carries enough data to identify its field, so two elements
//! can be combined without a separate context object. Combining elements of
//! different fields is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    GaussianRationals,
    Prime(u64),
    /// `F_p[u]/(u^2 - nonresidue)`.
    PrimeSquare {
        p: u64,
        nonresidue: u64,
    },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        Ok(FieldSpec::Prime(p))
    }

    pub fn prime_square(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!(
                "modulus {p} too large for F_p^2"
            )));
        }
        let nonresidue = (2..p)
            .find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1)
            .expect("every odd prime has a quadratic nonresidue");
        Ok(FieldSpec::PrimeSquare { p, nonresidue })
    }

    /// Characteristic of the field (0 for the characteristic-zero fields).
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals | FieldSpec::GaussianRationals => 0,
            FieldSpec::Prime(p) | FieldSpec::PrimeSquare { p, .. } => *p,
        }
    }

    /// Number of elements, `None` in characteristic zero.
    pub fn order(&self) -> Option<u128> {
        match *self {
            FieldSpec::Rationals | FieldSpec::GaussianRationals => None,
            FieldSpec::Prime(p) => Some(p as u128),
            FieldSpec::PrimeSquare { p, .. } => Some(p as u128 * p as u128),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match *self {
            FieldSpec::Rationals => FieldElement::Rational(BigRational::from_integer(n.clone())),
            FieldSpec::GaussianRationals => FieldElement::Gaussian(Box::new((
                BigRational::from_integer(n.clone()),
                BigRational::zero(),
            ))),
            FieldSpec::Prime(p) => FieldElement::Prime {
                value: reduce_bigint(n, p),
                modulus: p,
            },
            FieldSpec::PrimeSquare { p, nonresidue } => FieldElement::PrimeSquare {
                re: reduce_bigint(n, p),
                im: 0,
                modulus: p,
                nonresidue,
            },
        }
    }

    /// `num/den` as a field element.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<FieldElement> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    /// A Gaussian integer `a + b*i`, if the field has a square root of -1.
    pub fn gaussian(&self, a: i64, b: i64) -> Result<FieldElement> {
        let i = self.sqrt_minus_one().ok_or(Error::NotCmModel)?;
        Ok(self.from_i64(a) + i * self.from_i64(b))
    }

    /// The distinguished square root of -1, when one exists.
    pub fn sqrt_minus_one(&self) -> Option<FieldElement> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::GaussianRationals => Some(FieldElement::Gaussian(Box::new((
                BigRational::zero(),
                BigRational::one(),
            )))),
            _ => self.from_i64(-1).sqrt(),
        }
    }

    /// The generator `u` of a quadratic extension `F_p[u]/(u^2 - n)`.
    pub fn extension_generator(&self) -> Option<FieldElement> {
        match *self {
            FieldSpec::PrimeSquare { p, nonresidue } => Some(FieldElement::PrimeSquare {
                re: 0,
                im: 1,
                modulus: p,
                nonresidue,
            }),
            _ => None,
        }
    }

    /// The quadratic extension used when square roots are missing.
    pub fn quadratic_extension(&self) -> Option<FieldSpec> {
        match *self {
            FieldSpec::Prime(p) => FieldSpec::prime_square(p).ok(),
            FieldSpec::Rationals => Some(FieldSpec::GaussianRationals),
            _ => None,
        }
    }

    /// Maps an element of a subfield into this field.
    pub fn embed(&self, c: &FieldElement) -> Result<FieldElement> {
        let from = c.spec();
        if from == *self {
            return Ok(c.clone());
        }
        match (c, *self) {
            (FieldElement::Rational(r), FieldSpec::GaussianRationals) => Ok(
                FieldElement::Gaussian(Box::new((r.clone(), BigRational::zero()))),
            ),
            (FieldElement::Prime { value, modulus }, FieldSpec::PrimeSquare { p, nonresidue })
                if *modulus == p =>
            {
                Ok(FieldElement::PrimeSquare {
                    re: *value,
                    im: 0,
                    modulus: p,
                    nonresidue,
                })
            }
            (FieldElement::Rational(r), FieldSpec::Prime(_) | FieldSpec::PrimeSquare { .. }) => {
                self.from_bigint(r.numer())
                    .checked_div(&self.from_bigint(r.denom()))
            }
            _ => Err(Error::InvalidField(format!(
                "cannot embed an element of {from} into {self}"
            ))),
        }
    }

    /// Every element of a finite field, in canonical order. Only sensible for small fields.
    pub fn elements(&self) -> Option<Vec<FieldElement>> {
        match *self {
            FieldSpec::Prime(p) => Some(
                (0..p)
                    .map(|v| FieldElement::Prime {
                        value: v,
                        modulus: p,
                    })
                    .collect(),
            ),
            FieldSpec::PrimeSquare { p, nonresidue } => Some(
                (0..p)
                    .flat_map(|re| {
                        (0..p).map(move |im| FieldElement::PrimeSquare {
                            re,
                            im,
                            modulus: p,
                            nonresidue,
                        })
                    })
                    .collect(),
            ),
            _ => None,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::GaussianRationals => write!(f, "Q(i)"),
            FieldSpec::Prime(p) => write!(f, "Fp:{p}"),
            FieldSpec::PrimeSquare { p, .. } => write!(f, "Fp2:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "Q" => return Ok(FieldSpec::Rationals),
            "Q(i)" => return Ok(FieldSpec::GaussianRationals),
            _ => {}
        }
        let parse_p = |t: &str| -> Result<u64> {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidField(s.to_string()))
        };
        if let Some(rest) = s.strip_prefix("Fp2:") {
            FieldSpec::prime_square(parse_p(rest)?)
        } else if let Some(rest) = s.strip_prefix("Fp:") {
            FieldSpec::prime(parse_p(rest)?)
        } else if let Some(rest) = s.strip_prefix("F_").or_else(|| s.strip_prefix('F')) {
            // Informal spellings: F_97, F97, F_97^2.
            match rest.strip_suffix("^2") {
                Some(p) => FieldSpec::prime_square(parse_p(p)?),
                None => FieldSpec::prime(parse_p(rest)?),
            }
        } else {
            Err(Error::InvalidField(s.to_string()))
        }
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::CharacteristicTwo);
    }
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    Ok(())
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let sn = r.numer().sqrt();
    let sd = r.denom().sqrt();
    if &(&sn * &sn) == r.numer() && &(&sd * &sd) == r.denom() {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// An exact element of one of the supported fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Gaussian(Box<(BigRational, BigRational)>),
    Prime {
        value: u64,
        modulus: u64,
    },
    PrimeSquare {
        re: u64,
        im: u64,
        modulus: u64,
        nonresidue: u64,
    },
}

impl FieldElement {
    pub fn spec(&self) -> FieldSpec {
        match *self {
            FieldElement::Rational(_) => FieldSpec::Rationals,
            FieldElement::Gaussian(_) => FieldSpec::GaussianRationals,
            FieldElement::Prime { modulus, .. } => FieldSpec::Prime(modulus),
            FieldElement::PrimeSquare {
                modulus,
                nonresidue,
                ..
            } => FieldSpec::PrimeSquare {
                p: modulus,
                nonresidue,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Gaussian(g) => g.0.is_zero() && g.1.is_zero(),
            FieldElement::Prime { value, .. } => *value == 0,
            FieldElement::PrimeSquare { re, im, .. } => *re == 0 && *im == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_one(),
            FieldElement::Gaussian(g) => g.0.is_one() && g.1.is_zero(),
            FieldElement::Prime { value, .. } => *value == 1,
            FieldElement::PrimeSquare { re, im, .. } => *re == 1 && *im == 0,
        }
    }

    pub fn zero_like(&self) -> FieldElement {
        self.spec().zero()
    }

    pub fn one_like(&self) -> FieldElement {
        self.spec().one()
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(r) => FieldElement::Rational(r.recip()),
            FieldElement::Gaussian(g) => {
                let n = &g.0 * &g.0 + &g.1 * &g.1;
                FieldElement::Gaussian(Box::new((&g.0 / &n, -(&g.1 / &n))))
            }
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: inv_mod(*value, *modulus).expect("nonzero residue"),
                modulus: *modulus,
            },
            &FieldElement::PrimeSquare {
                re,
                im,
                modulus: p,
                nonresidue,
            } => {
                // (a + bu)^-1 = (a - bu) / (a^2 - n b^2)
                let norm = sub_mod(
                    mul_mod(re, re, p),
                    mul_mod(nonresidue, mul_mod(im, im, p), p),
                    p,
                );
                let ni = inv_mod(norm, p).expect("norm of a nonzero element is nonzero");
                FieldElement::PrimeSquare {
                    re: mul_mod(re, ni, p),
                    im: mul_mod(sub_mod(0, im, p), ni, p),
                    modulus: p,
                    nonresidue,
                }
            }
        })
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        Ok(self * &rhs.inv()?)
    }

    pub fn square(&self) -> FieldElement {
        self * self
    }

    pub fn pow(&self, mut e: u128) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(e as u128))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs() as u128))
        }
    }

    /// Canonical square root, or `None` when the element is not a square.
    ///
    /// Characteristic zero: the root whose first nonzero rational component is
    /// positive. Finite fields: the smaller of the two roots in canonical order.
    pub fn sqrt(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.clone());
        }
        match self {
            FieldElement::Rational(r) => rational_sqrt(r).map(FieldElement::Rational),
            FieldElement::Gaussian(g) => {
                let (c, d) = (&g.0, &g.1);
                if d.is_zero() {
                    return if c.is_positive() {
                        rational_sqrt(c)
                            .map(|a| FieldElement::Gaussian(Box::new((a, BigRational::zero()))))
                    } else {
                        rational_sqrt(&-c)
                            .map(|b| FieldElement::Gaussian(Box::new((BigRational::zero(), b))))
                    };
                }
                let modulus = rational_sqrt(&(c * c + d * d))?;
                let two = BigRational::from_integer(BigInt::from(2));
                let a = rational_sqrt(&((c + &modulus) / &two))?;
                let b = d / (&two * &a);
                Some(FieldElement::Gaussian(Box::new((a, b))))
            }
            FieldElement::Prime { .. } | FieldElement::PrimeSquare { .. } => {
                let r = self.tonelli_shanks()?;
                let s = -&r;
                Some(if canonical_cmp(&r, &s) == Ordering::Greater {
                    s
                } else {
                    r
                })
            }
        }
    }

    pub fn is_square(&self) -> bool {
        match self.spec().order() {
            Some(q) => self.is_zero() || self.pow((q - 1) / 2).is_one(),
            None => self.sqrt().is_some(),
        }
    }

    fn tonelli_shanks(&self) -> Option<FieldElement> {
        let spec = self.spec();
        let q = spec.order()?;
        let one = spec.one();
        if !self.pow((q - 1) / 2).is_one() {
            return None;
        }
        let mut t = q - 1;
        let mut s = 0u32;
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        let minus_one = -&one;
        let z = nonresidue(&spec);
        let mut m = s;
        let mut c = z.pow(t);
        let mut tt = self.pow(t);
        let mut r = self.pow(t.div_ceil(2));
        loop {
            if tt.is_one() {
                return Some(r);
            }
            let mut i = 0;
            let mut probe = tt.clone();
            while !probe.is_one() {
                probe = probe.square();
                i += 1;
                if i == m {
                    return None;
                }
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            m = i;
            c = b.square();
            tt = &tt * &c;
            r = &r * &b;
            debug_assert!(tt != minus_one || i > 0);
        }
    }

    /// `a + b*i` decomposition for Gaussian rationals.
    pub fn gaussian_parts(&self) -> Option<(&BigRational, &BigRational)> {
        match self {
            FieldElement::Gaussian(g) => Some((&g.0, &g.1)),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            FieldElement::Gaussian(g) if g.1.is_zero() => Some(&g.0),
            _ => None,
        }
    }

    /// True when the printed form would start with a minus sign.
    pub fn is_negative_like(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_negative(),
            FieldElement::Gaussian(g) => {
                (g.1.is_zero() && g.0.is_negative()) || (g.0.is_zero() && g.1.is_negative())
            }
            _ => false,
        }
    }

    /// Whether the printed form is a compound `(a+b*i)` style literal.
    fn is_compound(&self) -> bool {
        match self {
            FieldElement::Gaussian(g) => !g.0.is_zero() && !g.1.is_zero(),
            FieldElement::PrimeSquare { re, im, .. } => *re != 0 && *im != 0,
            _ => false,
        }
    }
}

fn nonresidue(spec: &FieldSpec) -> FieldElement {
    match *spec {
        FieldSpec::Prime(p) => {
            let a = (2..p)
                .find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1)
                .expect("nonresidue");
            FieldElement::Prime {
                value: a,
                modulus: p,
            }
        }
        FieldSpec::PrimeSquare { .. } => {
            let q = spec.order().unwrap();
            let u = spec.extension_generator().unwrap();
            (1..)
                .map(|k| &spec.from_i64(k) + &u)
                .find(|z| !z.pow((q - 1) / 2).is_one())
                .expect("nonresidue in F_p^2")
        }
        _ => unreachable!("square roots in characteristic zero are computed directly"),
    }
}

/// Canonical total order used for deterministic choices (root ordering,
/// two-torsion ordering, square-root signs).
pub fn canonical_cmp(a: &FieldElement, b: &FieldElement) -> Ordering {
    fn rat_key(r: &BigRational) -> (BigRational, bool) {
        (r.abs(), r.is_negative())
    }
    match (a, b) {
        (FieldElement::Rational(x), FieldElement::Rational(y)) => rat_key(x).cmp(&rat_key(y)),
        (FieldElement::Gaussian(x), FieldElement::Gaussian(y)) => {
            (rat_key(&x.0), rat_key(&x.1)).cmp(&(rat_key(&y.0), rat_key(&y.1)))
        }
        (FieldElement::Prime { value: x, .. }, FieldElement::Prime { value: y, .. }) => x.cmp(y),
        (
            FieldElement::PrimeSquare { re: a0, im: a1, .. },
            FieldElement::PrimeSquare { re: b0, im: b1, .. },
        ) => (a1, a0).cmp(&(b1, b0)),
        _ => panic!("comparing elements of different fields"),
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_imag(b: &BigRational) -> String {
    if b.is_one() {
        "i".into()
    } else if (-b).is_one() {
        "-i".into()
    } else if b.is_integer() {
        format!("{}i", b.numer())
    } else {
        format!("{}*i", fmt_rational(b))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{}", fmt_rational(r)),
            FieldElement::Gaussian(g) => {
                let (a, b) = (&g.0, &g.1);
                if b.is_zero() {
                    write!(f, "{}", fmt_rational(a))
                } else if a.is_zero() {
                    write!(f, "{}", fmt_imag(b))
                } else {
                    let im = fmt_imag(b);
                    if im.starts_with('-') {
                        write!(f, "({}{})", fmt_rational(a), im)
                    } else {
                        write!(f, "({}+{})", fmt_rational(a), im)
                    }
                }
            }
            FieldElement::Prime { value, .. } => write!(f, "{value}"),
            FieldElement::PrimeSquare { re, im, .. } => match (*re, *im) {
                (r, 0) => write!(f, "{r}"),
                (0, 1) => write!(f, "u"),
                (0, m) => write!(f, "{m}*u"),
                (r, 1) => write!(f, "({r}+u)"),
                (r, m) => write!(f, "({r}+{m}*u)"),
            },
        }
    }
}

impl FieldElement {
    /// Formats the element as a multiplicative coefficient in front of `monomial`.
    pub fn fmt_coefficient(&self, monomial: &str) -> String {
        if monomial.is_empty() {
            return self.to_string();
        }
        if self.is_one() {
            return monomial.to_string();
        }
        if (-self).is_one() && self.is_negative_like() {
            return format!("-{monomial}");
        }
        let c = self.to_string();
        if self.is_compound() && !c.starts_with('(') {
            format!("({c})*{monomial}")
        } else {
            format!("{c}*{monomial}")
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                $impl_fn(self, rhs)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                $impl_fn(&self, &rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                $impl_fn(&self, rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                $impl_fn(self, &rhs)
            }
        }
    };
}

fn fe_add(a: &FieldElement, b: &FieldElement) -> FieldElement {
    use FieldElement::*;
    match (a, b) {
        (Rational(x), Rational(y)) => Rational(x + y),
        (Gaussian(x), Gaussian(y)) => Gaussian(Box::new((&x.0 + &y.0, &x.1 + &y.1))),
        (
            Prime {
                value: x,
                modulus: p,
            },
            Prime {
                value: y,
                modulus: q,
            },
        ) if p == q => Prime {
            value: add_mod(*x, *y, *p),
            modulus: *p,
        },
        (
            PrimeSquare {
                re: a0,
                im: a1,
                modulus: p,
                nonresidue,
            },
            PrimeSquare {
                re: b0,
                im: b1,
                modulus: q,
                ..
            },
        ) if p == q => PrimeSquare {
            re: add_mod(*a0, *b0, *p),
            im: add_mod(*a1, *b1, *p),
            modulus: *p,
            nonresidue: *nonresidue,
        },
        _ => panic!("field mismatch: {} + {}", a.spec(), b.spec()),
    }
}

fn fe_sub(a: &FieldElement, b: &FieldElement) -> FieldElement {
    fe_add(a, &-b)
}

fn fe_mul(a: &FieldElement, b: &FieldElement) -> FieldElement {
    use FieldElement::*;
    match (a, b) {
        (Rational(x), Rational(y)) => Rational(x * y),
        (Gaussian(x), Gaussian(y)) => Gaussian(Box::new((
            &x.0 * &y.0 - &x.1 * &y.1,
            &x.0 * &y.1 + &x.1 * &y.0,
        ))),
        (
            Prime {
                value: x,
                modulus: p,
            },
            Prime {
                value: y,
                modulus: q,
            },
        ) if p == q => Prime {
            value: mul_mod(*x, *y, *p),
            modulus: *p,
        },
        (
            PrimeSquare {
                re: a0,
                im: a1,
                modulus: p,
                nonresidue: n,
            },
            PrimeSquare {
                re: b0,
                im: b1,
                modulus: q,
                ..
            },
        ) if p == q => {
            let p = *p;
            let re = add_mod(
                mul_mod(*a0, *b0, p),
                mul_mod(*n, mul_mod(*a1, *b1, p), p),
                p,
            );
            let im = add_mod(mul_mod(*a0, *b1, p), mul_mod(*a1, *b0, p), p);
            PrimeSquare {
                re,
                im,
                modulus: p,
                nonresidue: *n,
            }
        }
        _ => panic!("field mismatch: {} * {}", a.spec(), b.spec()),
    }
}

binop!(Add, add, fe_add);
binop!(Sub, sub, fe_sub);
binop!(Mul, mul, fe_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        use FieldElement::*;
        match self {
            Rational(x) => Rational(-x),
            Gaussian(x) => Gaussian(Box::new((-&x.0, -&x.1))),
            Prime { value, modulus } => Prime {
                value: sub_mod(0, *value, *modulus),
                modulus: *modulus,
            },
            PrimeSquare {
                re,
                im,
                modulus,
                nonresidue,
            } => PrimeSquare {
                re: sub_mod(0, *re, *modulus),
                im: sub_mod(0, *im, *modulus),
                modulus: *modulus,
                nonresidue: *nonresidue,
            },
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_examples() {
        let q = FieldSpec::Rationals;
        assert_eq!(q.from_i64(4).sqrt(), Some(q.from_i64(2)));
        assert_eq!(q.from_i64(2).sqrt(), None);

        let qi = FieldSpec::GaussianRationals;
        let two_i = qi.gaussian(0, 2).unwrap();
        assert_eq!(two_i.sqrt(), Some(qi.gaussian(1, 1).unwrap()));
        assert_eq!(qi.from_i64(-4).sqrt(), Some(qi.gaussian(0, 2).unwrap()));

        let f11 = FieldSpec::prime(11).unwrap();
        // brute force: 5^2 = 25 = 3 (mod 11), the other root is 6
        let roots: Vec<u64> = (0..11).filter(|r| r * r % 11 == 3).collect();
        assert_eq!(roots, vec![5, 6]);
        assert_eq!(f11.from_i64(3).sqrt(), Some(f11.from_i64(5)));
    }

    #[test]
    fn euler_criterion_agrees_with_sqrt() {
        for p in [3u64, 5, 7, 13, 17, 29, 97] {
            let f = FieldSpec::prime(p).unwrap();
            for c in f.elements().unwrap() {
                let s = c.sqrt();
                assert_eq!(s.is_some(), c.is_square());
                if let Some(r) = s {
                    assert_eq!(r.square(), c);
                }
            }
        }
    }

    #[test]
    fn quadratic_extension_has_all_base_square_roots() {
        let f = FieldSpec::prime_square(7).unwrap();
        for c in FieldSpec::prime(7).unwrap().elements().unwrap() {
            let e = f.embed(&c).unwrap();
            let r = e.sqrt().expect("every F_p element is a square in F_p^2");
            assert_eq!(r.square(), e);
        }
        let i = f.sqrt_minus_one().unwrap();
        assert_eq!(i.square(), f.from_i64(-1));
    }

    #[test]
    fn inverses() {
        let qi = FieldSpec::GaussianRationals;
        let z = qi.gaussian(1, 2).unwrap();
        assert!((&z * &z.inv().unwrap()).is_one());
        let f = FieldSpec::prime_square(11).unwrap();
        let w = &f.from_i64(3) + &f.extension_generator().unwrap();
        assert!((&w * &w.inv().unwrap()).is_one());
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn parse_specs() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!(
            "Q(i)".parse::<FieldSpec>().unwrap(),
            FieldSpec::GaussianRationals
        );
        assert_eq!("Fp:13".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(13));
        assert_eq!("Fp:2".parse::<FieldSpec>(), Err(Error::CharacteristicTwo));
        assert!("Fp:15".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn display_forms() {
        let qi = FieldSpec::GaussianRationals;
        assert_eq!(qi.gaussian(0, 2).unwrap().to_string(), "2i");
        assert_eq!(qi.gaussian(1, -2).unwrap().to_string(), "(1-2i)");
        let c = qi.from_ratio(2, 5).unwrap() * qi.gaussian(0, 1).unwrap();
        assert_eq!(c.to_string(), "2/5*i");
        assert_eq!(qi.gaussian(0, 2).unwrap().fmt_coefficient("x"), "2i*x");
    }

    #[test]
    fn canonical_order_of_small_values() {
        let q = FieldSpec::Rationals;
        let mut v = vec![q.from_i64(-1), q.from_i64(1), q.from_i64(0)];
        v.sort_by(canonical_cmp);
        assert_eq!(v, vec![q.from_i64(0), q.from_i64(1), q.from_i64(-1)]);
    }
}

//! Dense univariate polynomials over a [`FieldSpec`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{canonical_cmp, FieldElement, FieldSpec};

/// A polynomial with coefficients in ascending degree order. The highest
/// stored coefficient is nonzero; the zero polynomial stores nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    spec: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(spec: FieldSpec, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        debug_assert!(coeffs.iter().all(|c| c.spec() == spec));
        Polynomial { spec, coeffs }
    }

    pub fn from_i64s(spec: FieldSpec, coeffs: &[i64]) -> Self {
        Self::new(spec, coeffs.iter().map(|&c| spec.from_i64(c)).collect())
    }

    pub fn zero(spec: FieldSpec) -> Self {
        Polynomial {
            spec,
            coeffs: Vec::new(),
        }
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::constant(spec.one())
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(c.spec(), vec![c])
    }

    /// The monomial `x`.
    pub fn x(spec: FieldSpec) -> Self {
        Self::new(spec, vec![spec.zero(), spec.one()])
    }

    /// `c * x^n`.
    pub fn monomial(c: FieldElement, n: usize) -> Self {
        let spec = c.spec();
        let mut v = vec![spec.zero(); n];
        v.push(c);
        Self::new(spec, v)
    }

    /// `x - a`.
    pub fn linear_root(a: &FieldElement) -> Self {
        Self::new(a.spec(), vec![-a, a.one_like()])
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^i`; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.spec.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lead(&self) -> FieldElement {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.spec.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(FieldElement::is_one)
    }

    /// The monic associate; zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.lead().inv().expect("nonzero lead");
        self.scale(&inv)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero(self.spec);
        }
        Polynomial {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.spec.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.spec.from_i64(i as i64))
            .collect();
        Self::new(self.spec, coeffs)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self(inner(x))` by Horner's rule.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        let mut acc = Self::zero(self.spec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn divmod(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(self.spec), self.clone()));
        }
        let inv = d.lead().inv()?;
        let mut r = self.coeffs.clone();
        let mut q = vec![self.spec.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate().take(dd) {
                    r[k + j] = &r[k + j] - &(&c * dj);
                }
            }
            r[k + dd] = self.spec.zero();
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(self.spec, q), Self::new(self.spec, r)))
    }

    pub fn rem(&self, d: &Polynomial) -> Result<Polynomial> {
        Ok(self.divmod(d)?.1)
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        let (q, r) = self.divmod(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        other.exact_div(self).is_some()
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    ///
    /// In characteristic zero every remainder is replaced by its primitive
    /// part (denominators cleared, integer content removed), which keeps
    /// coefficient growth in check.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let char0 = self.spec.characteristic() == 0;
        let prim = |p: Polynomial| if char0 { p.primitive_part() } else { p };
        let (mut a, mut b) = (prim(self.clone()), prim(other.clone()));
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = prim(r);
        }
        a.monic()
    }

    /// The polynomial rescaled to have coprime integral (or Gaussian
    /// integral) coefficient parts; unchanged over finite fields.
    pub fn primitive_part(&self) -> Polynomial {
        let mut parts: Vec<&BigRational> = Vec::new();
        for c in &self.coeffs {
            match c {
                FieldElement::Rational(r) => parts.push(r),
                FieldElement::Gaussian(g) => {
                    parts.push(&g.0);
                    parts.push(&g.1);
                }
                _ => return self.clone(),
            }
        }
        let den = parts.iter().fold(BigInt::one(), |d, r| d.lcm(r.denom()));
        let content = parts
            .iter()
            .map(|r| r.numer() * (&den / r.denom()))
            .fold(BigInt::zero(), |g, v| g.gcd(&v));
        if content.is_zero() || (den.is_one() && content.is_one()) {
            return self.clone();
        }
        let factor = self
            .spec
            .from_bigint(&den)
            .checked_div(&self.spec.from_bigint(&content))
            .expect("nonzero content");
        self.scale(&factor)
    }

    /// Monic least common multiple.
    pub fn lcm(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.spec);
        }
        let g = self.gcd(other);
        (&self.exact_div(&g).expect("gcd divides") * other).monic()
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u128, m: &Polynomial) -> Result<Polynomial> {
        let mut base = self.rem(m)?;
        let mut acc = Self::one(self.spec).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(m)?;
            }
            e >>= 1;
            if e > 0 {
                base = (&base * &base).rem(m)?;
            }
        }
        Ok(acc)
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &FieldElement) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Self::linear_root(a);
        let mut p = self.clone();
        let mut m = 0;
        while let Some(q) = p.exact_div(&lin) {
            p = q;
            m += 1;
        }
        m
    }

    /// Exact square root with the canonical sign on the leading coefficient.
    pub fn sqrt(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let n = self.coeffs.len() - 1;
        if n % 2 == 1 {
            return None;
        }
        let half = n / 2;
        let lead = self.lead().sqrt()?;
        let two_lead_inv = (&lead + &lead).inv().ok()?;
        // Determine the root coefficients from the top down.
        let mut r = vec![self.spec.zero(); half + 1];
        r[half] = lead;
        for k in (0..half).rev() {
            // coefficient of x^{half + k} in r^2 must match self
            let mut acc = self.coeffs[half + k].clone();
            for i in (k + 1)..=half {
                let j = half + k - i;
                if j > half || j <= k {
                    continue;
                }
                acc = &acc - &(&r[i] * &r[j]);
            }
            r[k] = &acc * &two_lead_inv;
        }
        let root = Self::new(self.spec, r);
        (&root * &root == *self).then_some(root)
    }

    /// All distinct roots in the base field, in canonical order.
    pub fn roots(&self) -> Vec<FieldElement> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut roots = match self.spec {
            FieldSpec::Rationals | FieldSpec::GaussianRationals => self.roots_char_zero(),
            _ => self.roots_finite(),
        };
        roots.sort_by(canonical_cmp);
        roots.dedup();
        roots
    }

    /// True when the polynomial splits into linear factors over the base field.
    pub fn splits(&self) -> bool {
        let mut rest = self.clone();
        for r in self.roots() {
            let lin = Self::linear_root(&r);
            while let Some(q) = rest.exact_div(&lin) {
                rest = q;
            }
        }
        rest.is_constant()
    }

    fn roots_finite(&self) -> Vec<FieldElement> {
        let q = self.spec.order().expect("finite field");
        let f = self.monic();
        let x = Self::x(self.spec);
        let xq = x.powmod(q, &f).expect("nonzero modulus");
        let mut g = f.gcd(&(&xq - &x));
        let mut out = Vec::new();
        let zero = self.spec.zero();
        if g.eval(&zero).is_zero() {
            out.push(zero.clone());
            g = g.exact_div(&x).expect("x divides");
        }
        self.split_distinct_linear(g, &mut out);
        out
    }

    /// Splits a squarefree product of distinct nonzero linear factors.
    fn split_distinct_linear(&self, g: Polynomial, out: &mut Vec<FieldElement>) {
        match g.degree() {
            None | Some(0) => return,
            Some(1) => {
                out.push(-&g.coeff(0));
                return;
            }
            _ => {}
        }
        let q = self.spec.order().unwrap();
        let half = (q - 1) / 2;
        let generator = self.spec.extension_generator();
        for k in 0u64.. {
            let shift = match &generator {
                Some(u) => {
                    &self.spec.from_i64((k / 2) as i64)
                        + &(if k % 2 == 1 { u.clone() } else { u.zero_like() })
                }
                None => self.spec.from_i64(k as i64),
            };
            let probe = Self::new(self.spec, vec![shift, self.spec.one()]);
            let t = probe.powmod(half, &g).expect("nonzero modulus");
            let h = g.gcd(&(&t - &Self::one(self.spec)));
            let dh = h.degree().unwrap_or(0);
            if dh > 0 && dh < g.degree().unwrap() {
                let other = g.exact_div(&h).expect("factor divides");
                self.split_distinct_linear(h, out);
                self.split_distinct_linear(other, out);
                return;
            }
        }
    }

    fn roots_char_zero(&self) -> Vec<FieldElement> {
        // Strip the root at zero, then clear denominators: for monic
        // f = x^n + c_{n-1} x^{n-1} + ... and d the lcm of the denominators,
        // d^n f(X/d) is monic with integral coefficients, so every root X is
        // an integral divisor of its constant term.
        let mut f = self.monic();
        let mut out = Vec::new();
        let zero = self.spec.zero();
        if f.coeff(0).is_zero() {
            out.push(zero);
            while f.coeff(0).is_zero() {
                f = Self::new(self.spec, f.coeffs[1..].to_vec());
            }
        }
        let n = match f.degree() {
            Some(n) if n > 0 => n,
            _ => return out,
        };
        if n == 1 {
            out.push(-&f.coeff(0));
            return out;
        }
        let mut d = BigInt::one();
        for c in &f.coeffs {
            for r in rational_parts(c) {
                d = d.lcm(r.denom());
            }
        }
        let dd = self.spec.from_bigint(&d);
        let scaled: Vec<FieldElement> = (0..=n)
            .map(|i| &f.coeffs[i] * &dd.pow((n - i) as u128))
            .collect();
        let g = Self::new(self.spec, scaled);
        let dinv = dd.inv().expect("nonzero");
        let c0 = g.coeff(0);
        for cand in integral_divisor_candidates(&c0) {
            if g.eval(&cand).is_zero() {
                out.push(&cand * &dinv);
            }
        }
        out
    }
}

fn rational_parts(c: &FieldElement) -> Vec<&BigRational> {
    match c {
        FieldElement::Rational(r) => vec![r],
        FieldElement::Gaussian(g) => vec![&g.0, &g.1],
        _ => Vec::new(),
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    let root = n.sqrt();
    while d <= root {
        if (&n % &d).is_zero() {
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Integral (rational or Gaussian) elements that could divide `c`.
fn integral_divisor_candidates(c: &FieldElement) -> Vec<FieldElement> {
    let spec = c.spec();
    match c {
        FieldElement::Rational(r) => {
            let mut out = Vec::new();
            for d in divisors(r.numer()) {
                out.push(spec.from_bigint(&d));
                out.push(spec.from_bigint(&-d));
            }
            out
        }
        FieldElement::Gaussian(g) => {
            let norm = (&g.0 * &g.0 + &g.1 * &g.1).to_integer();
            let mut out = Vec::new();
            for d in divisors(&norm) {
                // Gaussian integers a+bi with a^2 + b^2 = d.
                let bound = d.sqrt();
                let mut a = BigInt::zero();
                while a <= bound {
                    let rest = &d - &a * &a;
                    let b = rest.sqrt();
                    if &b * &b == rest {
                        for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            let re = BigRational::from_integer(&a * sa);
                            let im = BigRational::from_integer(&b * sb);
                            out.push(FieldElement::Gaussian(Box::new((re, im))));
                        }
                    }
                    a += 1;
                }
            }
            out.sort_by(canonical_cmp);
            out.dedup();
            out
        }
        _ => Vec::new(),
    }
}

impl Polynomial {
    /// Renders with the given variable name, highest degree first.
    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let neg = c.is_negative_like();
            let mag = if neg { -c } else { c.clone() };
            let term = if mono.is_empty() {
                mag.to_string()
            } else {
                mag.fmt_coefficient(&mono)
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("x"))
    }
}

fn poly_add(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let n = a.coeffs.len().max(b.coeffs.len());
    let coeffs = (0..n)
        .map(|i| match (a.coeffs.get(i), b.coeffs.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    Polynomial::new(a.spec, coeffs)
}

fn poly_sub(a: &Polynomial, b: &Polynomial) -> Polynomial {
    poly_add(a, &-b)
}

fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(a.spec);
    }
    if let (FieldSpec::Prime(p), FieldSpec::Prime(_)) = (a.spec, b.spec) {
        return prime_mul(a, b, p);
    }
    let mut out = vec![a.spec.zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    Polynomial::new(a.spec, out)
}

/// Multiplication over `F_p` on raw residues, accumulating in `u128`.
fn prime_mul(a: &Polynomial, b: &Polynomial, p: u64) -> Polynomial {
    let raw = |c: &FieldElement| match c {
        FieldElement::Prime { value, .. } => *value as u128,
        _ => unreachable!(),
    };
    let av: Vec<u128> = a.coeffs.iter().map(raw).collect();
    let bv: Vec<u128> = b.coeffs.iter().map(raw).collect();
    let p128 = p as u128;
    // Each product is < p^2 < 2^64 for p < 2^32; reduce periodically otherwise.
    let safe = p < (1 << 31);
    let mut acc = vec![0u128; av.len() + bv.len() - 1];
    for (i, &x) in av.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in bv.iter().enumerate() {
            let t = &mut acc[i + j];
            *t += x * y;
            if !safe {
                *t %= p128;
            }
        }
    }
    let coeffs = acc
        .into_iter()
        .map(|t| FieldElement::Prime {
            value: (t % p128).to_u64().unwrap(),
            modulus: p,
        })
        .collect();
    Polynomial::new(a.spec, coeffs)
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                $f(self, rhs)
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                $f(&self, rhs)
            }
        }
        impl $trait<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                $f(self, &rhs)
            }
        }
    };
}

poly_binop!(Add, add, poly_add);
poly_binop!(Sub, sub, poly_sub);
poly_binop!(Mul, mul, poly_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            spec: self.spec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn gcd_and_divmod() {
        let a = Polynomial::from_i64s(q(), &[-1, 0, 1]);
        let b = Polynomial::from_i64s(q(), &[0, -1, 0, 1]);
        assert_eq!(a.gcd(&b), a);
        let (quo, r) = b.divmod(&Polynomial::x(q())).unwrap();
        assert_eq!(quo, a);
        assert!(r.is_zero());
        assert_eq!(b.divmod(&Polynomial::zero(q())), Err(Error::DivisionByZero));
    }

    #[test]
    fn gaussian_eval() {
        let qi = FieldSpec::GaussianRationals;
        let p = Polynomial::from_i64s(qi, &[1, 0, 1]);
        assert!(p.eval(&qi.gaussian(0, 1).unwrap()).is_zero());
    }

    #[test]
    fn sqrt_roundtrip() {
        let a = Polynomial::from_i64s(q(), &[3, -2, 1]);
        let sq = &a * &a;
        assert_eq!(sq.sqrt(), Some(a));
        assert_eq!(Polynomial::from_i64s(q(), &[1, 0, 0, 1]).sqrt(), None);
    }

    #[test]
    fn rational_and_gaussian_roots() {
        let f = Polynomial::from_i64s(q(), &[0, -1, 0, 1]);
        let r = f.roots();
        assert_eq!(r, vec![q().from_i64(0), q().from_i64(1), q().from_i64(-1)]);
        assert!(f.splits());
        let g = Polynomial::from_i64s(q(), &[-2, 0, 0, 1]);
        assert!(g.roots().is_empty());
        // 4x^2 - 1 has roots +-1/2
        let h = Polynomial::from_i64s(q(), &[-1, 0, 4]);
        assert_eq!(h.roots().len(), 2);
        let qi = FieldSpec::GaussianRationals;
        let s = Polynomial::from_i64s(qi, &[1, 0, 1]);
        assert_eq!(s.roots().len(), 2);
    }

    #[test]
    fn finite_field_roots_match_brute_force() {
        for p in [5u64, 13, 17, 29] {
            let f = FieldSpec::prime(p).unwrap();
            let poly = Polynomial::from_i64s(f, &[6, -5, -2, 1, 3]);
            let brute: Vec<_> = f
                .elements()
                .unwrap()
                .into_iter()
                .filter(|c| poly.eval(c).is_zero())
                .collect();
            assert_eq!(poly.roots(), brute);
        }
        let f2 = FieldSpec::prime_square(7).unwrap();
        let poly = Polynomial::from_i64s(f2, &[1, 0, 1]);
        let brute: Vec<_> = f2
            .elements()
            .unwrap()
            .into_iter()
            .filter(|c| poly.eval(c).is_zero())
            .collect();
        let mut got = poly.roots();
        got.sort_by(canonical_cmp);
        assert_eq!(got, brute);
    }

    #[test]
    fn display() {
        let p = Polynomial::from_i64s(q(), &[-1, 0, -6, 0, 3]);
        assert_eq!(p.to_string(), "3*x^4 - 6*x^2 - 1");
        let qi = FieldSpec::GaussianRationals;
        let m = Polynomial::monomial(qi.gaussian(0, 2).unwrap(), 1);
        assert_eq!(m.to_string(), "2i*x");
        let n = Polynomial::monomial(qi.gaussian(0, -2).unwrap(), 1);
        assert_eq!(n.to_string(), "-2i*x");
    }
}

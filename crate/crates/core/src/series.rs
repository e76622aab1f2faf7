//! Truncated Laurent series in one variable with explicit absolute precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::Polynomial;

/// Precision marker for series known exactly (finitely many terms).
pub const EXACT: i64 = i64::MAX / 4;

const MAX_TERMS: i64 = 1 << 20;

/// `Σ_{k ≥ val} c_k T^k + O(T^prec)`.
///
/// The first stored coefficient is nonzero unless the series is zero to
/// precision, in which case nothing is stored and `val == prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    spec: FieldSpec,
    val: i64,
    coeffs: Vec<FieldElement>,
    prec: i64,
}

impl LaurentSeries {
    /// Builds `Σ coeffs[k] T^{val+k} + O(T^prec)`; coefficients at or beyond
    /// `prec` are dropped.
    pub fn new(spec: FieldSpec, val: i64, mut coeffs: Vec<FieldElement>, prec: i64) -> Self {
        let keep = (prec - val).max(0) as usize;
        coeffs.truncate(keep);
        let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == coeffs.len() {
            return LaurentSeries {
                spec,
                val: prec,
                coeffs: Vec::new(),
                prec,
            };
        }
        coeffs.drain(..lead_zeros);
        let val = val + lead_zeros as i64;
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        LaurentSeries {
            spec,
            val,
            coeffs,
            prec,
        }
    }

    pub fn zero(spec: FieldSpec, prec: i64) -> Self {
        LaurentSeries {
            spec,
            val: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    /// `c T^e + O(T^prec)`.
    pub fn monomial(c: FieldElement, e: i64, prec: i64) -> Self {
        Self::new(c.spec(), e, vec![c], prec)
    }

    /// The local parameter itself, `T + O(T^prec)`.
    pub fn t(spec: FieldSpec, prec: i64) -> Self {
        Self::monomial(spec.one(), 1, prec)
    }

    pub fn from_polynomial(p: &Polynomial, prec: i64) -> Self {
        Self::new(p.spec(), 0, p.coeffs().to_vec(), prec)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Exponent of the first nonzero coefficient (equals `prec` for zero).
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Number of known terms past the leading one.
    pub fn relative_precision(&self) -> i64 {
        self.prec - self.val
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead_coeff(&self) -> Option<&FieldElement> {
        self.coeffs.first()
    }

    /// Coefficient of `T^e`, `None` when beyond the known precision.
    pub fn coeff(&self, e: i64) -> Option<FieldElement> {
        if e >= self.prec {
            return None;
        }
        if e < self.val {
            return Some(self.spec.zero());
        }
        Some(
            self.coeffs
                .get((e - self.val) as usize)
                .cloned()
                .unwrap_or_else(|| self.spec.zero()),
        )
    }

    /// Lowers the precision to `prec` (no-op if already lower).
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::new(self.spec, self.val, self.coeffs.clone(), prec)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::new(
            self.spec,
            self.val,
            self.coeffs.iter().map(|a| a * c).collect(),
            self.prec,
        )
    }

    /// Multiplies by `T^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            spec: self.spec,
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec + k,
        }
    }

    pub fn invert(&self) -> Result<Self> {
        let lead = self.lead_coeff().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() == 1 && self.prec >= EXACT / 2 {
            return Ok(Self::new(self.spec, -self.val, vec![lead.inv()?], EXACT));
        }
        if self.relative_precision() > MAX_TERMS {
            return Err(Error::InsufficientPrecision(
                "inverting a series needs a finite precision".into(),
            ));
        }
        let r = self.relative_precision() as usize;
        let li = lead.inv()?;
        // Solve (Σ a_k T^k)(Σ b_k T^k) = 1 term by term after factoring T^val.
        let mut b: Vec<FieldElement> = Vec::with_capacity(r);
        for n in 0..r {
            let mut acc = if n == 0 {
                self.spec.one()
            } else {
                self.spec.zero()
            };
            for k in 1..=n.min(self.coeffs.len().saturating_sub(1)) {
                acc = &acc - &(&self.coeffs[k] * &b[n - k]);
            }
            b.push(&acc * &li);
        }
        Ok(Self::new(self.spec, -self.val, b, -self.val + r as i64))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.invert()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::new(self.spec, 0, vec![self.spec.one()], EXACT);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        if n == 0 {
            acc = acc.truncate(self.relative_precision());
        }
        Ok(acc)
    }

    /// Substitutes `inner` (which must have positive valuation) for `T`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.is_zero() || inner.val < 1 {
            return Err(Error::Precondition(
                "series composition needs an inner series of positive valuation".into(),
            ));
        }
        let vb = inner.val;
        let rb = inner.relative_precision();
        if self.is_zero() {
            return Ok(Self::zero(self.spec, self.prec.saturating_mul(vb)));
        }
        let target = (self.prec.saturating_mul(vb)).min(self.val * vb + rb);
        let mut acc = Self::zero(self.spec, target);
        let mut power = inner.pow(self.val)?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = &power * inner;
            }
            if (self.val + k as i64) * vb >= target {
                break;
            }
            if !c.is_zero() {
                acc = &acc + &power.scale(c);
            }
        }
        Ok(acc.truncate(target))
    }

    /// Evaluates a polynomial at this series.
    pub fn eval_polynomial(&self, p: &Polynomial) -> Self {
        let mut acc = Self::zero(self.spec, EXACT);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::monomial(c.clone(), 0, EXACT);
        }
        acc
    }
}

fn series_add(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    let prec = a.prec.min(b.prec);
    let val = a.val.min(b.val).min(prec);
    let extent = |s: &LaurentSeries| {
        if s.is_zero() {
            i64::MIN
        } else {
            s.val + s.coeffs.len() as i64
        }
    };
    let end = extent(a).max(extent(b)).min(prec);
    let len = (end - val).max(0) as usize;
    let mut out = vec![a.spec.zero(); len];
    for s in [a, b] {
        for (k, c) in s.coeffs.iter().enumerate() {
            let idx = s.val + k as i64 - val;
            if idx >= len as i64 {
                break;
            }
            let idx = idx as usize;
            out[idx] = &out[idx] + c;
        }
    }
    LaurentSeries::new(a.spec, val, out, prec)
}

fn series_mul(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    let val = a.val + b.val;
    let rel = a.relative_precision().min(b.relative_precision());
    let prec = val.saturating_add(rel);
    if a.is_zero() || b.is_zero() {
        return LaurentSeries::zero(
            a.spec,
            a.prec
                .saturating_add(b.val)
                .min(b.prec.saturating_add(a.val)),
        );
    }
    let len = rel.min((a.coeffs.len() + b.coeffs.len()) as i64) as usize;
    let mut out = vec![a.spec.zero(); len];
    for (i, x) in a.coeffs.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    LaurentSeries::new(a.spec, val, out, prec)
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        series_add(self, rhs)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        series_add(self, &-rhs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        series_mul(self, rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            spec: self.spec,
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.val + k as i64;
            let mono = match e {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{e}"),
            };
            let neg = c.is_negative_like();
            let mag = if neg { -c } else { c.clone() };
            let term = if mono.is_empty() {
                mag.to_string()
            } else {
                mag.fmt_coefficient(&mono)
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            f.write_str(&term)?;
            first = false;
        }
        if first {
            write!(f, "O(T^{})", self.prec)
        } else {
            write!(f, " + O(T^{})", self.prec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn geometric_inverse() {
        let s = LaurentSeries::new(q(), 0, vec![q().one(), q().one()], 8);
        let inv = s.invert().unwrap();
        for k in 0..8 {
            assert_eq!(
                inv.coeff(k).unwrap(),
                q().from_i64(if k % 2 == 0 { 1 } else { -1 })
            );
        }
        assert_eq!(inv.coeff(8), None);
        let one = &s * &inv;
        assert_eq!(one, LaurentSeries::monomial(q().one(), 0, 8));
    }

    #[test]
    fn monomial_product_and_precision_rule() {
        let a = LaurentSeries::monomial(q().one(), -2, 5);
        let b = LaurentSeries::monomial(q().one(), 3, 7);
        let c = &a * &b;
        assert_eq!(c.valuation(), 1);
        // min(5 + 3, 7 - 2) = 5
        assert_eq!(c.precision(), 5);
    }

    #[test]
    fn compose_against_invert_mul_oracle() {
        let a = LaurentSeries::monomial(q().one(), -2, 10);
        let b = LaurentSeries::new(q(), 1, vec![q().from_i64(2), q().one()], 10);
        let c = a.compose(&b).unwrap();
        let binv = b.invert().unwrap();
        let oracle = &binv * &binv;
        let p = c.precision().min(oracle.precision());
        assert_eq!(c.truncate(p), oracle.truncate(p));
        let quarter = q().from_ratio(1, 4).unwrap();
        assert_eq!(c.coeff(-2).unwrap(), quarter);
        assert_eq!(c.coeff(-1).unwrap(), -&quarter);
    }

    #[test]
    fn errors() {
        assert_eq!(
            LaurentSeries::zero(q(), 4).invert(),
            Err(Error::DivisionByZero)
        );
        let a = LaurentSeries::monomial(q().one(), 1, 4);
        let b = LaurentSeries::monomial(q().one(), 0, 4);
        assert!(a.compose(&b).is_err());
    }
}

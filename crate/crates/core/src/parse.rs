//! Text forms: fields, scalars, curves, homomorphism labels and curve
//! functions. Everything the library prints can be read back here.
//!
//! Expressions use `+ - * / ^`, parentheses, integers, the generator `i`
//! (a fixed square root of -1, when the field has one), `u` (the generator of
//! `F_p^2`), and on curves the coordinates `x` and `y`. Juxtaposition such as
//! `2i` or `2x` means multiplication.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::curvefunc::CurveRationalFunction;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::isogeny::{HomElement, Isogeny};
use crate::weierstrass::{Point, WeierstrassCurve};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Num(BigInt),
    Ident(char),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().collect();
            out.push(Token::Num(digits.parse().expect("digits")));
        } else if matches!(c, 'x' | 'y' | 'i' | 'u') {
            out.push(Token::Ident(c));
            k += 1;
        } else if matches!(c, '+' | '-' | '*' | '/' | '^' | '(' | ')') {
            out.push(Token::Op(c));
            k += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

/// The values an expression can evaluate to.
trait Algebra: Sized + Clone {
    fn constant(&self, c: FieldElement) -> Self;
    fn variable(&self, v: char) -> Result<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn powi(&self, e: i64) -> Result<Self>;
}

impl Algebra for FieldElement {
    fn constant(&self, c: FieldElement) -> Self {
        c
    }
    fn variable(&self, v: char) -> Result<Self> {
        Err(Error::Parse(format!(
            "variable {v} is not allowed in a scalar"
        )))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.checked_div(o)
    }
    fn powi(&self, e: i64) -> Result<Self> {
        FieldElement::powi(self, e)
    }
}

impl Algebra for CurveRationalFunction {
    fn constant(&self, c: FieldElement) -> Self {
        CurveRationalFunction::constant(self.curve(), c)
    }
    fn variable(&self, v: char) -> Result<Self> {
        match v {
            'x' => Ok(CurveRationalFunction::x(self.curve())),
            'y' => Ok(CurveRationalFunction::y(self.curve())),
            _ => Err(Error::Parse(format!("unknown variable {v}"))),
        }
    }
    fn add(&self, o: &Self) -> Self {
        CurveRationalFunction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CurveRationalFunction::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CurveRationalFunction::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.checked_div(o)
    }
    fn powi(&self, e: i64) -> Result<Self> {
        CurveRationalFunction::powi(self, e)
    }
}

struct Parser<'a, A: Algebra> {
    toks: Vec<Token>,
    pos: usize,
    spec: FieldSpec,
    proto: &'a A,
}

impl<'a, A: Algebra> Parser<'a, A> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.bump() {
            Some(Token::Op(d)) if d == c => Ok(()),
            other => Err(Error::Parse(format!("expected {c:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<A> {
        let mut acc = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.term()?;
            acc = if c == '+' {
                acc.add(&rhs)
            } else {
                acc.sub(&rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<A> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Token::Op('*')) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Op('/')) => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                // juxtaposition: 2i, 2x, x(y+1), (a)(b)
                Some(Token::Ident(_)) | Some(Token::Op('(')) | Some(Token::Num(_)) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<A> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.bump();
                let v = self.unary()?;
                Ok(self.proto.constant(self.spec.zero()).sub(&v))
            }
            Some(Token::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<A> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.bump();
            let e = self.exponent()?;
            return base.powi(e);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let mut neg = false;
        let paren = matches!(self.peek(), Some(Token::Op('(')));
        if paren {
            self.bump();
        }
        if let Some(Token::Op('-')) = self.peek() {
            self.bump();
            neg = true;
        }
        let n = match self.bump() {
            Some(Token::Num(n)) => {
                i64::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))?
            }
            other => {
                return Err(Error::Parse(format!(
                    "expected an integer exponent, found {other:?}"
                )))
            }
        };
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<A> {
        match self.bump() {
            Some(Token::Num(n)) => Ok(self.proto.constant(self.spec.from_bigint(&n))),
            Some(Token::Ident('i')) => {
                let i = self.spec.sqrt_minus_one().ok_or_else(|| {
                    Error::Parse(format!("{} has no square root of -1", self.spec))
                })?;
                Ok(self.proto.constant(i))
            }
            Some(Token::Ident('u')) => {
                let u = self
                    .spec
                    .extension_generator()
                    .ok_or_else(|| Error::Parse(format!("{} has no generator u", self.spec)))?;
                Ok(self.proto.constant(u))
            }
            Some(Token::Ident(v)) => self.proto.variable(v),
            Some(Token::Op('(')) => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn run<A: Algebra>(spec: FieldSpec, proto: &A, s: &str) -> Result<A> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        spec,
        proto,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(v)
}

pub fn parse_field(s: &str) -> Result<FieldSpec> {
    FieldSpec::from_str(s)
}

/// A scalar such as `-3`, `2/5`, `(1-2i)`, `2/5*i` or `(3+4*u)`.
pub fn parse_scalar(spec: FieldSpec, s: &str) -> Result<FieldElement> {
    run(spec, &spec.zero(), s)
}

/// A curve function in `x` and `y`, e.g. `3*x^4 - 6*x^2 - 1` or
/// `(x^2 + 1) / (x - 1) + y*(x)`.
pub fn parse_function(curve: &Arc<WeierstrassCurve>, s: &str) -> Result<CurveRationalFunction> {
    run(curve.spec(), &CurveRationalFunction::one(curve), s)
}

/// Splits on commas that are not inside parentheses.
fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out
}

/// `E/<field>:[A2,A4,A6]`, or `[A2,A4,A6]` over the given default field.
pub fn parse_curve(s: &str, default_field: Option<FieldSpec>) -> Result<WeierstrassCurve> {
    let s = s.trim();
    let (spec, body) = match s.strip_prefix("E/") {
        Some(rest) => {
            let cut = rest
                .rfind(":[")
                .ok_or_else(|| Error::Parse(format!("malformed curve {s:?}")))?;
            (parse_field(&rest[..cut])?, &rest[cut + 1..])
        }
        None => (
            default_field.ok_or_else(|| {
                Error::Parse("a field is required for a bare coefficient list".into())
            })?,
            s,
        ),
    };
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [A2,A4,A6] in {s:?}")))?;
    let parts = split_top(inner, ',');
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "expected three coefficients in {s:?}"
        )));
    }
    let c: Vec<FieldElement> = parts
        .iter()
        .map(|p| parse_scalar(spec, p))
        .collect::<Result<_>>()?;
    WeierstrassCurve::new(spec, c[0].clone(), c[1].clone(), c[2].clone())
}

/// A point `(x, y)` or `O`.
pub fn parse_point(spec: FieldSpec, s: &str) -> Result<Point> {
    let s = s.trim();
    if s == "O" {
        return Ok(Point::Infinity);
    }
    let inner = s
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (x, y) in {s:?}")))?;
    let parts = split_top(inner, ',');
    if parts.len() != 2 {
        return Err(Error::Parse(format!("expected two coordinates in {s:?}")));
    }
    Ok(Point::Affine(
        parse_scalar(spec, &parts[0])?,
        parse_scalar(spec, &parts[1])?,
    ))
}

/// A Gaussian integer label `a+bi` (or an integer).
pub fn parse_gaussian_label(s: &str) -> Result<(i64, i64)> {
    let v = parse_scalar(FieldSpec::GaussianRationals, s)?;
    let (a, b) = v.gaussian_parts().expect("Gaussian field");
    let to_int = |r: &num_rational::BigRational| -> Result<i64> {
        if !r.is_integer() {
            return Err(Error::Parse(format!("{s:?} is not a Gaussian integer")));
        }
        i64::try_from(r.to_integer()).map_err(|_| Error::Parse(format!("{s:?} is too large")))
    };
    Ok((to_int(a)?, to_int(b)?))
}

/// A homomorphism label on `curve`:
///
/// * `n`, `a+bi` — multiplication maps (the latter on CM models);
/// * `velu(e)` — Vélu's 2-isogeny with kernel `{O, (e, 0)}`;
/// * `A∘B` (or `A o B`) — composition, `B` applied first.
pub fn parse_hom(curve: &Arc<WeierstrassCurve>, s: &str) -> Result<HomElement> {
    let s = s.trim();
    let normalized = s.replace(" o ", "∘");
    let parts: Vec<String> = split_top(&normalized, '∘');
    if parts.len() > 1 {
        // Realize from the right so each factor knows its source curve.
        let mut inner = parse_hom(curve, parts.last().expect("nonempty"))?;
        let mut src = inner.to_isogeny(curve)?.target().clone();
        for p in parts[..parts.len() - 1].iter().rev() {
            let outer = parse_hom(&src, p)?;
            src = outer.to_isogeny(&src)?.target().clone();
            inner = HomElement::Compose(Box::new(outer), Box::new(inner));
        }
        return Ok(inner);
    }
    let atom = s.trim_matches(|c| c == ' ');
    if let Some(rest) = atom.strip_prefix("velu(").and_then(|r| r.strip_suffix(')')) {
        let e = parse_scalar(curve.spec(), rest)?;
        let p = Point::Affine(e, curve.spec().zero());
        let iso = Isogeny::velu2(curve, &p)?;
        return Ok(HomElement::Explicit(Arc::new(iso), format!("φ_{p}")));
    }
    let stripped = match atom.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(inner) if split_top(inner, ',').len() == 1 => inner,
        _ => atom,
    };
    let (a, b) = parse_gaussian_label(stripped)?;
    Ok(if b == 0 {
        HomElement::Int(a)
    } else {
        HomElement::Gauss(a, b)
    })
}

/// A comma-separated list of homomorphism labels.
pub fn parse_hom_list(curve: &Arc<WeierstrassCurve>, s: &str) -> Result<Vec<HomElement>> {
    split_top(s, ',')
        .iter()
        .map(|p| parse_hom(curve, p))
        .collect()
}

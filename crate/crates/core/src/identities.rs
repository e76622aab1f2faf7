//! Exact verification of the identities satisfied by `Ψ_φ`: both chain
//! rules, both relations to `x`, both recurrences and the pullback rule for
//! kernel functions. Each check computes both sides as canonical curve
//! functions and compares them.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvefunc::CurveRationalFunction;
use crate::divpoly::{kernel_function, psi_symbols, Engine, KernelSymbolSum};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::isogeny::HomElement;
use crate::weierstrass::WeierstrassCurve;

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub inputs: Vec<String>,
    pub lhs: CurveRationalFunction,
    pub rhs: CurveRationalFunction,
    pub equal: bool,
    /// The field the computation was carried out in.
    pub field: FieldSpec,
}

impl IdentityReport {
    pub fn new(
        name: &str,
        inputs: Vec<String>,
        lhs: CurveRationalFunction,
        rhs: CurveRationalFunction,
    ) -> Self {
        let equal = lhs == rhs;
        let field = lhs.spec();
        IdentityReport {
            name: name.to_string(),
            inputs,
            lhs,
            rhs,
            equal,
            field,
        }
    }

    /// `lhs / rhs` when the sides differ (and `rhs` is nonzero).
    pub fn discrepancy(&self) -> Option<CurveRationalFunction> {
        if self.equal {
            return None;
        }
        self.lhs.checked_div(&self.rhs).ok()
    }

    pub fn record(&self) -> ReportRecord {
        ReportRecord {
            name: self.name.clone(),
            inputs: self.inputs.clone(),
            equal: self.equal,
            field: self.field.to_string(),
            lhs: self.lhs.to_string(),
            rhs: self.rhs.to_string(),
        }
    }
}

/// Serializable form of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRecord {
    pub name: String,
    pub inputs: Vec<String>,
    pub equal: bool,
    pub field: String,
    pub lhs: String,
    pub rhs: String,
}

// ---------------------------------------------------------------------------
// Label arithmetic
// ---------------------------------------------------------------------------

/// Splits a label as `outer ∘ (a + b i)` (with `outer = None` for plain
/// Gaussian labels).
pub(crate) fn split_label(h: &HomElement) -> Option<(Option<HomElement>, i64, i64)> {
    match h.normalized() {
        HomElement::Int(n) => Some((None, n, 0)),
        HomElement::Gauss(a, b) => Some((None, a, b)),
        e @ HomElement::Explicit(..) => Some((Some(e), 1, 0)),
        HomElement::Compose(o, i) => {
            let (a, b) = i.gaussian_coords()?;
            Some((Some(*o), a, b))
        }
    }
}

pub(crate) fn join_label(outer: Option<HomElement>, a: i64, b: i64) -> HomElement {
    let g = if b == 0 {
        HomElement::Int(a)
    } else {
        HomElement::Gauss(a, b)
    };
    match outer {
        None => g,
        Some(o) if (a, b) == (1, 0) => o,
        Some(o) => HomElement::Compose(Box::new(o), Box::new(g)),
    }
}

/// `α + β` for labels sharing an outer factor (`φ∘γ + φ∘δ = φ∘(γ + δ)`).
pub fn label_add(a: &HomElement, b: &HomElement) -> Result<HomElement> {
    let (oa, a1, a2) = split_label(a).ok_or_else(|| unsupported(a))?;
    let (ob, b1, b2) = split_label(b).ok_or_else(|| unsupported(b))?;
    if oa != ob {
        return Err(Error::Precondition(format!(
            "cannot add {a} and {b}: different outer factors"
        )));
    }
    Ok(join_label(oa, a1 + b1, a2 + b2))
}

pub fn label_neg(a: &HomElement) -> Result<HomElement> {
    let (o, x, y) = split_label(a).ok_or_else(|| unsupported(a))?;
    Ok(join_label(o, -x, -y))
}

pub fn label_sub(a: &HomElement, b: &HomElement) -> Result<HomElement> {
    label_add(a, &label_neg(b)?)
}

/// `n·α` (as `outer ∘ (n(a + b i))`).
pub fn label_scale(a: &HomElement, n: i64) -> Result<HomElement> {
    let (o, x, y) = split_label(a).ok_or_else(|| unsupported(a))?;
    Ok(join_label(o, n * x, n * y))
}

pub fn label_is_zero(a: &HomElement) -> bool {
    matches!(split_label(a), Some((_, 0, 0)))
}

fn unsupported(h: &HomElement) -> Error {
    Error::Precondition(format!("label {h} is not of the form φ∘(a+bi)"))
}

fn nonzero(labels: &[&HomElement]) -> Result<()> {
    for l in labels {
        if label_is_zero(l) {
            return Err(Error::Degenerate(format!("label {l} is the zero map")));
        }
    }
    Ok(())
}

fn compose_label(outer: &HomElement, inner: &HomElement) -> HomElement {
    match (outer.gaussian_coords(), inner.gaussian_coords()) {
        (Some((a, b)), Some((c, d))) => join_label(None, a * c - b * d, a * d + b * c),
        _ => HomElement::Compose(Box::new(outer.clone()), Box::new(inner.clone())),
    }
}

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// Which form of the first chain rule to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMode {
    Unbiased,
    Biased,
}

fn psi(eng: &Engine, h: &HomElement) -> Result<CurveRationalFunction> {
    eng.psi_label(h)
}

fn hat(eng: &Engine, h: &HomElement) -> Result<CurveRationalFunction> {
    eng.psi_hat_label(h)
}

fn pow(f: &CurveRationalFunction, e: i64) -> Result<CurveRationalFunction> {
    f.powi(e)
}

/// `x' ∘ α` or `y' ∘ α` for the coordinates of the target.
fn coordinate_pullback(
    eng: &Engine,
    h: &HomElement,
    want_y: bool,
) -> Result<CurveRationalFunction> {
    let iso = eng.isogeny(h)?;
    let tgt = iso.target();
    let c = if want_y {
        CurveRationalFunction::y(tgt)
    } else {
        CurveRationalFunction::x(tgt)
    };
    iso.pullback(&c)
}

/// `Ψ_{α+β} Ψ_{α-β} Ψ̂_α Ψ̂_β / (Ψ_α^2 Ψ_β^2 Ψ̂_{α+β})`.
fn rel_x_lhs(eng: &Engine, a: &HomElement, b: &HomElement) -> Result<CurveRationalFunction> {
    let s = label_add(a, b)?;
    let d = label_sub(a, b)?;
    nonzero(&[a, b, &s, &d])?;
    let num = psi(eng, &s)?
        .mul(&psi(eng, &d)?)
        .mul(&hat(eng, a)?)
        .mul(&hat(eng, b)?);
    let den = pow(&psi(eng, a)?, 2)?
        .mul(&pow(&psi(eng, b)?, 2)?)
        .mul(&hat(eng, &s)?);
    num.checked_div(&den)
}

/// `Ψ_{α+β+σ} Ψ_{α-β} Ψ_σ / (Ψ_{α+σ} Ψ_{β+σ} Ψ_α Ψ_β)` times
/// `sqrt(Ψ̂_{α+σ} Ψ̂_{β+σ} Ψ̂_α Ψ̂_β / (Ψ̂_{α+β+σ} Ψ̂_{α-β} Ψ̂_σ))`.
fn rel_x2_lhs(
    eng: &Engine,
    a: &HomElement,
    b: &HomElement,
    s: &HomElement,
) -> Result<CurveRationalFunction> {
    let abs = label_add(&label_add(a, b)?, s)?;
    let amb = label_sub(a, b)?;
    let as_ = label_add(a, s)?;
    let bs = label_add(b, s)?;
    nonzero(&[a, b, s, &abs, &amb, &as_, &bs])?;
    let num = psi(eng, &abs)?.mul(&psi(eng, &amb)?).mul(&psi(eng, s)?);
    let den = psi(eng, &as_)?
        .mul(&psi(eng, &bs)?)
        .mul(&psi(eng, a)?)
        .mul(&psi(eng, b)?);
    let exps = vec![
        (as_, 1),
        (bs, 1),
        (a.clone(), 1),
        (b.clone(), 1),
        (abs, -1),
        (amb, -1),
        (s.clone(), -1),
    ];
    let root = eng.sqrt_hat_product(&exps)?;
    Ok(num.checked_div(&den)?.mul(&root))
}

fn slope(eng: &Engine, a: &HomElement, s: &HomElement) -> Result<CurveRationalFunction> {
    let dy = coordinate_pullback(eng, a, true)?.sub(&coordinate_pullback(eng, s, true)?);
    let dx = coordinate_pullback(eng, a, false)?.sub(&coordinate_pullback(eng, s, false)?);
    if dx.is_zero() && dy.is_zero() {
        // α = σ: the chord becomes the tangent (3x'^2 + 2a2 x' + a4) / (2y') ∘ α.
        let iso = eng.isogeny(a)?;
        let t = iso.target();
        let x = CurveRationalFunction::x(t);
        let spec = t.spec();
        let num = x
            .mul(&x)
            .scale(&spec.from_i64(3))
            .add(&x.scale(&(t.a2() * &spec.from_i64(2))))
            .add(&CurveRationalFunction::constant(t, t.a4().clone()));
        let den = CurveRationalFunction::y(t).scale(&spec.from_i64(2));
        return iso.pullback(&num.checked_div(&den)?);
    }
    if dx.is_zero() {
        return Err(Error::Degenerate(format!("x∘{a} = x∘{s}")));
    }
    dy.checked_div(&dx)
}

fn labels(hs: &[&HomElement]) -> Vec<String> {
    hs.iter().map(|h| h.label()).collect()
}

// ---------------------------------------------------------------------------
// The identities
// ---------------------------------------------------------------------------

/// First chain rule for `α ∘ β` with `β` an endomorphism of the engine's
/// curve and `α` starting there.
pub fn verify_chain(
    eng: &Engine,
    alpha: &HomElement,
    beta: &HomElement,
    mode: ChainMode,
) -> Result<IdentityReport> {
    nonzero(&[alpha, beta])?;
    let a = eng.isogeny(alpha)?;
    let b = eng.isogeny(beta)?;
    if b.target() != eng.curve() {
        return Err(Error::Precondition(format!(
            "{beta} must be an endomorphism"
        )));
    }
    let ab = compose_label(alpha, beta);
    let deg_a = a.degree() as i64;
    let ratio_den = b
        .pullback(&psi(eng, alpha)?)?
        .mul(&pow(&psi(eng, beta)?, deg_a)?);
    let name;
    let (lhs, rhs) = match mode {
        ChainMode::Unbiased => {
            if a.is_biased()? || b.is_biased()? {
                return Err(Error::Precondition(
                    "the unbiased chain rule needs unbiased α and β".into(),
                ));
            }
            name = "chain-unbiased";
            (psi(eng, &ab)?, ratio_den)
        }
        ChainMode::Biased => {
            name = "chain-biased";
            let lhs = pow(&psi(eng, &ab)?.checked_div(&ratio_den)?, 2)?;
            let hat_den = b
                .pullback(&hat(eng, alpha)?)?
                .mul(&pow(&hat(eng, beta)?, deg_a)?);
            (lhs, hat(eng, &ab)?.checked_div(&hat_den)?)
        }
    };
    Ok(IdentityReport::new(name, labels(&[alpha, beta]), lhs, rhs))
}

/// Second chain rule: `(∏ Ψ_γ^{e} sqrt(∏ Ψ̂_γ^{-e})) ∘ β` against
/// `∏ Ψ_{γβ}^{e} sqrt(∏ Ψ̂_{γβ}^{-e})`, for exponents `e` on the `γ`.
pub fn verify_second_chain(
    eng: &Engine,
    e: &[(HomElement, i64)],
    beta: &HomElement,
) -> Result<IdentityReport> {
    nonzero(&[beta])?;
    let b = eng.isogeny(beta)?;
    if b.target() != eng.curve() {
        return Err(Error::Precondition(format!(
            "{beta} must be an endomorphism"
        )));
    }
    let composed: Vec<(HomElement, i64)> = e
        .iter()
        .map(|(g, n)| (compose_label(g, beta), *n))
        .collect();
    if !crate::divpoly::quadratic_identity_check(&composed)? {
        return Err(Error::QuadraticIdentity(
            "exponents on γβ do not form a quadratic identity".into(),
        ));
    }
    let side = |terms: &[(HomElement, i64)]| -> Result<CurveRationalFunction> {
        let mut acc = CurveRationalFunction::one(eng.curve());
        for (g, n) in terms {
            nonzero(&[g])?;
            acc = acc.mul(&pow(&psi(eng, g)?, *n)?);
        }
        let neg: Vec<(HomElement, i64)> = terms.iter().map(|(g, n)| (g.clone(), -n)).collect();
        Ok(acc.mul(&eng.sqrt_hat_product(&neg)?))
    };
    let lhs = b.pullback(&side(e)?)?;
    let rhs = side(&composed)?;
    let mut inputs: Vec<String> = e
        .iter()
        .map(|(g, n)| format!("{}:{n}", g.label()))
        .collect();
    inputs.push(beta.label());
    Ok(IdentityReport::new("second-chain", inputs, lhs, rhs))
}

/// First relation to `x`. With the normalization fixed by `Ψ_1 = 1` the
/// quotient equals `x∘β − x∘α` (classically `x − x∘[2]` for `(2, 1)`).
pub fn verify_rel_x(eng: &Engine, alpha: &HomElement, beta: &HomElement) -> Result<IdentityReport> {
    let lhs = rel_x_lhs(eng, alpha, beta)?;
    let rhs = coordinate_pullback(eng, beta, false)?.sub(&coordinate_pullback(eng, alpha, false)?);
    Ok(IdentityReport::new(
        "rel-x",
        labels(&[alpha, beta]),
        lhs,
        rhs,
    ))
}

/// First recurrence: the cyclic sum of relation-to-`x` quotients vanishes.
pub fn verify_rec1(
    eng: &Engine,
    a: &HomElement,
    b: &HomElement,
    c: &HomElement,
) -> Result<IdentityReport> {
    let lhs = rel_x_lhs(eng, a, b)?
        .add(&rel_x_lhs(eng, b, c)?)
        .add(&rel_x_lhs(eng, c, a)?);
    Ok(IdentityReport::new(
        "rec1",
        labels(&[a, b, c]),
        lhs,
        CurveRationalFunction::zero(eng.curve()),
    ))
}

/// Second relation to `x`.
pub fn verify_rel_x2(
    eng: &Engine,
    a: &HomElement,
    b: &HomElement,
    s: &HomElement,
) -> Result<IdentityReport> {
    let lhs = rel_x2_lhs(eng, a, b, s)?;
    let rhs = slope(eng, a, s)?.sub(&slope(eng, b, s)?);
    Ok(IdentityReport::new("rel-x2", labels(&[a, b, s]), lhs, rhs))
}

/// Second recurrence. Each term carries the common factor
/// `Ψ_σ / sqrt(Ψ̂_σ)`, which makes the individual square roots well defined.
pub fn verify_rec2(
    eng: &Engine,
    a: &HomElement,
    b: &HomElement,
    c: &HomElement,
    s: &HomElement,
) -> Result<IdentityReport> {
    let lhs = rel_x2_lhs(eng, a, b, s)?
        .add(&rel_x2_lhs(eng, b, c, s)?)
        .add(&rel_x2_lhs(eng, c, a, s)?);
    Ok(IdentityReport::new(
        "rec2",
        labels(&[a, b, c, s]),
        lhs,
        CurveRationalFunction::zero(eng.curve()),
    ))
}

/// Pullback rule: the kernel function of `β^* s` is the pullback of the
/// kernel function of `s`.
pub fn verify_pullback_lemma(
    eng: &Engine,
    s: &KernelSymbolSum,
    beta: &HomElement,
) -> Result<IdentityReport> {
    let b = eng.isogeny(beta)?;
    let h = kernel_function(s, eng.scaling())?;
    let pulled = s.pullback(&b, &beta.label())?;
    if pulled.source() != eng.curve() {
        return Err(Error::Precondition(format!(
            "{beta} must start on {}",
            eng.curve()
        )));
    }
    let g = kernel_function(&pulled, eng.scaling())?;
    let lhs = b.pullback(&h.value)?;
    Ok(IdentityReport::new(
        "pullback",
        vec![s.to_string(), beta.label()],
        lhs,
        g.value,
    ))
}

/// `Ψ_α` symbols as a convenient principal sum for pullback checks.
pub fn psi_symbol_sum(eng: &Engine, h: &HomElement) -> Result<KernelSymbolSum> {
    psi_symbols(&eng.isogeny(h)?, &h.label(), eng.scaling())
}

// ---------------------------------------------------------------------------
// Randomized suites
// ---------------------------------------------------------------------------

/// The identity families exercised by [`run_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    ChainUnbiased,
    ChainBiased,
    RelX,
    Rec1,
    RelX2,
    Rec2,
    SecondChain,
    Pullback,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::ChainUnbiased,
        Family::ChainBiased,
        Family::RelX,
        Family::Rec1,
        Family::RelX2,
        Family::Rec2,
        Family::SecondChain,
        Family::Pullback,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::ChainUnbiased => "chain-unbiased",
            Family::ChainBiased => "chain-biased",
            Family::RelX => "rel-x",
            Family::Rec1 => "rec1",
            Family::RelX2 => "rel-x2",
            Family::Rec2 => "rec2",
            Family::SecondChain => "second-chain",
            Family::Pullback => "pullback",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.name() == s)
    }
}

/// Summary of a randomized suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub family: String,
    pub field: String,
    pub instances: usize,
    pub equal: usize,
    /// Instances that had to be recomputed over the quadratic extension.
    pub fallbacks: usize,
    /// Sampled instances rejected as degenerate before a report was made.
    pub skipped: usize,
    pub failures: Vec<ReportRecord>,
}

/// Whether an error marks the sampled instance as degenerate (to be
/// resampled) rather than a failure.
fn is_degenerate(e: &Error) -> bool {
    matches!(
        e,
        Error::Degenerate(_)
            | Error::ZeroIsogeny
            | Error::Inseparable(_)
            | Error::DivisionByZero
            | Error::QuadraticIdentity(_)
    )
}

fn gaussian_label<R: Rng>(rng: &mut R, bound: i64) -> HomElement {
    loop {
        let a = rng.gen_range(-bound..=bound);
        let b = rng.gen_range(-bound..=bound);
        if (a, b) != (0, 0) {
            return join_label(None, a, b);
        }
    }
}

fn biased_label<R: Rng>(rng: &mut R, bound: i64) -> HomElement {
    loop {
        let h = gaussian_label(rng, bound);
        let (a, b) = h.gaussian_coords().expect("gaussian");
        if (a + b) % 2 == 0 {
            return h;
        }
    }
}

fn unbiased_label<R: Rng>(rng: &mut R, bound: i64) -> HomElement {
    loop {
        let h = gaussian_label(rng, bound);
        let (a, b) = h.gaussian_coords().expect("gaussian");
        if (a + b) % 2 != 0 {
            return h;
        }
    }
}

/// One random instance of a family on the engine's (CM) curve.
pub fn random_instance<R: Rng>(
    eng: &Engine,
    family: Family,
    rng: &mut R,
    bound: i64,
) -> Result<IdentityReport> {
    let g = |rng: &mut R| gaussian_label(rng, bound);
    match family {
        Family::ChainUnbiased => {
            let a = unbiased_label(rng, bound);
            let b = unbiased_label(rng, bound);
            verify_chain(eng, &a, &b, ChainMode::Unbiased)
        }
        Family::ChainBiased => {
            let a = biased_label(rng, bound);
            let b = if rng.gen_bool(0.5) {
                biased_label(rng, bound)
            } else {
                g(rng)
            };
            verify_chain(eng, &a, &b, ChainMode::Biased)
        }
        Family::RelX => {
            let (a, b) = (g(rng), g(rng));
            verify_rel_x(eng, &a, &b)
        }
        Family::Rec1 => {
            let (a, b, c) = (g(rng), g(rng), g(rng));
            verify_rec1(eng, &a, &b, &c)
        }
        Family::RelX2 => {
            let (a, b, s) = (g(rng), g(rng), g(rng));
            verify_rel_x2(eng, &a, &b, &s)
        }
        Family::Rec2 => {
            let (a, b, c, s) = (g(rng), g(rng), g(rng), g(rng));
            verify_rec2(eng, &a, &b, &c, &s)
        }
        Family::SecondChain => {
            let small = bound.min(2);
            let (a, b) = (g(rng), g(rng));
            let e = if rng.gen_bool(0.5) {
                parallelogram(&a, &b)?
            } else {
                let c = gaussian_label(rng, small);
                cube(&a, &b, &c)?
            };
            let beta = gaussian_label(rng, small);
            verify_second_chain(eng, &e, &beta)
        }
        Family::Pullback => {
            let mut s = psi_symbol_sum(eng, &g(rng))?;
            let other = psi_symbol_sum(eng, &g(rng))?;
            s = s.plus(&other.scaled(*[-1, 1, 2].choose(rng).expect("nonempty")))?;
            let beta = gaussian_label(rng, bound.min(2));
            verify_pullback_lemma(eng, &s, &beta)
        }
    }
}

/// `{α+β: 1, α-β: 1, α: -2, β: -2}`.
pub fn parallelogram(a: &HomElement, b: &HomElement) -> Result<Vec<(HomElement, i64)>> {
    let v = vec![
        (label_add(a, b)?, 1),
        (label_sub(a, b)?, 1),
        (a.clone(), -2),
        (b.clone(), -2),
    ];
    for (h, _) in &v {
        nonzero(&[h])?;
    }
    Ok(v)
}

/// The cube identity on `(α, β, γ)` (the `q(0)` term omitted).
pub fn cube(a: &HomElement, b: &HomElement, c: &HomElement) -> Result<Vec<(HomElement, i64)>> {
    let ab = label_add(a, b)?;
    let bc = label_add(b, c)?;
    let ca = label_add(c, a)?;
    let abc = label_add(&ab, c)?;
    let v = vec![
        (abc, 1),
        (ab, -1),
        (bc, -1),
        (ca, -1),
        (a.clone(), 1),
        (b.clone(), 1),
        (c.clone(), 1),
    ];
    for (h, _) in &v {
        nonzero(&[h])?;
    }
    Ok(v)
}

/// Runs `count` nondegenerate random instances of `family` over `F_p` on
/// `y^2 = x^3 - x`, retrying over `F_p^2` when a step needs an extension.
pub fn run_suite(
    p: u64,
    family: Family,
    count: usize,
    seed: u64,
    bound: i64,
) -> Result<SuiteSummary> {
    let spec = FieldSpec::prime(p)?;
    let curve = Arc::new(WeierstrassCurve::from_i64s(spec, 0, -1, 0)?);
    let eng = Engine::gaussian(&curve)?;
    let mut ext: Option<Engine> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 32) ^ family as u64);
    let mut summary = SuiteSummary {
        family: family.name().to_string(),
        field: spec.to_string(),
        instances: 0,
        equal: 0,
        fallbacks: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    let mut attempts = 0usize;
    while summary.instances < count {
        attempts += 1;
        if attempts > 50 * count + 100 {
            return Err(Error::Degenerate(format!(
                "could not sample {count} instances of {}",
                family.name()
            )));
        }
        let state = rng.clone();
        let report = match random_instance(&eng, family, &mut rng, bound) {
            Ok(r) => r,
            Err(Error::ExtensionRequired(_)) => {
                let e2 = match &ext {
                    Some(e) => e,
                    None => {
                        let s2 = FieldSpec::prime_square(p)?;
                        ext = Some(Engine::gaussian(&Arc::new(curve.base_change(s2)?))?);
                        ext.as_ref().expect("just set")
                    }
                };
                let mut replay = state;
                match random_instance(e2, family, &mut replay, bound) {
                    Ok(r) => {
                        summary.fallbacks += 1;
                        r
                    }
                    Err(e) if is_degenerate(&e) => {
                        summary.skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(e) if is_degenerate(&e) => {
                summary.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        summary.instances += 1;
        if report.equal {
            summary.equal += 1;
        } else {
            summary.failures.push(report.record());
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isogeny::Isogeny;
    use crate::parse::parse_function;
    use crate::weierstrass::Point;
    use HomElement::{Gauss, Int};

    fn cm() -> Arc<WeierstrassCurve> {
        Arc::new(WeierstrassCurve::from_i64s(FieldSpec::GaussianRationals, 0, -1, 0).unwrap())
    }

    #[test]
    fn chain_examples() {
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        assert!(
            verify_chain(&eng, &Int(2), &Int(3), ChainMode::Unbiased)
                .unwrap()
                .equal
        );
        assert!(
            verify_chain(&eng, &Gauss(0, 1), &Gauss(0, 1), ChainMode::Unbiased)
                .unwrap()
                .equal
        );
        let phi =
            Arc::new(Isogeny::velu2(&e, &Point::Affine(e.spec().one(), e.spec().zero())).unwrap());
        let phi = HomElement::Explicit(phi, "φ".into());
        let r = verify_chain(&eng, &phi, &Gauss(1, 1), ChainMode::Biased).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, parse_function(&e, "1/(x-i)^2").unwrap());
    }

    #[test]
    fn relation_examples() {
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        let r = verify_rel_x(&eng, &Int(2), &Int(1)).unwrap();
        assert!(r.equal);
        assert_eq!(
            r.rhs,
            parse_function(&e, "x - (x^2+1)^2/(4*(x^3-x))").unwrap()
        );
        assert!(
            verify_rel_x(&eng, &Gauss(1, 1), &Gauss(0, 1))
                .unwrap()
                .equal
        );
        assert!(matches!(
            verify_rel_x(&eng, &Int(1), &Int(1)),
            Err(Error::Degenerate(_))
        ));
        assert!(
            verify_rec1(&eng, &Gauss(1, 1), &Gauss(0, 1), &Int(1))
                .unwrap()
                .equal
        );
        assert!(verify_rec1(&eng, &Int(2), &Int(1), &Int(3)).unwrap().equal);
        assert!(
            verify_rel_x2(&eng, &Int(3), &Int(1), &Int(1))
                .unwrap()
                .equal
        );
        assert!(
            verify_rel_x2(&eng, &Gauss(1, 1), &Gauss(0, 1), &Int(1))
                .unwrap()
                .equal
        );
        assert!(
            verify_rec2(&eng, &Int(3), &Int(2), &Int(1), &Int(1))
                .unwrap()
                .equal
        );
        assert!(
            verify_rec2(&eng, &Gauss(1, 1), &Gauss(0, 1), &Int(1), &Gauss(0, 1))
                .unwrap()
                .equal
        );
    }

    #[test]
    fn second_chain_and_pullback() {
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        let e1 = parallelogram(&Int(1), &Gauss(0, 1)).unwrap();
        assert!(verify_second_chain(&eng, &e1, &Int(2)).unwrap().equal);
        let s = psi_symbol_sum(&eng, &Int(2)).unwrap();
        assert!(verify_pullback_lemma(&eng, &s, &Int(3)).unwrap().equal);
        let empty = KernelSymbolSum::new(e.clone());
        assert!(
            verify_pullback_lemma(&eng, &empty, &Gauss(1, 1))
                .unwrap()
                .equal
        );
    }

    #[test]
    fn small_suite_over_f13() {
        for fam in Family::ALL {
            let s = run_suite(13, fam, 3, 7, 2).unwrap();
            assert_eq!(s.equal, s.instances, "{fam:?}: {:?}", s.failures);
        }
    }
}

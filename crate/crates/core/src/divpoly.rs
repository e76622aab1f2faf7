//! Division polynomials: the classical `Ψ_n`, the isogeny-indexed `Ψ_φ` with
//! its auxiliaries `Ψ̂` and `Ψ̃`, and general kernel functions attached to
//! kernel symbol sums.
//!
//! Normalization. Every variant is pinned down by its leading coefficient in
//! the local parameter `T = -x/y` at `O`. A kernel symbol `(K_φ)` for
//! `φ: E → E_φ` contributes the factor `λ_φ a_φ`, where `T_φ ∘ φ = a_φ T + …`
//! and `λ_φ` is the scale of the invariant differential chosen on the target
//! (`ω_φ = λ_φ · dT_φ/(1 + O(T_φ))`). The kernel function of `Σ n_φ (K_φ)`
//! therefore has `T`-expansion `∏ (λ_φ a_φ)^{n_φ} · T^{Σ n_φ} + …`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::curvefunc::{CurveFunction, CurveRationalFunction};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::isogeny::{HomElement, Isogeny};
use crate::poly::Polynomial;
use crate::ratfun::RatFun;
use crate::weierstrass::{Point, WeierstrassCurve};

/// Series precision used when cross-checking leading coefficients.
pub const AUDIT_PRECISION: usize = 8;

// ---------------------------------------------------------------------------
// Classical division polynomials
// ---------------------------------------------------------------------------

/// Memoized classical division polynomials `Ψ_n` of one curve, with the sign
/// convention `Ψ_2 = -2y` (so that `Ψ_n = n T^{1-n^2} + …` at `O`).
#[derive(Debug)]
pub struct ClassicalPsi {
    curve: Arc<WeierstrassCurve>,
    table: Mutex<HashMap<i64, CurveFunction>>,
}

impl ClassicalPsi {
    pub fn new(curve: Arc<WeierstrassCurve>) -> Self {
        ClassicalPsi {
            curve,
            table: Mutex::new(HashMap::new()),
        }
    }

    pub fn curve(&self) -> &Arc<WeierstrassCurve> {
        &self.curve
    }

    /// `Ψ_n`; `Ψ_0 = 0` and `Ψ_{-n} = -Ψ_n`.
    pub fn get(&self, n: i64) -> CurveFunction {
        if n < 0 {
            let p = self.get(-n);
            return CurveFunction::new(self.curve.clone(), -p.u(), -p.v());
        }
        if let Some(p) = self.table.lock().expect("psi table").get(&n) {
            return p.clone();
        }
        let value = self.compute(n);
        self.table
            .lock()
            .expect("psi table")
            .insert(n, value.clone());
        value
    }

    fn compute(&self, n: i64) -> CurveFunction {
        let c = &self.curve;
        let s = c.spec();
        let zero = Polynomial::zero(s);
        let x_only = |u: Polynomial| CurveFunction::new(c.clone(), u, Polynomial::zero(s));
        let with_y = |v: Polynomial| CurveFunction::new(c.clone(), Polynomial::zero(s), v);
        let [b2, b4, b6, b8] = c.b_invariants();
        match n {
            0 => x_only(zero),
            1 => x_only(Polynomial::one(s)),
            2 => with_y(Polynomial::constant(s.from_i64(-2))),
            3 => x_only(Polynomial::new(
                s,
                vec![
                    b8,
                    &s.from_i64(3) * &b6,
                    &s.from_i64(3) * &b4,
                    b2,
                    s.from_i64(3),
                ],
            )),
            4 => {
                let k = |m: i64, e: &FieldElement| &s.from_i64(m) * e;
                let inner = Polynomial::new(
                    s,
                    vec![
                        &(&b4 * &b8) - &b6.square(),
                        &(&b2 * &b8) - &(&b4 * &b6),
                        k(10, &b8),
                        k(10, &b6),
                        k(5, &b4),
                        b2.clone(),
                        s.from_i64(2),
                    ],
                );
                with_y(inner.scale(&s.from_i64(-2)))
            }
            _ => {
                let k = n / 2;
                if n % 2 == 1 {
                    // Ψ_{2k+1} = Ψ_{k+2} Ψ_k^3 - Ψ_{k-1} Ψ_{k+1}^3
                    let a = self.get(k + 2).mul(&cube(&self.get(k)));
                    let b = self.get(k - 1).mul(&cube(&self.get(k + 1)));
                    a.add(&negate(&b))
                } else {
                    // Ψ_{2k} = Ψ_k (Ψ_{k+2} Ψ_{k-1}^2 - Ψ_{k-2} Ψ_{k+1}^2) / Ψ_2
                    let pk1 = self.get(k - 1);
                    let pk3 = self.get(k + 1);
                    let a = self.get(k + 2).mul(&pk1.mul(&pk1));
                    let b = self.get(k - 2).mul(&pk3.mul(&pk3));
                    let prod = self.get(k).mul(&a.add(&negate(&b)));
                    divide_by_psi2(&prod)
                }
            }
        }
    }
}

fn cube(p: &CurveFunction) -> CurveFunction {
    p.mul(&p.mul(p))
}

fn negate(p: &CurveFunction) -> CurveFunction {
    CurveFunction::new(p.curve().clone(), -p.u(), -p.v())
}

/// `(u + y v) / (-2y) = -v/2 + y (-u / (2 f))`; exact for the products that
/// occur in the even-index recurrence.
fn divide_by_psi2(p: &CurveFunction) -> CurveFunction {
    let c = p.curve();
    let s = c.spec();
    let m = s.from_i64(-2).inv().expect("characteristic is not 2");
    let uf = p
        .u()
        .exact_div(c.f())
        .expect("even-index recurrence is divisible by f");
    CurveFunction::new(c.clone(), p.v().scale(&m), uf.scale(&m))
}

/// `Ψ_n` of `curve` as a function on the curve.
pub fn classical_psi(curve: &Arc<WeierstrassCurve>, n: i64) -> CurveFunction {
    ClassicalPsi::new(curve.clone()).get(n)
}

// ---------------------------------------------------------------------------
// Kernel symbols
// ---------------------------------------------------------------------------

/// Which invariant differential on the target normalizes a symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolRole {
    /// The differential attached to the target curve itself.
    Curve,
    /// The differential `ω_i` on the target of the fixed isogeny `g_i`
    /// (`i` in `1..=3`), even when that curve coincides with another one.
    G(usize),
}

/// A kernel symbol `(K_φ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelSymbol {
    pub label: String,
    pub iso: Arc<Isogeny>,
    pub role: SymbolRole,
}

impl KernelSymbol {
    pub fn new(label: impl Into<String>, iso: Arc<Isogeny>, role: SymbolRole) -> Self {
        KernelSymbol {
            label: label.into(),
            iso,
            role,
        }
    }
}

/// A formal integer combination of kernel symbols, all on one source curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSymbolSum {
    source: Arc<WeierstrassCurve>,
    terms: Vec<(KernelSymbol, i64)>,
}

impl KernelSymbolSum {
    pub fn new(source: Arc<WeierstrassCurve>) -> Self {
        KernelSymbolSum {
            source,
            terms: Vec::new(),
        }
    }

    pub fn source(&self) -> &Arc<WeierstrassCurve> {
        &self.source
    }

    pub fn terms(&self) -> &[(KernelSymbol, i64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `n (K)`, merging with an existing equal symbol.
    pub fn add(&mut self, sym: KernelSymbol, n: i64) -> Result<()> {
        if sym.iso.source() != &self.source {
            return Err(Error::CurveMismatch(format!(
                "{} does not start on {}",
                sym.label, self.source
            )));
        }
        if n == 0 {
            return Ok(());
        }
        if let Some(pos) = self
            .terms
            .iter()
            .position(|(k, _)| k.iso == sym.iso && k.role == sym.role)
        {
            self.terms[pos].1 += n;
            if self.terms[pos].1 == 0 {
                self.terms.remove(pos);
            }
        } else {
            self.terms.push((sym, n));
        }
        Ok(())
    }

    pub fn with(mut self, sym: KernelSymbol, n: i64) -> Result<Self> {
        self.add(sym, n)?;
        Ok(self)
    }

    /// `n (K_1)`.
    pub fn add_identity(&mut self, n: i64) -> Result<()> {
        let id = Arc::new(Isogeny::identity(&self.source));
        self.add(KernelSymbol::new("1", id, SymbolRole::Curve), n)
    }

    pub fn plus(&self, other: &KernelSymbolSum) -> Result<Self> {
        let mut out = self.clone();
        for (k, n) in &other.terms {
            out.add(k.clone(), *n)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, m: i64) -> Self {
        let terms = if m == 0 {
            Vec::new()
        } else {
            self.terms.iter().map(|(k, n)| (k.clone(), n * m)).collect()
        };
        KernelSymbolSum {
            source: self.source.clone(),
            terms,
        }
    }

    /// `Σ n_φ deg φ`, the degree of the image divisor.
    pub fn degree(&self) -> i64 {
        self.terms
            .iter()
            .map(|(k, n)| n * k.iso.degree() as i64)
            .sum()
    }

    /// `Σ n_φ`, the order at `O` of the kernel function.
    pub fn order_at_identity(&self) -> i64 {
        self.terms.iter().map(|(_, n)| n).sum()
    }

    /// `Σ n_φ P_φ`; together with degree zero this decides principality.
    pub fn kernel_point_sum(&self) -> Result<Point> {
        let mut acc = Point::Infinity;
        for (k, n) in &self.terms {
            let (p, _) = k.iso.kernel_sum()?;
            acc = self.source.add(&acc, &self.source.mul(*n, &p)?)?;
        }
        Ok(acc)
    }

    pub fn is_principal(&self) -> Result<bool> {
        Ok(self.degree() == 0 && self.kernel_point_sum()?.is_infinity())
    }

    /// `β^*`: every `(K_γ)` becomes `(K_{γβ})` on the source of `β`.
    pub fn pullback(&self, beta: &Isogeny, beta_label: &str) -> Result<Self> {
        if beta.target() != &self.source {
            return Err(Error::CurveMismatch(
                "β must land on the source of the symbols".into(),
            ));
        }
        let mut out = KernelSymbolSum::new(beta.source().clone());
        for (k, n) in &self.terms {
            let composed = Arc::new(k.iso.compose(beta)?);
            let label = if k.label == "1" {
                beta_label.to_string()
            } else {
                format!("{}∘{}", k.label, beta_label)
            };
            out.add(KernelSymbol::new(label, composed, k.role), *n)?;
        }
        Ok(out)
    }
}

impl fmt::Display for KernelSymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, n)) in self.terms.iter().enumerate() {
            let name = match k.role {
                SymbolRole::Curve => format!("(K_{{{}}})", k.label),
                SymbolRole::G(i) => format!("(K_{{g{i}:{}}})", k.label),
            };
            let sign = if *n < 0 {
                "-"
            } else if idx > 0 {
                "+"
            } else {
                ""
            };
            let mag = n.abs();
            if idx > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            if mag == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag}{name}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Differential scaling
// ---------------------------------------------------------------------------

/// The fixed 2-isogenies `g_i` and the scales of the invariant differentials
/// on `E`, on the targets `E_i` of the `g_i`, and on any other target curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialScaling {
    curve: Arc<WeierstrassCurve>,
    lambda: FieldElement,
    lambda_g: [FieldElement; 3],
    g: Option<[Arc<Isogeny>; 3]>,
    others: Vec<(Arc<WeierstrassCurve>, FieldElement)>,
}

impl DifferentialScaling {
    /// All scales 1; `g_i` are Vélu's isogenies when `E[2]` is rational.
    pub fn unscaled(curve: &Arc<WeierstrassCurve>) -> Result<Self> {
        Self::with_g_choices(curve, [None, None, None])
    }

    /// All scales 1 with explicit choices for some of the `g_i`.
    pub fn with_g_choices(
        curve: &Arc<WeierstrassCurve>,
        choices: [Option<Isogeny>; 3],
    ) -> Result<Self> {
        let one = curve.spec().one();
        let tt = curve.two_torsion();
        let g = if tt.split {
            let mut gs = Vec::with_capacity(3);
            for (i, choice) in choices.into_iter().enumerate() {
                let p = &tt.points[i];
                let gi = match choice {
                    Some(iso) => {
                        check_g_choice(curve, &iso, p, i + 1)?;
                        iso
                    }
                    None => Isogeny::velu2(curve, p)?,
                };
                gs.push(Arc::new(gi));
            }
            let [a, b, c]: [Arc<Isogeny>; 3] = gs.try_into().expect("three choices");
            Some([a, b, c])
        } else {
            if choices.iter().any(Option::is_some) {
                return Err(Error::ExtensionRequired(format!(
                    "the 2-torsion of {curve} is not rational"
                )));
            }
            None
        };
        Ok(DifferentialScaling {
            curve: curve.clone(),
            lambda: one.clone(),
            lambda_g: [one.clone(), one.clone(), one],
            g,
            others: Vec::new(),
        })
    }

    pub fn curve(&self) -> &Arc<WeierstrassCurve> {
        &self.curve
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    /// `λ_i` for `i` in `1..=3`.
    pub fn lambda_g(&self, i: usize) -> &FieldElement {
        &self.lambda_g[i - 1]
    }

    pub fn g_choices(&self) -> Option<&[Arc<Isogeny>; 3]> {
        self.g.as_ref()
    }

    /// `g_i` for `i` in `1..=3`.
    pub fn g(&self, i: usize) -> Result<&Arc<Isogeny>> {
        match &self.g {
            Some(gs) if (1..=3).contains(&i) => Ok(&gs[i - 1]),
            Some(_) => Err(Error::Precondition(format!(
                "2-torsion index {i} out of range"
            ))),
            None => Err(Error::ExtensionRequired(format!(
                "biased data needs the 2-torsion of {} to be rational",
                self.curve
            ))),
        }
    }

    pub fn with_lambda(mut self, c: FieldElement) -> Self {
        self.lambda = c;
        self
    }

    pub fn with_lambda_g(mut self, i: usize, c: FieldElement) -> Self {
        self.lambda_g[i - 1] = c;
        self
    }

    /// Sets the scale of the differential on another curve (an isogenous
    /// target). Setting it on `E` itself changes `λ`.
    pub fn with_target_scale(mut self, curve: &Arc<WeierstrassCurve>, c: FieldElement) -> Self {
        if curve == &self.curve {
            self.lambda = c;
            return self;
        }
        self.others.retain(|(k, _)| k != curve);
        self.others.push((curve.clone(), c));
        self
    }

    /// Scale of the differential on `curve` (1 unless set).
    pub fn target_scale(&self, curve: &Arc<WeierstrassCurve>) -> FieldElement {
        if curve == &self.curve {
            return self.lambda.clone();
        }
        self.others
            .iter()
            .find(|(k, _)| k == curve)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.curve.spec().one())
    }

    fn symbol_scale(&self, sym: &KernelSymbol) -> FieldElement {
        match sym.role {
            SymbolRole::Curve => self.target_scale(sym.iso.target()),
            SymbolRole::G(i) => self.lambda_g[i - 1].clone(),
        }
    }

    /// The symbol `(K_{g_i})` (`i ≥ 1`) or `(K_1)` (`i = 0`).
    pub fn g_symbol(&self, i: usize) -> Result<KernelSymbol> {
        if i == 0 {
            return Ok(KernelSymbol::new(
                "1",
                Arc::new(Isogeny::identity(&self.curve)),
                SymbolRole::Curve,
            ));
        }
        Ok(KernelSymbol::new(
            format!("g{i}"),
            self.g(i)?.clone(),
            SymbolRole::G(i),
        ))
    }

    /// `(K_{g_1}) + (K_{g_2}) + (K_{g_3}) - (K_{[2]}) - 2(K_1)`.
    pub fn convention_sum(&self) -> Result<KernelSymbolSum> {
        let mut s = KernelSymbolSum::new(self.curve.clone());
        for i in 1..=3 {
            s.add(self.g_symbol(i)?, 1)?;
        }
        let two = Arc::new(Isogeny::multiplication(&self.curve, 2)?);
        s.add(KernelSymbol::new("2", two, SymbolRole::Curve), -1)?;
        s.add_identity(-2)?;
        Ok(s)
    }
}

fn check_g_choice(curve: &Arc<WeierstrassCurve>, iso: &Isogeny, p: &Point, i: usize) -> Result<()> {
    if iso.source() != curve || iso.degree() != 2 {
        return Err(Error::Precondition(format!(
            "g{i} must be a degree-2 isogeny on {curve}"
        )));
    }
    let e = p.x().expect("affine 2-torsion point");
    if iso.kernel_polynomial() != Polynomial::linear_root(e) {
        return Err(Error::Precondition(format!(
            "g{i} must have kernel {{O, {p}}}"
        )));
    }
    Ok(())
}

/// `κ`: the value at `O` of `(T∘[2]) T^2 / ((T_1∘g_1)(T_2∘g_2)(T_3∘g_3))`
/// for the parameters `T = -x/y` of each curve, read off a series expansion.
pub fn convention_constant(scaling: &DifferentialScaling) -> Result<FieldElement> {
    let curve = scaling.curve();
    let t_of = |c: &Arc<WeierstrassCurve>| -> Result<CurveRationalFunction> {
        CurveRationalFunction::x(c)
            .checked_div(&CurveRationalFunction::y(c))
            .map(|q| q.neg())
    };
    let t = t_of(curve)?;
    let two = Isogeny::multiplication(curve, 2)?;
    let mut expr = two.pullback(&t)?.mul(&t).mul(&t);
    for i in 1..=3 {
        let gi = scaling.g(i)?;
        expr = expr.checked_div(&gi.pullback(&t_of(gi.target())?)?)?;
    }
    let series = expr.expand_at_o(AUDIT_PRECISION)?;
    if series.valuation() != 0 {
        return Err(Error::Degenerate(format!(
            "convention expression has order {} at O",
            series.valuation()
        )));
    }
    Ok(series.lead_coeff().expect("nonzero series").clone())
}

/// Scalings satisfying the convention: `λ = λ_1 = λ_2 = 1` and `λ_3 = κ`, so
/// that the kernel function of the convention sum is the constant 1.
pub fn convention_solve(
    curve: &Arc<WeierstrassCurve>,
    choices: [Option<Isogeny>; 3],
) -> Result<DifferentialScaling> {
    let base = DifferentialScaling::with_g_choices(curve, choices)?;
    if base.g.is_none() {
        return Err(Error::ExtensionRequired(format!(
            "the 2-torsion of {curve} is not rational"
        )));
    }
    let kappa = convention_constant(&base)?;
    Ok(base.with_lambda_g(3, kappa))
}

// ---------------------------------------------------------------------------
// Normalized functions
// ---------------------------------------------------------------------------

/// A function together with the kernel symbol sum it is attached to and its
/// cached leading data at `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedFunction {
    pub value: CurveRationalFunction,
    pub symbols: KernelSymbolSum,
    pub lead: FieldElement,
    pub order: i64,
}

impl NormalizedFunction {
    fn from_value(value: CurveRationalFunction, symbols: KernelSymbolSum) -> Result<Self> {
        let (order, lead) = value.lead_at_infinity()?;
        Ok(NormalizedFunction {
            value,
            symbols,
            lead,
            order,
        })
    }

    /// Checks the cached lead data against a series expansion at `O`.
    pub fn check_lead(&self) -> Result<()> {
        let s = self.value.expand_at_o(AUDIT_PRECISION)?;
        if s.valuation() != self.order || s.lead_coeff() != Some(&self.lead) {
            return Err(Error::Degenerate(format!(
                "series lead {:?}·T^{} disagrees with cached {}·T^{}",
                s.lead_coeff().map(|c| c.to_string()),
                s.valuation(),
                self.lead,
                self.order
            )));
        }
        Ok(())
    }
}

impl fmt::Display for NormalizedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `∏ (λ_φ a_φ)^{n_φ}`.
fn symbol_lead(s: &KernelSymbolSum, scaling: &DifferentialScaling) -> Result<FieldElement> {
    let mut acc = s.source().spec().one();
    for (k, n) in s.terms() {
        let factor = &scaling.symbol_scale(k) * k.iso.lead();
        acc = &acc * &factor.powi(*n)?;
    }
    Ok(acc)
}

/// Rescales `base` so that its leading coefficient at `O` is `lead`.
fn normalize(base: CurveRationalFunction, lead: &FieldElement) -> Result<CurveRationalFunction> {
    let (_, c) = base.lead_at_infinity()?;
    Ok(base.scale(&lead.checked_div(&c)?))
}

/// The kernel function of a principal kernel symbol sum.
///
/// With `R = ∏ K_φ^{n_φ}` (kernel polynomials in `x`), `div R` is twice the
/// image divisor, so the kernel function is `S`, `y S` or `y S / f` for the
/// rational function `S` with `S^2 = R`, `R/f` or `R f` respectively.
pub fn kernel_function(
    s: &KernelSymbolSum,
    scaling: &DifferentialScaling,
) -> Result<NormalizedFunction> {
    let curve = s.source().clone();
    let spec = curve.spec();
    if s.degree() != 0 {
        return Err(Error::NonPrincipal(format!(
            "image divisor of {s} has degree {}",
            s.degree()
        )));
    }
    let mut num = Polynomial::one(spec);
    let mut den = Polynomial::one(spec);
    for (k, n) in s.terms() {
        let kp = k.iso.kernel_polynomial();
        if kp.is_one() {
            continue;
        }
        let p = kp.pow(n.unsigned_abs() as u32);
        if *n > 0 {
            num = &num * &p;
        } else {
            den = &den * &p;
        }
    }
    let r = RatFun::new(num, den)?;
    let f = RatFun::from_poly(curve.f().clone());
    let sqrt_of = |q: &RatFun| -> Option<RatFun> {
        let a = q.num().monic().sqrt()?;
        let b = q.den().sqrt()?;
        RatFun::new(a, b).ok()
    };
    let zero = RatFun::zero(spec);
    let base = if let Some(sq) = sqrt_of(&r) {
        CurveRationalFunction::from_ratfun(&curve, &sq)
    } else if let Some(sq) = sqrt_of(&r.checked_div(&f)?) {
        CurveRationalFunction::from_ratfuns(&curve, &zero, &sq)
    } else if let Some(sq) = sqrt_of(&(&r * &f)) {
        CurveRationalFunction::from_ratfuns(&curve, &zero, &sq.checked_div(&f)?)
    } else {
        let p = s.kernel_point_sum()?;
        return Err(Error::NonPrincipal(format!(
            "kernel points of {s} sum to {p}"
        )));
    };
    let lead = symbol_lead(s, scaling)?;
    let value = normalize(base, &lead)?;
    let nf = NormalizedFunction::from_value(value, s.clone())?;
    if nf.order != s.order_at_identity() {
        return Err(Error::Degenerate(format!(
            "order {} at O, expected {}",
            nf.order,
            s.order_at_identity()
        )));
    }
    Ok(nf)
}

/// `(λ_ι a_ι, deg g_ι)` for the index of a kernel sum (`g_0` is the identity).
fn index_factor(scaling: &DifferentialScaling, idx: usize) -> Result<(FieldElement, u64)> {
    if idx == 0 {
        return Ok((scaling.lambda().clone(), 1));
    }
    let g = scaling.g(idx)?;
    Ok((scaling.lambda_g(idx) * g.lead(), g.degree()))
}

/// The symbol sum `(K_φ) + (K_{g_φ}) - (deg φ + deg g_φ)(K_1)` of `Ψ_φ`.
pub fn psi_symbols(
    phi: &Arc<Isogeny>,
    label: &str,
    scaling: &DifferentialScaling,
) -> Result<KernelSymbolSum> {
    let (_, idx) = phi.kernel_sum()?;
    let mut s = KernelSymbolSum::new(phi.source().clone());
    s.add(KernelSymbol::new(label, phi.clone(), SymbolRole::Curve), 1)?;
    s.add(scaling.g_symbol(idx)?, 1)?;
    let dg = if idx == 0 {
        1
    } else {
        scaling.g(idx)?.degree() as i64
    };
    s.add_identity(-(phi.degree() as i64) - dg)?;
    Ok(s)
}

/// `Ψ_φ`, built directly from the kernel polynomial: `y^ε · g · H` with
/// `g = gcd(K, f)` and `H^2 = K / g` (`ε = 1` exactly when `E[2] ⊆ ker φ`,
/// in which case `g = f` is absorbed into `y`).
pub fn psi_isogeny(
    phi: &Arc<Isogeny>,
    scaling: &DifferentialScaling,
) -> Result<NormalizedFunction> {
    psi_isogeny_labeled(phi, "φ", scaling)
}

pub fn psi_isogeny_labeled(
    phi: &Arc<Isogeny>,
    label: &str,
    scaling: &DifferentialScaling,
) -> Result<NormalizedFunction> {
    let curve = phi.source().clone();
    if &curve != scaling.curve() {
        return Err(Error::CurveMismatch(format!(
            "{label} does not start on {}",
            scaling.curve()
        )));
    }
    let k = phi.kernel_polynomial();
    let g = phi.kernel_two_torsion();
    let (_, idx) = phi.kernel_sum()?;
    let cofactor = k.exact_div(&g).expect("gcd divides");
    let h = cofactor.sqrt().ok_or_else(|| {
        Error::Degenerate(format!("kernel polynomial of {label} has unpaired roots"))
    })?;
    let base = if g.degree() == Some(3) {
        CurveRationalFunction::from_parts(
            &curve,
            Polynomial::zero(curve.spec()),
            h,
            Polynomial::one(curve.spec()),
        )?
    } else {
        CurveRationalFunction::from_poly(&curve, &g * &h)
    };
    let (gi, dg) = index_factor(scaling, idx)?;
    let lead = (&(&scaling.target_scale(phi.target()) * phi.lead()) * &gi)
        .checked_div(&scaling.lambda().powi((phi.degree() + dg) as i64)?)?;
    let value = normalize(base, &lead)?;
    let symbols = psi_symbols(phi, label, scaling)?;
    let nf = NormalizedFunction::from_value(value, symbols)?;
    record_audit(label, audit_psi(phi, &nf));
    Ok(nf)
}

static AUDITED: AtomicU64 = AtomicU64::new(0);
static AUDIT_FAILURES: Mutex<Vec<String>> = Mutex::new(Vec::new());

fn record_audit(label: &str, outcome: Result<()>) {
    AUDITED.fetch_add(1, Ordering::Relaxed);
    if let Err(e) = outcome {
        AUDIT_FAILURES
            .lock()
            .expect("audit log")
            .push(format!("{label}: {e}"));
    }
}

/// Process-wide tally of the audits run on every computed `Ψ_φ`: the number
/// audited and a description of each failure.
pub fn audit_summary() -> (u64, Vec<String>) {
    (
        AUDITED.load(Ordering::Relaxed),
        AUDIT_FAILURES.lock().expect("audit log").clone(),
    )
}

/// Divisor and lead audit of a computed `Ψ_φ`: `Ψ_φ` is regular away from
/// `O`, `Ψ_φ^2 / (K (x - e_ι))` is constant (which pins the divisor to
/// `φ^*(O') - deg φ (O) + (P_φ) - (O)`), the orders at rational 2-torsion
/// points agree, and the series lead matches.
pub fn audit_psi(phi: &Isogeny, psi: &NormalizedFunction) -> Result<()> {
    let curve = phi.source();
    let v = &psi.value;
    if !v.den().is_one() {
        return Err(Error::Degenerate("Ψ_φ has an affine pole".into()));
    }
    let (p, idx) = phi.kernel_sum()?;
    let mut model = phi.kernel_polynomial();
    if idx != 0 {
        model = &model * &Polynomial::linear_root(p.x().expect("affine"));
    }
    let ratio = v
        .mul(v)
        .checked_div(&CurveRationalFunction::from_poly(curve, model))?;
    if ratio.as_constant().is_none() {
        return Err(Error::Degenerate(format!(
            "Ψ_φ^2 is not a multiple of the kernel model: {ratio}"
        )));
    }
    let k = phi.kernel_polynomial();
    for q in curve.two_torsion().points {
        let e = q.x().expect("affine");
        let in_kernel = k.eval(e).is_zero() as i64;
        let bump = (q == p) as i64;
        let expect = in_kernel + bump;
        let got = v.ord_at(&q)?;
        if got != expect {
            return Err(Error::Degenerate(format!(
                "order {got} at {q}, expected {expect}"
            )));
        }
    }
    let expected_order = if idx == 0 {
        1 - phi.degree() as i64
    } else {
        2 - phi.degree() as i64 - 2
    };
    if psi.order != expected_order {
        return Err(Error::Degenerate(format!(
            "order {} at O, expected {expected_order}",
            psi.order
        )));
    }
    psi.check_lead()
}

/// `Ψ̂_i`: the kernel function of `2(K_{g_i}) - 2 deg g_i (K_1)`, i.e.
/// `(λ_i a_i / λ^2)^2 (x - e_i)`; `Ψ̂_0 = 1`.
pub fn psi_hat_index(scaling: &DifferentialScaling, idx: usize) -> Result<NormalizedFunction> {
    let curve = scaling.curve();
    let mut symbols = KernelSymbolSum::new(curve.clone());
    if idx == 0 {
        return NormalizedFunction::from_value(CurveRationalFunction::one(curve), symbols);
    }
    let g = scaling.g(idx)?;
    symbols.add(scaling.g_symbol(idx)?, 2)?;
    symbols.add_identity(-2 * g.degree() as i64)?;
    let e = -&g.kernel_polynomial().coeff(0);
    let base = CurveRationalFunction::from_poly(curve, Polynomial::linear_root(&e));
    let lead = symbol_lead(&symbols, scaling)?;
    NormalizedFunction::from_value(normalize(base, &lead)?, symbols)
}

/// `Ψ̂_φ := Ψ̂_{ι(φ)}`.
pub fn psi_hat(phi: &Isogeny, scaling: &DifferentialScaling) -> Result<NormalizedFunction> {
    psi_hat_index(scaling, phi.kernel_sum()?.1)
}

/// `Ψ̃_φ`: the kernel function of `2(K_φ) - 2 deg φ (K_1)`, a multiple of
/// the kernel polynomial `K(x)`.
pub fn psi_tilde(phi: &Arc<Isogeny>, scaling: &DifferentialScaling) -> Result<NormalizedFunction> {
    let curve = phi.source();
    let mut symbols = KernelSymbolSum::new(curve.clone());
    symbols.add(KernelSymbol::new("φ", phi.clone(), SymbolRole::Curve), 2)?;
    symbols.add_identity(-2 * phi.degree() as i64)?;
    let base = CurveRationalFunction::from_poly(curve, phi.kernel_polynomial());
    let lead = symbol_lead(&symbols, scaling)?;
    NormalizedFunction::from_value(normalize(base, &lead)?, symbols)
}

// ---------------------------------------------------------------------------
// Quadratic identities and square roots of Ψ̂ products
// ---------------------------------------------------------------------------

/// Coordinates of a label in the basis `1, i` of `Z[i]` extended by named
/// explicit isogenies `α` (and `α∘i`), which are assumed independent.
pub fn hom_coordinates(h: &HomElement) -> Result<BTreeMap<String, i64>> {
    let mut out = BTreeMap::new();
    match h {
        HomElement::Int(n) => {
            out.insert("1".to_string(), *n);
        }
        HomElement::Gauss(a, b) => {
            out.insert("1".to_string(), *a);
            out.insert("i".to_string(), *b);
        }
        HomElement::Explicit(_, name) => {
            out.insert(name.clone(), 1);
        }
        HomElement::Compose(outer, inner) => {
            if let Some((a, b)) = inner.gaussian_coords() {
                for (k, c) in hom_coordinates(outer)? {
                    *out.entry(k.clone()).or_insert(0) += a * c;
                    let (ki, sign) = times_i(&k);
                    *out.entry(ki).or_insert(0) += sign * b * c;
                }
            } else if let (Some((c, d)), HomElement::Explicit(_, name)) =
                (outer.gaussian_coords(), inner.as_ref())
            {
                *out.entry(name.clone()).or_insert(0) += c;
                *out.entry(format!("i∘{name}")).or_insert(0) += d;
            } else {
                return Err(Error::QuadraticIdentity(format!(
                    "{h} has no coordinates in a common basis"
                )));
            }
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// `k ∘ [i]` as a basis key with a sign.
fn times_i(k: &str) -> (String, i64) {
    match k {
        "1" => ("i".to_string(), 1),
        "i" => ("1".to_string(), -1),
        _ => match k.strip_suffix("∘i") {
            Some(base) => (base.to_string(), -1),
            None => (format!("{k}∘i"), 1),
        },
    }
}

/// Whether `Σ e_φ v_φ v_φ^T = 0`, i.e. `Σ e_φ q(φ) = 0` for every quadratic
/// form `q` on the lattice spanned by the labels.
pub fn quadratic_identity_check(e: &[(HomElement, i64)]) -> Result<bool> {
    let vecs: Vec<(BTreeMap<String, i64>, i64)> = e
        .iter()
        .map(|(h, n)| Ok((hom_coordinates(h)?, *n)))
        .collect::<Result<_>>()?;
    let keys: BTreeSet<&String> = vecs.iter().flat_map(|(v, _)| v.keys()).collect();
    for a in &keys {
        for b in &keys {
            let total: i64 = vecs
                .iter()
                .map(|(v, n)| n * v.get(*a).copied().unwrap_or(0) * v.get(*b).copied().unwrap_or(0))
                .sum();
            if total != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Half of the symbol sum of `∏ Ψ̂_φ^{e_φ}`: `Σ e_φ ((K_{g_φ}) - deg g_φ (K_1))`
/// over the biased `φ` (given by their kernel-sum indices).
pub fn half_hat_symbols(
    indices: &[(usize, i64)],
    scaling: &DifferentialScaling,
) -> Result<KernelSymbolSum> {
    let mut s = KernelSymbolSum::new(scaling.curve().clone());
    for &(idx, n) in indices {
        if idx == 0 {
            continue;
        }
        s.add(scaling.g_symbol(idx)?, n)?;
        s.add_identity(-(scaling.g(idx)?.degree() as i64) * n)?;
    }
    Ok(s)
}

/// The unique kernel function supported on `E[2]` whose square is
/// `∏ Ψ̂_φ^{e_φ}`, for exponents forming a quadratic identity.
///
/// Exponent maps that fail the quadratic check are still accepted when half
/// of their symbol sum is principal (e.g. `Ψ̂_φ^{-2}`), since the square root
/// is then equally well defined.
pub fn sqrt_hat_product(
    e: &[(HomElement, i64)],
    scaling: &DifferentialScaling,
) -> Result<NormalizedFunction> {
    let mut indices = Vec::with_capacity(e.len());
    for (h, n) in e {
        let iso = h.to_isogeny(scaling.curve())?;
        indices.push((iso.kernel_sum()?.1, *n));
    }
    sqrt_hat_from_indices(e, &indices, scaling)
}

fn sqrt_hat_from_indices(
    e: &[(HomElement, i64)],
    indices: &[(usize, i64)],
    scaling: &DifferentialScaling,
) -> Result<NormalizedFunction> {
    let half = half_hat_symbols(indices, scaling)?;
    if !quadratic_identity_check(e)? && !half.is_principal()? {
        return Err(Error::QuadraticIdentity(format!(
            "Σ e_φ v_φ v_φ^T ≠ 0 and {half} is not principal"
        )));
    }
    kernel_function(&half, scaling)
}

// ---------------------------------------------------------------------------
// Session engine
// ---------------------------------------------------------------------------

/// A scaling together with memo tables for isogenies and their `Ψ`.
#[derive(Debug)]
pub struct Engine {
    scaling: DifferentialScaling,
    classical: ClassicalPsi,
    isogenies: Mutex<HashMap<String, Arc<Isogeny>>>,
    psi: Mutex<HashMap<Isogeny, CurveRationalFunction>>,
    hats: Mutex<HashMap<usize, CurveRationalFunction>>,
}

impl Engine {
    pub fn new(scaling: DifferentialScaling) -> Self {
        let classical = ClassicalPsi::new(scaling.curve().clone());
        Engine {
            scaling,
            classical,
            isogenies: Mutex::new(HashMap::new()),
            psi: Mutex::new(HashMap::new()),
            hats: Mutex::new(HashMap::new()),
        }
    }

    /// The engine for a curve with convention-solving scalings (Vélu `g_i`
    /// unless overridden), or unscaled data when `E[2]` is not rational.
    pub fn for_curve(curve: &Arc<WeierstrassCurve>, choices: [Option<Isogeny>; 3]) -> Result<Self> {
        let scaling = if curve.two_torsion().split {
            convention_solve(curve, choices)?
        } else {
            DifferentialScaling::with_g_choices(curve, choices)?
        };
        Ok(Engine::new(scaling))
    }

    /// The curve `y^2 = x^3 + A4 x` over a field containing `i`, with
    /// `g_1 = [1+i]`.
    pub fn gaussian(curve: &Arc<WeierstrassCurve>) -> Result<Self> {
        if !curve.has_gaussian_cm() {
            return Err(Error::NotCmModel);
        }
        let g1 = Isogeny::gaussian(curve, 1, 1)?;
        let first = curve.two_torsion().points.first().cloned();
        if g1.kernel_sum()?.0 != first.unwrap_or(Point::Infinity) {
            // [1+i] kills (0,0); only use it when that point is listed first.
            return Self::for_curve(curve, [None, None, None]);
        }
        Self::for_curve(curve, [Some(g1), None, None])
    }

    pub fn scaling(&self) -> &DifferentialScaling {
        &self.scaling
    }

    pub fn curve(&self) -> &Arc<WeierstrassCurve> {
        self.scaling.curve()
    }

    pub fn classical_psi(&self, n: i64) -> CurveFunction {
        self.classical.get(n)
    }

    /// The isogeny named by a label (memoized by normalized label).
    pub fn isogeny(&self, h: &HomElement) -> Result<Arc<Isogeny>> {
        let key = h.normalized().label();
        if let Some(i) = self.isogenies.lock().expect("isogeny table").get(&key) {
            return Ok(i.clone());
        }
        let iso = Arc::new(self.realize(h)?);
        self.isogenies
            .lock()
            .expect("isogeny table")
            .insert(key, iso.clone());
        Ok(iso)
    }

    fn realize(&self, h: &HomElement) -> Result<Isogeny> {
        match h.normalized() {
            HomElement::Int(0) | HomElement::Gauss(0, 0) => Err(Error::ZeroIsogeny),
            HomElement::Int(1) => Ok(Isogeny::identity(self.curve())),
            HomElement::Int(n) if n < 0 => Ok(self.isogeny(&HomElement::Int(-n))?.neg()),
            HomElement::Int(n) => {
                // binary ladder through memoized multiples
                let half = self.isogeny(&HomElement::Int(n / 2))?;
                let even = half.add(&half)?.ok_or(Error::ZeroIsogeny)?;
                if n % 2 == 0 {
                    return Ok(even);
                }
                even.add(&Isogeny::identity(self.curve()))?
                    .ok_or(Error::ZeroIsogeny)
            }
            HomElement::Gauss(a, b) => {
                if !self.curve().has_gaussian_cm() {
                    return Err(Error::NotCmModel);
                }
                let unit = Isogeny::gaussian_unit(self.curve())?;
                let bi = self.isogeny(&HomElement::Int(b))?.compose(&unit)?;
                if a == 0 {
                    return Ok(bi);
                }
                self.isogeny(&HomElement::Int(a))?
                    .add(&bi)?
                    .ok_or(Error::ZeroIsogeny)
            }
            _ => self.realize_composite(h),
        }
    }

    fn realize_composite(&self, h: &HomElement) -> Result<Isogeny> {
        match h {
            HomElement::Compose(outer, inner) => {
                let i = self.isogeny(inner)?;
                let o = if i.target() == self.curve() {
                    self.isogeny(outer)?
                } else {
                    Arc::new(outer.to_isogeny(i.target())?)
                };
                o.compose(&i)
            }
            _ => h.to_isogeny(self.curve()),
        }
    }

    /// `Ψ_φ` (memoized by the isogeny).
    pub fn psi(&self, phi: &Arc<Isogeny>) -> Result<CurveRationalFunction> {
        if let Some(p) = self.psi.lock().expect("psi table").get(phi.as_ref()) {
            return Ok(p.clone());
        }
        let v = psi_isogeny(phi, &self.scaling)?.value;
        self.psi
            .lock()
            .expect("psi table")
            .insert((**phi).clone(), v.clone());
        Ok(v)
    }

    pub fn psi_label(&self, h: &HomElement) -> Result<CurveRationalFunction> {
        self.psi(&self.isogeny(h)?)
    }

    pub fn psi_hat_index(&self, idx: usize) -> Result<CurveRationalFunction> {
        if let Some(p) = self.hats.lock().expect("hat table").get(&idx) {
            return Ok(p.clone());
        }
        let v = psi_hat_index(&self.scaling, idx)?.value;
        self.hats.lock().expect("hat table").insert(idx, v.clone());
        Ok(v)
    }

    pub fn psi_hat(&self, phi: &Isogeny) -> Result<CurveRationalFunction> {
        self.psi_hat_index(phi.kernel_sum()?.1)
    }

    pub fn psi_hat_label(&self, h: &HomElement) -> Result<CurveRationalFunction> {
        self.psi_hat(&*self.isogeny(h)?)
    }

    /// `sqrt(∏ Ψ̂_φ^{e_φ})` with memoized isogenies.
    pub fn sqrt_hat_product(&self, e: &[(HomElement, i64)]) -> Result<CurveRationalFunction> {
        let mut indices = Vec::with_capacity(e.len());
        for (h, n) in e {
            indices.push((self.isogeny(h)?.kernel_sum()?.1, *n));
        }
        Ok(sqrt_hat_from_indices(e, &indices, &self.scaling)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn cm() -> Arc<WeierstrassCurve> {
        Arc::new(WeierstrassCurve::from_i64s(FieldSpec::GaussianRationals, 0, -1, 0).unwrap())
    }

    fn poly(c: &Arc<WeierstrassCurve>, s: &str) -> CurveRationalFunction {
        crate::parse::parse_function(c, s).unwrap()
    }

    #[test]
    fn classical_initial_values() {
        let e = cm();
        assert_eq!(classical_psi(&e, 2).to_string(), "-2*y");
        assert_eq!(classical_psi(&e, 3).to_string(), "3*x^4 - 6*x^2 - 1");
        assert_eq!(classical_psi(&e, -3).to_string(), "-3*x^4 + 6*x^2 + 1");
        assert!(classical_psi(&e, 0).is_zero());
    }

    #[test]
    fn classical_psi_five_factorization() {
        let e = cm();
        let s = e.spec();
        let p5 = classical_psi(&e, 5);
        let c = |a: i64, b: i64, d: i64| {
            s.gaussian(a, b)
                .unwrap()
                .checked_div(&s.from_i64(d))
                .unwrap()
        };
        let q1 = Polynomial::new(s, vec![-&c(1, 2, 5), s.zero(), s.one()]);
        let q2 = Polynomial::new(s, vec![c(-1, 2, 5), s.zero(), s.one()]);
        let q3 = Polynomial::from_i64s(s, &[1, 0, 52, 0, -26, 0, -12, 0, 1]);
        let expect = (&(&q1 * &q2) * &q3).scale(&s.from_i64(5));
        assert_eq!(p5.u(), &expect);
        assert!(p5.v().is_zero());
    }

    #[test]
    fn convention_and_goldens() {
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        let sc = eng.scaling();
        let conv = kernel_function(&sc.convention_sum().unwrap(), sc).unwrap();
        assert!(conv.value.is_one(), "{}", conv.value);
        assert!(sc.lambda_g(1).is_one() && sc.lambda_g(2).is_one());

        let psi = |h: HomElement| {
            let iso = eng.isogeny(&h).unwrap();
            let nf = psi_isogeny(&iso, sc).unwrap();
            audit_psi(&iso, &nf).unwrap();
            nf.value
        };
        assert_eq!(psi(HomElement::Gauss(0, 1)), poly(&e, "i"));
        assert_eq!(psi(HomElement::Gauss(1, 1)), poly(&e, "2i*x"));
        assert_eq!(psi(HomElement::Int(2)), poly(&e, "-2*y"));
        assert_eq!(psi(HomElement::Gauss(2, 2)), poly(&e, "-(2+2i)*y*(x^2+1)"));
        assert_eq!(
            psi(HomElement::Gauss(1, 2)),
            poly(&e, "(1+2i)*(x^2 + 2/5*i - 1/5)")
        );

        let phi =
            Arc::new(Isogeny::velu2(&e, &Point::Affine(e.spec().one(), e.spec().zero())).unwrap());
        let label = HomElement::Explicit(phi.clone(), "φ".into());
        assert_eq!(psi(label.clone()), poly(&e, "x - 1"));
        let comp = HomElement::Compose(Box::new(label), Box::new(HomElement::Gauss(1, 1)));
        assert_eq!(psi(comp.clone()), poly(&e, "2i*x*(x - i)"));
        assert_eq!(eng.psi_hat_label(&comp).unwrap(), poly(&e, "2i*x"));
        assert_eq!(
            eng.psi_hat_label(&HomElement::Gauss(1, 1)).unwrap(),
            poly(&e, "2i*x")
        );
    }

    #[test]
    fn kernel_function_agrees_with_direct_route() {
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        let sc = eng.scaling();
        for (a, b) in [
            (1, 1),
            (2, 0),
            (2, 1),
            (1, -2),
            (3, 0),
            (2, 2),
            (0, 1),
            (3, 1),
        ] {
            let iso = eng.isogeny(&HomElement::Gauss(a, b)).unwrap();
            let direct = psi_isogeny(&iso, sc).unwrap();
            let via = kernel_function(&psi_symbols(&iso, "φ", sc).unwrap(), sc).unwrap();
            assert_eq!(direct.value, via.value, "{a}+{b}i");
        }
    }

    #[test]
    fn classical_matches_kernel_function() {
        let cases = [
            (FieldSpec::Rationals, 4),
            (FieldSpec::prime(101).unwrap(), 7),
        ];
        for (spec, top) in cases {
            let e = Arc::new(WeierstrassCurve::from_i64s(spec, 1, -2, 3).unwrap());
            let sc = DifferentialScaling::unscaled(&e).unwrap();
            for n in 1..=top {
                let iso = Arc::new(Isogeny::multiplication(&e, n).unwrap());
                let mut s = KernelSymbolSum::new(e.clone());
                s.add(KernelSymbol::new(n.to_string(), iso, SymbolRole::Curve), 1)
                    .unwrap();
                s.add_identity(-n * n).unwrap();
                let h = kernel_function(&s, &sc).unwrap();
                let expect =
                    CurveRationalFunction::new(classical_psi(&e, n), Polynomial::one(spec))
                        .unwrap();
                assert_eq!(h.value, expect, "n = {n} over {spec}");
            }
        }
    }

    #[test]
    fn non_principal_sum_is_reported() {
        let e = cm();
        let sc = convention_solve(&e, [None, None, None]).unwrap();
        let iso = Arc::new(Isogeny::gaussian(&e, 1, 1).unwrap());
        let s = KernelSymbolSum::new(e.clone())
            .with(KernelSymbol::new("1+i", iso, SymbolRole::Curve), 1)
            .unwrap();
        let mut s = s;
        s.add_identity(-2).unwrap();
        match kernel_function(&s, &sc) {
            Err(Error::NonPrincipal(msg)) => assert!(msg.contains("(0, 0)"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn velu_default_scaling() {
        let e = cm();
        let sc = DifferentialScaling::unscaled(&e).unwrap();
        assert_eq!(psi_hat_index(&sc, 1).unwrap().value, poly(&e, "x"));
        let kappa = convention_constant(&sc).unwrap();
        assert_eq!(kappa, e.spec().from_i64(2));
        let solved = convention_solve(&e, [None, None, None]).unwrap();
        assert!(kernel_function(&solved.convention_sum().unwrap(), &solved)
            .unwrap()
            .value
            .is_one());
    }

    #[test]
    fn tilde_relation() {
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        let sc = eng.scaling();
        for (a, b) in [(1, 1), (2, 1), (2, 0), (1, 3)] {
            let iso = eng.isogeny(&HomElement::Gauss(a, b)).unwrap();
            let t = psi_tilde(&iso, sc).unwrap().value;
            let p = eng.psi(&iso).unwrap();
            let h = eng.psi_hat(&iso).unwrap();
            assert_eq!(t.mul(&h), p.mul(&p));
        }
    }

    #[test]
    fn quadratic_checks() {
        use HomElement::Gauss;
        let a = (1, 1);
        let b = (0, 1);
        let par = vec![
            (Gauss(a.0 + b.0, a.1 + b.1), 1),
            (Gauss(a.0 - b.0, a.1 - b.1), 1),
            (Gauss(a.0, a.1), -2),
            (Gauss(b.0, b.1), -2),
        ];
        assert!(quadratic_identity_check(&par).unwrap());
        assert!(!quadratic_identity_check(&[(Gauss(1, 0), 1), (Gauss(0, 1), -1)]).unwrap());
        let e = cm();
        let eng = Engine::gaussian(&e).unwrap();
        let half = eng.sqrt_hat_product(&[(Gauss(1, 1), -2)]).unwrap();
        let hat = eng.psi_hat_label(&Gauss(1, 1)).unwrap();
        assert_eq!(half, hat.inv().unwrap());
        assert!(matches!(
            sqrt_hat_product(&[(Gauss(1, 1), 1)], eng.scaling()),
            Err(Error::QuadraticIdentity(_))
        ));
    }
}

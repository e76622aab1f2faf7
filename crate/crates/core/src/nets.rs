//! Elliptic divisibility sequences and elliptic nets over exact fields, and
//! the consonant specialization of isogeny-indexed `Ψ` values at a point.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::curvefunc::Value;
use crate::divpoly::{
    classical_psi, convention_constant, kernel_function, DifferentialScaling, Engine,
};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::identities::{label_add, label_is_zero, label_scale};
use crate::isogeny::{HomElement, Isogeny};
use crate::weierstrass::{Point, WeierstrassCurve};

type Index = Vec<i64>;

/// `(sign, v')` with `v = sign · v'` and the first nonzero entry of `v'`
/// positive.
fn canonical(v: &[i64]) -> (i64, Index) {
    match v.iter().find(|c| **c != 0) {
        Some(c) if *c < 0 => (-1, v.iter().map(|c| -c).collect()),
        _ => (1, v.to_vec()),
    }
}

/// Total order used to reduce indices: sup norm, then `l1` norm, then the
/// canonical representative lexicographically.
fn size_key(v: &[i64]) -> (i64, i64, Index) {
    let (_, c) = canonical(v);
    let sup = v.iter().map(|c| c.abs()).max().unwrap_or(0);
    let l1 = v.iter().map(|c| c.abs()).sum();
    (sup, l1, c)
}

fn add(a: &[i64], b: &[i64]) -> Index {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Index {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn unit(rank: usize, i: usize, n: i64) -> Index {
    let mut v = vec![0; rank];
    v[i] = n;
    v
}

/// All vectors in `[-b, b]^rank`, in lexicographic order.
pub fn index_box(rank: usize, b: i64) -> Vec<Index> {
    let mut out: Vec<Index> = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-b..=b).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

fn x_of(p: &Point) -> Result<&FieldElement> {
    p.x()
        .ok_or_else(|| Error::Degenerate("the point at infinity has no x-coordinate".into()))
}

/// An elliptic net `W: Z^k → K`, determined by a table of initial values and
/// extended by instances of the general recurrence
/// `W(p+q+s)W(p−q)W(r+s)W(r) + W(q+r+s)W(q−r)W(p+s)W(p) + W(r+p+s)W(r−p)W(q+s)W(q) = 0`.
#[derive(Debug)]
pub struct EllipticNet {
    rank: usize,
    spec: FieldSpec,
    curve: Option<Arc<WeierstrassCurve>>,
    points: Vec<Point>,
    initial: HashMap<Index, FieldElement>,
    memo: Mutex<HashMap<Index, FieldElement>>,
}

impl EllipticNet {
    /// A net from explicit initial values (keys are reduced to canonical
    /// sign, using `W(−v) = −W(v)`).
    pub fn from_values(
        rank: usize,
        spec: FieldSpec,
        values: impl IntoIterator<Item = (Index, FieldElement)>,
    ) -> Result<Self> {
        let mut initial = HashMap::new();
        for (v, w) in values {
            if v.len() != rank {
                return Err(Error::Precondition(format!(
                    "index {v:?} does not have rank {rank}"
                )));
            }
            if v.iter().all(|c| *c == 0) {
                continue;
            }
            let (s, c) = canonical(&v);
            let w = if s < 0 { -&w } else { w };
            initial.insert(c, w);
        }
        Ok(EllipticNet {
            rank,
            spec,
            curve: None,
            points: Vec::new(),
            initial,
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// The net of `(E, P_1, …, P_k)` for `k ≤ 2`, normalized by
    /// `W(e_i) = W(e_i + e_j) = 1`. The axes start from the division
    /// polynomials `Ψ_1..Ψ_4` at `P_i`; the mixed initial values come from
    /// the relation `W(u+w)W(u−w) = W(u)^2 W(w)^2 (x(wP) − x(uP))`.
    pub fn from_points(curve: &Arc<WeierstrassCurve>, points: &[Point]) -> Result<Self> {
        let k = points.len();
        if k == 0 || k > 2 {
            return Err(Error::Precondition(format!(
                "nets from points are supported in rank 1 and 2, not {k}"
            )));
        }
        for p in points {
            if !curve.contains(p) {
                return Err(Error::Precondition(format!("{p} is not on {curve}")));
            }
            match p.y() {
                None => return Err(Error::Degenerate("a net point is the identity".into())),
                Some(y) if y.is_zero() => {
                    return Err(Error::Degenerate(format!("{p} is 2-torsion")))
                }
                _ => {}
            }
        }
        let spec = curve.spec();
        let mut values: Vec<(Index, FieldElement)> = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let (x, y) = (x_of(p)?, p.y().expect("affine"));
            for n in 1..=4 {
                values.push((unit(k, i, n), classical_psi(curve, n).eval(x, y)));
            }
        }
        if k == 2 {
            let (p, q) = (&points[0], &points[1]);
            let (xp, xq) = (x_of(p)?.clone(), x_of(q)?.clone());
            if xp == xq {
                return Err(Error::Degenerate("P_1 ± P_2 = O".into()));
            }
            let sum = curve.add(p, q)?;
            let diff = curve.sub(p, q)?;
            let w11m = &xq - &xp;
            let w11m_sq = w11m.square();
            values.push((vec![1, 1], spec.one()));
            values.push((vec![1, -1], w11m));
            values.push((vec![2, 1], &xp - x_of(&sum)?));
            values.push((vec![1, 2], &xq - x_of(&sum)?));
            values.push((vec![2, -1], -&(&w11m_sq * &(&xp - x_of(&diff)?))));
            // W(−1, 2) = −W(1, −1)^2 (x(Q) − x(Q − P)); x(Q − P) = x(P − Q).
            values.push((vec![-1, 2], -&(&w11m_sq * &(&xq - x_of(&diff)?))));
        }
        let mut net = Self::from_values(k, spec, values)?;
        net.curve = Some(curve.clone());
        net.points = points.to_vec();
        Ok(net)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn curve(&self) -> Option<&Arc<WeierstrassCurve>> {
        self.curve.as_ref()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `W(v)`.
    pub fn value(&self, v: &[i64]) -> Result<FieldElement> {
        if v.len() != self.rank {
            return Err(Error::Precondition(format!(
                "index {v:?} does not have rank {}",
                self.rank
            )));
        }
        if v.iter().all(|c| *c == 0) {
            return Ok(self.spec.zero());
        }
        let (s, c) = canonical(v);
        let w = match self.initial.get(&c) {
            Some(w) => w.clone(),
            None => {
                let cached = self.memo.lock().expect("net memo").get(&c).cloned();
                match cached {
                    Some(w) => w,
                    None => {
                        let w = self.reduce(&c)?;
                        self.memo.lock().expect("net memo").insert(c, w.clone());
                        w
                    }
                }
            }
        };
        Ok(if s < 0 { -&w } else { w })
    }

    /// `W(v)` from the first recurrence instance (in a fixed search order)
    /// whose other eleven indices are all smaller than `v` and whose
    /// coefficient `W(p−q)W(r+s)W(r)` is nonzero.
    fn reduce(&self, v: &[i64]) -> Result<FieldElement> {
        let key = size_key(v);
        let half: Index = v.iter().map(|c| c.div_euclid(2)).collect();
        let offsets = index_box(self.rank, 2);
        let smaller = |w: &Index| w.iter().all(|c| *c == 0) || size_key(w) < key;
        let mut zero_coefficient = false;
        for r in offsets.iter().filter(|r| r.iter().any(|c| *c != 0)) {
            for a in &offsets {
                for b in &offsets {
                    let p = add(&half, a);
                    let q = add(&half, b);
                    let s = sub(&sub(v, &p), &q);
                    let rs = add(r, &s);
                    let others = [
                        sub(&p, &q),
                        rs.clone(),
                        r.clone(),
                        add(&add(&q, r), &s),
                        sub(&q, r),
                        add(&p, &s),
                        p.clone(),
                        add(&add(r, &p), &s),
                        sub(r, &p),
                        add(&q, &s),
                        q.clone(),
                    ];
                    if !others.iter().all(smaller) {
                        continue;
                    }
                    let vals: Vec<FieldElement> =
                        match others.iter().map(|w| self.value(w)).collect() {
                            Ok(vals) => vals,
                            Err(_) => continue,
                        };
                    let coeff = &(&vals[0] * &vals[1]) * &vals[2];
                    if coeff.is_zero() {
                        zero_coefficient = true;
                        continue;
                    }
                    let t2 = &(&(&vals[3] * &vals[4]) * &vals[5]) * &vals[6];
                    let t3 = &(&(&vals[7] * &vals[8]) * &vals[9]) * &vals[10];
                    return (-&(&t2 + &t3)).checked_div(&coeff);
                }
            }
        }
        if zero_coefficient {
            Err(Error::Degenerate(format!(
                "every reduction of W{v:?} divides by zero"
            )))
        } else {
            Err(Error::Precondition(format!(
                "initial data do not determine W{v:?}"
            )))
        }
    }

    /// Number of instances of the general recurrence with `p, q, r, s` in
    /// `[-b, b]^k` that fail.
    pub fn recurrence_defects(&self, b: i64) -> Result<(usize, usize)> {
        recurrence_defects(self.rank, b, |v| self.value(v))
    }
}

/// Checks every instance of the general recurrence with `p, q, r, s` in
/// `[-b, b]^rank`; returns `(instances, failures)`.
pub fn recurrence_defects<F>(rank: usize, b: i64, w: F) -> Result<(usize, usize)>
where
    F: Fn(&[i64]) -> Result<FieldElement>,
{
    let vs = index_box(rank, b);
    let mut cache: HashMap<Index, FieldElement> = HashMap::new();
    let mut get = |v: Index| -> Result<FieldElement> {
        if let Some(x) = cache.get(&v) {
            return Ok(x.clone());
        }
        let x = w(&v)?;
        cache.insert(v, x.clone());
        Ok(x)
    };
    let (mut n, mut bad) = (0, 0);
    for p in &vs {
        for q in &vs {
            for r in &vs {
                for s in &vs {
                    let term = |a: Index,
                                b: Index,
                                c: Index,
                                d: Index,
                                get: &mut dyn FnMut(Index) -> Result<FieldElement>|
                     -> Result<FieldElement> {
                        Ok(&(&get(a)? * &get(b)?) * &(&get(c)? * &get(d)?))
                    };
                    let t1 = term(
                        add(&add(p, q), s),
                        sub(p, q),
                        add(r, s),
                        r.clone(),
                        &mut get,
                    )?;
                    let t2 = term(
                        add(&add(q, r), s),
                        sub(q, r),
                        add(p, s),
                        p.clone(),
                        &mut get,
                    )?;
                    let t3 = term(
                        add(&add(r, p), s),
                        sub(r, p),
                        add(q, s),
                        q.clone(),
                        &mut get,
                    )?;
                    n += 1;
                    if !(&(&t1 + &t2) + &t3).is_zero() {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((n, bad))
}

/// The elliptic divisibility sequence `W(n) = Ψ_n(P)`.
pub fn eds(curve: &Arc<WeierstrassCurve>, p: &Point) -> Result<EllipticNet> {
    EllipticNet::from_points(curve, std::slice::from_ref(p))
}

/// `W(v)` for a net.
pub fn net_values(net: &EllipticNet, v: &[i64]) -> Result<FieldElement> {
    net.value(v)
}

// ---------------------------------------------------------------------------
// Consonant specialization
// ---------------------------------------------------------------------------

/// A cube root in `F_p` or `F_{p^2}` (for small fields by search).
pub fn cube_root(a: &FieldElement) -> Option<FieldElement> {
    if a.is_zero() {
        return Some(a.clone());
    }
    let spec = a.spec();
    let q = spec.order()?;
    if q % 3 == 2 {
        return Some(a.pow((2 * q - 1) / 3));
    }
    if !a.pow((q - 1) / 3).is_one() {
        return None;
    }
    if q > 1 << 22 {
        return None;
    }
    spec.elements()?
        .into_iter()
        .find(|r| &(&r.square() * r) == a)
}

/// Isogeny-indexed values `Ψ_φ(P)` under a scaling with `Ψ̂_i(P) = 1` for
/// `i = 1, 2, 3`.
pub struct ConsonantCollection {
    pub point: Point,
    engine: Engine,
    values: Mutex<HashMap<String, FieldElement>>,
}

impl ConsonantCollection {
    pub fn scaling(&self) -> &DifferentialScaling {
        self.engine.scaling()
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    /// `Ψ_h(P)`; the zero map has value 0.
    pub fn value(&self, h: &HomElement) -> Result<FieldElement> {
        let spec = self.engine.curve().spec();
        if label_is_zero(h) {
            return Ok(spec.zero());
        }
        let key = h.normalized().label();
        if let Some(v) = self.values.lock().expect("consonant values").get(&key) {
            return Ok(v.clone());
        }
        let v = match self.engine.psi_label(h)?.eval(&self.point)? {
            Value::Finite(v) => v,
            Value::Pole => {
                return Err(Error::Degenerate(format!(
                    "Ψ_{h} has a pole at {}",
                    self.point
                )))
            }
        };
        self.values
            .lock()
            .expect("consonant values")
            .insert(key, v.clone());
        Ok(v)
    }

    /// `Ψ̂_i(P)` (equal to 1 by construction).
    pub fn hat_value(&self, i: usize) -> Result<FieldElement> {
        match self.engine.psi_hat_index(i)?.eval(&self.point)? {
            Value::Finite(v) => Ok(v),
            Value::Pole => Err(Error::Degenerate(format!(
                "Ψ̂_{i} has a pole at {}",
                self.point
            ))),
        }
    }
}

/// Solves for differentials with `Ψ̂_i(P) = 1` and the convention holding:
/// `(λ_i a_i)^2 = λ^4 / (x(P) − e_i)` for `i = 1, 2`, `λ_1 λ_2 λ_3 = κ λ^3`,
/// hence `λ^6 = (κ a_1 a_2 a_3 y(P))^2`. Needs a cube root and two square
/// roots in the base field.
pub fn consonant_scaling(
    curve: &Arc<WeierstrassCurve>,
    point: &Point,
    choices: [Option<Isogeny>; 3],
) -> Result<DifferentialScaling> {
    if !curve.contains(point) {
        return Err(Error::Precondition(format!("{point} is not on {curve}")));
    }
    let (x, y) = match point {
        Point::Affine(x, y) if !y.is_zero() => (x, y),
        _ => {
            return Err(Error::Degenerate(format!(
                "{point} lies on the zero locus of the Ψ̂_i"
            )))
        }
    };
    let base = DifferentialScaling::with_g_choices(curve, choices)?;
    let kappa = convention_constant(&base)?;
    let mut leads = Vec::new();
    let mut roots = Vec::new();
    for i in 1..=3 {
        let g = base.g(i)?;
        leads.push(g.lead().clone());
        roots.push(-&g.kernel_polynomial().coeff(0));
    }
    let c = &(&(&kappa * &leads[0]) * &(&leads[1] * &leads[2])) * y;
    let lambda = cube_root(&c).or_else(|| cube_root(&-&c)).ok_or_else(|| {
        Error::ExtensionRequired(format!("±{c} is not a cube in {}", curve.spec()))
    })?;
    let l4 = lambda.square().square();
    let mut s = Vec::new();
    for (i, e) in roots.iter().take(2).enumerate() {
        let d = x - e;
        let r = l4.checked_div(&d)?.sqrt().ok_or_else(|| {
            Error::ExtensionRequired(format!("x(P) − e_{} is not a square", i + 1))
        })?;
        s.push(r);
    }
    let l1 = s[0].checked_div(&leads[0])?;
    let l2 = s[1].checked_div(&leads[1])?;
    let l3 = (&kappa * &(&lambda.square() * &lambda)).checked_div(&(&l1 * &l2))?;
    let scaling = base
        .with_lambda(lambda)
        .with_lambda_g(1, l1)
        .with_lambda_g(2, l2)
        .with_lambda_g(3, l3);
    let conv = kernel_function(&scaling.convention_sum()?, &scaling)?;
    if !conv.value.is_one() {
        return Err(Error::Precondition(format!(
            "consonant scaling breaks the convention: {}",
            conv.value
        )));
    }
    Ok(scaling)
}

/// The consonant collection at `P`; `Ψ̂_i(P) = 1` is checked.
pub fn consonant_specialize(
    curve: &Arc<WeierstrassCurve>,
    point: &Point,
    choices: [Option<Isogeny>; 3],
) -> Result<ConsonantCollection> {
    let scaling = consonant_scaling(curve, point, choices)?;
    let coll = ConsonantCollection {
        point: point.clone(),
        engine: Engine::new(scaling),
        values: Mutex::new(HashMap::new()),
    };
    for i in 1..=3 {
        let h = coll.hat_value(i)?;
        if !h.is_one() {
            return Err(Error::Precondition(format!("Ψ̂_{i}(P) = {h} after solving")));
        }
    }
    Ok(coll)
}

/// Outcome of a recovery check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoverReport {
    pub labels: Vec<String>,
    pub point: String,
    pub field: String,
    /// Indices compared against the rescaled net of the image points.
    pub compared: usize,
    pub mismatches: Vec<String>,
    /// Instances of the general recurrence checked on the consonant values.
    pub recurrence_instances: usize,
    pub recurrence_failures: usize,
    /// `Ψ_{φ_i}(P)` and the cross terms used for the net equivalence.
    pub equivalence: Vec<String>,
    pub equal: bool,
}

/// `Σ v_i φ_i`.
fn label_combination(labels: &[HomElement], v: &[i64]) -> Result<HomElement> {
    let mut acc: Option<HomElement> = None;
    for (h, n) in labels.iter().zip(v) {
        let t = label_scale(h, *n)?;
        acc = Some(match acc {
            None => t,
            Some(a) => label_add(&a, &t)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("no labels".into()))
}

/// Checks that the consonant values `W(v) = Ψ_{Σ v_i φ_i}(P)` form an
/// elliptic net equivalent to the net of `(E′, φ_1(P), …, φ_k(P))`: each
/// `W(v)` must be `c ∏ a_i^{v_i^2} ∏ b_ij^{v_i v_j}` times the net value,
/// with the scalars fitted on `n e_i` (`n ≤ 3`) and `e_i + e_j`. The
/// constant `c` absorbs the choice of differential on `E′`. Indices range over
/// `[-b, b]^k`; the general recurrence is checked on the consonant values
/// with `p, q, r, s ∈ [-1, 1]^k`.
pub fn verify_recover(
    curve: &Arc<WeierstrassCurve>,
    labels: &[HomElement],
    point: &Point,
    choices: [Option<Isogeny>; 3],
    b: i64,
) -> Result<RecoverReport> {
    let k = labels.len();
    let coll = consonant_specialize(curve, point, choices)?;
    let eng = coll.engine();
    let mut images = Vec::new();
    let mut target: Option<Arc<WeierstrassCurve>> = None;
    for h in labels {
        let iso = eng.isogeny(h)?;
        match &target {
            None => target = Some(iso.target().clone()),
            Some(t) if t != iso.target() => {
                return Err(Error::Precondition(
                    "the isogenies need a common target".into(),
                ));
            }
            _ => {}
        }
        images.push(iso.apply(point)?);
    }
    let target = target.ok_or_else(|| Error::Precondition("no labels".into()))?;
    for (i, q) in images.iter().enumerate() {
        if q.is_infinity() || q.y().is_some_and(|y| y.is_zero()) {
            return Err(Error::Degenerate(format!(
                "φ_{}(P) = {q} lies in E′[2]",
                i + 1
            )));
        }
        for q2 in &images[i + 1..] {
            if q.x() == q2.x() {
                return Err(Error::Degenerate("(φ_i ± φ_j)(P) = O".into()));
            }
        }
    }
    let net = EllipticNet::from_points(&target, &images)?;
    let w = |v: &[i64]| -> Result<FieldElement> { coll.value(&label_combination(labels, v)?) };

    let ratio = |v: &[i64]| -> Result<FieldElement> { w(v)?.checked_div(&net.value(v)?) };
    // R(n e_i) = c a_i^{n^2} gives a_i = R(2)^3 / (R(1)^2 R(3)) and c = R(1) / a_i.
    let mut a = Vec::new();
    let mut c: Option<FieldElement> = None;
    for i in 0..k {
        let (r1, r2, r3) = (
            ratio(&unit(k, i, 1))?,
            ratio(&unit(k, i, 2))?,
            ratio(&unit(k, i, 3))?,
        );
        let ai = (&r2.square() * &r2).checked_div(&(&r1.square() * &r3))?;
        if c.is_none() {
            c = Some(r1.checked_div(&ai)?);
        }
        a.push(ai);
    }
    let c = c.expect("rank at least 1");
    let mut bij = HashMap::new();
    for i in 0..k {
        for j in i + 1..k {
            let e = add(&unit(k, i, 1), &unit(k, j, 1));
            bij.insert((i, j), ratio(&e)?.checked_div(&(&c * &(&a[i] * &a[j])))?);
        }
    }
    let factor = |v: &[i64]| -> Result<FieldElement> {
        let mut f = c.clone();
        for i in 0..k {
            f = &f * &a[i].powi(v[i] * v[i])?;
            for j in i + 1..k {
                f = &f * &bij[&(i, j)].powi(v[i] * v[j])?;
            }
        }
        Ok(f)
    };
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for v in index_box(k, b) {
        if v.iter().all(|c| *c == 0) {
            continue;
        }
        let lhs = w(&v)?;
        let rhs = &factor(&v)? * &net.value(&v)?;
        compared += 1;
        if lhs != rhs {
            mismatches.push(format!("{v:?}: {lhs} vs {rhs}"));
        }
    }
    let (instances, failures) = recurrence_defects(k, 1, w)?;
    let mut equivalence = vec![format!("c = {c}")];
    equivalence.extend(
        a.iter()
            .enumerate()
            .map(|(i, x)| format!("a_{} = {x}", i + 1)),
    );
    let mut keys: Vec<_> = bij.keys().copied().collect();
    keys.sort();
    for (i, j) in keys {
        equivalence.push(format!("b_{}{} = {}", i + 1, j + 1, bij[&(i, j)]));
    }
    Ok(RecoverReport {
        labels: labels.iter().map(|h| h.label()).collect(),
        point: point.to_string(),
        field: curve.spec().to_string(),
        compared,
        equal: mismatches.is_empty() && failures == 0,
        mismatches,
        recurrence_instances: instances,
        recurrence_failures: failures,
        equivalence,
    })
}

/// The first affine point (in field-element order) satisfying `accept`.
pub fn find_point<F: Fn(&Point) -> bool>(
    curve: &Arc<WeierstrassCurve>,
    accept: F,
) -> Option<Point> {
    let elems = curve.spec().elements()?;
    for x in &elems {
        let f = curve.f().eval(x);
        if let Some(y) = f.sqrt() {
            for y in [y.clone(), -&y] {
                let p = Point::Affine(x.clone(), y);
                if accept(&p) {
                    return Some(p);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_curve() -> Arc<WeierstrassCurve> {
        let spec = FieldSpec::Rationals;
        Arc::new(
            WeierstrassCurve::new(
                spec,
                spec.zero(),
                spec.from_i64(-1),
                spec.from_ratio(1, 4).unwrap(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn eds_matches_classical_and_x_relation() {
        let e = q_curve();
        let spec = e.spec();
        let p = Point::Affine(spec.zero(), spec.from_ratio(1, 2).unwrap());
        let net = eds(&e, &p).unwrap();
        assert!(net.value(&[0]).unwrap().is_zero());
        for n in 1..=12i64 {
            let direct = classical_psi(&e, n).eval(p.x().unwrap(), p.y().unwrap());
            assert_eq!(net.value(&[n]).unwrap(), direct, "n = {n}");
            assert_eq!(net.value(&[-n]).unwrap(), -&direct);
            let np = e.mul(n, &p).unwrap();
            if n > 1 {
                let rel = (&net.value(&[n + 1]).unwrap() * &net.value(&[n - 1]).unwrap())
                    .checked_div(&net.value(&[n]).unwrap().square())
                    .unwrap();
                assert_eq!(&(p.x().unwrap() - np.x().unwrap()), &rel);
            }
        }
    }

    #[test]
    fn integral_eds_divisibility() {
        let e = Arc::new(WeierstrassCurve::from_i64s(FieldSpec::Rationals, 0, -1, 1).unwrap());
        let spec = e.spec();
        let net = eds(&e, &Point::Affine(spec.one(), spec.one())).unwrap();
        let int = |n: i64| net.value(&[n]).unwrap().as_rational().unwrap().clone();
        for n in 2..=5 {
            for m in 2..=4 {
                let q = int(m * n) / int(n);
                assert!(q.is_integer(), "W({n}) ∤ W({})", m * n);
            }
        }
    }

    #[test]
    fn rank_two_net_from_points() {
        let spec = FieldSpec::prime(97).unwrap();
        let e = Arc::new(WeierstrassCurve::from_i64s(spec, 0, 3, 5).unwrap());
        let p = find_point(&e, |p| !p.y().unwrap().is_zero()).unwrap();
        let q = find_point(&e, |q| q.x() != p.x() && !q.y().unwrap().is_zero()).unwrap();
        let net = EllipticNet::from_points(&e, &[p.clone(), q.clone()]).unwrap();
        assert!(net.value(&[1, 1]).unwrap().is_one());
        // x-relation with w = e_1 across a box.
        for v in index_box(2, 3) {
            let vp = e
                .add(&e.mul(v[0], &p).unwrap(), &e.mul(v[1], &q).unwrap())
                .unwrap();
            let w = net.value(&v).unwrap();
            if vp.is_infinity() || w.is_zero() {
                continue;
            }
            let lhs =
                &net.value(&add(&v, &[1, 0])).unwrap() * &net.value(&sub(&v, &[1, 0])).unwrap();
            let rhs = &w.square() * &(p.x().unwrap() - vp.x().unwrap());
            assert_eq!(lhs, rhs, "{v:?}");
        }
        let (n, bad) = net.recurrence_defects(1).unwrap();
        assert_eq!(bad, 0, "{bad} of {n}");
    }

    #[test]
    fn underdetermined_nets_are_reported() {
        let spec = FieldSpec::Rationals;
        let net = EllipticNet::from_values(1, spec, [(vec![1], spec.one()), (vec![2], spec.one())])
            .unwrap();
        assert!(matches!(net.value(&[5]), Err(Error::Precondition(_))));
        assert!(net.value(&[1]).unwrap().is_one());
    }

    #[test]
    fn cube_roots() {
        let spec = FieldSpec::prime(97).unwrap();
        let a = spec.from_i64(5);
        let c = &(&a.square() * &a);
        let r = cube_root(c).unwrap();
        assert_eq!(&(&r.square() * &r), c);
    }

    fn cm(p: u64) -> Arc<WeierstrassCurve> {
        Arc::new(WeierstrassCurve::from_i64s(FieldSpec::prime(p).unwrap(), 0, -1, 0).unwrap())
    }

    fn cm_choices(e: &Arc<WeierstrassCurve>) -> [Option<Isogeny>; 3] {
        [Some(Isogeny::gaussian(e, 1, 1).unwrap()), None, None]
    }

    fn consonant_point(e: &Arc<WeierstrassCurve>) -> Point {
        find_point(e, |p| {
            (1..=12).all(|n| !e.mul(n, p).unwrap().is_infinity())
                && consonant_scaling(e, p, cm_choices(e)).is_ok()
        })
        .unwrap()
    }

    #[test]
    fn consonant_collection_has_unit_hats() {
        let e = cm(109);
        let p = consonant_point(&e);
        let c = consonant_specialize(&e, &p, cm_choices(&e)).unwrap();
        for i in 1..=3 {
            assert!(c.hat_value(i).unwrap().is_one());
        }
        let zero = Point::Affine(e.spec().zero(), e.spec().zero());
        assert!(matches!(
            consonant_specialize(&e, &zero, cm_choices(&e)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn recovery_rank_one() {
        let e = cm(109);
        let p = consonant_point(&e);
        let r = verify_recover(&e, &[HomElement::Int(2)], &p, cm_choices(&e), 4).unwrap();
        assert!(r.equal, "{r:?}");
        let phi = Isogeny::velu2(&e, &Point::Affine(e.spec().one(), e.spec().zero())).unwrap();
        let phi = HomElement::Explicit(Arc::new(phi), "φ".into());
        let r = verify_recover(&e, &[phi], &p, cm_choices(&e), 4).unwrap();
        assert!(r.equal, "{r:?}");
    }

    #[test]
    fn recovery_rank_two() {
        let e = cm(109);
        let p = consonant_point(&e);
        let r = verify_recover(
            &e,
            &[HomElement::Int(1), HomElement::Gauss(0, 1)],
            &p,
            cm_choices(&e),
            2,
        )
        .unwrap();
        assert!(r.equal, "{r:?}");
    }
}

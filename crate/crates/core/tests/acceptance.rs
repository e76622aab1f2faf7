//! Acceptance checks: one PASS/FAIL line per criterion, with timings.
//! Runs without the test harness so the lines always print.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psiphi::identities::{run_suite, verify_chain, ChainMode, Family};
use psiphi::nets::{consonant_scaling, eds, find_point, verify_recover};
use psiphi::parse::{parse_function, parse_hom};
use psiphi::{
    audit_summary, classical_psi, kernel_function, CurveRationalFunction, Engine, FieldSpec,
    HomElement, Isogeny, Point, Polynomial, WeierstrassCurve,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(n: usize, budget: Duration, f: impl FnOnce() -> Result<Outcome, String>) -> bool {
    let t = Instant::now();
    let outcome = f().unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!("error: {e}"),
    });
    let took = t.elapsed();
    let in_time = took <= budget;
    let pass = outcome.pass && in_time;
    let timing = if in_time {
        format!("{took:.2?}")
    } else {
        format!("{took:.2?}, over the {budget:?} budget")
    };
    println!(
        "criterion {n}: {} — {} [{timing}]",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail
    );
    pass
}

fn gaussian_curve() -> Arc<WeierstrassCurve> {
    Arc::new(WeierstrassCurve::from_i64s(FieldSpec::GaussianRationals, 0, -1, 0).unwrap())
}

fn velu_at_one(e: &Arc<WeierstrassCurve>) -> HomElement {
    let phi = Isogeny::velu2(e, &Point::Affine(e.spec().one(), e.spec().zero())).unwrap();
    HomElement::Explicit(Arc::new(phi), "φ_(1, 0)".into())
}

fn golden_catalog() -> Result<Outcome, String> {
    let e = gaussian_curve();
    let eng = Engine::gaussian(&e).map_err(|x| x.to_string())?;
    let f = |s: &str| parse_function(&e, s).unwrap();
    let h = |s: &str| parse_hom(&e, s).unwrap();
    let phi = velu_at_one(&e);
    let phi_1i = HomElement::Compose(Box::new(phi.clone()), Box::new(HomElement::Gauss(1, 1)));
    let mut checks: Vec<(String, CurveRationalFunction, CurveRationalFunction)> = Vec::new();
    let printed = [
        ("2", "-2*y"),
        ("3", "3*(x^4 - 2*x^2 - 1/3)"),
        (
            "5",
            "5*(x^2 - 2/5*i - 1/5)*(x^2 + 2/5*i - 1/5)*(x^8 - 12*x^6 - 26*x^4 + 52*x^2 + 1)",
        ),
        ("i", "i"),
        ("1+i", "2*i*x"),
        ("1+2i", "(1+2*i)*(x^2 + 2/5*i - 1/5)"),
        ("1-2i", "(1-2*i)*(x^2 - 2/5*i - 1/5)"),
        ("2+i", "(2+i)*(x^2 - 2/5*i - 1/5)"),
        ("2-i", "(2-i)*(x^2 + 2/5*i - 1/5)"),
    ];
    for (label, value) in printed {
        checks.push((
            format!("Ψ_{label}"),
            eng.psi_label(&h(label)).map_err(|x| x.to_string())?,
            f(value),
        ));
    }
    checks.push((
        "Ψ_φ".into(),
        eng.psi_label(&phi).map_err(|x| x.to_string())?,
        f("x - 1"),
    ));
    checks.push((
        "Ψ_φ∘(1+i)".into(),
        eng.psi_label(&phi_1i).map_err(|x| x.to_string())?,
        f("2*i*x*(x - i)"),
    ));
    checks.push((
        "Ψ̂_(1+i)".into(),
        eng.psi_hat_label(&h("1+i")).map_err(|x| x.to_string())?,
        f("2*i*x"),
    ));
    checks.push((
        "Ψ̂_φ∘(1+i)".into(),
        eng.psi_hat_label(&phi_1i).map_err(|x| x.to_string())?,
        f("2*i*x"),
    ));
    let pulled = eng
        .isogeny(&h("1+i"))
        .and_then(|b| b.pullback(&eng.psi_hat_label(&phi)?))
        .map_err(|x| x.to_string())?;
    checks.push((
        "Ψ̂_φ pulled back by 1+i".into(),
        pulled,
        f("(x - i)^2/(2*i*x)"),
    ));

    // Oracles for the values whose printed forms are inconsistent: the
    // duplication recurrence for Ψ_4 and the relation to x for 2+2i.
    let c4 = eng.classical_psi(4);
    let psi4 = CurveRationalFunction::from_parts(
        &e,
        c4.u().clone(),
        c4.v().clone(),
        Polynomial::one(e.spec()),
    )
    .unwrap();
    checks.push((
        "Ψ_4 (recurrence)".into(),
        eng.psi_label(&h("4")).map_err(|x| x.to_string())?,
        psi4,
    ));
    // Relation to x with α = 2+i, β = i (all unbiased, so no Ψ̂ factors):
    // Ψ_{2+2i} Ψ_2 = Ψ_{2+i}^2 Ψ_i^2 (x∘[i] − x∘[2+i]).
    let xr = |l: &str| -> CurveRationalFunction {
        eng.isogeny(&h(l))
            .unwrap()
            .pullback(&CurveRationalFunction::x(&e))
            .unwrap()
    };
    let p = |l: &str| eng.psi_label(&h(l)).unwrap();
    let oracle = p("2+i")
        .powi(2)
        .unwrap()
        .mul(&p("i").powi(2).unwrap())
        .mul(&xr("i").sub(&xr("2+i")))
        .checked_div(&p("2"))
        .unwrap();
    checks.push((
        "Ψ_(2+2i) (relation to x from 2+i, i)".into(),
        p("2+2i"),
        oracle,
    ));
    checks.push((
        "Ψ_(2+2i) (closed form)".into(),
        eng.psi_label(&h("2+2i")).unwrap(),
        f("-(2+2*i)*y*(x^2 + 1)"),
    ));
    checks.push((
        "Ψ_4 (closed form)".into(),
        p("4"),
        f("-4*y*(x^2 + 1)*(x^2 - 2*x - 1)*(x^2 + 2*x - 1)"),
    ));
    checks.push((
        "Ψ_(1-i) (derived)".into(),
        eng.psi_label(&h("1-i")).unwrap(),
        f("2*x"),
    ));

    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(name, got, want)| format!("{name}: got {got}, want {want}"))
        .collect();

    // The printed Ψ_{1−i} = −2ix cannot hold: the biased chain rule for
    // (−i)∘(1+i) forces Ψ_{1−i} = ±2x. Report that comparison explicitly.
    let printed_1mi = eng.psi_label(&h("1-i")).unwrap() == f("-2*i*x");
    let printed_4 =
        eng.psi_label(&h("4")).unwrap() == f("-4*y*(x+i)*(x-i)*(x^2 - 2*x - 1)*(x^2 + 2*x + 1)");
    let printed_22i = eng.psi_label(&h("2+2i")).unwrap() == f("(2+2*i)*y*(x-i)*(x+i)");
    let notes = format!(
        "printed forms of Ψ_(1−i) (−2ix), Ψ_4 and Ψ_(2+2i) reproduce: {printed_1mi}/{printed_4}/{printed_22i}; \
         the derived values (2x, −4y(x²+1)(x²−2x−1)(x²+2x−1), −(2+2i)y(x²+1)) agree with the chain rule and recurrence oracles"
    );
    Ok(Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} exact matches; {notes}", checks.len())
        } else {
            failed.join("; ")
        },
    })
}

fn chain_example() -> Result<Outcome, String> {
    let e = gaussian_curve();
    let eng = Engine::gaussian(&e).map_err(|x| x.to_string())?;
    let r = verify_chain(
        &eng,
        &velu_at_one(&e),
        &HomElement::Gauss(1, 1),
        ChainMode::Biased,
    )
    .map_err(|x| x.to_string())?;
    let target = parse_function(&e, "1/(x - i)^2").unwrap();
    let pass = r.equal && r.lhs == target && r.rhs == target;
    Ok(Outcome {
        pass,
        detail: format!("lhs = {}, rhs = {}", r.lhs, r.rhs),
    })
}

fn randomized_suites() -> Result<Outcome, String> {
    let primes = [13u64, 17, 29];
    let results: Vec<Result<Vec<psiphi::identities::SuiteSummary>, String>> =
        std::thread::scope(|s| {
            let handles: Vec<_> = primes
                .iter()
                .map(|&p| {
                    s.spawn(move || {
                        Family::ALL
                            .iter()
                            .map(|&fam| {
                                run_suite(p, fam, 50, 2024, 3)
                                    .map_err(|e| format!("F_{p} {}: {e}", fam.name()))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
    let mut total = 0;
    let mut equal = 0;
    let mut fallbacks = 0;
    let mut worst: Vec<String> = Vec::new();
    for r in results {
        for s in r? {
            total += s.instances;
            equal += s.equal;
            fallbacks += s.fallbacks;
            if s.instances < 50 || s.equal != s.instances {
                worst.push(format!(
                    "{} over {}: {}/{}",
                    s.family, s.field, s.equal, s.instances
                ));
            }
        }
    }
    Ok(Outcome {
        pass: worst.is_empty(),
        detail: format!(
            "{equal}/{total} equal over F_13, F_17, F_29 (8 identity types × 50 each); F_p² fallbacks: {fallbacks}{}",
            if worst.is_empty() { String::new() } else { format!("; failing: {}", worst.join(", ")) }
        ),
    })
}

fn convention_constraint() -> Result<Outcome, String> {
    let mut curves = vec![gaussian_curve()];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let primes = [101u64, 103, 107, 109, 113, 127, 131];
    while curves.len() < 6 {
        let p = primes[rng.gen_range(0..primes.len())];
        let spec = FieldSpec::prime(p).unwrap();
        let r: Vec<i64> = (0..3).map(|_| rng.gen_range(0..p as i64)).collect();
        if r[0] == r[1] || r[1] == r[2] || r[0] == r[2] {
            continue;
        }
        // (x − r0)(x − r1)(x − r2), expanded.
        let a2 = -(r[0] + r[1] + r[2]);
        let a4 = r[0] * r[1] + r[1] * r[2] + r[0] * r[2];
        let a6 = -r[0] * r[1] * r[2];
        curves.push(Arc::new(
            WeierstrassCurve::from_i64s(spec, a2, a4, a6).map_err(|e| e.to_string())?,
        ));
    }
    let mut bad = Vec::new();
    for c in &curves {
        let eng = if c.has_gaussian_cm() && c.spec() == FieldSpec::GaussianRationals {
            Engine::gaussian(c)
        } else {
            Engine::for_curve(c, [None, None, None])
        }
        .map_err(|e| e.to_string())?;
        let sum = eng.scaling().convention_sum().map_err(|e| e.to_string())?;
        let k = kernel_function(&sum, eng.scaling()).map_err(|e| e.to_string())?;
        if !k.value.is_one() {
            bad.push(format!("{c}: {}", k.value));
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "kernel function of the convention sum is 1 on {} curves",
                curves.len()
            )
        } else {
            bad.join("; ")
        },
    })
}

fn audits() -> Result<Outcome, String> {
    let (n, failures) = audit_summary();
    Ok(Outcome {
        pass: n > 0 && failures.is_empty(),
        detail: format!(
            "{n} Ψ_φ audited (divisor, orders at E[2] and O, lead), {} exceptions",
            failures.len()
        ) + &failures
            .iter()
            .take(3)
            .map(|f| format!("; {f}"))
            .collect::<String>(),
    })
}

fn eds_property() -> Result<Outcome, String> {
    let spec = FieldSpec::Rationals;
    let e = Arc::new(
        WeierstrassCurve::new(
            spec,
            spec.zero(),
            spec.from_i64(-1),
            spec.from_ratio(1, 4).unwrap(),
        )
        .unwrap(),
    );
    let p = Point::Affine(spec.zero(), spec.from_ratio(1, 2).unwrap());
    let net = eds(&e, &p).map_err(|x| x.to_string())?;
    let n_max = 30i64;
    let w: Vec<_> = (0..=n_max).map(|n| net.value(&[n]).unwrap()).collect();
    let wv = |n: i64| {
        if n < 0 {
            -&w[(-n) as usize]
        } else {
            w[n as usize].clone()
        }
    };
    let mut problems = Vec::new();
    if !w[0].is_zero() {
        problems.push("W(0) ≠ 0".to_string());
    }
    for n in 1..=n_max {
        if net.value(&[-n]).unwrap() != -&w[n as usize] {
            problems.push(format!("W(−{n}) ≠ −W({n})"));
        }
    }
    for n in 1..=8 {
        if w[n as usize] != classical_psi(&e, n).eval(p.x().unwrap(), p.y().unwrap()) {
            problems.push(format!("W({n}) differs from Ψ_{n}(P)"));
        }
    }
    // First recurrence: W(m+n)W(m−n)W(r)² + W(n+r)W(n−r)W(m)² + W(r+m)W(r−m)W(n)² = 0
    // for all m, n, r with every index inside [−30, 30].
    let mut instances = 0;
    for m in 0..=n_max {
        for n in 0..=m {
            for r in 0..=n {
                if m + n > n_max {
                    continue;
                }
                instances += 1;
                let t1 = &(&wv(m + n) * &wv(m - n)) * &wv(r).square();
                let t2 = &(&wv(n + r) * &wv(n - r)) * &wv(m).square();
                let t3 = &(&wv(r + m) * &wv(r - m)) * &wv(n).square();
                if !(&(&t1 + &t2) + &t3).is_zero() {
                    problems.push(format!("recurrence fails at ({m}, {n}, {r})"));
                }
            }
        }
    }
    // x(P) − x([n]P) = W(n+1)W(n−1)/W(n)².
    for n in 2..n_max {
        let np = e.mul(n, &p).unwrap();
        let rel = (&wv(n + 1) * &wv(n - 1))
            .checked_div(&wv(n).square())
            .unwrap();
        if (p.x().unwrap() - np.x().unwrap()) != rel {
            problems.push(format!("x-relation fails at n = {n}"));
        }
    }
    Ok(Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("W(0..=30) on y² = x³ − x + 1/4 at (0, 1/2): {instances} recurrence instances, 28 x-relations, oddness")
        } else {
            problems.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    })
}

fn recovery() -> Result<Outcome, String> {
    let e =
        Arc::new(WeierstrassCurve::from_i64s(FieldSpec::prime(109).unwrap(), 0, -1, 0).unwrap());
    let choices = || [Some(Isogeny::gaussian(&e, 1, 1).unwrap()), None, None];
    let p = find_point(&e, |p| {
        (1..=12).all(|n| !e.mul(n, p).unwrap().is_infinity())
            && consonant_scaling(&e, p, choices()).is_ok()
    })
    .ok_or("no consonant point over F_109")?;
    let phi = Isogeny::velu2(&e, &Point::Affine(e.spec().one(), e.spec().zero())).unwrap();
    let phi = HomElement::Explicit(Arc::new(phi), "φ_(1, 0)".into());
    let cases: Vec<(Vec<HomElement>, i64)> = vec![
        (vec![HomElement::Int(2)], 6),
        (vec![phi], 6),
        (vec![HomElement::Int(1), HomElement::Gauss(0, 1)], 3),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (labels, b) in cases {
        let r = verify_recover(&e, &labels, &p, choices(), b).map_err(|x| x.to_string())?;
        pass &= r.equal;
        parts.push(format!(
            "[{}]: {} indices matched{}, recurrence {}/{} without Ψ̂ factors",
            r.labels.join(", "),
            r.compared - r.mismatches.len(),
            if r.mismatches.is_empty() {
                String::new()
            } else {
                format!(" ({} mismatched)", r.mismatches.len())
            },
            r.recurrence_instances - r.recurrence_failures,
            r.recurrence_instances
        ));
    }
    Ok(Outcome {
        pass,
        detail: format!("F_109, P = {p}; {}", parts.join("; ")),
    })
}

fn main() -> ExitCode {
    let suite = Instant::now();
    let mut ok = true;
    ok &= run(1, Duration::from_secs(2), golden_catalog);
    ok &= run(2, Duration::from_secs(1), chain_example);
    ok &= run(3, Duration::from_secs(30), randomized_suites);
    ok &= run(4, Duration::from_secs(2), convention_constraint);
    ok &= run(6, Duration::from_secs(10), eds_property);
    ok &= run(7, Duration::from_secs(10), recovery);
    // Last, so that it covers every Ψ_φ computed above.
    ok &= run(5, Duration::from_secs(1), audits);
    println!(
        "acceptance: {} in {:.2?}",
        if ok { "all criteria pass" } else { "FAILED" },
        suite.elapsed()
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

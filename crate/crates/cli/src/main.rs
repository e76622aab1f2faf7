use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use psiphi::identities::{self, ChainMode, Family, IdentityReport};
use psiphi::nets::{self, EllipticNet};
use psiphi::parse::{
    parse_curve, parse_field, parse_function, parse_hom, parse_hom_list, parse_point,
};
use psiphi::{Engine, Error, HomElement, Isogeny, Point, WeierstrassCurve};

/// Exact division polynomials for isogenies of elliptic curves.
#[derive(Parser, Debug)]
#[command(name = "psiphi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Field used when the curve literal does not name one (Q, Q(i), F_p, F_p^2).
    #[arg(long, global = true)]
    field: Option<String>,

    /// Curve literal, e.g. "E/Q(i):[0,-1,0]" for y^2 = x^3 - x over Q(i).
    #[arg(long, global = true, default_value = "E/Q(i):[0,-1,0]")]
    curve: String,

    /// Degree-2 isogeny g_1 with kernel {O, (e_1, 0)} (defaults to Vélu).
    #[arg(long, global = true)]
    g1: Option<String>,

    /// Degree-2 isogeny g_2 with kernel {O, (e_2, 0)}.
    #[arg(long, global = true)]
    g2: Option<String>,

    /// Degree-2 isogeny g_3 with kernel {O, (e_3, 0)}.
    #[arg(long, global = true)]
    g3: Option<String>,

    /// Emit JSON lines.
    #[arg(long, global = true)]
    json: bool,

    /// Emit labelled, human-readable output.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,

    /// Number of series terms for expansions.
    #[arg(long, global = true, default_value_t = 16)]
    precision: usize,

    /// Retry over the quadratic extension when a computation needs one.
    #[arg(long, global = true)]
    extension_ok: bool,

    /// Seed for randomized verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The classical division polynomial Ψ_n.
    Psi {
        #[arg(short, long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Ψ_φ for an isogeny label ("3", "1+i", "velu(1)", "velu(1)∘(1+i)").
    PsiIso {
        #[arg(long)]
        iso: String,
    },
    /// Ψ̂_φ for an isogeny label.
    PsiHat {
        #[arg(long)]
        iso: String,
    },
    /// The monic kernel polynomial of an isogeny label.
    KernelPoly {
        #[arg(long)]
        iso: String,
    },
    /// The 2-isogeny with kernel {O, P} and its target curve.
    Velu {
        #[arg(long)]
        point: String,
    },
    /// Checks an identity: chain, chain-biased, second-chain, rel-x, rec1,
    /// rel-x2, rec2, pullback, or a randomized `suite`.
    Verify {
        identity: String,
        /// Comma-separated labels, in the order the identity takes them.
        #[arg(long)]
        iso: Option<String>,
        /// Exponent map for second-chain, e.g. "1+i:1,1-i:1,1:-2,i:-2".
        #[arg(long)]
        exponents: Option<String>,
        /// Inner isogeny for second-chain.
        #[arg(long)]
        beta: Option<String>,
        /// Primes for the randomized suite.
        #[arg(long, default_value = "13,17,29")]
        primes: String,
        /// Instances per identity type and prime.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Bound on |a|, |b| for random labels a+bi.
        #[arg(long, default_value_t = 3)]
        bound: i64,
        /// Identity families for the suite (default: all).
        #[arg(long)]
        families: Option<String>,
    },
    /// The elliptic divisibility sequence W(n) = Ψ_n(P), n = 0..=terms.
    Eds {
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 10)]
        terms: i64,
    },
    /// The rank-2 elliptic net of two points on [-bound, bound]^2.
    Net {
        /// Two points separated by ';', e.g. "(0,1);(2,3)".
        #[arg(long)]
        points: String,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Laurent expansion at O in T = -x/y.
    Expand {
        #[arg(long)]
        function: String,
    },
}

/// Failures that map to exit code 2; `needs_extension` marks errors that
/// `--extension-ok` may retry over the quadratic extension.
struct Failure {
    msg: String,
    needs_extension: bool,
}

impl Failure {
    fn msg(msg: impl Into<String>) -> Self {
        Failure {
            msg: msg.into(),
            needs_extension: false,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let needs_extension = matches!(e, Error::ExtensionRequired(_));
        Failure {
            msg: e.to_string(),
            needs_extension,
        }
    }
}

/// What a command produced: JSON records and their plain-text rendering.
struct Output {
    records: Vec<Value>,
    plain: Vec<String>,
    pretty: Vec<String>,
    verified: bool,
}

impl Output {
    fn single(record: Value, plain: String, pretty: String) -> Self {
        Output {
            records: vec![record],
            plain: vec![plain],
            pretty: vec![pretty],
            verified: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let lines = if cli.json {
                out.records.iter().map(|r| r.to_string()).collect()
            } else if cli.pretty {
                out.pretty
            } else {
                out.plain
            };
            for line in lines {
                println!("{line}");
            }
            if !out.verified && !cli.json {
                for r in &out.records {
                    eprintln!("{r}");
                }
            }
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure { msg, .. }) => {
            if cli.json {
                println!("{}", json!({ "error": msg }));
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let default_field = cli.field.as_deref().map(parse_field).transpose()?;
    let curve = Arc::new(parse_curve(&cli.curve, default_field)?);
    match execute(cli, &curve) {
        Err(Failure {
            msg,
            needs_extension: true,
        }) if cli.extension_ok => {
            let ext = curve.spec().quadratic_extension().ok_or_else(|| {
                Failure::msg(format!(
                    "{msg}; no quadratic extension of {} is available",
                    curve.spec()
                ))
            })?;
            execute(cli, &Arc::new(curve.base_change(ext)?))
        }
        other => other,
    }
}

fn engine(cli: &Cli, curve: &Arc<WeierstrassCurve>) -> Result<Engine, Failure> {
    let mut choices: [Option<Isogeny>; 3] = [None, None, None];
    for (slot, label) in choices.iter_mut().zip([&cli.g1, &cli.g2, &cli.g3]) {
        if let Some(l) = label {
            *slot = Some(parse_hom(curve, l)?.to_isogeny(curve)?);
        }
    }
    Ok(Engine::for_curve(curve, choices)?)
}

fn base_record(command: &str, curve: &WeierstrassCurve) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("field".into(), json!(curve.spec().to_string()));
    m.insert("curve".into(), json!(curve.to_string()));
    m
}

fn function_output(command: &str, curve: &WeierstrassCurve, name: &str, value: String) -> Output {
    let mut m = base_record(command, curve);
    m.insert("input".into(), json!(name));
    m.insert("value".into(), json!(value));
    Output::single(Value::Object(m), value.clone(), format!("{name} = {value}"))
}

fn execute(cli: &Cli, curve: &Arc<WeierstrassCurve>) -> Result<Output, Failure> {
    match &cli.command {
        Command::Psi { n } => {
            let eng = engine(cli, curve)?;
            let v = eng.psi_label(&HomElement::Int(*n))?;
            Ok(function_output(
                "psi",
                curve,
                &format!("Ψ_{n}"),
                v.to_string(),
            ))
        }
        Command::PsiIso { iso } => {
            let eng = engine(cli, curve)?;
            let h = parse_hom(curve, iso)?;
            let v = eng.psi_label(&h)?;
            Ok(function_output(
                "psi-iso",
                curve,
                &format!("Ψ_{}", h.label()),
                v.to_string(),
            ))
        }
        Command::PsiHat { iso } => {
            let eng = engine(cli, curve)?;
            let h = parse_hom(curve, iso)?;
            let v = eng.psi_hat_label(&h)?;
            Ok(function_output(
                "psi-hat",
                curve,
                &format!("Ψ̂_{}", h.label()),
                v.to_string(),
            ))
        }
        Command::KernelPoly { iso } => {
            let eng = engine(cli, curve)?;
            let h = parse_hom(curve, iso)?;
            let k = eng.isogeny(&h)?.kernel_polynomial();
            Ok(function_output(
                "kernel-poly",
                curve,
                &format!("K_{}", h.label()),
                k.to_string(),
            ))
        }
        Command::Velu { point } => {
            let p = parse_point(curve.spec(), point)?;
            let phi = Isogeny::velu2(curve, &p)?;
            let mut m = base_record("velu", curve);
            m.insert("point".into(), json!(p.to_string()));
            m.insert("target".into(), json!(phi.target().to_string()));
            m.insert("xmap".into(), json!(phi.xmap().to_string()));
            m.insert("ymap".into(), json!(phi.ymap().to_string()));
            let plain = vec![
                phi.target().to_string(),
                phi.xmap().to_string(),
                phi.ymap().to_string(),
            ];
            let pretty = vec![
                format!("target: {}", phi.target()),
                format!("x ↦ {}", phi.xmap()),
                format!("y ↦ y·({})", phi.ymap()),
            ];
            Ok(Output {
                records: vec![Value::Object(m)],
                plain,
                pretty,
                verified: true,
            })
        }
        Command::Verify {
            identity,
            iso,
            exponents,
            beta,
            primes,
            count,
            bound,
            families,
        } => {
            if identity == "suite" {
                return suite(cli, primes, *count, *bound, families.as_deref());
            }
            let eng = engine(cli, curve)?;
            let labels = match iso {
                Some(s) => parse_hom_list(curve, s)?,
                None => Vec::new(),
            };
            let need = |n: usize| -> Result<&[HomElement], Failure> {
                if labels.len() == n {
                    Ok(&labels)
                } else {
                    Err(Failure::msg(format!(
                        "{identity} takes {n} labels in --iso, got {}",
                        labels.len()
                    )))
                }
            };
            let report = match identity.as_str() {
                "chain" => {
                    let l = need(2)?;
                    identities::verify_chain(&eng, &l[0], &l[1], ChainMode::Unbiased)?
                }
                "chain-biased" => {
                    let l = need(2)?;
                    identities::verify_chain(&eng, &l[0], &l[1], ChainMode::Biased)?
                }
                "rel-x" => {
                    let l = need(2)?;
                    identities::verify_rel_x(&eng, &l[0], &l[1])?
                }
                "rec1" => {
                    let l = need(3)?;
                    identities::verify_rec1(&eng, &l[0], &l[1], &l[2])?
                }
                "rel-x2" => {
                    let l = need(3)?;
                    identities::verify_rel_x2(&eng, &l[0], &l[1], &l[2])?
                }
                "rec2" => {
                    let l = need(4)?;
                    identities::verify_rec2(&eng, &l[0], &l[1], &l[2], &l[3])?
                }
                "second-chain" => {
                    let e = parse_exponents(curve, exponents.as_deref().unwrap_or(""))?;
                    let b = parse_hom(
                        curve,
                        beta.as_deref()
                            .ok_or_else(|| Failure::msg("second-chain needs --beta"))?,
                    )?;
                    identities::verify_second_chain(&eng, &e, &b)?
                }
                "pullback" => {
                    let l = need(2)?;
                    let s = identities::psi_symbol_sum(&eng, &l[0])?;
                    identities::verify_pullback_lemma(&eng, &s, &l[1])?
                }
                other => return Err(Failure::msg(format!("unknown identity {other:?}"))),
            };
            Ok(report_output(&report))
        }
        Command::Eds { point, terms } => {
            let p = parse_point(curve.spec(), point)?;
            let net = nets::eds(curve, &p)?;
            let rows: Vec<(String, String)> = (0..=*terms)
                .map(|n| Ok((n.to_string(), net.value(&[n])?.to_string())))
                .collect::<Result<_, Error>>()?;
            Ok(table("eds", curve, rows))
        }
        Command::Net { points, bound } => {
            let pts: Vec<Point> = points
                .split(';')
                .map(|s| parse_point(curve.spec(), s))
                .collect::<Result<_, Error>>()?;
            let net = EllipticNet::from_points(curve, &pts)?;
            let rows: Vec<(String, String)> = nets::index_box(net.rank(), *bound)
                .into_iter()
                .map(|v| {
                    let key = v
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    Ok((key, net.value(&v)?.to_string()))
                })
                .collect::<Result<_, Error>>()?;
            Ok(table("net", curve, rows))
        }
        Command::Expand { function } => {
            let f = parse_function(curve, function)?;
            let s = f.expand_at_o(cli.precision)?;
            Ok(function_output(
                "expand",
                curve,
                &f.to_string(),
                s.to_string(),
            ))
        }
    }
}

fn parse_exponents(
    curve: &Arc<WeierstrassCurve>,
    s: &str,
) -> Result<Vec<(HomElement, i64)>, Failure> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (label, e) = item
            .rsplit_once(':')
            .ok_or_else(|| Failure::msg(format!("exponent entry {item:?} is not label:e")))?;
        let e: i64 = e
            .trim()
            .parse()
            .map_err(|_| Failure::msg(format!("bad exponent in {item:?}")))?;
        out.push((parse_hom(curve, label)?, e));
    }
    Ok(out)
}

fn report_output(r: &IdentityReport) -> Output {
    let rec = r.record();
    let verdict = if r.equal { "equal" } else { "NOT equal" };
    let plain = format!("{} {}: {verdict}", rec.name, rec.inputs.join(" "));
    let pretty = vec![
        format!("{} ({})", rec.name, rec.inputs.join(", ")),
        format!("  field: {}", rec.field),
        format!("  lhs:   {}", rec.lhs),
        format!("  rhs:   {}", rec.rhs),
        format!("  {verdict}"),
    ];
    Output {
        records: vec![serde_json::to_value(&rec).expect("report serializes")],
        plain: vec![plain],
        pretty,
        verified: r.equal,
    }
}

fn suite(
    cli: &Cli,
    primes: &str,
    count: usize,
    bound: i64,
    families: Option<&str>,
) -> Result<Output, Failure> {
    let fams: Vec<Family> = match families {
        None => Family::ALL.to_vec(),
        Some(s) => s
            .split(',')
            .map(|n| {
                Family::from_name(n.trim())
                    .ok_or_else(|| Failure::msg(format!("unknown identity family {n:?}")))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut out = Output {
        records: Vec::new(),
        plain: Vec::new(),
        pretty: Vec::new(),
        verified: true,
    };
    for p in primes.split(',') {
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Failure::msg(format!("bad prime {p:?}")))?;
        for fam in &fams {
            let s = identities::run_suite(p, *fam, count, cli.seed, bound)?;
            let ok = s.equal == s.instances;
            out.verified &= ok;
            out.plain.push(format!(
                "{}\t{}\t{}/{}\tfallbacks {}",
                s.field, s.family, s.equal, s.instances, s.fallbacks
            ));
            out.pretty.push(format!(
                "{} over {}: {} of {} equal ({} skipped as degenerate, {} over the quadratic extension)",
                s.family, s.field, s.equal, s.instances, s.skipped, s.fallbacks
            ));
            out.records
                .push(serde_json::to_value(&s).expect("summary serializes"));
        }
    }
    Ok(out)
}

fn table(command: &str, curve: &WeierstrassCurve, rows: Vec<(String, String)>) -> Output {
    let records = rows
        .iter()
        .map(|(k, v)| {
            let mut m = base_record(command, curve);
            m.insert("index".into(), json!(k));
            m.insert("value".into(), json!(v));
            Value::Object(m)
        })
        .collect();
    let plain = rows.iter().map(|(k, v)| format!("{k}\t{v}")).collect();
    let pretty = rows.iter().map(|(k, v)| format!("W({k}) = {v}")).collect();
    Output {
        records,
        plain,
        pretty,
        verified: true,
    }
}

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::Arc;

use psiphi::parse::{parse_curve, parse_function};

fn psiphi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psiphi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn psi_three() {
    let o = psiphi(&["psi", "--curve", "E/Q(i):[0,-1,0]", "-n", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "3*x^4 - 6*x^2 - 1");
}

#[test]
fn psi_iso_with_g1() {
    let o = psiphi(&[
        "psi-iso",
        "--curve",
        "E/Q(i):[0,-1,0]",
        "--iso",
        "1+i",
        "--g1",
        "1+i",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2i*x");
}

#[test]
fn verify_rec1_exits_zero() {
    let o = psiphi(&[
        "verify",
        "rec1",
        "--curve",
        "E/Q(i):[0,-1,0]",
        "--iso",
        "1+i,i,1",
        "--g1",
        "1+i",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("equal"));
}

#[test]
fn golden_outputs() {
    let cases: [(&[&str], &str); 5] = [
        (&["psi", "-n", "5"], "psi5.txt"),
        (
            &["psi-iso", "--iso", "velu(1)∘(1+i)", "--g1", "1+i"],
            "psi_velu_gauss.txt",
        ),
        (
            &[
                "eds",
                "--curve",
                "E/Q:[0,-1,1/4]",
                "--point",
                "(0,1/2)",
                "--terms",
                "12",
            ],
            "eds_q.tsv",
        ),
        (&["velu", "--point", "(1,0)"], "velu_1.txt"),
        (
            &[
                "verify", "suite", "--primes", "13", "--count", "4", "--seed", "11", "--json",
            ],
            "suite_f13_seed11.jsonl",
        ),
    ];
    for (args, file) in cases {
        let o = psiphi(args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o), golden(file), "{args:?}");
    }
}

#[test]
fn printed_functions_round_trip() {
    let curve = Arc::new(parse_curve("E/Q(i):[0,-1,0]", None).unwrap());
    for args in [
        vec!["psi", "-n", "4"],
        vec!["psi-iso", "--iso", "2+2i", "--g1", "1+i"],
        vec!["psi-hat", "--iso", "velu(1)", "--g1", "1+i"],
        vec!["psi-iso", "--iso", "1-2i"],
    ] {
        let text = stdout(&psiphi(&args));
        let f = parse_function(&curve, text.trim()).unwrap();
        assert_eq!(f.to_string(), text.trim(), "{args:?}");
    }
}

#[test]
fn json_lines_and_pretty() {
    let o = psiphi(&["psi", "-n", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"], "-2*y");
    assert_eq!(v["field"], "Q(i)");
    let o = psiphi(&["psi", "-n", "2", "--pretty"]);
    assert_eq!(stdout(&o).trim(), "Ψ_2 = -2*y");
}

#[test]
fn seeds_reproduce() {
    let args = [
        "verify",
        "suite",
        "--primes",
        "17",
        "--count",
        "3",
        "--families",
        "rel-x,rec1",
        "--json",
    ];
    let a = stdout(&psiphi(&[&args[..], &["--seed", "3"]].concat()));
    let b = stdout(&psiphi(&[&args[..], &["--seed", "3"]].concat()));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 2);
}

#[test]
fn usage_and_domain_errors_exit_two() {
    assert_eq!(psiphi(&["psi"]).status.code(), Some(2));
    assert_eq!(
        psiphi(&["psi", "-n", "2", "--curve", "nonsense"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        psiphi(&["verify", "rel-x", "--iso", "1,1"]).status.code(),
        Some(2)
    );
    assert_eq!(psiphi(&["velu", "--point", "(2,0)"]).status.code(), Some(2));
}

#[test]
fn nets_and_expansions() {
    let o = psiphi(&[
        "net",
        "--curve",
        "E/F_97:[0,3,5]",
        "--points",
        "(1,3);(4,9)",
        "--bound",
        "1",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("1,1\t1\n"));
    assert!(out.contains("0,0\t0\n"));
    let o = psiphi(&["expand", "--function", "x", "--precision", "4"]);
    assert_eq!(stdout(&o).trim(), "T^-2 + O(T^2)");
}

#[test]
fn extension_retry() {
    // y^2 = x^3 + x over F_7 has only one rational 2-torsion point, so
    // explicit g choices need the quadratic extension.
    let args = [
        "psi-hat",
        "--curve",
        "E/Fp:7:[0,1,0]",
        "--iso",
        "2",
        "--g1",
        "velu(0)",
        "--json",
    ];
    let plain = psiphi(&args);
    assert_eq!(plain.status.code(), Some(2));
    assert!(stdout(&plain).contains("extension required"));
    let ext = psiphi(&[&args[..], &["--extension-ok"]].concat());
    assert!(ext.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&ext).trim()).unwrap();
    assert_eq!(v["field"], "Fp2:7");
}

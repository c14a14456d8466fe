use std::fs;
use std::process::{Command, Output};

use iitaka_cli::report::{Report, Status};
use regex::Regex;
use serde_json::Value;

fn iitaka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iitaka"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Report, String) {
    let out = iitaka(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Report =
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    (out.status.code().unwrap(), report, text)
}

fn without_timing(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

/// Any decimal point or exponent between digits.
fn float_token() -> Regex {
    Regex::new(r"[0-9]\.[0-9]|[0-9][eE][+-]?[0-9]").unwrap()
}

#[test]
fn exit_codes_follow_status() {
    let cases: [(&[&str], i32); 7] = [
        (&["search", "--fiber", "enriques", "--lambda-gt", "20"], 0),
        (
            &[
                "verify-basket",
                "--basket",
                "2,1x8;3,1x6;7,1;7,2;7,3",
                "--chi",
                "2",
                "--chi-f",
                "2",
            ],
            0,
        ),
        (
            &[
                "verify-basket",
                "--basket",
                "2,1",
                "--chi",
                "1",
                "--chi-f",
                "1",
            ],
            1,
        ),
        (
            &[
                "verify-basket",
                "--basket",
                "4,2",
                "--chi",
                "1",
                "--chi-f",
                "1",
            ],
            2,
        ),
        (&["min-dega", "--fiber", "abelian"], 0),
        (&["min-dega", "--hurwitz"], 0),
        (&["bounds", "--fiber", "non-rational-base"], 0),
    ];
    for (args, code) in cases {
        let (exit, report, _) = report(args);
        assert_eq!(exit, code, "{args:?}");
        assert_eq!(report.status.exit_code(), code, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 8] = [
        &["bounds", "--fiber", "unknown"],
        &["search", "--fiber", "k3"],
        &[
            "search",
            "--fiber",
            "k3",
            "--lambda-gt",
            "42",
            "--lambda-ge",
            "42",
        ],
        &["search", "--fiber", "k3", "--lambda-gt", "0.5"],
        &["min-dega"],
        &[
            "verify-basket",
            "--basket",
            "2,1x0",
            "--chi",
            "1",
            "--chi-f",
            "1",
        ],
        &[
            "verify-basket",
            "--basket",
            "2,1",
            "--chi",
            "1",
            "--chi-f",
            "3",
        ],
        &[
            "oracle",
            "--chi-f",
            "2",
            "--chi",
            "1",
            "--lambda-gt",
            "4",
            "--r-cap",
            "13",
        ],
    ];
    for args in cases {
        let out = iitaka(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_reports_extremal_basket() {
    let (_, r, _) = report(&[
        "verify-basket",
        "--basket",
        "7,3; 7,2; 7,1; 3,1x6; 2,1x8",
        "--chi",
        "2",
        "--chi-f",
        "2",
    ]);
    assert_eq!(r.status, Status::Reproduced);
    let res = &r.results;
    assert_eq!(res["basket"], "2,1x8;3,1x6;7,1;7,2;7,3");
    assert_eq!(res["sigma"], "340/7");
    assert_eq!(res["k_dot_c2"], "4/7");
    assert_eq!(res["lambda"], "42");
    assert_eq!(res["e3"], true);
    assert_eq!(res["horizon"], 43);
    assert_eq!(res["table"].as_array().unwrap().len(), 43);
    assert_eq!(res["table"][1]["chi_mk"], "0");
}

#[test]
fn reflected_residue_gives_same_report() {
    let (_, a, _) = report(&[
        "verify-basket",
        "--basket",
        "5,2;3,1x9",
        "--chi",
        "1",
        "--chi-f",
        "1",
    ]);
    let (_, b, _) = report(&[
        "verify-basket",
        "--basket",
        "5,3;3,2x9",
        "--chi",
        "1",
        "--chi-f",
        "1",
    ]);
    assert_eq!(a.results, b.results);
}

#[test]
fn json_round_trips_and_has_no_floats() {
    let runs: [&[&str]; 5] = [
        &["search", "--fiber", "k3", "--lambda-ge", "42", "--chi", "2"],
        &[
            "verify-basket",
            "--basket",
            "2,1x3;5,2",
            "--chi",
            "0",
            "--chi-f",
            "2",
        ],
        &["min-dega", "--fiber", "bielliptic"],
        &["min-dega", "--hurwitz", "--order-cap", "100"],
        &[
            "oracle",
            "--chi-f",
            "1",
            "--chi",
            "0",
            "--lambda-ge",
            "2",
            "--r-cap",
            "7",
            "--count-cap",
            "4",
        ],
    ];
    let floats = float_token();
    for args in runs {
        let (_, r, text) = report(args);
        assert_ne!(r.status, Status::Error, "{args:?}");
        assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", text);
        assert!(!floats.is_match(&text), "{args:?}");
        for fmt in ["csv", "md"] {
            let mut with_fmt = args.to_vec();
            with_fmt.extend(["--emit", fmt]);
            let out = String::from_utf8(iitaka(&with_fmt).stdout).unwrap();
            assert!(!out.is_empty());
            assert!(!floats.is_match(&out), "{with_fmt:?}");
        }
    }
}

#[test]
fn identical_runs_are_byte_identical_apart_from_timing() {
    let args = ["search", "--fiber", "enriques", "--lambda-ge", "16"];
    let (_, first, a) = report(&args);
    assert!(first.results["count"].as_u64().unwrap() > 0);
    let (_, _, b) = report(&args);
    let mut parallel = args.to_vec();
    parallel.extend(["--jobs", "4"]);
    let (_, _, c) = report(&parallel);
    assert_eq!(without_timing(&a), without_timing(&b));
    assert_eq!(without_timing(&a), without_timing(&c));
    let strip = Regex::new(r#""timing_ms": \d+"#).unwrap();
    assert_eq!(strip.replace(&a, ""), strip.replace(&c, ""));
}

#[test]
fn cache_hits_are_reverified() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "search",
        "--fiber",
        "k3",
        "--lambda-ge",
        "30",
        "--chi",
        "2",
        "--cache",
        cache,
    ];
    let (_, _, fresh) = report(&args);
    let files: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(files.len(), 1);
    let (_, _, hit) = report(&args);
    assert_eq!(without_timing(&fresh), without_timing(&hit));

    // A planted basket outside the window fails the re-check and is discarded.
    let mut entry: Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    entry["baskets"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({ "basket": "2,1", "chi": 2 }));
    fs::write(&files[0], entry.to_string()).unwrap();
    let out = iitaka(&args);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ignoring cache entry"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(without_timing(&fresh), without_timing(&text));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.md");
    let out = iitaka(&[
        "min-dega",
        "--hurwitz",
        "--emit",
        "md",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains("| delta | 1/42 | 1/42 | true |"));
}

#[test]
fn csv_has_key_value_rows() {
    let out = iitaka(&["min-dega", "--fiber", "abelian", "--emit", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<(String, String)> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert!(rows.contains(&("status".into(), "reproduced".into())));
    assert!(rows.contains(&("results.overall".into(), "1/360".into())));
}

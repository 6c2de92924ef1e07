// Copyright 2026 The urnvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use urnvote::condorcet::{CoeffEntry, CoeffTable, ScanRow};
use urnvote::experiment::{EfficiencyRow, ScalingRow};
use urnvote::io::{from_csv, matrix_from_csv, to_csv, StatsReport};
use urnvote::plurality::PluralityScheme;
use urnvote::scalar::parse_rational;
use urnvote::{BichromaticInstance, Rational, Scalar};

fn urnvote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urnvote"))
        .args(args)
        .env_remove("URNVOTE_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = urnvote(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn rationals(v: &Value) -> Vec<Rational> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| parse_rational(x.as_str().unwrap()).unwrap())
        .collect()
}

fn five_urns(dir: &Path) -> PathBuf {
    write(dir, "i5.json", r#"{"lower_bound": {"n": 5, "eps": "1/5"}}"#)
}

#[test]
fn scheme_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "i.json", r#"{"probs": ["1/10", "2/5", 0.75]}"#);
    let out = dir.path().join("scheme.json");
    ok(&[
        "scheme",
        "plurality",
        "--instance",
        s(&inst),
        "--out",
        s(&out),
    ]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    let lib = BichromaticInstance::new(vec![q(1, 10), q(2, 5), q(3, 4)]).unwrap();
    let scheme = PluralityScheme::build(&lib).unwrap();
    assert_eq!(rationals(&doc["probs"]), lib.probs());
    assert_eq!(rationals(&doc["blue_votes"]), scheme.blue_votes);
    assert_eq!(rationals(&doc["red_votes"]), scheme.red_votes);
    assert_eq!(
        parse_rational(doc["M"].as_str().unwrap()).unwrap(),
        scheme.m_norm
    );
    // The alias spelling reads the same file.
    let via_alias = ok(&["scheme", "plurality", "--probs", s(&inst)]);
    assert_eq!(via_alias, std::fs::read_to_string(&out).unwrap());
}

#[test]
fn kernel_csv_and_json_round_trip() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        dir.path(),
        "i.json",
        r#"{"probs": ["1/5", "2/5", "3/5", "4/5"]}"#,
    );
    let lib = BichromaticInstance::new(vec![q(1, 5), q(2, 5), q(3, 5), q(4, 5)]).unwrap();
    let expected = PluralityScheme::build(&lib).unwrap().kernel(&lib);
    let csv = ok(&["kernel", "--system", "plurality", "--instance", s(&inst)]);
    assert!(csv.starts_with("urn,1,2,3,4\n"));
    let parsed: Vec<Vec<Rational>> = matrix_from_csv(&csv)
        .unwrap()
        .iter()
        .map(|r| r.iter().map(|x| parse_rational(x).unwrap()).collect())
        .collect();
    assert_eq!(parsed, expected);
    let json = ok(&[
        "kernel",
        "--system",
        "plurality",
        "--instance",
        s(&inst),
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_str(&json).unwrap();
    let rows: Vec<Vec<Rational>> = doc["kernel"]
        .as_array()
        .unwrap()
        .iter()
        .map(rationals)
        .collect();
    assert_eq!(rows, expected);
}

#[test]
fn multicolor_kernel_rows_are_distributions() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        dir.path(),
        "rows.json",
        r#"{"rows": [["1/2", "1/4", "1/4"], ["1/4", "1/2", "1/4"], ["1/4", "1/4", "1/2"]]}"#,
    );
    let csv = ok(&["kernel", "--system", "multicolor", "--instance", s(&inst)]);
    for row in matrix_from_csv(&csv).unwrap() {
        let total = row
            .iter()
            .map(|x| parse_rational(x).unwrap())
            .fold(q(0, 1), |a, b| a + b);
        assert_eq!(total, q(1, 1));
    }
}

#[test]
fn coeff_tables_round_trip() {
    let csv = ok(&["coeffs", "--max-k", "5", "--max-l", "5"]);
    let entries: Vec<CoeffEntry> = from_csv(&csv).unwrap();
    assert_eq!(
        entries,
        CoeffTable::<Rational>::with_extent(5, 5).entries(5, 5)
    );
    assert_eq!(to_csv(&entries).unwrap(), csv);
    let json = ok(&["coeffs", "--max-k", "3", "--max-l", "2", "--format", "json"]);
    let doc: Value = serde_json::from_str(&json).unwrap();
    let back: Vec<CoeffEntry> = serde_json::from_value(doc["entries"].clone()).unwrap();
    assert_eq!(back.len(), 12);
    assert_eq!(
        back,
        CoeffTable::<Rational>::with_extent(3, 2).entries(3, 2)
    );
}

#[test]
fn conjecture_scan_round_trips() {
    let csv = ok(&[
        "conjecture-scan",
        "--p",
        "0.6:0.8:0.1",
        "--terms",
        "60",
        "--x-step",
        "0.01",
    ]);
    assert!(
        csv.starts_with("p,min_beta,mass_residual,tail_at_k\n"),
        "{csv}"
    );
    let rows: Vec<ScanRow> = from_csv(&csv).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(to_csv(&rows).unwrap(), csv);
}

#[test]
fn simulate_writes_parseable_stats() {
    let dir = TempDir::new().unwrap();
    let inst = five_urns(dir.path());
    let out = dir.path().join("stats.json");
    let stdout = ok(&[
        "simulate",
        "--system",
        "plurality",
        "--instance",
        s(&inst),
        "--m",
        "5000",
        "--trials",
        "50",
        "--seed",
        "4",
        "--out",
        s(&out),
    ]);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let report = StatsReport::from_json(&text).unwrap();
    assert_eq!(report.to_json(), text);
    assert_eq!(report.system, "plurality");
    assert_eq!(
        (report.stats.m, report.stats.trials, report.stats.seed),
        (5000, 50, 4)
    );
    let doc: Value = serde_json::from_str(&text).unwrap();
    for key in [
        "schema", "system", "m", "trials", "failures", "rate", "ci95", "seed",
    ] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn every_system_simulates() {
    let dir = TempDir::new().unwrap();
    let inst = write(dir.path(), "i.json", r#"{"probs": ["1/5", "1/2", "4/5"]}"#);
    for system in [
        "plurality",
        "cumulative",
        "condorcet",
        "scoring",
        "multicolor",
    ] {
        let text = ok(&[
            "simulate",
            "--system",
            system,
            "--instance",
            s(&inst),
            "--m",
            "301",
            "--trials",
            "20",
            "--seed",
            "1",
        ]);
        assert_eq!(StatsReport::from_json(&text).unwrap().system, system);
    }
}

#[test]
fn experiment_tables_round_trip() {
    let csv = ok(&[
        "scoring-experiment",
        "--n",
        "3",
        "--eps",
        "1/5",
        "--trials",
        "100",
        "--seed",
        "2",
    ]);
    let rows: Vec<EfficiencyRow> = from_csv(&csv).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(to_csv(&rows).unwrap(), csv);
    let out = urnvote(&[
        "scaling-study",
        "--n",
        "3,4",
        "--trials",
        "100",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<ScalingRow> = from_csv(&csv).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![3, 4]);
    assert_eq!(to_csv(&rows).unwrap(), csv);
    assert!(String::from_utf8_lossy(&out.stderr).contains("slope"));
}

#[test]
fn budget_reports_the_formula() {
    let dir = TempDir::new().unwrap();
    let inst = five_urns(dir.path());
    let doc: Value = serde_json::from_str(&ok(&[
        "budget",
        "--system",
        "cumulative",
        "--instance",
        s(&inst),
        "--eta",
        "0.1",
    ]))
    .unwrap();
    let expected = (150.0f64 * 25.0 * 20.0f64.ln()).ceil() as u64;
    assert_eq!(doc["m"].as_u64().unwrap(), expected);
    let scaled = urnvote(&[
        "budget",
        "--system",
        "cumulative",
        "--instance",
        s(&inst),
        "--eta",
        "0.1",
        "--scale",
        "0.5",
    ]);
    assert_eq!(scaled.status.code(), Some(1));
}

#[test]
fn config_runs_match_simulate() {
    let dir = TempDir::new().unwrap();
    five_urns(dir.path());
    let config = write(
        dir.path(),
        "run.json",
        r#"{"system": "plurality", "instance": "i5.json", "m": 4000, "trials": 40, "seed": 9, "out": "r.json"}"#,
    );
    ok(&["run", "--config", s(&config)]);
    let from_run = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let direct = ok(&[
        "simulate",
        "--system",
        "plurality",
        "--instance",
        s(&dir.path().join("i5.json")),
        "--m",
        "4000",
        "--trials",
        "40",
        "--seed",
        "9",
    ]);
    assert_eq!(from_run, direct);
}

#[test]
fn malformed_configs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    five_urns(dir.path());
    for body in [
        r#"{"system": "plurality", "instance": "i5.json", "m": 10, "eta": 0.1, "trials": 5, "seed": 1}"#,
        r#"{"system": "plurality", "instance": "i5.json", "trials": 5, "seed": 1}"#,
        r#"{"system": "plurality", "instance": "i5.json", "m": 10, "trials": 5}"#,
        r#"{"system": "plurality", "instance": "i5.json", "m": 10, "trials": 5, "seed": 1, "colour": 2}"#,
        r#"{"system": "approval", "instance": "i5.json", "m": 10, "trials": 5, "seed": 1}"#,
        "not json",
    ] {
        let config = write(dir.path(), "bad.json", body);
        let out = urnvote(&["run", "--config", s(&config)]);
        assert_eq!(out.status.code(), Some(1), "{body}");
    }
}

#[test]
fn invalid_instances_are_rejected() {
    let dir = TempDir::new().unwrap();
    for body in [
        r#"{"probs": ["1/2", "1/2"]}"#,
        r#"{"probs": [1.5]}"#,
        r#"{"rows": [["1/2", "1/3"]]}"#,
    ] {
        let inst = write(dir.path(), "bad.json", body);
        let out = urnvote(&["kernel", "--system", "plurality", "--instance", s(&inst)]);
        assert_eq!(out.status.code(), Some(1), "{body}");
    }
}

#[test]
fn invariant_violations_exit_with_code_three() {
    // Landmarks spaced 1/10 apart cannot separate urns only 1/25 apart.
    let dir = TempDir::new().unwrap();
    let inst = write(
        dir.path(),
        "i.json",
        r#"{"probs": ["21/100", "1/4", "29/100"]}"#,
    );
    let points: Vec<String> = (0..=10).map(|k| format!("\"{k}/10\"")).collect();
    let lms = write(
        dir.path(),
        "lm.json",
        &format!("{{\"landmarks\": [{}]}}", points.join(",")),
    );
    let out = urnvote(&[
        "kernel",
        "--system",
        "flexible",
        "--instance",
        s(&inst),
        "--landmarks",
        s(&lms),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invariant violated"));
    // A fine enough grid passes the same check.
    let points: Vec<String> = (0..=100).map(|k| format!("\"{k}/100\"")).collect();
    let lms = write(
        dir.path(),
        "lm.json",
        &format!("{{\"landmarks\": [{}]}}", points.join(",")),
    );
    ok(&[
        "kernel",
        "--system",
        "flexible",
        "--instance",
        s(&inst),
        "--landmarks",
        s(&lms),
    ]);
}

//! End-to-end tests of the `linkwait` binary: output shapes, reference
//! values, determinism, and exit codes.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Output};

fn linkwait(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkwait"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// Parses a quantity,value,provenance table into a map.
fn quantities(text: &str) -> HashMap<String, f64> {
    text.lines()
        .skip(2)
        .filter_map(|line| {
            let mut parts = line.split(',');
            let key = parts.next()?.to_string();
            let value = parts.next()?.parse().ok()?;
            Some((key, value))
        })
        .collect()
}

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn bounds_repeater_reference_values() {
    let out = linkwait(&["bounds", "--spec", "repeater:n=4,p_gen=0.5,p_swap=0.5"]);
    assert!(out.status.success());
    let q = quantities(&stdout(&out));
    assert_close(q["mean_lower"], 101.1358024691358, 1e-9);
    assert_close(q["mean_upper"], 197.85829831200604, 1e-9);
    assert_close(q["three_over_two"], 162.0, 1e-12);
    assert_close(q["markov_mean_upper"], 512.0, 1e-12);
    assert_close(q["markov_mean_lower"], 32.0, 1e-12);
}

#[test]
fn bounds_switch_reference_value() {
    let out = linkwait(&["bounds", "--spec", "switch:k=3,p_fuse=0.5,arm_p=0.1"]);
    assert!(out.status.success());
    let q = quantities(&stdout(&out));
    assert_close(q["mean_upper"], 140.0 / 3.0, 1e-9);
}

#[test]
fn bounds_chain_reference_values() {
    let out = linkwait(&["bounds", "--spec", "chain:segments=4,p_gen=0.5"]);
    assert!(out.status.success());
    let q = quantities(&stdout(&out));
    assert_close(q["mean_lower"], 3.0056146685186733, 1e-9);
    assert_close(q["mean_upper"], 4.005614668518673, 1e-9);
}

#[test]
fn bounds_from_document() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"{{"kind":"rus","p":0.5,"children":[{{"kind":"generate","p":0.5}},{{"kind":"generate","p":0.5}}]}}"#
    )
    .unwrap();
    let out = linkwait(&["bounds", "--input", file.path().to_str().unwrap()]);
    assert!(out.status.success());
    let q = quantities(&stdout(&out));
    // (2 - 1 + 1/2) * envelope_mean / p
    assert_close(q["mean_upper"], 1.5 * 2.4426950408889634 / 0.5, 1e-9);
}

#[test]
fn exact_emits_all_support_rows_and_tail_record() {
    let out = linkwait(&["exact", "--spec", "generate:p=0.5", "--t-max", "64"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# linkwait v"));
    assert!(lines[0].contains("config="));
    assert!(lines[0].contains("tail_mass="));
    assert_eq!(lines[1], "t,mass");
    // 64 mass rows plus the trailing tail record
    assert_eq!(lines.len(), 2 + 64 + 1);
    assert_eq!(lines[2], "1,0.5");
    assert!(lines.last().unwrap().starts_with("tail_mass,"));
}

#[test]
fn simulate_is_byte_deterministic() {
    let args = [
        "simulate",
        "--spec",
        "repeater:n=1,p_gen=0.5,p_swap=0.5",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let first = linkwait(&args);
    let second = linkwait(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.lines().next().unwrap().contains("mean="));
    assert!(text.lines().nth(1).unwrap().starts_with("t,co_cdf"));
}

#[test]
fn check_nbu_on_repeater_passes() {
    let out = linkwait(&["check-nbu", "--spec", "repeater:n=1,p_gen=0.5,p_swap=0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(2).unwrap();
    assert!(row.starts_with("nbu,true,"), "{row}");
}

#[test]
fn compare_single_point_is_consistent_with_bounds() {
    let out = linkwait(&[
        "compare",
        "--spec",
        "repeater:n=2,p_gen=0.5,p_swap=0.5",
        "--grid",
        "p_swap=0.5:0.5:0.1",
        "--rel-tol",
        "1e-6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    let exact: f64 = fields[1].parse().unwrap();
    let lower: f64 = fields[2].parse().unwrap();
    let upper: f64 = fields[3].parse().unwrap();
    assert!(lower <= exact && exact <= upper);
    assert_eq!(fields[9], "ok");

    let bounds_out = linkwait(&["bounds", "--spec", "repeater:n=2,p_gen=0.5,p_swap=0.5"]);
    let q = quantities(&stdout(&bounds_out));
    assert_close(q["mean_lower"], lower, 1e-12);
    assert_close(q["mean_upper"], upper, 1e-12);
}

#[test]
fn compare_sweep_keeps_sandwich_on_grid() {
    let out = linkwait(&[
        "compare",
        "--spec",
        "repeater:n=2,p_gen=0.5,p_swap=0.5",
        "--grid",
        "p_swap=0.4:1.0:0.2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let ratio_lower: f64 = fields[7].parse().unwrap();
        let ratio_upper: f64 = fields[8].parse().unwrap();
        assert!(ratio_lower <= 1.0 + 1e-3 && ratio_upper >= 1.0 - 1e-3, "{row}");
    }
}

#[test]
fn compare_tail_rows_keep_the_sandwich() {
    let out = linkwait(&[
        "compare",
        "--spec",
        "repeater:n=1,p_gen=0.5,p_swap=0.5",
        "--tail",
        "--t-max",
        "512",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "t,exact_co_cdf,markov,markov_improved,tail_upper,tail_lower"
    );
    let mut checked = 0;
    for row in text.lines().skip(2) {
        let fields: Vec<&str> = row.split(',').collect();
        let exact: f64 = fields[1].parse().unwrap();
        if exact < 1e-9 {
            continue;
        }
        let upper: f64 = fields[4].parse().unwrap();
        let lower: f64 = fields[5].parse().unwrap();
        assert!(lower <= exact + 1e-12 && exact <= upper + 1e-12, "{row}");
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn invalid_inline_spec_exits_2() {
    let out = linkwait(&["bounds", "--spec", "repeater:n=4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_probability_exits_2() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"kind":"generate","p":1.5}}"#).unwrap();
    let out = linkwait(&["exact", "--input", file.path().to_str().unwrap(), "--t-max", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("out of range"), "{err}");
}

#[test]
fn malformed_json_exits_2_with_location() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{{\"kind\":").unwrap();
    let out = linkwait(&["exact", "--input", file.path().to_str().unwrap(), "--t-max", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "{err}");
}

#[test]
fn missing_source_exits_2() {
    let out = linkwait(&["bounds"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_sweep_parameter_exits_2() {
    let out = linkwait(&[
        "compare",
        "--spec",
        "repeater:n=1,p_gen=0.5,p_swap=0.5",
        "--grid",
        "bogus=0:1:0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_resource_limit_flags_rows_and_exits_3() {
    let out = linkwait(&[
        "compare",
        "--spec",
        "repeater:n=0,p_gen=1e-9,p_swap=0.5",
        "--grid",
        "p_gen=1e-9:1e-9:1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let row = text.lines().nth(2).unwrap();
    assert!(row.ends_with(",resource-limit"), "{row}");
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let piped = linkwait(&["bounds", "--spec", "generate:p=0.5"]);
    let filed = linkwait(&[
        "bounds",
        "--spec",
        "generate:p=0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(filed.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
}

use std::process::Command;

use serde_json::Value;

fn memchan(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_memchan"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("valid JSON")
}

#[test]
fn json_envelope_keys_in_order() {
    let (code, out, _) = memchan(&[
        "capacity",
        "convex",
        "--d",
        "2",
        "--lambdas",
        "0.9,0.5",
        "--gammas",
        "0.3,0.7",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "command",
            "inputs",
            "results",
            "checks",
            "timing_ms",
            "seed"
        ]
    );
    assert!((v["results"]["closed_form"].as_f64().unwrap() - 0.188722).abs() < 1e-6);
}

#[test]
fn timing_is_opt_in() {
    let (_, out, _) = memchan(&[
        "capacity",
        "depolarizing",
        "--d",
        "3",
        "--lambda",
        "1",
        "--timing",
    ]);
    let v = parse(&out);
    assert!(v["timing_ms"].as_f64().is_some());
    assert!((v["results"]["closed_form"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
}

#[test]
fn missing_kind_and_channel_is_usage_error() {
    let (code, out, err) = memchan(&["capacity", "--d", "2"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("error"));
}

#[test]
fn verify_additivity_passes_and_is_reproducible() {
    let args = [
        "verify",
        "additivity",
        "--d",
        "2",
        "--lambda",
        "0.5",
        "--restarts",
        "32",
        "--seed",
        "7",
    ];
    let (code, first, _) = memchan(&args);
    assert_eq!(code, 0);
    let (_, second, _) = memchan(&args);
    assert_eq!(first, second);
    let v = parse(&first);
    assert_eq!(v["seed"], 7);
    let check = &v["checks"][0];
    assert_eq!(check["name"], "additivity_gap");
    assert_eq!(check["pass"], true);
    assert!(check["value"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn verify_theorem1_and_theorem2() {
    let (code, out, _) = memchan(&[
        "verify",
        "theorem1",
        "--d",
        "2",
        "--lambdas",
        "0.9,0.5",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!((v["results"]["closed_form"].as_f64().unwrap() - 0.451162).abs() < 1e-6);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));

    let (code, out, _) = memchan(&[
        "verify",
        "theorem2",
        "--d",
        "2",
        "--lambdas",
        "0.9,0.5",
        "--gammas",
        "0.3,0.7",
        "--seed",
        "7",
        "--restarts",
        "8",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!((v["results"]["closed_form"].as_f64().unwrap() - 0.188722).abs() < 1e-6);
    assert!((v["results"]["optimizer_value"].as_f64().unwrap() - 0.188722).abs() < 1e-3);
}

#[test]
fn verify_invalid_gammas_exit_two() {
    let (code, _, err) = memchan(&[
        "verify",
        "theorem2",
        "--d",
        "2",
        "--lambdas",
        "0.9,0.5",
        "--gammas",
        "0.3,0.3",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("probability"));
}

#[test]
fn sweep_json_is_monotone() {
    let (code, out, _) = memchan(&[
        "sweep",
        "--d",
        "2",
        "--lambda-from",
        "-0.3",
        "--lambda-to",
        "1",
        "--step",
        "0.1",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 14);
    assert_eq!(v["checks"][0]["name"], "chi_star_monotone");
    assert_eq!(v["checks"][0]["pass"], true);
    let half = rows
        .iter()
        .find(|r| (r["lambda"].as_f64().unwrap() - 0.5).abs() < 1e-9)
        .unwrap();
    assert!((half["s_min"].as_f64().unwrap() - 0.811278).abs() < 1e-6);
}

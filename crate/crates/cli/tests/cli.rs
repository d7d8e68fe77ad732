use std::process::{Command, Output};

use serde_json::Value;

fn nicetop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nicetop")).args(args).env_remove("NICETOP_THREADS").output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = nicetop(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn cut(gamma: &str, bound: &str) -> Value {
    serde_json::json!({"gamma": gamma, "bound": bound})
}

#[test]
fn verify_counts_poset_classes() {
    let v = json(&["verify", "--max-n", "5"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["ok"], true);
    let summaries: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["summary"].as_str().unwrap()).collect();
    for (n, count) in [1, 2, 5, 16, 63].iter().enumerate() {
        assert_eq!(summaries[n], format!("{count} isomorphism classes"));
    }
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["violations"] == 0));
}

#[test]
fn verify_families_is_clean() {
    let v = json(&["verify", "--max-n", "2", "--families", "--ground", "3", "--max-members", "5"]);
    assert_eq!(v["ok"], true);
    let names: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"finite collapse"));
    assert!(names.contains(&"families ground=3 members<=5"));
}

#[test]
fn caps_and_bad_parameters_exit_one() {
    for args in [
        vec!["verify", "--max-n", "99"],
        vec!["verify", "--families", "--ground", "9"],
        vec!["example", "2.7", "--r0", "-1"],
        vec!["example", "2.7", "--j1", "nonsense"],
        vec!["example", "2.7p", "--j1", "2", "--j2", "3"],
        vec!["example", "2.13", "--n", "1"],
        vec!["example", "2.13", "--depth", "1000"],
        vec!["spectra", "demo", "--primes", "0"],
        vec!["spectra", "lazy", "--depth", "0"],
        vec!["frobnicate"],
        vec!["verify", "--max-n", "many"],
    ] {
        let out = nicetop(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(nicetop(&["--help"]).status.code(), Some(0));
    let v = nicetop(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn descending_corner_certificate() {
    let v = json(&["example", "2.7", "--r0", "1", "--j1", "2"]);
    let cert = &v["certificates"][0];
    assert_eq!(cert["verified"], true);
    let ev = &cert["data"]["evaluation"];
    assert_eq!(ev["ladder"]["e"], true);
    assert_eq!(ev["ladder"]["d"], false);
    let inf = serde_json::json!([[cut("0", "closed"), cut("1", "closed")], [cut("2", "closed"), cut("0", "closed")]]);
    assert_eq!(ev["infimum"]["entries"], inf);
    assert_eq!(cert["data"]["infimum_is_member"], false);
}

#[test]
fn descending_corner_with_open_cut_and_fraction() {
    let v = json(&["example", "2.7", "--r0", "3/4", "--j1", ">1/2"]);
    let inf = &v["certificates"][0]["data"]["evaluation"]["infimum"]["entries"];
    assert_eq!(inf[0][1], cut("3/4", "closed"));
    assert_eq!(inf[1][0], cut("1/2", "open"));
    assert_eq!(v["ok"], true);
}

#[test]
fn pinned_corner_certificate() {
    for which in ["2.7p", "2.7'"] {
        let v = json(&["example", which, "--r0", "1", "--j1", "3", "--j2", "2"]);
        let cert = &v["certificates"][0];
        assert_eq!(cert["verified"], true);
        assert_eq!(cert["data"]["evaluation"]["ladder"]["f"], true);
        assert_eq!(cert["data"]["evaluation"]["ladder"]["e"], false);
        assert_eq!(cert["data"]["evaluation"]["minimal_generators"], serde_json::json!([0]));
        assert_eq!(cert["data"]["intersection_membership"], "nowhere");
    }
}

#[test]
fn column_chain_certificate() {
    let v = json(&["example", "2.13", "--n", "3", "--depth", "50"]);
    assert_eq!(v["ok"], true);
    let strict = v["results"].as_array().unwrap().iter().find(|r| r["name"] == "strict inclusions").unwrap();
    assert_eq!(strict["checked"], 50);
    assert_eq!(strict["violations"], 0);
    let cert = &v["certificates"][0];
    assert_eq!(cert["data"]["sobriety"]["has_generic_point"], false);
    assert_eq!(cert["data"]["sobriety"]["bounding_member"], Value::Null);
    assert_eq!(cert["data"]["column_limit"], cut("0", "open"));
}

#[test]
fn search_emits_three_certificates() {
    let v = json(&["search", "reversals"]);
    let certs = v["certificates"].as_array().unwrap();
    let mut names: Vec<&str> = certs.iter().map(|c| c["name"].as_str().unwrap()).collect();
    names.sort_unstable();
    assert_eq!(names, ["(c)=>(b)", "(e)=>(d)", "(f)=>(e)"]);
    assert!(certs.iter().all(|c| c["verified"] == true));
    assert_eq!(v["results"][0]["violations"], 0);
}

#[test]
fn spectra_commands() {
    let v = json(&["spectra", "demo", "--primes", "4"]);
    assert_eq!(v["ok"], true);
    assert!(v["results"][0]["checked"].as_u64().unwrap() > 0);
    let g = json(&["spectra", "demo", "--primes", "4", "--oracle", "greedy"]);
    assert_eq!(g["ok"], true);
    let lazy = json(&["spectra", "lazy", "--depth", "100"]);
    assert_eq!(lazy["certificates"][0]["verified"], true);
    assert_eq!(lazy["results"][0]["checked"], 100 * 99 / 2);
    // The 101st prime, which R_100 misses.
    assert_eq!(lazy["certificates"][0]["data"]["largest_prime"], 547);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["verify", "--max-n", "4", "--families", "--ground", "2", "--max-members", "4"],
        vec!["search", "reversals", "--ground", "3"],
        vec!["spectra", "demo", "--primes", "3"],
    ] {
        let a = without_timing(json(&args));
        let mut with_threads = vec!["--threads", "1"];
        with_threads.extend_from_slice(&args);
        let b = without_timing(json(&with_threads));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn output_file_and_thread_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_nicetop"))
        .args(["--format", "json", "--threads", "0", "--output", path.to_str().unwrap(), "example", "2.7"])
        .env("NICETOP_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "example 2.7");

    let bad = Command::new(env!("CARGO_BIN_EXE_nicetop")).args(["example", "2.7"]).env("NICETOP_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(nicetop(&["--threads", "0", "example", "2.7"]).status.code(), Some(1));
}

#[test]
fn text_format_summarizes() {
    let out = nicetop(&["example", "2.13", "--n", "2", "--depth", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("nicetop "));
    assert!(text.contains("strict inclusions"));
    assert!(text.lines().last().unwrap().starts_with("result: ok"));
}

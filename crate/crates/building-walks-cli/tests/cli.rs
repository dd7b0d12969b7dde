//! End-to-end tests of the `building-walks` binary: flag handling, config
//! files, exit codes, format contracts, and cross-command consistency.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_building-walks"));
    cmd.args(args);
    // Isolate from the ambient environment so tests control the worker count.
    cmd.env_remove("BUILDING_WALKS_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary should spawn");
    Run {
        code: out.status.code().expect("no exit code (signal?)"),
        stdout: String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

fn ok(args: &[&str]) -> String {
    let r = run(args);
    assert_eq!(r.code, 0, "expected success for {args:?}, stderr: {}", r.stderr);
    r.stdout
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&ok(args)).expect("stdout should be JSON")
}

/// Parse a CSV report: metadata comments, header fields, data rows.
fn csv(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let mut comments = Vec::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix("# ") {
            comments.push(c.to_string());
        } else if header.is_empty() {
            header = line.split(',').map(str::to_string).collect();
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (comments, header, rows)
}

fn f(field: &str) -> f64 {
    field.parse().expect("numeric CSV field")
}

#[test]
fn polygon_mix_bound_dominates_exact_distance() {
    let text = ok(&["polygon-mix", "--m", "4", "--q", "2", "--r", "2", "--n", "30"]);
    let (comments, header, rows) = csv(&text);
    assert_eq!(header, ["n", "p_n_oo", "tv_exact", "tv_bound"]);
    assert!(comments.iter().any(|c| c.starts_with("command: polygon-mix")));
    assert!(comments.iter().any(|c| c.starts_with("library-version: ")));
    assert!(comments.iter().any(|c| c.starts_with("config: ")));
    assert_eq!(rows.len(), 31);
    assert_eq!(f(&rows[0][1]), 1.0, "p_0_oo");
    assert_eq!(f(&rows[1][1]), 0.0, "p_1_oo");
    for row in &rows {
        assert!(
            f(&row[2]) <= f(&row[3]) + 1e-15,
            "tv_exact > tv_bound at n={}",
            row[0]
        );
    }
    // The distance must actually decay over the horizon.
    assert!(f(&rows[30][2]) < 1e-3);
}

#[test]
fn quadrangle_closed_form_agrees_with_character_route() {
    let closed = ok(&["quadrangle-closed-form", "--q", "2", "--r", "2", "--n", "12"]);
    let mix = ok(&["polygon-mix", "--m", "4", "--q", "2", "--r", "2", "--n", "12"]);
    let (_, _, closed_rows) = csv(&closed);
    let (_, _, mix_rows) = csv(&mix);
    assert_eq!(closed_rows.len(), 13);
    for (c, m) in closed_rows.iter().zip(&mix_rows) {
        assert_eq!(c[0], m[0]);
        assert!((f(&c[1]) - f(&m[1])).abs() < 1e-12, "p_n_oo differs at n={}", c[0]);
        // Both TV bounds come from the same spectral sum.
        assert!((f(&c[2]) - f(&m[3])).abs() < 1e-12, "tv_bound differs at n={}", c[0]);
    }
}

#[test]
fn feit_higman_pentagon_rejected_quadrangle_accepted() {
    let pentagon = json(&["feit-higman", "--m", "5", "--q", "2", "--r", "2"]);
    assert_eq!(pentagon["admissible"], serde_json::Value::Bool(false));
    assert_eq!(pentagon["command"], "feit-higman");
    assert_eq!(pentagon["config"]["m"], 5);
    assert!(pentagon["library_version"].is_string());

    let quadrangle = json(&["feit-higman", "--m", "4", "--q", "2", "--r", "2"]);
    assert_eq!(quadrangle["admissible"], serde_json::Value::Bool(true));
    assert_eq!(quadrangle["chamber_count"], "45");
    assert_eq!(quadrangle["route"], "exact-tower");
}

#[test]
fn param_check_flags_bruck_ryser_chowla() {
    let report = json(&["param-check", "--m", "3", "--q", "6", "--r", "6"]);
    assert_eq!(report["feasible"], serde_json::Value::Bool(false));
    let constraints = report["constraints"].as_array().expect("constraints array");
    assert!(constraints
        .iter()
        .any(|c| c["satisfied"] == serde_json::Value::Bool(false)));

    let hexagon = json(&["param-check", "--m", "6", "--q", "2", "--r", "3"]);
    assert_eq!(hexagon["feasible"], serde_json::Value::Bool(false));
}

#[test]
fn a2_rho_matches_closed_form() {
    let report = json(&["a2-rho", "--q", "2"]);
    let expected = (3.0 * (2.0 - 1.0) + (4.0f64 + 34.0 * 2.0 + 1.0).sqrt()) / (6.0 * 2.0);
    let rho = report["rho"].as_f64().expect("rho number");
    assert!((rho - expected).abs() < 1e-14, "rho = {rho}");
}

#[test]
fn c2_llt_reports_spectral_radius_and_improving_ratios() {
    let report = json(&["c2-llt", "--q", "2", "--r", "2", "--n", "50"]);
    let rho = report["rho"].as_f64().expect("rho number");
    assert!((rho - 8.0 * 2.0f64.sqrt() / 15.0).abs() < 1e-14);
    let table = report["table"].as_array().expect("ratio table");
    assert!(!table.is_empty());
    let ratios: Vec<f64> = table
        .iter()
        .map(|row| row["ratio"].as_f64().expect("finite ratio"))
        .collect();
    for pair in ratios.windows(2) {
        assert!(pair[0] > 0.0 && pair[0] < pair[1], "ratios should climb: {ratios:?}");
    }
    assert!(*ratios.last().unwrap() < 1.0);
}

#[test]
fn c2_exact_probabilities_sum_to_one_per_step() {
    let text = ok(&["c2-exact", "--q", "2", "--r", "3", "--n", "5"]);
    let (_, header, rows) = csv(&text);
    assert_eq!(header, ["n", "k", "l", "a_kl", "p"]);
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for row in &rows {
        *totals.entry(row[0].clone()).or_insert(0.0) += f(&row[3]);
    }
    assert_eq!(totals.len(), 6);
    for (n, total) in totals {
        assert!((total - 1.0).abs() < 1e-12, "step {n} sums to {total}");
    }
}

#[test]
fn c2_spectral_quadrature_matches_exact_recursion() {
    let exact = ok(&["c2-exact", "--q", "2", "--r", "2", "--n", "3", "--mode", "float"]);
    let spectral = ok(&[
        "c2-spectral", "--q", "2", "--r", "2", "--n", "3", "--grid", "48x48",
    ]);
    let (_, _, exact_rows) = csv(&exact);
    let (_, _, spectral_rows) = csv(&spectral);
    let mut exact_map: BTreeMap<(String, String, String), f64> = BTreeMap::new();
    for row in &exact_rows {
        exact_map.insert((row[0].clone(), row[1].clone(), row[2].clone()), f(&row[4]));
    }
    assert!(!spectral_rows.is_empty());
    for row in &spectral_rows {
        let key = (row[0].clone(), row[1].clone(), row[2].clone());
        let expected = exact_map.get(&key).copied().unwrap_or(0.0);
        assert!(
            (f(&row[3]) - expected).abs() < 1e-4,
            "spectral vs exact at (n,k,l)={key:?}: {} vs {expected}",
            row[3]
        );
    }
}

#[test]
fn polygon_pn_sphere_masses_sum_to_one() {
    let text = ok(&["polygon-pn", "--m", "3", "--q", "2", "--r", "2", "--n", "4"]);
    let (_, header, rows) = csv(&text);
    assert_eq!(header, ["n", "word", "a_w", "p_w"]);
    // 6 Weyl distances per step on the m = 3 geometry.
    assert_eq!(rows.len(), 5 * 6);
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for row in &rows {
        *totals.entry(row[0].clone()).or_insert(0.0) += f(&row[2]);
    }
    for (n, total) in totals {
        assert!((total - 1.0).abs() < 1e-12, "step {n} sums to {total}");
    }
}

#[test]
fn polygon_pn_json_rational_mode_is_exact() {
    let report = json(&[
        "polygon-pn", "--m", "3", "--q", "2", "--r", "2", "--n", "2", "--format", "json",
    ]);
    let rows = report["rows"].as_array().expect("rows");
    assert_eq!(rows[0]["word"], "e");
    assert_eq!(rows[0]["p_w"], "1/1");
    let two_step_e = rows
        .iter()
        .find(|r| r["n"] == 2 && r["word"] == "e")
        .expect("row for n=2, w=e");
    let text = two_step_e["p_w"].as_str().expect("rational string");
    assert!(text.contains('/'), "exact mode should emit p/q strings, got {text}");
}

#[test]
fn simulate_is_byte_identical_across_worker_counts_and_sums_to_one() {
    let args = [
        "simulate", "--m", "3", "--q", "2", "--r", "2", "--n", "5", "--trials", "40000",
        "--seed", "11",
    ];
    let one = run_env(&args, &[("BUILDING_WALKS_THREADS", "1")]);
    let five = run_env(&args, &[("BUILDING_WALKS_THREADS", "5")]);
    let again = run_env(&args, &[("BUILDING_WALKS_THREADS", "5")]);
    assert_eq!(one.code, 0, "{}", one.stderr);
    assert_eq!(one.stdout, five.stdout, "worker count changed the report");
    assert_eq!(five.stdout, again.stdout, "rerun changed the report");
    let (_, header, rows) = csv(&one.stdout);
    assert_eq!(header, ["chamber-id", "point", "line", "probability", "weyl-word"]);
    assert_eq!(rows.len(), 21);
    let total: f64 = rows.iter().map(|row| f(&row[3])).sum();
    assert!((total - 1.0).abs() < 1e-9, "probabilities sum to {total}");
    assert_eq!(rows[0][4], "e");
}

#[test]
fn simulate_requires_a_seed() {
    let r = run(&["simulate", "--m", "3", "--q", "2", "--r", "2", "--n", "5"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--seed"), "stderr: {}", r.stderr);
}

#[test]
fn malformed_thread_override_is_a_usage_error() {
    let r = run_env(
        &["simulate", "--m", "3", "--q", "2", "--r", "2", "--n", "2", "--seed", "1"],
        &[("BUILDING_WALKS_THREADS", "many")],
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("BUILDING_WALKS_THREADS"), "stderr: {}", r.stderr);
}

#[test]
fn unknown_flags_and_subcommands_exit_two() {
    assert_eq!(run(&["polygon-pn", "--bogus"]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);
}

#[test]
fn computation_errors_emit_machine_readable_objects() {
    let r = run(&["feit-higman", "--m", "3", "--q", "2", "--r", "3"]);
    assert_eq!(r.code, 1);
    let error: serde_json::Value =
        serde_json::from_str(r.stderr.trim()).expect("stderr should be a JSON error object");
    assert_eq!(error["error"]["kind"], "invalid-input");
    assert!(error["error"]["message"].as_str().unwrap().contains("gonality"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let mut file = tempfile::NamedTempFile::new().expect("temp config");
    write!(
        file,
        r#"{{"m": 4, "q": 2, "r": 2, "n": 6, "format": "csv"}}"#
    )
    .expect("write config");
    let path = file.path().to_str().expect("utf-8 path");

    let from_file = ok(&["polygon-mix", "--config", path]);
    let (_, _, rows) = csv(&from_file);
    assert_eq!(rows.len(), 7, "n = 6 from the config file");

    let overridden = ok(&["polygon-mix", "--config", path, "--n", "3"]);
    let (comments, _, rows) = csv(&overridden);
    assert_eq!(rows.len(), 4, "the explicit flag wins");
    let config_line = comments
        .iter()
        .find(|c| c.starts_with("config: "))
        .expect("config comment");
    assert!(config_line.contains("\"n\":3"), "resolved config: {config_line}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let mut file = tempfile::NamedTempFile::new().expect("temp config");
    write!(file, r#"{{"m": 4, "qq": 2}}"#).expect("write config");
    let r = run(&[
        "polygon-mix", "--config", file.path().to_str().unwrap(), "--q", "2", "--r", "2",
        "--n", "2",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("qq"), "stderr: {}", r.stderr);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("rho.json");
    let r = run(&["a2-rho", "--q", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty(), "report should go to the file only");
    let text = std::fs::read_to_string(&path).expect("report file");
    let report: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert!(report["rho"].is_f64());
}

#[test]
fn model_audit_reports_structural_checks() {
    let digon = json(&["model-audit", "--m", "2", "--q", "3", "--r", "2"]);
    assert_eq!(digon["chambers"], 12);
    assert_eq!(digon["gonality"], 2);
    assert_eq!(digon["sphere_census_ok"], serde_json::Value::Bool(true));
    assert_eq!(digon["symmetry_ok"], serde_json::Value::Bool(true));

    let quadrangle = json(&["model-audit", "--m", "4", "--q", "2", "--r", "2"]);
    assert_eq!(quadrangle["chambers"], 45);
    assert_eq!(quadrangle["incidence_girth"], 8);
}

#[test]
fn fuchsian_check_classifies_order_triples() {
    let thick = json(&["fuchsian-check", "3", "3", "4"]);
    assert_eq!(thick["verdict"], "hyperbolic-thick-building");

    let no_thick = json(&["fuchsian-check", "2", "3", "7"]);
    assert_eq!(no_thick["verdict"], "hyperbolic-no-thick-building");
    assert_eq!(no_thick["hyperbolic"], serde_json::Value::Bool(true));

    let spherical = json(&["fuchsian-check", "2", "3", "5"]);
    assert_eq!(spherical["verdict"], "not-hyperbolic");

    let r = run(&["fuchsian-check", "3", "3"]);
    assert_eq!(r.code, 2, "fewer than three orders is a usage error");
}

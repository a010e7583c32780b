use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn psps(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psps"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("run psps")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn ok(o: Output) -> Output {
    assert_eq!(
        code(&o),
        0,
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Simulates `n` toy scenarios into `dir`; returns the scenario file.
fn toy_scenarios(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let toy = data("toy3.toml");
    ok(psps(dir, &["simulate", "--case", s(&toy), "--n", &n.to_string(), "--seed", &seed.to_string()]));
    dir.join("scenarios.jsonl")
}

fn objective(plan: &Path) -> f64 {
    read_json(plan)["data"]["objective"].as_f64().unwrap()
}

#[test]
fn simulate_is_deterministic_across_reruns_and_threads() {
    let tmp = TempDir::new().unwrap();
    let toy = data("toy3.toml");
    let mut files = Vec::new();
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let dir = tmp.path().join(format!("run{k}"));
        let o = ok(psps(&dir, &["simulate", "--case", s(&toy), "--n", "100", "--seed", "7", "--threads", threads]));
        assert!(String::from_utf8_lossy(&o.stdout).contains("rate"));
        files.push(fs::read(dir.join("scenarios.jsonl")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[1], files[2]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 101);
    let header: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 7);
    assert_eq!(header["count"], 100);
    assert!(header["grid"].is_object());
}

#[test]
fn zero_scenarios_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = psps(tmp.path(), &["simulate", "--case", s(&data("toy3.toml")), "--n", "0"]);
    assert_eq!(code(&o), 2);
    assert!(!tmp.path().join("scenarios.jsonl").exists());
}

#[test]
fn missing_case_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let o = psps(tmp.path(), &["simulate", "--case", "/nonexistent/case.toml", "--n", "5"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unknown_solver_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let o = psps(tmp.path(), &["simulate", "--case", s(&data("toy3.toml")), "--n", "5", "--solver", "nosuch"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exact_smc_solve_closes_the_gap_and_matches_the_extensive_form() {
    let tmp = TempDir::new().unwrap();
    let scen = toy_scenarios(&tmp.path().join("sim"), 12, 3);
    let dec = tmp.path().join("dec");
    ok(psps(&dec, &["solve", "--case", s(&data("toy3.toml")), "--scenarios", s(&scen), "--epsilon", "0", "--cut", "smc"]));
    let plan = read_json(&dec.join("plan.json"));
    assert_eq!(plan["data"]["gap"].as_f64().unwrap(), 0.0);
    assert!(plan["data"]["converged"].as_bool().unwrap());
    let bounds = fs::read_to_string(dec.join("bounds.csv")).unwrap();
    assert!(bounds.lines().count() >= 2);

    let ext = tmp.path().join("ext");
    ok(psps(
        &ext,
        &["solve", "--case", s(&data("toy3.toml")), "--scenarios", s(&scen), "--extensive", "--epsilon", "0"],
    ));
    let (a, b) = (objective(&dec.join("plan.json")), objective(&ext.join("plan.json")));
    assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "decomposition {a} vs extensive {b}");
}

#[test]
fn lc_and_smc_agree_within_epsilon() {
    let tmp = TempDir::new().unwrap();
    let scen = toy_scenarios(&tmp.path().join("sim"), 10, 11);
    let mut values = Vec::new();
    for cut in ["lc", "smc"] {
        let dir = tmp.path().join(cut);
        let o = ok(psps(&dir, &["solve", "--case", s(&data("toy3.toml")), "--scenarios", s(&scen), "--cut", cut]));
        assert!(String::from_utf8_lossy(&o.stdout).contains("iterations"));
        values.push(objective(&dir.join("plan.json")));
    }
    let tol = 0.01 * values[0].abs().max(values[1].abs()).max(1e-9);
    assert!((values[0] - values[1]).abs() <= tol, "{values:?}");
}

#[test]
fn scenarios_from_another_case_are_refused() {
    let tmp = TempDir::new().unwrap();
    let scen = toy_scenarios(&tmp.path().join("sim"), 5, 1);
    let other = tmp.path().join("other.toml");
    let text = fs::read_to_string(data("toy3.toml")).unwrap().replace("priority = 200.0", "priority = 250.0");
    fs::write(&other, text).unwrap();
    let o = psps(&tmp.path().join("solve"), &["solve", "--case", s(&other), "--scenarios", s(&scen)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hash"));
}

#[test]
fn iteration_limit_keeps_the_incumbent_and_resume_finishes() {
    let tmp = TempDir::new().unwrap();
    let toy = data("toy3.toml");
    let scen = toy_scenarios(&tmp.path().join("sim"), 12, 5);
    let first = tmp.path().join("first");
    let o = psps(
        &first,
        &["solve", "--case", s(&toy), "--scenarios", s(&scen), "--epsilon", "0", "--max-iterations", "1"],
    );
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(first.join("plan.json").exists());
    assert!(first.join("checkpoint.json").exists());

    let resumed = tmp.path().join("resumed");
    let checkpoint = first.join("checkpoint.json");
    ok(psps(
        &resumed,
        &["solve", "--case", s(&toy), "--scenarios", s(&scen), "--epsilon", "0", "--resume", s(&checkpoint)],
    ));
    let fresh = tmp.path().join("fresh");
    ok(psps(&fresh, &["solve", "--case", s(&toy), "--scenarios", s(&scen), "--epsilon", "0"]));
    let (a, b) = (objective(&resumed.join("plan.json")), objective(&fresh.join("plan.json")));
    assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "resumed {a} vs fresh {b}");

    let other = toy_scenarios(&tmp.path().join("sim2"), 12, 6);
    let o = psps(
        &tmp.path().join("bad"),
        &["solve", "--case", s(&toy), "--scenarios", s(&other), "--resume", s(&checkpoint)],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn artifacts_carry_the_manifest_config_hash() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("run");
    let scen = toy_scenarios(&dir, 6, 2);
    ok(psps(&dir, &["solve", "--case", s(&data("toy3.toml")), "--scenarios", s(&scen)]));
    let manifest = read_json(&dir.join("manifest.json"));
    let runs = manifest["runs"].as_object().unwrap();
    assert!(runs.contains_key("simulate") && runs.contains_key("solve"));
    let solve = &runs["solve"];
    let plan = read_json(&dir.join("plan.json"));
    assert_eq!(plan["stamp"]["config_hash"], solve["config_hash"]);
    assert_eq!(plan["stamp"]["case_hash"], solve["case_hash"]);
    let files: Vec<&str> = solve["outputs"].as_array().unwrap().iter().map(|f| f["file"].as_str().unwrap()).collect();
    assert!(files.contains(&"plan.json") && files.contains(&"bounds.csv"));

    // The hash ignores the thread count but not the seed.
    let again = tmp.path().join("again");
    ok(psps(&again, &["simulate", "--case", s(&data("toy3.toml")), "--n", "6", "--seed", "2", "--threads", "1"]));
    let other = tmp.path().join("other");
    ok(psps(&other, &["simulate", "--case", s(&data("toy3.toml")), "--n", "6", "--seed", "3"]));
    let hash = |d: &Path| read_json(&d.join("manifest.json"))["runs"]["simulate"]["config_hash"].clone();
    assert_eq!(hash(&dir), hash(&again));
    let header = fs::read_to_string(&scen).unwrap();
    let header: Value = serde_json::from_str(header.lines().next().unwrap()).unwrap();
    assert_eq!(header["config_hash"], hash(&dir));
    assert_ne!(hash(&dir), hash(&other));
}

#[test]
fn benchmark_reports_the_alpha_sweep_and_orderings() {
    let tmp = TempDir::new().unwrap();
    let toy = data("toy3.toml");
    let scen = toy_scenarios(&tmp.path().join("sim"), 30, 1);
    let solve = tmp.path().join("solve");
    ok(psps(&solve, &["solve", "--case", s(&toy), "--scenarios", s(&scen), "--epsilon", "0"]));
    let bench = tmp.path().join("bench");
    ok(psps(
        &bench,
        &["benchmark", "--case", s(&toy), "--scenarios", s(&scen), "--plan", s(&solve.join("plan.json"))],
    ));
    let summary = fs::read_to_string(bench.join("benchmark_summary.csv")).unwrap();
    let rb_rows = summary.lines().filter(|l| l.starts_with("rb(")).count();
    assert_eq!(rb_rows, 10);

    let mut rdr = csv_rows(&bench.join("comparison.csv"));
    let header = rdr.remove(0);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (plan_col, g_col) = (col("plan"), col("g_n"));
    let g = |tag: &str| -> f64 { rdr.iter().find(|r| r[plan_col] == tag).unwrap()[g_col].parse().unwrap() };
    let ws = g("ws");
    for r in &rdr {
        let v: f64 = r[g_col].parse().unwrap();
        assert!(ws <= v + 1e-6, "ws {ws} above {} ({v})", r[plan_col]);
    }
    assert!(g("smip") <= g("det") + 1e-6);
    let rri_col = col("rri");
    let det_rri: f64 = rdr.iter().find(|r| r[plan_col] == "det").unwrap()[rri_col].parse().unwrap();
    assert!(det_rri > 0.0, "det RRI {det_rri}");
    assert!(bench.join("comparison.svg").exists());
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn network_snapshot_dashes_exactly_the_lines_that_are_off() {
    let tmp = TempDir::new().unwrap();
    let socal = data("socal73.toml");
    let sim = tmp.path().join("sim");
    ok(psps(&sim, &["simulate", "--case", s(&socal), "--n", "1"]));
    let case_hash = read_json(&sim.join("manifest.json"))["runs"]["simulate"]["case_hash"].clone();

    let (n_bus, n_gen, n_line, n_load, t_max) = (73, 36, 108, 51, 24);
    let t = 10;
    let off_lines = [3usize, 40, 77];
    let mut z = vec![vec![1u8; t_max + 1]; n_bus + n_gen + n_line];
    for &l in &off_lines {
        for k in t..=t_max {
            z[n_bus + n_gen + l][k] = 0;
        }
    }
    let zeros = |n: usize| vec![vec![0.0; t_max]; n];
    let plan = json!({
        "stamp": { "kind": "plan", "tool_version": "test", "config_hash": "", "case_hash": case_hash },
        "data": {
            "method": "handmade", "objective": 0.0, "lower": 0.0, "gap": 0.0, "iterations": 0, "converged": true,
            "plan": {
                "horizon": t_max, "z": z, "served": zeros(n_load), "theta": zeros(n_bus),
                "flow": zeros(n_line), "generation": zeros(n_gen)
            }
        }
    });
    let plan_path = tmp.path().join("handmade.json");
    fs::write(&plan_path, plan.to_string()).unwrap();
    let out = tmp.path().join("plot");
    ok(psps(&out, &["plot", "network", "--case", s(&socal), "--plan", s(&plan_path), "--period", &t.to_string()]));
    let svg = fs::read_to_string(out.join(format!("network_t{t}.svg"))).unwrap();
    let dashed: Vec<&str> = svg.lines().filter(|l| l.contains(r#"class="line off""#)).collect();
    assert_eq!(dashed.len(), 3);
    assert!(dashed.iter().all(|l| l.contains("stroke-dasharray")));
    assert_eq!(svg.lines().filter(|l| l.contains(r#"class="line on""#)).count(), n_line - 3);
    for &l in &off_lines {
        assert!(dashed.iter().any(|d| d.contains(&format!(r#"data-id="l{}""#, l + 1))));
    }

    // The same plan one period earlier has every line energized.
    ok(psps(&out, &["plot", "network", "--case", s(&socal), "--plan", s(&plan_path), "--period", &(t - 1).to_string()]));
    let svg = fs::read_to_string(out.join(format!("network_t{}.svg", t - 1))).unwrap();
    assert_eq!(svg.matches(r#"class="line off""#).count(), 0);
}

#[test]
fn saa_study_and_ci_plot_have_two_series_per_size() {
    let tmp = TempDir::new().unwrap();
    let toy = data("toy3.toml");
    let study = tmp.path().join("saa");
    ok(psps(
        &study,
        &["evaluate", "--case", s(&toy), "--saa-sizes", "2,4,6", "--replicates", "2", "--eval-n", "30", "--seed", "9"],
    ));
    let summary = fs::read_to_string(study.join("saa_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    let out = tmp.path().join("plot");
    ok(psps(&out, &["plot", "ci", "--study", s(&study.join("saa.json"))]));
    let svg = fs::read_to_string(out.join("saa_ci.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="ci "#).count(), 3 * 2);
    assert_eq!(svg.matches(r#"class="ci lb""#).count(), 3);
}

#[test]
fn evaluate_and_scatter_plans_out_of_sample() {
    let tmp = TempDir::new().unwrap();
    let toy = data("toy3.toml");
    let train = toy_scenarios(&tmp.path().join("train"), 8, 1);
    let test = toy_scenarios(&tmp.path().join("test"), 40, 2);
    let solve = tmp.path().join("solve");
    ok(psps(&solve, &["solve", "--case", s(&toy), "--scenarios", s(&train)]));
    let eval = tmp.path().join("eval");
    ok(psps(
        &eval,
        &["evaluate", "--case", s(&toy), "--scenarios", s(&test), "--plan", s(&solve.join("plan.json"))],
    ));
    let reports = read_json(&eval.join("reports.json"));
    assert_eq!(reports["data"][0]["costs"].as_array().unwrap().len(), 40);
    let out = tmp.path().join("plot");
    ok(psps(&out, &["plot", "scatter", "--report", s(&eval.join("reports.json"))]));
    let svg = fs::read_to_string(out.join("scatter.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="pt""#).count(), 40);
}

#[test]
fn plotting_empty_or_missing_inputs_exits_with_io_code() {
    let tmp = TempDir::new().unwrap();
    let empty = tmp.path().join("empty.json");
    let report = json!({
        "stamp": { "kind": "report", "tool_version": "test", "config_hash": "", "case_hash": "" },
        "data": []
    });
    fs::write(&empty, report.to_string()).unwrap();
    let o = psps(&tmp.path().join("a"), &["plot", "scatter", "--report", s(&empty)]);
    assert_eq!(code(&o), 3);
    let o = psps(&tmp.path().join("b"), &["plot", "ci", "--study", s(&tmp.path().join("missing.json"))]);
    assert_eq!(code(&o), 3);
}

#[test]
fn sensitivity_endpoints_are_reported() {
    let tmp = TempDir::new().unwrap();
    let toy = data("toy3.toml");
    let scen = toy_scenarios(&tmp.path().join("sim"), 10, 8);
    let text = fs::read_to_string(&scen).unwrap();
    let p0 = text
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|v| v["tau"].is_null())
        .map(|v| v["p"].as_f64().unwrap())
        .sum::<f64>();
    let to_one = format!("{}", 1.0 - p0);
    let out = tmp.path().join("sens");
    ok(psps(
        &out,
        &["sensitivity", "--case", s(&toy), "--scenarios", s(&scen), "--deltas", &format!("-{p0},0,{to_one}"), "--epsilon", "0"],
    ));
    let rows = csv_rows(&out.join("sensitivity.csv"));
    assert_eq!(rows.len(), 4);
    let bottom: f64 = rows[1][1].parse().unwrap();
    let top: f64 = rows[3][1].parse().unwrap();
    assert!(bottom.abs() < 1e-9);
    assert!((top - 1.0).abs() < 1e-9);
}

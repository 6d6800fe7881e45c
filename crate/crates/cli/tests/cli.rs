use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use infospec_cli::{parse_config, run_suite, ExperimentConfig, Stage};

const BIN: &str = env!("CARGO_BIN_EXE_infospec");

fn infospec(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const MINIMAL: &str = r#"{
    "source": {"kind": "iid", "params": {"probs": [0.3, 0.7]}},
    "channel": {"kind": "dmc", "params": {"matrix": [[0.9, 0.1], [0.2, 0.8]]}},
    "n_grid": [1, 2, 4]
}"#;

#[test]
fn constant_gamma_rejected_for_sweeps() {
    let text = r#"{
        "source": {"kind": "iid", "params": {"probs": [0.3, 0.7]}},
        "channel": {"kind": "bsc", "params": {"crossover": 0.1}},
        "n_grid": [4, 8, 16],
        "gamma": {"kind": "constant", "value": 0.1},
        "stages": ["check_direct"]
    }"#;
    let issues = parse_config(text).unwrap_err();
    assert_eq!(issues.len(), 1);
    assert_eq!(issues[0].pointer, "/gamma");
    // Without a sweep the same schedule is fine.
    assert!(parse_config(&text.replace(r#""check_direct""#, r#""bound_feinstein""#)).is_ok());
}

#[test]
fn mixture_weights_pointer() {
    let text = r#"{
        "source": {"kind": "mixed", "params": {
            "weights": [0.6, 0.6],
            "components": [
                {"kind": "iid", "params": {"probs": [0.9, 0.1]}},
                {"kind": "iid", "params": {"probs": [0.6, 0.4]}}
            ]}},
        "channel": {"kind": "bsc", "params": {"crossover": 0.1}},
        "n_grid": [1, 2],
        "delta": 2.0
    }"#;
    let issues = parse_config(text).unwrap_err();
    let ptrs: Vec<&str> = issues.iter().map(|i| i.pointer.as_str()).collect();
    assert_eq!(ptrs, ["/source/params/weights", "/delta"]);
}

#[test]
fn seed_required_with_monte_carlo() {
    let text = MINIMAL.replace(r#""n_grid""#, r#""evaluation": {"mode": "monte_carlo"}, "n_grid""#);
    let issues = parse_config(&text).unwrap_err();
    assert_eq!(issues[0].pointer, "/seed");
    let seeded = text.replace(r#""n_grid""#, r#""seed": 3, "n_grid""#);
    assert!(parse_config(&seeded).is_ok());
}

#[test]
fn schema_round_trip() {
    let rich = r#"{
        "source": {"kind": "uniform_message", "params": {"messages": {"power": {"base": 2}}}},
        "channel": {"kind": "bec", "params": {"erasure": 0.25}},
        "coupling": {"kind": "independent", "params": {"probs": [0.5, 0.5]}},
        "candidates": [
            {"label": "skewed", "coupling": {"kind": "independent", "params": {"probs": [0.2, 0.8]}}},
            {"label": "ba", "coupling": {"kind": "ba_optimal", "params": {}}}
        ],
        "n_grid": [2, 4, 8],
        "gamma": {"kind": "power", "scale": 0.5, "exponent": 0.4},
        "c": {"kind": "list", "values": [0.3, 0.3, 0.3]},
        "epsilon": 0.1,
        "split": "product",
        "converse": [{"mode": "semi_strong_source", "subsequences": ["even", {"list": [2, 8]}]}],
        "evaluation": {"mode": "auto", "samples": 5000, "route": "convolution", "quantize": 1e-9},
        "simulate": {"mode": "monte_carlo", "budget": 100},
        "seed": 42,
        "caps": {"enumeration": 1e6},
        "stages": ["spectrum", "check_domination"],
        "output_dir": "results"
    }"#;
    for text in [MINIMAL, rich] {
        let a = parse_config(text).unwrap();
        let b = parse_config(&a.to_json()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hash(), b.hash());
    }
}

#[test]
fn empty_stage_list_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let out = tmp.path().join("out");
    let o = infospec(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn unwritable_directory_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    // A regular file cannot be a parent directory, even for root.
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("out");
    let o = infospec(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"source": 1}"#);
    let o = infospec(&["spectrum", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("/source") && err.contains("/channel") && err.contains("/n_grid"), "{err}");
    let o = infospec(&["spectrum"]);
    assert_eq!(o.status.code(), Some(1));
    let o = infospec(&["bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_reports_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let o = infospec(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["channel"]["input_alphabet"], 2);
}

const MC_CONFIG: &str = r#"{
    "source": {"kind": "iid", "params": {"probs": [0.2, 0.5, 0.3]}},
    "channel": {"kind": "dmc", "params": {"matrix": [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.2, 0.2, 0.6]]}},
    "n_grid": [8, 16, 32, 64],
    "evaluation": {"mode": "monte_carlo", "samples": 20000},
    "simulate": {"mode": "monte_carlo", "budget": 200},
    "seed": 11,
    "stages": ["spectrum", "bound_feinstein", "check_direct", "check_domination"]
}"#;

fn read_outputs(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let mut body = fs::read_to_string(&p).unwrap();
            if name == "manifest.json" {
                body = body.lines().filter(|l| !l.contains("created_unix")).collect::<Vec<_>>().join("\n");
            }
            (name, body)
        })
        .collect();
    files.sort();
    files
}

#[test]
fn output_is_identical_across_job_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MC_CONFIG);
    let mut runs = Vec::new();
    for (jobs, tag) in [("1", "a"), ("4", "b"), ("4", "c")] {
        let out = tmp.path().join(tag);
        let o = infospec(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(read_outputs(&out));
    }
    assert!(runs[0].len() >= 6);
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
    for (name, body) in &runs[0] {
        if name.ends_with(".csv") {
            assert!(body.starts_with("# config_sha256="), "{name}");
            assert!(body.lines().next().unwrap().ends_with("seed=11"), "{name}");
        }
    }
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MC_CONFIG);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    infospec(&["spectrum", "--config", &cfg, "--out", a.to_str().unwrap()]);
    infospec(&["spectrum", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "12"]);
    let sa = fs::read_to_string(a.join("spectrum_entropy.csv")).unwrap();
    let sb = fs::read_to_string(b.join("spectrum_entropy.csv")).unwrap();
    assert!(sb.lines().next().unwrap().ends_with("seed=12"));
    assert_ne!(sa, sb);
}

#[test]
fn one_spectrum_stage_gives_csvs_and_manifest() {
    let mut cfg = parse_config(MINIMAL).unwrap();
    cfg.stages = vec![Stage::Spectrum];
    let out = run_suite(&cfg).unwrap();
    let names: Vec<&str> = out.reports.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["spectrum_entropy.csv", "spectrum_information.csv", "summary.csv"]);
    let tmp = tempfile::tempdir().unwrap();
    let m = infospec_cli::emit_outputs(&out, tmp.path()).unwrap().unwrap();
    assert_eq!(m.files.len(), 3);
    assert_eq!(m.config_sha256, cfg.hash());
    assert!(tmp.path().join("manifest.json").exists());
    let entropy = &out.reports[0].body;
    // Entropy density of Bern(0.7) at n = 1 takes the values -ln 0.3 and -ln 0.7.
    assert!(entropy.contains(&format!("1,{},0.3,exact,", -(0.3f64.ln()))));
}

#[test]
fn separation_on_bsc() {
    let text = r#"{
        "source": {"kind": "iid", "params": {"probs": [0.9, 0.1]}},
        "channel": {"kind": "bsc", "params": {"crossover": 0.05}},
        "n_grid": [256, 512, 1024, 2048],
        "stages": ["check_separation"]
    }"#;
    let out = run_suite(&parse_config(text).unwrap()).unwrap();
    let verdict = out.reports.iter().find(|r| r.name == "verdict.json").unwrap();
    let v: serde_json::Value = serde_json::from_str(&verdict.body).unwrap();
    assert_eq!(v["verdict"], "transmissible");
    let c = v["c_n"].as_f64().unwrap();
    assert!((c - 0.4099).abs() <= 1e-3, "{c}");
    assert_eq!(v["inputs"]["n_grid"][3], 2048);
    assert!(out.reports.iter().any(|r| r.name == "condition_strict.csv"));
}

#[test]
fn alternating_example_pattern() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("alt");
    let o = infospec(&["example", "alternating", "--n-grid", "1..6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("example_alternating.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv.lines().skip(2).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let n: usize = r[0].parse().unwrap();
        let h: f64 = r[2].parse().unwrap();
        let i: f64 = r[3].parse().unwrap();
        let expected = if n % 2 == 0 { 2f64.ln() } else { 0.0 };
        assert!((h - expected).abs() < 1e-12, "n={n} h={h}");
        assert!((i - expected).abs() < 1e-12, "n={n} i={i}");
        assert_eq!(r[5], "0");
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("example_alternating.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "inconclusive");
}

#[test]
fn example_configs_are_valid() {
    for cfg in [ExperimentConfig::example_alternating((1..=4).collect()), ExperimentConfig::example_mixed(vec![8, 16])] {
        assert!(cfg.validate(&[]).is_empty());
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }
}

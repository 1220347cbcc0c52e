use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const A1: &str = r#"{"matrix": [[-0.3216, -1], [2, -0.3216]]}"#;
const A2: &str = r#"{"matrix": [[-0.3216, -2], [1, -0.3216]]}"#;
const EXAMPLE_SYSTEM: &str = r#"{"regimes": [
  {"label": "A1", "matrix": [[-0.3216, -1], [2, -0.3216]], "m": 1},
  {"label": "A2", "matrix": [[-0.3216, -2], [1, -0.3216]], "m": 1}
]}"#;
// Root of the planar equation for -0.3216 +- i sqrt(2), solved to 1e-11 in
// extended precision outside this crate.
const A1_TCUT: f64 = 1.42283384632;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_env(args, &[])
    }

    fn run_env(&self, args: &[&str], env: &[(&str, &str)]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dwellcut"));
        cmd.current_dir(self.dir.path()).args(args);
        for (k, _) in std::env::vars() {
            if k.starts_with("DWELLCUT_") {
                cmd.env_remove(k);
            }
        }
        for (k, v) in env {
            cmd.env(k, v);
        }
        cmd.output().unwrap()
    }
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_line(out: &Output) -> Value {
    let err = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {err}");
    serde_json::from_str(lines[0]).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn tcut_all_methods_agree_on_the_example() {
    let sb = Sandbox::new();
    for (name, text) in [("a1.json", A1), ("a2.json", A2)] {
        let f = sb.file(name, text);
        let r = json(&sb.run(&["tcut", p(&f), "--method", "all"]));
        let t = r["results"]["t_cut"].as_f64().unwrap();
        assert!((t - A1_TCUT).abs() < 1e-5, "{t}");
        let methods = r["results"]["methods"].as_array().unwrap();
        assert_eq!(methods.len(), 3);
        assert!(methods.iter().all(|m| m["status"] == "ok"));
        assert!(r["results"]["max_discrepancy"].as_f64().unwrap() <= 1e-4);
        let cert = &r["certificates"][0];
        assert_eq!(cert["verified"], true);
        assert!(cert["lower"].as_f64().unwrap() > 1.0);
    }
}

#[test]
fn tcut_of_scalar_matrix_is_zero() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1]]}"#);
    let r = json(&sb.run(&["tcut", p(&f)]));
    assert_eq!(r["results"]["t_cut"].as_f64(), Some(0.0));
}

#[test]
fn unstable_matrix_exits_two() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[1]]}"#);
    let out = sb.run(&["tcut", p(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_line(&out);
    assert_eq!(e["error"], "not_hurwitz");
    assert!(e["message"].as_str().unwrap().contains("not Hurwitz"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_file_reports_line_and_column() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", "{\"matrix\": [[-1, 2],\n  [3 -1]]}");
    let out = sb.run(&["tcut", p(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let e = error_line(&out);
    assert_eq!(e["error"], "malformed_input");
    assert_eq!(e["line"], 2);
    assert!(e["column"].as_u64().unwrap() > 0);
}

#[test]
fn non_square_and_unknown_fields_are_input_errors() {
    let sb = Sandbox::new();
    for text in [r#"{"matrix": [[-1, 0]]}"#, r#"{"matrix": [[-1]], "extra": 1}"#, r#"{"matrx": [[-1]]}"#] {
        let f = sb.file("m.json", text);
        let out = sb.run(&["tcut", p(&f)]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        error_line(&out);
    }
}

#[test]
fn planar_method_rejects_larger_matrices() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1, 0, 0], [0, -2, 0], [0, 0, -3]]}"#);
    let out = sb.run(&["tcut", p(&f), "--method", "planar"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_line(&out)["error"], "unsupported");
    let r = json(&sb.run(&["tcut", p(&f), "--method", "all"]));
    let methods = r["results"]["methods"].as_array().unwrap();
    assert_eq!(methods[1]["status"], "skipped");
    assert_eq!(methods[0]["status"], "ok");
}

#[test]
fn spectrum_override_is_used() {
    let sb = Sandbox::new();
    // Matrix with a Jordan block given with its exact structure.
    let f = sb.file(
        "m.json",
        r#"{"matrix": [[-1, 1], [0, -1]], "spectrum": [{"alpha": -1, "block_size": 2}]}"#,
    );
    let r = json(&sb.run(&["tcut", p(&f)]));
    assert_eq!(r["results"]["spectrum"]["items"][0]["block_size"], 2);
    assert!(r["results"]["t_cut"].as_f64().unwrap() > 0.0);
}

#[test]
fn least_deviation_scalar_value_is_e() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1]]}"#);
    let r = json(&sb.run(&["least-deviation", p(&f), "--T", "1"]));
    let e = std::f64::consts::E;
    let res = &r["results"];
    assert!(res["lower"].as_f64().unwrap() <= e * (1.0 + 1e-12));
    assert!(res["upper"].as_f64().unwrap() >= e * (1.0 - 1e-12));
    assert!((res["upper"].as_f64().unwrap() - e).abs() < 1e-6);
}

#[test]
fn least_deviation_on_the_example_near_threshold() {
    let sb = Sandbox::new();
    let f = sb.file("a1.json", A1);
    let plot = sb.dir.path().join("p.csv");
    let r = json(&sb.run(&["least-deviation", p(&f), "--T", "1.4239", "--plot", p(&plot)]));
    let res = &r["results"];
    let (b, bb) = (res["lower"].as_f64().unwrap(), res["upper"].as_f64().unwrap());
    assert!((b - 1.0).abs() < 1e-4 && (bb - 1.0).abs() < 1e-4, "{b} {bb}");
    assert_eq!(res["monotone"], true);
    let trace = res["trace"].as_array().unwrap();
    assert!(!trace.is_empty());
    for row in trace {
        assert!(row["next_lower"].as_f64().unwrap() >= row["lower"].as_f64().unwrap() - 1e-12);
        assert!(row["next_upper"].as_f64().unwrap() <= row["upper"].as_f64().unwrap());
    }
    assert_eq!(r["certificates"][0]["verified"], true);

    let csv = std::fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines.len(), 1001);
    let last: Vec<f64> = lines[1000].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.4239);
    assert!((last[1] - 1.0).abs() < 1e-9);
    let peak = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(peak <= bb * (1.0 + 1e-9));
}

#[test]
fn least_deviation_rejects_nonpositive_horizon() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1]]}"#);
    for t in ["0", "-1"] {
        let out = sb.run(&["least-deviation", p(&f), "--T", t]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(error_line(&out)["error"], "usage");
    }
}

#[test]
fn dwell_report_for_the_example() {
    let sb = Sandbox::new();
    let f = sb.file("sys.json", EXAMPLE_SYSTEM);
    let r = json(&sb.run(&["dwell", p(&f), "--simulate", "30", "15", "3"]));
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let c = row["critical_max_dwell"].as_f64().unwrap();
        assert!((c - (1.0 + A1_TCUT)).abs() < 1e-5, "{c}");
    }
    assert_eq!(r["results"]["all_hurwitz"], true);
    let sim = &r["results"]["simulation"];
    assert_eq!(sim["trials"], 30);
    assert!(sim["growth"].as_f64().unwrap() < 1.0);
    assert!(sim["worst_law"]["segments"].as_array().is_some());
    assert_eq!(r["certificates"].as_array().unwrap().len(), 2);
}

#[test]
fn dwell_single_regime_has_one_row() {
    let sb = Sandbox::new();
    let f = sb.file("sys.json", r#"{"regimes": [{"label": "only", "matrix": [[-1, 1], [-1, -1]], "m": 0.5, "M": 4}]}"#);
    let r = json(&sb.run(&["dwell", p(&f)]));
    assert_eq!(r["results"]["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn dwell_rejects_upper_bound_not_above_lower() {
    let sb = Sandbox::new();
    let f = sb.file(
        "sys.json",
        r#"{"regimes": [{"label": "fast", "matrix": [[-1]], "m": 2, "M": 2}]}"#,
    );
    let out = sb.run(&["dwell", p(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let e = error_line(&out);
    assert_eq!(e["error"], "invalid_system");
    assert!(e["message"].as_str().unwrap().contains("fast"));
}

#[test]
fn dwell_with_unstable_regime_reports_and_exits_two() {
    let sb = Sandbox::new();
    let f = sb.file(
        "sys.json",
        r#"{"regimes": [{"label": "s", "matrix": [[-1]], "m": 1}, {"label": "u", "matrix": [[0.5]], "m": 1}]}"#,
    );
    let out = sb.run(&["dwell", p(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"]["all_hurwitz"], false);
    assert_eq!(error_line(&out)["error"], "not_hurwitz");
}

#[test]
fn reports_are_deterministic_without_timings() {
    let sb = Sandbox::new();
    let f = sb.file("sys.json", EXAMPLE_SYSTEM);
    let args = ["dwell", p(&f), "--simulate", "20", "10", "42", "--no-timings"];
    let a = sb.run(&args);
    let b = sb.run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(r.get("timings").is_none());
    let with = json(&sb.run(&["dwell", p(&f)]));
    assert!(with["timings"]["total_seconds"].as_f64().is_some());
}

#[test]
fn config_snapshot_round_trips() {
    let sb = Sandbox::new();
    let f = sb.file("a1.json", A1);
    let first = sb.run(&["tcut", p(&f), "--tol", "1e-4", "--decision-tol", "1e-10", "--no-timings"]);
    let report = sb.file("report.json", std::str::from_utf8(&first.stdout).unwrap());
    let again = json(&sb.run(&["tcut", p(&f), "--config", p(&report), "--no-timings"]));
    let first = json(&first);
    assert_eq!(first["results"], again["results"]);
    assert_eq!(first["config"], again["config"]);
    assert_eq!(first["certificates"], again["certificates"]);
}

#[test]
fn flags_override_env_which_overrides_config_file() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1]]}"#);
    let cfg = sb.file("cfg.json", r#"{"tol": 0.01, "eps": 0.001}"#);
    let tol = |out: &Output| json(out)["config"]["tol"].as_f64().unwrap();
    assert_eq!(tol(&sb.run(&["tcut", p(&f)])), 1e-6);
    assert_eq!(tol(&sb.run(&["tcut", p(&f), "--config", p(&cfg)])), 0.01);
    let env = [("DWELLCUT_TOL", "0.02")];
    assert_eq!(tol(&sb.run_env(&["tcut", p(&f), "--config", p(&cfg)], &env)), 0.02);
    assert_eq!(tol(&sb.run_env(&["tcut", p(&f), "--config", p(&cfg), "--tol", "0.03"], &env)), 0.03);
    let eps = json(&sb.run_env(&["least-deviation", p(&f), "--T", "1"], &[("DWELLCUT_EPS", "1e-3")]));
    assert_eq!(eps["config"]["eps"].as_f64(), Some(1e-3));
}

#[test]
fn invalid_settings_are_usage_errors() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1]]}"#);
    let out = sb.run(&["tcut", p(&f), "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_line(&out)["error"], "usage");
    let cfg = sb.file("cfg.json", r#"{"tolerance": 1}"#);
    let out = sb.run(&["tcut", p(&f), "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero_and_bad_usage_exits_one() {
    let sb = Sandbox::new();
    assert_eq!(sb.run(&["--help"]).status.code(), Some(0));
    assert_eq!(sb.run(&["--version"]).status.code(), Some(0));
    assert_eq!(sb.run(&["tcut", "--help"]).status.code(), Some(0));
    for args in [&["frobnicate"][..], &["tcut"], &["tcut", "x.json", "--method", "exact"]] {
        let out = sb.run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(error_line(&out)["error"], "usage");
    }
    let out = sb.run(&["tcut", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_line(&out)["error"], "io");
}

#[test]
fn text_format_prints_table_before_report() {
    let sb = Sandbox::new();
    let f = sb.file("sys.json", EXAMPLE_SYSTEM);
    let out = sb.run(&["dwell", p(&f), "--format", "text"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("regime"));
    let brace = s.find('{').unwrap();
    let _: Value = serde_json::from_str(&s[brace..]).unwrap();
}

#[test]
fn output_flag_writes_file() {
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-2]]}"#);
    let dest = sb.dir.path().join("out.json");
    let out = sb.run(&["tcut", p(&f), "-o", p(&dest)]);
    assert!(out.status.success() && out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(r["command"]["name"], "tcut");
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn report_keys_follow_the_schema_order() {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for name in ["matrix.schema.json", "system.schema.json"] {
        let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name)).unwrap();
        let _: Value = serde_json::from_str(&text).unwrap();
    }
    let sb = Sandbox::new();
    let f = sb.file("m.json", r#"{"matrix": [[-1, 0], [0, -2]]}"#);
    let out = sb.run(&["tcut", p(&f)]);
    let text = String::from_utf8(out.stdout).unwrap();
    let positions: Vec<usize> = required
        .iter()
        .map(|k| text.find(&format!("\n  \"{k}\":")).unwrap_or_else(|| panic!("missing {k}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert!(text.find("\n  \"timings\":").unwrap() > *positions.last().unwrap());
}

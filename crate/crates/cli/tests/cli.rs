use std::path::{Path, PathBuf};
use std::process::Command;

const AFFINE: &str = r#"
[model]
kind = "affine"

[potential]
catalog = "quadratic"

[grid]
coords = [
  { kind = "polar", r = [0.0, 1.0], r_count = 3, theta_count = 3 },
  { kind = "polar", r = [0.0, 0.9], r_count = 3, theta_count = 3 },
]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn gkbrane(args: &[&str], config: &Path, out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_gkbrane"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr))
}

fn report(out: &Path, stem: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{stem}.json"))).unwrap()).unwrap()
}

#[test]
fn verify_affine_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.toml", AFFINE);
    let (code, text) = gkbrane(&["verify"], &cfg, dir.path());
    assert_eq!(code, 0, "{text}");
    let doc = report(dir.path(), "report");
    assert_eq!(doc["schema_version"], 1);
    assert!(doc["summary"]["extrema"]["star1"].as_f64().unwrap() < 1e-8);
    assert!(doc["summary"]["extrema"]["metric_error"].as_f64().unwrap() < 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 82);
}

#[test]
fn positivity_required_outside_disc_fails() {
    let dir = tempfile::tempdir().unwrap();
    let text = AFFINE.replace("r = [0.0, 0.9]", "r = [1.5, 1.5]") + "\n[tolerances]\nrequire_positive = true\n";
    let cfg = write_config(dir.path(), "run.toml", &text);
    let (code, _) = gkbrane(&["verify"], &cfg, dir.path());
    assert_eq!(code, 1);
    let doc = report(dir.path(), "report");
    assert_eq!(doc["records"][0]["flags"]["positive"], false);
}

#[test]
fn cotangent_quadratic_is_flat() {
    // i ddbar |q|^2 = 2 dx ^ dy per coordinate, so the metric is 2 times the flat one
    let dir = tempfile::tempdir().unwrap();
    let text = AFFINE.replace("kind = \"affine\"", "kind = \"cotangent\"\nn = 2");
    let cfg = write_config(dir.path(), "run.toml", &text);
    let (code, text) = gkbrane(&["verify"], &cfg, dir.path());
    assert_eq!(code, 0, "{text}");
    let doc = report(dir.path(), "report");
    assert!((doc["summary"]["extrema"]["min_eig"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &format!("{AFFINE}\n[extra]\nx = 1\n"));
    assert_eq!(gkbrane(&["verify"], &cfg, dir.path()).0, 2);
    let cfg = write_config(dir.path(), "sample.toml", &format!("{AFFINE}\n[sample]\ncount = 4\nradius = 0.5\n"));
    assert_eq!(gkbrane(&["verify"], &cfg, dir.path()).0, 2);
    // the seed can come from the command line
    assert_eq!(gkbrane(&["verify", "--seed", "5"], &cfg, dir.path()).0, 0);
    let o = Command::new(env!("CARGO_BIN_EXE_gkbrane")).arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_locates_unit_circle() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
kind = "affine"
[potential]
catalog = "quadratic"
[grid]
coords = [{ kind = "fixed", re = 0.0, im = 0.0 }, { kind = "box", re = [0.0, 0.9], im = [0.0, 0.0], re_count = 4, im_count = 1 }]
[[rays]]
origin = [[0.0, 0.0], [0.0, 0.0]]
direction = [[0.0, 0.0], [0.6, 0.8]]
r_max = 1.7
samples = 18
"#;
    let cfg = write_config(dir.path(), "scan.toml", text);
    let (code, out) = gkbrane(&["scan"], &cfg, dir.path());
    assert_eq!(code, 0, "{out}");
    let doc = report(dir.path(), "report");
    let b = doc["summary"]["boundaries"][0].as_array().unwrap();
    assert_eq!(b.len(), 1);
    assert!((b[0].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn complete_potential_has_no_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
kind = "affine"
[potential]
catalog = "dilog"
c = 2.0
[grid]
coords = [{ kind = "fixed", re = 0.3, im = 0.0 }, { kind = "polar", r = [0.5, 10.0], r_count = 4, theta_count = 4 }]
[[rays]]
origin = [[0.3, 0.0], [0.0, 0.0]]
direction = [[0.0, 0.0], [1.0, 0.0]]
r_max = 10.0
samples = 40
[tolerances]
require_positive = true
"#;
    let cfg = write_config(dir.path(), "scan.toml", text);
    let (code, out) = gkbrane(&["scan"], &cfg, dir.path());
    assert_eq!(code, 0, "{out}");
    assert!(report(dir.path(), "report")["summary"]["boundaries"][0].as_array().unwrap().is_empty());
}

#[test]
fn flow_zero_potential_gives_zero_form() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
kind = "affine"
[potential]
expr = "0 * t"
[grid]
coords = [{ kind = "fixed", re = 0.2, im = 0.1 }, { kind = "box", re = [-0.3, 0.3], im = [0.2, 0.2], re_count = 2, im_count = 1 }]
"#;
    let cfg = write_config(dir.path(), "flow.toml", text);
    let (code, out) = gkbrane(&["flow"], &cfg, dir.path());
    assert_eq!(code, 0, "{out}");
    let doc = report(dir.path(), "report");
    for rec in doc["records"].as_array().unwrap() {
        for (k, v) in rec["values"].as_object().unwrap() {
            if k.starts_with("f_") {
                assert_eq!(v.as_f64().unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn flow_affine_small_potential() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
kind = "affine"
[potential]
expr = "eps * (|q1|^2 + |q2|^2)"
params = { eps = 0.1 }
[grid]
coords = [{ kind = "fixed", re = 0.2, im = 0.1 }, { kind = "box", re = [-0.3, 0.3], im = [0.2, 0.2], re_count = 2, im_count = 1 }]
"#;
    let cfg = write_config(dir.path(), "flow.toml", text);
    let (code, out) = gkbrane(&["flow", "--threads", "2"], &cfg, dir.path());
    assert_eq!(code, 0, "{out}");
    assert!(report(dir.path(), "report")["summary"]["extrema"]["star1"].as_f64().unwrap() < 1e-5);
}

#[test]
fn golden_roundtrip_and_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{AFFINE}\n[golden]\npath = \"golden.json\"\ncommand = \"verify\"\n");
    let cfg = write_config(dir.path(), "run.toml", &text);
    assert_eq!(gkbrane(&["verify"], &cfg, dir.path()).0, 0);
    std::fs::copy(dir.path().join("report.json"), dir.path().join("golden.json")).unwrap();
    let (code, out) = gkbrane(&["golden"], &cfg, dir.path());
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("no differences"));

    // a second run is identical byte for byte
    assert_eq!(gkbrane(&["verify"], &cfg, dir.path()).0, 0);
    assert_eq!(std::fs::read(dir.path().join("report.json")).unwrap(), std::fs::read(dir.path().join("golden.json")).unwrap());

    let mut golden = report(dir.path(), "golden");
    let v = golden["records"][3]["values"]["min_eig"].as_f64().unwrap();
    golden["records"][3]["values"]["min_eig"] = serde_json::json!(v + 1e-6);
    std::fs::write(dir.path().join("golden.json"), serde_json::to_string(&golden).unwrap()).unwrap();
    let (code, out) = gkbrane(&["golden"], &cfg, dir.path());
    assert_eq!(code, 1);
    assert!(out.contains("1 differences") && out.contains("records[3].values.min_eig"), "{out}");
}

#[test]
fn golden_without_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{AFFINE}\n[golden]\npath = \"missing.json\"\ncommand = \"verify\"\n");
    let cfg = write_config(dir.path(), "run.toml", &text);
    assert_eq!(gkbrane(&["golden"], &cfg, dir.path()).0, 2);
}

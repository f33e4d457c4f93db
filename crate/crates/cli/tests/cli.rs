use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pencil(args: &[&str], env_cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pencil"));
    cmd.args(args).env_remove("PENCIL_CACHE_DIR");
    if let Some(dir) = env_cache {
        cmd.env("PENCIL_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn random_spec(dir: &TempDir, name: &str, seed: u64, pqd: [u32; 3]) -> PathBuf {
    let path = dir.path().join(name);
    let [p, q, d] = pqd.map(|v| v.to_string());
    let out = pencil(
        &["random-spec", "--seed", &seed.to_string(), "--p", &p, "--q", &q, "--d", &d, "--out", path.to_str().unwrap()],
        None,
    );
    assert!(out.status.success());
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema() -> Value {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Enough of JSON Schema for the shipped report schema.
fn conforms(v: &Value, s: &Value, root: &Value) -> bool {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return conforms(v, &root["$defs"][name], root);
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        return alts.iter().filter(|a| conforms(v, a, root)).count() == 1;
    }
    if let Some(c) = s.get("const") {
        return v == c;
    }
    if let Some(options) = s.get("enum").and_then(Value::as_array) {
        return options.contains(v);
    }
    match s.get("type").and_then(Value::as_str) {
        Some("null") => return v.is_null(),
        Some("object") if !v.is_object() => return false,
        Some("array") if !v.is_array() => return false,
        Some("integer") => return v.is_i64() || v.is_u64(),
        Some("number") => return v.is_number(),
        Some("string") => return v.is_string(),
        Some("boolean") => return v.is_boolean(),
        _ => {}
    }
    if let Some(req) = s.get("required").and_then(Value::as_array) {
        if !req.iter().all(|k| v.get(k.as_str().unwrap()).is_some()) {
            return false;
        }
    }
    if let Some(props) = s.get("properties").and_then(Value::as_object) {
        for (k, ps) in props {
            if let Some(x) = v.get(k) {
                if !conforms(x, ps, root) {
                    return false;
                }
            }
        }
    }
    if let Some(items) = s.get("items") {
        if !v.as_array().unwrap().iter().all(|x| conforms(x, items, root)) {
            return false;
        }
    }
    true
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"p\": 1,").unwrap();
    let out = pencil(&["check", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degree_mismatch_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"p":1,"q":1,"d":2,"F":[{"exps":[1,0,0],"re":"1"}],"G":[{"exps":[2,0,0],"re":"1"}]}"#).unwrap();
    assert_eq!(pencil(&["check", path.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn singular_cubic_fails_the_check_with_a_witness() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("xyz.toml");
    std::fs::write(
        &path,
        r#"p = 1
q = 1
d = 3
F = [{ exps = [1, 1, 1], re = "1" }]
G = [{ exps = [3, 0, 0], re = "1" }, { exps = [0, 3, 0], re = "1" }, { exps = [0, 0, 3], re = "1", im = "0" }]
"#,
    )
    .unwrap();
    let out = pencil(&["check", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let smooth_f = &report["stages"]["genericity"]["smooth_f"];
    assert_eq!(smooth_f["verdict"], "fail");
    assert!(!smooth_f["witnesses"].as_array().unwrap().is_empty());
    assert!(report["stages"]["monodromy"].is_null());
}

#[test]
fn cubic_report_with_cache_and_svg() {
    let dir = TempDir::new().unwrap();
    let spec = random_spec(&dir, "cubic.json", 1, [1, 1, 3]);
    let cache = dir.path().join("cache");
    let svg = dir.path().join("paths.svg");
    let args = ["report", spec.to_str().unwrap(), "--svg-out", svg.to_str().unwrap()];

    let first = pencil(&args, Some(&cache));
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let report = json(&first);
    assert!(conforms(&report, &schema(), &schema()));
    assert_eq!(report["seed"], 1);
    assert_eq!(report["tolerances"]["tol_scale"], 1.0);
    let mono = &report["stages"]["monodromy"];
    let matrices = mono["matrices"].as_array().unwrap();
    assert_eq!(matrices.len(), 12);
    for m in matrices {
        let rows = m.as_array().unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 10));
    }
    assert_eq!(mono["audit"]["product_is_identity"], true);
    for c in report["stages"]["verify"]["checks"].as_array().unwrap() {
        assert_eq!(c["verdict"], "pass", "{c}");
    }

    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 12);
    assert_eq!(text.matches("<polyline").count(), 12);

    let second = pencil(&args, Some(&cache));
    assert_eq!(second.stdout, first.stdout);
    let timings: Value = serde_json::from_slice(second.stderr.split(|b| *b == b'\n').next().unwrap()).unwrap();
    let stages = timings["timings"].as_array().unwrap();
    assert!(stages.iter().filter(|t| t["stage"] != "verify").all(|t| t["cached"] == true));
}

#[test]
fn tampered_cache_surfaces_as_failure() {
    let dir = TempDir::new().unwrap();
    let spec = random_spec(&dir, "cubic.json", 1, [1, 1, 3]);
    let cache = dir.path().join("cache");
    let cache_arg = cache.to_str().unwrap();
    assert!(pencil(&["monodromy", spec.to_str().unwrap(), "--cache-dir", cache_arg], None).status.success());

    let mut tampered = false;
    for entry in std::fs::read_dir(&cache).unwrap() {
        let path = entry.unwrap().path();
        let mut v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        if let Some(m) = v["payload"].get_mut("matrices") {
            let x = m[0][0][0].as_i64().unwrap();
            m[0][0][0] = Value::from(2 * x);
            std::fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
            tampered = true;
        }
    }
    assert!(tampered);
    let out = pencil(&["verify", spec.to_str().unwrap(), "--cache-dir", cache_arg], None);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let first = &report["stages"]["monodromy"]["audit"]["matrices"][0];
    assert_eq!(first["preserves_form"], false);
}

#[test]
fn single_check_report() {
    let dir = TempDir::new().unwrap();
    let spec = random_spec(&dir, "cubic.json", 1, [1, 1, 3]);
    let out = pencil(&["verify", spec.to_str().unwrap(), "--check=transitivity"], None);
    assert_eq!(out.status.code(), Some(0));
    let checks = json(&out)["stages"]["verify"]["checks"].as_array().unwrap().clone();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["check"], "transitivity");
    assert_eq!(checks[0]["witnesses"].as_array().unwrap().len(), 12);
}

#[test]
fn unknown_check_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let spec = random_spec(&dir, "cubic.json", 1, [1, 1, 3]);
    let out = pencil(&["verify", spec.to_str().unwrap(), "--check=everything"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conic_monodromy_includes_zero() {
    let dir = TempDir::new().unwrap();
    let spec = random_spec(&dir, "conic.json", 3, [2, 1, 1]);
    let svg = dir.path().join("conic.svg");
    let out = pencil(&["--seed", "3", "monodromy", spec.to_str().unwrap(), "--svg-out", svg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert!(conforms(&report, &schema(), &schema()));
    let paths = report["stages"]["monodromy"]["system"]["paths"].as_array().unwrap();
    assert!(paths.iter().any(|p| p["target"]["kind"] == "zero"));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 2);
    assert_eq!(text.matches("<polyline").count(), 2);
}

#[test]
fn flags_are_echoed() {
    let dir = TempDir::new().unwrap();
    let spec = random_spec(&dir, "cubic.json", 1, [1, 1, 3]);
    let out = pencil(&["critical", spec.to_str().unwrap(), "--seed", "5", "--tol-scale", "0.5", "--precision", "double-double"], None);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["tolerances"]["tol_scale"], 0.5);
    assert_eq!(report["tolerances"]["precision"], "double-double");
    assert_eq!(report["stages"]["critical"]["values"].as_array().unwrap().len(), 12);
    assert_eq!(report["stages"]["critical"]["base_points"].as_array().unwrap().len(), 9);
}

//! Deterministic artifact writing: sorted keys, fixed float format, an
//! index with content hashes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::checks::Outcome;
use crate::config::ConfigError;

/// Pretty JSON with sorted keys and floats in `{:.16e}` (17 significant
/// digits, round-trips `f64`).
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                let _ = write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so iteration is sorted
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(
    dir: &Path,
    file: &str,
    text: &str,
    artifacts: &mut Vec<Value>,
) -> Result<(), ConfigError> {
    let path = dir.join(file);
    fs::write(&path, text)
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;
    artifacts.push(json!({ "file": file, "sha256": sha256(text.as_bytes()) }));
    Ok(())
}

/// Writes `<name>.json`, `<name>.csv`, optional certificates and `index.json`.
pub fn write_all(dir: &Path, outcomes: &[Outcome], certificates: bool) -> Result<(), ConfigError> {
    fs::create_dir_all(dir)
        .map_err(|e| ConfigError(format!("cannot create {}: {e}", dir.display())))?;
    let mut artifacts = Vec::new();
    let mut checks = Vec::new();
    for o in outcomes {
        let doc = json!({
            "name": o.name,
            "type": o.kind,
            "passed": o.passed,
            "summary": o.summary,
            "report": o.report,
        });
        write(
            dir,
            &format!("{}.json", o.name),
            &to_json(&doc),
            &mut artifacts,
        )?;
        if let Some(csv) = &o.csv {
            write(dir, &format!("{}.csv", o.name), csv, &mut artifacts)?;
        }
        if let (true, Some(cert)) = (certificates, &o.certificate) {
            write(
                dir,
                &format!("{}.certificate.json", o.name),
                &to_json(cert),
                &mut artifacts,
            )?;
        }
        checks.push(json!({ "name": o.name, "type": o.kind, "passed": o.passed }));
    }
    let index = json!({
        "passed": outcomes.iter().all(|o| o.passed),
        "checks": checks,
        "artifacts": artifacts,
    });
    let path = dir.join("index.json");
    fs::write(&path, to_json(&index))
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))
}

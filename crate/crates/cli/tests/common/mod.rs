//! Shared helpers for CLI integration tests: running the binary, fixture
//! datasets, and a small JSON-schema checker for the shipped report schema.

use std::path::Path;
use std::process::{Command, Output};

pub fn xcorr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xcorr"))
}

pub fn run(args: &[&str]) -> Output {
    xcorr().args(args).output().expect("binary runs")
}

pub fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Deterministic synthetic price CSV: `n` stocks over `days` days driven by
/// one common factor, plus optional per-call tweaks via the closure.
pub fn price_csv(n: usize, days: usize, seed: u64) -> String {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = xcorr_core::rng::substream(seed, "cli-test-prices", &[]);
    let market: Vec<f64> = (0..days).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut out = String::from("date,ticker,close\n");
    for i in 0..n {
        let mut price = 50.0 + i as f64;
        for (d, m) in market.iter().enumerate() {
            let noise: f64 = StandardNormal.sample(&mut rng);
            price *= (0.015f64 * (0.7 * m + 0.7 * noise)).exp();
            let date = chrono::NaiveDate::from_num_days_from_ce_opt(731000 + d as i32).unwrap();
            out.push_str(&format!("{date},S{i:02},{price:.8}\n"));
        }
    }
    out
}

pub fn write(path: &Path, content: &str) {
    std::fs::write(path, content).expect("fixture write");
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Validate `value` against the subset of JSON Schema the shipped report
/// schema uses: type, required, properties, additionalProperties (false or
/// schema), items, enum, oneOf.
pub fn validate_schema(schema: &serde_json::Value, value: &serde_json::Value, path: &str) -> Result<(), String> {
    use serde_json::Value;

    if let Some(one_of) = schema.get("oneOf").and_then(Value::as_array) {
        let mut errors = Vec::new();
        for candidate in one_of {
            match validate_schema(candidate, value, path) {
                Ok(()) => return Ok(()),
                Err(e) => errors.push(e),
            }
        }
        return Err(format!("{path}: no oneOf branch matched ({})", errors.join(" | ")));
    }

    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            other => return Err(format!("{path}: unsupported schema type {other:?}")),
        };
        if !ok {
            return Err(format!("{path}: expected {ty}, got {value}"));
        }
    }

    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in enum {allowed:?}"));
        }
    }

    if let Some(object) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !object.contains_key(key) {
                    return Err(format!("{path}: missing required key {key:?}"));
                }
            }
        }
        let properties = schema.get("properties").and_then(Value::as_object);
        let additional = schema.get("additionalProperties");
        for (key, item) in object {
            let child_path = format!("{path}.{key}");
            if let Some(prop_schema) = properties.and_then(|p| p.get(key)) {
                validate_schema(prop_schema, item, &child_path)?;
            } else {
                match additional {
                    Some(Value::Bool(false)) => {
                        return Err(format!("{path}: unexpected key {key:?}"));
                    }
                    Some(Value::Bool(true)) | None => {}
                    Some(extra_schema) => validate_schema(extra_schema, item, &child_path)?,
                }
            }
        }
    }

    if let (Some(items), Some(array)) = (schema.get("items"), value.as_array()) {
        for (k, item) in array.iter().enumerate() {
            validate_schema(items, item, &format!("{path}[{k}]"))?;
        }
    }

    Ok(())
}

pub fn report_schema() -> serde_json::Value {
    let text = include_str!("../../schema/report.schema.json");
    serde_json::from_str(text).expect("schema document parses")
}

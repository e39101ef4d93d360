//! Report documents and their text and structured renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use kenmotsu_core::expr::Rational;
use kenmotsu_core::numeric::evaluate;
use kenmotsu_core::tensor::Tensor02;
use kenmotsu_core::verify::CheckResult;
use kenmotsu_core::{CoeffExpr, FrameVectorField, FramedManifold};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "kenmotsu";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

/// A key-sorted document. `serde_json::Map` keeps keys in a `BTreeMap`, so
/// serialization is byte-deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub root: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, source_label: &str, source: &str) -> Self {
        let mut root = Map::new();
        root.insert(
            "tool".into(),
            json!({ "name": TOOL_NAME, "version": env!("CARGO_PKG_VERSION") }),
        );
        root.insert("command".into(), json!(command));
        root.insert(
            "input".into(),
            json!({ "source": source_label, "sha256": sha256_hex(source) }),
        );
        root.insert("checks".into(), json!([]));
        Report { root }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.root.insert(key.into(), value);
    }

    pub fn push_checks(&mut self, checks: Vec<Value>) {
        if let Some(Value::Array(a)) = self.root.get_mut("checks") {
            a.extend(checks);
        }
    }

    /// True when no entry of `checks` has status `fail`.
    pub fn checks_pass(&self) -> bool {
        match self.root.get("checks") {
            Some(Value::Array(a)) => a.iter().all(|c| c["status"] != "fail"),
            _ => true,
        }
    }
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Values used for the numeric spot evaluations, at every coordinate equal
/// to one.
pub struct Spot {
    point: BTreeMap<String, Rational>,
    digits: u32,
}

impl Spot {
    pub fn new(m: &FramedManifold, digits: u32) -> Self {
        let point = m
            .coords()
            .iter()
            .map(|c| (c.clone(), Rational::from_integer(1.into())))
            .collect();
        Spot { point, digits }
    }

    /// Decimal value, or null when the expression has free parameters.
    pub fn value(&self, e: &CoeffExpr) -> Value {
        evaluate(e, &self.point, self.digits).map_or(Value::Null, |n| json!(n.to_string()))
    }

    pub fn describe(&self) -> Value {
        let point: Map<String, Value> = self
            .point
            .iter()
            .map(|(k, v)| (k.clone(), json!(v.to_string())))
            .collect();
        json!({ "point": point, "digits": self.digits })
    }
}

pub fn expr(e: &CoeffExpr) -> Value {
    json!(e.to_string())
}

pub fn opt_expr(e: Option<&CoeffExpr>) -> Value {
    e.map_or(Value::Null, expr)
}

pub fn vector(m: &FramedManifold, v: &FrameVectorField) -> Value {
    json!(v.render(m.frame_names()))
}

pub fn tensor(t: &Tensor02) -> Value {
    Value::Array(
        t.rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(expr).collect()))
            .collect(),
    )
}

pub fn check(m: &FramedManifold, spot: &Spot, c: &CheckResult) -> Value {
    let names = m.frame_names();
    let witness = match &c.witness {
        None => Value::Null,
        Some(w) => json!({
            "frames": w.frames.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
            "component": w.component.map(|i| names[i].clone()),
            "residual": expr(&w.residual),
            "residual_at_point": spot.value(&w.residual),
        }),
    };
    json!({
        "name": c.name,
        "status": if c.passed() { "pass" } else { "fail" },
        "witness": witness,
    })
}

/// A derived consistency check between two expressions.
pub fn agreement(name: &str, left: &CoeffExpr, right: &CoeffExpr) -> Value {
    let residual = left - right;
    json!({
        "name": name,
        "status": if residual.is_zero() { "pass" } else { "fail" },
        "witness": if residual.is_zero() {
            Value::Null
        } else {
            json!({ "left": expr(left), "right": expr(right), "residual": expr(&residual) })
        },
    })
}

pub fn flag(name: &str, ok: bool) -> Value {
    json!({ "name": name, "status": if ok { "pass" } else { "fail" }, "witness": Value::Null })
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(&Value::Object(report.root.clone()))
                .expect("string keys");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            text_object(&report.root, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn check_line(v: &Value) -> Option<String> {
    let status = v.get("status")?.as_str()?;
    let name = v.get("name")?.as_str()?;
    let mut line = format!("{} {name}", status.to_uppercase());
    if let Some(w) = v.get("witness").filter(|w| !w.is_null()) {
        let mut parts = Vec::new();
        if let Some(frames) = w.get("frames").and_then(Value::as_array) {
            let f: Vec<String> = frames.iter().filter_map(scalar).collect();
            parts.push(format!("at ({})", f.join(", ")));
        }
        if let Some(c) = w.get("component").and_then(Value::as_str) {
            parts.push(format!("component {c}"));
        }
        if let Some(r) = w.get("residual").and_then(Value::as_str) {
            parts.push(format!("residual {r}"));
        }
        let _ = write!(line, ": {}", parts.join(", "));
    }
    Some(line)
}

fn table(rows: &[Value], pad: &str, out: &mut String) -> bool {
    let cells: Option<Vec<Vec<String>>> = rows
        .iter()
        .map(|r| r.as_array().and_then(|r| r.iter().map(scalar).collect()))
        .collect();
    let Some(cells) = cells else {
        return false;
    };
    let cols = cells.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| cells.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, c)| format!("{c:>w$}", w = widths[j]))
            .collect();
        let _ = writeln!(out, "{pad}  [ {} ]", line.join("  "));
    }
    true
}

fn text_value(key: &str, v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    match v {
        Value::Array(items) if items.is_empty() => {
            let _ = writeln!(out, "{pad}{key}: (none)");
        }
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            let s: Vec<String> = items.iter().filter_map(scalar).collect();
            let _ = writeln!(out, "{pad}{key}: {}", s.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            if table(items, &pad, out) {
                return;
            }
            for item in items {
                if let Some(line) = check_line(item) {
                    let _ = writeln!(out, "{pad}  {line}");
                } else if let Value::Object(o) = item {
                    let _ = writeln!(out, "{pad}  -");
                    text_object(o, indent + 4, out);
                }
            }
        }
        Value::Object(o) => {
            let _ = writeln!(out, "{pad}{key}:");
            text_object(o, indent + 2, out);
        }
        _ => unreachable!("scalars handled above"),
    }
}

fn text_object(o: &Map<String, Value>, indent: usize, out: &mut String) {
    for (k, v) in o {
        text_value(k, v, indent, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn empty_check_list_is_a_valid_document() {
        let r = Report::new("check", "inline", "");
        let s = emit_report(&r, Format::Structured);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert!(r.checks_pass());
        assert!(emit_report(&r, Format::Text).contains("checks: (none)"));
    }

    #[test]
    fn keys_are_sorted() {
        let mut r = Report::new("check", "inline", "");
        r.insert("zeta", json!(1));
        r.insert("alpha", json!({ "b": 1, "a": 2 }));
        let s = emit_report(&r, Format::Structured);
        let a = s.find("\"alpha\"").unwrap();
        let z = s.find("\"zeta\"").unwrap();
        assert!(a < z);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }
}

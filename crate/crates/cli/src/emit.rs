use serde_json::Value;

use crate::args::Emit;
use crate::report::Report;

pub fn render(report: &Report, format: Emit) -> String {
    match format {
        Emit::Json => json(report),
        Emit::Csv => csv(report),
        Emit::Md => markdown(report),
    }
}

pub fn json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// Leaf values of `value` as `(dotted.path, text)` pairs; nulls become empty.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: String, value: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match value {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(key(k), v, out)),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(key(&i.to_string()), v, out)),
            Value::Null => out.push((prefix, String::new())),
            Value::String(s) => out.push((prefix, s.clone())),
            other => out.push((prefix, other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk(String::new(), value, &mut out);
    out
}

fn header_rows(report: &Report) -> Vec<(String, String)> {
    let mut rows = vec![
        ("command".to_string(), report.command.clone()),
        ("status".to_string(), json_word(&report.status)),
        ("timing_ms".to_string(), report.timing_ms.to_string()),
    ];
    rows.extend(
        report
            .inputs
            .iter()
            .map(|(k, v)| (format!("inputs.{k}"), v.clone())),
    );
    rows
}

fn json_word<T: serde::Serialize>(value: &T) -> String {
    match serde_json::to_value(value).expect("serializes") {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Two columns, `key,value`, one row per leaf.
pub fn csv(report: &Report) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["key", "value"])
        .expect("in-memory write");
    let results = flatten(&report.results)
        .into_iter()
        .map(|(k, v)| (format!("results.{k}"), v));
    for (k, v) in header_rows(report).into_iter().chain(results) {
        writer.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

fn cell(text: &str) -> String {
    text.replace('|', "\\|")
}

pub fn markdown(report: &Report) -> String {
    let mut out = format!("# iitaka {}\n\n", report.command);
    out += &format!(
        "status: **{}**, timing_ms: {}\n\n",
        json_word(&report.status),
        report.timing_ms
    );
    if !report.inputs.is_empty() {
        out += "## Inputs\n\n| key | value |\n|---|---|\n";
        for (k, v) in &report.inputs {
            out += &format!("| {} | {} |\n", cell(k), cell(v));
        }
        out += "\n";
    }
    let checks = report.checks();
    if !checks.is_empty() {
        out += "## Checks\n\n| check | expected | observed | ok |\n|---|---|---|---|\n";
        for c in &checks {
            out += &format!(
                "| {} | {} | {} | {} |\n",
                cell(&c.name),
                cell(&c.expected),
                cell(&c.observed),
                c.ok
            );
        }
        out += "\n";
    }
    let mut results = report.results.clone();
    if let Value::Object(map) = &mut results {
        map.remove("checks");
    }
    out += "## Results\n\n| key | value |\n|---|---|\n";
    for (k, v) in flatten(&results) {
        out += &format!("| {} | {} |\n", cell(&k), cell(&v));
    }
    out
}

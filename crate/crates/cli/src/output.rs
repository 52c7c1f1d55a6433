use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("| {} |\n", self.columns.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        out.push_str(&format!("|{}\n", "---|".repeat(self.columns.len())));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | ")));
        }
        out
    }

    pub fn csv(&self) -> Result<String, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }

    /// Rows as objects keyed by column title.
    pub fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), Value::String(v.clone())))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

pub struct Meta {
    pub enabled: bool,
    pub catalog: String,
}

impl Meta {
    pub fn json(&self) -> Option<Value> {
        self.enabled.then(|| {
            json!({
                "version": env!("CARGO_PKG_VERSION"),
                "generated_unix": unix_now(),
                "catalog": self.catalog,
            })
        })
    }

    pub fn footer(&self) -> Option<String> {
        self.enabled.then(|| {
            format!(
                "pgx {} | catalog: {} | generated at unix time {}",
                env!("CARGO_PKG_VERSION"),
                self.catalog,
                unix_now()
            )
        })
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// `{"schema": 1, "command": ..., <body fields>, "meta": ...}`.
pub fn json_document(command: &str, body: Value, meta: &Meta) -> String {
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    if let Some(m) = meta.json() {
        doc.insert("meta".into(), m);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
    s.push('\n');
    s
}

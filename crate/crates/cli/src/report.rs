use distinguo_core::Count;
use serde_json::{json, Map, Value};
use std::time::Duration;

/// A command's findings: text lines for people, fields for `--json`.
#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    pub lines: Vec<String>,
    pub fields: Map<String, Value>,
    /// 0 success or equivalent, 1 negative verdict.
    pub exit: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Report::default()
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn field(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    pub fn render(&self, json: bool, args: &[String], elapsed: Duration) -> String {
        let ms = elapsed.as_secs_f64() * 1000.0;
        if json {
            let mut doc = Map::new();
            doc.insert("command".into(), json!(self.command));
            doc.insert("args".into(), json!(args));
            doc.extend(self.fields.clone());
            doc.insert("elapsed_ms".into(), json!((ms * 1000.0).round() / 1000.0));
            let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("plain JSON values serialize");
            text.push('\n');
            text
        } else {
            let mut text = String::new();
            for l in &self.lines {
                text.push_str(l);
                text.push('\n');
            }
            text.push_str(&format!("time: {ms:.1} ms\n"));
            text
        }
    }
}

/// `{"fin": k}` or `"inf"`.
pub fn count_json(c: Count) -> Value {
    match c {
        Count::Finite(k) => json!({ "fin": k }),
        Count::Infinite => json!("inf"),
    }
}

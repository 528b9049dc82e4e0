//! Canonical report serialization: object keys sorted, floats written with
//! 17 significant digits, so identical reports serialize to identical bytes.

use serde_json::Value;

/// A command report: the command echo, an optional pass verdict, the
/// command-specific payload, and residuals where meaningful.
pub struct Report {
    pub command: String,
    pub pass: Option<bool>,
    pub payload: Value,
    pub residuals: Value,
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn computation(command: &str, payload: Value) -> Self {
        Report {
            command: command.to_string(),
            pass: None,
            payload,
            residuals: Value::Null,
            wall_time_ms: None,
        }
    }

    pub fn verification(command: &str, pass: bool, payload: Value, residuals: Value) -> Self {
        Report {
            command: command.to_string(),
            pass: Some(pass),
            payload,
            residuals,
            wall_time_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.pass {
            Some(false) => 1,
            _ => 0,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("command".into(), Value::String(self.command.clone()));
        if let Some(p) = self.pass {
            map.insert("pass".into(), Value::Bool(p));
        }
        map.insert("payload".into(), self.payload.clone());
        if !self.residuals.is_null() {
            map.insert("residuals".into(), self.residuals.clone());
        }
        if let Some(ms) = self.wall_time_ms {
            map.insert("wall_time_ms".into(), serde_json::json!(ms));
        }
        Value::Object(map)
    }

    /// Canonical JSON bytes.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        write_canonical(&self.to_value(), &mut out);
        out
    }

    /// One summary line beginning PASS or FAIL.
    pub fn human_line(&self) -> String {
        let verdict = match self.pass {
            Some(false) => "FAIL",
            _ => "PASS",
        };
        format!("{} {}", verdict, self.summary())
    }

    fn summary(&self) -> String {
        let mut s = self.command.clone();
        if !self.residuals.is_null() {
            s.push(' ');
            let mut r = String::new();
            write_canonical(&self.residuals, &mut r);
            s.push_str(&r);
        }
        if let Some(ms) = self.wall_time_ms {
            s.push_str(&format!(" ({ms:.1} ms)"));
        }
        s
    }
}

/// Deterministic JSON: objects by sorted key, floats as `{:.16e}`
/// (17 significant digits), integers verbatim.
pub fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().unwrap();
                if f.is_finite() {
                    out.push_str(&format!("{f:.16e}"));
                } else {
                    out.push_str("null");
                }
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).unwrap());
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_canonical(&map[*k], out);
            }
            out.push('}');
        }
    }
}

//! Report documents and their three renderings.

use f2lab_core::gf2::PolyF2;
use f2lab_core::rational::{self, Rational};
use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
const DECIMAL_DIGITS: usize = 12;

pub fn rat(x: &Rational) -> Value {
    Value::String(rational::format(x))
}

pub fn dec(x: &Rational) -> Value {
    Value::String(rational::decimal(x, DECIMAL_DIGITS))
}

pub fn poly(p: &PolyF2) -> Value {
    Value::String(p.to_string())
}

pub fn polys(ps: &[PolyF2]) -> Value {
    ps.iter().map(poly).collect()
}

pub fn bits(bs: &[bool]) -> String {
    bs.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// JSON object under construction. Rational fields go through [`Doc::rat`],
/// which also records a decimal rendering under `decimals`.
#[derive(Debug, Default)]
pub struct Doc {
    map: Map<String, Value>,
    decimals: Map<String, Value>,
}

impl Doc {
    pub fn new() -> Self {
        Doc::default()
    }

    pub fn put(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.map.insert(key.into(), v.into());
        self
    }

    pub fn rat(mut self, key: &str, x: &Rational) -> Self {
        self.map.insert(key.into(), rat(x));
        self.decimals.insert(key.into(), dec(x));
        self
    }

    pub fn opt_rat(self, key: &str, x: Option<&Rational>) -> Self {
        match x {
            Some(x) => self.rat(key, x),
            None => self.put(key, Value::Null),
        }
    }

    pub fn into_value(mut self) -> Value {
        if !self.decimals.is_empty() {
            self.map.insert("decimals".into(), Value::Object(self.decimals));
        }
        Value::Object(self.map)
    }
}

impl From<Doc> for Value {
    fn from(d: Doc) -> Value {
        d.into_value()
    }
}

/// What a command produced: the JSON document, optionally a CSV table and a
/// hand-written text rendering.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub json: Value,
    pub csv: Option<String>,
    pub text: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, doc: impl Into<Value>) -> Self {
        Report {
            command,
            json: doc.into(),
            csv: None,
            text: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn document(&self) -> Value {
        let mut map = Map::new();
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
        map.insert("command".into(), self.command.into());
        if let Value::Object(body) = &self.json {
            for (k, v) in body {
                map.insert(k.clone(), v.clone());
            }
        }
        Value::Object(map)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.document()).expect("JSON values serialize");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| CliError::Usage(format!("csv output is not available for `{}`", self.command))),
            Format::Text => Ok(self.text.clone().unwrap_or_else(|| text_lines(&self.document()))),
        }
    }
}

/// `key: value` per top-level field; nested values stay compact JSON.
fn text_lines(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, v) in map {
            let s = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {s}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use f2lab_core::rational::ratio;

    #[test]
    fn decimals_follow_rationals() {
        let v = Doc::new().put("n", 3).rat("p", &ratio(1, 3)).into_value();
        assert_eq!(v["p"], "1/3");
        assert_eq!(v["decimals"]["p"], "0.333333333333");
    }

    #[test]
    fn document_leads_with_version() {
        let r = Report::new("x", Doc::new().put("a", 1));
        let s = r.render(Format::Json).unwrap();
        assert!(s.find("schema_version").unwrap() < s.find("\"a\"").unwrap());
        assert_eq!(r.render(Format::Text).unwrap(), "schema_version: 1\ncommand: x\na: 1\n");
        assert!(r.render(Format::Csv).is_err());
    }
}

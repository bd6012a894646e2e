//! Report documents: pretty JSON with sorted keys and every float written
//! with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The checked statement's hypotheses do not hold; nothing was violated.
    NotApplicable,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass | Status::NotApplicable => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Renders a JSON value. Object keys come out sorted because `Value` maps
/// are ordered; floats use `{:.16e}`; the text ends with a newline.
pub fn render(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialize to memory");
    let mut text = String::from_utf8(out).expect("utf-8 json");
    text.push('\n');
    text
}

/// One run's report: the command, its status, and a free-form body.
#[derive(Debug, Clone)]
pub struct Document {
    pub command: String,
    pub status: Status,
    pub body: Value,
    pub warnings: Vec<String>,
}

impl Document {
    pub fn new(command: &str, status: Status, body: impl Serialize) -> Self {
        Self {
            command: command.to_string(),
            status,
            body: serde_json::to_value(body).expect("report serializes"),
            warnings: Vec::new(),
        }
    }

    pub fn with_warnings(mut self, warnings: Vec<String>) -> Self {
        self.warnings = warnings;
        self
    }

    pub fn error(command: &str, err: &CliError) -> Self {
        let mut reason = Map::new();
        reason.insert("kind".into(), json!(err.kind()));
        reason.insert("message".into(), json!(err.to_string()));
        if let Some(line) = err.line() {
            reason.insert("line".into(), json!(line));
        }
        if let Some(path) = err.path() {
            reason.insert("path".into(), json!(path.display().to_string()));
        }
        Self {
            command: command.to_string(),
            status: Status::Error,
            body: json!({ "error": reason }),
            warnings: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.status.exit_code()
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("schema_version".into(), json!(SCHEMA_VERSION));
        top.insert("command".into(), json!(self.command));
        top.insert("status".into(), json!(self.status));
        top.insert("exit_code".into(), json!(self.exit_code()));
        top.insert("warnings".into(), json!(self.warnings));
        top.insert("report".into(), self.body.clone());
        Value::Object(top)
    }

    pub fn render(&self) -> String {
        render(&self.to_value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_and_key_order() {
        let v = json!({"zeta": 1.0, "alpha": [0.1, 2], "mid": null});
        let text = render(&v);
        let alpha = text.find("\"alpha\"").unwrap();
        let mid = text.find("\"mid\"").unwrap();
        let zeta = text.find("\"zeta\"").unwrap();
        assert!(alpha < mid && mid < zeta);
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("1.0000000000000000e0"));
        assert!(text.contains("\n    2\n"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["alpha"][0].as_f64(), Some(0.1));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 5e-324, f64::MAX] {
            let text = render(&json!({ "x": x }));
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back["x"].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn error_document() {
        let err = CliError::Missing("--f");
        let doc = Document::error("norm", &err);
        assert_eq!(doc.exit_code(), 2);
        let v = doc.to_value();
        assert_eq!(v["status"], "error");
        assert_eq!(v["report"]["error"]["kind"], "missing-input");
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
    }
}

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::OutputFormat;

/// One output line.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: String,
    pub params: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Report {
    pub fn new(kind: &str, params: Value) -> Self {
        let params = match params {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Report { kind: kind.to_string(), params, prime: None, count: None, verdict: None, elapsed_ms: 0, detail: None }
    }

    pub fn prime(mut self, p: u64) -> Self {
        self.prime = Some(p);
        self
    }

    pub fn count(mut self, c: impl ToString) -> Self {
        self.count = Some(c.to_string());
        self
    }

    pub fn verdict(mut self, v: impl ToString) -> Self {
        self.verdict = Some(v.to_string());
        self
    }

    pub fn elapsed(mut self, since: std::time::Instant) -> Self {
        self.elapsed_ms = since.elapsed().as_millis() as u64;
        self
    }

    pub fn detail(mut self, d: Value) -> Self {
        self.detail = Some(d);
        self
    }
}

/// Flat CSV row; nested fields are embedded as JSON text.
#[derive(Serialize)]
struct CsvRow<'a> {
    kind: &'a str,
    params: String,
    prime: Option<u64>,
    count: Option<&'a str>,
    verdict: Option<&'a str>,
    elapsed_ms: u64,
    detail: String,
}

pub enum Emitter {
    Json(std::io::Stdout),
    Csv(Box<csv::Writer<std::io::Stdout>>),
}

impl Emitter {
    pub fn new(format: OutputFormat) -> Self {
        match format {
            OutputFormat::Json => Emitter::Json(std::io::stdout()),
            OutputFormat::Csv => Emitter::Csv(Box::new(csv::Writer::from_writer(std::io::stdout()))),
        }
    }

    pub fn emit(&mut self, r: &Report) -> std::io::Result<()> {
        match self {
            Emitter::Json(out) => {
                let mut lock = out.lock();
                serde_json::to_writer(&mut lock, r)?;
                lock.write_all(b"\n")?;
                lock.flush()
            }
            Emitter::Csv(w) => {
                w.serialize(CsvRow {
                    kind: &r.kind,
                    params: Value::Object(r.params.clone()).to_string(),
                    prime: r.prime,
                    count: r.count.as_deref(),
                    verdict: r.verdict.as_deref(),
                    elapsed_ms: r.elapsed_ms,
                    detail: r.detail.as_ref().map(Value::to_string).unwrap_or_default(),
                })?;
                w.flush()
            }
        }
    }
}

use std::cmp::Ordering;
use std::io::{self, Write};

/// Cell of a report row.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// Flat row with keys in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        let value = value.into();
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Value::Float(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn fields(&self) -> &[(String, Value)] {
        &self.fields
    }

    fn sort_key(&self) -> (f64, f64) {
        (self.float("n").unwrap_or(f64::NAN), self.float("beta1").unwrap_or(f64::NAN))
    }
}

/// Stable sort by `(n, beta1)`.
pub fn sort_records(rows: &mut [Record]) {
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(Ordering::Equal)
    });
}

/// `printf("%.17g")`: shortest fixed or exponent form holding 17 significant digits.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if (-4..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = (exp + 1) as usize;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let frac = digits[1..].trim_end_matches('0');
        let lead = &digits[..1];
        let m = if frac.is_empty() { lead.to_string() } else { format!("{lead}.{frac}") };
        let es = if exp < 0 { '-' } else { '+' };
        format!("{sign}{m}e{es}{:02}", exp.abs())
    }
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) if f.is_finite() => fmt_g17(*f),
        Value::Float(_) => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => serde_json::to_string(s).expect("string serializes"),
    }
}

fn json_object(fields: &[(String, Value)]) -> String {
    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("key serializes"), json_value(v)))
        .collect();
    format!("{{{}}}", body.join(","))
}

/// `{"meta": {...}, "rows": [...]}` with one row per line.
pub fn to_json(meta: &Record, rows: &[Record]) -> String {
    let mut out = format!("{{\"meta\":{},\"rows\":[", json_object(meta.fields()));
    for (i, r) in rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&json_object(r.fields()));
    }
    if !rows.is_empty() {
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) => fmt_g17(*f),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.clone(),
    }
}

/// Header is `base` followed by every other key in order of first appearance.
pub fn to_csv(base: &[&str], rows: &[Record]) -> io::Result<Vec<u8>> {
    let mut header: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    for r in rows {
        for (k, _) in r.fields() {
            if !header.iter().any(|h| h == k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        let line: Vec<String> = header
            .iter()
            .map(|h| r.get(h).map(csv_value).unwrap_or_default())
            .collect();
        w.write_record(&line)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

pub fn write_bytes(out: &mut dyn Write, bytes: &[u8]) -> io::Result<usize> {
    out.write_all(bytes)?;
    out.flush()?;
    Ok(bytes.len())
}

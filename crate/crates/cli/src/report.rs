use std::fmt::Write;

/// Twelve significant digits: fixed notation for moderate exponents,
/// scientific otherwise.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, x)
    } else {
        format!("{mantissa}e{exp}")
    }
}

#[derive(Debug, Clone)]
pub enum Field {
    Num(f64),
    Int(usize),
    Text(String),
    Flag(bool),
}

impl Field {
    fn plain(&self) -> String {
        match self {
            Field::Num(x) => sig12(*x),
            Field::Int(n) => n.to_string(),
            Field::Text(s) => s.clone(),
            Field::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Num(x) if !x.is_finite() => "null".into(),
            Field::Text(s) => serde_json::to_string(s).expect("string serializes"),
            other => other.plain(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Field::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            other => other.plain(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Ordered key/value output of one command.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(&'static str, Field)>,
}

impl Report {
    pub fn num(mut self, key: &'static str, x: f64) -> Self {
        self.fields.push((key, Field::Num(x)));
        self
    }

    pub fn int(mut self, key: &'static str, n: usize) -> Self {
        self.fields.push((key, Field::Int(n)));
        self
    }

    pub fn text(mut self, key: &'static str, s: impl Into<String>) -> Self {
        self.fields.push((key, Field::Text(s.into())));
        self
    }

    pub fn flag(mut self, key: &'static str, b: bool) -> Self {
        self.fields.push((key, Field::Flag(b)));
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for (k, v) in &self.fields {
                    writeln!(out, "{k} {}", v.plain()).unwrap();
                }
            }
            Format::Json => {
                let body: Vec<String> = self.fields.iter().map(|(k, v)| format!("\"{k}\": {}", v.json())).collect();
                writeln!(out, "{{{}}}", body.join(", ")).unwrap();
            }
            Format::Csv => {
                let keys: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
                let values: Vec<String> = self.fields.iter().map(|(_, v)| v.csv()).collect();
                writeln!(out, "{}\n{}", keys.join(","), values.join(",")).unwrap();
            }
        }
        out
    }
}

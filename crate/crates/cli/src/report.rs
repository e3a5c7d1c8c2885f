//! Deterministic `key: value` reports.

use std::fmt::Display;

#[derive(Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut r = Report::default();
        r.kv("command", command);
        r
    }

    pub fn kv(&mut self, key: &str, value: impl Display) {
        let v = value.to_string();
        let v = match v.parse::<f64>() {
            Ok(x) if !v.contains(char::is_alphabetic) || !x.is_finite() => num(x),
            _ => v,
        };
        self.lines.push(format!("{key}: {v}"));
    }

    pub fn opt(&mut self, key: &str, value: Option<impl Display>) {
        match value {
            Some(v) => self.kv(key, v),
            None => self.kv(key, "none"),
        }
    }

    pub fn section(&mut self, name: &str) {
        self.lines.push(format!("[{name}]"));
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Comma-separated rows with a header; floats in shortest round-trip form.
pub struct Csv {
    rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &[String]) -> Csv {
        Csv { rows: vec![header.join(",")] }
    }

    pub fn row(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
    }

    pub fn text(&self) -> String {
        let mut s = self.rows.join("\n");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(1e-6), "1e-6");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(f64::INFINITY), "inf");
        let mut r = Report::new("x");
        r.kv("a", 1e-10);
        r.kv("b", "linear");
        r.kv("c", 3usize);
        assert_eq!(r.text(), "command: x\na: 1e-10\nb: linear\nc: 3\n");
    }
}

//! Plain-text reports: `# key=value` metadata lines followed by named CSV tables.
//!
//! ```text
//! # command=analyze
//! # lower=1.0
//! ## table vectors
//! index,label,norm_sqr,dual_diagonal
//! 0,0,1.0,1.0
//! ```

use std::fmt::Write as _;

use super::frame_file::fmt_f64;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(
            row.len(),
            self.header.len(),
            "row width for table {}",
            self.name
        );
        self.rows.push(row);
    }

    /// Column values by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    pub fn set_f64(&mut self, key: &str, value: f64) {
        self.set(key, fmt_f64(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "## table {}", t.name);
            let _ = writeln!(out, "{}", t.header.join(","));
            for row in &t.rows {
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Self {
        let mut report = Self::default();
        let mut current: Option<Table> = None;
        for line in text.lines() {
            if let Some(name) = line.strip_prefix("## table ") {
                report.tables.extend(current.take());
                current = Some(Table {
                    name: name.to_string(),
                    ..Table::default()
                });
            } else if let Some(kv) = line.strip_prefix("# ") {
                if let Some((k, v)) = kv.split_once('=') {
                    report.meta.push((k.to_string(), v.to_string()));
                }
            } else if let Some(t) = current.as_mut() {
                let cells: Vec<String> = line.split(',').map(str::to_string).collect();
                if t.header.is_empty() {
                    t.header = cells;
                } else {
                    t.rows.push(cells);
                }
            }
        }
        report.tables.extend(current);
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let mut r = Report::new("analyze");
        r.set_f64("lower", 0.25);
        let mut t = Table::new("vectors", &["index", "value"]);
        t.push(vec!["0".into(), fmt_f64(1.0 / 3.0)]);
        r.tables.push(t);
        let text = r.render();
        assert!(
            text.starts_with("# command=analyze\n# lower=0.25\n## table vectors\nindex,value\n")
        );
        let back = Report::parse(&text);
        assert_eq!(back, r);
        assert_eq!(back.get_f64("lower"), Some(0.25));
        assert_eq!(
            back.table("vectors").unwrap().column("value").unwrap(),
            vec![fmt_f64(1.0 / 3.0)]
        );
    }
}

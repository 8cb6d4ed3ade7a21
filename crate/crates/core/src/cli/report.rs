//! Deterministic report rendering in text, JSON or CSV.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A rectangular table, e.g. a parameter scan.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub results: Vec<(String, String)>,
    pub verdicts: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub table: Option<Table>,
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl Report {
    pub fn new(command: String, digest: String) -> Self {
        Self { command, digest, results: Vec::new(), verdicts: Vec::new(), notes: Vec::new(), table: None }
    }

    pub fn result(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.results.push((key.into(), value.to_string()));
        self
    }

    pub fn verdict(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.verdicts.push((key.into(), value.to_string()));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = format!("command: {}\ninput-sha256: {}\n", self.command, self.digest);
        let sections = [("results", &self.results), ("verdicts", &self.verdicts)];
        for (name, entries) in sections {
            if entries.is_empty() {
                continue;
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        if let Some(t) = &self.table {
            out.push_str("[table]\n");
            out.push_str(&t.header.join(" | "));
            out.push('\n');
            for r in &t.rows {
                out.push_str(&r.join(" | "));
                out.push('\n');
            }
        }
        if !self.notes.is_empty() {
            out.push_str("[notes]\n");
            for n in &self.notes {
                out.push_str(&format!("- {n}\n"));
            }
        }
        out
    }

    fn render_json(&self) -> String {
        let pairs = |v: &[(String, String)]| {
            Value::Object(v.iter().map(|(k, x)| (k.clone(), Value::String(x.clone()))).collect::<Map<_, _>>())
        };
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert("input_sha256".into(), Value::String(self.digest.clone()));
        root.insert("results".into(), pairs(&self.results));
        root.insert("verdicts".into(), pairs(&self.verdicts));
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| Value::Object(t.header.iter().cloned().zip(r.iter().cloned().map(Value::String)).collect()))
                .collect();
            root.insert("table".into(), Value::Array(rows));
        }
        root.insert("notes".into(), Value::Array(self.notes.iter().cloned().map(Value::String).collect()));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json");
        s.push('\n');
        s
    }

    /// The table if there is one, otherwise `section,key,value` rows.
    fn render_csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.to_csv();
        }
        let mut t = Table::new(&["section", "key", "value"]);
        t.rows.push(vec!["meta".into(), "command".into(), self.command.clone()]);
        t.rows.push(vec!["meta".into(), "input_sha256".into(), self.digest.clone()]);
        for (k, v) in &self.results {
            t.rows.push(vec!["results".into(), k.clone(), v.clone()]);
        }
        for (k, v) in &self.verdicts {
            t.rows.push(vec!["verdicts".into(), k.clone(), v.clone()]);
        }
        for (i, n) in self.notes.iter().enumerate() {
            t.rows.push(vec!["notes".into(), i.to_string(), n.clone()]);
        }
        t.to_csv()
    }
}

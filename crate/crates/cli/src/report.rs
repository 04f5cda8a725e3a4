use serde_json::Value;

/// Outcome of one command: a JSON document, the rows of its human-readable
/// table, and the exit code: 0 holds, 1 fails, 2 invalid input.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub rows: Vec<(String, String)>,
    pub exit: u8,
}

impl Report {
    pub fn new(json: Value, holds: bool) -> Self {
        Report { json, rows: Vec::new(), exit: if holds { 0 } else { 1 } }
    }

    pub fn invalid(json: Value) -> Self {
        Report { json, rows: Vec::new(), exit: 2 }
    }

    pub fn row(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }

    /// Canonical form: keys sorted (the default map of `serde_json`), two-space indent.
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("value serializes") + "\n"
    }

    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        out.push_str(&format!("{:<width$}  {}\n", "result", ["holds", "fails", "invalid"][self.exit as usize]));
        out
    }
}

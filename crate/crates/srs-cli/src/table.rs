//! Machine-readable output documents: sweep tables and key/value reports.
//!
//! Both formats are deterministic byte-for-byte for identical inputs: rows
//! are emitted in sweep order, metadata in insertion order, and floats
//! through a fixed formatting rule.

use serde::Serialize;

/// One table column: a name plus a unit tag (`1` for dimensionless).
#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

/// Ordered records of (sweep value, observables), with provenance metadata.
#[derive(Debug, Clone, Serialize)]
pub struct ScanTable {
    pub command: String,
    pub config_hash: String,
    /// Resolved parameters, echoed so a run can be reproduced from its own
    /// output header.
    pub config: serde_json::Value,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl ScanTable {
    pub fn new(command: &str, config: &impl Serialize, columns: Vec<Column>) -> Self {
        let config = serde_json::to_value(config).expect("config serializes");
        let config_hash = fnv1a_hex(
            serde_json::to_string(&config)
                .expect("config serializes")
                .as_bytes(),
        );
        Self {
            command: command.into(),
            config_hash,
            config,
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        header_lines(&mut out, &self.command, &self.config_hash, &self.config);
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{} [{}]", c.name, c.unit))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// A single named value with a unit, for pipeline reports.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEntry {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

/// End-to-end pipeline report: every intermediate with its unit.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub metadata: Vec<(String, String)>,
    pub entries: Vec<ReportEntry>,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize) -> Self {
        let config = serde_json::to_value(config).expect("config serializes");
        let config_hash = fnv1a_hex(
            serde_json::to_string(&config)
                .expect("config serializes")
                .as_bytes(),
        );
        Self {
            command: command.into(),
            config_hash,
            config,
            metadata: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, name: &str, value: f64, unit: &str) {
        self.entries.push(ReportEntry {
            name: name.into(),
            value,
            unit: unit.into(),
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        header_lines(&mut out, &self.command, &self.config_hash, &self.config);
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str("name,value,unit\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.name, fmt_f64(e.value), e.unit));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn header_lines(out: &mut String, command: &str, hash: &str, config: &serde_json::Value) {
    out.push_str(&format!("# srs {command}\n"));
    out.push_str(&format!("# config_hash: {hash}\n"));
    out.push_str(&format!(
        "# config_json: {}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
}

/// Fixed float formatting: plain decimal in a readable range, scientific
/// elsewhere. Both branches round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-4 && v.abs() < 1e16 {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// 64-bit FNV-1a, used as a provenance fingerprint of the resolved config.
pub fn fnv1a_hex(data: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in data {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_deterministic() {
        let make = || {
            let mut t = ScanTable::new(
                "fig2",
                &serde_json::json!({"gamma": 10.0}),
                vec![Column::new("t0", "1"), Column::new("J", "1")],
            );
            t.push_meta("note", "x");
            t.push_row(vec![0.5, 2.0662e-2]);
            t.push_row(vec![-1.0, 1e-20]);
            t
        };
        assert_eq!(make().to_csv(), make().to_csv());
        assert_eq!(make().to_json(), make().to_json());
        let csv = make().to_csv();
        assert!(csv.contains("t0 [1],J [1]"));
        assert!(csv.contains("# config_hash: "));
        assert!(csv.contains("1e-20"));
    }

    #[test]
    fn float_formatting_round_trips() {
        for v in [
            0.0,
            1.0,
            -4.0,
            0.5,
            1.2345678901234567e-5,
            3.0857e22,
            -2.5e-300,
            0.028788664996972818,
        ] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn fnv_hash_stable() {
        assert_eq!(fnv1a_hex(b""), "cbf29ce484222325");
        assert_eq!(fnv1a_hex(b"a"), "af63dc4c8601ec8c");
        assert_ne!(fnv1a_hex(b"config1"), fnv1a_hex(b"config2"));
    }
}

//! Output formatting: numeric tables with provenance comment lines,
//! rendered as CSV (comments prefixed `#`, 12 significant digits) or as
//! a JSON document carrying the same provenance strings. Rendering is
//! purely a function of the table contents, so identical sweeps produce
//! byte-identical files.

use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    /// Provenance lines, without the leading `# `.
    pub comments: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Summary lines appended after the data (e.g. a scheme verdict).
    pub trailing: Vec<String>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.comments {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for line in &self.trailing {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let mut doc = serde_json::Map::new();
        doc.insert("provenance".into(), self.comments.clone().into());
        doc.insert(
            "columns".into(),
            self.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>().into(),
        );
        doc.insert("rows".into(), self.rows.clone().into());
        if !self.trailing.is_empty() {
            doc.insert("summary".into(), self.trailing.clone().into());
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))
            .expect("tables serialize infallibly");
        text.push('\n');
        text
    }
}

/// Writes to the path, or to stdout when no path is given.
pub fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("writing to stdout")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        Table {
            comments: vec!["tool = lifetime-fisher 0.0.0".into()],
            columns: vec!["epsilon", "value"],
            rows: vec![vec![1.05, 0.905], vec![1.2, 1.0 / 3.0]],
            trailing: vec!["verdict = OnePhoton".into()],
        }
    }

    #[test]
    fn csv_layout_and_digits() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tool = lifetime-fisher 0.0.0");
        assert_eq!(lines[1], "epsilon,value");
        assert_eq!(lines[2], "1.05000000000e0,9.05000000000e-1");
        assert_eq!(lines[3], "1.20000000000e0,3.33333333333e-1");
        assert_eq!(lines[4], "# verdict = OnePhoton");
    }

    #[test]
    fn json_is_deterministic_and_carries_provenance() {
        let a = sample().render(Format::Json);
        let b = sample().render(Format::Json);
        assert_eq!(a, b);
        let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(doc["provenance"][0], "tool = lifetime-fisher 0.0.0");
        assert_eq!(doc["columns"][1], "value");
        assert_eq!(doc["rows"][1][1], 1.0 / 3.0);
        assert_eq!(doc["summary"][0], "verdict = OnePhoton");
    }
}

//! Tabular reports in three encodings.

use conecut::format::{sig, to_json, MACHINE_DIGITS, TABLE_DIGITS};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn render(&self, digits: usize) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => sig(*x, digits),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Lines printed under the human-readable table only.
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Right-aligned columns, 9 significant digits.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.render(TABLE_DIGITS)).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, h)| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([h.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: Vec<&str>| -> String {
            let padded: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_owned() + "\n"
        };
        let mut out = line(self.columns.clone());
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out += &line(rule.iter().map(String::as_str).collect());
        for r in &cells {
            out += &line(r.iter().map(String::as_str).collect());
        }
        for note in &self.notes {
            out += note;
            out.push('\n');
        }
        out
    }

    /// Header row, comma separated, LF endings, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",") + "\n";
        for r in &self.rows {
            let fields: Vec<String> = r.iter().map(|c| c.render(MACHINE_DIGITS)).collect();
            out += &fields.join(",");
            out.push('\n');
        }
        out
    }

    /// `{command, columns, rows}` with 17-digit floats.
    pub fn to_json(&self) -> String {
        to_json(self).expect("table serialization is infallible") + "\n"
    }
}

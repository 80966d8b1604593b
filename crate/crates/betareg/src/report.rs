//! Rectangular report tables with CSV and aligned plain-text rendering.
//!
//! Formatting never recomputes anything: every cell is placed by the caller
//! from a fit result or a bootstrap/simulation aggregate. Exact lasso zeros
//! keep their own cell kind so they print as a bare "0".

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    /// An exact structural zero (a lasso-selected coefficient).
    ExactZero,
    Count(usize),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            // shortest round-trip float formatting is deterministic
            Cell::Number(v) => format!("{v}"),
            Cell::ExactZero => "0".to_string(),
            Cell::Count(c) => format!("{c}"),
        }
    }
}

/// A named rectangular table plus footnotes.
#[derive(Clone, Debug)]
pub struct ReportTable {
    pub name: String,
    pub columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    pub footnotes: Vec<String>,
}

impl ReportTable {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        ReportTable {
            name: name.into(),
            columns,
            rows: Vec::new(),
            footnotes: Vec::new(),
        }
    }

    /// Appends a row; panics if its width does not match the header.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "table '{}' expects {} columns",
            self.name,
            self.columns.len()
        );
        assert!(
            row.iter().all(|c| match c {
                Cell::Number(v) => v.is_finite(),
                _ => true,
            }),
            "non-finite number in table '{}'",
            self.name
        );
        self.rows.push(row);
    }

    pub fn add_footnote(&mut self, note: impl Into<String>) {
        self.footnotes.push(note.into());
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Filesystem-friendly identifier derived from the table name.
    pub fn slug(&self) -> String {
        self.name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() {
                    c.to_ascii_lowercase()
                } else {
                    '_'
                }
            })
            .collect()
    }

    /// Comma-separated rendering: header row then data rows, "." decimal,
    /// no locale formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(&self.columns));
        for row in &self.rows {
            let rendered: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&csv_line(&rendered));
        }
        out
    }

    /// Aligned plain-text rendering with the name and footnotes.
    pub fn to_text(&self) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        out.push_str(&self.name);
        out.push('\n');
        let header: Vec<String> = self
            .columns
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(&header.join("  "));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for row in &rendered {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        for note in &self.footnotes {
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}

fn csv_line(cells: &[impl AsRef<str>]) -> String {
    let escaped: Vec<String> = cells
        .iter()
        .map(|c| {
            let s = c.as_ref();
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        })
        .collect();
    let mut line = escaped.join(",");
    line.push('\n');
    line
}

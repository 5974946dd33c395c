//! Tables, number formatting and CSV emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::CliError;

/// `%.9g`: nine significant digits, trailing zeros removed, scientific
/// notation outside `1e-4 ≤ |x| < 1e9`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(x) => fmt_sig(*x),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Number)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV bytes preceded by the `# metadata` line.
    pub fn to_csv(&self, metadata: &Metadata) -> Result<Vec<u8>, CliError> {
        let mut buf = metadata.line().into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            let io = |e: csv::Error| CliError::Io(format!("CSV encoding failed: {e}"));
            w.write_record(&self.header).map_err(io)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render)).map_err(io)?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        Ok(buf)
    }

    /// Space-aligned rendering for terminals.
    pub fn to_text(&self) -> String {
        let rendered: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                rendered
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        for r in &rendered {
            out.push_str(&line(r));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub command: &'static str,
}

impl Metadata {
    pub fn line(&self) -> String {
        format!(
            "# metadata config_hash={} seed={} version={} command={}\n",
            self.config_hash,
            self.seed,
            env!("CARGO_PKG_VERSION"),
            self.command
        )
    }
}

/// Writes CSV to `path`, or to `stdout` when no path is configured. The
/// text rendering of `summary` (or of `table` itself) goes to `stdout` when
/// a path is set and to `stderr` otherwise.
pub fn emit(
    table: &Table,
    metadata: &Metadata,
    path: Option<&Path>,
    summary: Option<&Table>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let csv = table.to_csv(metadata)?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match path {
        Some(p) => {
            fs::write(p, &csv).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
            stdout
                .write_all(summary.unwrap_or(table).to_text().as_bytes())
                .map_err(io)
        }
        None => {
            stdout.write_all(&csv).map_err(io)?;
            match summary {
                Some(s) => stderr.write_all(s.to_text().as_bytes()).map_err(io),
                None => Ok(()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.391_104_918_192_070_6, "0.391104918"),
            (1_955_524.590_960_353, "1955524.59"),
            (1e-6, "1e-06"),
            (1.5e-5, "1.5e-05"),
            (1e-4, "0.0001"),
            (123_456_789.0, "123456789"),
            (1_234_567_891.0, "1.23456789e+09"),
            (-2.5, "-2.5"),
            (0.999_999_999_9, "1"),
            (99_999_999.99, "100000000"),
            (999_999_999.9, "1e+09"),
            (1e100, "1e+100"),
            (-0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_sig(x), want, "{x:e}");
        }
    }

    #[test]
    fn csv_has_preamble_and_quotes() {
        let mut t = Table::new(["a", "b,c"]);
        t.push(vec![Cell::from("x\"y"), Cell::from(0.5)]);
        t.push(vec![Cell::Empty, Cell::from(f64::NAN)]);
        let meta = Metadata {
            config_hash: "ab".into(),
            seed: 7,
            command: "analyze",
        };
        let text = String::from_utf8(t.to_csv(&meta).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# metadata config_hash=ab seed=7 version="));
        assert_eq!(lines[1], "a,\"b,c\"");
        assert_eq!(lines[2], "\"x\"\"y\",0.5");
        assert_eq!(lines[3], ",nan");
    }
}

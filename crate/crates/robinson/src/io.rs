//! Text matrix files.
//!
//! A matrix file holds one row per line, entries separated by whitespace
//! and/or commas. Either the full square is given, or the upper triangle
//! including the diagonal (row `i` starting at column `i`). Blank lines and
//! lines starting with `#` are ignored. Entries are non-negative decimals;
//! the whole matrix is scaled by the smallest power of ten that makes every
//! entry an integer.

use std::fmt;

use crate::error::Error;
use crate::matrix::DissimilarityMatrix;
use crate::weight::{Decimal, Scale, MAX_SCALE};

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Layout of a matrix file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    Full,
    Upper,
}

/// Entry separator used when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Separator {
    #[default]
    Space,
    Comma,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line
        .char_indices()
        .chain(std::iter::once((line.len(), ' ')))
    {
        let sep = ch.is_whitespace() || ch == ',';
        match (start, sep) {
            (None, false) => start = Some(i),
            (Some(s), true) => {
                out.push(Token {
                    text: &line[s..i],
                    line: line_no,
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Parse a matrix file. The result is not validated for symmetry or a
/// zero diagonal beyond what the layout implies; call
/// [`DissimilarityMatrix::validate`] for that.
pub fn parse_matrix(text: &str) -> Result<DissimilarityMatrix, ParseError> {
    let mut rows: Vec<Vec<Token<'_>>> = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        last_line = i + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        rows.push(tokenize(line, i + 1));
    }
    let err = |line: usize, column: usize, message: String| ParseError {
        line,
        column,
        message,
    };
    let n = rows.len();
    if n == 0 {
        return Err(err(last_line.max(1), 1, "matrix has no rows".into()));
    }
    let layout = if rows.iter().all(|r| r.len() == n) {
        Layout::Full
    } else if rows.iter().enumerate().all(|(i, r)| r.len() == n - i) {
        Layout::Upper
    } else {
        let (i, r) = rows
            .iter()
            .enumerate()
            .find(|(i, r)| r.len() != n && r.len() != n - i)
            .unwrap_or((1, &rows[1]));
        let line = r.first().map_or(0, |t| t.line);
        return Err(err(
            line,
            1,
            format!(
                "row {} has {} entries; expected {n} (full square) or {} (upper triangle)",
                i + 1,
                r.len(),
                n - i
            ),
        ));
    };

    let mut decs: Vec<(usize, usize, Decimal)> = Vec::with_capacity(n * n);
    for r in &rows {
        for t in r {
            let d = Decimal::parse(t.text)
                .map_err(|_| err(t.line, t.column, format!("invalid weight {:?}", t.text)))?;
            decs.push((t.line, t.column, d));
        }
    }
    let scale = Scale(
        decs.iter()
            .map(|d| d.2.frac_digits)
            .max()
            .unwrap_or(0)
            .min(MAX_SCALE),
    );
    let mut values = Vec::with_capacity(decs.len());
    for (line, column, d) in decs {
        values.push(
            d.rescale(scale)
                .map_err(|_| err(line, column, "weight out of range".into()))?,
        );
    }
    let data = match layout {
        Layout::Full => values,
        Layout::Upper => {
            let mut data = vec![crate::weight::Weight::ZERO; n * n];
            let mut it = values.into_iter();
            for i in 0..n {
                for j in i..n {
                    let w = it.next().expect("row lengths checked");
                    data[i * n + j] = w;
                    data[j * n + i] = w;
                }
            }
            data
        }
    };
    DissimilarityMatrix::from_raw(n, data, scale).map_err(|e| err(1, 1, e.to_string()))
}

/// Parse and validate a matrix file. Validation failures (a nonzero
/// diagonal, an asymmetric pair) are reported at the offending entry: the
/// diagonal entry, or the lower-triangle entry of the mismatched pair.
pub fn read_matrix(text: &str) -> Result<DissimilarityMatrix, ParseError> {
    let m = parse_matrix(text)?;
    let Err(e) = m.validate() else { return Ok(m) };
    let (row, col) = match e {
        Error::NonzeroDiagonal { i } => (i, i),
        Error::AsymmetricInput { i, j } => (j, i),
        _ => (0, 0),
    };
    let data: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .collect();
    // In the upper layout row `i` starts at column `i`; the last row tells
    // the layouts apart.
    let upper = data
        .last()
        .is_some_and(|(n, l)| tokenize(l, *n).len() != data.len());
    let token = if upper {
        col.checked_sub(row)
    } else {
        Some(col)
    };
    let (line, column) = data
        .get(row)
        .and_then(|(n, l)| {
            token
                .and_then(|k| tokenize(l, n + 1).into_iter().nth(k))
                .map(|t| (t.line, t.column))
        })
        .unwrap_or((1, 1));
    Err(ParseError {
        line,
        column,
        message: e.one_based().to_string(),
    })
}

/// Render a matrix in the given layout. Parsing the output gives back the
/// same matrix.
pub fn write_matrix(m: &DissimilarityMatrix, layout: Layout, sep: Separator) -> String {
    let sep = match sep {
        Separator::Space => " ",
        Separator::Comma => ",",
    };
    let mut out = String::new();
    for i in 0..m.n() {
        let start = if layout == Layout::Upper { i } else { 0 };
        let row: Vec<String> = (start..m.n()).map(|j| m.format_weight(m.d(i, j))).collect();
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    out
}

/// Display adaptor writing the canonical (full, space-separated) form.
pub struct MatrixDisplay<'a>(pub &'a DissimilarityMatrix);

impl fmt::Display for MatrixDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_matrix(self.0, Layout::Full, Separator::Space))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;
    use crate::weight::Weight;

    #[test]
    fn roundtrip_layouts() {
        let d = worked_example();
        for layout in [Layout::Full, Layout::Upper] {
            for sep in [Separator::Space, Separator::Comma] {
                let text = write_matrix(&d, layout, sep);
                assert_eq!(parse_matrix(&text).unwrap(), d);
            }
        }
    }

    #[test]
    fn decimals_and_comments() {
        let m = parse_matrix("# a comment\n0, 1.5, 2\n\n1.5 0 0.25\n2 0.25 0\n").unwrap();
        assert_eq!(m.scale(), Scale(2));
        assert_eq!(m.d(0, 1), Weight(150));
        assert_eq!(m.d(1, 2), Weight(25));
        assert_eq!(m.format_weight(m.d(0, 1)), "1.5");
        let up = parse_matrix("0 1.5 2\n0 0.25\n0\n").unwrap();
        assert_eq!(up, m);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_matrix("0 1\n1 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_matrix("0 1 2\n1 0\n2 1 0 5\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_matrix("\n# only a comment\n").unwrap_err();
        assert!(e.message.contains("no rows"));
        let e = parse_matrix("0 -1\n-1 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
        // Parsing succeeds on asymmetric input; validation reports it.
        let m = parse_matrix("0 1\n2 0\n").unwrap();
        assert!(m.validate().is_err());
    }

    #[test]
    fn validation_errors_carry_positions() {
        let e = read_matrix("0 1 2\n1 0 3\n2 4 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        assert!(e.message.contains("d(2,3)"), "{}", e.message);
        let e = read_matrix("# c\n0 1\n1 7\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        let e = read_matrix("0 1 2\n  5 3\n0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(read_matrix("0 1\n1 0\n").is_ok());
    }
}

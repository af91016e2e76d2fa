//! Triangle CSV files.
//!
//! ```text
//! dev,1,2,3
//! 1,100,150,160
//! 2,110,170
//! 3,120
//! ```
//!
//! The header names the development years; each following line is the
//! accident year and its `n - i + 1` cumulative values. A file whose first
//! field is not `dev` is read as bare rows of values without the index column.
//! Blank lines and empty trailing fields are ignored.

use std::fmt::Write as _;

use ctreserve_core::{Triangle, TriangleError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CsvError {
    #[error("no triangle rows found")]
    Empty,
    #[error("line {line}: header must read `dev,1,2,...,n`")]
    Header { line: usize },
    #[error("line {line}: expected accident year {expected}, found `{found}`")]
    RowIndex { line: usize, expected: usize, found: String },
    #[error("cell ({row},{col}) is not a number: `{text}`")]
    NonNumeric { row: usize, col: usize, text: String },
    #[error(transparent)]
    Triangle(#[from] TriangleError),
}

fn parse_header(fields: &[&str], line: usize) -> Result<usize, CsvError> {
    let n = fields.len() - 1;
    let ok = fields[1..]
        .iter()
        .enumerate()
        .all(|(k, f)| f.parse::<usize>() == Ok(k + 1));
    if !ok {
        return Err(CsvError::Header { line });
    }
    Ok(n)
}

fn parse_values(fields: &[&str], row: usize) -> Result<Vec<f64>, CsvError> {
    let used = fields.iter().rposition(|f| !f.is_empty()).map_or(0, |k| k + 1);
    fields[..used]
        .iter()
        .enumerate()
        .map(|(k, text)| {
            let col = k + 1;
            if text.is_empty() {
                return Err(TriangleError::MissingCell { row, col }.into());
            }
            text.parse::<f64>().map_err(|_| CsvError::NonNumeric {
                row,
                col,
                text: (*text).to_string(),
            })
        })
        .collect()
}

/// Parses and validates a triangle.
pub fn parse_triangle(source: &str, label: &str) -> Result<Triangle, CsvError> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, l)| (k, l.split(',').map(str::trim).collect::<Vec<_>>()))
        .peekable();

    let headed = match lines.peek() {
        None => return Err(CsvError::Empty),
        Some((_, fields)) => fields[0].eq_ignore_ascii_case("dev"),
    };

    let mut rows = Vec::new();
    if !headed {
        for (_, fields) in lines {
            let row = rows.len() + 1;
            rows.push(parse_values(&fields, row)?);
        }
        return Ok(Triangle::new(label, rows)?);
    }

    let (line, header) = lines.next().expect("peeked");
    let n = parse_header(&header, line)?;
    if n < ctreserve_core::triangle::MIN_YEARS {
        return Err(TriangleError::TooSmall(n).into());
    }
    for (line, fields) in lines {
        let expected = rows.len() + 1;
        let index = fields[0];
        match index.parse::<usize>() {
            Ok(i) if i == expected => {}
            Ok(i) if i > n => return Err(TriangleError::RowOutOfRange { row: i, n }.into()),
            _ => {
                return Err(CsvError::RowIndex { line, expected, found: index.to_string() });
            }
        }
        if expected > n {
            return Err(TriangleError::RowOutOfRange { row: expected, n }.into());
        }
        rows.push(parse_values(&fields[1..], expected)?);
    }
    if rows.len() < n {
        return Err(TriangleError::MissingCell { row: rows.len() + 1, col: 1 }.into());
    }
    Ok(Triangle::new(label, rows)?)
}

/// Writes the headed format; values use the shortest exact decimal form, so
/// parsing the output gives back the same triangle.
pub fn serialize_triangle(t: &Triangle) -> String {
    let n = t.n();
    let mut out = String::from("dev");
    for j in 1..=n {
        write!(out, ",{j}").unwrap();
    }
    out.push('\n');
    for i in 1..=n {
        write!(out, "{i}").unwrap();
        for v in t.row(i) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

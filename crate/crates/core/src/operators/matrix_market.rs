//! Matrix Market reader for the `coordinate real general` variant.
//!
//! ```text
//! %%MatrixMarket matrix coordinate real general
//! % comments
//! rows cols nnz
//! row col value      (1-based, nnz lines)
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::SparseLinearOperator;
use crate::error::MatrixMarketError;

pub fn load_matrix_market<P: AsRef<Path>>(
    path: P,
) -> Result<SparseLinearOperator, MatrixMarketError> {
    let file = File::open(path)?;
    parse_matrix_market(BufReader::new(file))
}

fn parse_err(line: usize, message: impl Into<String>) -> MatrixMarketError {
    MatrixMarketError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_matrix_market<R: BufRead>(
    reader: R,
) -> Result<SparseLinearOperator, MatrixMarketError> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (banner_line, banner) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    check_banner(banner_line, &banner)?;

    let mut dim = None;
    let mut expected = 0usize;
    let mut triplets = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = banner_line;

    for (line_no, line) in lines {
        let line = line?;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some(n) = dim else {
            let [rows, cols, nnz] = fields[..] else {
                return Err(parse_err(line_no, "size line must be `rows cols nnz`"));
            };
            let rows = parse_index(rows, line_no, "row count")?;
            let cols = parse_index(cols, line_no, "column count")?;
            expected = parse_index(nnz, line_no, "entry count")?;
            if rows != cols {
                return Err(MatrixMarketError::Unsupported(format!(
                    "non-square matrix {rows}x{cols}"
                )));
            }
            dim = Some(rows);
            triplets.reserve(expected);
            continue;
        };
        if triplets.len() == expected {
            return Err(parse_err(
                line_no,
                format!("more than the declared {expected} entries"),
            ));
        }
        let [row, col, value] = fields[..] else {
            return Err(parse_err(line_no, "entry must be `row col value`"));
        };
        let row = parse_index(row, line_no, "row index")?;
        let col = parse_index(col, line_no, "column index")?;
        if row == 0 || row > n || col == 0 || col > n {
            return Err(parse_err(
                line_no,
                format!("entry ({row}, {col}) outside 1..={n}"),
            ));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid value `{value}`")))?;
        if !value.is_finite() {
            return Err(parse_err(line_no, format!("non-finite value {value}")));
        }
        if !seen.insert((row, col)) {
            return Err(parse_err(
                line_no,
                format!("duplicate entry ({row}, {col})"),
            ));
        }
        triplets.push((row - 1, col - 1, value));
    }

    let Some(n) = dim else {
        return Err(parse_err(last_line, "missing size line"));
    };
    if triplets.len() != expected {
        return Err(parse_err(
            last_line,
            format!("expected {expected} entries, found {}", triplets.len()),
        ));
    }
    // Bounds, finiteness and duplicates were checked above.
    Ok(SparseLinearOperator::from_triplets(n, triplets).expect("validated entries"))
}

fn check_banner(line: usize, banner: &str) -> Result<(), MatrixMarketError> {
    let tokens: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(line, "missing %%MatrixMarket banner"));
    }
    let [_, object, format, field, symmetry] = &tokens[..] else {
        return Err(parse_err(
            line,
            "banner must have object, format, field and symmetry",
        ));
    };
    if object != "matrix" {
        return Err(MatrixMarketError::Unsupported(format!("object `{object}`")));
    }
    if format != "coordinate" {
        return Err(MatrixMarketError::Unsupported(format!("format `{format}`")));
    }
    if field != "real" {
        return Err(MatrixMarketError::Unsupported(format!("field `{field}`")));
    }
    if symmetry != "general" {
        return Err(MatrixMarketError::Unsupported(format!(
            "symmetry `{symmetry}`"
        )));
    }
    Ok(())
}

fn parse_index(s: &str, line: usize, what: &str) -> Result<usize, MatrixMarketError> {
    s.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{s}`")))
}

/// Writes `op` in the same variant, values with round-trip precision.
pub fn write_matrix_market<W: Write>(op: &SparseLinearOperator, mut out: W) -> std::io::Result<()> {
    use super::Operator;
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", op.dim(), op.dim(), op.nnz())?;
    for (r, c, v) in op.triplets() {
        writeln!(out, "{} {} {:?}", r + 1, c + 1, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Operator;

    fn parse(s: &str) -> Result<SparseLinearOperator, MatrixMarketError> {
        parse_matrix_market(s.as_bytes())
    }

    #[test]
    fn single_entry() {
        let p =
            parse("%%MatrixMarket matrix coordinate real general\n% c\n2 2 1\n1 2 0.5\n").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.column(1), &[(0, 0.5)]);
        assert!(p.column(0).is_empty());
    }

    #[test]
    fn no_entries_is_zero_operator() {
        let p = parse("%%MatrixMarket matrix coordinate real general\n3 3 0\n").unwrap();
        assert_eq!(p, SparseLinearOperator::zeros(3));
    }

    #[test]
    fn row_out_of_bounds_names_line() {
        let err =
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        match err {
            MatrixMarketError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("outside"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unsupported_variants() {
        for banner in [
            "%%MatrixMarket matrix coordinate complex general",
            "%%MatrixMarket matrix coordinate pattern general",
            "%%MatrixMarket matrix array real general",
            "%%MatrixMarket matrix coordinate real symmetric",
        ] {
            let err = parse(&format!("{banner}\n2 2 0\n")).unwrap_err();
            assert!(
                matches!(err, MatrixMarketError::Unsupported(_)),
                "{banner}: {err:?}"
            );
        }
    }

    #[test]
    fn rejects_non_square() {
        let err = parse("%%MatrixMarket matrix coordinate real general\n2 3 0\n").unwrap_err();
        assert!(matches!(err, MatrixMarketError::Unsupported(_)));
    }

    #[test]
    fn malformed_lines() {
        let head = "%%MatrixMarket matrix coordinate real general\n";
        let cases = [
            ("2 2 1\n1 1 abc\n", 3),
            ("2 2 1\n1 1\n", 3),
            ("2 2 2\n1 1 1.0\n", 3),
            ("2 2 1\n1 1 1.0\n2 2 1.0\n", 4),
            ("2 2 2\n1 1 1.0\n1 1 2.0\n", 4),
            ("2 2\n", 2),
            ("", 1),
        ];
        for (body, want) in cases {
            match parse(&format!("{head}{body}")).unwrap_err() {
                MatrixMarketError::Parse { line, .. } => assert_eq!(line, want, "{body:?}"),
                other => panic!("{body:?}: unexpected {other:?}"),
            }
        }
        assert!(matches!(
            parse("2 2 0\n").unwrap_err(),
            MatrixMarketError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn write_then_read() {
        let p =
            SparseLinearOperator::from_triplets(3, [(0, 1, 0.1), (2, 0, 1.0 / 3.0), (1, 1, -2.0)])
                .unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&p, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), p);
    }
}

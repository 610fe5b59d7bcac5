//! Reader/writer for the alist sparse-matrix interchange format:
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! <n column weights>
//! <m row weights>
//! <n lines: 1-based check indices of each column>
//! <m lines: 1-based variable indices of each row>
//! ```
//!
//! Some writers pad the per-column/per-row index lines with `0` entries up
//! to the maximum weight; zeros are therefore ignored on input. Output is
//! canonical: sorted indices, single spaces, no padding.

use std::path::Path;

use super::ParityCheckMatrix;
use crate::error::{Error, Result};

fn parse_ints(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("expected an unsigned integer, found {tok:?}"),
            })
        })
        .collect()
}

fn expect_len(vals: &[usize], want: usize, what: &str, lineno: usize) -> Result<()> {
    if vals.len() != want {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {want} {what}, found {}", vals.len()),
        });
    }
    Ok(())
}

/// Parses alist text into a matrix, validating weight declarations and the
/// consistency of the redundant row/column sections against each other.
pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix> {
    // Line numbers are 1-based and count non-empty lines, the way the
    // format is written in practice.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("file ended before {what}"),
        })
    };

    let (lineno, header) = next("the size header")?;
    let header = parse_ints(header, lineno)?;
    expect_len(&header, 2, "size entries (n m)", lineno)?;
    let (n, m) = (header[0], header[1]);
    if n == 0 || m == 0 {
        return Err(Error::Parse { line: lineno, msg: "n and m must be positive".into() });
    }

    let (lineno, maxw) = next("the max-weight line")?;
    let maxw = parse_ints(maxw, lineno)?;
    expect_len(&maxw, 2, "max-weight entries", lineno)?;
    let (max_col, max_row) = (maxw[0], maxw[1]);

    let (lineno, cw_line) = next("the column-weight line")?;
    let col_weights = parse_ints(cw_line, lineno)?;
    expect_len(&col_weights, n, "column weights", lineno)?;
    if let Some(w) = col_weights.iter().find(|&&w| w > max_col) {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("column weight {w} exceeds declared maximum {max_col}"),
        });
    }

    let (lineno, rw_line) = next("the row-weight line")?;
    let row_weights = parse_ints(rw_line, lineno)?;
    expect_len(&row_weights, m, "row weights", lineno)?;
    if let Some(w) = row_weights.iter().find(|&&w| w > max_row) {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("row weight {w} exceeds declared maximum {max_row}"),
        });
    }

    let mut col_rows: Vec<Vec<u32>> = Vec::with_capacity(n);
    for v in 0..n {
        let (lineno, line) = next("a column index line")?;
        let mut entries = parse_ints(line, lineno)?;
        entries.retain(|&e| e != 0); // drop padding
        if entries.len() != col_weights[v] {
            return Err(Error::Parse {
                line: lineno,
                msg: format!(
                    "column {v} declares weight {} but lists {} checks",
                    col_weights[v],
                    entries.len()
                ),
            });
        }
        let mut rows = Vec::with_capacity(entries.len());
        for e in entries {
            if e > m {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("column {v} references check {e} of {m}"),
                });
            }
            rows.push((e - 1) as u32);
        }
        col_rows.push(rows);
    }

    let h = ParityCheckMatrix::from_column_adjacency(m, col_rows).map_err(|e| match e {
        Error::Validation(msg) => Error::Parse { line: 0, msg },
        other => other,
    })?;

    // The row section is redundant; read it and insist it agrees with what
    // the column section implies.
    for c in 0..m {
        let (lineno, line) = next("a row index line")?;
        let mut entries = parse_ints(line, lineno)?;
        entries.retain(|&e| e != 0);
        if entries.len() != row_weights[c] {
            return Err(Error::Parse {
                line: lineno,
                msg: format!(
                    "row {c} declares weight {} but lists {} variables",
                    row_weights[c],
                    entries.len()
                ),
            });
        }
        let mut vars: Vec<u32> = Vec::with_capacity(entries.len());
        for e in entries {
            if e > n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("row {c} references variable {e} of {n}"),
                });
            }
            vars.push((e - 1) as u32);
        }
        vars.sort_unstable();
        if vars != h.row(c) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("row {c} disagrees with the column section"),
            });
        }
    }

    Ok(h)
}

/// Canonical alist text for a matrix (sorted indices, no padding).
pub fn format_alist(h: &ParityCheckMatrix) -> String {
    let max_col = (0..h.n()).map(|v| h.column(v).len()).max().unwrap_or(0);
    let max_row = (0..h.m()).map(|c| h.row(c).len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", h.n(), h.m()));
    out.push_str(&format!("{max_col} {max_row}\n"));
    let join = |idx: &[u32]| {
        idx.iter()
            .map(|&i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let col_w: Vec<String> = (0..h.n()).map(|v| h.column(v).len().to_string()).collect();
    out.push_str(&col_w.join(" "));
    out.push('\n');
    let row_w: Vec<String> = (0..h.m()).map(|c| h.row(c).len().to_string()).collect();
    out.push_str(&row_w.join(" "));
    out.push('\n');
    for v in 0..h.n() {
        out.push_str(&join(h.column(v)));
        out.push('\n');
    }
    for c in 0..h.m() {
        out.push_str(&join(h.row(c)));
        out.push('\n');
    }
    out
}

/// Reads an alist file from disk.
pub fn load_alist(path: impl AsRef<Path>) -> Result<ParityCheckMatrix> {
    parse_alist(&std::fs::read_to_string(path)?)
}

/// Writes canonical alist text to disk.
pub fn save_alist(h: &ParityCheckMatrix, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, format_alist(h))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ParityCheckMatrix {
        ParityCheckMatrix::from_column_adjacency(
            3,
            vec![vec![0], vec![0, 1], vec![1], vec![1, 2], vec![2], vec![2, 0]],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let h = toy();
        let text = format_alist(&h);
        let back = parse_alist(&text).unwrap();
        assert_eq!(h, back);
        // Canonical text is a fixed point of the round trip.
        assert_eq!(format_alist(&back), text);
    }

    #[test]
    fn zero_padded_input_is_accepted() {
        let text = "2 2\n2 2\n1 2\n2 1\n1 0\n1 2\n1 2\n2 0\n";
        let h = parse_alist(text).unwrap();
        assert_eq!(h.column(0), &[0]);
        assert_eq!(h.column(1), &[0, 1]);
    }

    #[test]
    fn weight_mismatch_is_reported_with_column() {
        // Column 1 declares weight 2 but lists one check.
        let text = "2 2\n2 2\n1 2\n2 1\n1\n1\n1 2\n2\n";
        let err = parse_alist(text).unwrap_err().to_string();
        assert!(err.contains("column 1"), "{err}");
        assert!(err.contains("line 6"), "{err}");
    }

    #[test]
    fn inconsistent_row_section_is_rejected() {
        // Row 0 claims variables {1}, but the column section says {1, 2}.
        let text = "2 2\n2 2\n1 2\n1 2\n1\n1 2\n1\n1 2\n";
        let err = parse_alist(text).unwrap_err().to_string();
        assert!(err.contains("disagrees"), "{err}");
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let text = "2 2\n2 2\n1 1\n1 1\n3\n1\n1\n2\n";
        let err = parse_alist(text).unwrap_err().to_string();
        assert!(err.contains("references check 3"), "{err}");
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = "2 2\n2 2\n1 1\n1 1\n1\n";
        assert!(parse_alist(text).is_err());
    }
}

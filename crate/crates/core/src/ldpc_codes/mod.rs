//! Sparse parity-check matrices over GF(2) and the code constructions used
//! throughout the crate: alist interchange I/O, random (d_v, d_c)-regular
//! generation, and the algebraic (2640, 1320) group construction.

mod alist;
mod generate;
mod margulis;

pub use alist::{format_alist, load_alist, parse_alist, save_alist};
pub use generate::generate_regular;
pub use margulis::construct_margulis;

use std::collections::HashMap;

use crate::de_engine::EnsembleSpec;
use crate::error::{Error, Result};

/// A binary parity-check matrix held as mutually consistent row and column
/// adjacency lists (indices of the 1-entries), both sorted ascending.
///
/// Immutable after construction; rows are checks, columns are variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    m: usize,
    col_rows: Vec<Vec<u32>>,
    row_cols: Vec<Vec<u32>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from per-column lists of check indices.
    ///
    /// # Errors
    /// `Error::Validation` on out-of-range indices or a repeated index
    /// within a column (binary matrices have no parallel edges).
    pub fn from_column_adjacency(m: usize, col_rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = col_rows.len();
        let mut cols = col_rows;
        let mut row_cols = vec![Vec::new(); m];
        for (v, rows) in cols.iter_mut().enumerate() {
            rows.sort_unstable();
            for pair in rows.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::validation(format!(
                        "column {v} lists check {} twice",
                        pair[0]
                    )));
                }
            }
            for &r in rows.iter() {
                if r as usize >= m {
                    return Err(Error::validation(format!(
                        "column {v} references check {r}, but there are only {m} checks"
                    )));
                }
                row_cols[r as usize].push(v as u32);
            }
        }
        // Row lists inherit sortedness from the column sweep order.
        Ok(ParityCheckMatrix { n, m, col_rows: cols, row_cols })
    }

    /// Number of variables (columns).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks (rows).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Check indices incident on variable `v`, sorted ascending.
    pub fn column(&self, v: usize) -> &[u32] {
        &self.col_rows[v]
    }

    /// Variable indices incident on check `c`, sorted ascending.
    pub fn row(&self, c: usize) -> &[u32] {
        &self.row_cols[c]
    }

    /// Total number of 1-entries (Tanner-graph edges).
    pub fn num_edges(&self) -> usize {
        self.col_rows.iter().map(Vec::len).sum()
    }

    /// `Some(d_v)` if every column has the same weight `d_v`.
    pub fn regular_column_weight(&self) -> Option<usize> {
        let w = self.col_rows.first()?.len();
        self.col_rows.iter().all(|c| c.len() == w).then_some(w)
    }

    /// True if `H·bits = 0` over GF(2); `bits` holds one 0/1 entry per
    /// variable.
    ///
    /// # Errors
    /// `Error::Validation` if `bits` has the wrong length.
    pub fn is_codeword(&self, bits: &[u8]) -> Result<bool> {
        if bits.len() != self.n {
            return Err(Error::validation(format!(
                "codeword length {} does not match n = {}",
                bits.len(),
                self.n
            )));
        }
        Ok(self.row_cols.iter().all(|row| {
            row.iter().fold(0u8, |acc, &v| acc ^ (bits[v as usize] & 1)) == 0
        }))
    }

    /// Number of length-4 cycles: pairs of checks sharing two or more
    /// variables (each shared pair beyond the first forms one 4-cycle).
    pub fn count_four_cycles(&self) -> usize {
        let mut seen: HashMap<(u32, u32), u32> = HashMap::new();
        for row in &self.row_cols {
            for (i, &a) in row.iter().enumerate() {
                for &b in &row[i + 1..] {
                    *seen.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        seen.values()
            .map(|&k| (k as usize) * (k as usize - 1) / 2)
            .sum()
    }

    /// Extracts the ensemble parameters (variable degree and edge-perspective
    /// check-degree distribution) from a variable-regular matrix.
    ///
    /// # Errors
    /// `Error::Validation` naming the first column whose weight differs from
    /// column 0's.
    pub fn degree_profile(&self) -> Result<EnsembleSpec> {
        let d_v = self
            .col_rows
            .first()
            .ok_or_else(|| Error::validation("matrix has no columns"))?
            .len();
        for (v, col) in self.col_rows.iter().enumerate() {
            if col.len() != d_v {
                return Err(Error::validation(format!(
                    "matrix is not variable-regular: column {v} has weight {}, column 0 has {d_v}",
                    col.len()
                )));
            }
        }
        let edges = self.num_edges() as f64;
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for row in &self.row_cols {
            *counts.entry(row.len() as u32).or_insert(0) += 1;
        }
        let mut rho: Vec<(u32, f64)> = counts
            .into_iter()
            .map(|(j, cnt)| (j, (j as usize * cnt) as f64 / edges))
            .collect();
        rho.sort_by_key(|&(j, _)| j);
        EnsembleSpec::irregular(d_v as u32, &rho)
    }
}

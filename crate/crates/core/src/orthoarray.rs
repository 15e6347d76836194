//! Orthogonal arrays: Bush construction over GF(d), strength validation,
//! column deletion, and conversion to quantum states.

use thiserror::Error;

use crate::galois::{Field, FieldError};
use crate::qstate::SparseKet;

#[derive(Debug, Error, PartialEq)]
pub enum OaError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("strength {k} out of range for {cols} columns")]
    StrengthOutOfRange { k: usize, cols: usize },
    #[error("Bush construction needs 1 <= k < d (got d={d}, k={k})")]
    BushRegime { d: u32, k: usize },
    #[error("cannot delete columns: {remaining} would remain but strength is {k}")]
    TooFewColumns { remaining: usize, k: usize },
    #[error("column index {0} out of range")]
    ColumnOutOfRange(usize),
    #[error("entry {0} not below alphabet size {1}")]
    EntryOutOfRange(u32, u32),
    #[error("malformed OA text: {0}")]
    Parse(String),
}

/// r x N table over {0..d-1} with claimed strength k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    rows: Vec<Vec<u32>>,
    columns: usize,
    alphabet: u32,
    strength: usize,
}

/// Outcome of a strength check: the common index, or the first offender.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrengthCheck {
    Valid { lambda: usize },
    Invalid { columns: Vec<usize>, tuple: Vec<u32> },
}

impl OrthogonalArray {
    pub fn new(
        rows: Vec<Vec<u32>>,
        alphabet: u32,
        strength: usize,
    ) -> Result<OrthogonalArray, OaError> {
        let columns = rows.first().map_or(0, |r| r.len());
        for row in &rows {
            if row.len() != columns {
                return Err(OaError::Parse("ragged rows".into()));
            }
            for &e in row {
                if e >= alphabet {
                    return Err(OaError::EntryOutOfRange(e, alphabet));
                }
            }
        }
        if strength == 0 || strength > columns {
            return Err(OaError::StrengthOutOfRange {
                k: strength,
                cols: columns,
            });
        }
        Ok(OrthogonalArray {
            rows,
            columns,
            alphabet,
            strength,
        })
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Index lambda = r / d^k when the strength claim validates.
    pub fn index(&self) -> Option<usize> {
        match self.validate_strength(self.strength) {
            StrengthCheck::Valid { lambda } => Some(lambda),
            StrengthCheck::Invalid { .. } => None,
        }
    }

    /// Counts every symbol tuple in every k-column subset. Valid iff all
    /// counts are equal; the failure report names the first offending
    /// column subset (lexicographic order) and tuple.
    pub fn validate_strength(&self, k: usize) -> StrengthCheck {
        assert!((1..=self.columns).contains(&k), "strength out of range");
        let d = self.alphabet as usize;
        let tuples = d.pow(k as u32);
        let expected = self.rows.len() / tuples;
        for cols in combinations(self.columns, k) {
            let mut counts = vec![0usize; tuples];
            for row in &self.rows {
                let mut idx = 0usize;
                for &c in &cols {
                    idx = idx * d + row[c] as usize;
                }
                counts[idx] += 1;
            }
            if self.rows.len() % tuples != 0 || counts.iter().any(|&c| c != expected) {
                let bad = counts
                    .iter()
                    .position(|&c| c != expected)
                    .unwrap_or(0);
                let mut tuple = vec![0u32; k];
                let mut v = bad;
                for t in tuple.iter_mut().rev() {
                    *t = (v % d) as u32;
                    v /= d;
                }
                return StrengthCheck::Invalid {
                    columns: cols,
                    tuple,
                };
            }
        }
        StrengthCheck::Valid { lambda: expected }
    }

    /// Bush construction OA(d^k, d+1, d, k): rows indexed by polynomials f
    /// of degree < k over GF(d) in lexicographic coefficient order (highest
    /// degree most significant); columns are the leading coefficient
    /// followed by the evaluations f(0), f(1), ..., f(d-1).
    pub fn construct_bush(d: u32, k: usize) -> Result<OrthogonalArray, OaError> {
        let field = Field::new(d)?;
        if k == 0 || k as u32 >= d {
            return Err(OaError::BushRegime { d, k });
        }
        let q = d as usize;
        let r = q.pow(k as u32);
        let mut rows = Vec::with_capacity(r);
        for idx in 0..r {
            // coefficient tuple, highest-degree coefficient most significant
            let mut coeffs = vec![0u32; k]; // coeffs[0] = leading
            let mut v = idx;
            for c in coeffs.iter_mut().rev() {
                *c = (v % q) as u32;
                v /= q;
            }
            let mut row = Vec::with_capacity(q + 1);
            row.push(coeffs[0]);
            for alpha in 0..d {
                // Horner evaluation in GF(d)
                let mut acc = 0u32;
                for &c in &coeffs {
                    acc = field.add_values(field.mul_values(acc, alpha), c);
                }
                row.push(acc);
            }
            rows.push(row);
        }
        OrthogonalArray::new(rows, d, k)
    }

    /// Deletes the given columns; strength is preserved and re-validated.
    pub fn delete_columns(&self, cols: &[usize]) -> Result<OrthogonalArray, OaError> {
        for &c in cols {
            if c >= self.columns {
                return Err(OaError::ColumnOutOfRange(c));
            }
        }
        let remaining = self.columns - cols.iter().collect::<std::collections::BTreeSet<_>>().len();
        if remaining < self.strength {
            return Err(OaError::TooFewColumns {
                remaining,
                k: self.strength,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(i, _)| !cols.contains(i))
                    .map(|(_, &e)| e)
                    .collect()
            })
            .collect();
        let oa = OrthogonalArray::new(rows, self.alphabet, self.strength)?;
        match oa.validate_strength(self.strength) {
            StrengthCheck::Valid { .. } => Ok(oa),
            StrengthCheck::Invalid { columns, tuple } => Err(OaError::Parse(format!(
                "strength {} lost after deletion at columns {columns:?}, tuple {tuple:?}",
                self.strength
            ))),
        }
    }

    /// Equal-amplitude superposition of the row labels, normalized.
    pub fn to_state(&self) -> SparseKet {
        let dims = vec![self.alphabet as usize; self.columns];
        let amp = 1.0 / (self.rows.len() as f64).sqrt();
        let mut ket = SparseKet::zero(dims);
        for row in &self.rows {
            let label: Vec<u8> = row.iter().map(|&e| e as u8).collect();
            ket.add_amplitude(&label, num_complex::Complex64::new(amp, 0.0));
        }
        ket
    }

    /// Text form: header "OA r N d k", then one row per line with
    /// space-separated symbols.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "OA {} {} {} {}\n",
            self.rows.len(),
            self.columns,
            self.alphabet,
            self.strength
        );
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<OrthogonalArray, OaError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| OaError::Parse("empty input".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 5 || parts[0] != "OA" {
            return Err(OaError::Parse(format!("bad header {header:?}")));
        }
        let r: usize = parts[1].parse().map_err(|_| OaError::Parse("bad r".into()))?;
        let n: usize = parts[2].parse().map_err(|_| OaError::Parse("bad N".into()))?;
        let d: u32 = parts[3].parse().map_err(|_| OaError::Parse("bad d".into()))?;
        let k: usize = parts[4].parse().map_err(|_| OaError::Parse("bad k".into()))?;
        let mut rows = Vec::with_capacity(r);
        for line in lines {
            let row: Result<Vec<u32>, _> = line.split_whitespace().map(|t| t.parse()).collect();
            let row = row.map_err(|_| OaError::Parse(format!("bad row {line:?}")))?;
            if row.len() != n {
                return Err(OaError::Parse(format!("row has {} entries, expected {n}", row.len())));
            }
            rows.push(row);
        }
        if rows.len() != r {
            return Err(OaError::Parse(format!("{} rows, header says {r}", rows.len())));
        }
        OrthogonalArray::new(rows, d, k)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The published 16x5 strength-2 table over GF(4).
    pub const OA_16_5_4_2: [[u32; 5]; 16] = [
        [0, 0, 0, 0, 0],
        [0, 1, 1, 1, 1],
        [0, 2, 2, 2, 2],
        [0, 3, 3, 3, 3],
        [1, 0, 1, 2, 3],
        [1, 1, 0, 3, 2],
        [1, 2, 3, 0, 1],
        [1, 3, 2, 1, 0],
        [2, 0, 2, 3, 1],
        [2, 1, 3, 2, 0],
        [2, 2, 0, 1, 3],
        [2, 3, 1, 0, 2],
        [3, 0, 3, 1, 2],
        [3, 1, 2, 0, 3],
        [3, 2, 1, 3, 0],
        [3, 3, 0, 2, 1],
    ];

    #[test]
    fn bush_4_2_matches_published_table() {
        let oa = OrthogonalArray::construct_bush(4, 2).unwrap();
        let expected: Vec<Vec<u32>> = OA_16_5_4_2.iter().map(|r| r.to_vec()).collect();
        assert_eq!(oa.rows(), &expected[..]);
    }

    #[test]
    fn bush_validates_with_unit_index() {
        for (d, k) in [(4u32, 2usize), (5, 2), (7, 2), (4, 3), (5, 3), (8, 2), (9, 2)] {
            let oa = OrthogonalArray::construct_bush(d, k).unwrap();
            assert_eq!(oa.row_count(), (d as usize).pow(k as u32));
            assert_eq!(oa.column_count(), d as usize + 1);
            assert_eq!(
                oa.validate_strength(k),
                StrengthCheck::Valid { lambda: 1 },
                "d={d} k={k}"
            );
        }
    }

    #[test]
    fn strength_three_fails_on_16_rows() {
        let oa = OrthogonalArray::construct_bush(4, 2).unwrap();
        assert!(matches!(
            oa.validate_strength(3),
            StrengthCheck::Invalid { .. }
        ));
    }

    #[test]
    fn single_column_strength_one() {
        let rows: Vec<Vec<u32>> = (0..5).map(|i| vec![i]).collect();
        let oa = OrthogonalArray::new(rows, 5, 1).unwrap();
        assert_eq!(oa.validate_strength(1), StrengthCheck::Valid { lambda: 1 });
    }

    #[test]
    fn index_unity_rows_agree_on_few_positions() {
        // any two distinct rows of an index-unity OA with N >= 2k agree on
        // at most k-1 positions
        for (d, k) in [(4u32, 2usize), (5, 2), (7, 2)] {
            let oa = OrthogonalArray::construct_bush(d, k).unwrap();
            let rows = oa.rows();
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    let agree = rows[i]
                        .iter()
                        .zip(&rows[j])
                        .filter(|(a, b)| a == b)
                        .count();
                    assert!(agree <= k - 1, "rows {i},{j} agree on {agree} positions");
                }
            }
        }
    }

    #[test]
    fn delete_columns_preserves_strength() {
        let oa = OrthogonalArray::construct_bush(7, 2).unwrap();
        let smaller = oa.delete_columns(&[7]).unwrap();
        assert_eq!(smaller.column_count(), 7);
        assert_eq!(smaller.validate_strength(2), StrengthCheck::Valid { lambda: 1 });
        let same = oa.delete_columns(&[]).unwrap();
        assert_eq!(same, oa);
        let bush = OrthogonalArray::construct_bush(4, 2).unwrap();
        assert!(bush.delete_columns(&[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn state_from_single_row() {
        let oa = OrthogonalArray::new(vec![vec![1, 2, 0]], 3, 1).unwrap();
        let ket = oa.to_state();
        assert_eq!(ket.term_count(), 1);
        assert!((ket.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let oa = OrthogonalArray::construct_bush(5, 2).unwrap();
        let text = oa.to_text();
        let back = OrthogonalArray::from_text(&text).unwrap();
        assert_eq!(oa, back);
    }
}

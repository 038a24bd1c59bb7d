//! Dense matrices over GF(2) with one machine word per row.
//!
//! Entry `(r, c)` of a [`BitMatrix`] is bit `c` of row `r` (0-based on both
//! axes). Every matrix handled by this crate has at most 64 columns, so a row
//! addition is a single XOR. Row additions are the unit of cost used by all
//! the rank algorithms, and [`VecAdds`] is the counter they report into.

use std::fmt;

use crate::error::{contract, Error, Result};

/// Maximum number of columns (and digits) supported.
pub const MAX_COLS: usize = 64;

/// Mask selecting the low `n` bits of a row.
#[inline]
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Counter of vector additions in GF(2)^k.
///
/// One is owned per computation; algorithms take it by `&mut`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct VecAdds(u64);

impl VecAdds {
    pub fn new() -> Self {
        Self(0)
    }

    #[inline]
    pub fn bump(&mut self, n: u64) {
        self.0 += n;
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        check_cols(n_cols)?;
        Ok(Self {
            n_rows,
            n_cols,
            rows: vec![0; n_rows],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_cols(n)?;
        Ok(Self {
            n_rows: n,
            n_cols: n,
            rows: (0..n).map(|r| 1u64 << r).collect(),
        })
    }

    /// Builds a matrix from packed rows; bits at or above `n_cols` must be clear.
    pub fn from_rows(n_cols: usize, rows: Vec<u64>) -> Result<Self> {
        check_cols(n_cols)?;
        let mask = low_mask(n_cols);
        if let Some(r) = rows.iter().position(|&w| w & !mask != 0) {
            return Err(contract(format!("row {r} has bits set beyond column {n_cols}")));
        }
        Ok(Self {
            n_rows: rows.len(),
            n_cols,
            rows,
        })
    }

    /// Builds a matrix from 0/1 entries given row by row.
    pub fn from_bits(entries: &[Vec<u8>]) -> Result<Self> {
        let n_cols = entries.first().map_or(0, Vec::len);
        check_cols(n_cols)?;
        let mut rows = Vec::with_capacity(entries.len());
        for (r, row) in entries.iter().enumerate() {
            if row.len() != n_cols {
                return Err(contract(format!(
                    "row {r} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            let mut w = 0u64;
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => w |= 1 << c,
                    _ => return Err(contract(format!("entry ({r}, {c}) is {b}, not a bit"))),
                }
            }
            rows.push(w);
        }
        Ok(Self {
            n_rows: entries.len(),
            n_cols,
            rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> u64 {
        self.rows[r]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.n_rows && c < self.n_cols, "entry ({r}, {c}) out of range");
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.n_rows && c < self.n_cols, "entry ({r}, {c}) out of range");
        if bit {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    /// `row[target] ^= row[source]`, counted as one vector addition.
    pub fn row_add(&mut self, target: usize, source: usize, counter: &mut VecAdds) -> Result<()> {
        if target >= self.n_rows || source >= self.n_rows {
            return Err(contract(format!(
                "row_add({target}, {source}) on a matrix with {} rows",
                self.n_rows
            )));
        }
        if target == source {
            return Err(contract("row_add needs distinct target and source rows"));
        }
        self.rows[target] ^= self.rows[source];
        counter.bump(1);
        Ok(())
    }

    /// Top-left `n_rows x n_cols` block.
    pub fn leading(&self, n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows > self.n_rows || n_cols > self.n_cols {
            return Err(contract(format!(
                "leading {n_rows}x{n_cols} block of a {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        let mask = low_mask(n_cols);
        Ok(Self {
            n_rows,
            n_cols,
            rows: self.rows[..n_rows].iter().map(|w| w & mask).collect(),
        })
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|&w| {
                let mut acc = 0u64;
                let mut bits = w;
                while bits != 0 {
                    acc ^= rhs.rows[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: rhs.n_cols,
            rows,
        })
    }

    /// Rank by plain elimination on a scratch copy. Does not count additions.
    pub fn rank(&self) -> usize {
        rank_of_rows(&self.rows)
    }

    pub fn is_nonsingular(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(contract(format!(
                "is_nonsingular on a non-square {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        Ok(self.rank() == self.n_rows)
    }
}

/// Rank of a set of packed rows.
pub fn rank_of_rows(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &row in rows {
        let mut v = row;
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = v;
                rank += 1;
                break;
            }
            v ^= basis[lead];
        }
    }
    rank
}

fn check_cols(n_cols: usize) -> Result<()> {
    if n_cols > MAX_COLS {
        return Err(Error::Size(format!(
            "{n_cols} columns requested, at most {MAX_COLS} are supported"
        )));
    }
    Ok(())
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for &w in &self.rows {
            write!(f, "  ")?;
            for c in 0..self.n_cols {
                write!(f, "{}", (w >> c) & 1)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

//! Reduction in almost row echelon form (RAREF) of a `q x k` matrix `C`.
//!
//! A RAREF is a triplet `(L, T, p)` with `L` a non-singular `q x q` matrix,
//! `T = L C`, and `p` a set of pivot columns of `T` that are distinct
//! canonical basis vectors, with `|p| = rank(C)`. It is cheaper than a full
//! echelon form and, crucially, it can be repaired in `O(q)` row additions
//! when a single row of `C` is replaced, which is what makes sweeping over
//! long sequences of composition matrices affordable.
//!
//! Each row XOR applied to `L` or to `T` counts as one vector addition.

use std::fmt::Debug;
use std::ops::{BitAnd, BitXor, BitXorAssign, Shl, Shr};

use crate::error::{contract, Result};
use crate::gf2::{low_mask, BitMatrix, VecAdds};

const NO_PIVOT: u8 = u8::MAX;

/// Storage for one row `(L_r, T_r)` packed as `L_r << k | T_r`, so a single
/// XOR applies a row operation to both halves.
trait Word:
    Copy
    + Debug
    + Eq
    + BitXor<Output = Self>
    + BitXorAssign
    + BitAnd<Output = Self>
    + Shl<usize, Output = Self>
    + Shr<usize, Output = Self>
{
    fn from_u64(x: u64) -> Self;
    fn low(self) -> u64;
    /// All ones if `sel == 1`, zero if `sel == 0`.
    fn select(sel: u64) -> Self;
}

impl Word for u64 {
    #[inline(always)]
    fn from_u64(x: u64) -> Self {
        x
    }
    #[inline(always)]
    fn low(self) -> u64 {
        self
    }
    #[inline(always)]
    fn select(sel: u64) -> Self {
        sel.wrapping_neg()
    }
}

impl Word for u128 {
    #[inline(always)]
    fn from_u64(x: u64) -> Self {
        x as u128
    }
    #[inline(always)]
    fn low(self) -> u64 {
        self as u64
    }
    #[inline(always)]
    fn select(sel: u64) -> Self {
        (sel as u128).wrapping_neg()
    }
}

#[derive(Clone, Debug)]
struct Packed<W> {
    q: usize,
    k: usize,
    t_mask: u64,
    rows: Vec<W>,
    /// Rows of the current source matrix `C`.
    src: Vec<u64>,
    /// Pivot column owned by each row of `T`, or `NO_PIVOT`.
    row_pivot: Vec<u8>,
    /// Owning row of each pivot column; only meaningful for columns in `pivot_cols`.
    col_owner: [u8; 64],
    pivot_cols: u64,
    rank: usize,
    /// 1-based index of the rightmost column that received a pivot since the
    /// last full computation, `k + 1` once some row failed to get one, 0 before any pivot.
    rightmost: usize,
}

impl<W: Word> Packed<W> {
    fn new(rows: &[u64], k: usize, counter: &mut VecAdds) -> Self {
        let q = rows.len();
        let mut state = Packed {
            q,
            k,
            t_mask: low_mask(k),
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, &w)| W::from_u64(1 << i) << k ^ W::from_u64(w))
                .collect(),
            src: rows.to_vec(),
            row_pivot: vec![NO_PIVOT; q],
            col_owner: [NO_PIVOT; 64],
            pivot_cols: 0,
            rank: 0,
            rightmost: 0,
        };
        for i in 0..q {
            state.pivot_row(i, counter);
        }
        state
    }

    #[inline(always)]
    fn t_of(&self, w: W) -> u64 {
        w.low() & self.t_mask
    }

    fn l_of(&self, w: W) -> u64 {
        (w >> self.k).low() & low_mask(self.q)
    }

    /// Adds `pivot` to every row whose `T` part has bit `bit` set and returns
    /// how many rows that was, the pivot row included.
    fn clear_column(&mut self, pivot: W, bit: usize) -> u64 {
        let mut hits = 0u64;
        for w in self.rows.iter_mut() {
            let sel = (w.low() >> bit) & 1;
            *w ^= pivot & W::select(sel);
            hits += sel;
        }
        hits
    }

    /// Steps 1-3 of the computation for one row.
    fn pivot_row(&mut self, i: usize, counter: &mut VecAdds) {
        // Clear the entries of row i lying in pivot columns. Pivot rows are zero
        // in every other pivot column, so each XOR clears exactly one bit.
        let mut hits = self.t_of(self.rows[i]) & self.pivot_cols;
        while hits != 0 {
            let r = self.col_owner[hits.trailing_zeros() as usize] as usize;
            let w = self.rows[r];
            self.rows[i] ^= w;
            counter.bump(2);
            hits &= hits - 1;
        }

        let row = self.t_of(self.rows[i]);
        if row == 0 {
            self.rightmost = self.k + 1;
            return;
        }
        let j = row.trailing_zeros() as usize;
        self.place_pivot(i, j);

        let pivot = self.rows[i];
        let hits = self.clear_column(pivot, j);
        self.rows[i] = pivot;
        counter.bump(2 * (hits - 1));
    }

    /// The row operations are those of the four-step repair (swap in a row of
    /// `L` with a one in column `i`, clear column `i` of `L`, substitute the
    /// new row, pivot it) and are counted as such, but the two column-clearing
    /// sweeps share one pass over the rows. This relies on the row being
    /// replaced having no entries in the other pivot columns, so clearing
    /// column `i` leaves every remaining pivot column intact.
    #[inline]
    fn update(&mut self, i: usize, new_row: u64, counter: &mut VecAdds) {
        debug_assert!(self.rank == self.q && i < self.q);
        let lbit = self.k + i;
        let mut j = 0;
        while (self.rows[j] >> lbit).low() & 1 == 0 {
            j += 1;
        }
        if j != i {
            self.swap_rows(i, j);
        }
        let old = self.rows[i];

        let c = self.row_pivot[i];
        self.pivot_cols &= !(1u64 << c);
        self.row_pivot[i] = NO_PIVOT;
        self.rank -= 1;
        self.src[i] = new_row;

        // Reduce the new row by the pivot rows as they will be once column i
        // of L is cleared, i.e. with `old` added to those that hold a one there.
        let mut fin = W::from_u64(1 << i) << self.k ^ W::from_u64(new_row);
        let mut hits = new_row & self.pivot_cols;
        let mut reductions = 0u64;
        while hits != 0 {
            fin ^= self.rows[self.col_owner[hits.trailing_zeros() as usize] as usize];
            reductions += 1;
            hits &= hits - 1;
        }
        // fin now holds a one in column i of L iff an odd number of those rows did
        fin ^= old & W::select((fin >> lbit).low() & 1 ^ 1);

        let fin_t = self.t_of(fin);
        let (col, keep) = if fin_t == 0 {
            self.rightmost = self.k + 1;
            (0, 0u64)
        } else {
            let col = fin_t.trailing_zeros() as usize;
            self.place_pivot(i, col);
            (col, 1u64)
        };

        let mut cleared_l = 0u64;
        let mut cleared_t = 0u64;
        for w in self.rows.iter_mut() {
            let sel_l = (*w >> lbit).low() & 1;
            let v = *w ^ (old & W::select(sel_l));
            let sel_t = (v.low() >> col) & keep;
            *w = v ^ (fin & W::select(sel_t));
            cleared_l += sel_l;
            cleared_t += sel_t;
        }
        // row i met `old` in the pass and became zero
        self.rows[i] = fin;
        counter.bump(2 * (cleared_l - 1 + reductions + cleared_t));
    }

    #[inline(always)]
    fn place_pivot(&mut self, row: usize, col: usize) {
        self.pivot_cols |= 1u64 << col;
        self.col_owner[col] = row as u8;
        self.row_pivot[row] = col as u8;
        self.rank += 1;
        if self.rightmost <= self.k {
            self.rightmost = self.rightmost.max(col + 1);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
        self.row_pivot.swap(a, b);
        for r in [a, b] {
            let c = self.row_pivot[r];
            if c != NO_PIVOT {
                self.col_owner[c as usize] = r as u8;
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Store {
    /// `k + q <= 64`.
    Narrow(Packed<u64>),
    Wide(Packed<u128>),
}

#[derive(Clone, Debug)]
pub struct Raref {
    store: Store,
}

macro_rules! with_packed {
    ($self:expr, $p:ident => $body:expr) => {
        match &$self.store {
            Store::Narrow($p) => $body,
            Store::Wide($p) => $body,
        }
    };
}

impl Raref {
    /// Computes a RAREF of the matrix whose rows are `rows` (k columns).
    pub fn compute(rows: &[u64], k: usize, counter: &mut VecAdds) -> Result<Self> {
        let q = rows.len();
        if k > 64 {
            return Err(contract(format!("RAREF with {k} columns (max 64)")));
        }
        if q > k {
            return Err(contract(format!("RAREF needs q <= k, got {q}x{k}")));
        }
        if rows.iter().any(|&w| w & !low_mask(k) != 0) {
            return Err(contract("source row has bits beyond column k"));
        }
        let store = if k + q <= 64 {
            Store::Narrow(Packed::new(rows, k, counter))
        } else {
            Store::Wide(Packed::new(rows, k, counter))
        };
        Ok(Raref { store })
    }

    pub fn compute_matrix(c: &BitMatrix, counter: &mut VecAdds) -> Result<Self> {
        Self::compute(c.rows(), c.n_cols(), counter)
    }

    /// Replaces row `i` of the source matrix by `new_row` and repairs the RAREF.
    ///
    /// The current source must have full rank.
    pub fn update(&mut self, i: usize, new_row: u64, counter: &mut VecAdds) -> Result<()> {
        if i >= self.q() {
            return Err(contract(format!("update of row {i} in a {}-row RAREF", self.q())));
        }
        if new_row & !low_mask(self.k()) != 0 {
            return Err(contract("new row has bits beyond column k"));
        }
        if !self.is_full_rank() {
            return Err(contract(format!(
                "RAREF update needs a full-rank source (rank {} < {})",
                self.rank(),
                self.q()
            )));
        }
        self.update_unchecked(i, new_row, counter);
        Ok(())
    }

    /// [`Raref::update`] without argument checks.
    #[inline]
    pub(crate) fn update_unchecked(&mut self, i: usize, new_row: u64, counter: &mut VecAdds) {
        match &mut self.store {
            Store::Narrow(p) => p.update(i, new_row, counter),
            Store::Wide(p) => p.update(i, new_row, counter),
        }
    }

    pub fn q(&self) -> usize {
        with_packed!(self, p => p.q)
    }

    pub fn k(&self) -> usize {
        with_packed!(self, p => p.k)
    }

    pub fn rank(&self) -> usize {
        with_packed!(self, p => p.rank)
    }

    pub fn is_full_rank(&self) -> bool {
        with_packed!(self, p => p.rank == p.q)
    }

    /// 1-based index of the rightmost column where a pivot was placed since
    /// the last [`Raref::compute`], or `k + 1` once a row could not be pivoted.
    pub fn rightmost_pivot_col(&self) -> usize {
        with_packed!(self, p => p.rightmost)
    }

    /// Pivots as `(column, row)` pairs, 0-based, sorted by column.
    pub fn pivots(&self) -> Vec<(usize, usize)> {
        let (mut cols, owner) = with_packed!(self, p => (p.pivot_cols, p.col_owner));
        let mut out = Vec::with_capacity(self.rank());
        while cols != 0 {
            let c = cols.trailing_zeros() as usize;
            out.push((c, owner[c] as usize));
            cols &= cols - 1;
        }
        out
    }

    pub fn l(&self) -> BitMatrix {
        let rows = with_packed!(self, p => p.rows.iter().map(|&w| p.l_of(w)).collect());
        BitMatrix::from_rows(self.q(), rows).expect("q <= 64")
    }

    pub fn t(&self) -> BitMatrix {
        let rows = with_packed!(self, p => p.rows.iter().map(|&w| p.t_of(w)).collect());
        BitMatrix::from_rows(self.k(), rows).expect("k <= 64")
    }

    pub fn source(&self) -> BitMatrix {
        BitMatrix::from_rows(self.k(), with_packed!(self, p => p.src.clone())).expect("k <= 64")
    }

    /// Checks the defining properties against a fresh recomputation.
    ///
    /// Returns a description of the first violated property.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let l = self.l();
        let t = self.t();
        let c = self.source();
        if !l.is_nonsingular().unwrap_or(false) {
            return Err("L is singular".into());
        }
        if l.mul(&c).map_err(|e| e.to_string())? != t {
            return Err("L * C != T".into());
        }
        let (row_pivot, pivot_cols) = with_packed!(self, p => (p.row_pivot.clone(), p.pivot_cols));
        let mut seen_rows = 0u64;
        for (col, row) in self.pivots() {
            if row_pivot[row] as usize != col {
                return Err(format!("pivot maps disagree on column {col}"));
            }
            if seen_rows & (1 << row) != 0 {
                return Err(format!("row {row} holds two pivots"));
            }
            seen_rows |= 1 << row;
            for r in 0..self.q() {
                if t.get(r, col) != (r == row) {
                    return Err(format!("pivot column {col} is not canonical vector e_{row}"));
                }
            }
        }
        for (r, &p) in row_pivot.iter().enumerate() {
            if p != NO_PIVOT && pivot_cols & (1u64 << p) == 0 {
                return Err(format!("row {r} claims pivot {p} missing from the pivot set"));
            }
        }
        let rank_t = t.rank();
        if self.rank() != rank_t || rank_t != c.rank() {
            return Err(format!(
                "|p| = {}, rank(T) = {rank_t}, rank(C) = {}",
                self.rank(),
                c.rank()
            ));
        }
        Ok(())
    }
}

use super::{row_table, Direction};
use crate::composition::{CompositionWalker, Kind};
use crate::error::{contract, Result};
use crate::gf2::{BitMatrix, VecAdds};
use crate::net::check_generators;
use crate::raref::Raref;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelOutcome {
    /// Every composition matrix of the level has full rank. `rightmost` is the
    /// 1-based rightmost column that held a pivot at any point of the sweep.
    FullRank {
        rightmost: usize,
    },
    Deficient,
}

impl LevelOutcome {
    pub fn is_full_rank(self) -> bool {
        matches!(self, LevelOutcome::FullRank { .. })
    }
}

/// Sweeps all compositions of `q` (of the given kind, parts at most `k`) in
/// single-change order, keeping one RAREF up to date, and stops at the first
/// deficient matrix.
///
/// `rows[j]` holds the rows of generator matrix `j`.
pub fn level_check(rows: &[&[u64]], k: usize, q: usize, kind: Kind, counter: &mut VecAdds) -> Result<LevelOutcome> {
    if q > k {
        return Err(contract(format!("level q = {q} exceeds k = {k}")));
    }
    let mut walker = CompositionWalker::of_kind(kind, rows.len(), q, k);
    if walker.is_exhausted() {
        return Ok(LevelOutcome::FullRank { rightmost: 0 });
    }
    let initial: Vec<u64> = walker.layout().iter().map(|&(j, depth)| rows[j][depth]).collect();
    let mut raref = Raref::compute(&initial, k, counter)?;
    if !raref.is_full_rank() {
        return Ok(LevelOutcome::Deficient);
    }
    while let Some(delta) = walker.advance() {
        raref.update_unchecked(delta.slot, rows[delta.to][delta.added_depth], counter);
        if !raref.is_full_rank() {
            return Ok(LevelOutcome::Deficient);
        }
    }
    Ok(LevelOutcome::FullRank {
        rightmost: raref.rightmost_pivot_col(),
    })
}

pub fn rho_mgl(matrices: &[BitMatrix], direction: Direction, counter: &mut VecAdds) -> Result<usize> {
    let k = check_generators(matrices)?;
    let rows = row_table(matrices);
    match direction {
        Direction::Increasing => {
            for q in 1..=k {
                if !level_check(&rows, k, q, Kind::Weak, counter)?.is_full_rank() {
                    return Ok(q - 1);
                }
            }
            Ok(k)
        }
        Direction::Decreasing { start } => {
            for q in (1..=start.min(k)).rev() {
                if level_check(&rows, k, q, Kind::Weak, counter)?.is_full_rank() {
                    return Ok(q);
                }
            }
            Ok(0)
        }
    }
}

/// Largest `q` such that every composition matrix of total `q` with all
/// parts positive has full rank, scanning down from `k`; `d - 1` if there is
/// no such `q >= d`.
pub fn rho_tilde(matrices: &[BitMatrix], counter: &mut VecAdds) -> Result<usize> {
    let k = check_generators(matrices)?;
    let d = matrices.len();
    let rows = row_table(matrices);
    for q in (d..=k).rev() {
        if level_check(&rows, k, q, Kind::Positive, counter)?.is_full_rank() {
            return Ok(q);
        }
    }
    Ok(d - 1)
}

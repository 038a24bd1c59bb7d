use super::row_table;
use crate::composition::{combinations, CompositionWalker};
use crate::error::Result;
use crate::gf2::{BitMatrix, VecAdds};
use crate::net::check_generators;

/// Increasing search over linear combinations of rows.
///
/// Level `q` fails iff some non-trivial combination of the rows of a
/// composition matrix of total `q` vanishes. Each such combination is
/// counted once by its support profile: the coordinates `u` it touches and,
/// for each of them, the deepest row used. A single coordinate never yields a
/// dependency (its matrix is non-singular), so `|u| >= 2`. For a fixed
/// profile the free rows are walked in Gray-code order, one addition per
/// combination.
pub fn rho_schmid(matrices: &[BitMatrix], counter: &mut VecAdds) -> Result<usize> {
    let k = check_generators(matrices)?;
    let rows = row_table(matrices);
    for q in 2..=k {
        if !level_free_of_dependencies(&rows, &(0..rows.len()).collect::<Vec<_>>(), k, q, 2, counter) {
            return Ok(q - 1);
        }
    }
    Ok(k)
}

/// True when no profile of total `q` over subsets of `coords` with at least
/// `min_order` coordinates gives a vanishing combination.
pub(crate) fn level_free_of_dependencies(
    rows: &[&[u64]],
    coords: &[usize],
    k: usize,
    q: usize,
    min_order: usize,
    counter: &mut VecAdds,
) -> bool {
    for d in min_order.max(2)..=coords.len().min(q) {
        for u in combinations(coords.len(), d) {
            let u: Vec<usize> = u.iter().map(|&i| coords[i]).collect();
            if !profile_free_of_dependencies(rows, &u, k, q, counter) {
                return false;
            }
        }
    }
    true
}

/// Checks every positive composition of `q` over exactly the coordinates `u`.
pub(crate) fn profile_free_of_dependencies(
    rows: &[&[u64]],
    u: &[usize],
    k: usize,
    q: usize,
    counter: &mut VecAdds,
) -> bool {
    let mut walker = CompositionWalker::positive(u.len(), q, k);
    if walker.is_exhausted() {
        return true;
    }
    let mut free = Vec::with_capacity(q);
    loop {
        let parts = walker.parts();
        free.clear();
        let mut acc = 0u64;
        for (i, &j) in u.iter().enumerate() {
            let p = parts[i];
            acc ^= rows[j][p - 1];
            free.extend_from_slice(&rows[j][..p - 1]);
        }
        counter.bump(u.len() as u64 - 1);
        if acc == 0 {
            return false;
        }
        let n = free.len();
        let combos: u64 = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut adds = 0u64;
        for g in 1..=combos {
            acc ^= free[g.trailing_zeros() as usize];
            adds += 1;
            if acc == 0 {
                counter.bump(adds);
                return false;
            }
        }
        counter.bump(adds);
        if walker.advance().is_none() {
            return true;
        }
    }
}

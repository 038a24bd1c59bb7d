use super::row_table;
use crate::composition::CompositionWalker;
use crate::error::Result;
use crate::gf2::{BitMatrix, VecAdds};
use crate::net::check_generators;

/// Increasing search with a fresh Gaussian elimination of every composition
/// matrix. A row is reduced only by basis vectors with distinct leading
/// columns, so a `q`-row matrix costs at most `C(q, 2)` additions.
pub fn rho_ps(matrices: &[BitMatrix], counter: &mut VecAdds) -> Result<usize> {
    let k = check_generators(matrices)?;
    let rows = row_table(matrices);
    let mut basis = [0u64; 64];
    for q in 1..=k {
        let mut walker = CompositionWalker::weak(rows.len(), q, k);
        loop {
            let mut present = 0u64;
            let mut adds = 0u64;
            let mut deficient = false;
            for &(j, depth) in walker.layout() {
                let mut r = rows[j][depth];
                loop {
                    if r == 0 {
                        deficient = true;
                        break;
                    }
                    let c = r.trailing_zeros();
                    if present >> c & 1 == 1 {
                        r ^= basis[c as usize];
                        adds += 1;
                    } else {
                        basis[c as usize] = r;
                        present |= 1 << c;
                        break;
                    }
                }
                if deficient {
                    break;
                }
            }
            counter.bump(adds);
            if deficient {
                return Ok(q - 1);
            }
            if walker.advance().is_none() {
                break;
            }
        }
    }
    Ok(k)
}

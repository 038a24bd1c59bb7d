//! Definition-level check: a composition `(q_1, .., q_s)` of `q` is fine iff
//! every elementary interval `prod_j [a_j 2^-q_j, (a_j + 1) 2^-q_j)` holds
//! exactly `2^(k-q)` of the `2^k` points.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::net::check_generators;

pub const ORACLE_MAX_K: usize = 14;

pub fn rho_oracle(matrices: &[BitMatrix]) -> Result<usize> {
    let k = check_generators(matrices)?;
    if k > ORACLE_MAX_K {
        return Err(Error::Size(format!(
            "point-counting oracle supports k <= {ORACLE_MAX_K}, got {k}"
        )));
    }
    let n = 1usize << k;
    // digits[j][i]: bit r is digit r+1 of coordinate j of point i
    let digits: Vec<Vec<u32>> = matrices
        .iter()
        .map(|m| {
            (0..n as u64)
                .map(|i| {
                    m.rows()
                        .iter()
                        .enumerate()
                        .fold(0u32, |y, (r, &row)| y | (((row & i).count_ones() & 1) << r))
                })
                .collect()
        })
        .collect();

    let mut counts = vec![0u32; n];
    for q in 1..=k {
        let mut parts = vec![0usize; matrices.len()];
        let mut ok = true;
        weak_compositions(&mut parts, 0, q, &mut |parts| {
            if ok && !equidistributed(&digits, parts, k, &mut counts) {
                ok = false;
            }
        });
        if !ok {
            return Ok(q - 1);
        }
    }
    Ok(k)
}

#[allow(clippy::needless_range_loop)]
fn equidistributed(digits: &[Vec<u32>], parts: &[usize], k: usize, counts: &mut [u32]) -> bool {
    let q: usize = parts.iter().sum();
    let boxes = &mut counts[..1 << q];
    boxes.fill(0);
    for i in 0..1usize << k {
        let mut index = 0usize;
        let mut shift = 0;
        for (j, &p) in parts.iter().enumerate() {
            index |= ((digits[j][i] as usize) & ((1 << p) - 1)) << shift;
            shift += p;
        }
        boxes[index] += 1;
    }
    let want = 1u32 << (k - q);
    boxes.iter().all(|&c| c == want)
}

fn weak_compositions(parts: &mut [usize], at: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
    if at + 1 == parts.len() {
        parts[at] = left;
        visit(parts);
        return;
    }
    for v in 0..=left {
        parts[at] = v;
        weak_compositions(parts, at + 1, left - v, visit);
    }
}

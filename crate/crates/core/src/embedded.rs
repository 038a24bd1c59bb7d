//! t-values of the embedded nets `S_m`, `m_0 <= m <= k`, for every projection.
//!
//! `S_m` uses the leading `m x m` block of each generator matrix. One sweep of
//! a positive level `q` at full width also tells for which `m` that level has
//! full rank: a RAREF has full rank on the first `m` columns exactly when all
//! its pivots lie there, so the level is full for every `m >= l_q`, where
//! `l_q` is the rightmost pivot column seen during the sweep.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::composition::Kind;
use crate::error::{contract, Error, Result};
use crate::gf2::{low_mask, rank_of_rows, VecAdds};
use crate::net::NetDef;
use crate::projections::{inherited_bound, subsets_by_order, ProjectionKey};
use crate::tvalue::{level_check, row_table, LevelOutcome};

/// Coordinates `j` (1-based) and sizes `m` at which the leading `m x m` minor
/// of `C_j` is singular.
pub fn check_embedded_regularity(net: &NetDef, m0: usize) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for (j, c) in net.matrices().iter().enumerate() {
        for m in m0.max(1)..=net.k() {
            let minor: Vec<u64> = c.rows()[..m].iter().map(|&r| r & low_mask(m)).collect();
            if rank_of_rows(&minor) < m {
                bad.push((j + 1, m));
            }
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    /// `rho(S_{u,m})` for `m = m_0..=k`.
    rho: Vec<usize>,
    /// `l_q` for `q = |u|, |u|+1, ...` as far as the sweep went.
    l: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedTable {
    k: usize,
    s: usize,
    m0: usize,
    d_max: usize,
    entries: BTreeMap<ProjectionKey, Entry>,
}

impl EmbeddedTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.m0..=self.k
    }

    pub fn rho(&self, u: ProjectionKey, m: usize) -> Option<usize> {
        if !self.levels().contains(&m) {
            return None;
        }
        self.entries.get(&u).map(|e| e.rho[m - self.m0])
    }

    pub fn t(&self, u: ProjectionKey, m: usize) -> Option<usize> {
        self.rho(u, m).map(|r| m - r)
    }

    /// Smallest `m` such that every positive composition matrix of `u` with
    /// `q` rows and `m` columns has full rank, `k + 1` if there is none.
    /// `None` for levels the computation had no need to visit.
    pub fn l_q(&self, u: ProjectionKey, q: usize) -> Option<usize> {
        let e = self.entries.get(&u)?;
        let d = u.order();
        if q < d {
            return None;
        }
        match e.l.get(q - d) {
            Some(&l) => Some(l),
            // levels above a deficient one are deficient too
            None if e.l.last() == Some(&(self.k + 1)) => Some(self.k + 1),
            None => None,
        }
    }

    /// `(u, t(S_{u,m}))` in lexicographic order of `u`.
    pub fn t_values_at(&self, m: usize) -> impl Iterator<Item = (ProjectionKey, usize)> + '_ {
        let i = m - self.m0;
        self.entries.iter().map(move |(&u, e)| (u, m - e.rho[i]))
    }

    pub fn projections(&self) -> impl Iterator<Item = ProjectionKey> + '_ {
        self.entries.keys().copied()
    }
}

/// Largest swept `q` with `l_q <= m`, or `d - 1`.
fn rho_tilde_at(l: &[usize], d: usize, m: usize) -> usize {
    l.iter()
        .enumerate()
        .take_while(|&(_, &lq)| lq <= m)
        .last()
        .map_or(d - 1, |(i, _)| d + i)
}

pub fn embedded_t_all(net: &NetDef, m0: usize, d_max: usize, counter: &mut VecAdds) -> Result<EmbeddedTable> {
    let (k, s) = (net.k(), net.s());
    if m0 == 0 || m0 > k {
        return Err(contract(format!("m_0 = {m0} must lie in 1..={k}")));
    }
    if d_max > s {
        return Err(contract(format!("d_max = {d_max} exceeds s = {s}")));
    }
    if let Some(&(coordinate, m)) = check_embedded_regularity(net, m0).first() {
        return Err(Error::SingularMinor { coordinate, m });
    }
    let rows = row_table(net.matrices());
    let n_levels = k - m0 + 1;
    let mut entries: BTreeMap<ProjectionKey, Entry> = BTreeMap::new();
    for (level, subsets) in subsets_by_order(s, d_max).into_iter().enumerate() {
        let d = level + 1;
        if d == 1 {
            for u in subsets {
                let entry = Entry {
                    rho: (m0..=k).collect(),
                    l: (1..=k).collect(),
                };
                entries.insert(u, entry);
            }
            continue;
        }
        let results: Vec<Result<(ProjectionKey, Entry, u64)>> = subsets
            .par_iter()
            .map(|&u| {
                let mut local = VecAdds::new();
                // rho at width m never exceeds rho at width k
                let q_hi = inherited_bound(u, |v| entries[&v].rho[n_levels - 1]);
                let sub: Vec<&[u64]> = u.coords().into_iter().map(|j| rows[j]).collect();
                let mut l = Vec::new();
                for q in d..=q_hi {
                    match level_check(&sub, k, q, Kind::Positive, &mut local)? {
                        LevelOutcome::FullRank { rightmost } => l.push(rightmost),
                        LevelOutcome::Deficient => {
                            l.push(k + 1);
                            break;
                        }
                    }
                }
                let rho = (m0..=k)
                    .map(|m| {
                        let inherited = inherited_bound(u, |v| entries[&v].rho[m - m0]);
                        if inherited < d {
                            inherited
                        } else {
                            inherited.min(rho_tilde_at(&l, d, m))
                        }
                    })
                    .collect();
                Ok((u, Entry { rho, l }, local.get()))
            })
            .collect();
        for res in results {
            let (u, entry, adds) = res?;
            counter.bump(adds);
            entries.insert(u, entry);
        }
    }
    Ok(EmbeddedTable {
        k,
        s,
        m0,
        d_max,
        entries,
    })
}

//! t-values of all projections up to a given order.
//!
//! Subsets are visited by increasing cardinality and
//!
//! ```text
//! rho(S_u) = min( rho~(S_u), min_{j in u} rho(S_{u \ j}) )
//! ```
//!
//! so only `rho~` needs fresh work, and only for levels `q` between `|u|` and
//! the bound inherited from the subsets.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::composition::{combinations, Kind};
use crate::error::{contract, Error, Result};
use crate::gf2::VecAdds;
use crate::net::NetDef;
use crate::tvalue::{level_check, rho_ps, row_table};

/// Non-empty set of coordinates, stored as a bit mask (coordinate `j` is bit `j`).
///
/// Ordered lexicographically by the increasing list of coordinates, so
/// `{1} < {1,2} < {1,2,3} < {1,3} < {2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjectionKey(u64);

impl ProjectionKey {
    pub const MAX_COORDS: usize = 64;

    /// From 0-based coordinates.
    pub fn from_coords(coords: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &j in coords {
            if j >= Self::MAX_COORDS {
                return Err(Error::Size(format!("coordinate {} beyond {}", j + 1, Self::MAX_COORDS)));
            }
            if mask >> j & 1 == 1 {
                return Err(contract(format!("coordinate {} listed twice", j + 1)));
            }
            mask |= 1 << j;
        }
        if mask == 0 {
            return Err(contract("empty projection"));
        }
        Ok(Self(mask))
    }

    pub fn singleton(j: usize) -> Self {
        Self(1 << j)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn order(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, j: usize) -> bool {
        j < 64 && self.0 >> j & 1 == 1
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based coordinates in increasing order.
    pub fn coords(self) -> Vec<usize> {
        let mut m = self.0;
        let mut out = Vec::with_capacity(self.order());
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        out
    }

    /// `self \ {j}`, or `None` if that would be empty.
    pub fn without(self, j: usize) -> Option<Self> {
        let m = self.0 & !(1 << j);
        (m != 0).then_some(Self(m))
    }
}

impl Ord for ProjectionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // lexicographic on the sorted coordinate lists, without allocating
        let (mut a, mut b) = (self.0, other.0);
        loop {
            match (a, b) {
                (0, 0) => return Ordering::Equal,
                (0, _) => return Ordering::Less,
                (_, 0) => return Ordering::Greater,
                _ => {}
            }
            let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
            if x != y {
                return x.cmp(&y);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

impl PartialOrd for ProjectionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// 1-based, e.g. `{1,3}`.
impl fmt::Display for ProjectionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, j) in self.coords().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ProjectionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All subsets of `0..s` with between 1 and `d_max` elements, grouped by size.
pub fn subsets_by_order(s: usize, d_max: usize) -> Vec<Vec<ProjectionKey>> {
    (1..=d_max.min(s))
        .map(|d| {
            combinations(s, d)
                .map(|c| ProjectionKey(c.iter().fold(0, |m, &j| m | 1 << j)))
                .collect()
        })
        .collect()
}

/// `rho(S_u)` for every `u` with `1 <= |u| <= d_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoTable {
    k: usize,
    s: usize,
    d_max: usize,
    rho: BTreeMap<ProjectionKey, usize>,
}

impl RhoTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self, u: ProjectionKey) -> Option<usize> {
        self.rho.get(&u).copied()
    }

    pub fn t(&self, u: ProjectionKey) -> Option<usize> {
        self.rho(u).map(|r| self.k - r)
    }

    /// `(u, rho)` in lexicographic subset order.
    pub fn iter(&self) -> impl Iterator<Item = (ProjectionKey, usize)> + '_ {
        self.rho.iter().map(|(&u, &r)| (u, r))
    }

    /// `(u, t)` in lexicographic subset order.
    pub fn t_values(&self) -> impl Iterator<Item = (ProjectionKey, usize)> + '_ {
        self.iter().map(|(u, r)| (u, self.k - r))
    }

    pub fn max_t(&self) -> Option<usize> {
        self.t_values().map(|(_, t)| t).max()
    }

    pub(crate) fn from_map(k: usize, s: usize, d_max: usize, rho: BTreeMap<ProjectionKey, usize>) -> Self {
        Self { k, s, d_max, rho }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectionMethod {
    /// Dynamic programming over subsets with incremental RAREF sweeps.
    Mgl,
    /// Linear-combination search shared across projections.
    Schmid,
    /// Independent fresh-elimination search per projection.
    PirsicSchmid,
}

impl ProjectionMethod {
    pub const ALL: [ProjectionMethod; 3] = [
        ProjectionMethod::Mgl,
        ProjectionMethod::Schmid,
        ProjectionMethod::PirsicSchmid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProjectionMethod::Mgl => "mgl",
            ProjectionMethod::Schmid => "schmid",
            ProjectionMethod::PirsicSchmid => "ps",
        }
    }
}

impl fmt::Display for ProjectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProjectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mgl" | "mgl-inc" | "mgl-dec" => Ok(ProjectionMethod::Mgl),
            "schmid" | "s" => Ok(ProjectionMethod::Schmid),
            "ps" | "pirsic-schmid" => Ok(ProjectionMethod::PirsicSchmid),
            _ => Err(contract(format!(
                "unknown projection method `{s}` (expected mgl, schmid or ps)"
            ))),
        }
    }
}

fn check_d_max(net: &NetDef, d_max: usize) -> Result<()> {
    if d_max > net.s() {
        return Err(contract(format!("d_max = {d_max} exceeds s = {}", net.s())));
    }
    if net.s() > ProjectionKey::MAX_COORDS {
        return Err(Error::Size(format!(
            "projections need s <= {}, got {}",
            ProjectionKey::MAX_COORDS,
            net.s()
        )));
    }
    Ok(())
}

/// Smallest `rho` over the maximal proper subsets of `u`.
pub(crate) fn inherited_bound(u: ProjectionKey, lookup: impl Fn(ProjectionKey) -> usize) -> usize {
    u.coords()
        .into_iter()
        .filter_map(|j| u.without(j))
        .map(lookup)
        .min()
        .expect("u has at least two coordinates")
}

pub fn rho_all_projections(net: &NetDef, d_max: usize, counter: &mut VecAdds) -> Result<RhoTable> {
    rho_all_projections_with(net, d_max, ProjectionMethod::Mgl, counter)
}

pub fn t_all_projections(net: &NetDef, d_max: usize) -> Result<BTreeMap<ProjectionKey, usize>> {
    let table = rho_all_projections(net, d_max, &mut VecAdds::new())?;
    Ok(table.t_values().collect())
}

pub fn rho_all_projections_with(
    net: &NetDef,
    d_max: usize,
    method: ProjectionMethod,
    counter: &mut VecAdds,
) -> Result<RhoTable> {
    check_d_max(net, d_max)?;
    let rho = match method {
        ProjectionMethod::Mgl => dp_mgl(net, d_max, counter)?,
        ProjectionMethod::Schmid => shared_schmid(net, d_max, counter),
        ProjectionMethod::PirsicSchmid => independent_ps(net, d_max, counter)?,
    };
    Ok(RhoTable::from_map(net.k(), net.s(), d_max, rho))
}

fn dp_mgl(net: &NetDef, d_max: usize, counter: &mut VecAdds) -> Result<BTreeMap<ProjectionKey, usize>> {
    let k = net.k();
    let rows = row_table(net.matrices());
    let mut rho = BTreeMap::new();
    for (level, subsets) in subsets_by_order(net.s(), d_max).into_iter().enumerate() {
        let d = level + 1;
        if d == 1 {
            rho.extend(subsets.into_iter().map(|u| (u, k)));
            continue;
        }
        let results: Vec<Result<(ProjectionKey, usize, u64)>> = subsets
            .par_iter()
            .map(|&u| {
                let mut local = VecAdds::new();
                let q_max = inherited_bound(u, |v| rho[&v]);
                let r = if q_max < d {
                    q_max
                } else {
                    let sub: Vec<&[u64]> = u.coords().into_iter().map(|j| rows[j]).collect();
                    let mut found = d - 1;
                    for q in (d..=q_max).rev() {
                        if level_check(&sub, k, q, Kind::Positive, &mut local)?.is_full_rank() {
                            found = q;
                            break;
                        }
                    }
                    found
                };
                Ok((u, r, local.get()))
            })
            .collect();
        for res in results {
            let (u, r, adds) = res?;
            counter.bump(adds);
            rho.insert(u, r);
        }
    }
    Ok(rho)
}

fn shared_schmid(net: &NetDef, d_max: usize, counter: &mut VecAdds) -> BTreeMap<ProjectionKey, usize> {
    let k = net.k();
    let rows = row_table(net.matrices());
    let all: Vec<ProjectionKey> = subsets_by_order(net.s(), d_max).into_iter().flatten().collect();
    let mut rho: BTreeMap<ProjectionKey, usize> = BTreeMap::new();
    for u in all.iter().filter(|u| u.order() == 1) {
        rho.insert(*u, k);
    }
    for q in 2..=k {
        // a profile is worth checking only while no subset of it has failed
        let failed: Vec<ProjectionKey> = all
            .iter()
            .filter(|v| v.order() >= 2 && !rho.contains_key(v))
            .filter(|v| !crate::tvalue::schmid_profile_free(&rows, &v.coords(), k, q, counter))
            .copied()
            .collect();
        if failed.is_empty() {
            continue;
        }
        for u in &all {
            if !rho.contains_key(u) && failed.iter().any(|v| v.is_subset_of(*u)) {
                rho.insert(*u, q - 1);
            }
        }
    }
    for u in all {
        rho.entry(u).or_insert(k);
    }
    rho
}

fn independent_ps(net: &NetDef, d_max: usize, counter: &mut VecAdds) -> Result<BTreeMap<ProjectionKey, usize>> {
    let mut rho = BTreeMap::new();
    for u in subsets_by_order(net.s(), d_max).into_iter().flatten() {
        let r = rho_ps(&net.project(&u.coords())?, counter)?;
        rho.insert(u, r);
    }
    Ok(rho)
}

//! Enumeration of compositions `(q_1, ..., q_d)` such that consecutive items
//! differ by moving a single unit between two parts.
//!
//! For composition matrices (the stacked leading `q_j` rows of each
//! generator matrix) such a move removes the deepest row of one block and
//! appends a new deepest row to another. The walker keeps a stable
//! assignment of physical row slots, handing the freed slot to the growing
//! block, so each step is one row replacement for the RAREF layer.
//!
//! When no part can exceed its cap (the only case the rank algorithms use)
//! the order is the reflected Gray code for compositions and costs O(1)
//! amortised per step with no storage. If the cap binds, the feasible set is materialised
//! and ordered by a depth-first search for a Hamiltonian path.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Parts are non-negative.
    Weak,
    /// Parts are at least one.
    Positive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    pub parts: Vec<usize>,
}

impl Composition {
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// One-row change between two consecutive composition matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowDelta {
    /// Coordinate whose block loses its deepest row.
    pub from: usize,
    /// Coordinate whose block gains a row.
    pub to: usize,
    /// Physical row of the stacked matrix being replaced.
    pub slot: usize,
    /// 0-based row index (in `C_from`) of the removed row.
    pub removed_depth: usize,
    /// 0-based row index (in `C_to`) of the added row.
    pub added_depth: usize,
}

enum Order {
    /// Bit `j` set: the sub-list over parts `0..=j` currently runs backwards.
    Reflected {
        reversed: u64,
        nonzero: u64,
    },
    Listed {
        seq: Vec<Vec<usize>>,
        pos: usize,
    },
}

/// Stateful single-change walk over compositions of a fixed total.
pub struct CompositionWalker {
    /// Parts shifted down by `offset` (1 for positive compositions).
    weak: Vec<usize>,
    offset: usize,
    parts: Vec<usize>,
    order: Order,
    /// Slots held by block `j`, bottom first, at `slots[j * stride..]`;
    /// `parts[j]` of them are in use.
    slots: Vec<usize>,
    stride: usize,
    layout: Vec<(usize, usize)>,
    exhausted: bool,
}

impl CompositionWalker {
    /// Weak compositions of `q` into `d` parts, each part at most `cap`.
    pub fn weak(d: usize, q: usize, cap: usize) -> Self {
        Self::new(d, q, cap, 0)
    }

    /// Compositions of `q` into `d` parts in `1..=cap`.
    pub fn positive(d: usize, q: usize, cap: usize) -> Self {
        if q < d || cap == 0 {
            return Self::empty(d);
        }
        Self::new(d, q - d, cap - 1, 1)
    }

    pub fn of_kind(kind: Kind, d: usize, q: usize, cap: usize) -> Self {
        match kind {
            Kind::Weak => Self::weak(d, q, cap),
            Kind::Positive => Self::positive(d, q, cap),
        }
    }

    fn empty(d: usize) -> Self {
        Self {
            weak: vec![0; d],
            offset: 0,
            parts: vec![0; d],
            order: Order::Reflected {
                reversed: 0,
                nonzero: 0,
            },
            slots: Vec::new(),
            stride: 0,
            layout: Vec::new(),
            exhausted: true,
        }
    }

    fn new(d: usize, n: usize, cap: usize, offset: usize) -> Self {
        if d == 0 || n > d.saturating_mul(cap) {
            return Self::empty(d);
        }
        let (weak, order) = if n <= cap {
            let mut w = vec![0; d];
            w[0] = n;
            (
                w,
                Order::Reflected {
                    reversed: 0,
                    nonzero: (n > 0) as u64,
                },
            )
        } else {
            let seq = hamiltonian_order(d, n, cap);
            (seq[0].clone(), Order::Listed { seq, pos: 0 })
        };
        let parts: Vec<usize> = weak.iter().map(|&w| w + offset).collect();
        let stride = n + offset;
        let mut slots = vec![0; d * stride];
        let mut layout = Vec::new();
        for (j, &p) in parts.iter().enumerate() {
            for depth in 0..p {
                slots[j * stride + depth] = layout.len();
                layout.push((j, depth));
            }
        }
        Self {
            weak,
            offset,
            parts,
            order,
            slots,
            stride,
            layout,
            exhausted: false,
        }
    }

    /// True when the set is empty or the walk has ended.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Current composition.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// For each physical row slot, the `(coordinate, depth)` it currently holds.
    pub fn layout(&self) -> &[(usize, usize)] {
        &self.layout
    }

    /// Moves to the next composition and describes the row change, or
    /// returns `None` once the walk is over.
    #[inline]
    pub fn advance(&mut self) -> Option<RowDelta> {
        if self.exhausted {
            return None;
        }
        let moved = match &mut self.order {
            Order::Reflected { reversed, nonzero } => reflected_next(&mut self.weak, reversed, nonzero),
            Order::Listed { seq, pos } => {
                if *pos + 1 < seq.len() {
                    *pos += 1;
                    let next = &seq[*pos];
                    let from = (0..next.len()).find(|&j| next[j] < self.weak[j]);
                    let to = (0..next.len()).find(|&j| next[j] > self.weak[j]);
                    self.weak.copy_from_slice(next);
                    Some((from.expect("unit move"), to.expect("unit move")))
                } else {
                    None
                }
            }
        };
        let Some((from, to)) = moved else {
            self.exhausted = true;
            return None;
        };
        let removed_depth = self.parts[from] - 1;
        let added_depth = self.parts[to];
        self.parts[from] -= 1;
        self.parts[to] += 1;
        let slot = self.slots[from * self.stride + removed_depth];
        self.slots[to * self.stride + added_depth] = slot;
        self.layout[slot] = (to, added_depth);
        debug_assert_eq!(self.weak[to] + self.offset, self.parts[to]);
        Some(RowDelta {
            from,
            to,
            slot,
            removed_depth,
            added_depth,
        })
    }
}

/// Successor in the reflected Gray order of weak compositions.
///
/// The list for `d` parts and total `n` is the concatenation over the last
/// part `v = 0..=n` of the list for `d - 1` parts and total `n - v`, taken
/// forward for even `v` and reversed for odd `v`. Every forward list starts
/// at `(n, 0, .., 0)` and ends at `(0, .., 0, n)`, which makes consecutive
/// blocks meet with a single unit move.
///
/// `reversed` caches the orientation of every level (bit `j - 1` is bit `j`
/// xor the parity of `w[j]`) and `nonzero` marks the nonzero parts. Below the
/// level that steps, every sub-list sits at its end: all parts are zero except
/// at most one holding the remainder. That makes the search and the refresh
/// plain mask arithmetic.
fn reflected_next(w: &mut [usize], reversed: &mut u64, nonzero: &mut u64) -> Option<(usize, usize)> {
    let d = w.len();
    if d < 2 || *nonzero == 0 {
        return None;
    }
    let levels = mask(d) & !1;
    // a reversed level steps while its own part is nonzero, a forward one
    // while anything below it is
    let lowest = nonzero.trailing_zeros() as usize;
    let candidates = (*reversed & *nonzero | !*reversed & !mask(lowest + 1)) & levels;
    if candidates == 0 {
        return None;
    }
    let j = candidates.trailing_zeros() as usize;
    let rev_j = (*reversed >> j) & 1 == 1;
    let below = *nonzero & mask(j);
    debug_assert!(below.count_ones() <= 1);
    let old_holder = if below == 0 { 0 } else { lowest };
    let old_rest = w[old_holder];

    let rest = if rev_j {
        w[j] -= 1;
        old_rest + 1
    } else {
        w[j] += 1;
        old_rest - 1
    };
    let inner_reversed = rev_j ^ (w[j] & 1 == 1);
    let holder = if j == 1 || !inner_reversed { 0 } else { j - 1 };
    debug_assert!(old_rest == 0 || rest == 0 || holder == old_holder);
    w[old_holder] = 0;
    w[holder] = rest;

    *nonzero &= !(1 << old_holder);
    *nonzero |= ((rest != 0) as u64) << holder;
    *nonzero = (*nonzero & !(1 << j)) | ((w[j] != 0) as u64) << j;
    *reversed = (*reversed & !mask(j)) | if inner_reversed { mask(j) } else { 0 };
    if holder + 1 == j && holder > 0 && rest & 1 == 1 {
        *reversed ^= mask(holder);
    }

    // the lower block either grows by one at its new holder or shrinks by one at the old
    Some(if rev_j { (j, holder) } else { (old_holder, j) })
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1 << n) - 1
    }
}

/// All weak compositions of `n` into `d` parts bounded by `cap`, ordered so
/// that consecutive items differ by one unit move.
///
/// Depth-first search preferring the neighbour with the fewest unvisited
/// neighbours (Warnsdorff's rule), with backtracking. Only used when the cap
/// binds, which keeps the materialised sets small in practice.
fn hamiltonian_order(d: usize, n: usize, cap: usize) -> Vec<Vec<usize>> {
    let nodes = bounded_compositions(d, n, cap);
    let index: HashMap<&[usize], usize> = nodes.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let neighbours: Vec<Vec<usize>> = nodes
        .iter()
        .map(|x| {
            let mut out = Vec::new();
            let mut y = x.clone();
            for a in 0..d {
                if x[a] == 0 {
                    continue;
                }
                for b in 0..d {
                    if b == a || x[b] == cap {
                        continue;
                    }
                    y[a] -= 1;
                    y[b] += 1;
                    out.push(index[y.as_slice()]);
                    y[a] += 1;
                    y[b] -= 1;
                }
            }
            out
        })
        .collect();

    let total = nodes.len();
    let mut visited = vec![false; total];
    let mut path = vec![0usize];
    visited[0] = true;
    let candidates = |v: usize, visited: &[bool]| -> Vec<usize> {
        let mut c: Vec<usize> = neighbours[v].iter().copied().filter(|&u| !visited[u]).collect();
        // popped from the back, so sort by descending degree
        c.sort_by_key(|&u| std::cmp::Reverse((neighbours[u].iter().filter(|&&x| !visited[x]).count(), u)));
        c
    };
    let mut stack = vec![candidates(0, &visited)];
    while path.len() < total {
        let Some(next) = stack.last_mut().and_then(Vec::pop) else {
            stack.pop();
            let v = path.pop().expect("search space exhausted without a path");
            visited[v] = false;
            assert!(!stack.is_empty(), "no single-change order exists");
            continue;
        };
        visited[next] = true;
        path.push(next);
        stack.push(candidates(next, &visited));
    }
    path.into_iter().map(|i| nodes[i].clone()).collect()
}

/// Weak compositions of `n` into `d` parts in `0..=cap`, lexicographically descending.
pub fn bounded_compositions(d: usize, n: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, n: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == d {
            if n <= cap {
                cur.push(n);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let left = d - cur.len() - 1;
        for v in (0..=cap.min(n)).rev() {
            if n - v > left * cap {
                break;
            }
            cur.push(v);
            rec(d, n - v, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, n, cap, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// Iterator over `(composition, delta)`; the first item has no delta.
pub struct CompositionStream {
    walker: CompositionWalker,
    started: bool,
    kind: Kind,
}

impl CompositionStream {
    pub fn kind(&self) -> Kind {
        self.kind
    }
}

impl Iterator for CompositionStream {
    type Item = (Composition, Option<RowDelta>);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            if self.walker.exhausted {
                return None;
            }
            return Some((
                Composition {
                    parts: self.walker.parts().to_vec(),
                },
                None,
            ));
        }
        let delta = self.walker.advance()?;
        Some((
            Composition {
                parts: self.walker.parts().to_vec(),
            },
            Some(delta),
        ))
    }
}

/// Weak compositions of `q` into `d` parts, each part at most `k`.
pub fn enumerate_weak(d: usize, q: usize, k: usize) -> CompositionStream {
    CompositionStream {
        walker: CompositionWalker::weak(d, q, k),
        started: false,
        kind: Kind::Weak,
    }
}

/// Compositions of `q` into `d` parts in `1..=k`.
pub fn enumerate_positive(d: usize, q: usize, k: usize) -> CompositionStream {
    CompositionStream {
        walker: CompositionWalker::positive(d, q, k),
        started: false,
        kind: Kind::Positive,
    }
}

/// `r`-element subsets of `0..n` as increasing index vectors, in lexicographic order.
pub fn combinations(n: usize, r: usize) -> Combinations {
    Combinations {
        n,
        current: (r <= n).then(|| (0..r).collect()),
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let r = out.len();
        let mut next = out.clone();
        if let Some(i) = (0..r).rev().find(|&i| next[i] < self.n - r + i) {
            next[i] += 1;
            for j in i + 1..r {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// `C(n, r)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1); divide first by the gcd to delay overflow
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, dd) = (acc / g, den / g);
        let num = num / dd;
        acc = match a.checked_mul(num) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of compositions of `q` into `d` parts, without a part cap.
pub fn count_compositions(d: usize, q: usize, kind: Kind) -> u128 {
    match kind {
        Kind::Weak if d == 0 => (q == 0) as u128,
        Kind::Weak => binomial((q + d - 1) as u64, (d - 1) as u64),
        Kind::Positive if d == 0 => (q == 0) as u128,
        Kind::Positive if q < d => 0,
        Kind::Positive => binomial((q - 1) as u64, (d - 1) as u64),
    }
}

/// Worst-case number of composition matrices, and of their stacked rows,
/// met when every projection of order at most `d_max` of an `s`-dimensional
/// net with `k x k` generator matrices is checked independently.
pub fn projection_workload(k: usize, s: usize, d_max: usize) -> (u128, u128) {
    let mut matrices = 0u128;
    let mut rows = 0u128;
    for d in 1..=d_max {
        let subsets = binomial(s as u64, d as u64);
        for q in 1..=k {
            let n = subsets * count_compositions(d, q, Kind::Weak);
            matrices += n;
            rows += n * q as u128;
        }
    }
    (matrices, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn single_move(a: &[usize], b: &[usize]) -> bool {
        let down = a.iter().zip(b).filter(|(x, y)| **y + 1 == **x).count();
        let up = a.iter().zip(b).filter(|(x, y)| **x + 1 == **y).count();
        let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
        down == 1 && up == 1 && same + 2 == a.len()
    }

    fn brute(d: usize, q: usize, lo: usize, hi: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        let mut cur = vec![lo; d];
        loop {
            if cur.iter().sum::<usize>() == q {
                out.insert(cur.clone());
            }
            let mut j = 0;
            loop {
                if j == d {
                    return out;
                }
                if cur[j] < hi {
                    cur[j] += 1;
                    break;
                }
                cur[j] = lo;
                j += 1;
            }
        }
    }

    /// Collects a stream while checking slot bookkeeping and single moves.
    fn checked(stream: CompositionStream) -> Vec<Vec<usize>> {
        let mut walker = stream.walker;
        let mut out = Vec::new();
        if walker.exhausted {
            return out;
        }
        let mut rows: Vec<(usize, usize)> = walker.layout().to_vec();
        out.push(walker.parts().to_vec());
        while let Some(delta) = walker.advance() {
            let prev = out.last().unwrap();
            let cur = walker.parts().to_vec();
            assert!(single_move(prev, &cur), "{prev:?} -> {cur:?}");
            assert_eq!(rows[delta.slot], (delta.from, delta.removed_depth));
            assert_eq!(delta.removed_depth + 1, prev[delta.from]);
            assert_eq!(delta.added_depth, prev[delta.to]);
            rows[delta.slot] = (delta.to, delta.added_depth);
            assert_eq!(rows, walker.layout());
            // every block holds exactly its leading rows
            for (j, &p) in cur.iter().enumerate() {
                let mut depths: Vec<usize> = rows.iter().filter(|(c, _)| *c == j).map(|(_, dd)| *dd).collect();
                depths.sort_unstable();
                assert_eq!(depths, (0..p).collect::<Vec<_>>());
            }
            out.push(cur);
        }
        out
    }

    #[test]
    fn weak_examples() {
        let two = checked(enumerate_weak(2, 3, 3));
        let set: BTreeSet<_> = two.iter().cloned().collect();
        assert_eq!(two.len(), 4);
        assert_eq!(
            set,
            [vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]].into_iter().collect()
        );
        assert_eq!(checked(enumerate_weak(1, 5, 5)), vec![vec![5]]);
        assert_eq!(checked(enumerate_weak(3, 4, 4)).len(), 15);
    }

    #[test]
    fn positive_examples() {
        let a: BTreeSet<_> = checked(enumerate_positive(2, 3, 3)).into_iter().collect();
        assert_eq!(a, [vec![2, 1], vec![1, 2]].into_iter().collect());
        assert_eq!(checked(enumerate_positive(3, 3, 3)), vec![vec![1, 1, 1]]);
        let capped: BTreeSet<_> = checked(enumerate_positive(2, 5, 3)).into_iter().collect();
        assert_eq!(capped, [vec![2, 3], vec![3, 2]].into_iter().collect());
        assert!(checked(enumerate_positive(3, 2, 5)).is_empty());
    }

    #[test]
    fn zero_total_and_infeasible() {
        assert_eq!(checked(enumerate_weak(3, 0, 4)), vec![vec![0, 0, 0]]);
        assert!(checked(enumerate_weak(2, 7, 3)).is_empty());
    }

    #[test]
    fn uncapped_streams_match_binomials_and_brute_force() {
        for d in 1..=6 {
            for q in 0..=9 {
                let weak = checked(enumerate_weak(d, q, q.max(1)));
                let set: BTreeSet<_> = weak.iter().cloned().collect();
                assert_eq!(set.len(), weak.len(), "duplicates d={d} q={q}");
                assert_eq!(weak.len() as u128, count_compositions(d, q, Kind::Weak));
                assert_eq!(set, brute(d, q, 0, q));

                let pos = checked(enumerate_positive(d, q, q.max(1)));
                let pset: BTreeSet<_> = pos.iter().cloned().collect();
                assert_eq!(pset.len(), pos.len());
                assert_eq!(pos.len() as u128, count_compositions(d, q, Kind::Positive));
                assert_eq!(pset, brute(d, q, 1, q.max(1)));
            }
        }
    }

    #[test]
    fn capped_streams_match_brute_force() {
        for d in 1..=5 {
            for cap in 1..=4 {
                for q in 0..=d * cap + 1 {
                    let weak = checked(enumerate_weak(d, q, cap));
                    let set: BTreeSet<_> = weak.iter().cloned().collect();
                    assert_eq!(set.len(), weak.len());
                    assert_eq!(set, brute(d, q, 0, cap), "d={d} q={q} cap={cap}");

                    let pos = checked(enumerate_positive(d, q, cap));
                    let pset: BTreeSet<_> = pos.iter().cloned().collect();
                    assert_eq!(pset.len(), pos.len());
                    assert_eq!(pset, brute(d, q, 1, cap), "d={d} q={q} cap={cap}");
                }
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(126, 63), 6_034_934_435_761_406_706_427_864_636_568_328_000);
        assert_eq!(count_compositions(2, 3, Kind::Weak), 4);
        assert_eq!(count_compositions(3, 2, Kind::Positive), 0);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
        assert_eq!(combinations(3, 0).collect::<Vec<_>>(), [Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).count(), 0);
        for n in 0..10 {
            for r in 0..=n {
                assert_eq!(combinations(n, r).count() as u128, binomial(n as u64, r as u64));
            }
        }
    }

    #[test]
    fn workload_totals() {
        assert_eq!(projection_workload(10, 5, 5), (11_552, 91_190));
        let (m, r) = projection_workload(20, 20, 20);
        assert!((m as f64 - 2.6e14).abs() / 2.6e14 < 0.05);
        assert!((r as f64 - 4.9e15).abs() / 4.9e15 < 0.05);
    }
}

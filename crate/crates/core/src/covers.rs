//! Covers of systems by loops, dumbbells and wedges.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::classify::{self, gcd};
use crate::error::{arg, Error, Result};
use crate::maps::SystemMap;
use crate::relation::{disjoint_union_all, FiniteRelation, FiniteSystem};
use crate::search::EdgeIds;
use crate::shapes::{loop_system, pointed_loop, wedge, DumbbellShape};

/// Shortest path `from -> ... -> target` (positive length when
/// `from == target`), as the list of vertices after `from`.
fn shortest_path(r: &FiniteRelation, from: usize, target: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    const ROOT: usize = usize::MAX - 1;
    let mut parent = vec![UNSEEN; r.size()];
    let mut queue = VecDeque::new();
    for &b in r.succ(from) {
        if parent[b] == UNSEEN {
            parent[b] = ROOT;
            queue.push_back(b);
        }
    }
    while let Some(x) = queue.pop_front() {
        if target(x) {
            let mut path = vec![x];
            let mut y = parent[x];
            while y != ROOT {
                path.push(y);
                y = parent[y];
            }
            path.reverse();
            return Some(path);
        }
        for &y in r.succ(x) {
            if parent[y] == UNSEEN {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Closed walk from `start` through every edge of a strongly connected
/// relation: take the least unused outgoing edge while one exists,
/// otherwise detour along a shortest path to a vertex that still has one,
/// and finally return to `start`. The walk lists the vertices visited,
/// starting at `start` and not repeating it at the end.
pub fn covering_walk(r: &FiniteRelation, start: usize) -> Vec<usize> {
    let ids = EdgeIds::new(r);
    let mut used = vec![false; r.edge_count()];
    let mut unused_out: Vec<usize> = (0..r.size()).map(|v| r.succ(v).len()).collect();
    let mut remaining = r.edge_count();
    let mut walk = vec![start];
    let mut cur = start;
    let step = |walk: &mut Vec<usize>, cur: &mut usize, next: usize, used: &mut Vec<bool>, unused_out: &mut Vec<usize>, remaining: &mut usize| {
        let id = ids.id(r, *cur, next).expect("walk follows edges");
        if !used[id] {
            used[id] = true;
            unused_out[*cur] -= 1;
            *remaining -= 1;
        }
        walk.push(next);
        *cur = next;
    };
    while remaining > 0 {
        let free = r.succ(cur).iter().copied().find(|&b| !used[ids.id(r, cur, b).expect("edge")]);
        match free {
            Some(b) => step(&mut walk, &mut cur, b, &mut used, &mut unused_out, &mut remaining),
            None => {
                let path = shortest_path(r, cur, &|x| unused_out[x] > 0).expect("strongly connected");
                for x in path {
                    step(&mut walk, &mut cur, x, &mut used, &mut unused_out, &mut remaining);
                }
            }
        }
    }
    if cur != start || walk.len() == 1 {
        let path = shortest_path(r, cur, &|x| x == start).expect("strongly connected");
        for x in path {
            walk.push(x);
        }
    }
    walk.pop();
    walk
}

/// A loop of length `walk.len()` mapped onto the system along a closed walk.
fn walk_map(s: &Arc<FiniteSystem>, walk: Vec<usize>) -> Result<SystemMap> {
    let lp = Arc::new(loop_system(walk.len())?);
    SystemMap::new(lp, s.clone(), walk)
}

/// Factor map from a single loop onto a transitive system.
pub fn loop_cover(s: &Arc<FiniteSystem>) -> Result<SystemMap> {
    if !classify::is_transitive(s) {
        return Err(Error::Precondition("loop cover needs a transitive system".into()));
    }
    walk_map(s, covering_walk(s, 0))
}

/// Edge-by-edge dumbbell cover: for each edge not yet covered, extend
/// forward and backward along least successors/predecessors until a vertex
/// repeats on each side.
#[derive(Clone, Debug)]
pub struct DumbbellCover {
    pub shapes: Vec<DumbbellShape>,
    pub map: SystemMap,
}

fn extend_until_repeat(s: &FiniteRelation, start: usize, backward: bool) -> (Vec<usize>, usize) {
    let mut seq = vec![start];
    let mut pos = vec![usize::MAX; s.size()];
    pos[start] = 0;
    loop {
        let last = *seq.last().expect("nonempty");
        let nbrs = if backward { s.pred(last) } else { s.succ(last) };
        let next = nbrs[0];
        if pos[next] != usize::MAX {
            return (seq, pos[next]);
        }
        pos[next] = seq.len();
        seq.push(next);
    }
}

pub fn dumbbell_cover(s: &Arc<FiniteSystem>) -> Result<DumbbellCover> {
    let ids = EdgeIds::new(s);
    let mut covered = vec![false; s.edge_count()];
    let mut shapes = Vec::new();
    let mut tables: Vec<Vec<usize>> = Vec::new();
    for (u, v) in s.edges().collect::<Vec<_>>() {
        if covered[ids.id(s, u, v).expect("edge")] {
            continue;
        }
        // Forward f_0 = v, ..., f_{b-1}; f_b repeats f_a.
        let (f, a) = extend_until_repeat(s, v, false);
        // Backward g_0 = u, ..., g_{d-1}; g_d repeats g_c.
        let (g, c) = extend_until_repeat(s, u, true);
        let (b, d) = (f.len(), g.len());
        let shape = DumbbellShape::new(d - c, c + 1 + a, b - a)?;
        let mut table: Vec<usize> = (1..=d).map(|k| g[d - k]).collect();
        table.extend(f.iter().copied());
        debug_assert_eq!(table.len(), shape.size());
        let sys = shape.system();
        for (x, y) in sys.edges() {
            covered[ids.id(s, table[x], table[y]).expect("dumbbell walks along edges")] = true;
        }
        shapes.push(shape);
        tables.push(table);
    }
    let systems: Vec<FiniteSystem> = shapes.iter().map(|sh| sh.system()).collect();
    let refs: Vec<&FiniteRelation> = systems.iter().map(|x| x.relation()).collect();
    let union = FiniteSystem::new(disjoint_union_all(&refs)?)?;
    let table = tables.concat();
    let map = SystemMap::new(Arc::new(union), s.clone(), table)?;
    Ok(DumbbellCover { shapes, map })
}

/// Factor map from a union of equal-length loops onto a recurrent system
/// whose edges all lie inside basic sets.
#[derive(Clone, Debug)]
pub struct LoopUnionCover {
    pub loop_length: usize,
    pub loops: usize,
    pub map: SystemMap,
}

pub fn loop_union_cover(s: &Arc<FiniteSystem>) -> Result<LoopUnionCover> {
    let basic = classify::basic_sets(s);
    let mut owner = vec![usize::MAX; s.size()];
    for (k, set) in basic.iter().enumerate() {
        for &v in set {
            owner[v] = k;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::Precondition(format!("vertex {} is not recurrent", v + 1)));
    }
    if let Some((a, b)) = s.edges().find(|&(a, b)| owner[a] != owner[b]) {
        return Err(Error::Precondition(format!(
            "edge ({}, {}) joins two basic sets and lies on no cycle, so no union of loops maps onto it",
            a + 1,
            b + 1
        )));
    }
    let walks: Vec<Vec<usize>> = basic
        .iter()
        .map(|set| {
            let local: Vec<usize> = {
                let mut idx = vec![usize::MAX; s.size()];
                for (k, &v) in set.iter().enumerate() {
                    idx[v] = k;
                }
                idx
            };
            let sub = FiniteRelation::new(set.len(), set.iter().flat_map(|&a| s.succ(a).iter().map(move |&b| (a, b))).map(|(a, b)| (local[a], local[b])))
                .expect("induced subrelation");
            covering_walk(&sub, 0).into_iter().map(|k| set[k]).collect()
        })
        .collect();
    let lcm = walks.iter().fold(1usize, |acc, w| acc / gcd(acc, w.len()) * w.len());
    let mut table = Vec::with_capacity(lcm * walks.len());
    for w in &walks {
        for k in 0..lcm {
            table.push(w[k % w.len()]);
        }
    }
    let lp = loop_system(lcm)?;
    let parts: Vec<&FiniteRelation> = (0..walks.len()).map(|_| lp.relation()).collect();
    let union = FiniteSystem::new(disjoint_union_all(&parts)?)?;
    let map = SystemMap::new(Arc::new(union), s.clone(), table)?;
    Ok(LoopUnionCover { loop_length: lcm, loops: walks.len(), map })
}

/// Threshold `k = K1 + K2` for a mixing system: `K1` is the least `K >= 0`
/// with `φ^n` full for every `n >= K`, `K2` the length of the covering loop
/// anchored at vertex 1.
#[derive(Clone, Debug, Serialize)]
pub struct WedgeThreshold {
    pub k1: usize,
    pub k2: usize,
    pub k: usize,
    #[serde(skip)]
    system: Arc<FiniteSystem>,
    #[serde(skip)]
    cover: Vec<usize>,
    /// `back[r]`: vertices with a walk of length exactly `r` to the anchor,
    /// for `r < k1`.
    #[serde(skip)]
    back: Vec<BitSet>,
}

pub fn wedge_mixing_threshold(s: &Arc<FiniteSystem>) -> Result<WedgeThreshold> {
    if !classify::mixing_by_period(s) {
        return Err(Error::Precondition("wedge threshold needs a mixing system".into()));
    }
    let k1 = if s.size() == 1 {
        0
    } else {
        classify::first_full_power(s, classify::wielandt_bound(s.size())).expect("mixing system reaches the full relation")
    };
    let cover = covering_walk(s, 0);
    let k2 = cover.len();
    let mut back = Vec::with_capacity(k1);
    let mut cur = BitSet::from_iter(s.size(), [0]);
    for _ in 0..k1 {
        back.push(cur.clone());
        let mut prev = BitSet::new(s.size());
        for x in cur.iter() {
            for &p in s.pred(x) {
                prev.insert(p);
            }
        }
        cur = prev;
    }
    Ok(WedgeThreshold { k1, k2, k: k1 + k2, system: s.clone(), cover, back })
}

impl WedgeThreshold {
    /// Walk of exact length `len` from the anchor back to the anchor,
    /// choosing least successors that can still finish in time.
    fn exact_walk(&self, len: usize) -> Vec<usize> {
        let s = &self.system;
        let mut walk = Vec::with_capacity(len);
        let mut cur = 0usize;
        for step in 0..len {
            walk.push(cur);
            let rem = len - step - 1;
            cur = *s
                .succ(cur)
                .iter()
                .find(|&&y| rem >= self.k1 || self.back[rem].contains(y))
                .expect("walk of the requested length exists");
        }
        debug_assert_eq!(cur, 0);
        walk
    }

    /// Closed walk of length `len >= k` from the anchor: the covering loop,
    /// then an exact-length return.
    fn loop_walk(&self, len: usize) -> Vec<usize> {
        let mut w = self.cover.clone();
        w.extend(self.exact_walk(len - self.k2));
        w
    }

    /// Factor map from `wedge(n, m)` onto the system for `n, m >= k`, with
    /// the wedge point on the anchor.
    pub fn factor_from_wedge(&self, n: usize, m: usize) -> Result<SystemMap> {
        if n < self.k || m < self.k {
            return arg(format!("wedge {n}-{m} below threshold {}", self.k));
        }
        let inw = self.loop_walk(n);
        let outw = self.loop_walk(m);
        // In-loop position p (1..=n) sits p steps after the wedge point n.
        let mut table: Vec<usize> = (1..=n).map(|p| inw[p % n]).collect();
        table.extend((1..m).map(|p| outw[p]));
        let w = Arc::new(wedge(n, m)?);
        SystemMap::new(w, self.system.clone(), table)
    }
}

/// For a permutation system with a cycle of length at least `m + 2`,
/// the quotient onto `pointed_loop(m)`: positions `2..=m` are the iterates
/// `f(x), ..., f^{m-1}(x)` of the least vertex `x` on the first long
/// cycle, everything else goes to 1.
pub fn wedge_representation_of_nonperiodic(s: &Arc<FiniteSystem>, m: usize) -> Result<Option<SystemMap>> {
    if m == 0 {
        return arg("pointed loop length must be positive");
    }
    if (0..s.size()).any(|v| s.succ(v).len() != 1) {
        return Err(Error::Precondition("wedge representation needs a permutation system".into()));
    }
    let f = |v: usize| s.succ(v)[0];
    let mut seen = vec![false; s.size()];
    for x in 0..s.size() {
        if seen[x] {
            continue;
        }
        let mut len = 0;
        let mut y = x;
        loop {
            seen[y] = true;
            len += 1;
            y = f(y);
            if y == x {
                break;
            }
        }
        if len >= m + 2 {
            let mut table = vec![0usize; s.size()];
            let mut y = x;
            for p in 2..=m {
                y = f(y);
                table[y] = p - 1;
            }
            let target = Arc::new(pointed_loop(m)?);
            return Ok(Some(SystemMap::new(s.clone(), target, table)?));
        }
    }
    Ok(None)
}

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::bitset::BitSet;
use crate::relation::FiniteRelation;

/// Sizes above this only run the matrix-power route when the period route
/// reports mixing (to find the exponent).
pub const MATRIX_ROUTE_LIMIT: usize = 64;

/// Strongly connected components, each sorted, ordered by least vertex.
pub fn strongly_connected_components(r: &FiniteRelation) -> Vec<Vec<usize>> {
    let n = r.size();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < r.succ(v).len() {
                let w = r.succ(v)[top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort();
    comps
}

fn is_cyclic(r: &FiniteRelation, comp: &[usize]) -> bool {
    comp.len() > 1 || r.has_edge(comp[0], comp[0])
}

/// Basic sets: the strongly connected pieces that carry a cycle.
pub fn basic_sets(r: &FiniteRelation) -> Vec<Vec<usize>> {
    strongly_connected_components(r).into_iter().filter(|c| is_cyclic(r, c)).collect()
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// gcd of cycle lengths inside one strongly connected piece.
pub fn component_period(r: &FiniteRelation, comp: &[usize]) -> usize {
    let inside = BitSet::from_iter(r.size(), comp.iter().copied());
    let mut depth = vec![usize::MAX; r.size()];
    let mut queue = VecDeque::from([comp[0]]);
    depth[comp[0]] = 0;
    let mut g = 0;
    while let Some(u) = queue.pop_front() {
        for &v in r.succ(u) {
            if !inside.contains(v) {
                continue;
            }
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            } else {
                g = gcd(g, (depth[u] + 1).abs_diff(depth[v]));
            }
        }
    }
    g
}

/// gcd of all cycle lengths; 0 when there are no cycles.
pub fn loop_period(r: &FiniteRelation) -> usize {
    basic_sets(r).iter().fold(0, |g, c| gcd(g, component_period(r, c)))
}

pub fn is_recurrent(r: &FiniteRelation) -> bool {
    let covered: usize = basic_sets(r).iter().map(Vec::len).sum();
    covered == r.size()
}

/// The orbit relation is full.
pub fn is_transitive(r: &FiniteRelation) -> bool {
    let comps = strongly_connected_components(r);
    comps.len() == 1 && is_cyclic(r, &comps[0])
}

/// Mixing decided by transitivity and cycle-length gcd.
pub fn mixing_by_period(r: &FiniteRelation) -> bool {
    is_transitive(r) && loop_period(r) == 1
}

pub fn wielandt_bound(size: usize) -> usize {
    (size - 1) * (size - 1) + 1
}

/// Iterates `r^k` for `k` up to `limit` and returns the least `k` with
/// `r^k` full.
pub fn first_full_power(r: &FiniteRelation, limit: usize) -> Option<usize> {
    let mut rows = r.rows();
    for k in 1..=limit {
        if rows.iter().all(BitSet::is_full) {
            return Some(k);
        }
        if k == limit {
            break;
        }
        rows = (0..r.size())
            .map(|a| {
                let mut row = BitSet::new(r.size());
                for &b in r.succ(a) {
                    row.union_with(&rows[b]);
                }
                row
            })
            .collect();
    }
    None
}

/// Mixing decided by boolean matrix powers up to the Wielandt bound, with
/// the exponent when mixing.
pub fn mixing_by_matrix_powers(r: &FiniteRelation) -> (bool, Option<usize>) {
    match first_full_power(r, wielandt_bound(r.size())) {
        Some(k) => (true, Some(k)),
        None => (false, None),
    }
}

/// `{ n <= horizon : r^n has a fixed point }`.
pub fn per_window(r: &FiniteRelation, horizon: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut rows = r.rows();
    for t in 1..=horizon {
        if (0..r.size()).any(|v| rows[v].contains(v)) {
            out.insert(t);
        }
        if t < horizon {
            rows = (0..r.size())
                .map(|a| {
                    let mut row = BitSet::new(r.size());
                    for &b in r.succ(a) {
                        row.union_with(&rows[b]);
                    }
                    row
                })
                .collect();
        }
    }
    out
}

/// Eventual return-time progression of one basic set: closed walks through
/// it have lengths in `period · ℕ`, and all large enough multiples occur.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasicSetPer {
    pub vertices: Vec<usize>,
    pub period: usize,
}

/// How the matrix-power route was used by `classify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixRoute {
    Decided { mixing: bool },
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub size: usize,
    pub surjective: bool,
    pub recurrent: bool,
    pub transitive: bool,
    pub mixing: bool,
    pub mixing_exponent: Option<usize>,
    pub loop_period: usize,
    pub per_horizon: usize,
    pub per_window: BTreeSet<usize>,
    pub per_eventual: Vec<BasicSetPer>,
    pub matrix_route: MatrixRoute,
}

impl PropertyReport {
    pub fn routes_agree(&self) -> bool {
        match self.matrix_route {
            MatrixRoute::Decided { mixing } => mixing == self.mixing,
            MatrixRoute::Skipped => true,
        }
    }
}

pub fn classify(r: &FiniteRelation, per_horizon: usize) -> PropertyReport {
    let comps = strongly_connected_components(r);
    let basic: Vec<&Vec<usize>> = comps.iter().filter(|c| is_cyclic(r, c)).collect();
    let per_eventual: Vec<BasicSetPer> = basic
        .iter()
        .map(|c| BasicSetPer { vertices: c.to_vec(), period: component_period(r, c) })
        .collect();
    let loop_period = per_eventual.iter().fold(0, |g, b| gcd(g, b.period));
    let recurrent = basic.iter().map(|c| c.len()).sum::<usize>() == r.size();
    let transitive = comps.len() == 1 && basic.len() == 1;
    let period_mixing = transitive && loop_period == 1;
    let (matrix_route, mixing_exponent) = if r.size() <= MATRIX_ROUTE_LIMIT || period_mixing {
        let (m, e) = mixing_by_matrix_powers(r);
        (MatrixRoute::Decided { mixing: m }, e)
    } else {
        (MatrixRoute::Skipped, None)
    };
    PropertyReport {
        size: r.size(),
        surjective: r.is_surjective(),
        recurrent,
        transitive,
        mixing: period_mixing,
        mixing_exponent: if period_mixing { mixing_exponent } else { None },
        loop_period,
        per_horizon,
        per_window: per_window(r, per_horizon),
        per_eventual,
        matrix_route,
    }
}

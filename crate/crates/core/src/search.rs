//! Backtracking search for graph homomorphisms between finite relations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::FiniteRelation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMode {
    All,
    Surjective,
    Factor,
}

/// Bounds on exhaustive map searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCaps {
    pub max_domain: usize,
    pub max_codomain: usize,
    /// Upper bound on search-tree nodes.
    pub max_nodes: u64,
}

impl Default for MapCaps {
    fn default() -> Self {
        MapCaps { max_domain: 12, max_codomain: 8, max_nodes: 50_000_000 }
    }
}

impl MapCaps {
    pub fn unbounded_sizes(max_nodes: u64) -> Self {
        MapCaps { max_domain: usize::MAX, max_codomain: usize::MAX, max_nodes }
    }

    pub(crate) fn check_sizes(&self, dom: usize, cod: usize) -> Result<()> {
        if dom > self.max_domain || cod > self.max_codomain {
            return Err(Error::Resource(format!(
                "map search {dom} -> {cod} vertices exceeds caps (domain <= {}, codomain <= {})",
                self.max_domain, self.max_codomain
            )));
        }
        Ok(())
    }
}

/// Edge ids of a relation in lexicographic order.
pub(crate) struct EdgeIds {
    offsets: Vec<usize>,
}

impl EdgeIds {
    pub(crate) fn new(r: &FiniteRelation) -> Self {
        let mut offsets = Vec::with_capacity(r.size() + 1);
        let mut acc = 0;
        for v in 0..r.size() {
            offsets.push(acc);
            acc += r.succ(v).len();
        }
        offsets.push(acc);
        EdgeIds { offsets }
    }

    pub(crate) fn id(&self, r: &FiniteRelation, a: usize, b: usize) -> Option<usize> {
        r.succ(a).binary_search(&b).ok().map(|p| self.offsets[a] + p)
    }
}

/// A homomorphism search problem. Domain vertices are assigned in increasing
/// index order and candidate images are tried in increasing order, so
/// solutions arrive in lexicographic order of their tables.
pub struct HomSearch<'a> {
    dom: &'a FiniteRelation,
    cod: &'a FiniteRelation,
    allowed: Option<Vec<Vec<usize>>>,
    mode: MapMode,
    max_nodes: u64,
}

struct State {
    table: Vec<usize>,
    vertex_hits: Vec<usize>,
    missing_vertices: usize,
    edge_hits: Vec<usize>,
    missing_edges: usize,
    nodes: u64,
}

impl<'a> HomSearch<'a> {
    pub fn new(dom: &'a FiniteRelation, cod: &'a FiniteRelation, mode: MapMode) -> Self {
        HomSearch { dom, cod, allowed: None, mode, max_nodes: u64::MAX }
    }

    /// Restricts the image of each domain vertex to a sorted candidate list.
    pub fn allowed(mut self, allowed: Vec<Vec<usize>>) -> Self {
        self.allowed = Some(allowed);
        self
    }

    pub fn max_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    /// Runs the search, calling `visit` on each solution until it returns
    /// `false`. Returns the number of search nodes used.
    pub fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<u64> {
        let n = self.dom.size();
        let ids = EdgeIds::new(self.cod);
        let mut st = State {
            table: vec![usize::MAX; n],
            vertex_hits: vec![0; self.cod.size()],
            missing_vertices: self.cod.size(),
            edge_hits: vec![0; self.cod.edge_count()],
            missing_edges: self.cod.edge_count(),
            nodes: 0,
        };
        // Edges of the domain that become fully assigned when vertex v is set.
        let closing: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|v| {
                let mut e: Vec<(usize, usize)> = Vec::new();
                for &w in self.dom.succ(v) {
                    if w <= v {
                        e.push((v, w));
                    }
                }
                for &u in self.dom.pred(v) {
                    if u < v {
                        e.push((u, v));
                    }
                }
                e
            })
            .collect();
        let mut remaining_edges = vec![0usize; n + 1];
        for v in (0..n).rev() {
            remaining_edges[v] = remaining_edges[v + 1] + closing[v].len();
        }
        // Iterative depth-first search; `next[v]` is the next candidate
        // position to try at depth v.
        let all: Vec<usize> = (0..self.cod.size()).collect();
        let cands = |v: usize| -> &[usize] {
            match &self.allowed {
                Some(a) => &a[v],
                None => &all,
            }
        };
        let mut next = vec![0usize; n + 1];
        let mut v = 0usize;
        let mut entering = true;
        loop {
            if v == n {
                let ok = match self.mode {
                    MapMode::All => true,
                    MapMode::Surjective => st.missing_vertices == 0,
                    MapMode::Factor => st.missing_vertices == 0 && st.missing_edges == 0,
                };
                if ok && !visit(&st.table) {
                    return Ok(st.nodes);
                }
                if n == 0 {
                    return Ok(st.nodes);
                }
                v -= 1;
                self.unassign(v, &mut st, &ids, &closing);
                entering = false;
                continue;
            }
            if entering {
                next[v] = 0;
                let pruned = (self.mode != MapMode::All && n - v < st.missing_vertices)
                    || (self.mode == MapMode::Factor && remaining_edges[v] < st.missing_edges);
                if pruned {
                    next[v] = cands(v).len();
                }
            }
            let list = cands(v);
            let mut chosen = None;
            while next[v] < list.len() {
                let c = list[next[v]];
                next[v] += 1;
                st.nodes += 1;
                if st.nodes > self.max_nodes {
                    return Err(Error::Resource(format!("map search exceeded {} nodes", self.max_nodes)));
                }
                st.table[v] = c;
                if closing[v].iter().all(|&(a, b)| self.cod.has_edge(st.table[a], st.table[b])) {
                    chosen = Some(c);
                    break;
                }
            }
            match chosen {
                Some(c) => {
                    st.vertex_hits[c] += 1;
                    if st.vertex_hits[c] == 1 {
                        st.missing_vertices -= 1;
                    }
                    if self.mode == MapMode::Factor {
                        for &(a, b) in &closing[v] {
                            let id = ids.id(self.cod, st.table[a], st.table[b]).expect("checked edge");
                            st.edge_hits[id] += 1;
                            if st.edge_hits[id] == 1 {
                                st.missing_edges -= 1;
                            }
                        }
                    }
                    v += 1;
                    entering = true;
                }
                None => {
                    st.table[v] = usize::MAX;
                    if v == 0 {
                        return Ok(st.nodes);
                    }
                    v -= 1;
                    self.unassign(v, &mut st, &ids, &closing);
                    entering = false;
                }
            }
        }
    }

    fn unassign(&self, v: usize, st: &mut State, ids: &EdgeIds, closing: &[Vec<(usize, usize)>]) {
        let c = st.table[v];
        if self.mode == MapMode::Factor {
            for &(a, b) in &closing[v] {
                let id = ids.id(self.cod, st.table[a], st.table[b]).expect("checked edge");
                st.edge_hits[id] -= 1;
                if st.edge_hits[id] == 0 {
                    st.missing_edges += 1;
                }
            }
        }
        st.vertex_hits[c] -= 1;
        if st.vertex_hits[c] == 0 {
            st.missing_vertices += 1;
        }
    }

    pub fn collect(&self) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.run(&mut |t| {
            out.push(t.to_vec());
            true
        })?;
        Ok(out)
    }

    pub fn first(&self) -> Result<Option<Vec<usize>>> {
        let mut out = None;
        self.run(&mut |t| {
            out = Some(t.to_vec());
            false
        })?;
        Ok(out)
    }
}

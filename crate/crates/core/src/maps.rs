use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::classify::gcd;
use crate::error::{arg, Error, Result};
use crate::relation::{FiniteRelation, FiniteSystem};
use crate::search::{EdgeIds, HomSearch, MapCaps, MapMode};

/// A total vertex function between two systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMap {
    pub domain: Arc<FiniteSystem>,
    pub codomain: Arc<FiniteSystem>,
    pub table: Vec<usize>,
}

/// Result of checking a table against the homomorphism and factor conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapVerdict {
    pub homomorphism: bool,
    /// A domain edge whose image is not an edge of the codomain.
    pub violating_edge: Option<(usize, usize)>,
    pub surjective: bool,
    pub factor: bool,
    /// A codomain vertex outside the image.
    pub missed_vertex: Option<usize>,
    /// A codomain edge outside the edge image.
    pub missed_edge: Option<(usize, usize)>,
}

fn check_table(dom: &FiniteRelation, cod: &FiniteRelation, table: &[usize]) -> Result<()> {
    if table.len() != dom.size() {
        return Err(Error::Dimension { left: table.len(), right: dom.size() });
    }
    if let Some((v, &t)) = table.iter().enumerate().find(|(_, &t)| t >= cod.size()) {
        return arg(format!("image {} of vertex {} outside [1, {}]", t + 1, v + 1, cod.size()));
    }
    Ok(())
}

/// Homomorphism and factor verdict for a raw table.
pub fn map_verdict(dom: &FiniteRelation, cod: &FiniteRelation, table: &[usize]) -> Result<MapVerdict> {
    check_table(dom, cod, table)?;
    let violating_edge = dom.edges().find(|&(a, b)| !cod.has_edge(table[a], table[b]));
    let mut hit = vec![false; cod.size()];
    for &t in table {
        hit[t] = true;
    }
    let missed_vertex = hit.iter().position(|h| !h);
    let ids = EdgeIds::new(cod);
    let mut edge_hit = vec![false; cod.edge_count()];
    if violating_edge.is_none() {
        for (a, b) in dom.edges() {
            edge_hit[ids.id(cod, table[a], table[b]).expect("homomorphism")] = true;
        }
    }
    let missed_edge = if violating_edge.is_none() {
        cod.edges().zip(edge_hit.iter()).find(|(_, h)| !**h).map(|(e, _)| e)
    } else {
        None
    };
    let homomorphism = violating_edge.is_none();
    Ok(MapVerdict {
        homomorphism,
        violating_edge,
        surjective: missed_vertex.is_none(),
        factor: homomorphism && missed_vertex.is_none() && missed_edge.is_none(),
        missed_vertex,
        missed_edge,
    })
}

pub fn is_factor_table(dom: &FiniteRelation, cod: &FiniteRelation, table: &[usize]) -> bool {
    map_verdict(dom, cod, table).map(|v| v.factor).unwrap_or(false)
}

impl SystemMap {
    /// Checks only that the table is total and in range.
    pub fn new(domain: Arc<FiniteSystem>, codomain: Arc<FiniteSystem>, table: Vec<usize>) -> Result<Self> {
        check_table(&domain, &codomain, &table)?;
        Ok(SystemMap { domain, codomain, table })
    }

    pub fn from_parts(domain: FiniteSystem, codomain: FiniteSystem, table: Vec<usize>) -> Result<Self> {
        Self::new(Arc::new(domain), Arc::new(codomain), table)
    }

    pub fn identity(s: Arc<FiniteSystem>) -> Self {
        let table = (0..s.size()).collect();
        SystemMap { domain: s.clone(), codomain: s, table }
    }

    pub fn validate(&self) -> MapVerdict {
        map_verdict(&self.domain, &self.codomain, &self.table).expect("table checked at construction")
    }

    pub fn is_homomorphism(&self) -> bool {
        self.validate().homomorphism
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain.size()];
        for &t in &self.table {
            hit[t] = true;
        }
        hit.iter().all(|&h| h)
    }

    pub fn is_factor(&self) -> bool {
        self.validate().factor
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &SystemMap) -> Result<SystemMap> {
        if first.codomain.as_ref() != self.domain.as_ref() {
            return arg("composition of maps with mismatched middle systems");
        }
        let table = first.table.iter().map(|&x| self.table[x]).collect();
        SystemMap::new(first.domain.clone(), self.codomain.clone(), table)
    }
}

/// Homomorphism verdict with the violating edge on failure.
pub fn validate_map(m: &SystemMap) -> MapVerdict {
    m.validate()
}

/// Quotient of a system by a vertex partition; block `k` becomes vertex `k`.
pub fn quotient_by_partition(s: &Arc<FiniteSystem>, blocks: &[Vec<usize>]) -> Result<(Arc<FiniteSystem>, SystemMap)> {
    let mut table = vec![usize::MAX; s.size()];
    for (k, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return arg(format!("block {} is empty", k + 1));
        }
        for &v in block {
            if v >= s.size() {
                return arg(format!("vertex {} outside [1, {}]", v + 1, s.size()));
            }
            if table[v] != usize::MAX {
                return arg(format!("vertex {} lies in two blocks", v + 1));
            }
            table[v] = k;
        }
    }
    if let Some(v) = table.iter().position(|&t| t == usize::MAX) {
        return arg(format!("vertex {} lies in no block", v + 1));
    }
    let q = FiniteRelation::new(blocks.len(), s.edges().map(|(a, b)| (table[a], table[b])))?;
    let q = Arc::new(FiniteSystem::new(q)?);
    let m = SystemMap::new(s.clone(), q.clone(), table)?;
    Ok((q, m))
}

/// All maps `s1 -> s2` of the requested kind, in lexicographic table order.
pub fn enumerate_maps(s1: &Arc<FiniteSystem>, s2: &Arc<FiniteSystem>, mode: MapMode, caps: &MapCaps) -> Result<Vec<SystemMap>> {
    caps.check_sizes(s1.size(), s2.size())?;
    let tables = HomSearch::new(s1, s2, mode).max_nodes(caps.max_nodes).collect()?;
    Ok(tables
        .into_iter()
        .map(|t| SystemMap { domain: s1.clone(), codomain: s2.clone(), table: t })
        .collect())
}

/// One failed clause of the directional-lift conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum LiftFailure {
    /// (i): the map is not a factor.
    NotFactor { verdict: MapVerdict },
    /// (ii): successors of `vertex` project to two different vertices.
    ForwardNotSingleValued { vertex: usize, images: (usize, usize) },
    /// (iii): the fiber over `vertex` has fewer than two elements.
    SmallFiber { vertex: usize, fiber: usize },
    /// (iv): predecessors of `vertex` project to two different vertices.
    BackwardNotSingleValued { vertex: usize, images: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftVerdict {
    pub is_plus: bool,
    pub is_pm: bool,
    pub failures: Vec<LiftFailure>,
}

/// Whether `{ (x, table[y]) : (x, y) ∈ rel }` is a function; on failure the
/// vertex and two distinct images.
pub(crate) fn projected_single_valued(rel: &FiniteRelation, table: &[usize], backward: bool) -> Option<(usize, (usize, usize))> {
    for x in 0..rel.size() {
        let nbrs = if backward { rel.pred(x) } else { rel.succ(x) };
        if let Some((&first, rest)) = nbrs.split_first() {
            let img = table[first];
            if let Some(&y) = rest.iter().find(|&&y| table[y] != img) {
                return Some((x, (img, table[y])));
            }
        }
    }
    None
}

/// Checks the directional-lift clauses for a raw table.
pub fn lift_verdict(dom: &FiniteRelation, cod: &FiniteRelation, table: &[usize]) -> Result<LiftVerdict> {
    let verdict = map_verdict(dom, cod, table)?;
    let mut failures = Vec::new();
    let clause_i = verdict.factor;
    if !clause_i {
        failures.push(LiftFailure::NotFactor { verdict });
    }
    let forward = projected_single_valued(dom, table, false);
    if let Some((vertex, images)) = forward {
        failures.push(LiftFailure::ForwardNotSingleValued { vertex, images });
    }
    let mut fiber = vec![0usize; cod.size()];
    for &t in table {
        fiber[t] += 1;
    }
    let small = fiber.iter().position(|&f| f < 2);
    if let Some(vertex) = small {
        failures.push(LiftFailure::SmallFiber { vertex, fiber: fiber[vertex] });
    }
    let backward = projected_single_valued(dom, table, true);
    if let Some((vertex, images)) = backward {
        failures.push(LiftFailure::BackwardNotSingleValued { vertex, images });
    }
    let is_plus = clause_i && forward.is_none() && small.is_none();
    Ok(LiftVerdict { is_plus, is_pm: is_plus && backward.is_none(), failures })
}

pub fn check_lift(m: &SystemMap) -> LiftVerdict {
    lift_verdict(&m.domain, &m.codomain, &m.table).expect("table checked at construction")
}

/// Cyclic coloring data: weak components, BFS colors and the gcd of
/// `|c(u) + 1 - c(v)|` over edges.
pub(crate) struct Coloring {
    pub(crate) components: Vec<Vec<usize>>,
    depth: Vec<i64>,
    period: usize,
}

pub(crate) fn weak_coloring(r: &FiniteRelation) -> Coloring {
    let n = r.size();
    let mut depth = vec![i64::MIN; n];
    let mut components = Vec::new();
    let mut g = 0usize;
    for root in 0..n {
        if depth[root] != i64::MIN {
            continue;
        }
        depth[root] = 0;
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in r.succ(u) {
                if depth[v] == i64::MIN {
                    depth[v] = depth[u] + 1;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
            for &v in r.pred(u) {
                if depth[v] == i64::MIN {
                    depth[v] = depth[u] - 1;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        for &u in &comp {
            for &v in r.succ(u) {
                g = gcd(g, (depth[u] + 1 - depth[v]).unsigned_abs() as usize);
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    Coloring { components, depth, period: g }
}

/// Largest `n` such that the system maps onto `loop(n)`: the gcd over weak
/// components of the coloring defects. For transitive systems this is the
/// gcd of cycle lengths.
pub fn loop_period(s: &FiniteSystem) -> usize {
    weak_coloring(s).period
}

/// A factor map onto `loop(n)` when one exists. Each weak component is
/// colored from its least vertex with phase 0.
pub fn factors_onto_loop(s: &Arc<FiniteSystem>, n: usize) -> Result<Option<SystemMap>> {
    if n == 0 {
        return arg("loop length must be positive");
    }
    let c = weak_coloring(s);
    if !c.period.is_multiple_of(n) {
        return Ok(None);
    }
    let mut table = vec![0usize; s.size()];
    for comp in &c.components {
        for &v in comp {
            table[v] = c.depth[v].rem_euclid(n as i64) as usize;
        }
    }
    let target = Arc::new(crate::shapes::loop_system(n)?);
    let m = SystemMap::new(s.clone(), target, table)?;
    debug_assert!(m.is_factor());
    Ok(Some(m))
}

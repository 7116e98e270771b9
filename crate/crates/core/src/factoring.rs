//! The factoring property on explicit prefixes: given `q1` from level `k`
//! onto level `n`, find `m` and a factor `q2` of level `m` onto level `k`
//! with `q1 ∘ q2 = p_{m,n}`.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{arg, Error, Result};
use crate::maps::{map_verdict, weak_coloring, SystemMap};
use crate::prefix::ShimomuraPrefix;
use crate::relation::FiniteRelation;
use crate::search::{EdgeIds, HomSearch, MapCaps, MapMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactoringCaps {
    /// Bounds for enumerating `q1`.
    pub q1: MapCaps,
    /// Node budget for each `q2` search.
    pub q2_nodes: u64,
    /// Per-component bound on candidate maps in the disconnected case.
    pub max_component_maps: usize,
}

impl Default for FactoringCaps {
    fn default() -> Self {
        FactoringCaps {
            q1: MapCaps { max_domain: 48, max_codomain: 10, max_nodes: 20_000_000 },
            q2_nodes: 20_000_000,
            max_component_maps: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactoringOutcome {
    Factors { m: usize, q2: SystemMap },
    /// No `q2` for any `m` in the searched range.
    NoneWithinPrefix { m_max: usize },
}

impl FactoringOutcome {
    pub fn factors(&self) -> bool {
        matches!(self, FactoringOutcome::Factors { .. })
    }
}

/// Searches `m` in `k+1..=m_max` for `q2`.
pub fn check_factoring(p: &ShimomuraPrefix, q1: &SystemMap, k: usize, n: usize, m_max: usize, caps: &FactoringCaps) -> Result<FactoringOutcome> {
    if !(1 <= n && n < k && k <= p.depth()) {
        return arg(format!("need 1 <= n < k <= depth, got n = {n}, k = {k}, depth {}", p.depth()));
    }
    if m_max > p.depth() {
        return arg(format!("m_max {m_max} exceeds the prefix depth {}", p.depth()));
    }
    if *q1.domain != **p.level(k) || *q1.codomain != **p.level(n) {
        return arg(format!("q1 must map level {k} to level {n}"));
    }
    if !q1.is_factor() {
        return arg("q1 is not a factor");
    }
    let lk = p.level(k);
    let mut fibers = vec![Vec::new(); p.level(n).size()];
    for (v, &x) in q1.table.iter().enumerate() {
        fibers[x].push(v);
    }
    for m in k + 1..=m_max {
        let lm = p.level(m);
        let pmn = p.composite(m, n);
        let allowed: Vec<Vec<usize>> = pmn.iter().map(|&x| fibers[x].clone()).collect();
        if let Some(table) = constrained_factor(lm, lk, allowed, caps)? {
            let q2 = SystemMap { domain: lm.clone(), codomain: lk.clone(), table };
            debug_assert!(q2.is_factor());
            return Ok(FactoringOutcome::Factors { m, q2 });
        }
    }
    Ok(FactoringOutcome::NoneWithinPrefix { m_max })
}

/// A factor `dom -> cod` with images restricted per vertex. Disconnected
/// domains are handled one weak component at a time, then the component
/// maps are combined to cover every vertex and edge of `cod`.
pub(crate) fn constrained_factor(dom: &FiniteRelation, cod: &FiniteRelation, allowed: Vec<Vec<usize>>, caps: &FactoringCaps) -> Result<Option<Vec<usize>>> {
    let comps = weak_coloring(dom).components;
    if comps.len() == 1 {
        return HomSearch::new(dom, cod, MapMode::Factor).allowed(allowed).max_nodes(caps.q2_nodes).first();
    }
    let ids = EdgeIds::new(cod);
    let width = cod.size() + cod.edge_count();
    // Options per component: (image bitset over vertices then edges, table).
    let mut options: Vec<Vec<(BitSet, Vec<usize>)>> = Vec::with_capacity(comps.len());
    for comp in &comps {
        let mut local = vec![usize::MAX; dom.size()];
        for (k, &v) in comp.iter().enumerate() {
            local[v] = k;
        }
        let sub = FiniteRelation::new(comp.len(), comp.iter().flat_map(|&a| dom.succ(a).iter().map(move |&b| (a, b))).map(|(a, b)| (local[a], local[b])))?;
        let sub_allowed: Vec<Vec<usize>> = comp.iter().map(|&v| allowed[v].clone()).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut opts = Vec::new();
        let mut overflow = false;
        HomSearch::new(&sub, cod, MapMode::All).allowed(sub_allowed).max_nodes(caps.q2_nodes).run(&mut |t| {
            let mut img = BitSet::new(width);
            for &x in t {
                img.insert(x);
            }
            for (a, b) in sub.edges() {
                img.insert(cod.size() + ids.id(cod, t[a], t[b]).expect("homomorphism"));
            }
            if seen.insert(img.iter().collect::<Vec<_>>()) {
                opts.push((img, t.to_vec()));
                if opts.len() > caps.max_component_maps {
                    overflow = true;
                    return false;
                }
            }
            true
        })?;
        if overflow {
            return Err(Error::Resource(format!("more than {} distinct component images", caps.max_component_maps)));
        }
        if opts.is_empty() {
            return Ok(None);
        }
        options.push(opts);
    }
    // Union of everything reachable from component c onward, for pruning.
    let mut rest = vec![BitSet::new(width); comps.len() + 1];
    for c in (0..comps.len()).rev() {
        let mut u = rest[c + 1].clone();
        for (img, _) in &options[c] {
            u.union_with(img);
        }
        rest[c] = u;
    }
    if !rest[0].is_full() {
        return Ok(None);
    }
    let mut choice = vec![0usize; comps.len()];
    let mut covered = vec![BitSet::new(width); comps.len() + 1];
    let mut budget = caps.q2_nodes;
    if !cover(0, &options, &rest, &mut covered, &mut choice, &mut budget)? {
        return Ok(None);
    }
    let mut table = vec![0usize; dom.size()];
    for (c, comp) in comps.iter().enumerate() {
        let t = &options[c][choice[c]].1;
        for (k, &v) in comp.iter().enumerate() {
            table[v] = t[k];
        }
    }
    debug_assert!(map_verdict(dom, cod, &table).map(|v| v.factor).unwrap_or(false));
    Ok(Some(table))
}

fn cover(
    c: usize,
    options: &[Vec<(BitSet, Vec<usize>)>],
    rest: &[BitSet],
    covered: &mut Vec<BitSet>,
    choice: &mut [usize],
    budget: &mut u64,
) -> Result<bool> {
    if c == options.len() {
        return Ok(covered[c].is_full());
    }
    let mut reach = covered[c].clone();
    reach.union_with(&rest[c]);
    if !reach.is_full() {
        return Ok(false);
    }
    for (k, (img, _)) in options[c].iter().enumerate() {
        if *budget == 0 {
            return Err(Error::Resource("component cover search exceeded its node budget".into()));
        }
        *budget -= 1;
        let mut next = covered[c].clone();
        next.union_with(img);
        covered[c + 1] = next;
        choice[c] = k;
        if cover(c + 1, options, rest, covered, choice, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleSearch {
    pub k: usize,
    pub n: usize,
    pub m_max: usize,
    pub q1_checked: usize,
    /// First `q1` in enumeration order with no `q2`.
    pub counterexample: Option<SystemMap>,
}

/// Enumerates every factor from level `k` onto level `n` and checks each.
pub fn search_factoring_counterexample(p: &ShimomuraPrefix, k: usize, n: usize, m_max: usize, caps: &FactoringCaps) -> Result<CounterexampleSearch> {
    if !(1 <= n && n < k && k <= p.depth()) {
        return arg(format!("need 1 <= n < k <= depth, got n = {n}, k = {k}, depth {}", p.depth()));
    }
    let (lk, ln) = (p.level(k), p.level(n));
    caps.q1.check_sizes(lk.size(), ln.size())?;
    let mut tables = Vec::new();
    HomSearch::new(lk, ln, MapMode::Factor).max_nodes(caps.q1.max_nodes).run(&mut |t| {
        tables.push(t.to_vec());
        true
    })?;
    let mut checked = 0;
    for table in tables {
        let q1 = SystemMap { domain: lk.clone(), codomain: ln.clone(), table };
        checked += 1;
        if !check_factoring(p, &q1, k, n, m_max, caps)?.factors() {
            return Ok(CounterexampleSearch { k, n, m_max, q1_checked: checked, counterexample: Some(q1) });
        }
    }
    Ok(CounterexampleSearch { k, n, m_max, q1_checked: checked, counterexample: None })
}

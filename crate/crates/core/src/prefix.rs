//! Finite prefixes of inverse sequences of systems.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{arg, Error, Result};
use crate::maps::{lift_verdict, map_verdict, projected_single_valued, LiftVerdict, SystemMap};
use crate::relation::{suspension, suspension_index, FiniteSystem};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrefixMeta {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

/// Levels `1..=depth` and bonding maps; `bonding[k]` maps level `k + 2`
/// onto level `k + 1` (1-based level numbers).
#[derive(Clone, Debug)]
pub struct ShimomuraPrefix {
    levels: Vec<Arc<FiniteSystem>>,
    bonding: Vec<Vec<usize>>,
    pub meta: PrefixMeta,
}

impl ShimomuraPrefix {
    /// Checks that every bonding map is a factor.
    pub fn new(levels: Vec<Arc<FiniteSystem>>, bonding: Vec<Vec<usize>>, meta: PrefixMeta) -> Result<Self> {
        if levels.is_empty() {
            return arg("prefix needs at least one level");
        }
        if bonding.len() + 1 != levels.len() {
            return Err(Error::Dimension { left: bonding.len() + 1, right: levels.len() });
        }
        for (k, t) in bonding.iter().enumerate() {
            let v = map_verdict(&levels[k + 1], &levels[k], t)?;
            if !v.factor {
                let witness = if let Some((a, b)) = v.violating_edge {
                    format!("edge ({}, {}) maps outside level {}", a + 1, b + 1, k + 1)
                } else if let Some(x) = v.missed_vertex {
                    format!("vertex {} of level {} is not hit", x + 1, k + 1)
                } else {
                    let (a, b) = v.missed_edge.expect("non-factor has a witness");
                    format!("edge ({}, {}) of level {} is not an image", a + 1, b + 1, k + 1)
                };
                return Err(Error::Validation(format!("bonding map {} -> {} is not a factor: {witness}", k + 2, k + 1)));
            }
        }
        Ok(ShimomuraPrefix { levels, bonding, meta })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `n`, 1-based.
    pub fn level(&self, n: usize) -> &Arc<FiniteSystem> {
        &self.levels[n - 1]
    }

    pub fn levels(&self) -> &[Arc<FiniteSystem>] {
        &self.levels
    }

    /// Table of `p_{n+1,n}`.
    pub fn bonding(&self, n: usize) -> &[usize] {
        &self.bonding[n - 1]
    }

    pub fn bonding_tables(&self) -> &[Vec<usize>] {
        &self.bonding
    }

    /// Table of `p_{m,n}` for `n <= m`.
    pub fn composite(&self, m: usize, n: usize) -> Vec<usize> {
        assert!(1 <= n && n <= m && m <= self.depth(), "composite p_{{{m},{n}}} outside the prefix");
        let mut t: Vec<usize> = (0..self.level(m).size()).collect();
        for k in (n..m).rev() {
            let b = self.bonding(k);
            for x in t.iter_mut() {
                *x = b[*x];
            }
        }
        t
    }

    pub fn composite_map(&self, m: usize, n: usize) -> SystemMap {
        SystemMap { domain: self.level(m).clone(), codomain: self.level(n).clone(), table: self.composite(m, n) }
    }

    pub fn bonding_map(&self, n: usize) -> SystemMap {
        self.composite_map(n + 1, n)
    }

    /// Directional-lift verdict for `p_{m,n}`.
    pub fn lift(&self, m: usize, n: usize) -> LiftVerdict {
        lift_verdict(self.level(m), self.level(n), &self.composite(m, n)).expect("composite tables are total")
    }

    /// The first `depth` levels.
    pub fn truncate(&self, depth: usize) -> Result<ShimomuraPrefix> {
        if depth == 0 || depth > self.depth() {
            return arg(format!("cannot truncate a depth-{} prefix to {depth}", self.depth()));
        }
        Ok(ShimomuraPrefix {
            levels: self.levels[..depth].to_vec(),
            bonding: self.bonding[..depth - 1].to_vec(),
            meta: self.meta.clone(),
        })
    }
}

/// A per-level flag: the least witness level `m`, or `None` when
/// unresolved within the prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelFlag {
    pub level: usize,
    pub witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixVerdict {
    pub depth: usize,
    pub bifurcating: Vec<LevelFlag>,
    pub shimomura: Vec<LevelFlag>,
    pub invertible: Vec<LevelFlag>,
    pub pointed: bool,
}

impl PrefixVerdict {
    fn all(flags: &[LevelFlag]) -> bool {
        flags.iter().all(|f| f.witness.is_some())
    }

    pub fn bifurcating_to_depth(&self) -> bool {
        Self::all(&self.bifurcating)
    }

    pub fn shimomura_to_depth(&self) -> bool {
        Self::all(&self.shimomura)
    }

    pub fn invertible_to_depth(&self) -> bool {
        Self::all(&self.invertible)
    }

    pub fn passes(&self) -> bool {
        self.bifurcating_to_depth() && self.shimomura_to_depth() && self.invertible_to_depth()
    }
}

/// Computes the bifurcation, Shimomura and inverse-Shimomura flags for
/// every level below the last. The Shimomura check looks for a "V" at
/// level `m` (two edges `(a,b), (a,c)`) whose ends project apart.
pub fn validate_prefix(p: &ShimomuraPrefix) -> Result<PrefixVerdict> {
    if p.depth() < 2 {
        return arg("prefix validation needs at least two levels");
    }
    let d = p.depth();
    let mut bifurcating = Vec::new();
    let mut shimomura = Vec::new();
    let mut invertible = Vec::new();
    for n in 1..d {
        let size_n = p.level(n).size();
        let mut split_at = vec![None::<usize>; size_n];
        let mut sh = None;
        let mut inv = None;
        for m in n + 1..=d {
            let t = p.composite(m, n);
            let mut fiber = vec![0usize; size_n];
            for &x in &t {
                fiber[x] += 1;
            }
            for (x, f) in fiber.iter().enumerate() {
                if *f >= 2 && split_at[x].is_none() {
                    split_at[x] = Some(m);
                }
            }
            let lvl = p.level(m);
            if sh.is_none() && projected_single_valued(lvl, &t, false).is_none() {
                sh = Some(m);
            }
            if inv.is_none() && projected_single_valued(lvl, &t, true).is_none() {
                inv = Some(m);
            }
        }
        let bif = if split_at.iter().all(Option::is_some) { split_at.iter().map(|x| x.unwrap()).max() } else { None };
        bifurcating.push(LevelFlag { level: n, witness: bif });
        shimomura.push(LevelFlag { level: n, witness: sh });
        invertible.push(LevelFlag { level: n, witness: inv });
    }
    let l1 = p.level(1);
    let pointed = l1.size() == 1 && l1.has_edge(0, 0);
    Ok(PrefixVerdict { depth: d, bifurcating, shimomura, invertible, pointed })
}

/// Suspends every level and bonding map `n_fold` times.
pub fn suspend_prefix(p: &ShimomuraPrefix, n_fold: usize) -> Result<ShimomuraPrefix> {
    if n_fold == 0 {
        return arg("suspension order must be positive");
    }
    let levels = p
        .levels
        .iter()
        .map(|l| suspension(l, n_fold).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let bonding = p
        .bonding
        .iter()
        .map(|t| {
            let mut out = vec![0usize; t.len() * n_fold];
            for (a, &pa) in t.iter().enumerate() {
                for i in 1..=n_fold {
                    out[suspension_index(a, i, n_fold)] = suspension_index(pa, i, n_fold);
                }
            }
            out
        })
        .collect();
    let mut meta = p.meta.clone();
    meta.params.insert("suspension".into(), n_fold.to_string());
    ShimomuraPrefix::new(levels, bonding, meta)
}

/// Status of one hitting time in the limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum HitStatus {
    /// No walk of this length between the fibers at `level`, hence none in
    /// the limit.
    AbsentCertified { level: usize },
    /// Walks exist at every level checked.
    PresentToDepth,
}

impl HitStatus {
    pub fn is_present(&self) -> bool {
        matches!(self, HitStatus::PresentToDepth)
    }
}

/// Hitting-time table for the cylinders over level-`n` vertices `i` and `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HittingTable {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub horizon: usize,
    pub depth: usize,
    /// `status[t - 1]` for `t` in `1..=horizon`.
    pub status: Vec<HitStatus>,
}

impl HittingTable {
    pub fn present(&self) -> Vec<usize> {
        (1..=self.horizon).filter(|&t| self.status[t - 1].is_present()).collect()
    }

    pub fn absent(&self) -> Vec<usize> {
        (1..=self.horizon).filter(|&t| !self.status[t - 1].is_present()).collect()
    }
}

/// Walk lengths `t <= horizon` from `src` into `dst` at one level.
pub(crate) fn level_hits(sys: &FiniteSystem, src: &BitSet, dst: &BitSet, horizon: usize) -> BitSet {
    let mut out = BitSet::new(horizon + 1);
    let mut front = src.clone();
    for t in 1..=horizon {
        front = sys.image(&front);
        if front.intersects(dst) {
            out.insert(t);
        }
    }
    out
}

/// For each `t <= horizon`, whether some walk of length `t` joins the
/// fibers over `i` and `j` (0-based level-`n` vertices) at every level
/// `n..=depth`, recording the first level where it fails.
pub fn limit_hitting(p: &ShimomuraPrefix, n: usize, i: usize, j: usize, horizon: usize) -> Result<HittingTable> {
    if n == 0 || n > p.depth() {
        return arg(format!("level {n} outside the prefix 1..={}", p.depth()));
    }
    let size = p.level(n).size();
    if i >= size || j >= size {
        return arg(format!("vertex outside level {n} [1, {size}]"));
    }
    let mut status = vec![HitStatus::PresentToDepth; horizon];
    for m in n..=p.depth() {
        let t = p.composite(m, n);
        let sys = p.level(m);
        let src = BitSet::from_iter(sys.size(), t.iter().enumerate().filter(|(_, &x)| x == i).map(|(v, _)| v));
        let dst = BitSet::from_iter(sys.size(), t.iter().enumerate().filter(|(_, &x)| x == j).map(|(v, _)| v));
        let hits = level_hits(sys, &src, &dst, horizon);
        for tt in 1..=horizon {
            if status[tt - 1].is_present() && !hits.contains(tt) {
                status[tt - 1] = HitStatus::AbsentCertified { level: m };
            }
        }
    }
    Ok(HittingTable { n, i, j, horizon, depth: p.depth(), status })
}

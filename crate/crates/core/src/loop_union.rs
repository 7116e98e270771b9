//! Prefixes whose levels are disjoint unions of loops, kept symbolically:
//! a level is its list of loop lengths and a bonding map sends loop `c` to
//! loop `target` by `x ↦ (x + phase) mod len(target)`. This reaches depths
//! where explicit levels would have billions of vertices.

use std::sync::Arc;

use serde::Serialize;

use crate::builders::{divisibility_sequence, primes, Params, PrefixName};
use crate::error::{arg, Error, Result};
use crate::prefix::{PrefixMeta, ShimomuraPrefix};
use crate::relation::{disjoint_union_all, FiniteRelation, FiniteSystem};
use crate::shapes::loop_system;

/// Image of one loop: target loop index and phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LoopImage {
    pub target: usize,
    pub phase: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopUnionPrefix {
    /// Loop lengths per level, level 1 first.
    pub levels: Vec<Vec<u64>>,
    /// `bonding[k][c]`: image of loop `c` of level `k + 2` in level `k + 1`.
    pub bonding: Vec<Vec<LoopImage>>,
    pub meta: PrefixMeta,
}

impl LoopUnionPrefix {
    pub fn new(levels: Vec<Vec<u64>>, bonding: Vec<Vec<LoopImage>>, meta: PrefixMeta) -> Result<Self> {
        if levels.is_empty() || bonding.len() + 1 != levels.len() {
            return arg("need one more level than bonding maps");
        }
        if levels.iter().flatten().any(|&l| l == 0) {
            return arg("loop lengths must be positive");
        }
        for (k, b) in bonding.iter().enumerate() {
            let (dom, cod) = (&levels[k + 1], &levels[k]);
            if b.len() != dom.len() {
                return Err(Error::Dimension { left: b.len(), right: dom.len() });
            }
            let mut hit = vec![false; cod.len()];
            for (c, img) in b.iter().enumerate() {
                let Some(&tl) = cod.get(img.target) else {
                    return arg(format!("loop {} of level {} maps outside level {}", c + 1, k + 2, k + 1));
                };
                if dom[c] % tl != 0 || img.phase >= tl {
                    return Err(Error::Validation(format!(
                        "loop {} of level {} (length {}) cannot wrap onto loop {} (length {tl})",
                        c + 1,
                        k + 2,
                        dom[c],
                        img.target + 1
                    )));
                }
                hit[img.target] = true;
            }
            if let Some(t) = hit.iter().position(|h| !h) {
                return Err(Error::Validation(format!("loop {} of level {} is not hit", t + 1, k + 1)));
            }
        }
        Ok(LoopUnionPrefix { levels, bonding, meta })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Loop lengths of level `n`, 1-based.
    pub fn level(&self, n: usize) -> &[u64] {
        &self.levels[n - 1]
    }

    pub fn level_size(&self, n: usize) -> u128 {
        self.level(n).iter().map(|&l| l as u128).sum()
    }

    /// Loop images of `p_{m,n}`.
    pub fn composite(&self, m: usize, n: usize) -> Vec<LoopImage> {
        assert!(1 <= n && n <= m && m <= self.depth());
        let mut out: Vec<LoopImage> = (0..self.level(m).len()).map(|c| LoopImage { target: c, phase: 0 }).collect();
        for k in (n..m).rev() {
            let b = &self.bonding[k - 1];
            for img in out.iter_mut() {
                let step = b[img.target];
                let len = self.level(k)[step.target];
                *img = LoopImage { target: step.target, phase: (img.phase + step.phase) % len };
            }
        }
        out
    }

    /// The explicit prefix, when every level fits in `max_vertices`.
    pub fn to_explicit(&self, max_vertices: usize) -> Result<ShimomuraPrefix> {
        let mut levels = Vec::with_capacity(self.depth());
        let mut starts = Vec::with_capacity(self.depth());
        for n in 1..=self.depth() {
            let size = self.level_size(n);
            if size > max_vertices as u128 {
                return Err(Error::Resource(format!("level {n} has {size} vertices, over {max_vertices}")));
            }
            let parts: Vec<FiniteSystem> = self.level(n).iter().map(|&l| loop_system(l as usize)).collect::<Result<_>>()?;
            let refs: Vec<&FiniteRelation> = parts.iter().map(|p| p.relation()).collect();
            levels.push(Arc::new(FiniteSystem::new(disjoint_union_all(&refs)?)?));
            let mut acc = 0usize;
            starts.push(self.level(n).iter().map(|&l| {
                let s = acc;
                acc += l as usize;
                s
            }).collect::<Vec<_>>());
        }
        let bonding = (1..self.depth())
            .map(|n| {
                let mut t = Vec::new();
                for (c, &len) in self.level(n + 1).iter().enumerate() {
                    let img = self.bonding[n - 1][c];
                    let tl = self.level(n)[img.target];
                    let base = starts[n - 1][img.target];
                    t.extend((0..len).map(|x| base + ((x + img.phase) % tl) as usize));
                }
                t
            })
            .collect();
        ShimomuraPrefix::new(levels, bonding, self.meta.clone())
    }
}

fn meta(name: PrefixName, params: &Params) -> PrefixMeta {
    PrefixMeta { name: name.as_str().to_string(), params: params.clone() }
}

/// Symbolic form of the loop-union constructions (`THM_4_09`, `THM_4_10`,
/// `EXAMPLE_3`); `None` for the others.
pub fn build_loop_union(name: PrefixName, params: &Params, depth: usize) -> Result<Option<LoopUnionPrefix>> {
    if depth == 0 {
        return arg("depth must be positive");
    }
    let img = |target: usize| LoopImage { target, phase: 0 };
    let (levels, bonding): (Vec<Vec<u64>>, Vec<Vec<LoopImage>>) = match name {
        PrefixName::THM_4_10 => {
            let k = divisibility_sequence(params, depth)?;
            (k.iter().map(|&x| vec![x]).collect(), (1..depth).map(|_| vec![img(0)]).collect())
        }
        PrefixName::THM_4_09 => {
            let k = divisibility_sequence(params, depth)?;
            let star = matches!(params.get("star").map(String::as_str), Some("true") | Some("1") | Some("yes"));
            let mut levels = Vec::new();
            let mut bonding = Vec::new();
            for n in 1..=depth {
                let loops = 1usize << (n - 1);
                let star_here = star && n >= 2;
                let mut lv = Vec::new();
                if star_here {
                    lv.push(1);
                }
                lv.extend(std::iter::repeat_n(k[n - 1], loops));
                if n >= 2 {
                    let parent_star = star && n >= 3;
                    let (poff, off) = (usize::from(parent_star), usize::from(star_here));
                    let mut b = vec![img(0); lv.len()];
                    for i in 0..loops {
                        b[off + i] = if parent_star && i == 0 { img(0) } else { img(poff + i % (loops / 2)) };
                    }
                    bonding.push(b);
                }
                levels.push(lv);
            }
            (levels, bonding)
        }
        PrefixName::EXAMPLE_3 => {
            let kk: usize = params.get("K").map(|v| v.parse()).transpose().map_err(|e| Error::Argument(format!("K: {e}")))?.unwrap_or(1);
            if kk == 0 {
                return arg("K must be positive");
            }
            let ps = primes(kk * depth);
            let mut levels = vec![vec![1u64]];
            let mut bonding = Vec::new();
            for n in 2..=depth {
                let mut lv = vec![1u64; kk];
                for &p in &ps[..kk * n] {
                    lv.push(p.checked_pow(n as u32).ok_or_else(|| Error::Resource(format!("{p}^{n} overflows")))?);
                }
                let b = if n == 2 {
                    vec![img(0); lv.len()]
                } else {
                    let prev = kk * (n - 1);
                    let mut b: Vec<LoopImage> = (0..kk).map(|_| img(0)).collect();
                    for i in 0..kk * n {
                        b.push(if i < prev { img(kk + i) } else { img(i - prev) });
                    }
                    b
                };
                levels.push(lv);
                bonding.push(b);
            }
            (levels, bonding)
        }
        _ => return Ok(None),
    };
    LoopUnionPrefix::new(levels, bonding, meta(name, params)).map(Some)
}

/// `q1` up to rotation of each source loop: `assign[c]` is the target loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopAssignment {
    pub k: usize,
    pub n: usize,
    pub assign: Vec<usize>,
}

/// All surjective loop assignments from level `k` onto level `n`, in
/// lexicographic order. Rotating a source loop is an automorphism of level
/// `k`, and `q1` factors iff `q1 ∘ σ` does, so phases are fixed at 0.
pub fn enumerate_loop_factors(p: &LoopUnionPrefix, k: usize, n: usize, max_count: usize) -> Result<Vec<LoopAssignment>> {
    let (src, dst) = (p.level(k), p.level(n));
    let cands: Vec<Vec<usize>> = src.iter().map(|&l| (0..dst.len()).filter(|&d| l % dst[d] == 0).collect()).collect();
    let mut out = Vec::new();
    let mut assign = vec![0usize; src.len()];
    let mut hits = vec![0usize; dst.len()];
    fn rec(
        c: usize,
        cands: &[Vec<usize>],
        assign: &mut [usize],
        hits: &mut [usize],
        missing: usize,
        out: &mut Vec<Vec<usize>>,
        max_count: usize,
    ) -> Result<()> {
        if missing > cands.len() - c {
            return Ok(());
        }
        if c == cands.len() {
            if out.len() >= max_count {
                return Err(Error::Resource(format!("more than {max_count} loop assignments")));
            }
            out.push(assign.to_vec());
            return Ok(());
        }
        for &d in &cands[c] {
            assign[c] = d;
            hits[d] += 1;
            let miss = if hits[d] == 1 { missing - 1 } else { missing };
            rec(c + 1, cands, assign, hits, miss, out, max_count)?;
            hits[d] -= 1;
        }
        Ok(())
    }
    let mut raw = Vec::new();
    rec(0, &cands, &mut assign, &mut hits, dst.len(), &mut raw, max_count)?;
    out.extend(raw.into_iter().map(|assign| LoopAssignment { k, n, assign }));
    Ok(out)
}

/// A `q2` found symbolically: source loop `c` of level `m` goes to loop
/// `assign[c]` of level `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopFactoring {
    pub m: usize,
    pub q2: Vec<LoopImage>,
}

/// `q2` exists at level `m` iff every loop `C` has a candidate `D` with
/// `len(D) | len(C)` and `q1(D) = p_{m,n}(C)`, and some choice hits every
/// `D`; the latter is a bipartite matching saturating level `k`.
pub fn loop_factoring(p: &LoopUnionPrefix, q1: &LoopAssignment, m_max: usize) -> Result<Option<LoopFactoring>> {
    let (k, n) = (q1.k, q1.n);
    if !(1 <= n && n < k && k <= p.depth()) || m_max > p.depth() {
        return arg(format!("need 1 <= n < k <= m_max <= depth, got n = {n}, k = {k}, m_max = {m_max}"));
    }
    let lk = p.level(k);
    for m in k + 1..=m_max {
        let lm = p.level(m);
        let pmn = p.composite(m, n);
        let cands: Vec<Vec<usize>> = lm
            .iter()
            .enumerate()
            .map(|(c, &len)| (0..lk.len()).filter(|&d| len % lk[d] == 0 && q1.assign[d] == pmn[c].target).collect())
            .collect();
        if cands.iter().any(Vec::is_empty) {
            continue;
        }
        // Kuhn's algorithm from the level-k side.
        let mut by_d: Vec<Vec<usize>> = vec![Vec::new(); lk.len()];
        for (c, cs) in cands.iter().enumerate() {
            for &d in cs {
                by_d[d].push(c);
            }
        }
        let mut owner: Vec<Option<usize>> = vec![None; lm.len()];
        let mut ok = true;
        for d in 0..lk.len() {
            let mut seen = vec![false; lm.len()];
            if !augment(d, &by_d, &mut owner, &mut seen) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let q2 = cands
            .iter()
            .enumerate()
            .map(|(c, cs)| {
                let target = owner[c].unwrap_or(cs[0]);
                // q1 has phase 0, so the phase must agree mod len(q1(D)).
                let phase = pmn[c].phase % lk[target];
                LoopImage { target, phase }
            })
            .collect();
        return Ok(Some(LoopFactoring { m, q2 }));
    }
    Ok(None)
}

fn augment(d: usize, by_d: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &c in &by_d[d] {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        if owner[c].is_none() || augment(owner[c].unwrap(), by_d, owner, seen) {
            owner[c] = Some(d);
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopCounterexampleSearch {
    pub k: usize,
    pub n: usize,
    pub m_max: usize,
    pub q1_checked: usize,
    pub counterexample: Option<LoopAssignment>,
}

pub fn loop_factoring_counterexample(p: &LoopUnionPrefix, k: usize, n: usize, m_max: usize, max_q1: usize) -> Result<LoopCounterexampleSearch> {
    if !(1 <= n && n < k && k <= p.depth()) {
        return arg(format!("need 1 <= n < k <= depth, got n = {n}, k = {k}, depth {}", p.depth()));
    }
    let q1s = enumerate_loop_factors(p, k, n, max_q1)?;
    let mut checked = 0;
    for q1 in q1s {
        checked += 1;
        if loop_factoring(p, &q1, m_max)?.is_none() {
            return Ok(LoopCounterexampleSearch { k, n, m_max, q1_checked: checked, counterexample: Some(q1) });
        }
    }
    Ok(LoopCounterexampleSearch { k, n, m_max, q1_checked: checked, counterexample: None })
}

/// Re-checks a symbolic `q2` against `q1` and `p_{m,n}` loop by loop.
pub fn verify_loop_factoring(p: &LoopUnionPrefix, q1: &LoopAssignment, f: &LoopFactoring) -> bool {
    let (lk, lm, ln) = (p.level(q1.k), p.level(f.m), p.level(q1.n));
    let pmn = p.composite(f.m, q1.n);
    let mut hit = vec![false; lk.len()];
    for (c, img) in f.q2.iter().enumerate() {
        let d = img.target;
        if d >= lk.len() || lm[c] % lk[d] != 0 || img.phase >= lk[d] {
            return false;
        }
        hit[d] = true;
        let e = q1.assign[d];
        if e != pmn[c].target || img.phase % ln[e] != pmn[c].phase {
            return false;
        }
    }
    hit.into_iter().all(|h| h)
}

//! Hitting-time certificates for the pointed-loop sequence of a constant
//! word, at depths far beyond what explicit levels allow.
//!
//! Level `m` over level `n` is the label sequence `D_m` (the composite
//! table), with `D_n = 1..N_n` and `D_{m+1}` the concatenation over the
//! letters of `w` of `[1]` for `e` and `D_m` for `L`. In a pointed loop of
//! size `N` a walk of length `t` runs from `x` to `y` iff `t = y - x > 0`,
//! or `t >= N - x + y`, or `x = 1` and `t >= y - 1`. So only windows of
//! `horizon + 1` labels at each end, plus the extreme `i`/`j` positions,
//! need to be carried up the levels.

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{arg, Result};
use crate::prefix::{limit_hitting, HitStatus};
use crate::words::{constant_word_prefix, level_sizes, Letter, SemigroupWord};

const IS_I: u8 = 1;
const IS_J: u8 = 2;

#[derive(Clone, Debug)]
struct Summary {
    len: u64,
    prefix: Vec<u8>,
    suffix: Vec<u8>,
    /// Differences `y - x` in `1..=horizon` with `x < y`, `x` an `i`, `y` a `j`.
    direct: BitSet,
    last_i_from_end: Option<u64>,
    first_j_from_start: Option<u64>,
}

impl Summary {
    fn from_codes(codes: &[u8], h: usize) -> Summary {
        let w = h + 1;
        let n = codes.len();
        let mut direct = BitSet::new(h + 1);
        for (x, &cx) in codes.iter().enumerate() {
            if cx & IS_I == 0 {
                continue;
            }
            for d in 1..=h.min(n - 1 - x) {
                if codes[x + d] & IS_J != 0 {
                    direct.insert(d);
                }
            }
        }
        Summary {
            len: n as u64,
            prefix: codes[..n.min(w)].to_vec(),
            suffix: codes[n - n.min(w)..].to_vec(),
            direct,
            last_i_from_end: codes.iter().rposition(|c| c & IS_I != 0).map(|k| (n - 1 - k) as u64),
            first_j_from_start: codes.iter().position(|c| c & IS_J != 0).map(|k| k as u64),
        }
    }

    fn concat(&self, b: &Summary, h: usize) -> Summary {
        let w = h + 1;
        let mut direct = self.direct.clone();
        direct.union_with(&b.direct);
        for (e, &cx) in self.suffix.iter().rev().enumerate() {
            if cx & IS_I == 0 {
                continue;
            }
            for (p, &cy) in b.prefix.iter().enumerate() {
                let d = e + 1 + p;
                if d > h {
                    break;
                }
                if cy & IS_J != 0 {
                    direct.insert(d);
                }
            }
        }
        let mut prefix = self.prefix.clone();
        if prefix.len() < w {
            prefix.extend(b.prefix.iter().take(w - prefix.len()));
        }
        let mut suffix = b.suffix.clone();
        if suffix.len() < w {
            let need = w - suffix.len();
            let take = self.suffix.len().min(need);
            let mut s = self.suffix[self.suffix.len() - take..].to_vec();
            s.extend_from_slice(&suffix);
            suffix = s;
        }
        Summary {
            len: self.len.saturating_add(b.len),
            prefix,
            suffix,
            direct,
            last_i_from_end: b.last_i_from_end.or_else(|| self.last_i_from_end.map(|d| d.saturating_add(b.len))),
            first_j_from_start: self.first_j_from_start.or_else(|| b.first_j_from_start.map(|d| d.saturating_add(self.len))),
        }
    }

    /// Whether a walk of length `t` joins an `i` to a `j`.
    fn hits(&self, t: usize, i_is_one: bool) -> bool {
        if t < self.direct.len() && self.direct.contains(t) {
            return true;
        }
        let (Some(last_i), Some(first_j)) = (self.last_i_from_end, self.first_j_from_start) else {
            return false;
        };
        // N - x + y with x the last i and y the first j (1-based positions).
        let wrap = last_i.saturating_add(1).saturating_add(first_j);
        let from_fixed = if i_is_one { first_j } else { u64::MAX };
        (t as u64) >= wrap.min(from_fixed)
    }
}

/// Per-`t` hitting status for level-`n` labels `i`, `j` (1-based), computed
/// symbolically through level `depth`.
pub fn compressed_hitting(w: &SemigroupWord, n: usize, i: usize, j: usize, horizon: usize, depth: usize) -> Result<Vec<HitStatus>> {
    if !w.in_s() {
        return arg(format!("word {w} has no L"));
    }
    if n == 0 || depth < n {
        return arg(format!("need 1 <= n <= depth, got n = {n}, depth = {depth}"));
    }
    let sizes = level_sizes(w, n)?;
    let nn = sizes[n - 1] as usize;
    if i == 0 || j == 0 || i > nn || j > nn {
        return arg(format!("labels must lie in [1, {nn}]"));
    }
    let code = |lab: usize| -> u8 { (if lab == i { IS_I } else { 0 }) | (if lab == j { IS_J } else { 0 }) };
    let base: Vec<u8> = (1..=nn).map(code).collect();
    let one = Summary::from_codes(&[code(1)], horizon);
    let mut cur = Summary::from_codes(&base, horizon);
    let mut status = vec![HitStatus::PresentToDepth; horizon];
    for m in n..=depth {
        if m > n {
            let mut next: Option<Summary> = None;
            for &l in w.letters() {
                let piece = if l == Letter::E { &one } else { &cur };
                next = Some(match next {
                    None => piece.clone(),
                    Some(acc) => acc.concat(piece, horizon),
                });
            }
            cur = next.expect("word is nonempty");
        }
        for t in 1..=horizon {
            if status[t - 1].is_present() && !cur.hits(t, i == 1) {
                status[t - 1] = HitStatus::AbsentCertified { level: m };
            }
        }
    }
    Ok(status)
}

/// Explicit counterpart of [`compressed_hitting`] over built levels.
pub fn explicit_hitting(w: &SemigroupWord, n: usize, i: usize, j: usize, horizon: usize, depth: usize) -> Result<Vec<HitStatus>> {
    let p = constant_word_prefix(w, depth)?;
    Ok(limit_hitting(&p, n, i - 1, j - 1, horizon)?.status)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionRow {
    pub i: usize,
    /// `t` in both `N(U_i,U_i)` and `N(U_i,U_{i-1})` at every level checked.
    pub unresolved: Vec<usize>,
    /// Deepest level needed for the certificate, when complete.
    pub certified_at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub word: SemigroupWord,
    pub n: usize,
    pub level_size: u64,
    pub horizon: usize,
    pub depth: usize,
    pub rows: Vec<ObstructionRow>,
}

impl ObstructionReport {
    pub fn certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified_at.is_some())
    }

    /// Smallest depth at which every row is certified.
    pub fn certifying_depth(&self) -> Option<usize> {
        self.rows.iter().map(|r| r.certified_at).collect::<Option<Vec<_>>>()?.into_iter().max()
    }
}

/// Checks `N(U_i,U_i) ∩ N(U_i,U_{i-1}) ∩ [1, horizon] = ∅` for every
/// `2 < i < N_n`.
pub fn weak_mixing_obstruction(w: &SemigroupWord, n: usize, horizon: usize, depth: usize) -> Result<ObstructionReport> {
    let nn = *level_sizes(w, n)?.last().unwrap() as usize;
    let mut rows = Vec::new();
    for i in 3..nn {
        let same = compressed_hitting(w, n, i, i, horizon, depth)?;
        let prev = compressed_hitting(w, n, i, i - 1, horizon, depth)?;
        let mut unresolved = Vec::new();
        let mut worst = 0;
        for t in 1..=horizon {
            match (same[t - 1], prev[t - 1]) {
                (HitStatus::PresentToDepth, HitStatus::PresentToDepth) => unresolved.push(t),
                (a, b) => {
                    let lv = |s: HitStatus| match s {
                        HitStatus::AbsentCertified { level } => level,
                        HitStatus::PresentToDepth => usize::MAX,
                    };
                    worst = worst.max(lv(a).min(lv(b)));
                }
            }
        }
        let certified_at = unresolved.is_empty().then_some(worst.max(n));
        rows.push(ObstructionRow { i, unresolved, certified_at });
    }
    Ok(ObstructionReport { word: w.clone(), n, level_size: nn as u64, horizon, depth, rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvidenceRow {
    pub i: usize,
    /// `(t, level)` pairs found absent, each a refutation.
    pub absent: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvidenceReport {
    pub word: SemigroupWord,
    pub n: usize,
    pub level_size: u64,
    pub from: usize,
    pub window: usize,
    pub depth: usize,
    pub rows: Vec<EvidenceRow>,
}

impl EvidenceReport {
    pub fn all_present(&self) -> bool {
        self.rows.iter().all(|r| r.absent.is_empty())
    }
}

/// Status of `t ∈ [from, from + window]` in `N(U_i,U_i)` for every label
/// `i`; `from` defaults to `N_n`.
pub fn mixing_evidence(w: &SemigroupWord, n: usize, from: Option<usize>, window: usize, depth: usize) -> Result<EvidenceReport> {
    let nn = *level_sizes(w, n)?.last().unwrap() as usize;
    let from = from.unwrap_or(nn);
    if from == 0 {
        return arg("window must start at a positive time");
    }
    let horizon = from + window;
    let mut rows = Vec::new();
    for i in 1..=nn {
        let st = compressed_hitting(w, n, i, i, horizon, depth)?;
        let absent = (from..=horizon)
            .filter_map(|t| match st[t - 1] {
                HitStatus::AbsentCertified { level } => Some((t, level)),
                HitStatus::PresentToDepth => None,
            })
            .collect();
        rows.push(EvidenceRow { i, absent });
    }
    Ok(EvidenceReport { word: w.clone(), n, level_size: nn as u64, from, window, depth, rows })
}

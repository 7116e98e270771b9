//! Words over `{e, L}` and the maps they encode between pointed loops.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{arg, Error, Result};
use crate::maps::SystemMap;
use crate::prefix::{PrefixMeta, ShimomuraPrefix};
use crate::relation::FiniteSystem;
use crate::shapes::pointed_loop;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    E,
    L,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SemigroupWord {
    letters: Vec<Letter>,
}

impl SemigroupWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        SemigroupWord { letters }
    }

    /// The identity word `L`.
    pub fn identity() -> Self {
        SemigroupWord { letters: vec![Letter::L] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `k_w`, the number of `e`'s.
    pub fn e_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::E).count()
    }

    /// `K_w`, the number of `L`'s.
    pub fn l_count(&self) -> usize {
        self.letters.len() - self.e_count()
    }

    /// `ℓ_w(x) = k_w + K_w·x`; `None` on overflow.
    pub fn ell(&self, x: u64) -> Option<u64> {
        (self.l_count() as u64).checked_mul(x)?.checked_add(self.e_count() as u64)
    }

    pub fn in_s(&self) -> bool {
        self.l_count() > 0
    }

    pub fn in_s_prime(&self) -> bool {
        self.letters.first() == Some(&Letter::E) && self.letters.last() == Some(&Letter::E) && self.l_count() >= 2
    }

    fn require_s(&self) -> Result<()> {
        if !self.in_s() {
            return arg(format!("word {self:?} has no L"));
        }
        Ok(())
    }
}

impl fmt::Display for SemigroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::E => "e",
                Letter::L => "L",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SemigroupWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .enumerate()
            .map(|(k, c)| match c {
                'e' => Ok(Letter::E),
                'L' => Ok(Letter::L),
                _ => Err(Error::Argument(format!("letter {c:?} at offset {k} of {s:?} is not e or L"))),
            })
            .collect::<Result<_>>()?;
        Ok(SemigroupWord { letters })
    }
}

impl Serialize for SemigroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SemigroupWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `w1 * w2`: every `L` of `w2` replaced by `w1`.
pub fn compose_words(w1: &SemigroupWord, w2: &SemigroupWord) -> SemigroupWord {
    let mut letters = Vec::with_capacity(w2.e_count() + w2.l_count() * w1.len());
    for &l in &w2.letters {
        match l {
            Letter::E => letters.push(Letter::E),
            Letter::L => letters.extend_from_slice(&w1.letters),
        }
    }
    SemigroupWord { letters }
}

/// `w^n`, the n-fold self-composition.
pub fn power_word(w: &SemigroupWord, n: usize) -> Result<SemigroupWord> {
    if n == 0 {
        return arg("word power must be at least 1");
    }
    let mut out = w.clone();
    for _ in 1..n {
        out = compose_words(w, &out);
    }
    Ok(out)
}

/// Lengths of the `e`-runs strictly between consecutive `L`'s, sorted.
pub fn run_lengths(w: &SemigroupWord) -> Vec<usize> {
    let ls: Vec<usize> = w.letters.iter().enumerate().filter(|(_, &l)| l == Letter::L).map(|(k, _)| k).collect();
    let mut out: Vec<usize> = ls.windows(2).map(|p| p[1] - p[0] - 1).collect();
    out.sort_unstable();
    out
}

/// Runs before the first and after the last `L` (whole word if no `L`).
pub fn boundary_runs(w: &SemigroupWord) -> (usize, usize) {
    let first = w.letters.iter().position(|&l| l == Letter::L).unwrap_or(w.len());
    let last = w.letters.iter().rposition(|&l| l == Letter::L).map_or(w.len(), |k| w.len() - 1 - k);
    (first, last)
}

/// Lengths of maximal `L`-runs, sorted and deduplicated.
pub fn l_run_lengths(w: &SemigroupWord) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = 0;
    for &l in w.letters.iter().chain(std::iter::once(&Letter::E)) {
        if l == Letter::L {
            cur += 1;
        } else if cur > 0 {
            out.push(cur);
            cur = 0;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// 0-based table of `p_{(w; ℓ_w(n), n)}`.
pub fn word_table(w: &SemigroupWord, n: usize) -> Result<Vec<usize>> {
    w.require_s()?;
    if n == 0 {
        return arg("pointed loop length must be positive");
    }
    let m = w.ell(n as u64).ok_or_else(|| Error::Resource("ℓ_w(n) overflows".into()))? as usize;
    let mut t = Vec::with_capacity(m);
    for &l in &w.letters {
        match l {
            Letter::E => t.push(0),
            Letter::L => t.extend(0..n),
        }
    }
    Ok(t)
}

/// The map `pointed_loop(ℓ_w(n)) → pointed_loop(n)` read off `w`.
pub fn word_to_map(w: &SemigroupWord, n: usize) -> Result<SystemMap> {
    let t = word_table(w, n)?;
    SystemMap::from_parts(pointed_loop(t.len())?, pointed_loop(n)?, t)
}

/// Recovers the word of a map between pointed loops. Over `pointed_loop(1)`
/// every letter reads as `1`, so the word is not determined and this errors.
pub fn map_to_word(m: &SystemMap) -> Result<SemigroupWord> {
    let (dm, n) = (m.domain.size(), m.codomain.size());
    if *m.domain != pointed_loop(dm)? || *m.codomain != pointed_loop(n)? {
        return Err(Error::Decode("map is not between pointed loops".into()));
    }
    if n == 1 {
        return Err(Error::Decode("maps onto the one-point loop do not determine a word".into()));
    }
    let t = &m.table;
    let mut letters = Vec::new();
    let mut x = 0;
    while x < dm {
        if t[x] != 0 {
            return Err(Error::Decode(format!("position {} maps to {} where a letter must start at 1", x + 1, t[x] + 1)));
        }
        if x + 1 < dm && t[x + 1] == 1 {
            if x + n > dm || (0..n).any(|k| t[x + k] != k) {
                return Err(Error::Decode(format!("run starting at position {} is not 1..{n}", x + 1)));
            }
            letters.push(Letter::L);
            x += n;
        } else {
            letters.push(Letter::E);
            x += 1;
        }
    }
    let w = SemigroupWord { letters };
    if !w.in_s() {
        return Err(Error::Decode("decoded word has no L".into()));
    }
    Ok(w)
}

/// `N_1 = 1`, `N_{k+1} = ℓ_{w_k}(N_k)`, for `words.len() + 1` levels.
pub fn level_sizes_for(words: &[SemigroupWord]) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for w in words {
        let last = *out.last().unwrap();
        out.push(w.ell(last).ok_or_else(|| Error::Resource(format!("level size overflows after {last}")))?);
    }
    Ok(out)
}

/// Level sizes of the constant sequence `w_n = w`.
pub fn level_sizes(w: &SemigroupWord, depth: usize) -> Result<Vec<u64>> {
    if depth == 0 {
        return arg("depth must be positive");
    }
    level_sizes_for(&vec![w.clone(); depth - 1])
}

/// The pointed invertible sequence from `w_1, w_2, ...`.
pub fn word_sequence_prefix(words: &[SemigroupWord], meta: PrefixMeta) -> Result<ShimomuraPrefix> {
    if let Some(w) = words.iter().find(|w| !w.in_s_prime()) {
        return arg(format!("word {w} is not in S' (needs e at both ends and at least two L's)"));
    }
    let sizes = level_sizes_for(words)?;
    if sizes.last().copied().unwrap_or(1) > 50_000_000 {
        return Err(Error::Resource(format!("top level would have {} vertices", sizes.last().unwrap())));
    }
    let levels = sizes
        .iter()
        .map(|&n| pointed_loop(n as usize).map(Arc::new))
        .collect::<Result<Vec<Arc<FiniteSystem>>>>()?;
    let bonding = words
        .iter()
        .zip(&sizes)
        .map(|(w, &n)| word_table(w, n as usize))
        .collect::<Result<Vec<_>>>()?;
    ShimomuraPrefix::new(levels, bonding, meta)
}

pub(crate) fn constant_word_prefix_with_meta(w: &SemigroupWord, depth: usize, meta: PrefixMeta) -> Result<ShimomuraPrefix> {
    if depth == 0 {
        return arg("depth must be positive");
    }
    word_sequence_prefix(&vec![w.clone(); depth - 1], meta)
}

pub fn constant_word_prefix(w: &SemigroupWord, depth: usize) -> Result<ShimomuraPrefix> {
    let meta = PrefixMeta { name: "word".into(), params: BTreeMap::from([("word".to_string(), w.to_string())]) };
    constant_word_prefix_with_meta(w, depth, meta)
}

/// Some `w̃` with `w * w̃ = target`, i.e. a parse of `target` into single
/// `e`'s and copies of `w` using at least one copy. Fewest-letters-first
/// is not attempted; the parse prefers a copy of `w` at each position.
pub fn left_quotient(w: &SemigroupWord, target: &SemigroupWord) -> Option<SemigroupWord> {
    let t = &target.letters;
    let (n, k) = (t.len(), w.len());
    if k == 0 {
        return None;
    }
    // ok[p][u]: the suffix from p parses, with u = whether a copy is still owed.
    let mut ok = vec![[false; 2]; n + 1];
    ok[n] = [true, false];
    for p in (0..n).rev() {
        for owe in 0..2 {
            let via_w = p + k <= n && t[p..p + k] == w.letters[..] && ok[p + k][0];
            let via_e = t[p] == Letter::E && ok[p + 1][owe];
            ok[p][owe] = via_w || via_e;
        }
    }
    if !ok[0][1] {
        return None;
    }
    let mut letters = Vec::new();
    let (mut p, mut owe) = (0, 1);
    while p < n {
        if p + k <= n && t[p..p + k] == w.letters[..] && ok[p + k][0] {
            letters.push(Letter::L);
            p += k;
            owe = 0;
        } else {
            debug_assert!(t[p] == Letter::E && ok[p + 1][owe]);
            letters.push(Letter::E);
            p += 1;
        }
    }
    Some(SemigroupWord { letters })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum FactorizationOutcome {
    Found { m: usize, w_tilde: SemigroupWord },
    NotFoundWithinCaps { max_m: usize, stopped_at_length: Option<usize> },
}

/// Bounded search for `m >= n` and `w̃` with
/// `w * w̃ = w_n * w_{n+1} * ... * w_m`; `sequence[k]` is `w_{k+1}`.
pub fn factorization_search(w: &SemigroupWord, sequence: &[SemigroupWord], n: usize, max_letters: usize) -> Result<FactorizationOutcome> {
    if n == 0 || n > sequence.len() {
        return arg(format!("start index {n} outside 1..={}", sequence.len()));
    }
    w.require_s()?;
    let mut prod = sequence[n - 1].clone();
    for m in n..=sequence.len() {
        if m > n {
            let next = compose_words(&prod, &sequence[m - 1]);
            if next.len() > max_letters {
                return Ok(FactorizationOutcome::NotFoundWithinCaps { max_m: m - 1, stopped_at_length: Some(next.len()) });
            }
            prod = next;
        }
        if let Some(w_tilde) = left_quotient(w, &prod) {
            return Ok(FactorizationOutcome::Found { m, w_tilde });
        }
    }
    Ok(FactorizationOutcome::NotFoundWithinCaps { max_m: sequence.len(), stopped_at_length: None })
}

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use crate::bitset::BitSet;
use crate::error::{arg, Error, Result};

/// Set of 0-based vertex indices.
pub type VertexSet = BTreeSet<usize>;

/// A relation on the vertex set `0..size`.
///
/// Successor lists are kept sorted and deduplicated, so two relations with the
/// same edge set compare equal. Labels are for display only and do not take
/// part in equality.
#[derive(Clone, Debug)]
pub struct FiniteRelation {
    size: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl PartialEq for FiniteRelation {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.succ == other.succ
    }
}

impl Eq for FiniteRelation {}

impl FiniteRelation {
    /// Builds a relation from 0-based edges.
    pub fn new(size: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if size == 0 {
            return arg("relation size must be positive");
        }
        let mut succ = vec![Vec::new(); size];
        for (a, b) in edges {
            if a >= size || b >= size {
                return arg(format!("edge ({}, {}) outside [1, {}]", a + 1, b + 1, size));
            }
            succ[a].push(b);
        }
        Ok(Self::from_succ(size, succ))
    }

    /// Builds a relation from 1-based edges.
    pub fn from_one_based(size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a == 0 || b == 0) {
            return arg(format!("edge ({a}, {b}) uses index 0; labels are 1-based"));
        }
        Self::new(size, edges.iter().map(|&(a, b)| (a - 1, b - 1)))
    }

    pub(crate) fn from_succ(size: usize, mut succ: Vec<Vec<usize>>) -> Self {
        let mut pred = vec![Vec::new(); size];
        for (a, s) in succ.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            for &b in s.iter() {
                pred[b].push(a);
            }
        }
        FiniteRelation { size, succ, pred, labels: None }
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::new(size, (0..size).map(|i| (i, i)))
    }

    pub fn full(size: usize) -> Result<Self> {
        Self::new(size, (0..size).flat_map(|a| (0..size).map(move |b| (a, b))))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::Dimension { left: labels.len(), right: self.size });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn pred(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    /// Position of edge `(a, b)` in the lexicographic edge order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let pos = self.succ[a].binary_search(&b).ok()?;
        let before: usize = self.succ[..a].iter().map(Vec::len).sum();
        Some(before + pos)
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Edges in lexicographic order, 0-based.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of a vertex: its label, or its 1-based index.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => (v + 1).to_string(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.size).all(|v| !self.succ[v].is_empty() && !self.pred[v].is_empty())
    }

    /// `self` as a bit matrix, one row per vertex.
    pub fn rows(&self) -> Vec<BitSet> {
        self.succ.iter().map(|s| BitSet::from_iter(self.size, s.iter().copied())).collect()
    }

    pub(crate) fn from_rows(rows: &[BitSet]) -> Self {
        let size = rows.len();
        Self::from_succ(size, rows.iter().map(|r| r.iter().collect()).collect())
    }

    /// Image of a vertex set under the relation.
    pub fn image(&self, set: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.size);
        for a in set.iter() {
            for &b in &self.succ[a] {
                out.insert(b);
            }
        }
        out
    }
}

impl fmt::Display for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, b)) in self.edges().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", a + 1, b + 1)?;
        }
        write!(f, "}} on {} vertices", self.size)
    }
}

/// A surjective relation: every vertex has a successor and a predecessor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSystem(FiniteRelation);

impl FiniteSystem {
    pub fn new(rel: FiniteRelation) -> Result<Self> {
        if let Some(v) = (0..rel.size).find(|&v| rel.succ[v].is_empty() || rel.pred[v].is_empty()) {
            let side = if rel.succ[v].is_empty() { "successor" } else { "predecessor" };
            return Err(Error::Precondition(format!(
                "relation is not surjective: vertex {} has no {side}",
                rel.label(v)
            )));
        }
        Ok(FiniteSystem(rel))
    }

    pub fn from_one_based(size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(FiniteRelation::from_one_based(size, edges)?)
    }

    pub fn relation(&self) -> &FiniteRelation {
        &self.0
    }

    pub fn into_relation(self) -> FiniteRelation {
        self.0
    }
}

impl Deref for FiniteSystem {
    type Target = FiniteRelation;
    fn deref(&self) -> &FiniteRelation {
        &self.0
    }
}

impl fmt::Display for FiniteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `s ∘ r`: pairs `(a, c)` with `(a, b) ∈ r` and `(b, c) ∈ s` for some `b`.
pub fn compose(r: &FiniteRelation, s: &FiniteRelation) -> Result<FiniteRelation> {
    if r.size != s.size {
        return Err(Error::Dimension { left: r.size, right: s.size });
    }
    let srows = s.rows();
    let rows: Vec<BitSet> = (0..r.size)
        .map(|a| {
            let mut row = BitSet::new(r.size);
            for &b in r.succ(a) {
                row.union_with(&srows[b]);
            }
            row
        })
        .collect();
    Ok(FiniteRelation::from_rows(&rows))
}

pub fn inverse(r: &FiniteRelation) -> FiniteRelation {
    FiniteRelation::from_succ(r.size, r.pred.clone())
}

/// `r^n`, with `r^0` the identity.
pub fn power(r: &FiniteRelation, n: usize) -> FiniteRelation {
    let mut result = FiniteRelation::identity(r.size).expect("positive size");
    let mut base = r.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = compose(&result, &base).expect("same size");
        }
        n >>= 1;
        if n > 0 {
            base = compose(&base, &base).expect("same size");
        }
    }
    result
}

/// `|r|`: vertices carrying a self-edge.
pub fn fixed_set(r: &FiniteRelation) -> VertexSet {
    (0..r.size).filter(|&v| r.has_edge(v, v)).collect()
}

/// Reachability by paths of positive length, one row per vertex.
pub fn reach_rows(r: &FiniteRelation) -> Vec<BitSet> {
    (0..r.size)
        .map(|a| {
            let mut seen = BitSet::new(r.size);
            let mut stack: Vec<usize> = Vec::new();
            for &b in r.succ(a) {
                if seen.insert(b) {
                    stack.push(b);
                }
            }
            while let Some(x) = stack.pop() {
                for &y in r.succ(x) {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            seen
        })
        .collect()
}

/// The orbit relation: union of all positive powers.
pub fn orbit_closure(r: &FiniteRelation) -> FiniteRelation {
    FiniteRelation::from_rows(&reach_rows(r))
}

/// Product relation; vertex `(a, b)` has index `a * |r2| + b`.
pub fn product(r1: &FiniteRelation, r2: &FiniteRelation) -> FiniteRelation {
    let n2 = r2.size;
    let size = r1.size * n2;
    let mut succ = vec![Vec::new(); size];
    for (a, a2) in r1.edges() {
        for (b, b2) in r2.edges() {
            succ[a * n2 + b].push(a2 * n2 + b2);
        }
    }
    let labels = (0..r1.size)
        .flat_map(|a| (0..n2).map(move |b| (a, b)))
        .map(|(a, b)| format!("({},{})", r1.label(a), r2.label(b)))
        .collect();
    FiniteRelation::from_succ(size, succ).with_labels(labels).expect("label count")
}

/// Disjoint union of several relations, indices offset in order. Labels are
/// tagged `k:label` with the 1-based component number `k`.
pub fn disjoint_union_all(parts: &[&FiniteRelation]) -> Result<FiniteRelation> {
    if parts.is_empty() {
        return arg("disjoint union of no relations");
    }
    let size: usize = parts.iter().map(|p| p.size).sum();
    let mut succ = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    let mut offset = 0;
    for (k, p) in parts.iter().enumerate() {
        for v in 0..p.size {
            succ.push(p.succ(v).iter().map(|&b| b + offset).collect());
            labels.push(format!("{}:{}", k + 1, p.label(v)));
        }
        offset += p.size;
    }
    FiniteRelation::from_succ(size, succ).with_labels(labels)
}

pub fn disjoint_union(r1: &FiniteRelation, r2: &FiniteRelation) -> FiniteRelation {
    disjoint_union_all(&[r1, r2]).expect("two parts")
}

/// Index of vertex `(a, i)` (with `1 <= i <= n`) in the `n`-fold suspension.
pub fn suspension_index(a: usize, i: usize, n: usize) -> usize {
    a * n + (i - 1)
}

/// `n`-fold discrete suspension: vertices `A × [1, n]`, edges
/// `((a,i),(a,i+1))` for `i < n` and `((a,n),(b,1))` for `(a,b) ∈ s`.
pub fn suspension(s: &FiniteSystem, n: usize) -> Result<FiniteSystem> {
    if n == 0 {
        return arg("suspension order must be positive");
    }
    let size = s.size() * n;
    let mut succ = vec![Vec::new(); size];
    for a in 0..s.size() {
        for i in 1..n {
            succ[suspension_index(a, i, n)].push(suspension_index(a, i + 1, n));
        }
        for &b in s.succ(a) {
            succ[suspension_index(a, n, n)].push(suspension_index(b, 1, n));
        }
    }
    let rel = FiniteRelation::from_succ(size, succ);
    let rel = if n == 1 {
        match s.labels() {
            Some(l) => rel.with_labels(l.to_vec())?,
            None => rel,
        }
    } else {
        let labels = (0..s.size())
            .flat_map(|a| (1..=n).map(move |i| (a, i)))
            .map(|(a, i)| format!("({},{})", s.label(a), i))
            .collect();
        rel.with_labels(labels)?
    };
    FiniteSystem::new(rel)
}

/// `{ t in [1, horizon] : r^t(u) meets v }`.
pub fn hitting_times(r: &FiniteRelation, u: &VertexSet, v: &VertexSet, horizon: usize) -> Result<BTreeSet<usize>> {
    if u.is_empty() || v.is_empty() {
        return arg("hitting times need nonempty source and target sets");
    }
    if let Some(&x) = u.iter().chain(v.iter()).find(|&&x| x >= r.size) {
        return arg(format!("vertex {} outside [1, {}]", x + 1, r.size));
    }
    let target = BitSet::from_iter(r.size, v.iter().copied());
    let mut front = BitSet::from_iter(r.size, u.iter().copied());
    let mut out = BTreeSet::new();
    for t in 1..=horizon {
        front = r.image(&front);
        if front.is_empty() {
            break;
        }
        if front.intersects(&target) {
            out.insert(t);
        }
    }
    Ok(out)
}

/// Default bound on the number of words `admissible_words` may produce.
pub const DEFAULT_WORD_CAP: u64 = 1_000_000;

fn count_words(r: &FiniteRelation, length: usize) -> u64 {
    if length == 0 {
        return 1;
    }
    let mut ways = vec![1u64; r.size];
    for _ in 1..length {
        ways = (0..r.size)
            .map(|a| r.succ(a).iter().fold(0u64, |acc, &b| acc.saturating_add(ways[b])))
            .collect();
    }
    ways.iter().fold(0u64, |acc, &w| acc.saturating_add(w))
}

/// All edge-consistent vertex sequences of the given length, in
/// lexicographic order.
pub fn admissible_words(r: &FiniteRelation, length: usize, cap: u64) -> Result<Vec<Vec<usize>>> {
    if length == 0 {
        return arg("word length must be positive");
    }
    let total = count_words(r, length);
    if total > cap {
        return Err(Error::Resource(format!("{total} admissible words of length {length} exceed the cap {cap}")));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut word = Vec::with_capacity(length);
    fn extend(r: &FiniteRelation, length: usize, word: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if word.len() == length {
            out.push(word.clone());
            return;
        }
        let last = *word.last().expect("nonempty");
        for &b in r.succ(last) {
            word.push(b);
            extend(r, length, word, out);
            word.pop();
        }
    }
    for v in 0..r.size {
        word.push(v);
        extend(r, length, &mut word, &mut out);
        word.pop();
    }
    Ok(out)
}

/// Outcome of checking that admissible words close up into cyclic words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicCheck {
    pub recurrent: bool,
    pub window: usize,
    pub words_checked: usize,
    /// First word (0-based) with no path from its last letter back to its first.
    pub failure: Option<Vec<usize>>,
}

impl PeriodicCheck {
    /// The check only makes a claim about recurrent relations.
    pub fn passed(&self) -> bool {
        !self.recurrent || self.failure.is_none()
    }
}

/// For every admissible word of length `window`, looks for a closing path
/// from its last vertex back to its first, which makes the word part of a
/// cyclic admissible word and hence of a periodic sample path.
pub fn periodic_extension_check(r: &FiniteRelation, window: usize, cap: u64) -> Result<PeriodicCheck> {
    let words = admissible_words(r, window, cap)?;
    let reach = reach_rows(r);
    let recurrent = (0..r.size).all(|v| reach[v].contains(v));
    let failure = words
        .iter()
        .find(|w| !reach[*w.last().expect("nonempty")].contains(w[0]))
        .cloned();
    Ok(PeriodicCheck { recurrent, window, words_checked: words.len(), failure })
}

/// Completes a word into a cyclic word by appending the interior of a
/// shortest closing path from its last vertex to its first.
pub fn cyclic_completion(r: &FiniteRelation, word: &[usize]) -> Option<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    const ROOT: usize = usize::MAX - 1;
    let (&first, &last) = (word.first()?, word.last()?);
    let mut parent = vec![UNSEEN; r.size];
    let mut queue = std::collections::VecDeque::new();
    for &b in r.succ(last) {
        parent[b] = ROOT;
        queue.push_back(b);
    }
    while let Some(x) = queue.pop_front() {
        if x == first {
            let mut interior = vec![];
            let mut y = parent[x];
            while y != ROOT {
                interior.push(y);
                y = parent[y];
            }
            interior.reverse();
            let mut out = word.to_vec();
            out.extend(interior);
            return Some(out);
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

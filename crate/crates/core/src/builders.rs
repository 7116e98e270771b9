//! Builders for the named inverse-sequence constructions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{arg, Error, Result};
use crate::numeric::wedge_pair_sequence;
use crate::prefix::{PrefixMeta, ShimomuraPrefix};
use crate::relation::{disjoint_union_all, FiniteRelation, FiniteSystem};
use crate::shapes::{dumbbell_map_table, loop_system, onto_in_loop_table, onto_out_loop_table, wedge, DumbbellShape};
use crate::words::{constant_word_prefix_with_meta, SemigroupWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum PrefixName {
    THM_4_04,
    PROP_4_05,
    THM_4_08_STAR,
    THM_4_09,
    THM_4_10,
    THM_4_15,
    THM_4_16,
    EXAMPLE_3,
}

impl PrefixName {
    pub const ALL: [PrefixName; 8] = [
        PrefixName::THM_4_04,
        PrefixName::PROP_4_05,
        PrefixName::THM_4_08_STAR,
        PrefixName::THM_4_09,
        PrefixName::THM_4_10,
        PrefixName::THM_4_15,
        PrefixName::THM_4_16,
        PrefixName::EXAMPLE_3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PrefixName::THM_4_04 => "THM_4_04",
            PrefixName::PROP_4_05 => "PROP_4_05",
            PrefixName::THM_4_08_STAR => "THM_4_08_STAR",
            PrefixName::THM_4_09 => "THM_4_09",
            PrefixName::THM_4_10 => "THM_4_10",
            PrefixName::THM_4_15 => "THM_4_15",
            PrefixName::THM_4_16 => "THM_4_16",
            PrefixName::EXAMPLE_3 => "EXAMPLE_3",
        }
    }

    /// Whether the construction is meant to give ±directional lifts at every
    /// step (or, for the starred dumbbell tree, every two steps).
    pub fn invertible(&self) -> bool {
        true
    }
}

impl fmt::Display for PrefixName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrefixName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PrefixName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Argument(format!("unknown construction {s:?}")))
    }
}

pub type Params = BTreeMap<String, String>;

/// Levels and bonding tables before they are wrapped in a prefix.
type Tower = (Vec<Arc<FiniteSystem>>, Vec<Vec<usize>>);

pub fn parse_params<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Params> {
    let mut out = Params::new();
    for it in items {
        let (k, v) = it
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("parameter {it:?} is not key=value")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn param_u64(params: &Params, key: &str, default: u64) -> Result<u64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| Error::Argument(format!("parameter {key}={v:?}: {e}"))),
    }
}

fn param_bool(params: &Params, key: &str) -> Result<bool> {
    match params.get(key).map(String::as_str) {
        None | Some("false") | Some("0") | Some("no") => Ok(false),
        Some("true") | Some("1") | Some("yes") => Ok(true),
        Some(v) => arg(format!("parameter {key}={v:?} is not a boolean")),
    }
}

fn check_params(params: &Params, allowed: &[&str]) -> Result<()> {
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return arg(format!("unexpected parameter {k:?}; allowed: {allowed:?}"));
    }
    Ok(())
}

/// Divisibility sequence from the `k` parameter: `factorial` (default),
/// `pow2` (`2^{n-1}`), or an explicit comma list.
pub fn divisibility_sequence(params: &Params, depth: usize) -> Result<Vec<u64>> {
    let choice = params.get("k").map(String::as_str).unwrap_or("factorial");
    let seq: Vec<u64> = match choice {
        "factorial" => {
            let mut v = Vec::with_capacity(depth);
            let mut f = 1u64;
            for n in 1..=depth as u64 {
                f = f.checked_mul(n).ok_or_else(|| Error::Argument("factorial sequence overflows".into()))?;
                v.push(f);
            }
            v
        }
        "pow2" => (0..depth as u32).map(|e| 1u64 << e).collect(),
        list => {
            let v: Vec<u64> = list
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Argument(format!("k sequence {list:?}: {e}")))?;
            if v.len() < depth {
                return arg(format!("k sequence has {} terms, depth {depth} needs more", v.len()));
            }
            v[..depth].to_vec()
        }
    };
    if seq.first() != Some(&1) {
        return arg("divisibility sequence must start with 1");
    }
    for w in seq.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return arg(format!("{} -> {} breaks the divisibility sequence", w[0], w[1]));
        }
    }
    Ok(seq)
}

fn meta(name: PrefixName, params: &Params) -> PrefixMeta {
    PrefixMeta { name: name.as_str().to_string(), params: params.clone() }
}

fn union_of(parts: &[FiniteSystem]) -> Result<Arc<FiniteSystem>> {
    let refs: Vec<&FiniteRelation> = parts.iter().map(|p| p.relation()).collect();
    Ok(Arc::new(FiniteSystem::new(disjoint_union_all(&refs)?)?))
}

fn trivial() -> Arc<FiniteSystem> {
    Arc::new(loop_system(1).expect("one-vertex loop"))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Dumbbell of the tree construction at level `n >= 2`.
pub fn tree_dumbbell(n: usize) -> DumbbellShape {
    DumbbellShape { n_in: factorial(n), l: 1 << (n + 1), m_out: factorial(n) }
}

/// Bonding table of the dumbbell tree from level `n + 1` to level `n`
/// (`n >= 2`), for one child dumbbell `child` (1-based), as images
/// relative to the start of the parent dumbbell, with the parent index.
fn tree_child_table(n: usize, child: usize) -> (usize, Vec<usize>) {
    let src = tree_dumbbell(n + 1);
    let dst = tree_dumbbell(n);
    let j = (child - 1) / 4 + 1;
    let r = (child - 1) % 4 + 1;
    let e_src = src.n_in + (1 << (n + 1));
    let (a, e, b) = (dst.n_in, dst.n_in + (1 << n), dst.n_in + (1 << (n + 1)));
    let table = match r {
        1 => onto_in_loop_table(src, dst, e_src, a).expect("n! divides (n+1)!"),
        2 | 3 => dumbbell_map_table(src, dst, e_src, e).expect("positions on paths").expect("tree inequalities hold"),
        _ => onto_out_loop_table(src, dst, e_src, b).expect("n! divides (n+1)!"),
    };
    (j, table)
}

fn dumbbell_tree(depth: usize, star: bool) -> Result<Tower> {
    let mut levels = vec![trivial()];
    let mut bonding = Vec::new();
    for n in 2..=depth {
        let count = 1usize << (2 * (n - 1));
        let sh = tree_dumbbell(n);
        let mut parts = Vec::with_capacity(count + 1);
        if star {
            parts.push(loop_system(1)?);
        }
        for _ in 0..count {
            parts.push(sh.system());
        }
        let lvl = union_of(&parts)?;
        let table = if n == 2 {
            vec![0; lvl.size()]
        } else {
            let off = usize::from(star);
            let parent = tree_dumbbell(n - 1);
            let mut t = Vec::with_capacity(lvl.size());
            if star {
                t.push(0);
            }
            for child in 1..=count {
                if star && child == 2 {
                    t.extend(std::iter::repeat_n(0, sh.size()));
                    continue;
                }
                let (j, rel) = tree_child_table(n - 1, child);
                let base = off + (j - 1) * parent.size();
                t.extend(rel.into_iter().map(|x| base + x));
            }
            t
        };
        levels.push(lvl);
        bonding.push(table);
    }
    Ok((levels, bonding))
}

fn thread_systems(depth: usize) -> Result<Tower> {
    let mut levels = vec![trivial()];
    let mut bonding = Vec::new();
    for n in 2..=depth {
        let len = 1usize << (n + 1);
        let words = 1usize << n;
        let size = len * words + 2;
        let right = size - 1;
        let v = |i: usize, w: usize| 1 + w * len + (i - 1);
        let mut e = vec![(0, 0), (right, right)];
        for w in 0..words {
            e.push((0, v(1, w)));
            for i in 1..len {
                e.push((v(i, w), v(i + 1, w)));
            }
            e.push((v(len, w), right));
        }
        let mut labels = vec!["L".to_string()];
        for w in 0..words {
            let word: String = (0..n).rev().map(|b| if (w >> b) & 1 == 0 { '1' } else { '2' }).collect();
            for i in 1..=len {
                labels.push(format!("({i},{word})"));
            }
        }
        labels.push("R".into());
        let lvl = Arc::new(FiniteSystem::new(FiniteRelation::new(size, e)?.with_labels(labels)?)?);
        let table = if n == 2 {
            vec![0; size]
        } else {
            let (plen, half) = (1usize << n, 1usize << (n - 1));
            let pright = plen * (words / 2) + 1;
            let mut t = vec![0usize; size];
            t[right] = pright;
            for w in 0..words {
                for i in 1..=len {
                    t[v(i, w)] = if i <= half {
                        0
                    } else if i <= half + plen {
                        1 + (w >> 1) * plen + (i - half - 1)
                    } else {
                        pright
                    };
                }
            }
            t
        };
        levels.push(lvl);
        bonding.push(table);
    }
    Ok((levels, bonding))
}

fn loop_doubling(depth: usize, k: &[u64], star: bool) -> Result<Tower> {
    let mut levels = Vec::new();
    let mut bonding = Vec::new();
    for n in 1..=depth {
        let kn = k[n - 1] as usize;
        let loops = 1usize << (n - 1);
        let star_here = star && n >= 2;
        let mut parts = Vec::new();
        if star_here {
            parts.push(loop_system(1)?);
        }
        for _ in 0..loops {
            parts.push(loop_system(kn)?);
        }
        let lvl = union_of(&parts)?;
        if n >= 2 {
            let kp = k[n - 2] as usize;
            let parent_loops = loops / 2;
            let parent_star = star && n >= 3;
            let poff = usize::from(parent_star);
            let off = usize::from(star_here);
            let mut t = vec![0usize; lvl.size()];
            for i in 0..loops {
                for x in 0..kn {
                    t[off + i * kn + x] = if parent_star && i == 0 { 0 } else { poff + (i % parent_loops) * kp + x % kp };
                }
            }
            bonding.push(t);
        }
        levels.push(lvl);
    }
    Ok((levels, bonding))
}

fn adding_machine(k: &[u64]) -> Result<Tower> {
    let levels = k.iter().map(|&kn| loop_system(kn as usize).map(Arc::new)).collect::<Result<Vec<_>>>()?;
    let bonding = k.windows(2).map(|w| (0..w[1] as usize).map(|x| x % w[0] as usize).collect()).collect();
    Ok((levels, bonding))
}

/// Wedge-level pairs `(M_n, N_n)` and the wrapping maps.
fn wedge_sequence(depth: usize, a: u64, b: u64, c: u64, d: u64) -> Result<Tower> {
    let pairs = wedge_pair_sequence(a, b, c, d, depth)?;
    let levels = pairs
        .iter()
        .map(|&(m, n)| wedge(n as usize, m as usize).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let mut bonding = Vec::new();
    for w in pairs.windows(2) {
        let (m, n) = (w[0].0 as usize, w[0].1 as usize);
        let (m2, n2) = (w[1].0 as usize, w[1].1 as usize);
        // Walk from the wedge point: `ins` circuits of the in-loop, then
        // `outs` circuits of the out-loop; entry s is the vertex s+1 steps on.
        let walk = |ins: u64, outs: u64| -> Vec<usize> {
            let mut v = Vec::new();
            for _ in 0..ins {
                v.extend(0..n);
            }
            for _ in 0..outs {
                v.extend(n..n + m - 1);
                v.push(n - 1);
            }
            v
        };
        let win = walk(d, c);
        let wout = walk(b, a);
        debug_assert_eq!(win.len(), n2);
        debug_assert_eq!(wout.len(), m2);
        let mut t = win;
        t.extend_from_slice(&wout[..m2 - 1]);
        bonding.push(t);
    }
    Ok((levels, bonding))
}

/// First `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Explicit levels of the prime-power loop construction; large depths
/// should use the loop-union form instead.
fn prime_power_loops(depth: usize, kk: usize) -> Result<Tower> {
    let ps = primes(kk * depth);
    let mut levels = vec![trivial()];
    let mut bonding = Vec::new();
    for n in 2..=depth {
        let lens: Vec<usize> = ps[..kk * n]
            .iter()
            .map(|&p| p.checked_pow(n as u32).map(|x| x as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Resource("prime power overflows".into()))?;
        let total: usize = kk + lens.iter().sum::<usize>();
        if total > 20_000_000 {
            return Err(Error::Resource(format!(
                "explicit level {n} would have {total} vertices; use the loop-union form"
            )));
        }
        let mut parts: Vec<FiniteSystem> = (0..kk).map(|_| loop_system(1)).collect::<Result<_>>()?;
        for &l in &lens {
            parts.push(loop_system(l)?);
        }
        let lvl = union_of(&parts)?;
        let mut t = Vec::with_capacity(lvl.size());
        if n == 2 {
            t.resize(lvl.size(), 0);
        } else {
            let plens: Vec<usize> = ps[..kk * (n - 1)].iter().map(|&p| p.pow((n - 1) as u32) as usize).collect();
            let mut starts = Vec::with_capacity(plens.len());
            let mut acc = kk;
            for &l in &plens {
                starts.push(acc);
                acc += l;
            }
            t.extend(std::iter::repeat_n(0, kk));
            for (i, &l) in lens.iter().enumerate() {
                if i < plens.len() {
                    t.extend((0..l).map(|x| starts[i] + x % plens[i]));
                } else {
                    let j = i - plens.len();
                    t.extend(std::iter::repeat_n(j, l));
                }
            }
        }
        levels.push(lvl);
        bonding.push(t);
    }
    Ok((levels, bonding))
}

/// Builds the named prefix to the given depth.
pub fn build_named_prefix(name: PrefixName, params: &Params, depth: usize) -> Result<ShimomuraPrefix> {
    if depth == 0 {
        return arg("depth must be positive");
    }
    let (levels, bonding) = match name {
        PrefixName::THM_4_04 => {
            check_params(params, &[])?;
            dumbbell_tree(depth, false)?
        }
        PrefixName::THM_4_08_STAR => {
            check_params(params, &[])?;
            dumbbell_tree(depth, true)?
        }
        PrefixName::PROP_4_05 => {
            check_params(params, &[])?;
            thread_systems(depth)?
        }
        PrefixName::THM_4_09 => {
            check_params(params, &["k", "star"])?;
            loop_doubling(depth, &divisibility_sequence(params, depth)?, param_bool(params, "star")?)?
        }
        PrefixName::THM_4_10 => {
            check_params(params, &["k"])?;
            adding_machine(&divisibility_sequence(params, depth)?)?
        }
        PrefixName::THM_4_15 => {
            check_params(params, &["a", "b", "c", "d"])?;
            let a = param_u64(params, "a", 1)?;
            let b = param_u64(params, "b", 1)?;
            let c = param_u64(params, "c", 1)?;
            let d = param_u64(params, "d", 2)?;
            wedge_sequence(depth, a, b, c, d)?
        }
        PrefixName::THM_4_16 => {
            check_params(params, &["word"])?;
            let word: SemigroupWord = params.get("word").map(String::as_str).unwrap_or(THM_4_16_WORD).parse()?;
            if !word.in_s_prime() {
                return arg(format!("wrap word {word} must start and end with e and contain at least two L's"));
            }
            return constant_word_prefix_with_meta(&word, depth, meta(name, params));
        }
        PrefixName::EXAMPLE_3 => {
            check_params(params, &["K"])?;
            let kk = param_u64(params, "K", 1)? as usize;
            if kk == 0 {
                return arg("K must be positive");
            }
            prime_power_loops(depth, kk)?
        }
    };
    ShimomuraPrefix::new(levels, bonding, meta(name, params))
}

/// Default wrap word for the pointed-loop construction: `ℓ(x) = 3 + 2x`,
/// which sends positions 1, 2, N'-1 and N' to 1.
pub const THM_4_16_WORD: &str = "eLLee";

//! Loops, dumbbells, wedges and pointed loops, with their rigid maps.
//!
//! Positions are 1-based in names and docs; the returned systems use the
//! usual 0-based storage, so position `p` is vertex `p - 1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::maps::SystemMap;
use crate::relation::{FiniteRelation, FiniteSystem};

/// `loop(n)`: translation by one on `ℤ/nℤ`.
pub fn loop_system(n: usize) -> Result<FiniteSystem> {
    if n == 0 {
        return arg("loop length must be positive");
    }
    FiniteSystem::new(FiniteRelation::new(n, (0..n).map(|i| (i, (i + 1) % n)))?)
}

/// In-loop length `n_in`, connecting path length `l`, out-loop length `m_out`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DumbbellShape {
    pub n_in: usize,
    pub l: usize,
    pub m_out: usize,
}

impl DumbbellShape {
    pub fn new(n_in: usize, l: usize, m_out: usize) -> Result<Self> {
        if n_in == 0 || m_out == 0 {
            return arg("dumbbell loop lengths must be positive");
        }
        Ok(DumbbellShape { n_in, l, m_out })
    }

    pub fn size(&self) -> usize {
        self.n_in + self.l + self.m_out - 1
    }

    pub fn is_wedge(&self) -> bool {
        self.l == 0
    }

    /// Positions of the connecting path, `[N, N + L]`.
    pub fn path(&self) -> std::ops::RangeInclusive<usize> {
        self.n_in..=self.n_in + self.l
    }

    pub fn out_start(&self) -> usize {
        self.n_in + self.l
    }

    /// 1-based edges: the chain `(i, i+1)` plus `(N, 1)` and
    /// `(N+L+M-1, N+L)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let last = self.size();
        let mut e: Vec<(usize, usize)> = (1..last).map(|i| (i, i + 1)).collect();
        e.push((self.n_in, 1));
        e.push((last, self.out_start()));
        e
    }

    pub fn system(&self) -> FiniteSystem {
        FiniteSystem::from_one_based(self.size(), &self.edges()).expect("dumbbell is surjective")
    }
}

impl fmt::Display for DumbbellShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}", self.n_in, self.l, self.m_out)
    }
}

pub fn dumbbell(shape: DumbbellShape) -> FiniteSystem {
    shape.system()
}

/// The `n-m` wedge, i.e. the `n-0-m` dumbbell.
pub fn wedge(n: usize, m: usize) -> Result<FiniteSystem> {
    Ok(DumbbellShape::new(n, 0, m)?.system())
}

/// Pointed loop of length `m`: `(i, i+1)` for `i < m`, plus `(1,1)` and `(m,1)`.
pub fn pointed_loop(m: usize) -> Result<FiniteSystem> {
    if m == 0 {
        return arg("pointed loop length must be positive");
    }
    let mut e: Vec<(usize, usize)> = (1..m).map(|i| (i, i + 1)).collect();
    e.push((1, 1));
    e.push((m, 1));
    FiniteSystem::from_one_based(m, &e)
}

/// Shape literals: `loop:N`, `dumbbell:N,L,M`, `wedge:N,M`, `pointed:M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeLiteral {
    Loop(usize),
    Dumbbell(DumbbellShape),
    Wedge(usize, usize),
    Pointed(usize),
}

impl ShapeLiteral {
    pub fn system(&self) -> Result<FiniteSystem> {
        match *self {
            ShapeLiteral::Loop(n) => loop_system(n),
            ShapeLiteral::Dumbbell(s) => Ok(s.system()),
            ShapeLiteral::Wedge(n, m) => wedge(n, m),
            ShapeLiteral::Pointed(m) => pointed_loop(m),
        }
    }
}

impl FromStr for ShapeLiteral {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("shape literal {s:?} lacks ':'")))?;
        let nums: Vec<usize> = rest
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Argument(format!("shape literal {s:?}: {e}")))?;
        let want = |k: usize| -> Result<()> {
            if nums.len() != k {
                return arg(format!("shape literal {s:?} needs {k} parameter(s)"));
            }
            if nums.contains(&0) && kind != "dumbbell" {
                return arg(format!("shape literal {s:?} needs positive parameters"));
            }
            Ok(())
        };
        match kind {
            "loop" => {
                want(1)?;
                Ok(ShapeLiteral::Loop(nums[0]))
            }
            "dumbbell" => {
                want(3)?;
                Ok(ShapeLiteral::Dumbbell(DumbbellShape::new(nums[0], nums[1], nums[2])?))
            }
            "wedge" => {
                want(2)?;
                Ok(ShapeLiteral::Wedge(nums[0], nums[1]))
            }
            "pointed" => {
                want(1)?;
                Ok(ShapeLiteral::Pointed(nums[0]))
            }
            _ => arg(format!("unknown shape kind {kind:?}")),
        }
    }
}

/// Why a dumbbell map does not exist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DumbbellObstruction {
    InLoopDivisibility { n_dst: usize, n_src: usize },
    OutLoopDivisibility { m_dst: usize, m_src: usize },
    PathTooShort { l_dst: usize, l_src: usize },
    LeftInequality { i_minus_n: usize, j_minus_n1: usize },
    RightInequality { right_src: usize, right_dst: usize },
}

/// The map sending path position `i` of `src` to path position `j` of `dst`
/// (1-based), or the condition that rules it out. Returns the 0-based table.
pub fn dumbbell_map_table(src: DumbbellShape, dst: DumbbellShape, i: usize, j: usize) -> Result<std::result::Result<Vec<usize>, DumbbellObstruction>> {
    if dst.l == 0 {
        return arg("target dumbbell needs a connecting path of positive length");
    }
    if !src.path().contains(&i) {
        return arg(format!("position {i} is not on the connecting path {:?} of {src}", src.path()));
    }
    if !dst.path().contains(&j) {
        return arg(format!("position {j} is not on the connecting path {:?} of {dst}", dst.path()));
    }
    let (n, l, m) = (src.n_in, src.l, src.m_out);
    let (n1, l1, m1) = (dst.n_in, dst.l, dst.m_out);
    if n % n1 != 0 {
        return Ok(Err(DumbbellObstruction::InLoopDivisibility { n_dst: n1, n_src: n }));
    }
    if m % m1 != 0 {
        return Ok(Err(DumbbellObstruction::OutLoopDivisibility { m_dst: m1, m_src: m }));
    }
    if l1 > l {
        return Ok(Err(DumbbellObstruction::PathTooShort { l_dst: l1, l_src: l }));
    }
    if i - n < j - n1 {
        return Ok(Err(DumbbellObstruction::LeftInequality { i_minus_n: i - n, j_minus_n1: j - n1 }));
    }
    if n + l - i < n1 + l1 - j {
        return Ok(Err(DumbbellObstruction::RightInequality { right_src: n + l - i, right_dst: n1 + l1 - j }));
    }
    // Positions a0..=b0 of src cover the connecting path of dst.
    let a0 = i + n1 - j;
    let b0 = i + (n1 + l1 - j);
    let table = (1..=src.size())
        .map(|x| {
            let p = if x < a0 {
                let d = a0 - x;
                (n1 - 1 + n1 * d - d) % n1 + 1
            } else if x <= b0 {
                x + j - i
            } else {
                n1 + l1 + (x - b0) % m1
            };
            p - 1
        })
        .collect();
    Ok(Ok(table))
}

/// Rigid map between dumbbells sending `i` to `j`, when it exists.
pub fn canonical_dumbbell_map(src: DumbbellShape, dst: DumbbellShape, i: usize, j: usize) -> Result<std::result::Result<SystemMap, DumbbellObstruction>> {
    Ok(match dumbbell_map_table(src, dst, i, j)? {
        Ok(t) => Ok(SystemMap::new(Arc::new(src.system()), Arc::new(dst.system()), t)?),
        Err(o) => Err(o),
    })
}

/// Map of a dumbbell onto the in-loop of `dst` sending src position `i`
/// to dst in-loop position `q` (0-based table onto the whole `dst`).
pub fn onto_in_loop_table(src: DumbbellShape, dst: DumbbellShape, i: usize, q: usize) -> Result<Vec<usize>> {
    if !src.n_in.is_multiple_of(dst.n_in) || !src.m_out.is_multiple_of(dst.n_in) {
        return arg(format!("in-loop {} does not divide both loops of {src}", dst.n_in));
    }
    let n1 = dst.n_in;
    Ok((1..=src.size()).map(|x| ((q - 1) as i64 + x as i64 - i as i64).rem_euclid(n1 as i64) as usize).collect())
}

/// Map of a dumbbell onto the out-loop of `dst` sending src position `i`
/// to dst out-loop position `q`.
pub fn onto_out_loop_table(src: DumbbellShape, dst: DumbbellShape, i: usize, q: usize) -> Result<Vec<usize>> {
    if !src.n_in.is_multiple_of(dst.m_out) || !src.m_out.is_multiple_of(dst.m_out) {
        return arg(format!("out-loop {} does not divide both loops of {src}", dst.m_out));
    }
    let (s, m1) = (dst.out_start(), dst.m_out as i64);
    Ok((1..=src.size())
        .map(|x| {
            let off = ((q - s) as i64 + x as i64 - i as i64).rem_euclid(m1) as usize;
            s + off - 1
        })
        .collect())
}

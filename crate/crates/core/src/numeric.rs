use serde::Serialize;

use crate::classify::gcd;
use crate::error::{arg, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MixtureBound {
    pub m: u64,
    pub n: u64,
    /// Least nonnegative `(x, y)` with `1 = x·m − y·n`.
    pub x: u64,
    pub y: u64,
    /// `m + (y·n + 1)·n`.
    pub paper_bound: u64,
    /// Least `K0` such that every `K >= K0` is `a·m + b·n` with `a, b >= 1`.
    pub exact_threshold: u64,
}

/// Whether `k = a·m + b·n` for some `a, b >= 1`.
pub fn is_positive_mixture(k: u64, m: u64, n: u64) -> bool {
    let mut a = 1;
    while a * m < k {
        if (k - a * m).is_multiple_of(n) {
            return true;
        }
        a += 1;
    }
    false
}

pub fn mixture_bound(m: u64, n: u64) -> Result<MixtureBound> {
    if m == 0 || n == 0 {
        return arg("mixture bound needs positive integers");
    }
    if gcd(m as usize, n as usize) != 1 {
        return arg(format!("{m} and {n} are not coprime"));
    }
    let x = (1..=n).find(|&x| (x * m) % n == 1 % n).expect("inverse exists for coprime pair");
    let y = (x * m - 1) / n;
    let paper_bound = m + (y * n + 1) * n;
    let mut exact_threshold = 1;
    for k in 1..paper_bound {
        if !is_positive_mixture(k, m, n) {
            exact_threshold = k + 1;
        }
    }
    Ok(MixtureBound { m, n, x, y, paper_bound, exact_threshold })
}

/// Pairs `(M_k, N_k)` from `(1, 1)` under `(M, N) ↦ (a·M + b·N, c·M + d·N)`.
pub fn wedge_pair_sequence(a: u64, b: u64, c: u64, d: u64, depth: usize) -> Result<Vec<(u64, u64)>> {
    if a == 0 || b == 0 || c == 0 || d == 0 {
        return arg("matrix entries must be positive");
    }
    let det = (a * d) as i128 - (b * c) as i128;
    if det.abs() != 1 {
        return arg(format!("matrix [[{a},{b}],[{c},{d}]] has determinant {det}, not ±1"));
    }
    let mut out = Vec::with_capacity(depth);
    let (mut mk, mut nk) = (1u64, 1u64);
    for k in 0..depth {
        if k > 0 {
            let next_m = a.checked_mul(mk).and_then(|p| b.checked_mul(nk).and_then(|q| p.checked_add(q)));
            let next_n = c.checked_mul(mk).and_then(|p| d.checked_mul(nk).and_then(|q| p.checked_add(q)));
            match (next_m, next_n) {
                (Some(x), Some(y)) => {
                    mk = x;
                    nk = y;
                }
                _ => return arg(format!("pair sequence overflows at step {}", k + 1)),
            }
        }
        debug_assert_eq!(gcd(mk as usize, nk as usize), 1);
        out.push((mk, nk));
    }
    Ok(out)
}

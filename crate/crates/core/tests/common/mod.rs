#![allow(dead_code)]

use findyn_core::relation::{FiniteRelation, FiniteSystem};
use findyn_core::words::{Letter, SemigroupWord};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each ordered pair is an edge with probability `p`.
pub fn random_relation(rng: &mut ChaCha8Rng, size: usize, p: f64) -> FiniteRelation {
    let mut edges = Vec::new();
    for a in 0..size {
        for b in 0..size {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    FiniteRelation::new(size, edges).unwrap()
}

/// Random edges plus a random permutation, so every vertex has a
/// successor and a predecessor.
pub fn random_system(rng: &mut ChaCha8Rng, size: usize, p: f64) -> FiniteSystem {
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(rng);
    let base = random_relation(rng, size, p);
    let edges: Vec<(usize, usize)> = base.edges().chain((0..size).map(|a| (a, perm[a]))).collect();
    FiniteSystem::new(FiniteRelation::new(size, edges).unwrap()).unwrap()
}

/// Relation on `size` vertices whose edge set is the bit pattern `code`.
pub fn relation_from_code(size: usize, code: u64) -> FiniteRelation {
    let edges = (0..size * size).filter(|k| code >> k & 1 == 1).map(|k| (k / size, k % size));
    FiniteRelation::new(size, edges).unwrap()
}

/// Least edge code over all vertex relabelings.
pub fn canonical_code(size: usize, code: u64) -> u64 {
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = u64::MAX;
    permute_all(&mut perm, 0, &mut |p| {
        let mut c = 0u64;
        for k in 0..size * size {
            if code >> k & 1 == 1 {
                let (a, b) = (p[k / size], p[k % size]);
                c |= 1 << (a * size + b);
            }
        }
        best = best.min(c);
    });
    best
}

fn permute_all(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute_all(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Random word with at least one `L`.
pub fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> SemigroupWord {
    loop {
        let len = rng.gen_range(1..=max_len);
        let letters: Vec<Letter> = (0..len).map(|_| if rng.gen_bool(0.5) { Letter::E } else { Letter::L }).collect();
        let w = SemigroupWord::new(letters);
        if w.in_s() {
            return w;
        }
    }
}

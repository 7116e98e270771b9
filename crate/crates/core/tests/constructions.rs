mod common;

use std::sync::Arc;

use findyn_core::classify::{basic_sets, classify, is_transitive};
use findyn_core::covers::{dumbbell_cover, loop_cover, loop_union_cover, wedge_mixing_threshold, wedge_representation_of_nonperiodic};
use findyn_core::maps::loop_period;
use findyn_core::numeric::{is_positive_mixture, mixture_bound, wedge_pair_sequence};
use findyn_core::relation::disjoint_union;
use findyn_core::shapes::{canonical_dumbbell_map, DumbbellObstruction};
use findyn_core::{dumbbell, enumerate_maps, loop_system, pointed_loop, wedge, DumbbellShape, FiniteRelation, FiniteSystem, MapCaps, MapMode, ShapeLiteral};
use proptest::prelude::*;

fn one_based(s: &FiniteSystem) -> Vec<(usize, usize)> {
    s.edges().map(|(a, b)| (a + 1, b + 1)).collect()
}

fn shape(n: usize, l: usize, m: usize) -> DumbbellShape {
    DumbbellShape::new(n, l, m).unwrap()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn shape_edge_sets() {
    let d = dumbbell(shape(2, 1, 2));
    assert_eq!(one_based(&d), vec![(1, 2), (2, 1), (2, 3), (3, 4), (4, 3)]);
    assert_eq!(pointed_loop(1).unwrap(), loop_system(1).unwrap());
    assert_eq!(one_based(&wedge(2, 3).unwrap()), vec![(1, 2), (2, 1), (2, 3), (3, 4), (4, 2)]);
    assert!(shape(2, 0, 3).is_wedge());
    assert!(DumbbellShape::new(0, 1, 1).is_err());
    assert_eq!(one_based(&pointed_loop(3).unwrap()), vec![(1, 1), (1, 2), (2, 3), (3, 1)]);
}

#[test]
fn shape_literals() {
    let cases = [
        ("loop:4", loop_system(4).unwrap()),
        ("dumbbell:2,1,2", dumbbell(shape(2, 1, 2))),
        ("wedge:2,3", wedge(2, 3).unwrap()),
        ("pointed:3", pointed_loop(3).unwrap()),
    ];
    for (lit, want) in cases {
        assert_eq!(lit.parse::<ShapeLiteral>().unwrap().system().unwrap(), want, "{lit}");
    }
    for bad in ["loop", "loop:0", "loop:1,2", "circle:3", "wedge:2", "dumbbell:0,1,1"] {
        assert!(bad.parse::<ShapeLiteral>().is_err(), "{bad}");
    }
}

#[test]
fn wedges_are_symmetric_up_to_isomorphism() {
    for n in 1..5 {
        for m in 1..5 {
            let a = Arc::new(wedge(n, m).unwrap());
            let b = Arc::new(wedge(m, n).unwrap());
            let iso = enumerate_maps(&a, &b, MapMode::Factor, &MapCaps::default()).unwrap();
            assert!(!iso.is_empty(), "{n}-{m}");
        }
    }
}

#[test]
fn wedge_and_dumbbell_classes() {
    for n in 1..7 {
        for m in 1..7 {
            let w = wedge(n, m).unwrap();
            let r = classify(&w, 10);
            let g = gcd(n, m);
            assert_eq!(r.mixing, g == 1, "{n}-{m}");
            assert_eq!(loop_period(&w), g);
            for l in 1..3 {
                let d = dumbbell(shape(n, l, m));
                assert!(!is_transitive(&d));
                let mut b = basic_sets(&d);
                b.sort();
                let inloop: Vec<usize> = (0..n).collect();
                let outloop: Vec<usize> = (n + l - 1..n + l + m - 1).collect();
                assert_eq!(b, vec![inloop, outloop]);
            }
        }
    }
}

#[test]
fn canonical_map_examples() {
    let m = canonical_dumbbell_map(shape(2, 3, 2), shape(2, 1, 2), 3, 3).unwrap().unwrap();
    assert!(m.is_factor());
    assert_eq!(m.table[2], 2);
    assert!(matches!(
        canonical_dumbbell_map(shape(2, 1, 2), shape(2, 2, 2), 2, 2).unwrap(),
        Err(DumbbellObstruction::PathTooShort { .. })
    ));
    assert!(matches!(
        canonical_dumbbell_map(shape(4, 1, 4), shape(3, 1, 3), 4, 3).unwrap(),
        Err(DumbbellObstruction::InLoopDivisibility { .. })
    ));
    assert!(canonical_dumbbell_map(shape(2, 1, 2), shape(2, 1, 2), 7, 2).is_err());
}

/// Every factor with `i -> j` found by brute-force enumeration.
fn factors_sending(src: DumbbellShape, dst: DumbbellShape, i: usize, j: usize) -> Vec<Vec<usize>> {
    let a = Arc::new(dumbbell(src));
    let b = Arc::new(dumbbell(dst));
    enumerate_maps(&a, &b, MapMode::Factor, &MapCaps::default())
        .unwrap()
        .into_iter()
        .filter(|m| m.table[i - 1] == j - 1)
        .map(|m| m.table)
        .collect()
}

#[test]
fn canonical_map_agrees_with_enumeration() {
    let mut shapes = Vec::new();
    for n in 1..=4 {
        for l in 0..=4 {
            for m in 1..=4 {
                if n + l + m - 1 <= 9 {
                    shapes.push(shape(n, l, m));
                }
            }
        }
    }
    let mut checked = 0;
    for &src in &shapes {
        for &dst in shapes.iter().filter(|d| d.l >= 1 && d.size() <= 6) {
            for i in src.path() {
                for j in dst.path() {
                    let found = factors_sending(src, dst, i, j);
                    match canonical_dumbbell_map(src, dst, i, j).unwrap() {
                        Ok(m) => {
                            assert!(found.contains(&m.table), "{src:?} {dst:?} {i} {j}");
                            if src.l == dst.l {
                                assert_eq!(found.len(), 1, "{src:?} {dst:?} {i} {j}");
                            }
                        }
                        Err(why) => assert!(found.is_empty(), "{src:?} {dst:?} {i} {j}: {why:?} vs {found:?}"),
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn longer_paths_admit_several_maps() {
    // The image may run once around the target in-loop before leaving it.
    let (src, dst) = (shape(2, 3, 2), shape(2, 1, 2));
    let found = factors_sending(src, dst, 2, 2);
    assert_eq!(found, vec![vec![0, 1, 0, 1, 2, 3], vec![0, 1, 2, 3, 2, 3]]);
    let m = canonical_dumbbell_map(src, dst, 2, 2).unwrap().unwrap();
    assert!(found.contains(&m.table));
}

#[test]
fn loop_cover_examples() {
    let l3 = Arc::new(loop_system(3).unwrap());
    let c = loop_cover(&l3).unwrap();
    assert_eq!(c.domain.size(), 3);
    assert!(c.is_factor());
    let w = Arc::new(wedge(2, 3).unwrap());
    let c = loop_cover(&w).unwrap();
    assert!(c.is_factor());
    assert!(c.domain.size() <= 2 * w.edge_count());
    let full = Arc::new(FiniteSystem::new(FiniteRelation::full(2).unwrap()).unwrap());
    assert!(loop_cover(&full).unwrap().is_factor());
    let d = Arc::new(dumbbell(shape(2, 1, 2)));
    assert!(matches!(loop_cover(&d), Err(findyn_core::Error::Precondition(_))));
}

#[test]
fn dumbbell_cover_examples() {
    for s in [loop_system(3).unwrap(), dumbbell(shape(2, 1, 2)), wedge(2, 3).unwrap()] {
        let s = Arc::new(s);
        let c = dumbbell_cover(&s).unwrap();
        assert!(c.map.is_factor());
        assert!(c.shapes.len() <= s.edge_count());
    }
}

#[test]
fn loop_union_cover_examples() {
    let u = Arc::new(FiniteSystem::new(disjoint_union(&loop_system(2).unwrap(), &loop_system(3).unwrap())).unwrap());
    let c = loop_union_cover(&u).unwrap();
    assert_eq!((c.loops, c.loop_length), (2, 6));
    assert!(c.map.is_factor());
    let d = Arc::new(dumbbell(shape(2, 1, 2)));
    assert!(matches!(loop_union_cover(&d), Err(findyn_core::Error::Precondition(_))));
}

#[test]
fn mixture_bound_examples() {
    let b = mixture_bound(3, 5).unwrap();
    assert_eq!((b.x, b.y, b.paper_bound, b.exact_threshold), (2, 1, 33, 16));
    assert_eq!(mixture_bound(2, 3).unwrap().exact_threshold, 7);
    for n in 1..10 {
        assert_eq!(mixture_bound(1, n).unwrap().exact_threshold, n + 1);
    }
    assert!(mixture_bound(4, 6).is_err());
    assert!(mixture_bound(0, 3).is_err());
}

#[test]
fn wedge_threshold_examples() {
    let one = Arc::new(loop_system(1).unwrap());
    let t = wedge_mixing_threshold(&one).unwrap();
    assert_eq!(t.k, 1);
    for (n, m) in [(1, 1), (2, 5), (4, 3)] {
        assert!(t.factor_from_wedge(n, m).unwrap().is_factor());
    }
    let w = Arc::new(wedge(2, 3).unwrap());
    let t = wedge_mixing_threshold(&w).unwrap();
    for (a, b) in [(0, 0), (1, 0), (0, 3), (2, 5), (7, 1)] {
        assert!(t.factor_from_wedge(t.k + a, t.k + b).unwrap().is_factor());
    }
    assert!(t.factor_from_wedge(t.k - 1, t.k).is_err());
    let full = Arc::new(FiniteSystem::new(FiniteRelation::full(3).unwrap()).unwrap());
    let t = wedge_mixing_threshold(&full).unwrap();
    for d in 0..4 {
        assert!(t.factor_from_wedge(t.k + d, t.k + 2 * d).unwrap().is_factor());
    }
    let l2 = Arc::new(loop_system(2).unwrap());
    assert!(wedge_mixing_threshold(&l2).is_err());
}

#[test]
fn pair_sequence_examples() {
    assert_eq!(wedge_pair_sequence(1, 1, 1, 2, 3).unwrap(), vec![(1, 1), (2, 3), (5, 8)]);
    assert!(wedge_pair_sequence(2, 1, 1, 2, 3).is_err());
    assert!(wedge_pair_sequence(0, 1, 1, 2, 3).is_err());
}

#[test]
fn nonperiodic_representation_examples() {
    let m = wedge_representation_of_nonperiodic(&Arc::new(loop_system(10).unwrap()), 3).unwrap().unwrap();
    assert!(m.is_factor());
    assert_eq!(*m.codomain, pointed_loop(3).unwrap());
    assert!(wedge_representation_of_nonperiodic(&Arc::new(loop_system(3).unwrap()), 5).unwrap().is_none());
    for k in 1..8 {
        let s = Arc::new(loop_system(k + 2).unwrap());
        assert!(wedge_representation_of_nonperiodic(&s, k).unwrap().unwrap().is_factor());
        let s = Arc::new(loop_system(k + 1).unwrap());
        assert!(wedge_representation_of_nonperiodic(&s, k).unwrap().is_none());
    }
    let w = Arc::new(wedge(2, 3).unwrap());
    assert!(wedge_representation_of_nonperiodic(&w, 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixture_threshold_is_sound(m in 1u64..30, n in 1u64..30) {
        prop_assume!(gcd(m as usize, n as usize) == 1);
        let b = mixture_bound(m, n).unwrap();
        prop_assert!(b.exact_threshold <= b.paper_bound);
        prop_assert_eq!(b.x * m, b.y * n + 1);
        for k in b.exact_threshold..b.paper_bound + 3 * (m + n) {
            prop_assert!(is_positive_mixture(k, m, n), "{k}");
        }
        if b.exact_threshold > 1 {
            prop_assert!(!is_positive_mixture(b.exact_threshold - 1, m, n));
        }
    }

    #[test]
    fn pair_sequences_stay_coprime(pick in 0usize..1000) {
        let unimodular: Vec<(u64, u64, u64, u64)> = (1..8u64)
            .flat_map(|a| (1..8u64).flat_map(move |b| (1..8u64).flat_map(move |c| (1..8u64).map(move |d| (a, b, c, d)))))
            .filter(|&(a, b, c, d)| (a * d).abs_diff(b * c) == 1)
            .collect();
        let (a, b, c, d) = unimodular[pick % unimodular.len()];
        let seq = wedge_pair_sequence(a, b, c, d, 10).unwrap();
        prop_assert_eq!(seq[0], (1, 1));
        for w in seq.windows(2) {
            prop_assert_eq!(gcd(w[1].0 as usize, w[1].1 as usize), 1);
            prop_assert!(w[1].0 > w[0].0 && w[1].1 > w[0].1);
        }
    }

    #[test]
    fn covers_are_factors(seed in any::<u64>(), size in 1usize..=7) {
        let mut g = common::rng(seed);
        let s = Arc::new(common::random_system(&mut g, size, 0.3));
        prop_assert!(dumbbell_cover(&s).unwrap().map.is_factor());
        if is_transitive(&s) {
            prop_assert!(loop_cover(&s).unwrap().is_factor());
        }
        if let Ok(c) = loop_union_cover(&s) {
            prop_assert!(c.map.is_factor());
        }
        if classify(&s, 4).mixing {
            let t = wedge_mixing_threshold(&s).unwrap();
            prop_assert!(t.factor_from_wedge(t.k, t.k + 1).unwrap().is_factor());
        }
    }
}

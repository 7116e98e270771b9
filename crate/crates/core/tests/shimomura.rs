mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use findyn_core::builders::{divisibility_sequence, parse_params, primes, tree_dumbbell, THM_4_16_WORD};
use findyn_core::classify::per_window;
use findyn_core::factoring::{check_factoring, search_factoring_counterexample, FactoringCaps};
use findyn_core::loop_union::{
    build_loop_union, enumerate_loop_factors, loop_factoring, loop_factoring_counterexample, verify_loop_factoring, LoopImage, LoopUnionPrefix,
};
use findyn_core::prefix::{limit_hitting, suspend_prefix, HitStatus, PrefixMeta};
use findyn_core::relation::fixed_set;
use findyn_core::word_hitting::{compressed_hitting, explicit_hitting};
use findyn_core::words::{constant_word_prefix, SemigroupWord};
use findyn_core::{build_named_prefix, loop_system, validate_prefix, Error, FiniteSystem, Params, PrefixName, ShimomuraPrefix};
use proptest::prelude::*;

fn params(items: &[&str]) -> Params {
    parse_params(items.iter().copied()).unwrap()
}

fn word(s: &str) -> SemigroupWord {
    s.parse().unwrap()
}

fn sizes(p: &ShimomuraPrefix) -> Vec<usize> {
    p.levels().iter().map(|l| l.size()).collect()
}

fn loop_prefix(k: &[usize]) -> ShimomuraPrefix {
    let levels = k.iter().map(|&x| Arc::new(loop_system(x).unwrap())).collect();
    let bonding = k.windows(2).map(|w| (0..w[1]).map(|x| x % w[0]).collect()).collect();
    ShimomuraPrefix::new(levels, bonding, PrefixMeta::default()).unwrap()
}

#[test]
fn adding_machine_validates() {
    let v = validate_prefix(&loop_prefix(&[1, 2, 6, 24])).unwrap();
    assert!(v.passes());
    assert!(v.pointed);
    for f in v.bifurcating.iter().chain(&v.shimomura).chain(&v.invertible) {
        assert_eq!(f.witness, Some(f.level + 1));
    }
}

#[test]
fn constant_word_prefix_validates() {
    let p = constant_word_prefix(&word("eLLe"), 4).unwrap();
    let v = validate_prefix(&p).unwrap();
    assert!(v.passes());
    for f in v.bifurcating.iter().chain(&v.shimomura).chain(&v.invertible) {
        assert_eq!(f.witness, Some(f.level + 1), "{f:?}");
    }
}

#[test]
fn singleton_fibers_leave_bifurcation_unresolved() {
    let v = validate_prefix(&loop_prefix(&[3, 3, 3])).unwrap();
    assert!(!v.bifurcating_to_depth());
    assert!(v.bifurcating.iter().all(|f| f.witness.is_none()));
    assert!(v.shimomura_to_depth());
    assert!(!v.pointed);
}

#[test]
fn non_factor_bonding_is_rejected() {
    let levels = vec![Arc::new(loop_system(2).unwrap()), Arc::new(loop_system(4).unwrap())];
    let e = ShimomuraPrefix::new(levels, vec![vec![0, 0, 1, 1]], PrefixMeta::default()).unwrap_err();
    assert!(matches!(e, Error::Validation(_)), "{e}");
    let one = vec![Arc::new(loop_system(1).unwrap())];
    let p = ShimomuraPrefix::new(one, vec![], PrefixMeta::default()).unwrap();
    assert!(validate_prefix(&p).is_err());
}

#[test]
fn composites_satisfy_the_cocycle_identity() {
    for name in PrefixName::ALL {
        let p = build_named_prefix(name, &Params::new(), 4).unwrap();
        for n in 1..=4 {
            for k in n..=4 {
                for m in k..=4 {
                    let pkn = p.composite(k, n);
                    let via: Vec<usize> = p.composite(m, k).iter().map(|&x| pkn[x]).collect();
                    assert_eq!(via, p.composite(m, n), "{name} {m} {k} {n}");
                }
            }
        }
        for n in 1..4 {
            assert!(p.bonding_map(n).is_factor(), "{name} {n}");
        }
    }
}

#[test]
fn named_builder_shapes() {
    let p = build_named_prefix(PrefixName::THM_4_10, &Params::new(), 5).unwrap();
    assert_eq!(sizes(&p), vec![1, 2, 6, 24, 120]);
    for n in 1..5 {
        let k = p.level(n).size();
        assert_eq!(p.bonding(n), (0..p.level(n + 1).size()).map(|x| x % k).collect::<Vec<_>>());
    }

    let p = build_named_prefix(PrefixName::THM_4_16, &Params::new(), 4).unwrap();
    assert_eq!(sizes(&p), vec![1, 5, 13, 29]);
    assert_eq!(p.meta.name, "THM_4_16");
    assert_eq!(THM_4_16_WORD, "eLLee");

    // One fixed point plus loops of length p_i^n, i <= n.
    let p = build_named_prefix(PrefixName::EXAMPLE_3, &params(&["K=1"]), 3).unwrap();
    let ps = primes(3);
    assert_eq!(ps, vec![2, 3, 5]);
    assert_eq!(sizes(&p), vec![1, 1 + 4 + 9, 1 + 8 + 27 + 125]);
    for n in 2..=3 {
        let l = p.level(n);
        assert_eq!(fixed_set(l).len(), 1);
        let lens: BTreeSet<usize> = ps[..n].iter().map(|&q| (q as usize).pow(n as u32)).collect();
        let mut per = per_window(l, 200);
        per.remove(&1);
        for len in &lens {
            assert!(per.contains(len));
        }
    }

    for n in 2..5 {
        let d = tree_dumbbell(n);
        let f: usize = (1..=n).product();
        assert_eq!((d.n_in, d.l, d.m_out), (f, 1 << (n + 1), f));
    }
    let p = build_named_prefix(PrefixName::THM_4_04, &Params::new(), 3).unwrap();
    assert_eq!(sizes(&p), vec![1, 4 * tree_dumbbell(2).size(), 16 * tree_dumbbell(3).size()]);
    let s = build_named_prefix(PrefixName::THM_4_08_STAR, &Params::new(), 3).unwrap();
    assert_eq!(sizes(&s), vec![1, 1 + 4 * tree_dumbbell(2).size(), 1 + 16 * tree_dumbbell(3).size()]);
}

#[test]
fn thread_levels() {
    let p = build_named_prefix(PrefixName::PROP_4_05, &Params::new(), 4).unwrap();
    assert_eq!(p.level(1).size(), 1);
    for n in 2..=4 {
        let l = p.level(n);
        let last = l.size() - 1;
        assert_eq!(fixed_set(l), BTreeSet::from([0, last]), "level {n}");
        let threads = (l.size() - 2) >> (n + 1);
        assert_eq!(threads << (n + 1), l.size() - 2);
        assert_eq!(threads, 1 << n, "level {n}");
    }
}

#[test]
fn builder_parameter_errors() {
    assert!(build_named_prefix(PrefixName::THM_4_10, &params(&["k=1,2,5"]), 3).is_err());
    assert!(build_named_prefix(PrefixName::THM_4_10, &params(&["k=2,4"]), 2).is_err());
    assert!(build_named_prefix(PrefixName::THM_4_15, &params(&["a=2", "b=1", "c=1", "d=2"]), 3).is_err());
    assert!(build_named_prefix(PrefixName::THM_4_16, &params(&["word=eLe"]), 3).is_err());
    assert!(build_named_prefix(PrefixName::THM_4_04, &params(&["K=2"]), 3).is_err());
    assert!(build_named_prefix(PrefixName::EXAMPLE_3, &params(&["K=0"]), 3).is_err());
    assert!(parse_params(["novalue"]).is_err());
    assert_eq!(divisibility_sequence(&params(&["k=pow2"]), 4).unwrap(), vec![1, 2, 4, 8]);
    assert_eq!(divisibility_sequence(&Params::new(), 4).unwrap(), vec![1, 2, 6, 24]);
    assert_eq!("thm_4_10".parse::<PrefixName>().unwrap(), PrefixName::THM_4_10);
    assert!("THM_9_99".parse::<PrefixName>().is_err());
}

#[test]
fn invertible_builders_give_pm_lifts() {
    for name in [PrefixName::THM_4_04, PrefixName::THM_4_09, PrefixName::THM_4_16] {
        let p = build_named_prefix(name, &Params::new(), 4).unwrap();
        for n in 1..4 {
            assert!(p.lift(n + 1, n).is_pm, "{name} {n}");
        }
    }
}

#[test]
fn trivial_factoring() {
    let p = build_named_prefix(PrefixName::THM_4_10, &Params::new(), 5).unwrap();
    for (k, n) in [(3, 2), (4, 2), (4, 3)] {
        let q1 = p.composite_map(k, n);
        let out = check_factoring(&p, &q1, k, n, 5, &FactoringCaps::default()).unwrap();
        assert!(out.factors());
    }
    let q1 = p.composite_map(3, 2);
    assert!(check_factoring(&p, &q1, 3, 2, 9, &FactoringCaps::default()).is_err());
    assert!(check_factoring(&p, &q1, 2, 3, 5, &FactoringCaps::default()).is_err());
}

#[test]
fn dumbbell_tree_has_no_small_counterexample() {
    let p = build_named_prefix(PrefixName::THM_4_04, &Params::new(), 3).unwrap();
    let caps = FactoringCaps { q1: findyn_core::MapCaps { max_domain: 64, max_codomain: 64, max_nodes: 20_000_000 }, ..Default::default() };
    let r = search_factoring_counterexample(&p, 2, 1, 3, &caps).unwrap();
    assert!(r.counterexample.is_none());
    assert!(r.q1_checked >= 1);
}

#[test]
fn example_three_dichotomy() {
    let k2 = build_loop_union(PrefixName::EXAMPLE_3, &params(&["K=2"]), 5).unwrap().unwrap();
    let r = loop_factoring_counterexample(&k2, 3, 2, 5, 100_000).unwrap();
    let q1 = r.counterexample.expect("K = 2 has a counterexample");
    assert!(loop_factoring(&k2, &q1, 5).unwrap().is_none());
    let k1 = build_loop_union(PrefixName::EXAMPLE_3, &params(&["K=1"]), 5).unwrap().unwrap();
    let r = loop_factoring_counterexample(&k1, 3, 2, 5, 100_000).unwrap();
    assert!(r.counterexample.is_none());
    for q1 in enumerate_loop_factors(&k1, 3, 2, 1000).unwrap() {
        let f = loop_factoring(&k1, &q1, 5).unwrap().unwrap();
        assert!(verify_loop_factoring(&k1, &q1, &f));
    }
    assert!(build_loop_union(PrefixName::THM_4_04, &Params::new(), 3).unwrap().is_none());
}

#[test]
fn symbolic_and_explicit_forms_agree() {
    for name in [PrefixName::THM_4_10, PrefixName::THM_4_09, PrefixName::EXAMPLE_3] {
        let sym = build_loop_union(name, &Params::new(), 3).unwrap().unwrap();
        let exp = sym.to_explicit(1 << 20).unwrap();
        let direct = build_named_prefix(name, &Params::new(), 3).unwrap();
        assert_eq!(sizes(&exp), sizes(&direct), "{name}");
        for n in 1..=3 {
            assert_eq!(sym.level_size(n), exp.level(n).size() as u128);
        }
    }
    let p = build_loop_union(PrefixName::THM_4_10, &Params::new(), 3).unwrap().unwrap();
    assert!(matches!(p.to_explicit(5), Err(Error::Resource(_))));
}

/// Random symbolic prefix of depth 3 with small loops.
fn random_loop_prefix(seed: u64) -> LoopUnionPrefix {
    use rand::Rng;
    let mut g = common::rng(seed);
    let choices = [1u64, 2, 3];
    let mut levels: Vec<Vec<u64>> = vec![(0..g.gen_range(1..=2)).map(|_| choices[g.gen_range(0..3)]).collect()];
    let mut bonding = Vec::new();
    for _ in 1..3 {
        let prev = levels.last().unwrap().clone();
        let mut lv = Vec::new();
        let mut b = Vec::new();
        // Every previous loop gets at least one preimage, plus up to two extra.
        let extra = g.gen_range(0..=2);
        let targets: Vec<usize> = (0..prev.len()).chain((0..extra).map(|_| g.gen_range(0..prev.len()))).collect();
        for t in targets {
            let mult = g.gen_range(1..=2);
            let len = prev[t] * mult;
            lv.push(len);
            b.push(LoopImage { target: t, phase: g.gen_range(0..prev[t]) });
        }
        levels.push(lv);
        bonding.push(b);
    }
    LoopUnionPrefix::new(levels, bonding, PrefixMeta::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn explicit_and_symbolic_factoring_agree(seed in any::<u64>()) {
        let sym = random_loop_prefix(seed);
        let exp = sym.to_explicit(64).unwrap();
        let caps = FactoringCaps { q1: findyn_core::MapCaps { max_domain: 64, max_codomain: 64, max_nodes: 20_000_000 }, ..Default::default() };
        let e = search_factoring_counterexample(&exp, 2, 1, 3, &caps).unwrap();
        let s = loop_factoring_counterexample(&sym, 2, 1, 3, 100_000).unwrap();
        prop_assert_eq!(e.counterexample.is_some(), s.counterexample.is_some(), "{:?}", sym);
    }

    #[test]
    fn hitting_is_monotone_in_depth(n in 1usize..=2, i in 0usize..5, j in 0usize..5, t_word in 0usize..3) {
        let w = ["eLLe", "eLeLe", "eLLLe"][t_word];
        let p = constant_word_prefix(&word(w), 5).unwrap();
        let size = p.level(n).size();
        let (i, j) = (i % size, j % size);
        let mut prev: Option<BTreeSet<usize>> = None;
        for d in n..=5 {
            let q = p.truncate(d).unwrap();
            let present: BTreeSet<usize> = limit_hitting(&q, n, i, j, 40).unwrap().present().into_iter().collect();
            if let Some(before) = &prev {
                prop_assert!(present.is_subset(before));
            }
            prev = Some(present);
        }
    }

    #[test]
    fn suspension_preserves_flags(pick in 0usize..8, fold in 1usize..=3) {
        let name = PrefixName::ALL[pick];
        let p = build_named_prefix(name, &Params::new(), 3).unwrap();
        let s = suspend_prefix(&p, fold).unwrap();
        let (v, vs) = (validate_prefix(&p).unwrap(), validate_prefix(&s).unwrap());
        prop_assert_eq!(v.bifurcating_to_depth(), vs.bifurcating_to_depth());
        prop_assert_eq!(v.shimomura_to_depth(), vs.shimomura_to_depth());
        prop_assert_eq!(v.invertible_to_depth(), vs.invertible_to_depth());
        for n in 1..=3 {
            prop_assert_eq!(s.level(n).size(), fold * p.level(n).size());
            let h = 12 * fold;
            let want: BTreeSet<usize> = per_window(p.level(n), h / fold).into_iter().map(|k| k * fold).collect();
            prop_assert_eq!(per_window(s.level(n), h), want);
        }
    }
}

#[test]
fn suspending_the_point() {
    let p = loop_prefix(&[1, 1, 1]);
    let s = suspend_prefix(&p, 3).unwrap();
    for n in 1..=3 {
        assert_eq!(**s.level(n), loop_system(3).unwrap());
    }
    assert_eq!(s.meta.params.get("suspension").map(String::as_str), Some("3"));
    assert!(suspend_prefix(&p, 0).is_err());
}

#[test]
fn hitting_on_the_pointed_level() {
    let p = constant_word_prefix(&word("eLLe"), 5).unwrap();
    let t = limit_hitting(&p, 1, 0, 0, 30).unwrap();
    assert_eq!(t.present(), (1..=30).collect::<Vec<_>>());
}

#[test]
fn hitting_parity_for_e_lle() {
    // At depth d a walk through the fixed point closes up for every
    // t >= N_3 + 2 (d - 3), so parity is exact only below that bound.
    let w = word("eLLe");
    let d = 6;
    let p = constant_word_prefix(&w, d).unwrap();
    assert_eq!(p.level(3).size(), 10);
    let bound = 10 + 2 * (d - 3);
    for i in 3..10 {
        let same = limit_hitting(&p, 3, i - 1, i - 1, bound - 1).unwrap();
        let back = limit_hitting(&p, 3, i - 1, i - 2, bound - 1).unwrap();
        assert!(same.present().iter().all(|t| t % 2 == 0), "i = {i}");
        assert!(back.present().iter().all(|t| t % 2 == 1), "i = {i}");
        assert!(!same.present().is_empty() && !back.present().is_empty());
    }
    // Deep enough, the compressed route certifies the whole window.
    let horizon = 40;
    let deep = 3 + horizon / 2 + 2;
    for i in 3..10 {
        let same = compressed_hitting(&w, 3, i, i, horizon, deep).unwrap();
        let back = compressed_hitting(&w, 3, i, i - 1, horizon, deep).unwrap();
        for t in 1..=horizon {
            assert!(!(same[t - 1].is_present() && back[t - 1].is_present()), "i = {i}, t = {t}");
            if t % 2 == 1 {
                assert!(!same[t - 1].is_present());
            } else {
                assert!(!back[t - 1].is_present());
            }
        }
    }
}

#[test]
fn compressed_and_explicit_hitting_agree() {
    for w in ["eLLe", "eLeLe", "eLLLe", "eLeLLe"] {
        let w = word(w);
        for depth in 3..=5 {
            for n in 1..=2 {
                let size = constant_word_prefix(&w, n).unwrap().level(n).size();
                for i in 1..=size {
                    for j in 1..=size {
                        let a = compressed_hitting(&w, n, i, j, 30, depth).unwrap();
                        let b = explicit_hitting(&w, n, i, j, 30, depth).unwrap();
                        assert_eq!(a, b, "{w} n={n} depth={depth} ({i},{j})");
                    }
                }
            }
        }
    }
}

#[test]
fn hitting_on_adding_machine_loops() {
    let p = loop_prefix(&[1, 2, 6, 24, 120]);
    for n in 1..=4 {
        let k = p.level(n).size();
        let t = limit_hitting(&p, n, 0, 0, 60).unwrap();
        assert_eq!(t.present(), (1..=60).filter(|x| x % k == 0).collect::<Vec<_>>(), "level {n}");
        for x in t.absent() {
            assert!(matches!(t.status[x - 1], HitStatus::AbsentCertified { level } if level == n));
        }
    }
    assert!(limit_hitting(&p, 6, 0, 0, 5).is_err());
    assert!(limit_hitting(&p, 2, 5, 0, 5).is_err());
}

#[test]
fn suspended_level_sizes() {
    let base = Arc::new(FiniteSystem::new(findyn_core::FiniteRelation::full(2).unwrap()).unwrap());
    let q = ShimomuraPrefix::new(vec![Arc::new(loop_system(1).unwrap()), base], vec![vec![0, 0]], PrefixMeta::default()).unwrap();
    let s = suspend_prefix(&q, 2).unwrap();
    assert_eq!(sizes(&s), vec![2, 4]);
    assert!(s.bonding_map(1).is_factor());
}

//! Named check bundles for `findyn verify`.

use std::collections::BTreeSet;
use std::sync::Arc;

use findyn_core::builders::{build_named_prefix, parse_params, PrefixName};
use findyn_core::classify::{is_recurrent, is_transitive, loop_period, mixing_by_matrix_powers, per_window};
use findyn_core::covers::{dumbbell_cover, loop_cover};
use findyn_core::factoring::{search_factoring_counterexample, FactoringCaps};
use findyn_core::loop_union::{build_loop_union, loop_factoring, loop_factoring_counterexample, verify_loop_factoring, LoopAssignment};
use findyn_core::maps::{enumerate_maps, lift_verdict};
use findyn_core::numeric::{is_positive_mixture, mixture_bound};
use findyn_core::relation::{periodic_extension_check, power, suspension, suspension_index, FiniteRelation, FiniteSystem};
use findyn_core::search::{MapCaps, MapMode};
use findyn_core::shapes::{loop_system, DumbbellShape};
use findyn_core::word_hitting::{mixing_evidence, weak_mixing_obstruction};
use findyn_core::words::{compose_words, level_sizes, word_table, Letter, SemigroupWord};
use findyn_core::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{Context, Outcome};

type Formula = (&'static str, fn(u32) -> u64);

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: detail.into() }
}

type Suite = (&'static str, &'static str, fn() -> Vec<Check>);

const SUITES: [Suite; 10] = [
    ("lemma-4-03", "loop-to-loop map counts and dumbbell rigidity", loop_maps),
    ("prop-4-01", "dumbbell and loop covers of every small surjective relation", covers),
    ("mixing-oracle", "matrix-power mixing against transitivity with loop period 1", mixing_oracle),
    ("thm-4-19", "word length formulas, non-weak-mixing certificate, mixing evidence", words),
    ("thm-4-10", "factoring dichotomy for the adding machine and its variant", factoring),
    ("lemma-4-12", "positive-mixture bound", mixture),
    ("suspension", "suspension identity, period scaling and double suspension", suspensions),
    ("word-homomorphism", "word composition against map composition", word_homomorphism),
    ("periodic-window", "admissible words extend to cyclic words", periodic_window),
    ("builders", "named constructions: factor bonding and ±lifts", builders),
];

const SEED: u64 = 20_241;

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

fn wide_caps() -> MapCaps {
    MapCaps { max_domain: 16, max_codomain: 16, max_nodes: 50_000_000 }
}

pub fn run(ctx: &mut Context, name: &str) -> Result<Outcome> {
    if name == "list" {
        let list: Vec<Value> = SUITES.iter().map(|(n, about, _)| json!({ "suite": n, "about": about })).collect();
        return Ok(Outcome::ok(json!({ "suites": list })));
    }
    let chosen: Vec<&Suite> = match name {
        "all" => SUITES.iter().collect(),
        _ => SUITES.iter().filter(|s| s.0 == name).collect(),
    };
    if chosen.is_empty() {
        let known: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
        return Err(Error::Argument(format!("unknown suite {name:?}; known: all, list, {}", known.join(", "))));
    }
    ctx.cap("seed", json!(SEED));
    ctx.cap("maps", json!(wide_caps()));
    ctx.cap("factoring", json!(FactoringCaps::default()));
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (suite, _, f) in chosen {
        for c in f() {
            if !c.passed {
                failed.push(json!({ "suite": suite, "check": c.name, "detail": c.detail }));
            }
            rows.push(json!({ "suite": suite, "check": c.name, "pass": c.passed, "detail": c.detail }));
        }
    }
    let passed = failed.is_empty();
    let witness = (!passed).then(|| json!(failed));
    Ok(Outcome::check(passed, json!({ "checks": rows }), witness))
}

fn joined(bad: &[String], ok: String) -> String {
    if bad.is_empty() {
        ok
    } else {
        bad.join("; ")
    }
}

fn loop_maps() -> Vec<Check> {
    let mut bad = Vec::new();
    for m in 1..=10 {
        for k in 1..=10 {
            let (a, b) = (Arc::new(loop_system(m).unwrap()), Arc::new(loop_system(k).unwrap()));
            let maps = enumerate_maps(&a, &b, MapMode::All, &wide_caps()).unwrap();
            let want = if m % k == 0 { k } else { 0 };
            if maps.len() != want || !maps.iter().all(|f| f.is_surjective()) {
                bad.push(format!("loop({m}) -> loop({k}): {} maps", maps.len()));
            }
        }
    }
    let counts = check("loop map counts", bad.is_empty(), joined(&bad, "100 pairs, K maps when K | M, else none".into()));
    let mut bad = Vec::new();
    let mut shapes = 0;
    for n in 1..=4 {
        for l in 1..=3 {
            for m in 1..=4 {
                let sh = DumbbellShape::new(n, l, m).unwrap();
                let s = Arc::new(sh.system());
                let maps = enumerate_maps(&s, &s, MapMode::Surjective, &wide_caps()).unwrap();
                shapes += 1;
                if maps.len() != 1 || maps[0].table != (0..s.size()).collect::<Vec<_>>() {
                    bad.push(format!("{sh}: {} surjective self-maps", maps.len()));
                }
            }
        }
    }
    vec![counts, check("dumbbell rigidity", bad.is_empty(), joined(&bad, format!("{shapes} shapes, identity only")))]
}

fn relation_from_code(size: usize, code: u64) -> FiniteRelation {
    let edges = (0..size * size).filter(|k| code >> k & 1 == 1).map(|k| (k / size, k % size));
    FiniteRelation::new(size, edges).unwrap()
}

/// Least edge code over all relabelings.
fn canonical_code(size: usize, code: u64, perms: &[Vec<usize>]) -> u64 {
    perms
        .iter()
        .map(|p| (0..size * size).filter(|k| code >> k & 1 == 1).fold(0u64, |c, k| c | 1 << (p[k / size] * size + p[k % size])))
        .min()
        .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn covers() -> Vec<Check> {
    let (mut classes, mut transitive) = (0, 0);
    let mut bad = Vec::new();
    for size in 1..=4usize {
        let perms = permutations(size);
        let mut seen = BTreeSet::new();
        for code in 0..(1u64 << (size * size)) {
            let canon = canonical_code(size, code, &perms);
            if !seen.insert(canon) {
                continue;
            }
            let Ok(s) = FiniteSystem::new(relation_from_code(size, canon)) else { continue };
            classes += 1;
            let s = Arc::new(s);
            if !dumbbell_cover(&s).is_ok_and(|c| c.map.is_factor()) {
                bad.push(format!("dumbbell cover of {s}"));
            }
            if is_transitive(&s) {
                transitive += 1;
                if !loop_cover(&s).is_ok_and(|m| m.is_factor()) {
                    bad.push(format!("loop cover of {s}"));
                }
            }
        }
    }
    vec![check("covers are factors", bad.is_empty(), joined(&bad, format!("{classes} surjective classes, {transitive} transitive")))]
}

fn random_relation(rng: &mut ChaCha8Rng, size: usize, p: f64) -> FiniteRelation {
    let edges: Vec<(usize, usize)> = (0..size * size).map(|k| (k / size, k % size)).filter(|_| rng.gen_bool(p)).collect();
    FiniteRelation::new(size, edges).unwrap()
}

fn random_system(rng: &mut ChaCha8Rng, size: usize, p: f64) -> FiniteSystem {
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(rng);
    let base = random_relation(rng, size, p);
    let edges: Vec<(usize, usize)> = base.edges().chain((0..size).map(|a| (a, perm[a]))).collect();
    FiniteSystem::new(FiniteRelation::new(size, edges).unwrap()).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> SemigroupWord {
    loop {
        let len = rng.gen_range(1..=max_len);
        let w = SemigroupWord::new((0..len).map(|_| if rng.gen_bool(0.5) { Letter::E } else { Letter::L }).collect());
        if w.in_s() {
            return w;
        }
    }
}

fn mixing_oracle() -> Vec<Check> {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut compare = |r: &FiniteRelation| {
        checked += 1;
        if mixing_by_matrix_powers(r).0 != (is_transitive(r) && loop_period(r) == 1) {
            bad.push(format!("{r}"));
        }
    };
    for size in 1..=3usize {
        for code in 0..(1u64 << (size * size)) {
            compare(&relation_from_code(size, code));
        }
    }
    let mut g = rng(4);
    for k in 0..10_000 {
        let p = g.gen_range(0.1..0.5);
        compare(&random_relation(&mut g, 4 + k % 5, p));
    }
    vec![check("mixing oracles agree", bad.is_empty(), format!("{checked} relations, {} disagreements", bad.len()))]
}

fn words() -> Vec<Check> {
    let cases: [Formula; 4] = [
        ("eLLe", |n| 3 * 2u64.pow(n - 1) - 2),
        ("eLeLLe", |n| (5 * 3u64.pow(n - 1) - 3) / 2),
        ("eLLLe", |n| 2 * 3u64.pow(n - 1) - 1),
        ("eLeLe", |n| 2u64.pow(n + 1) - 3),
    ];
    let mut bad = Vec::new();
    for (w, f) in cases {
        let sizes = level_sizes(&w.parse().unwrap(), 12).unwrap();
        bad.extend((1..=12u32).filter(|&n| sizes[n as usize - 1] != f(n)).map(|n| format!("{w} level {n}")));
    }
    let formulas = check("length formulas", bad.is_empty(), joined(&bad, "4 words, levels 1 to 12".into()));

    let mut ok = true;
    let mut notes = Vec::new();
    for w in ["eLLe", "eLeLe"] {
        let word: SemigroupWord = w.parse().unwrap();
        let rep = weak_mixing_obstruction(&word, 3, 200, 9).unwrap();
        let open: usize = rep.rows.iter().map(|r| r.unresolved.len()).sum();
        let deep = weak_mixing_obstruction(&word, 3, 200, 120).unwrap();
        let needed = deep.certifying_depth().map_or("beyond 120".to_string(), |d| d.to_string());
        ok &= rep.certified();
        notes.push(format!("{w}: {open} open (i, t) pairs at depth 9, certified from depth {needed}"));
    }
    let certificate = check("non-weak-mixing certificate at depth 9", ok, notes.join("; "));

    let a: SemigroupWord = "eLeLLe".parse().unwrap();
    let ra = mixing_evidence(&a, 2, None, 100, 8).unwrap();
    let b: SemigroupWord = "eLLLe".parse().unwrap();
    let n2 = level_sizes(&b, 2).unwrap()[1] as usize;
    let rb = mixing_evidence(&b, 2, Some(2 * n2 + 2), 100, 8).unwrap();
    let evidence = check(
        "mixing evidence",
        ra.all_present() && rb.all_present(),
        format!("eLeLLe from {}, eLLLe from {}, window 100, depth 8", ra.from, rb.from),
    );
    vec![formulas, certificate, evidence]
}

fn factoring() -> Vec<Check> {
    let mut out = Vec::new();
    let am = build_named_prefix(PrefixName::THM_4_10, &Default::default(), 6).unwrap();
    for k in [3, 4] {
        let s = search_factoring_counterexample(&am, k, 2, 6, &FactoringCaps::default()).unwrap();
        let ok = s.counterexample.is_none() && s.q1_checked > 0;
        out.push(check(if k == 3 { "adding machine (3,2)" } else { "adding machine (4,2)" }, ok, format!("{} q1 checked", s.q1_checked)));
    }
    for kk in [2, 1] {
        let params = parse_params([format!("K={kk}").as_str()]).unwrap();
        let p = build_loop_union(PrefixName::EXAMPLE_3, &params, 6).unwrap().unwrap();
        let s = loop_factoring_counterexample(&p, 3, 2, 6, 1_000_000).unwrap();
        let mut ok = s.counterexample.is_some() == (kk == 2);
        if let Some(q1) = &s.counterexample {
            ok &= loop_factoring(&p, q1, 6).unwrap().is_none();
            let canon = LoopAssignment { k: 3, n: 2, assign: p.composite(3, 2).iter().map(|x| x.target).collect() };
            ok &= loop_factoring(&p, &canon, 6).unwrap().is_some_and(|f| verify_loop_factoring(&p, &canon, &f));
        }
        let name = if kk == 2 { "variant K=2 has a counterexample" } else { "variant K=1 has none" };
        out.push(check(name, ok, format!("{} q1 checked", s.q1_checked)));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mixture() -> Vec<Check> {
    let b = mixture_bound(3, 5).unwrap();
    let exact = check(
        "(3,5) bound",
        b.paper_bound == 33 && b.exact_threshold == 16,
        format!("bound {}, exact threshold {}", b.paper_bound, b.exact_threshold),
    );
    let mut g = rng(9);
    let mut pairs = Vec::new();
    let mut ok = true;
    while pairs.len() < 10 {
        let (m, n) = (g.gen_range(1..=20u64), g.gen_range(1..=20u64));
        if gcd(m, n) != 1 {
            continue;
        }
        let mb = mixture_bound(m, n).unwrap();
        ok &= (mb.paper_bound..mb.paper_bound + m * n + m).all(|k| is_positive_mixture(k, m, n));
        ok &= mb.exact_threshold <= mb.paper_bound;
        pairs.push(format!("({m},{n})"));
    }
    vec![exact, check("random coprime pairs", ok, pairs.join(" "))]
}

fn suspensions() -> Vec<Check> {
    let mut g = rng(10);
    let (mut identity, mut scaling, mut double) = (0, 0, 0);
    for _ in 0..500 {
        let size = g.gen_range(1..=5);
        let nn = g.gen_range(1..=4);
        let s = random_system(&mut g, size, 0.3);
        let sus = suspension(&s, nn).unwrap();
        let pw = power(&sus, nn);
        for a in 0..size {
            for b in 0..size {
                for i in 1..=nn {
                    for j in 1..=nn {
                        let want = s.has_edge(a, b) && i == j;
                        identity += (pw.has_edge(suspension_index(a, i, nn), suspension_index(b, j, nn)) != want) as usize;
                    }
                }
            }
        }
        let scaled: BTreeSet<usize> = per_window(&s, 12).into_iter().map(|t| t * nn).collect();
        scaling += (per_window(&sus, 12 * nn) != scaled) as usize;
        let mm = g.gen_range(1..=3);
        let twice = suspension(&suspension(&s, mm).unwrap(), nn).unwrap();
        let once = suspension(&s, mm * nn).unwrap();
        let relabel = |v: usize| {
            let (inner, j) = (v / nn, v % nn + 1);
            let (x, i) = (inner / mm, inner % mm + 1);
            suspension_index(x, j + nn * (i - 1), mm * nn)
        };
        let moved = FiniteRelation::new(twice.size(), twice.edges().map(|(a, b)| (relabel(a), relabel(b)))).unwrap();
        double += (moved != *once.relation()) as usize;
    }
    vec![
        check("N-th power of the suspension", identity == 0, format!("500 systems, {identity} failures")),
        check("period scaling", scaling == 0, format!("500 systems, {scaling} failures")),
        check("double suspension", double == 0, format!("500 systems, {double} failures")),
    ]
}

fn word_homomorphism() -> Vec<Check> {
    let mut g = rng(11);
    let (mut lengths, mut tables) = (0, 0);
    for _ in 0..500 {
        let (w1, w2) = (random_word(&mut g, 6), random_word(&mut g, 6));
        let n = g.gen_range(1..=6u64);
        let w = compose_words(&w1, &w2);
        let m1 = w1.ell(n).unwrap();
        lengths += (w.ell(n) != w2.ell(m1)) as usize;
        let t = word_table(&w, n as usize).unwrap();
        let (t1, t2) = (word_table(&w1, n as usize).unwrap(), word_table(&w2, m1 as usize).unwrap());
        tables += (t != t2.iter().map(|&x| t1[x]).collect::<Vec<_>>()) as usize;
    }
    vec![
        check("length composition", lengths == 0, format!("500 triples, {lengths} failures")),
        check("map composition", tables == 0, format!("500 triples, {tables} failures")),
    ]
}

fn periodic_window() -> Vec<Check> {
    let mut g = rng(12);
    let (mut sampled, mut failures) = (0, 0);
    let mut first = None;
    while sampled < 500 {
        let size = g.gen_range(1..=5);
        let r = random_relation(&mut g, size, 0.35);
        if !is_recurrent(&r) {
            continue;
        }
        sampled += 1;
        let c = periodic_extension_check(&r, 6, 10_000_000).unwrap();
        if let Some(w) = c.failure {
            failures += 1;
            first.get_or_insert_with(|| format!(", first: {r} word {:?}", w.iter().map(|x| x + 1).collect::<Vec<_>>()));
        }
    }
    let detail = format!("500 recurrent samples, {failures} without a cyclic extension{}", first.unwrap_or_default());
    vec![check("window words extend", failures == 0, detail)]
}

fn builders() -> Vec<Check> {
    PrefixName::ALL
        .iter()
        .map(|&name| {
            let p = match build_named_prefix(name, &Default::default(), 4) {
                Ok(p) => p,
                Err(e) => return check(name.as_str(), false, e.to_string()),
            };
            let step = if name == PrefixName::THM_4_08_STAR { 2 } else { 1 };
            let bad: Vec<String> = (1..=p.depth() - step)
                .filter(|&n| !lift_verdict(p.level(n + step), p.level(n), &p.composite(n + step, n)).unwrap().is_pm)
                .map(|n| format!("level {} onto {n} is not a ±lift", n + step))
                .collect();
            let sizes: Vec<String> = p.levels().iter().map(|l| l.size().to_string()).collect();
            check(name.as_str(), bad.is_empty(), joined(&bad, format!("sizes {}", sizes.join(", "))))
        })
        .collect()
}

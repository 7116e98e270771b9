//! One function per subcommand.

use std::path::Path;
use std::sync::Arc;

use findyn_core::classify::classify as classify_system;
use findyn_core::covers::{dumbbell_cover, loop_cover, loop_union_cover, wedge_mixing_threshold};
use findyn_core::dot::export_dot;
use findyn_core::factoring::{check_factoring, search_factoring_counterexample};
use findyn_core::json::{prefix_to_json, MapJson};
use findyn_core::loop_union::{loop_factoring, loop_factoring_counterexample, LoopAssignment, LoopUnionPrefix};
use findyn_core::maps::validate_map;
use findyn_core::numeric::{is_positive_mixture, mixture_bound};
use findyn_core::prefix::{limit_hitting, HitStatus};
use findyn_core::word_hitting::{mixing_evidence, weak_mixing_obstruction};
use findyn_core::words::{compose_words, constant_word_prefix, level_sizes, map_to_word, word_to_map};
use findyn_core::{
    check_lift, enumerate_maps, validate_prefix, Error, MapMode, MapVerdict, PrefixName, Result, SemigroupWord, ShimomuraPrefix, SystemMap,
};
use serde_json::{json, Value};

use crate::input::{load_system, CapArgs, PrefixArgs};
use crate::report::{Context, Outcome};
use crate::CoverKind;

fn one_based(t: &[usize]) -> Vec<usize> {
    t.iter().map(|x| x + 1).collect()
}

fn fits(v: &MapVerdict, mode: MapMode) -> bool {
    match mode {
        MapMode::All => v.homomorphism,
        MapMode::Surjective => v.homomorphism && v.surjective,
        MapMode::Factor => v.factor,
    }
}

pub fn classify(ctx: &mut Context, source: &str, horizon: usize) -> Result<Outcome> {
    let s = load_system(ctx, "system", source)?;
    let r = classify_system(&s, horizon);
    let per_eventual: Vec<Value> = r.per_eventual.iter().map(|b| json!({ "vertices": one_based(&b.vertices), "period": b.period })).collect();
    let result = json!({
        "size": r.size,
        "surjective": r.surjective,
        "recurrent": r.recurrent,
        "transitive": r.transitive,
        "mixing": r.mixing,
        "mixing_exponent": r.mixing_exponent,
        "loop_period": r.loop_period,
        "per_horizon": r.per_horizon,
        "per_window": r.per_window,
        "per_eventual": per_eventual,
        "matrix_route": r.matrix_route,
    });
    let agree = r.routes_agree();
    let witness = (!agree).then(|| json!({ "mixing_by_period": r.mixing, "matrix_route": r.matrix_route }));
    Ok(Outcome::check(agree, result, witness))
}

pub fn maps(ctx: &mut Context, from: &str, to: &str, mode: MapMode, show: usize, caps: &CapArgs) -> Result<Outcome> {
    let a = load_system(ctx, "from", from)?;
    let b = load_system(ctx, "to", to)?;
    let caps = caps.map_caps(ctx)?;
    let found = enumerate_maps(&a, &b, mode, &caps)?;
    let bad = found.iter().find(|m| !fits(&validate_map(m), mode));
    let tables: Vec<Vec<usize>> = found.iter().take(show).map(|m| one_based(&m.table)).collect();
    let result = json!({
        "mode": format!("{mode:?}").to_lowercase(),
        "count": found.len(),
        "shown": tables.len(),
        "tables": tables,
    });
    let witness = bad.map(|m| json!({ "table": one_based(&m.table), "verdict": validate_map(m) }));
    Ok(Outcome::check(bad.is_none(), result, witness))
}

pub fn cover(ctx: &mut Context, source: &str, kind: CoverKind) -> Result<Outcome> {
    let s = load_system(ctx, "system", source)?;
    let (map, mut result): (SystemMap, Value) = match kind {
        CoverKind::Loop => {
            let m = loop_cover(&s)?;
            let len = m.domain.size();
            (m, json!({ "kind": "loop", "loop_length": len }))
        }
        CoverKind::Dumbbell => {
            let c = dumbbell_cover(&s)?;
            let shapes: Vec<String> = c.shapes.iter().map(ToString::to_string).collect();
            (c.map, json!({ "kind": "dumbbell", "shapes": shapes }))
        }
        CoverKind::LoopUnion => {
            let c = loop_union_cover(&s)?;
            (c.map, json!({ "kind": "loop-union", "loop_length": c.loop_length, "loops": c.loops }))
        }
        CoverKind::Wedge => {
            let t = wedge_mixing_threshold(&s)?;
            let m = t.factor_from_wedge(t.k, t.k)?;
            (m, json!({ "kind": "wedge", "k1": t.k1, "k2": t.k2, "k": t.k, "wedge": [t.k, t.k] }))
        }
    };
    result["domain_size"] = json!(map.domain.size());
    result["table"] = json!(one_based(&map.table));
    let v = validate_map(&map);
    let witness = (!v.factor).then(|| json!(v));
    Ok(Outcome::check(v.factor, result, witness))
}

pub fn bound(m: u64, n: u64) -> Result<Outcome> {
    let b = mixture_bound(m, n)?;
    // Every K past the window is a window value plus a multiple of m.
    let hi = b.paper_bound + m * n + m;
    let miss = (b.paper_bound..hi).find(|&k| !is_positive_mixture(k, m, n));
    let result = json!({
        "m": b.m,
        "n": b.n,
        "x": b.x,
        "y": b.y,
        "paper_bound": b.paper_bound,
        "exact_threshold": b.exact_threshold,
        "checked": [b.paper_bound, hi - 1],
    });
    let ok = miss.is_none() && b.exact_threshold <= b.paper_bound;
    Ok(Outcome::check(ok, result, miss.map(|k| json!({ "unrepresentable": k }))))
}

fn sizes(p: &ShimomuraPrefix) -> Vec<usize> {
    p.levels().iter().map(|l| l.size()).collect()
}

pub fn build(ctx: &mut Context, args: &PrefixArgs, out: Option<&Path>) -> Result<Outcome> {
    let p = args.load(ctx)?;
    let text = prefix_to_json(&p);
    let mut result = json!({ "name": p.meta.name, "params": p.meta.params, "depth": p.depth(), "sizes": sizes(&p) });
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?;
            ctx.input("out", &path.display().to_string(), text.as_bytes());
        }
        None => result["prefix"] = serde_json::from_str(&text).expect("prefix JSON parses"),
    }
    Ok(Outcome::ok(result))
}

pub fn verify_prefix(ctx: &mut Context, args: &PrefixArgs) -> Result<Outcome> {
    let p = args.load(ctx)?;
    let v = validate_prefix(&p)?;
    let step = if p.meta.name == PrefixName::THM_4_08_STAR.as_str() { 2 } else { 1 };
    let mut lifts = Vec::new();
    let mut failed_lift = None;
    for n in 1..=p.depth().saturating_sub(step) {
        let l = p.lift(n + step, n);
        if !l.is_pm && failed_lift.is_none() {
            failed_lift = Some(json!({ "from": n + step, "to": n, "failures": l.failures }));
        }
        lifts.push(json!({ "from": n + step, "to": n, "plus": l.is_plus, "pm": l.is_pm }));
    }
    // Witnesses for the top flagged level may lie past the prefix.
    let top = p.depth() - 1;
    let (mut open, mut unresolved) = (Vec::new(), Vec::new());
    for (kind, flags) in [("bifurcating", &v.bifurcating), ("shimomura", &v.shimomura), ("invertible", &v.invertible)] {
        for f in flags.iter().filter(|f| f.witness.is_none()) {
            let entry = json!({ "flag": kind, "level": f.level });
            if f.level == top {
                open.push(entry);
            } else {
                unresolved.push(entry);
            }
        }
    }
    let result = json!({
        "name": p.meta.name,
        "depth": p.depth(),
        "sizes": sizes(&p),
        "bifurcating": v.bifurcating_to_depth(),
        "shimomura": v.shimomura_to_depth(),
        "invertible": v.invertible_to_depth(),
        "pointed": v.pointed,
        "flags": v,
        "open": open,
        "lifts": lifts,
    });
    let passed = unresolved.is_empty() && failed_lift.is_none();
    let witness = (!passed).then(|| json!({ "unresolved": unresolved, "lift": failed_lift }));
    Ok(Outcome::check(passed, result, witness))
}

/// Level `k` onto level `n` as explicit loop unions, rotation 0 on each loop.
fn explicit_assignment_is_factor(p: &LoopUnionPrefix, q1: &LoopAssignment) -> Result<Option<bool>> {
    let head = LoopUnionPrefix::new(p.levels[..q1.k].to_vec(), p.bonding[..q1.k - 1].to_vec(), p.meta.clone())?;
    let explicit = match head.to_explicit(200_000) {
        Ok(e) => e,
        Err(Error::Resource(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let starts = |lens: &[u64]| -> Vec<usize> {
        lens.iter()
            .scan(0usize, |acc, &l| {
                let s = *acc;
                *acc += l as usize;
                Some(s)
            })
            .collect()
    };
    let (lk, ln) = (p.level(q1.k), p.level(q1.n));
    let sn = starts(ln);
    let mut table = Vec::new();
    for (c, &len) in lk.iter().enumerate() {
        let d = q1.assign[c];
        table.extend((0..len).map(|x| sn[d] + (x % ln[d]) as usize));
    }
    let m = SystemMap::new(explicit.level(q1.k).clone(), explicit.level(q1.n).clone(), table)?;
    Ok(Some(m.is_factor()))
}

#[allow(clippy::too_many_arguments)]
pub fn factoring(
    ctx: &mut Context,
    args: &PrefixArgs,
    k: usize,
    n: usize,
    m_max: Option<usize>,
    explicit: bool,
    max_q1: usize,
    caps: &CapArgs,
) -> Result<Outcome> {
    if !explicit {
        if let Some(p) = args.load_loop_union(ctx)? {
            let m_max = m_max.unwrap_or(p.depth());
            ctx.cap("route", json!("symbolic"));
            ctx.cap("max_q1", json!(max_q1));
            let s = loop_factoring_counterexample(&p, k, n, m_max, max_q1)?;
            let result = json!({
                "route": "symbolic",
                "k": k,
                "n": n,
                "m_max": m_max,
                "level_sizes": (1..=p.depth()).map(|l| p.level_size(l).to_string()).collect::<Vec<_>>(),
                "q1_checked": s.q1_checked,
                "counterexample": s.counterexample.is_some(),
            });
            let Some(q1) = s.counterexample else { return Ok(Outcome::ok(result)) };
            let still_open = loop_factoring(&p, &q1, m_max)?.is_none();
            let divides = q1.assign.iter().enumerate().all(|(c, &d)| p.level(k)[c] % p.level(n)[d] == 0);
            let onto = (0..p.level(n).len()).all(|d| q1.assign.contains(&d));
            let explicit_factor = explicit_assignment_is_factor(&p, &q1)?;
            if !(still_open && divides && onto && explicit_factor != Some(false)) {
                return Err(Error::Validation("factoring witness failed re-validation".into()));
            }
            let witness = json!({
                "q1_loop_targets": one_based(&q1.assign),
                "source_loops": p.level(k),
                "target_loops": p.level(n),
                "no_q2_up_to": m_max,
                "explicit_factor": explicit_factor,
            });
            return Ok(Outcome::check(false, result, Some(witness)));
        }
    }
    let p = args.load(ctx)?;
    let m_max = m_max.unwrap_or(p.depth());
    ctx.cap("route", json!("explicit"));
    let fc = caps.factoring_caps(ctx)?;
    let s = search_factoring_counterexample(&p, k, n, m_max, &fc)?;
    let result = json!({
        "route": "explicit",
        "k": k,
        "n": n,
        "m_max": m_max,
        "level_sizes": sizes(&p),
        "q1_checked": s.q1_checked,
        "counterexample": s.counterexample.is_some(),
    });
    let Some(q1) = s.counterexample else { return Ok(Outcome::ok(result)) };
    if !q1.is_factor() || check_factoring(&p, &q1, k, n, m_max, &fc)?.factors() {
        return Err(Error::Validation("factoring witness failed re-validation".into()));
    }
    let witness = json!({ "q1": MapJson::from_map(&q1).table, "no_q2_up_to": m_max });
    Ok(Outcome::check(false, result, Some(witness)))
}

pub fn hitting(ctx: &mut Context, args: &PrefixArgs, n: usize, i: usize, j: usize, horizon: usize) -> Result<Outcome> {
    let p = args.load(ctx)?;
    if n == 0 || n > p.depth() {
        return Err(Error::Argument(format!("level {n} outside 1..={}", p.depth())));
    }
    let size = p.level(n).size();
    if !(1..=size).contains(&i) || !(1..=size).contains(&j) {
        return Err(Error::Argument(format!("vertices must lie in 1..={size}")));
    }
    let t = limit_hitting(&p, n, i - 1, j - 1, horizon)?;
    let absent: Vec<[usize; 2]> = t
        .status
        .iter()
        .enumerate()
        .filter_map(|(k, s)| match s {
            HitStatus::AbsentCertified { level } => Some([k + 1, *level]),
            HitStatus::PresentToDepth => None,
        })
        .collect();
    Ok(Outcome::ok(json!({
        "n": n,
        "i": i,
        "j": j,
        "horizon": horizon,
        "depth": t.depth,
        "present": t.present(),
        "absent_certified": absent,
    })))
}

pub fn word_compose(left: &SemigroupWord, right: &SemigroupWord) -> Outcome {
    let c = compose_words(left, right);
    let ell: Vec<Option<u64>> = (1..=8).map(|x| c.ell(x)).collect();
    Outcome::ok(json!({ "word": c, "e": c.e_count(), "L": c.l_count(), "ell_1_to_8": ell }))
}

pub fn word_map(w: &SemigroupWord, n: usize) -> Result<Outcome> {
    let m = word_to_map(w, n)?;
    let v = validate_map(&m);
    let lift = check_lift(&m);
    let result = json!({
        "word": w,
        "n": n,
        "domain_size": m.domain.size(),
        "table": one_based(&m.table),
        "factor": v.factor,
        "plus_lift": lift.is_plus,
        "pm_lift": lift.is_pm,
        "decoded": map_to_word(&m).ok(),
    });
    let witness = (!v.factor).then(|| json!(v));
    Ok(Outcome::check(v.factor, result, witness))
}

pub fn word_prefix(w: &SemigroupWord, depth: usize, validate: bool) -> Result<Outcome> {
    let n = level_sizes(w, depth)?;
    let mut result = json!({ "word": w, "depth": depth, "sizes": n });
    if !validate {
        return Ok(Outcome::ok(result));
    }
    let p = constant_word_prefix(w, depth)?;
    let v = validate_prefix(&p)?;
    result["flags"] = json!(v);
    let witness = (!v.passes()).then(|| json!({ "bifurcating": v.bifurcating_to_depth(), "shimomura": v.shimomura_to_depth() }));
    Ok(Outcome::check(v.passes(), result, witness))
}

pub fn word_mixing(w: &SemigroupWord, n: usize, from: Option<usize>, window: usize, depth: usize) -> Result<Outcome> {
    let e = mixing_evidence(w, n, from, window, depth)?;
    let absent: usize = e.rows.iter().map(|r| r.absent.len()).sum();
    let result = json!({
        "word": e.word,
        "n": e.n,
        "level_size": e.level_size,
        "from": e.from,
        "window": e.window,
        "depth": e.depth,
        "labels": e.rows.len(),
        "absent": absent,
    });
    let witness = e.rows.iter().find(|r| !r.absent.is_empty()).map(|r| json!({ "i": r.i, "absent_t_level": r.absent }));
    Ok(Outcome::check(e.all_present(), result, witness))
}

pub fn word_obstruction(w: &SemigroupWord, n: usize, horizon: usize, depth: usize) -> Result<Outcome> {
    let r = weak_mixing_obstruction(w, n, horizon, depth)?;
    let result = json!({
        "word": r.word,
        "n": r.n,
        "level_size": r.level_size,
        "horizon": r.horizon,
        "depth": r.depth,
        "certified": r.certified(),
        "certifying_depth": r.certifying_depth(),
        "rows": r.rows.iter().map(|x| json!({ "i": x.i, "certified_at": x.certified_at, "unresolved": x.unresolved.len() })).collect::<Vec<_>>(),
    });
    let witness = r.rows.iter().find(|x| !x.unresolved.is_empty()).map(|x| json!({ "i": x.i, "unresolved_t": x.unresolved }));
    Ok(Outcome::check(r.certified(), result, witness))
}

pub fn export(ctx: &mut Context, system: Option<&str>, args: &PrefixArgs, level: Option<usize>, graph: &str) -> Result<Outcome> {
    if let Some(source) = system {
        let s = load_system(ctx, "system", source)?;
        return Ok(Outcome::raw(export_dot(&s, graph)));
    }
    let p = args.load(ctx)?;
    let n = level.unwrap_or(p.depth());
    if n == 0 || n > p.depth() {
        return Err(Error::Argument(format!("level {n} outside 1..={}", p.depth())));
    }
    let s: &Arc<_> = p.level(n);
    Ok(Outcome::raw(export_dot(s, graph)))
}

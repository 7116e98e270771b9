mod common;

use std::sync::Arc;

use findyn_core::dot::export_dot;
use findyn_core::json::{map_from_json, map_to_json, prefix_from_json, prefix_to_json, relation_from_json, system_from_json, system_to_json};
use findyn_core::{build_named_prefix, dumbbell, loop_system, DumbbellShape, Error, Params, PrefixName, SystemMap};
use proptest::prelude::*;

fn count_edges(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains("->")).count()
}

fn count_nodes(dot: &str) -> usize {
    dot.lines().filter(|l| !l.contains("->") && l.trim_end().ends_with(';')).count()
}

#[test]
fn dot_examples() {
    let d = export_dot(&loop_system(3).unwrap(), "loop3");
    assert!(d.starts_with("digraph loop3 {"));
    assert_eq!((count_nodes(&d), count_edges(&d)), (3, 3));
    let d = export_dot(&dumbbell(DumbbellShape::new(2, 1, 2).unwrap()), "d");
    assert_eq!((count_nodes(&d), count_edges(&d)), (4, 5));
    assert!(d.contains("2 -> 1;"));
    assert_eq!(d, export_dot(&dumbbell(DumbbellShape::new(2, 1, 2).unwrap()), "d"));
}

#[test]
fn system_json_is_one_based() {
    let s = system_from_json(r#"{"size": 2, "edges": [[1, 2], [2, 1]]}"#).unwrap();
    assert_eq!(s, loop_system(2).unwrap());
    let text = system_to_json(&loop_system(2).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["edges"], serde_json::json!([[1, 2], [2, 1]]));
}

#[test]
fn json_errors() {
    assert!(matches!(system_from_json(r#"{"size": 2, "edges": [[1, 2]]}"#), Err(Error::Precondition(_))));
    assert!(relation_from_json(r#"{"size": 2, "edges": [[1, 2]]}"#).is_ok());
    assert!(system_from_json(r#"{"size": 2, "edges": [[0, 1]]}"#).is_err());
    match system_from_json("{\"size\": 2,\n \"edges\": [[1, 2]") {
        Err(Error::Decode(msg)) => assert!(msg.contains("line 2"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn map_round_trip() {
    let m = SystemMap::new(Arc::new(loop_system(6).unwrap()), Arc::new(loop_system(3).unwrap()), (0..6).map(|i| i % 3).collect()).unwrap();
    let text = map_to_json(&m);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["table"], serde_json::json!([1, 2, 3, 1, 2, 3]));
    assert_eq!(map_from_json(&text).unwrap(), m);
}

#[test]
fn prefix_round_trip() {
    for name in PrefixName::ALL {
        let p = build_named_prefix(name, &Params::new(), 3).unwrap();
        let text = prefix_to_json(&p);
        let q = prefix_from_json(&text).unwrap();
        assert_eq!(q.meta, p.meta, "{name}");
        assert_eq!(q.levels(), p.levels(), "{name}");
        assert_eq!(q.bonding_tables(), p.bonding_tables(), "{name}");
        assert_eq!(prefix_to_json(&q), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn system_round_trip(seed in any::<u64>(), size in 1usize..=8) {
        let mut g = common::rng(seed);
        let s = common::random_system(&mut g, size, 0.3);
        prop_assert_eq!(system_from_json(&system_to_json(&s)).unwrap(), s.clone());
        let d = export_dot(&s, "g");
        prop_assert_eq!(count_edges(&d), s.edge_count());
        prop_assert_eq!(count_nodes(&d), size);
    }
}

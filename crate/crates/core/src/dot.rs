//! Graphviz output.

use std::fmt::Write;

use crate::relation::FiniteRelation;

/// One node per vertex in index order, one edge per pair in lexicographic
/// order. Nodes are named by their 1-based index and labeled when labels
/// exist.
pub fn export_dot(r: &FiniteRelation, name: &str) -> String {
    let mut out = String::new();
    let id: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    let _ = writeln!(out, "digraph {} {{", if id.is_empty() { "system".to_string() } else { id });
    for v in 0..r.size() {
        match r.labels() {
            Some(l) => {
                let _ = writeln!(out, "  {} [label=\"{}\"];", v + 1, l[v].replace('"', "\\\""));
            }
            None => {
                let _ = writeln!(out, "  {};", v + 1);
            }
        }
    }
    for (a, b) in r.edges() {
        let _ = writeln!(out, "  {} -> {};", a + 1, b + 1);
    }
    out.push_str("}\n");
    out
}

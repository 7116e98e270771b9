//! Finite-prefix queries on the set of factors of the limit.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::maps::SystemMap;
use crate::prefix::ShimomuraPrefix;
use crate::relation::FiniteSystem;
use crate::search::{HomSearch, MapCaps, MapMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GammaCaps {
    /// Deepest prefix level searched.
    pub max_level: usize,
    pub map: MapCaps,
}

impl Default for GammaCaps {
    fn default() -> Self {
        GammaCaps { max_level: usize::MAX, map: MapCaps { max_domain: 256, max_codomain: 32, max_nodes: 5_000_000 } }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representation {
    Yes { level: usize, map: SystemMap },
    /// No factor map from any level searched; deeper levels may still work.
    NoWithinCaps { levels_searched: usize },
    ResourceExceeded { level: usize, reason: String },
}

impl Representation {
    pub fn is_yes(&self) -> bool {
        matches!(self, Representation::Yes { .. })
    }
}

/// Looks for a factor map from some prefix level onto `phi`, shallowest
/// level first.
pub fn represents_in_prefix(phi: &Arc<FiniteSystem>, prefix: &ShimomuraPrefix, caps: &GammaCaps) -> Representation {
    let top = prefix.depth().min(caps.max_level);
    for n in 1..=top {
        let lvl = prefix.level(n);
        if lvl.size() < phi.size() {
            continue;
        }
        if let Err(Error::Resource(reason)) = caps.map.check_sizes(lvl.size(), phi.size()) {
            return Representation::ResourceExceeded { level: n, reason };
        }
        match HomSearch::new(lvl, phi, MapMode::Factor).max_nodes(caps.map.max_nodes).first() {
            Ok(Some(table)) => {
                return Representation::Yes {
                    level: n,
                    map: SystemMap { domain: lvl.clone(), codomain: phi.clone(), table },
                }
            }
            Ok(None) => {}
            Err(e) => return Representation::ResourceExceeded { level: n, reason: e.to_string() },
        }
    }
    Representation::NoWithinCaps { levels_searched: top }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domination {
    DominatesToDepth { levels: Vec<(usize, usize)> },
    Unresolved { failing_level: usize, outcome: Representation },
}

/// Every level of `prefix_g` is checked for a representation in `prefix_f`.
/// `levels` pairs each `g` level with the `f` level that represents it.
pub fn gamma_dominates(prefix_f: &ShimomuraPrefix, prefix_g: &ShimomuraPrefix, caps: &GammaCaps) -> Domination {
    let mut levels = Vec::new();
    for n in 1..=prefix_g.depth() {
        match represents_in_prefix(prefix_g.level(n), prefix_f, caps) {
            Representation::Yes { level, .. } => levels.push((n, level)),
            other => return Domination::Unresolved { failing_level: n, outcome: other },
        }
    }
    Domination::DominatesToDepth { levels }
}

//! JSON forms of systems, maps and prefixes (1-based vertices).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::SystemMap;
use crate::prefix::{PrefixMeta, ShimomuraPrefix};
use crate::relation::{FiniteRelation, FiniteSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub size: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SystemJson {
    pub fn from_relation(r: &FiniteRelation) -> Self {
        SystemJson {
            size: r.size(),
            edges: r.edges().map(|(a, b)| [a + 1, b + 1]).collect(),
            labels: r.labels().map(<[String]>::to_vec),
        }
    }

    pub fn to_relation(&self) -> Result<FiniteRelation> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let r = FiniteRelation::from_one_based(self.size, &edges)?;
        match &self.labels {
            Some(l) => r.with_labels(l.clone()),
            None => Ok(r),
        }
    }

    pub fn to_system(&self) -> Result<FiniteSystem> {
        FiniteSystem::new(self.to_relation()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub domain: SystemJson,
    pub codomain: SystemJson,
    pub table: Vec<usize>,
}

impl MapJson {
    pub fn from_map(m: &SystemMap) -> Self {
        MapJson {
            domain: SystemJson::from_relation(&m.domain),
            codomain: SystemJson::from_relation(&m.codomain),
            table: m.table.iter().map(|x| x + 1).collect(),
        }
    }

    pub fn to_map(&self) -> Result<SystemMap> {
        let table = one_based_table(&self.table, self.codomain.size)?;
        SystemMap::from_parts(self.domain.to_system()?, self.codomain.to_system()?, table)
    }
}

fn one_based_table(t: &[usize], cod: usize) -> Result<Vec<usize>> {
    t.iter()
        .map(|&x| {
            if x == 0 || x > cod {
                Err(Error::Decode(format!("table entry {x} outside [1, {cod}]")))
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixJson {
    pub levels: Vec<SystemJson>,
    pub bonding: Vec<Vec<usize>>,
    #[serde(default)]
    pub meta: MetaJson,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaJson {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl PrefixJson {
    pub fn from_prefix(p: &ShimomuraPrefix) -> Self {
        PrefixJson {
            levels: p.levels().iter().map(|l| SystemJson::from_relation(l)).collect(),
            bonding: p.bonding_tables().iter().map(|t| t.iter().map(|x| x + 1).collect()).collect(),
            meta: MetaJson { name: p.meta.name.clone(), params: p.meta.params.clone() },
        }
    }

    pub fn to_prefix(&self) -> Result<ShimomuraPrefix> {
        let levels = self.levels.iter().map(|l| l.to_system().map(Arc::new)).collect::<Result<Vec<_>>>()?;
        let bonding = self
            .bonding
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let cod = levels.get(k).map_or(0, |l| l.size());
                one_based_table(t, cod)
            })
            .collect::<Result<Vec<_>>>()?;
        ShimomuraPrefix::new(levels, bonding, PrefixMeta { name: self.meta.name.clone(), params: self.meta.params.clone() })
    }
}

fn decode<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Decode(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn system_from_json(text: &str) -> Result<FiniteSystem> {
    decode::<SystemJson>(text)?.to_system()
}

pub fn relation_from_json(text: &str) -> Result<FiniteRelation> {
    decode::<SystemJson>(text)?.to_relation()
}

pub fn map_from_json(text: &str) -> Result<SystemMap> {
    decode::<MapJson>(text)?.to_map()
}

pub fn prefix_from_json(text: &str) -> Result<ShimomuraPrefix> {
    decode::<PrefixJson>(text)?.to_prefix()
}

pub fn system_to_json(r: &FiniteRelation) -> String {
    serde_json::to_string(&SystemJson::from_relation(r)).expect("plain data serializes")
}

pub fn map_to_json(m: &SystemMap) -> String {
    serde_json::to_string(&MapJson::from_map(m)).expect("plain data serializes")
}

pub fn prefix_to_json(p: &ShimomuraPrefix) -> String {
    serde_json::to_string(&PrefixJson::from_prefix(p)).expect("plain data serializes")
}

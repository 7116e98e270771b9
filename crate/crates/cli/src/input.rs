//! Systems, prefixes and cap profiles from the command line.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use findyn_core::factoring::FactoringCaps;
use findyn_core::json::{prefix_from_json, system_from_json};
use findyn_core::loop_union::{build_loop_union, LoopUnionPrefix};
use findyn_core::{build_named_prefix, parse_params, Error, FiniteSystem, MapCaps, PrefixName, Result, ShapeLiteral, ShimomuraPrefix};
use serde_json::json;

use crate::report::Context;

/// Environment variable naming the default cap profile.
pub const CAPS_ENV: &str = "FINDYN_CAPS";

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("{}: {e}", path.display())))
}

/// A shape literal such as `loop:6`, or a path to a system JSON file.
pub fn load_system(ctx: &mut Context, key: &str, source: &str) -> Result<Arc<FiniteSystem>> {
    let path = Path::new(source);
    if path.is_file() {
        let text = read(path)?;
        ctx.input(key, source, text.as_bytes());
        return Ok(Arc::new(system_from_json(&text)?));
    }
    if !source.contains(':') {
        return Err(Error::Argument(format!("{source:?} is neither a readable file nor a shape literal")));
    }
    let lit: ShapeLiteral = source.parse()?;
    ctx.input(key, source, source.as_bytes());
    Ok(Arc::new(lit.system()?))
}

#[derive(Args, Debug, Clone)]
pub struct PrefixArgs {
    /// Named construction, e.g. THM_4_10 or EXAMPLE_3.
    #[arg(long, conflicts_with = "prefix", required_unless_present = "prefix")]
    pub name: Option<PrefixName>,
    /// Prefix JSON file.
    #[arg(long)]
    pub prefix: Option<PathBuf>,
    /// Construction parameter `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Levels to build for a named construction.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
}

impl PrefixArgs {
    fn record(&self, ctx: &mut Context) -> Result<Option<String>> {
        match (&self.name, &self.prefix) {
            (Some(name), _) => {
                let label = format!("{name} depth={} {}", self.depth, self.params.join(" "));
                ctx.input("prefix", label.trim_end(), label.trim_end().as_bytes());
                Ok(None)
            }
            (None, Some(path)) => {
                let text = read(path)?;
                ctx.input("prefix", &path.display().to_string(), text.as_bytes());
                Ok(Some(text))
            }
            (None, None) => Err(Error::Argument("give --name or --prefix".into())),
        }
    }

    pub fn load(&self, ctx: &mut Context) -> Result<ShimomuraPrefix> {
        match self.record(ctx)? {
            Some(text) => prefix_from_json(&text),
            None => {
                let params = parse_params(self.params.iter().map(String::as_str))?;
                build_named_prefix(self.name.expect("checked by record"), &params, self.depth)
            }
        }
    }

    /// The symbolic loop-union form, for constructions that have one.
    pub fn load_loop_union(&self, ctx: &mut Context) -> Result<Option<LoopUnionPrefix>> {
        let Some(name) = self.name else { return Ok(None) };
        let params = parse_params(self.params.iter().map(String::as_str))?;
        let p = build_loop_union(name, &params, self.depth)?;
        if p.is_some() {
            self.record(ctx)?;
        }
        Ok(p)
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct CapArgs {
    /// Largest domain for exhaustive map searches.
    #[arg(long)]
    pub max_domain: Option<usize>,
    /// Largest codomain for exhaustive map searches.
    #[arg(long)]
    pub max_codomain: Option<usize>,
    /// Search-tree node budget.
    #[arg(long)]
    pub max_nodes: Option<u64>,
}

/// Caps for one profile: `default`, `small` or `large`.
#[derive(Clone, Copy, Debug)]
pub struct Profile {
    pub name: &'static str,
    pub maps: MapCaps,
    pub factoring: FactoringCaps,
}

pub fn profile() -> Result<Profile> {
    let name = std::env::var(CAPS_ENV).unwrap_or_else(|_| "default".into());
    let base = FactoringCaps::default();
    match name.as_str() {
        "default" => Ok(Profile { name: "default", maps: MapCaps::default(), factoring: base }),
        "small" => Ok(Profile {
            name: "small",
            maps: MapCaps { max_domain: 8, max_codomain: 6, max_nodes: 1_000_000 },
            factoring: FactoringCaps {
                q1: MapCaps { max_domain: 24, max_codomain: 6, max_nodes: 1_000_000 },
                q2_nodes: 1_000_000,
                max_component_maps: 10_000,
            },
        }),
        "large" => Ok(Profile {
            name: "large",
            maps: MapCaps { max_domain: 16, max_codomain: 16, max_nodes: 200_000_000 },
            factoring: FactoringCaps {
                q1: MapCaps { max_domain: 96, max_codomain: 16, max_nodes: 200_000_000 },
                q2_nodes: 200_000_000,
                max_component_maps: 1_000_000,
            },
        }),
        other => Err(Error::Argument(format!("{CAPS_ENV}={other:?}; expected default, small or large"))),
    }
}

impl CapArgs {
    pub fn map_caps(&self, ctx: &mut Context) -> Result<MapCaps> {
        let p = profile()?;
        let caps = MapCaps {
            max_domain: self.max_domain.unwrap_or(p.maps.max_domain),
            max_codomain: self.max_codomain.unwrap_or(p.maps.max_codomain),
            max_nodes: self.max_nodes.unwrap_or(p.maps.max_nodes),
        };
        ctx.cap("profile", json!(p.name));
        ctx.cap("maps", json!(caps));
        Ok(caps)
    }

    pub fn factoring_caps(&self, ctx: &mut Context) -> Result<FactoringCaps> {
        let p = profile()?;
        let mut caps = p.factoring;
        caps.q1.max_domain = self.max_domain.unwrap_or(caps.q1.max_domain);
        caps.q1.max_codomain = self.max_codomain.unwrap_or(caps.q1.max_codomain);
        if let Some(n) = self.max_nodes {
            caps.q1.max_nodes = n;
            caps.q2_nodes = n;
        }
        ctx.cap("profile", json!(p.name));
        ctx.cap("factoring", json!(caps));
        Ok(caps)
    }
}

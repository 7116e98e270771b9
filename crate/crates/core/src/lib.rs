//! Finite relations treated as dynamical systems.
//!
//! Vertices are stored 0-based; JSON, DOT and `Display` output are 1-based.

pub mod bitset;
pub mod builders;
pub mod classify;
pub mod covers;
pub mod dot;
pub mod error;
pub mod factoring;
pub mod gamma;
pub mod json;
pub mod loop_union;
pub mod maps;
pub mod numeric;
pub mod prefix;
pub mod relation;
pub mod search;
pub mod shapes;
pub mod word_hitting;
pub mod words;

pub use bitset::BitSet;
pub use builders::{build_named_prefix, parse_params, Params, PrefixName};
pub use classify::{classify, PropertyReport};
pub use error::{Error, Result};
pub use maps::{check_lift, enumerate_maps, LiftVerdict, MapVerdict, SystemMap};
pub use prefix::{validate_prefix, PrefixVerdict, ShimomuraPrefix};
pub use relation::{compose, power, FiniteRelation, FiniteSystem, VertexSet};
pub use search::{MapCaps, MapMode};
pub use shapes::{dumbbell, loop_system, pointed_loop, wedge, DumbbellShape, ShapeLiteral};
pub use words::SemigroupWord;

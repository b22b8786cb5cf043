//! Graph pattern mining with pattern morphing: results for a set of patterns
//! are computed by matching an alternative, cheaper set of patterns and
//! converting the aggregated results back.

pub mod aggregation;
pub mod apps;
pub mod cost;
pub mod graph;
pub mod matcher;
pub mod morph;
pub mod pattern;

pub use aggregation::{Aggregator, Count, Enumerate, Mni, MniTable};
pub use cost::{choose_plan, CostConfig, Mode};
pub use graph::{DataGraph, GraphError, VertexId};
pub use morph::{MorphEquation, MorphPlan};
pub use pattern::{CanonicalForm, Label, Pattern, PatternError, PatternIso};

//! A generative testbed for causal reasoning over pixel-grid world models.
//!
//! World models are structural causal models executed as deterministic
//! programs over seeded exogenous contexts. From one model the testbed
//! samples observational, interventional, and counterfactual task data,
//! emits ARC-compatible task files, renders natural-language prompts,
//! scores model responses, and runs a constraint-based causal-discovery
//! baseline.

pub mod arc_json;
pub mod discovery;
pub mod eval;
pub mod families;
pub mod gateway;
pub mod graph;
pub mod grid;
pub mod prompt;
pub mod scm;
pub mod seed;

pub use arc_json::{from_arc_json, to_arc_json, ArcJsonError};
pub use families::{build_registry, Registry, RegistryEntry, TaskInstance};
pub use graph::{shd, CausalGraph};
pub use grid::{parse_grid_from_text, render_array_string, Grid, Pair, ParseFailure};
pub use scm::{
    counterfactual, sample_distribution, sample_exogenous, verify_graph, CounterfactualPair,
    ExogenousContext, ExogenousSpec, Intervention, InterventionKind, Level, Scm, Theme,
    VariableSpec,
};

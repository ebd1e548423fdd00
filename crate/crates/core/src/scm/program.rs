//! Deterministic structural programs: exogenous context -> input grid,
//! input grid -> output grid plus array-level features.
//!
//! The two stages are split so interventions can edit the input mechanism
//! and have the rule recompute everything downstream. Both stages are pure
//! functions; identical arguments always produce identical results.

use crate::grid::Grid;
use crate::scm::exogenous::ExogenousContext;
use crate::scm::ScmError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// An array-level derived quantity exposed by a rule (e.g. per-color
/// counts, a column permutation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureValue {
    CountsByColor(BTreeMap<u8, u32>),
    Permutation(Vec<u32>),
    Scalar(i64),
}

pub type Features = BTreeMap<String, FeatureValue>;

/// What a rule produces from one input grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutput {
    pub output: Grid,
    pub features: Features,
}

impl RuleOutput {
    pub fn plain(output: Grid) -> Self {
        Self { output, features: Features::new() }
    }
}

pub type InputFn = Arc<dyn Fn(&ExogenousContext) -> Result<Grid, ScmError> + Send + Sync>;
pub type RuleFn = Arc<dyn Fn(&Grid) -> Result<RuleOutput, ScmError> + Send + Sync>;

/// Executable structural program plus its human-readable source text.
#[derive(Clone)]
pub struct StructuralProgram {
    input_fn: InputFn,
    rule_fn: RuleFn,
    source_text: String,
}

impl StructuralProgram {
    pub fn new(input_fn: InputFn, rule_fn: RuleFn, source_text: impl Into<String>) -> Self {
        Self { input_fn, rule_fn, source_text: source_text.into() }
    }

    pub fn input_from_context(&self, ctx: &ExogenousContext) -> Result<Grid, ScmError> {
        (self.input_fn)(ctx)
    }

    pub fn rule(&self, input: &Grid) -> Result<RuleOutput, ScmError> {
        (self.rule_fn)(input)
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }
}

impl fmt::Debug for StructuralProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StructuralProgram")
            .field("source_text", &self.source_text)
            .finish_non_exhaustive()
    }
}

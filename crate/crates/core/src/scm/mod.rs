//! Structural causal models over pixel grids.
//!
//! An [`Scm`] couples an exogenous specification with a deterministic
//! structural program. Interventions induce submodels that share the
//! exogenous layer; evaluating a submodel on the same context yields a
//! counterfactual. All types are immutable after construction and every
//! operation is pure, so models can be shared freely across threads.

pub mod exogenous;
pub mod intervention;
pub mod ops;
pub mod program;
mod verify;

pub use exogenous::{sample_exogenous, ExogenousContext, ExogenousError, ExogenousSpec, VariableSpec};
pub use intervention::{
    canonical_phrase, GeometricOp, Intervention, InterventionError, InterventionKind,
    LocalMechanism, RegionSelector,
};
pub use ops::{LogicalOp, OperatorAnswer};
pub use program::{FeatureValue, Features, RuleOutput, StructuralProgram};
pub use verify::{verify_graph, VERIFY_MAX_CELLS};

use crate::graph::CausalGraph;
use crate::grid::{Grid, GridError, Pair, MAX_COLOR};
use crate::seed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScmError {
    #[error("id {0:?} does not match the form \"SCM\" + 4 lowercase alphanumerics")]
    BadId(String),
    #[error("palette color {0} outside 0..={MAX_COLOR}")]
    BadPalette(u8),
    #[error("declared graph has a directed cycle")]
    CyclicGraph,
    #[error("context shape {got:?} does not conform to exogenous spec {expected:?}")]
    ContextMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("rule expects a {expected:?} input grid, got {got:?}")]
    RuleShape { expected: (usize, usize), got: (usize, usize) },
    #[error("exogenous error: {0}")]
    Exogenous(#[from] ExogenousError),
    #[error("intervention error: {0}")]
    Intervention(#[from] InterventionError),
    #[error("grid error: {0}")]
    Grid(#[from] GridError),
    #[error("counterfactual needs at least one intervention")]
    NoInterventions,
    #[error("{0}")]
    Rule(String),
}

/// Task category labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theme {
    Counting,
    Extension,
    Logical,
    Ordering,
}

impl Theme {
    pub const ALL: [Theme; 4] = [Theme::Counting, Theme::Extension, Theme::Logical, Theme::Ordering];

    pub fn as_str(&self) -> &'static str {
        match self {
            Theme::Counting => "counting",
            Theme::Extension => "extension",
            Theme::Logical => "logical",
            Theme::Ordering => "ordering",
        }
    }
}

impl std::fmt::Display for Theme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn valid_id(id: &str) -> bool {
    id.len() == 7
        && id.starts_with("SCM")
        && id[3..].chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

/// A fully specified causal world model.
#[derive(Debug, Clone)]
pub struct Scm {
    id: String,
    theme: Theme,
    exogenous: ExogenousSpec,
    program: StructuralProgram,
    graph: Option<CausalGraph>,
    math_notation: Option<String>,
    size_params: (usize, usize),
    palette: Vec<u8>,
    /// Canonical nonzero color of each input cell, when the model has one
    /// (block-colored and single-color families). Required by
    /// activation-flipping interventions.
    cell_colors: Option<Grid>,
    /// Mechanism edits defining this submodel, applied in order between
    /// the input stage and the rule stage. Empty for base models.
    edits: Vec<Intervention>,
    /// Discovery ground truth for models whose causal functions are
    /// logical operators.
    operators: Option<OperatorAnswer>,
}

/// Everything produced by one evaluation of the program.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub pair: Pair,
    pub features: Features,
}

pub struct ScmBuilder {
    id: String,
    theme: Theme,
    exogenous: ExogenousSpec,
    program: StructuralProgram,
    graph: Option<CausalGraph>,
    math_notation: Option<String>,
    size_params: (usize, usize),
    palette: Vec<u8>,
    cell_colors: Option<Grid>,
    operators: Option<OperatorAnswer>,
}

impl ScmBuilder {
    pub fn new(
        id: impl Into<String>,
        theme: Theme,
        exogenous: ExogenousSpec,
        program: StructuralProgram,
        size_params: (usize, usize),
        palette: Vec<u8>,
    ) -> Self {
        Self {
            id: id.into(),
            theme,
            exogenous,
            program,
            graph: None,
            math_notation: None,
            size_params,
            palette,
            cell_colors: None,
            operators: None,
        }
    }

    pub fn graph(mut self, graph: CausalGraph) -> Self {
        self.graph = Some(graph);
        self
    }

    pub fn math_notation(mut self, text: impl Into<String>) -> Self {
        self.math_notation = Some(text.into());
        self
    }

    pub fn cell_colors(mut self, colors: Grid) -> Self {
        self.cell_colors = Some(colors);
        self
    }

    pub fn operators(mut self, answer: OperatorAnswer) -> Self {
        self.operators = Some(answer);
        self
    }

    pub fn build(self) -> Result<Scm, ScmError> {
        if !valid_id(&self.id) {
            return Err(ScmError::BadId(self.id));
        }
        if let Some(&bad) = self.palette.iter().find(|&&c| c > MAX_COLOR) {
            return Err(ScmError::BadPalette(bad));
        }
        if let Some(g) = &self.graph {
            if !g.directed_part_is_acyclic() {
                return Err(ScmError::CyclicGraph);
            }
        }
        Ok(Scm {
            id: self.id,
            theme: self.theme,
            exogenous: self.exogenous,
            program: self.program,
            graph: self.graph,
            math_notation: self.math_notation,
            size_params: self.size_params,
            palette: self.palette,
            cell_colors: self.cell_colors,
            edits: Vec::new(),
            operators: self.operators,
        })
    }
}

impl Scm {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn theme(&self) -> Theme {
        self.theme
    }

    pub fn exogenous(&self) -> &ExogenousSpec {
        &self.exogenous
    }

    pub fn program(&self) -> &StructuralProgram {
        &self.program
    }

    pub fn graph(&self) -> Option<&CausalGraph> {
        self.graph.as_ref()
    }

    pub fn math_notation(&self) -> Option<&str> {
        self.math_notation.as_deref()
    }

    pub fn size_params(&self) -> (usize, usize) {
        self.size_params
    }

    pub fn palette(&self) -> &[u8] {
        &self.palette
    }

    pub fn cell_colors(&self) -> Option<&Grid> {
        self.cell_colors.as_ref()
    }

    /// Discovery ground truth, present on logical-family models.
    pub fn operators(&self) -> Option<&OperatorAnswer> {
        self.operators.as_ref()
    }

    pub fn edits(&self) -> &[Intervention] {
        &self.edits
    }

    pub fn is_submodel(&self) -> bool {
        !self.edits.is_empty()
    }

    /// Samples a context from this model's exogenous spec.
    pub fn sample_context(&self, seed_value: u64) -> ExogenousContext {
        self.exogenous.sample(seed_value)
    }

    /// Runs the structural program on a context: input mechanisms, then any
    /// submodel edits, then the rule. Pure in `(self, ctx)`.
    pub fn evaluate(&self, ctx: &ExogenousContext) -> Result<Evaluation, ScmError> {
        if ctx.shape() != self.exogenous.shape() {
            return Err(ScmError::ContextMismatch {
                expected: self.exogenous.shape(),
                got: ctx.shape(),
            });
        }
        let mut input = self.program.input_from_context(ctx)?;
        for edit in &self.edits {
            input = edit.apply(&input, self.cell_colors.as_ref())?;
        }
        let out = self.program.rule(&input)?;
        Ok(Evaluation { pair: Pair::new(input, out.output), features: out.features })
    }

    /// Convenience: sample a context and evaluate it.
    pub fn sample_pair(&self, seed_value: u64) -> Result<Pair, ScmError> {
        Ok(self.evaluate(&self.sample_context(seed_value))?.pair)
    }

    /// Returns the submodel induced by `iv`. The receiver is untouched;
    /// the submodel shares the exogenous spec and appends the edit.
    pub fn apply_intervention(&self, iv: &Intervention) -> Result<Scm, ScmError> {
        iv.validate()?;
        let mut sub = self.clone();
        sub.edits.push(iv.clone());
        Ok(sub)
    }
}

/// One counterfactual outcome: the intervention and the pair it produced
/// under the shared exogenous context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterfactualPair {
    pub intervention: Intervention,
    pub pair: Pair,
}

/// Result of a counterfactual query: every entry was produced by holding
/// `context` fixed and evaluating one intervention's submodel, alongside
/// the factual base pair they all perturb.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterfactualSet {
    pub context: ExogenousContext,
    pub base: Pair,
    pub pairs: Vec<CounterfactualPair>,
}

/// Evaluates each intervention's submodel on the same exogenous context.
pub fn counterfactual(
    scm: &Scm,
    ctx: &ExogenousContext,
    ivs: &[Intervention],
) -> Result<CounterfactualSet, ScmError> {
    if ivs.is_empty() {
        return Err(ScmError::NoInterventions);
    }
    let base = scm.evaluate(ctx)?.pair;
    let mut pairs = Vec::with_capacity(ivs.len());
    for iv in ivs {
        let submodel = scm.apply_intervention(iv)?;
        let eval = submodel.evaluate(ctx)?;
        pairs.push(CounterfactualPair { intervention: iv.clone(), pair: eval.pair });
    }
    Ok(CounterfactualSet { context: ctx.clone(), base, pairs })
}

/// Which layer of the hierarchy a distribution sample comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Level {
    /// Observational draws from the base model.
    L1,
    /// Draws from the submodel induced by the intervention.
    L2(Intervention),
}

/// `n` independent draws, flattened row-major (input cells then output
/// cells) and stored column-major for cheap per-variable access.
#[derive(Debug, Clone)]
pub struct DistributionSample {
    columns: Vec<Vec<u8>>,
    n: usize,
    input_shape: (usize, usize),
    output_shape: (usize, usize),
}

impl DistributionSample {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_variables(&self) -> usize {
        self.columns.len()
    }

    pub fn input_cells(&self) -> usize {
        self.input_shape.0 * self.input_shape.1
    }

    pub fn output_cells(&self) -> usize {
        self.output_shape.0 * self.output_shape.1
    }

    pub fn input_shape(&self) -> (usize, usize) {
        self.input_shape
    }

    pub fn output_shape(&self) -> (usize, usize) {
        self.output_shape
    }

    pub fn column(&self, var: usize) -> &[u8] {
        &self.columns[var]
    }

    /// One draw as a flat row (input cells then output cells).
    pub fn row(&self, idx: usize) -> Vec<u8> {
        self.columns.iter().map(|col| col[idx]).collect()
    }
}

/// Draws `n` samples at the requested level. Per-draw seeds are derived
/// from `seed_value` by stream index, so any single draw is regenerable.
pub fn sample_distribution(
    scm: &Scm,
    n: usize,
    level: Level,
    seed_value: u64,
) -> Result<DistributionSample, ScmError> {
    assert!(n >= 1, "sample size must be at least 1");
    let model = match &level {
        Level::L1 => scm.clone(),
        Level::L2(iv) => scm.apply_intervention(iv)?,
    };
    let first = model.evaluate(&model.sample_context(seed::derive(seed_value, 0)))?;
    let input_shape = first.pair.input.shape();
    let output_shape = first.pair.output.shape();
    let width = input_shape.0 * input_shape.1 + output_shape.0 * output_shape.1;
    let mut columns = vec![Vec::with_capacity(n); width];
    let mut push_row = |pair: &Pair| {
        for (i, &v) in pair.input.cells().iter().chain(pair.output.cells()).enumerate() {
            columns[i].push(v);
        }
    };
    push_row(&first.pair);
    for draw in 1..n {
        let ctx = model.sample_context(seed::derive(seed_value, draw as u64));
        let eval = model.evaluate(&ctx)?;
        if eval.pair.input.shape() != input_shape || eval.pair.output.shape() != output_shape {
            return Err(ScmError::Rule(format!(
                "draw {draw} changed shape; distribution sampling needs fixed-shape models"
            )));
        }
        push_row(&eval.pair);
    }
    Ok(DistributionSample { columns, n, input_shape, output_shape })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    /// Tiny 2x2 identity model: x = u, y = x.
    pub(crate) fn identity_scm(rows: usize, cols: usize) -> Scm {
        let spec = ExogenousSpec::uniform(
            rows,
            cols,
            VariableSpec::Categorical { support: vec![0, 3], probs: vec![0.5, 0.5] },
        )
        .unwrap();
        let (r, c) = (rows, cols);
        let program = StructuralProgram::new(
            Arc::new(move |ctx: &ExogenousContext| {
                Grid::new(r, c, ctx.values().to_vec()).map_err(ScmError::from)
            }),
            Arc::new(|x: &Grid| Ok(RuleOutput::plain(x.clone()))),
            "x = u\ny = x",
        );
        ScmBuilder::new("SCMtest", Theme::Ordering, spec, program, (rows, cols), vec![0, 3])
            .build()
            .unwrap()
    }

    #[test]
    fn id_format_enforced() {
        let base = identity_scm(2, 2);
        let program = base.program.clone();
        let bad = ScmBuilder::new(
            "scm-bad",
            Theme::Logical,
            base.exogenous.clone(),
            program,
            (2, 2),
            vec![0],
        )
        .build();
        assert!(matches!(bad, Err(ScmError::BadId(_))));
    }

    #[test]
    fn evaluate_is_pure_and_shape_checked() {
        let scm = identity_scm(2, 2);
        let ctx = scm.sample_context(5);
        let a = scm.evaluate(&ctx).unwrap();
        let b = scm.evaluate(&ctx).unwrap();
        assert_eq!(a, b);
        let wrong = ExogenousContext::from_values(3, 3, vec![0; 9]);
        assert!(matches!(scm.evaluate(&wrong), Err(ScmError::ContextMismatch { .. })));
    }

    #[test]
    fn submodel_isolation() {
        let scm = identity_scm(2, 2);
        let iv = Intervention::new(InterventionKind::HardFix {
            cells: RegionSelector::rect(0, 1, 0, 2),
            value: 3,
        });
        let sub = scm.apply_intervention(&iv).unwrap();
        assert!(scm.edits().is_empty());
        assert_eq!(sub.edits().len(), 1);
        let ctx = scm.sample_context(3);
        // Interleaved evaluations stay independent and correct.
        let base1 = scm.evaluate(&ctx).unwrap();
        let sub1 = sub.evaluate(&ctx).unwrap();
        let base2 = scm.evaluate(&ctx).unwrap();
        assert_eq!(base1, base2);
        assert_eq!(sub1.pair.input.row(0), &[3, 3]);
        assert_eq!(base1.pair.input.row(1), sub1.pair.input.row(1));
    }

    #[test]
    fn counterfactual_identity_matches_factual() {
        let scm = identity_scm(2, 3);
        let ctx = scm.sample_context(11);
        let set = counterfactual(&scm, &ctx, &[Intervention::identity()]).unwrap();
        assert_eq!(set.pairs.len(), 1);
        assert_eq!(set.pairs[0].pair, set.base);
        assert_eq!(set.context, ctx);
    }

    #[test]
    fn counterfactual_requires_interventions() {
        let scm = identity_scm(2, 2);
        let ctx = scm.sample_context(1);
        assert!(matches!(counterfactual(&scm, &ctx, &[]), Err(ScmError::NoInterventions)));
    }

    #[test]
    fn counterfactual_rerun_reproduces() {
        let scm = identity_scm(2, 2);
        let ctx = scm.sample_context(42);
        let iv = Intervention::new(InterventionKind::HardFix {
            cells: RegionSelector::rect(0, 2, 0, 1),
            value: 0,
        });
        let a = counterfactual(&scm, &ctx, &[iv.clone()]).unwrap();
        let b = counterfactual(&scm, &ctx, &[iv]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distribution_single_draw_matches_evaluate() {
        let scm = identity_scm(2, 2);
        let sample = sample_distribution(&scm, 1, Level::L1, 9).unwrap();
        let ctx = scm.sample_context(seed::derive(9, 0));
        let eval = scm.evaluate(&ctx).unwrap();
        let expected: Vec<u8> = eval
            .pair
            .input
            .cells()
            .iter()
            .chain(eval.pair.output.cells())
            .copied()
            .collect();
        assert_eq!(sample.row(0), expected);
    }

    #[test]
    fn l2_hard_fix_column_is_constant() {
        let scm = identity_scm(2, 2);
        let iv = Intervention::new(InterventionKind::HardFix {
            cells: RegionSelector::rect(0, 1, 0, 2),
            value: 3,
        });
        let sample = sample_distribution(&scm, 50, Level::L2(iv), 4).unwrap();
        for var in 0..2 {
            assert!(sample.column(var).iter().all(|&v| v == 3));
        }
    }
}

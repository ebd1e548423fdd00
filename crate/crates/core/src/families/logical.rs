//! Logical task families: stacked color blocks combined elementwise by
//! Boolean operators (any nonzero cell counts as true).
//!
//! Three shapes of causal function are supported: a single operator over
//! two blocks, operators alternating by output row over two blocks, and a
//! two-operator composition over three blocks.

use crate::families::FamilyError;
use crate::graph::CausalGraph;
use crate::grid::{Grid, MAX_DIM};
use crate::scm::program::{RuleOutput, StructuralProgram};
use crate::scm::{ExogenousContext, ExogenousSpec, Scm, ScmBuilder, ScmError, Theme, VariableSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

pub use crate::scm::{LogicalOp, OperatorAnswer};

/// How the operator(s) combine the stacked blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalOps {
    /// `out = op(b1, b2)`
    Single(LogicalOp),
    /// Two blocks; even output rows use the first operator, odd rows the
    /// second.
    AlternatingByRow(LogicalOp, LogicalOp),
    /// Three blocks; `out = outer(inner(b1, b2), b3)`.
    Composed { inner: LogicalOp, outer: LogicalOp },
}

impl LogicalOps {
    pub fn block_count(&self) -> usize {
        match self {
            LogicalOps::Single(_) | LogicalOps::AlternatingByRow(..) => 2,
            LogicalOps::Composed { .. } => 3,
        }
    }

    /// The set of operators involved, plus a composition note when order
    /// matters.
    pub fn operator_answer(&self) -> OperatorAnswer {
        match self {
            LogicalOps::Single(op) => OperatorAnswer { operators: BTreeSet::from([*op]), composition: None },
            LogicalOps::AlternatingByRow(a, b) => OperatorAnswer {
                operators: BTreeSet::from([*a, *b]),
                composition: Some(format!(
                    "{} on even output rows, {} on odd output rows",
                    a.upper(),
                    b.upper()
                )),
            },
            LogicalOps::Composed { inner, outer } => OperatorAnswer {
                operators: BTreeSet::from([*inner, *outer]),
                composition: Some(format!("(P1 {} P2) {} P3", inner.upper(), outer.upper())),
            },
        }
    }

    fn combine(&self, row: usize, blocks: &[bool]) -> bool {
        match self {
            LogicalOps::Single(op) => op.apply(blocks[0], blocks[1]),
            LogicalOps::AlternatingByRow(even, odd) => {
                let op = if row % 2 == 0 { *even } else { *odd };
                op.apply(blocks[0], blocks[1])
            }
            LogicalOps::Composed { inner, outer } => {
                outer.apply(inner.apply(blocks[0], blocks[1]), blocks[2])
            }
        }
    }
}

/// Full specification of a logical family variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalOpSpec {
    pub ops: LogicalOps,
    pub block_colors: Vec<u8>,
    pub out_color: u8,
}

impl LogicalOpSpec {
    pub fn validate(&self) -> Result<(), FamilyError> {
        let k = self.ops.block_count();
        if self.block_colors.len() != k {
            return Err(FamilyError::BadSpec(format!(
                "{k} blocks need {k} block colors, got {}",
                self.block_colors.len()
            )));
        }
        if self.block_colors.iter().any(|&c| c == 0) {
            return Err(FamilyError::BadSpec("block colors must be nonzero".into()));
        }
        let distinct: BTreeSet<u8> = self.block_colors.iter().copied().collect();
        if distinct.len() != self.block_colors.len() {
            return Err(FamilyError::BadSpec("block colors must be distinct".into()));
        }
        if self.out_color == 0 {
            return Err(FamilyError::BadSpec("output color must be nonzero".into()));
        }
        Ok(())
    }
}

/// Builds a logical SCM: input is `k` stacked `h x w` blocks where block
/// `b` holds `block_colors[b] * u`, output is `h x w` with
/// `out_color * op` applied elementwise across blocks.
pub fn build_logical(id: &str, spec: &LogicalOpSpec, h: usize, w: usize) -> Result<Scm, FamilyError> {
    spec.validate()?;
    let k = spec.ops.block_count();
    let input_rows = k * h;
    if h == 0 || w == 0 || w > MAX_DIM || input_rows > MAX_DIM {
        return Err(FamilyError::SizeError(format!(
            "stacked input is {input_rows}x{w}; blocks must satisfy {k}*h <= {MAX_DIM} and w <= {MAX_DIM}"
        )));
    }

    let exogenous = ExogenousSpec::uniform(input_rows, w, VariableSpec::Bernoulli { p: 0.5 })?;

    let block_colors = spec.block_colors.clone();
    let ops = spec.ops;
    let out_color = spec.out_color;

    let colors_for_input = block_colors.clone();
    let input_fn = Arc::new(move |ctx: &ExogenousContext| -> Result<Grid, ScmError> {
        let mut cells = Vec::with_capacity(input_rows * w);
        for r in 0..input_rows {
            let color = colors_for_input[r / h];
            for c in 0..w {
                cells.push(if ctx.get(r, c) != 0 { color } else { 0 });
            }
        }
        Grid::new(input_rows, w, cells).map_err(ScmError::from)
    });

    let rule_fn = Arc::new(move |x: &Grid| -> Result<RuleOutput, ScmError> {
        if x.shape() != (input_rows, w) {
            return Err(ScmError::RuleShape { expected: (input_rows, w), got: x.shape() });
        }
        let mut cells = Vec::with_capacity(h * w);
        let mut blocks = vec![false; k];
        for r in 0..h {
            for c in 0..w {
                for (b, slot) in blocks.iter_mut().enumerate() {
                    *slot = x.get(b * h + r, c) != 0;
                }
                cells.push(if ops.combine(r, &blocks) { out_color } else { 0 });
            }
        }
        Ok(RuleOutput::plain(Grid::new(h, w, cells)?))
    });

    let mut cell_color_rows = Vec::with_capacity(input_rows);
    for r in 0..input_rows {
        cell_color_rows.push(vec![block_colors[r / h]; w]);
    }
    let cell_colors = Grid::from_rows(cell_color_rows)?;

    let source_text = logical_source_text(spec, h, w);
    let math_notation = logical_math_notation(spec, h, w);

    let mut palette: Vec<u8> = vec![0];
    palette.extend(&spec.block_colors);
    palette.push(spec.out_color);
    palette.sort_unstable();
    palette.dedup();

    let graph = logical_graph(k, h, w);

    let scm = ScmBuilder::new(id, Theme::Logical, exogenous, StructuralProgram::new(input_fn, rule_fn, source_text), (h, w), palette)
        .graph(graph)
        .math_notation(math_notation)
        .cell_colors(cell_colors)
        .operators(spec.ops.operator_answer())
        .build()?;
    Ok(scm)
}

/// Declared adjacency: output cell (i, j) has one parent per block, the
/// input cell at the same offset within that block.
fn logical_graph(k: usize, h: usize, w: usize) -> CausalGraph {
    let n_in = k * h * w;
    let n_out = h * w;
    let mut g = CausalGraph::empty(n_in + n_out);
    for i in 0..h {
        for j in 0..w {
            let out_var = n_in + i * w + j;
            for b in 0..k {
                let in_var = (b * h + i) * w + j;
                g.add_directed(in_var, out_var).expect("indices in range");
            }
        }
    }
    g
}

fn op_expr(ops: &LogicalOps, h: usize) -> String {
    let b = |idx: usize| format!("x[i + {}, j] != 0", idx * h);
    match ops {
        LogicalOps::Single(op) => format!("{}(x[i, j] != 0, {})", op.name(), b(1)),
        LogicalOps::AlternatingByRow(even, odd) => format!(
            "({}(x[i, j] != 0, {}) if i % 2 == 0 else {}(x[i, j] != 0, {}))",
            even.name(),
            b(1),
            odd.name(),
            b(1)
        ),
        LogicalOps::Composed { inner, outer } => {
            format!("{}({}(x[i, j] != 0, {}), {})", outer.name(), inner.name(), b(1), b(2))
        }
    }
}

fn logical_source_text(spec: &LogicalOpSpec, h: usize, w: usize) -> String {
    let k = spec.ops.block_count();
    let mut lines = Vec::new();
    lines.push(format!("# logical family: {} stacked {}x{} blocks", k, h, w));
    lines.push(format!("u[i, j] ~ Ber(0.5) for i in [0, {}), j in [0, {})", k * h, w));
    for (b, color) in spec.block_colors.iter().enumerate() {
        lines.push(format!(
            "x[i, j] = {color} * u[i, j] for i in [{}, {}), j in [0, {w})",
            b * h,
            (b + 1) * h
        ));
    }
    lines.push(format!(
        "y[i, j] = {} * {} for i in [0, {h}), j in [0, {w})",
        spec.out_color,
        op_expr(&spec.ops, h)
    ));
    lines.join("\n")
}

fn logical_math_notation(spec: &LogicalOpSpec, h: usize, w: usize) -> String {
    let k = spec.ops.block_count();
    let mut cases: Vec<String> = Vec::new();
    for (b, color) in spec.block_colors.iter().enumerate() {
        cases.push(format!("{color}*u[i,j] if {} <= i < {}", b * h, (b + 1) * h));
    }
    format!(
        "u[i,j] ~ Ber(0.5), i in [0,{}), j in [0,{w}); x[i,j] = {{ {} }}; y[i,j] = {}*{}",
        k * h,
        cases.join("; "),
        spec.out_color,
        op_expr(&spec.ops, h)
    )
}

/// The classic two-block xor model: 3x5 blocks colored 9 over 4, output 6.
/// Reconstruction of ARC-AGI-1 task 31d5ba1a.
pub fn classic_xor() -> Scm {
    build_logical(
        "SCMdky5",
        &LogicalOpSpec {
            ops: LogicalOps::Single(LogicalOp::Xor),
            block_colors: vec![9, 4],
            out_color: 6,
        },
        3,
        5,
    )
    .expect("classic parameters are valid")
}

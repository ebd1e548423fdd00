//! Brute-force adjacency oracle for declared causal graphs.
//!
//! The graph is probed, not trusted: an edge input-cell -> output-cell is
//! recorded iff some pair of exogenous contexts differing only at that
//! cell produces differing values at the output cell. Probing every cell
//! against every support value over a bank of base contexts is quadratic
//! in cells, so it is gated to small models and meant as a test-time
//! oracle for the declared annotation.

use crate::graph::CausalGraph;
use crate::scm::{sample_exogenous, Scm, ScmError};

/// Largest exogenous cell count `verify_graph` will probe. Covers the
/// classic 6x5 family and three-block composed variants at 4x4 (48 cells).
pub const VERIFY_MAX_CELLS: usize = 64;

const PROBE_BASES: u64 = 16;

/// Recomputes the adjacency between input cells and output cells by
/// exhaustive perturbation. Returns an error for models too large to
/// probe (shrink `size_params` first) or whose input mechanisms are not
/// cellwise in the exogenous layer.
pub fn verify_graph(scm: &Scm) -> Result<CausalGraph, ScmError> {
    let spec = scm.exogenous();
    let cells = spec.len();
    if cells > VERIFY_MAX_CELLS {
        return Err(ScmError::Rule(format!(
            "exogenous grid has {cells} cells; verify_graph is gated to {VERIFY_MAX_CELLS}"
        )));
    }

    let base_eval = scm.evaluate(&sample_exogenous(spec, 0))?;
    let n_in = base_eval.pair.input.cells().len();
    let n_out = base_eval.pair.output.cells().len();
    if n_in != cells {
        return Err(ScmError::Rule(
            "verify_graph expects one input cell per exogenous cell".to_string(),
        ));
    }
    let mut graph = CausalGraph::empty(n_in + n_out);

    for base_seed in 0..PROBE_BASES {
        let base_ctx = sample_exogenous(spec, base_seed);
        let base = scm.evaluate(&base_ctx)?;
        for cell in 0..cells {
            let current = base_ctx.values()[cell];
            for alt in spec.variable(cell).support() {
                if alt == current {
                    continue;
                }
                let perturbed = scm.evaluate(&base_ctx.with_cell(cell, alt))?;
                // Input mechanisms must be cellwise: a change at exogenous
                // cell k may move input cell k only.
                for (idx, (a, b)) in base
                    .pair
                    .input
                    .cells()
                    .iter()
                    .zip(perturbed.pair.input.cells())
                    .enumerate()
                {
                    if a != b && idx != cell {
                        return Err(ScmError::Rule(format!(
                            "exogenous cell {cell} moved input cell {idx}; non-cellwise input mechanisms are not probeable"
                        )));
                    }
                }
                for (out_idx, (a, b)) in base
                    .pair
                    .output
                    .cells()
                    .iter()
                    .zip(perturbed.pair.output.cells())
                    .enumerate()
                {
                    if a != b {
                        graph
                            .add_directed(cell, n_in + out_idx)
                            .map_err(|e| ScmError::Rule(e.to_string()))?;
                    }
                }
            }
        }
    }
    Ok(graph)
}

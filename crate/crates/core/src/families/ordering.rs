//! Ordering task family: lines are reordered by how full they are.

use crate::families::FamilyError;
use crate::grid::{Grid, MAX_DIM};
use crate::scm::program::{FeatureValue, RuleOutput, StructuralProgram};
use crate::scm::{ExogenousContext, ExogenousSpec, Scm, ScmBuilder, ScmError, Theme, VariableSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortAxis {
    Columns,
    Rows,
}

impl SortAxis {
    pub fn name(self) -> &'static str {
        match self {
            SortAxis::Columns => "columns",
            SortAxis::Rows => "rows",
        }
    }
}

/// Sort model: output lines are the input's columns (or rows) reordered by
/// nonzero count, descending, ties keeping the original order.
/// Artifact-defined ordering representative "sort" v1.
pub fn build_sort(
    id: &str,
    h: usize,
    w: usize,
    colors: Vec<u8>,
    axis: SortAxis,
) -> Result<Scm, FamilyError> {
    if h == 0 || w == 0 || h > MAX_DIM || w > MAX_DIM {
        return Err(FamilyError::SizeError(format!("input {h}x{w} outside 1..={MAX_DIM}")));
    }
    if colors.is_empty() || colors.contains(&0) {
        return Err(FamilyError::BadSpec("sort needs nonzero fill colors".into()));
    }
    let mut support = vec![0u8];
    support.extend(&colors);
    let mut probs = vec![0.55f64];
    probs.extend(std::iter::repeat(0.45 / colors.len() as f64).take(colors.len()));

    let exogenous = ExogenousSpec::uniform(
        h,
        w,
        VariableSpec::Categorical { support: support.clone(), probs },
    )?;

    let input_fn = Arc::new(move |ctx: &ExogenousContext| -> Result<Grid, ScmError> {
        Grid::new(h, w, ctx.values().to_vec()).map_err(ScmError::from)
    });

    let rule_fn = Arc::new(move |x: &Grid| -> Result<RuleOutput, ScmError> {
        let (rows, cols) = x.shape();
        let n_lines = match axis {
            SortAxis::Columns => cols,
            SortAxis::Rows => rows,
        };
        let count_line = |idx: usize| -> usize {
            match axis {
                SortAxis::Columns => (0..rows).filter(|&r| x.get(r, idx) != 0).count(),
                SortAxis::Rows => (0..cols).filter(|&c| x.get(idx, c) != 0).count(),
            }
        };
        let mut order: Vec<usize> = (0..n_lines).collect();
        // Stable sort: ties keep the original index order.
        order.sort_by_key(|&idx| std::cmp::Reverse(count_line(idx)));
        let mut out = Grid::zeros(rows, cols)?;
        for (dst, &src) in order.iter().enumerate() {
            match axis {
                SortAxis::Columns => {
                    for r in 0..rows {
                        out.set(r, dst, x.get(r, src));
                    }
                }
                SortAxis::Rows => {
                    for c in 0..cols {
                        out.set(dst, c, x.get(src, c));
                    }
                }
            }
        }
        let mut features = BTreeMap::new();
        features.insert(
            "order".to_string(),
            FeatureValue::Permutation(order.iter().map(|&i| i as u32).collect()),
        );
        Ok(RuleOutput { output: out, features })
    });

    let source_text = format!(
        "# artifact-defined ordering representative: sort v1 ({})\n\
         u ~ Cat over {{0}} + fill colors, {h}x{w}\n\
         x = u\n\
         y = {} of x reordered by nonzero count descending, ties by original index",
        axis.name(),
        axis.name(),
    );

    let scm = ScmBuilder::new(
        id,
        Theme::Ordering,
        exogenous,
        StructuralProgram::new(input_fn, rule_fn, source_text),
        (h, w),
        support,
    )
    .build()?;
    Ok(scm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::sample_exogenous;

    fn count_nonzero_col(g: &Grid, c: usize) -> usize {
        (0..g.rows()).filter(|&r| g.get(r, c) != 0).count()
    }

    #[test]
    fn already_sorted_input_is_identity() {
        let scm = build_sort("SCMsrt1", 3, 3, vec![7], SortAxis::Columns).unwrap();
        // Column fills 3, 2, 0: already descending.
        let values = vec![7, 7, 0, 7, 7, 0, 7, 0, 0];
        let ctx = ExogenousContext::from_values(3, 3, values.clone());
        let eval = scm.evaluate(&ctx).unwrap();
        assert_eq!(eval.pair.output.cells(), values.as_slice());
    }

    #[test]
    fn matches_brute_force_stable_sort() {
        for (i, axis) in [SortAxis::Columns, SortAxis::Rows].into_iter().enumerate() {
            let scm = build_sort("SCMsrt1", 6, 6, vec![3, 9], axis).unwrap();
            for s in 0..100 {
                let ctx = sample_exogenous(scm.exogenous(), s + 500 * i as u64);
                let eval = scm.evaluate(&ctx).unwrap();
                let x = &eval.pair.input;
                // Oracle: selection of line indices by repeated max scan.
                let n = 6;
                let fill = |idx: usize| match axis {
                    SortAxis::Columns => count_nonzero_col(x, idx),
                    SortAxis::Rows => x.row(idx).iter().filter(|&&v| v != 0).count(),
                };
                let mut remaining: Vec<usize> = (0..n).collect();
                let mut order = Vec::new();
                while !remaining.is_empty() {
                    let best = *remaining
                        .iter()
                        .max_by(|&&a, &&b| fill(a).cmp(&fill(b)).then(b.cmp(&a)))
                        .unwrap();
                    order.push(best);
                    remaining.retain(|&v| v != best);
                }
                for (dst, &src) in order.iter().enumerate() {
                    for k in 0..n {
                        let (got, want) = match axis {
                            SortAxis::Columns => (eval.pair.output.get(k, dst), x.get(k, src)),
                            SortAxis::Rows => (eval.pair.output.get(dst, k), x.get(src, k)),
                        };
                        assert_eq!(got, want, "axis {:?} seed {s}", axis);
                    }
                }
            }
        }
    }
}

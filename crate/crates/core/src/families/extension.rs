//! Extension task family: sparse seed pixels extend to the border.

use crate::families::FamilyError;
use crate::grid::{Grid, MAX_DIM};
use crate::scm::program::{RuleOutput, StructuralProgram};
use crate::scm::{ExogenousContext, ExogenousSpec, Scm, ScmBuilder, ScmError, Theme, VariableSpec};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayDirection {
    Right,
    Left,
    Down,
    Up,
}

impl RayDirection {
    pub fn name(self) -> &'static str {
        match self {
            RayDirection::Right => "right",
            RayDirection::Left => "left",
            RayDirection::Down => "down",
            RayDirection::Up => "up",
        }
    }
}

/// Ray model: every nonzero input pixel is extended in a fixed direction
/// to the grid border. Artifact-defined extension representative "ray" v1.
pub fn build_ray(
    id: &str,
    h: usize,
    w: usize,
    color: u8,
    direction: RayDirection,
) -> Result<Scm, FamilyError> {
    if h == 0 || w == 0 || h > MAX_DIM || w > MAX_DIM {
        return Err(FamilyError::SizeError(format!("input {h}x{w} outside 1..={MAX_DIM}")));
    }
    if color == 0 {
        return Err(FamilyError::BadSpec("ray color must be nonzero".into()));
    }
    let density = 0.08;
    let exogenous = ExogenousSpec::uniform(
        h,
        w,
        VariableSpec::Categorical { support: vec![0, color], probs: vec![1.0 - density, density] },
    )?;

    let input_fn = Arc::new(move |ctx: &ExogenousContext| -> Result<Grid, ScmError> {
        Grid::new(h, w, ctx.values().to_vec()).map_err(ScmError::from)
    });

    let rule_fn = Arc::new(move |x: &Grid| -> Result<RuleOutput, ScmError> {
        let (rows, cols) = x.shape();
        let mut out = Grid::zeros(rows, cols)?;
        for r in 0..rows {
            for c in 0..cols {
                let v = x.get(r, c);
                if v == 0 {
                    continue;
                }
                match direction {
                    RayDirection::Right => (c..cols).for_each(|cc| out.set(r, cc, v)),
                    RayDirection::Left => (0..=c).for_each(|cc| out.set(r, cc, v)),
                    RayDirection::Down => (r..rows).for_each(|rr| out.set(rr, c, v)),
                    RayDirection::Up => (0..=r).for_each(|rr| out.set(rr, c, v)),
                }
            }
        }
        Ok(RuleOutput::plain(out))
    });

    let source_text = format!(
        "# artifact-defined extension representative: ray v1 ({})\n\
         u ~ Cat([0, {color}], p=[{:.2}, {density:.2}]), {h}x{w}\n\
         x = u\n\
         y = x with every nonzero pixel extended {} to the border",
        direction.name(),
        1.0 - density,
        direction.name(),
    );

    let cell_colors = Grid::new(h, w, vec![color; h * w])?;
    let scm = ScmBuilder::new(
        id,
        Theme::Extension,
        exogenous,
        StructuralProgram::new(input_fn, rule_fn, source_text),
        (h, w),
        vec![0, color],
    )
    .cell_colors(cell_colors)
    .build()?;
    Ok(scm)
}

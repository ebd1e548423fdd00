//! Declarative edits to an SCM's input mechanisms.
//!
//! An intervention replaces how input cells are produced from the
//! exogenous context. Because every input mechanism in this testbed is
//! cellwise, each edit is expressible as a pure transform of the realized
//! input grid (using the SCM's per-cell canonical colors where mechanism
//! negation is involved). Downstream effects propagate when the rule
//! recomputes the output from the edited input.

use crate::grid::{Grid, MAX_COLOR};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterventionError {
    #[error("region rows {0}..{1} cols {2}..{3} out of bounds for {4}x{5} grid")]
    RegionOutOfBounds(usize, usize, usize, usize, usize, usize),
    #[error("mask length {got} does not match region size {expected}")]
    MaskLength { expected: usize, got: usize },
    #[error("color {0} outside 0..={MAX_COLOR}")]
    BadColor(u8),
    #[error("logic negation needs the model's per-cell canonical colors")]
    NegationUnsupported,
    #[error("empty region")]
    EmptyRegion,
}

/// A rectangular block of cells, optionally thinned by a row-major mask.
/// Row/col ranges are half-open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSelector {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<bool>>,
}

impl RegionSelector {
    pub fn rect(row_start: usize, row_end: usize, col_start: usize, col_end: usize) -> Self {
        Self { row_start, row_end, col_start, col_end, mask: None }
    }

    /// The whole grid of the given shape.
    pub fn full(rows: usize, cols: usize) -> Self {
        Self::rect(0, rows, 0, cols)
    }

    pub fn validate_for(&self, grid: &Grid) -> Result<(), InterventionError> {
        if self.row_start >= self.row_end || self.col_start >= self.col_end {
            return Err(InterventionError::EmptyRegion);
        }
        if self.row_end > grid.rows() || self.col_end > grid.cols() {
            return Err(InterventionError::RegionOutOfBounds(
                self.row_start,
                self.row_end,
                self.col_start,
                self.col_end,
                grid.rows(),
                grid.cols(),
            ));
        }
        let size = (self.row_end - self.row_start) * (self.col_end - self.col_start);
        if let Some(mask) = &self.mask {
            if mask.len() != size {
                return Err(InterventionError::MaskLength { expected: size, got: mask.len() });
            }
        }
        Ok(())
    }

    fn for_each_cell(&self, mut f: impl FnMut(usize, usize)) {
        let width = self.col_end - self.col_start;
        for r in self.row_start..self.row_end {
            for c in self.col_start..self.col_end {
                let idx = (r - self.row_start) * width + (c - self.col_start);
                if self.mask.as_ref().map_or(true, |m| m[idx]) {
                    f(r, c);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometricOp {
    Rot90,
    Rot180,
    Rot270,
    FlipH,
    FlipV,
}

/// Replacement local mechanisms, restricted to the structural-function
/// vocabulary (constant, scalar color multiply, logical negation) so
/// submodels stay serializable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalMechanism {
    /// Cell becomes the constant color.
    Constant(u8),
    /// `color * (cell != 0)`: keeps the activation, recolors it.
    ScaleActivation(u8),
    /// `color * !(cell != 0)`: flips the activation, using the model's
    /// canonical per-cell color.
    NegateActivation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterventionKind {
    HardFix { cells: RegionSelector, value: u8 },
    ColorRemap {
        #[serde(with = "remap_pairs")]
        mapping: BTreeMap<u8, u8>,
    },
    LogicNegate { cells: RegionSelector },
    Geometric { op: GeometricOp },
    FunctionReplace { target: RegionSelector, new_fn: LocalMechanism },
}

/// Color remaps serialize as `[[from, to], ...]` pairs; JSON objects would
/// force string keys.
mod remap_pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(map: &BTreeMap<u8, u8>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().map(|(&k, &v)| (k, v)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u8, u8>, D::Error> {
        Ok(Vec::<(u8, u8)>::deserialize(d)?.into_iter().collect())
    }
}

/// Canonical natural-language phrase for each intervention kind. These are
/// the exact strings substituted into prompt headers.
pub fn canonical_phrase(kind: &InterventionKind) -> &'static str {
    match kind {
        InterventionKind::HardFix { .. } => "fixing some values",
        InterventionKind::ColorRemap { .. } => "changing some colors",
        InterventionKind::LogicNegate { .. } => "inverting some values",
        InterventionKind::Geometric { .. } => "rotating or flipping it",
        InterventionKind::FunctionReplace { .. } => "replacing one of the rules",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intervention {
    #[serde(flatten)]
    pub kind: InterventionKind,
    pub description: String,
}

impl Intervention {
    /// Wraps a kind with its canonical description.
    pub fn new(kind: InterventionKind) -> Self {
        let description = canonical_phrase(&kind).to_string();
        Self { kind, description }
    }

    /// The no-op edit: an empty color remap.
    pub fn identity() -> Self {
        Self::new(InterventionKind::ColorRemap { mapping: BTreeMap::new() })
    }

    pub fn validate(&self) -> Result<(), InterventionError> {
        match &self.kind {
            InterventionKind::HardFix { value, .. } => {
                if *value > MAX_COLOR {
                    return Err(InterventionError::BadColor(*value));
                }
            }
            InterventionKind::ColorRemap { mapping } => {
                for (&k, &v) in mapping {
                    if k > MAX_COLOR {
                        return Err(InterventionError::BadColor(k));
                    }
                    if v > MAX_COLOR {
                        return Err(InterventionError::BadColor(v));
                    }
                }
            }
            InterventionKind::FunctionReplace { new_fn, .. } => match new_fn {
                LocalMechanism::Constant(c) | LocalMechanism::ScaleActivation(c) => {
                    if *c > MAX_COLOR {
                        return Err(InterventionError::BadColor(*c));
                    }
                }
                LocalMechanism::NegateActivation => {}
            },
            InterventionKind::LogicNegate { .. } | InterventionKind::Geometric { .. } => {}
        }
        Ok(())
    }

    /// Applies the edit to a realized input grid. `cell_colors` carries the
    /// canonical nonzero color of every input cell for models that define
    /// one (required by activation-flipping edits).
    pub fn apply(&self, input: &Grid, cell_colors: Option<&Grid>) -> Result<Grid, InterventionError> {
        self.validate()?;
        match &self.kind {
            InterventionKind::HardFix { cells, value } => {
                cells.validate_for(input)?;
                let mut out = input.clone();
                cells.for_each_cell(|r, c| out.set(r, c, *value));
                Ok(out)
            }
            InterventionKind::ColorRemap { mapping } => {
                let mut out = input.clone();
                for r in 0..input.rows() {
                    for c in 0..input.cols() {
                        let v = input.get(r, c);
                        if let Some(&w) = mapping.get(&v) {
                            out.set(r, c, w);
                        }
                    }
                }
                Ok(out)
            }
            InterventionKind::LogicNegate { cells } => {
                let colors = cell_colors.ok_or(InterventionError::NegationUnsupported)?;
                cells.validate_for(input)?;
                let mut out = input.clone();
                cells.for_each_cell(|r, c| {
                    let v = if input.get(r, c) != 0 { 0 } else { colors.get(r, c) };
                    out.set(r, c, v);
                });
                Ok(out)
            }
            InterventionKind::Geometric { op } => Ok(apply_geometric(input, *op)),
            InterventionKind::FunctionReplace { target, new_fn } => {
                target.validate_for(input)?;
                let mut out = input.clone();
                match new_fn {
                    LocalMechanism::Constant(color) => {
                        target.for_each_cell(|r, c| out.set(r, c, *color));
                    }
                    LocalMechanism::ScaleActivation(color) => {
                        target.for_each_cell(|r, c| {
                            let v = if input.get(r, c) != 0 { *color } else { 0 };
                            out.set(r, c, v);
                        });
                    }
                    LocalMechanism::NegateActivation => {
                        let colors = cell_colors.ok_or(InterventionError::NegationUnsupported)?;
                        target.for_each_cell(|r, c| {
                            let v = if input.get(r, c) != 0 { 0 } else { colors.get(r, c) };
                            out.set(r, c, v);
                        });
                    }
                }
                Ok(out)
            }
        }
    }
}

fn apply_geometric(g: &Grid, op: GeometricOp) -> Grid {
    let (rows, cols) = g.shape();
    let (new_rows, new_cols) = match op {
        GeometricOp::Rot90 | GeometricOp::Rot270 => (cols, rows),
        GeometricOp::Rot180 | GeometricOp::FlipH | GeometricOp::FlipV => (rows, cols),
    };
    let mut out = Grid::zeros(new_rows, new_cols).expect("shape within bounds");
    for r in 0..rows {
        for c in 0..cols {
            let v = g.get(r, c);
            match op {
                // rot90 = counterclockwise quarter turn
                GeometricOp::Rot90 => out.set(cols - 1 - c, r, v),
                GeometricOp::Rot180 => out.set(rows - 1 - r, cols - 1 - c, v),
                GeometricOp::Rot270 => out.set(c, rows - 1 - r, v),
                GeometricOp::FlipH => out.set(r, cols - 1 - c, v),
                GeometricOp::FlipV => out.set(rows - 1 - r, c, v),
            }
        }
    }
    out
}

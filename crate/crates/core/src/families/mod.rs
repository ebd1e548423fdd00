//! Concrete SCM constructors for every task family, plus the static
//! dataset registry.

pub mod counting;
pub mod extension;
pub mod logical;
pub mod ordering;
pub mod registry;
pub mod task;

pub use counting::{build_color_count, build_majority, build_tally, classic_color_count};
pub use extension::{build_ray, RayDirection};
pub use logical::{build_logical, classic_xor, LogicalOp, LogicalOpSpec, LogicalOps, OperatorAnswer};
pub use ordering::{build_sort, SortAxis};
pub use registry::{
    build_registry, build_registry_seeded, build_registry_tasks, Registry, RegistryEntry,
    DEFAULT_MASTER_SEED, REGISTRY_SIZE,
};
pub use task::{build_task, intervention_catalog, Annotations, CounterfactualPair, TaskInstance};

use crate::scm::{Scm, ScmError, Theme};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("size error: {0}")]
    SizeError(String),
    #[error("bad family spec: {0}")]
    BadSpec(String),
    #[error("bad task: {0}")]
    BadTask(String),
    #[error("unknown variant {0:?} for theme {1}")]
    UnknownVariant(String, Theme),
    #[error(transparent)]
    Scm(#[from] ScmError),
}

impl From<crate::scm::ExogenousError> for FamilyError {
    fn from(e: crate::scm::ExogenousError) -> Self {
        FamilyError::Scm(ScmError::from(e))
    }
}

impl From<crate::grid::GridError> for FamilyError {
    fn from(e: crate::grid::GridError) -> Self {
        FamilyError::Scm(ScmError::from(e))
    }
}

/// Builds a documented representative model for the counting, extension,
/// and ordering themes. Variant ids:
/// counting - "histogram", "majority", "tally";
/// extension - "ray-right", "ray-left", "ray-down", "ray-up";
/// ordering - "sort-columns", "sort-rows".
pub fn build_theme_representative(
    theme: Theme,
    variant_id: &str,
    size: (usize, usize),
) -> Result<Scm, FamilyError> {
    let (h, w) = size;
    match (theme, variant_id) {
        (Theme::Counting, "histogram") => build_color_count(
            "SCMm5ob",
            h,
            w,
            vec![0, 4, 2, 9, 3],
            vec![0.8, 0.05, 0.05, 0.05, 0.05],
        ),
        (Theme::Counting, "majority") => build_majority("SCMcnt1", h, w, vec![3, 7]),
        (Theme::Counting, "tally") => build_tally("SCMcnt2", h, w, 6, 1),
        (Theme::Extension, "ray-right") => build_ray("SCMray1", h, w, 8, RayDirection::Right),
        (Theme::Extension, "ray-down") => build_ray("SCMray2", h, w, 3, RayDirection::Down),
        (Theme::Extension, "ray-left") => build_ray("SCMray3", h, w, 6, RayDirection::Left),
        (Theme::Extension, "ray-up") => build_ray("SCMray4", h, w, 2, RayDirection::Up),
        (Theme::Ordering, "sort-columns") => build_sort("SCMsrt1", h, w, vec![3, 9], SortAxis::Columns),
        (Theme::Ordering, "sort-rows") => build_sort("SCMsrt2", h, w, vec![1, 6], SortAxis::Rows),
        _ => Err(FamilyError::UnknownVariant(variant_id.to_string(), theme)),
    }
}

//! The static 50-task registry: 10 counting, 10 extension, 20 logical,
//! 10 ordering, all derived deterministically from one master seed.
//!
//! Logical sizes follow the published family descriptions where they fit
//! the 30-row grid cap once blocks are stacked; the largest variants are
//! substituted with the largest conforming sizes. The per-size palette
//! table lives here and is emitted into the registry manifest.

use crate::families::counting::{build_color_count, build_majority, build_tally};
use crate::families::extension::{build_ray, RayDirection};
use crate::families::logical::{build_logical, LogicalOp, LogicalOpSpec, LogicalOps};
use crate::families::ordering::{build_sort, SortAxis};
use crate::families::task::{build_task, TaskInstance};
use crate::families::FamilyError;
use crate::scm::{Scm, Theme};
use crate::seed;
use serde_json::json;

pub const DEFAULT_MASTER_SEED: u64 = 1729;
pub const REGISTRY_SIZE: usize = 50;
const CF_PER_DEMO: usize = 5;

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub task: TaskInstance,
    pub scm: Scm,
}

#[derive(Debug, Clone)]
pub struct Registry {
    pub master_seed: u64,
    pub entries: Vec<RegistryEntry>,
    /// Annotated classics kept outside the 50-task dataset.
    pub extras: Vec<RegistryEntry>,
}

impl Registry {
    pub fn tasks(&self) -> impl Iterator<Item = &TaskInstance> {
        self.entries.iter().map(|e| &e.task)
    }

    /// Looks up a task id among the 50 entries and the extras.
    pub fn find(&self, task_id: &str) -> Option<&RegistryEntry> {
        self.entries
            .iter()
            .chain(&self.extras)
            .find(|e| e.task.id == task_id)
    }

    pub fn theme_counts(&self) -> std::collections::BTreeMap<Theme, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.task.theme).or_insert(0) += 1;
        }
        counts
    }

    /// Manifest: ordered task ids, themes, sizes, seeds, palettes, and
    /// counterfactual allocations.
    pub fn manifest_json(&self) -> serde_json::Value {
        json!({
            "master_seed": self.master_seed,
            "tasks": self.entries.iter().map(|e| {
                let (h, w) = e.scm.size_params();
                json!({
                    "id": e.task.id,
                    "scm_id": e.scm.id(),
                    "theme": e.task.theme.as_str(),
                    "size": [h, w],
                    "palette": e.scm.palette(),
                    "seed": e.task.seed,
                    "counterfactual_allocation": e.task.counterfactual_allocation(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

fn single(op: LogicalOp, blocks: (u8, u8), out: u8) -> LogicalOpSpec {
    LogicalOpSpec { ops: LogicalOps::Single(op), block_colors: vec![blocks.0, blocks.1], out_color: out }
}

fn alternating(blocks: (u8, u8), out: u8) -> LogicalOpSpec {
    LogicalOpSpec {
        ops: LogicalOps::AlternatingByRow(LogicalOp::Or, LogicalOp::And),
        block_colors: vec![blocks.0, blocks.1],
        out_color: out,
    }
}

fn composed(blocks: (u8, u8, u8), out: u8) -> LogicalOpSpec {
    LogicalOpSpec {
        ops: LogicalOps::Composed { inner: LogicalOp::And, outer: LogicalOp::Xor },
        block_colors: vec![blocks.0, blocks.1, blocks.2],
        out_color: out,
    }
}

/// Block/output palette per two-block size.
fn palette_for(h: usize) -> ((u8, u8), u8) {
    match h {
        8 => ((2, 9), 4),
        10 => ((4, 5), 2),
        12 => ((1, 8), 3),
        _ => ((3, 7), 8),
    }
}

fn build_variant(index: usize) -> Result<(String, Scm), FamilyError> {
    let hist_a = (vec![0u8, 4, 2, 9, 3], vec![0.8, 0.05, 0.05, 0.05, 0.05]);
    let hist_b = (vec![0u8, 1, 2, 3, 4], vec![0.8, 0.05, 0.05, 0.05, 0.05]);

    let scm = match index {
        // logical: single-operator family over two blocks
        0..=11 => {
            let ops = [LogicalOp::And, LogicalOp::Or, LogicalOp::Xor];
            let sizes = [10usize, 12, 15, 8];
            let op = ops[index % 3];
            let h = sizes[index / 3];
            let (blocks, out) = palette_for(h);
            let scm = build_logical("SCMdky5", &single(op, blocks, out), h, h)?;
            return Ok((format!("SCMdky5-{}-{h}x{h}", op.name()), scm));
        }
        // logical: operators alternating by input row
        12..=15 => {
            let sizes = [10usize, 12, 15, 8];
            let h = sizes[index - 12];
            let (blocks, out) = palette_for(h);
            let scm = build_logical("SCMu3am", &alternating(blocks, out), h, h)?;
            return Ok((format!("SCMu3am-orand-{h}x{h}"), scm));
        }
        // logical: composed operators (xor after and) over three blocks
        16..=19 => {
            let sizes = [6usize, 8, 10, 9];
            let h = sizes[index - 16];
            let scm = build_logical("SCMtcbq", &composed((4, 5, 2), 1), h, h)?;
            return Ok((format!("SCMtcbq-andxor-{h}x{h}"), scm));
        }
        // counting: histograms
        20..=22 => {
            let sizes = [10usize, 12, 15];
            let h = sizes[index - 20];
            let scm = build_color_count("SCMm5ob", h, h, hist_a.0.clone(), hist_a.1.clone())?;
            return Ok((format!("SCMm5ob-a-{h}x{h}"), scm));
        }
        23..=25 => {
            let sizes = [10usize, 12, 15];
            let h = sizes[index - 23];
            let scm = build_color_count("SCMm5ob", h, h, hist_b.0.clone(), hist_b.1.clone())?;
            return Ok((format!("SCMm5ob-b-{h}x{h}"), scm));
        }
        26 => build_majority("SCMcnt1", 9, 9, vec![3, 7])?,
        27 => build_majority("SCMcnt1", 11, 11, vec![2, 8])?,
        28 => build_tally("SCMcnt2", 8, 8, 6, 1)?,
        29 => build_tally("SCMcnt2", 10, 10, 4, 5)?,
        // extension: rays
        30..=32 => {
            let sizes = [10usize, 12, 15];
            let h = sizes[index - 30];
            let scm = build_ray("SCMray1", h, h, 8, RayDirection::Right)?;
            return Ok((format!("SCMray1-right-{h}x{h}"), scm));
        }
        33..=35 => {
            let sizes = [10usize, 12, 15];
            let h = sizes[index - 33];
            let scm = build_ray("SCMray2", h, h, 3, RayDirection::Down)?;
            return Ok((format!("SCMray2-down-{h}x{h}"), scm));
        }
        36 | 37 => {
            let h = if index == 36 { 9 } else { 11 };
            let scm = build_ray("SCMray3", h, h, 6, RayDirection::Left)?;
            return Ok((format!("SCMray3-left-{h}x{h}"), scm));
        }
        38 | 39 => {
            let h = if index == 38 { 9 } else { 11 };
            let scm = build_ray("SCMray4", h, h, 2, RayDirection::Up)?;
            return Ok((format!("SCMray4-up-{h}x{h}"), scm));
        }
        // ordering: sorted columns / rows
        40..=44 => {
            let sizes = [8usize, 10, 12, 14, 15];
            let h = sizes[index - 40];
            let scm = build_sort("SCMsrt1", h, h, vec![3, 9], SortAxis::Columns)?;
            return Ok((format!("SCMsrt1-cols-{h}x{h}"), scm));
        }
        45..=49 => {
            let sizes = [8usize, 10, 12, 14, 15];
            let h = sizes[index - 45];
            let scm = build_sort("SCMsrt2", h, h, vec![1, 6], SortAxis::Rows)?;
            return Ok((format!("SCMsrt2-rows-{h}x{h}"), scm));
        }
        _ => unreachable!("registry has {REGISTRY_SIZE} variants"),
    };
    let (h, w) = scm.size_params();
    Ok((format!("{}-{h}x{w}", scm.id()), scm))
}

pub fn build_registry_seeded(master_seed: u64) -> Registry {
    let mut entries = Vec::with_capacity(REGISTRY_SIZE);
    for index in 0..REGISTRY_SIZE {
        let (task_id, scm) = build_variant(index).expect("registry variants are valid");
        let task_seed = seed::derive(master_seed, index as u64);
        let task = build_task(&scm, task_id, task_seed, CF_PER_DEMO)
            .expect("registry tasks build cleanly");
        entries.push(RegistryEntry { task, scm });
    }

    let extras = vec![
        {
            let scm = crate::families::logical::classic_xor();
            let task = build_task(&scm, "SCMdky5-xor-3x5", seed::derive(master_seed, 1000), CF_PER_DEMO)
                .expect("classic xor task builds");
            RegistryEntry { task, scm }
        },
        {
            let scm = crate::families::counting::classic_color_count();
            let task = build_task(&scm, "SCMcnt0-10x10", seed::derive(master_seed, 1001), CF_PER_DEMO)
                .expect("classic color-count task builds");
            RegistryEntry { task, scm }
        },
    ];

    Registry { master_seed, entries, extras }
}

pub fn build_registry() -> Registry {
    build_registry_seeded(DEFAULT_MASTER_SEED)
}

/// The 50 task instances in registry order.
pub fn build_registry_tasks() -> Vec<TaskInstance> {
    build_registry().entries.into_iter().map(|e| e.task).collect()
}

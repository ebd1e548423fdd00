//! ARC-compatible JSON encoding of task instances.
//!
//! The top-level object carries `train` and `test` exactly as the official
//! ARC dataset does, so strict consumers can load these files unchanged.
//! Everything this testbed adds (counterfactual pairs, annotations, theme,
//! id, seed) lives under one extra `causal` key that such consumers
//! ignore. Keys serialize in sorted order, so re-encoding is canonical and
//! byte-stable.

use crate::families::task::{Annotations, CounterfactualPair, TaskInstance};
use crate::grid::{Grid, Pair};
use crate::scm::{Intervention, Theme};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArcJsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("decode error at {path}: {reason}")]
    Decode { path: String, reason: String },
}

fn decode_err(path: &str, reason: impl Into<String>) -> ArcJsonError {
    ArcJsonError::Decode { path: path.to_string(), reason: reason.into() }
}

/// Serializes a task to the ARC-compatible document (pretty-printed,
/// canonical key order).
pub fn to_arc_json(task: &TaskInstance) -> String {
    let value = task_to_value(task);
    serde_json::to_string_pretty(&value).expect("task JSON serializes")
}

fn pair_to_value(pair: &Pair) -> Value {
    json!({ "input": pair.input.to_rows(), "output": pair.output.to_rows() })
}

fn task_to_value(task: &TaskInstance) -> Value {
    let counterfactuals: Vec<Value> = task
        .counterfactuals
        .iter()
        .map(|cfs| {
            Value::Array(
                cfs.iter()
                    .map(|cf| {
                        json!({
                            "intervention": serde_json::to_value(&cf.intervention)
                                .expect("intervention serializes"),
                            "input": cf.pair.input.to_rows(),
                            "output": cf.pair.output.to_rows(),
                        })
                    })
                    .collect(),
            )
        })
        .collect();

    let mut annotations = Map::new();
    annotations.insert("source_text".into(), Value::String(task.annotations.source_text.clone()));
    if let Some(m) = &task.annotations.math_notation {
        annotations.insert("math_notation".into(), Value::String(m.clone()));
    }
    if let Some(adj) = &task.annotations.adjacency {
        annotations.insert("adjacency".into(), json!(adj));
    }

    json!({
        "train": task.train.iter().map(pair_to_value).collect::<Vec<_>>(),
        "test": [pair_to_value(&task.test)],
        "causal": {
            "id": task.id,
            "theme": task.theme.as_str(),
            "seed": task.seed,
            "counterfactuals": counterfactuals,
            "annotations": Value::Object(annotations),
        },
    })
}

/// Parses an ARC-compatible document back into a task. Errors name the
/// offending path (e.g. `train[2].output`).
pub fn from_arc_json(text: &str) -> Result<TaskInstance, ArcJsonError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| ArcJsonError::Syntax(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| decode_err("$", "expected an object"))?;

    let train_val = obj.get("train").ok_or_else(|| decode_err("train", "missing"))?;
    let train_arr =
        train_val.as_array().ok_or_else(|| decode_err("train", "expected an array"))?;
    if train_arr.is_empty() {
        return Err(decode_err("train", "needs at least one pair"));
    }
    let mut train = Vec::with_capacity(train_arr.len());
    for (i, item) in train_arr.iter().enumerate() {
        train.push(decode_pair(item, &format!("train[{i}]"))?);
    }

    let test_val = obj.get("test").ok_or_else(|| decode_err("test", "missing"))?;
    let test_arr = test_val.as_array().ok_or_else(|| decode_err("test", "expected an array"))?;
    if test_arr.len() != 1 {
        return Err(decode_err("test", format!("expected exactly one pair, got {}", test_arr.len())));
    }
    let test = decode_pair(&test_arr[0], "test[0]")?;

    let causal = obj
        .get("causal")
        .ok_or_else(|| decode_err("causal", "missing"))?
        .as_object()
        .ok_or_else(|| decode_err("causal", "expected an object"))?;

    let id = causal
        .get("id")
        .and_then(Value::as_str)
        .ok_or_else(|| decode_err("causal.id", "expected a string"))?
        .to_string();
    let theme_str = causal
        .get("theme")
        .and_then(Value::as_str)
        .ok_or_else(|| decode_err("causal.theme", "expected a string"))?;
    let theme: Theme = serde_json::from_value(Value::String(theme_str.to_string()))
        .map_err(|_| decode_err("causal.theme", format!("unknown theme {theme_str:?}")))?;
    let seed = causal
        .get("seed")
        .and_then(Value::as_u64)
        .ok_or_else(|| decode_err("causal.seed", "expected a u64"))?;

    let cf_val = causal
        .get("counterfactuals")
        .ok_or_else(|| decode_err("causal.counterfactuals", "missing"))?
        .as_array()
        .ok_or_else(|| decode_err("causal.counterfactuals", "expected an array"))?;
    if cf_val.len() != train.len() {
        return Err(decode_err(
            "causal.counterfactuals",
            format!("expected one list per train pair ({}), got {}", train.len(), cf_val.len()),
        ));
    }
    let mut counterfactuals = Vec::with_capacity(cf_val.len());
    for (i, per_demo) in cf_val.iter().enumerate() {
        let path = format!("causal.counterfactuals[{i}]");
        let arr = per_demo.as_array().ok_or_else(|| decode_err(&path, "expected an array"))?;
        let mut list = Vec::with_capacity(arr.len());
        for (j, item) in arr.iter().enumerate() {
            let path = format!("{path}[{j}]");
            let obj = item.as_object().ok_or_else(|| decode_err(&path, "expected an object"))?;
            let iv_val = obj
                .get("intervention")
                .ok_or_else(|| decode_err(&format!("{path}.intervention"), "missing"))?;
            let intervention: Intervention = serde_json::from_value(iv_val.clone())
                .map_err(|e| decode_err(&format!("{path}.intervention"), e.to_string()))?;
            let input = decode_grid(
                obj.get("input").ok_or_else(|| decode_err(&format!("{path}.input"), "missing"))?,
                &format!("{path}.input"),
            )?;
            let output = decode_grid(
                obj.get("output").ok_or_else(|| decode_err(&format!("{path}.output"), "missing"))?,
                &format!("{path}.output"),
            )?;
            list.push(CounterfactualPair { intervention, pair: Pair::new(input, output) });
        }
        counterfactuals.push(list);
    }

    let ann = causal
        .get("annotations")
        .ok_or_else(|| decode_err("causal.annotations", "missing"))?
        .as_object()
        .ok_or_else(|| decode_err("causal.annotations", "expected an object"))?;
    let source_text = ann
        .get("source_text")
        .and_then(Value::as_str)
        .ok_or_else(|| decode_err("causal.annotations.source_text", "expected a string"))?
        .to_string();
    let math_notation = match ann.get("math_notation") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(decode_err("causal.annotations.math_notation", "expected a string")),
    };
    let adjacency = match ann.get("adjacency") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            serde_json::from_value::<Vec<Vec<u8>>>(v.clone())
                .map_err(|e| decode_err("causal.annotations.adjacency", e.to_string()))?,
        ),
    };

    Ok(TaskInstance {
        id,
        theme,
        train,
        test,
        counterfactuals,
        annotations: Annotations { source_text, math_notation, adjacency },
        seed,
    })
}

fn decode_pair(value: &Value, path: &str) -> Result<Pair, ArcJsonError> {
    let obj = value.as_object().ok_or_else(|| decode_err(path, "expected an object"))?;
    let input = decode_grid(
        obj.get("input").ok_or_else(|| decode_err(&format!("{path}.input"), "missing"))?,
        &format!("{path}.input"),
    )?;
    let output = decode_grid(
        obj.get("output").ok_or_else(|| decode_err(&format!("{path}.output"), "missing"))?,
        &format!("{path}.output"),
    )?;
    Ok(Pair::new(input, output))
}

fn decode_grid(value: &Value, path: &str) -> Result<Grid, ArcJsonError> {
    let rows: Vec<Vec<u8>> = serde_json::from_value(value.clone())
        .map_err(|e| decode_err(path, e.to_string()))?;
    Grid::from_rows(rows).map_err(|e| decode_err(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::classic_xor;
    use crate::families::task::build_task;
    use proptest::prelude::*;

    fn minimal_task() -> TaskInstance {
        let g = |v| Grid::new(1, 1, vec![v]).unwrap();
        TaskInstance {
            id: "mini".into(),
            theme: Theme::Logical,
            train: vec![Pair::new(g(1), g(2))],
            test: Pair::new(g(3), g(4)),
            counterfactuals: vec![vec![]],
            annotations: Annotations::default(),
            seed: 0,
        }
    }

    #[test]
    fn minimal_round_trip_is_byte_identical() {
        let task = minimal_task();
        let once = to_arc_json(&task);
        let back = from_arc_json(&once).unwrap();
        assert_eq!(to_arc_json(&back), once);
        assert_eq!(back, task);
    }

    #[test]
    fn registry_style_task_survives_round_trip() {
        let scm = classic_xor();
        // 7 counterfactual pairs per demo: 35 pairs total must survive.
        let task = build_task(&scm, "rt", 99, 7).unwrap();
        let text = to_arc_json(&task);
        let back = from_arc_json(&text).unwrap();
        assert_eq!(back, task);
        assert_eq!(back.counterfactuals.iter().map(Vec::len).sum::<usize>(), 35);
        assert_eq!(to_arc_json(&back), text);
    }

    #[test]
    fn missing_output_names_offending_path() {
        let text = r#"{
            "train": [{"input": [[1]]}],
            "test": [{"input": [[1]], "output": [[1]]}],
            "causal": {"id": "x", "theme": "logical", "seed": 0,
                       "counterfactuals": [[]], "annotations": {"source_text": ""}}
        }"#;
        match from_arc_json(text) {
            Err(ArcJsonError::Decode { path, .. }) => assert_eq!(path, "train[0].output"),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn two_test_pairs_rejected() {
        let task = minimal_task();
        let mut value: Value = serde_json::from_str(&to_arc_json(&task)).unwrap();
        let test = value["test"][0].clone();
        value["test"].as_array_mut().unwrap().push(test);
        let text = serde_json::to_string(&value).unwrap();
        assert!(matches!(from_arc_json(&text), Err(ArcJsonError::Decode { path, .. }) if path == "test"));
    }

    #[test]
    fn malformed_cell_value_rejected_with_path() {
        let text = r#"{
            "train": [{"input": [[1]], "output": [[12]]}],
            "test": [{"input": [[1]], "output": [[1]]}],
            "causal": {"id": "x", "theme": "logical", "seed": 0,
                       "counterfactuals": [[]], "annotations": {"source_text": ""}}
        }"#;
        match from_arc_json(text) {
            Err(ArcJsonError::Decode { path, .. }) => assert_eq!(path, "train[0].output"),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    fn arb_grid() -> impl Strategy<Value = Grid> {
        (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u8..=9, r * c)
                .prop_map(move |cells| Grid::new(r, c, cells).unwrap())
        })
    }

    fn arb_pair() -> impl Strategy<Value = Pair> {
        (arb_grid(), arb_grid()).prop_map(|(i, o)| Pair::new(i, o))
    }

    fn arb_task() -> impl Strategy<Value = TaskInstance> {
        (
            proptest::collection::vec(arb_pair(), 1..=5),
            arb_pair(),
            any::<u64>(),
            proptest::sample::select(vec![
                Theme::Counting,
                Theme::Extension,
                Theme::Logical,
                Theme::Ordering,
            ]),
        )
            .prop_map(|(train, test, seed, theme)| {
                let n = train.len();
                TaskInstance {
                    id: format!("prop-{seed:x}"),
                    theme,
                    train,
                    test,
                    counterfactuals: vec![vec![]; n],
                    annotations: Annotations {
                        source_text: "x = u".into(),
                        math_notation: None,
                        adjacency: None,
                    },
                    seed,
                }
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn round_trip_identity(task in arb_task()) {
            let text = to_arc_json(&task);
            let back = from_arc_json(&text).unwrap();
            prop_assert_eq!(&back, &task);
            prop_assert_eq!(to_arc_json(&back), text);
        }
    }
}

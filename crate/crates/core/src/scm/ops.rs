//! Boolean operator vocabulary shared by structural functions, discovery
//! ground truth, and response scoring.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalOp {
    And,
    Or,
    Xor,
}

impl LogicalOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            LogicalOp::And => a && b,
            LogicalOp::Or => a || b,
            LogicalOp::Xor => a != b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicalOp::And => "and",
            LogicalOp::Or => "or",
            LogicalOp::Xor => "xor",
        }
    }

    pub fn upper(self) -> &'static str {
        match self {
            LogicalOp::And => "AND",
            LogicalOp::Or => "OR",
            LogicalOp::Xor => "XOR",
        }
    }

    pub fn from_word(word: &str) -> Option<Self> {
        match word.to_ascii_lowercase().as_str() {
            "and" => Some(LogicalOp::And),
            "or" => Some(LogicalOp::Or),
            "xor" => Some(LogicalOp::Xor),
            _ => None,
        }
    }
}

/// Ground-truth answer for causal-discovery queries: the set of operators
/// acting as causal functions, plus the composition/placement order where
/// one exists (recorded, never required for correctness).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorAnswer {
    pub operators: BTreeSet<LogicalOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<String>,
}

impl OperatorAnswer {
    pub fn single(op: LogicalOp) -> Self {
        Self { operators: BTreeSet::from([op]), composition: None }
    }

    /// Canonical statement form, e.g. "The logical operators are AND and
    /// XOR." Operators list in enum order.
    pub fn canonical_statement(&self) -> String {
        let names: Vec<&str> = self.operators.iter().map(|op| op.upper()).collect();
        format!("The logical operators are {}.", names.join(" and "))
    }
}

//! Causal graphs over flattened grid variables.
//!
//! Variables are indexed row-major: input cells first, then output cells.
//! Edges are either directed or undirected, so the same type serves for
//! declared DAGs and for the partially directed graphs the PC algorithm
//! produces.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("variable index {0} out of range for {1} variables")]
    IndexOutOfRange(usize, usize),
    #[error("self-loop on variable {0}")]
    SelfLoop(usize),
    #[error("graphs have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("adjacency matrix is not {0}x{0}")]
    BadMatrix(usize),
    #[error("directed part contains a cycle")]
    Cyclic,
}

/// Status of the edge between an unordered pair of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeStatus {
    None,
    /// Directed from the lower index to the higher index.
    Forward,
    /// Directed from the higher index to the lower index.
    Backward,
    Undirected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalGraph {
    n: usize,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>, // normalized (min, max)
}

impl CausalGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, directed: BTreeSet::new(), undirected: BTreeSet::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_directed(&mut self, from: usize, to: usize) -> Result<(), GraphError> {
        self.check_pair(from, to)?;
        self.undirected.remove(&norm(from, to));
        self.directed.insert((from, to));
        Ok(())
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check_pair(a, b)?;
        self.directed.remove(&(a, b));
        self.directed.remove(&(b, a));
        self.undirected.insert(norm(a, b));
        Ok(())
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.directed.remove(&(a, b));
        self.directed.remove(&(b, a));
        self.undirected.remove(&norm(a, b));
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(), GraphError> {
        if a >= self.n || b >= self.n {
            return Err(GraphError::IndexOutOfRange(a.max(b), self.n));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        Ok(())
    }

    pub fn status(&self, a: usize, b: usize) -> EdgeStatus {
        let (lo, hi) = norm(a, b);
        if self.undirected.contains(&(lo, hi)) {
            EdgeStatus::Undirected
        } else if self.directed.contains(&(lo, hi)) {
            EdgeStatus::Forward
        } else if self.directed.contains(&(hi, lo)) {
            EdgeStatus::Backward
        } else {
            EdgeStatus::None
        }
    }

    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        self.directed.contains(&(from, to))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&norm(a, b))
    }

    /// True when any edge (directed either way or undirected) joins a and b.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.status(a, b) != EdgeStatus::None
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v && self.adjacent(u, v)).collect()
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed.iter().copied()
    }

    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.undirected.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    /// Direct causes of `v` via directed edges.
    pub fn parents(&self, v: usize) -> Vec<usize> {
        self.directed.iter().filter(|&&(_, t)| t == v).map(|&(s, _)| s).collect()
    }

    /// Checks the directed part for cycles (undirected edges ignored).
    pub fn directed_part_is_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        for &(_, t) in &self.directed {
            indeg[t] += 1;
        }
        let mut queue: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &(s, t) in &self.directed {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push(t);
                    }
                }
            }
        }
        seen == self.n
    }

    /// Builds a fully directed graph from a row-major 0/1 adjacency matrix
    /// (`matrix[i][j] == 1` means i -> j).
    pub fn from_adjacency_matrix(matrix: &[Vec<u8>]) -> Result<Self, GraphError> {
        let n = matrix.len();
        let mut g = Self::empty(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::BadMatrix(n));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    g.add_directed(i, j)?;
                }
            }
        }
        if !g.directed_part_is_acyclic() {
            return Err(GraphError::Cyclic);
        }
        Ok(g)
    }

    /// Row-major 0/1 adjacency matrix of the directed part. Undirected
    /// edges are marked in both directions.
    pub fn to_adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.n]; self.n];
        for &(s, t) in &self.directed {
            m[s][t] = 1;
        }
        for &(a, b) in &self.undirected {
            m[a][b] = 1;
            m[b][a] = 1;
        }
        m
    }
}

fn norm(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Structural Hamming distance: the number of unordered variable pairs
/// whose edge status differs. Missing/extra edges count 1; an edge present
/// on both sides but misoriented (including directed vs undirected)
/// also counts 1.
pub fn shd(pred: &CausalGraph, truth: &CausalGraph) -> Result<usize, GraphError> {
    if pred.n != truth.n {
        return Err(GraphError::SizeMismatch(pred.n, truth.n));
    }
    let mut d = 0;
    for a in 0..pred.n {
        for b in (a + 1)..pred.n {
            if pred.status(a, b) != truth.status(a, b) {
                d += 1;
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> CausalGraph {
        let mut g = CausalGraph::empty(3);
        g.add_directed(0, 1).unwrap();
        g.add_directed(1, 2).unwrap();
        g
    }

    #[test]
    fn shd_identity_is_zero() {
        let g = chain3();
        assert_eq!(shd(&g, &g).unwrap(), 0);
    }

    #[test]
    fn shd_empty_vs_forty_edges() {
        let mut truth = CausalGraph::empty(41);
        for i in 0..40 {
            truth.add_directed(i, 40).unwrap();
        }
        let pred = CausalGraph::empty(41);
        assert_eq!(shd(&pred, &truth).unwrap(), 40);
    }

    #[test]
    fn shd_counts_misorientation_once() {
        let mut a = CausalGraph::empty(2);
        a.add_directed(0, 1).unwrap();
        let mut b = CausalGraph::empty(2);
        b.add_directed(1, 0).unwrap();
        assert_eq!(shd(&a, &b).unwrap(), 1);
        let mut u = CausalGraph::empty(2);
        u.add_undirected(0, 1).unwrap();
        assert_eq!(shd(&a, &u).unwrap(), 1);
    }

    #[test]
    fn shd_is_symmetric() {
        let g = chain3();
        let mut h = CausalGraph::empty(3);
        h.add_undirected(0, 2).unwrap();
        assert_eq!(shd(&g, &h).unwrap(), shd(&h, &g).unwrap());
    }

    #[test]
    fn shd_size_mismatch_is_error() {
        assert!(shd(&CausalGraph::empty(2), &CausalGraph::empty(3)).is_err());
    }

    #[test]
    fn adjacency_matrix_round_trip() {
        let g = chain3();
        let m = g.to_adjacency_matrix();
        let back = CausalGraph::from_adjacency_matrix(&m).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn cyclic_matrix_rejected() {
        let m = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(CausalGraph::from_adjacency_matrix(&m), Err(GraphError::Cyclic));
    }

    #[test]
    fn no_self_loops() {
        let mut g = CausalGraph::empty(2);
        assert_eq!(g.add_directed(1, 1), Err(GraphError::SelfLoop(1)));
    }
}

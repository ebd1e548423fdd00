//! Pixel grids, their canonical array-string rendering, and robust parsing
//! of grids out of free-form model responses.
//!
//! Colors are encoded as integers 0..=9. Grids range from 1x1 to 30x30.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest grid dimension accepted anywhere in the testbed.
pub const MAX_DIM: usize = 30;
/// Largest color value.
pub const MAX_COLOR: u8 = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("grid dimensions {0}x{1} outside 1..={MAX_DIM}")]
    BadShape(usize, usize),
    #[error("cell value {0} outside 0..={MAX_COLOR}")]
    BadColor(u8),
    #[error("cell count {got} does not match {rows}x{cols}")]
    CellCount { rows: usize, cols: usize, got: usize },
}

/// A rectangular grid of color integers, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(GridError::BadShape(rows, cols));
        }
        if cells.len() != rows * cols {
            return Err(GridError::CellCount { rows, cols, got: cells.len() });
        }
        if let Some(&bad) = cells.iter().find(|&&c| c > MAX_COLOR) {
            return Err(GridError::BadColor(bad));
        }
        Ok(Self { rows, cols, cells })
    }

    /// All-zero grid of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, GridError> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self, GridError> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(GridError::BadShape(r, c));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        debug_assert!(value <= MAX_COLOR);
        self.cells[row * self.cols + col] = value;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn count_color(&self, color: u8) -> usize {
        self.cells.iter().filter(|&&c| c == color).count()
    }
}

impl From<Grid> for Vec<Vec<u8>> {
    fn from(g: Grid) -> Self {
        g.to_rows()
    }
}

impl TryFrom<Vec<Vec<u8>>> for Grid {
    type Error = GridError;
    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self, Self::Error> {
        Grid::from_rows(rows)
    }
}

/// An input grid and the output it maps to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub input: Grid,
    pub output: Grid,
}

impl Pair {
    pub fn new(input: Grid, output: Grid) -> Self {
        Self { input, output }
    }
}

/// Canonical rendering: `[[a, b], [c, d]]` with ", " separators and no
/// trailing spaces. This is the exact format used in prompts.
pub fn render_array_string(g: &Grid) -> String {
    let mut s = String::with_capacity(g.rows * (g.cols * 3 + 4));
    s.push('[');
    for r in 0..g.rows {
        if r > 0 {
            s.push_str(", ");
        }
        s.push('[');
        for c in 0..g.cols {
            if c > 0 {
                s.push_str(", ");
            }
            s.push_str(itoa(g.get(r, c)));
        }
        s.push(']');
    }
    s.push(']');
    s
}

fn itoa(v: u8) -> &'static str {
    const DIGITS: [&str; 10] = ["0", "1", "2", "3", "4", "5", "6", "7", "8", "9"];
    DIGITS[v as usize]
}

/// Why no grid could be extracted from a piece of text.
///
/// A parse failure is a value, not a panic: downstream scoring maps it to
/// relative Hamming distance 1.0.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ParseFailure {
    #[error("no well-formed 2D integer array found")]
    NoCandidate,
}

/// Extracts the last maximal well-formed 2D integer array literal in `t`.
///
/// Parsing is whitespace-tolerant (`[[1,2]]` and `[[1, 2]]` both parse).
/// Candidates with ragged rows, values outside 0..=9, or dimensions
/// outside 1..=30 are not well-formed and are skipped. The LAST valid
/// candidate wins because models often restate demonstrations before
/// giving their answer.
pub fn parse_grid_from_text(t: &str) -> Result<Grid, ParseFailure> {
    let bytes = t.as_bytes();
    let mut best: Option<Grid> = None;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'[' {
            if let Some((grid, _end)) = try_parse_2d(bytes, i) {
                best = Some(grid);
            }
        }
        i += 1;
    }
    best.ok_or(ParseFailure::NoCandidate)
}

/// Attempts to parse a 2D integer array starting at byte offset `start`
/// (which must point at '['). Returns the grid and the offset one past the
/// closing bracket. Maximal: consumes as many rows as the literal holds.
fn try_parse_2d(bytes: &[u8], start: usize) -> Option<(Grid, usize)> {
    let mut pos = start;
    pos = expect(bytes, pos, b'[')?;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    pos = skip_ws(bytes, pos);
    if peek(bytes, pos) == Some(b']') {
        return None; // empty outer array
    }
    loop {
        let (row, next) = try_parse_row(bytes, pos)?;
        rows.push(row);
        pos = skip_ws(bytes, next);
        match peek(bytes, pos) {
            Some(b',') => pos = skip_ws(bytes, pos + 1),
            Some(b']') => {
                pos += 1;
                break;
            }
            _ => return None,
        }
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return None; // ragged
    }
    let grid = Grid::from_rows(rows).ok()?; // range/shape checks
    Some((grid, pos))
}

fn try_parse_row(bytes: &[u8], start: usize) -> Option<(Vec<u8>, usize)> {
    let mut pos = expect(bytes, start, b'[')?;
    let mut row = Vec::new();
    pos = skip_ws(bytes, pos);
    if peek(bytes, pos) == Some(b']') {
        return None; // empty row
    }
    loop {
        let (value, next) = parse_int(bytes, pos)?;
        row.push(value);
        pos = skip_ws(bytes, next);
        match peek(bytes, pos) {
            Some(b',') => pos = skip_ws(bytes, pos + 1),
            Some(b']') => {
                pos += 1;
                break;
            }
            _ => return None,
        }
    }
    Some((row, pos))
}

/// Parses a non-negative integer. Values above 255 or with leading junk
/// fail; range validation to 0..=9 happens at grid construction.
fn parse_int(bytes: &[u8], start: usize) -> Option<(u8, usize)> {
    let mut pos = start;
    let mut value: u32 = 0;
    let mut any = false;
    while let Some(b) = peek(bytes, pos) {
        if b.is_ascii_digit() {
            value = value * 10 + u32::from(b - b'0');
            if value > 255 {
                return None;
            }
            any = true;
            pos += 1;
        } else {
            break;
        }
    }
    if !any {
        return None;
    }
    Some((value as u8, pos))
}

fn expect(bytes: &[u8], pos: usize, b: u8) -> Option<usize> {
    let pos = skip_ws(bytes, pos);
    if peek(bytes, pos) == Some(b) {
        Some(skip_ws(bytes, pos + 1))
    } else {
        None
    }
}

fn peek(bytes: &[u8], pos: usize) -> Option<u8> {
    bytes.get(pos).copied()
}

fn skip_ws(bytes: &[u8], mut pos: usize) -> usize {
    while matches!(peek(bytes, pos), Some(b' ' | b'\t' | b'\n' | b'\r')) {
        pos += 1;
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn render_smallest() {
        let g = Grid::new(1, 1, vec![0]).unwrap();
        assert_eq!(render_array_string(&g), "[[0]]");
    }

    #[test]
    fn render_two_by_two() {
        let g = Grid::from_rows(vec![vec![0, 4], vec![5, 2]]).unwrap();
        assert_eq!(render_array_string(&g), "[[0, 4], [5, 2]]");
    }

    #[test]
    fn parse_single_candidate() {
        let g = parse_grid_from_text("The answer is [[1, 2], [3, 4]]").unwrap();
        assert_eq!(g.shape(), (2, 2));
        assert_eq!(g.cells(), &[1, 2, 3, 4]);
    }

    #[test]
    fn parse_ragged_fails() {
        assert_eq!(parse_grid_from_text("[[1,2],[3]]"), Err(ParseFailure::NoCandidate));
    }

    #[test]
    fn parse_takes_last_candidate() {
        let g = parse_grid_from_text("first [[0]] then [[5, 5], [5, 5]]").unwrap();
        assert_eq!(g.shape(), (2, 2));
        assert!(g.cells().iter().all(|&c| c == 5));
    }

    #[test]
    fn parse_skips_invalid_later_candidate() {
        // The ragged trailing candidate is not well-formed, so the earlier
        // one is still the last valid match.
        let g = parse_grid_from_text("[[7]] and then [[1,2],[3]]").unwrap();
        assert_eq!(g.cells(), &[7]);
    }

    #[test]
    fn parse_is_whitespace_tolerant() {
        let a = parse_grid_from_text("[[1,2],[3,4]]").unwrap();
        let b = parse_grid_from_text("[[1, 2],\n [3, 4]]").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_rejects_out_of_range_values() {
        assert_eq!(parse_grid_from_text("[[10, 2]]"), Err(ParseFailure::NoCandidate));
        assert_eq!(parse_grid_from_text("x = [[1, -2]]"), Err(ParseFailure::NoCandidate));
    }

    #[test]
    fn parse_inner_array_of_nested_literal() {
        // From position 0 the literal is 3D and malformed as a grid; the
        // scanner still finds the valid 2D literal starting one byte in.
        let g = parse_grid_from_text("[[[1, 2]]]").unwrap();
        assert_eq!(g.cells(), &[1, 2]);
    }

    #[test]
    fn grid_construction_validates() {
        assert!(Grid::new(0, 3, vec![]).is_err());
        assert!(Grid::new(31, 1, vec![0; 31]).is_err());
        assert!(Grid::new(1, 2, vec![0, 11]).is_err());
        assert!(Grid::new(2, 2, vec![0; 3]).is_err());
    }

    fn arb_grid() -> impl Strategy<Value = Grid> {
        (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u8..=9, r * c)
                .prop_map(move |cells| Grid::new(r, c, cells).unwrap())
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(g in arb_grid()) {
            let rendered = render_array_string(&g);
            let parsed = parse_grid_from_text(&rendered).unwrap();
            prop_assert_eq!(parsed, g);
        }

        #[test]
        fn parse_round_trip_with_noise(g in arb_grid(), prefix in "[a-z ]{0,20}", suffix in "[a-z ]{0,20}") {
            let text = format!("{}{}{}", prefix, render_array_string(&g), suffix);
            let parsed = parse_grid_from_text(&text).unwrap();
            prop_assert_eq!(parsed, g);
        }
    }
}

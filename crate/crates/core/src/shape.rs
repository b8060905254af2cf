//! Young-diagram shapes with a bounded number of rows, the single-square
//! move alphabet, and a dense ordinal index used to address counting tables.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("rows {rows:?} do not form a shape with at most {max_rows} rows")]
    Invalid { rows: Vec<usize>, max_rows: usize },
    #[error("shape {rows:?} has {squares} squares, above the index capacity {capacity}")]
    OutOfDomain {
        rows: Vec<usize>,
        squares: usize,
        capacity: usize,
    },
}

/// Row lengths of a Young diagram, top to bottom. Trailing zero rows are
/// never stored, so the empty vector is the empty shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn empty() -> Self {
        Shape(Vec::new())
    }

    /// Builds a shape from row lengths, dropping trailing zeros. Rows must be
    /// weakly decreasing; the row bound is checked separately by
    /// [`valid_shape`].
    pub fn new(rows: impl Into<Vec<usize>>) -> Result<Self, ShapeError> {
        let mut rows = rows.into();
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(ShapeError::Invalid {
                rows,
                max_rows: usize::MAX,
            });
        }
        Ok(Shape(rows))
    }

    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    /// Length of row `row` (1-based); rows past the end have length zero.
    pub fn row_len(&self, row: usize) -> usize {
        self.0.get(row - 1).copied().unwrap_or(0)
    }

    pub fn num_rows(&self) -> usize {
        self.0.len()
    }

    pub fn squares(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The shape with one more square in `row` (1-based), if that keeps the
    /// rows weakly decreasing and within `max_rows`.
    pub fn add_square(&self, row: usize, max_rows: usize) -> Option<Shape> {
        if row == 0 || row > max_rows {
            return None;
        }
        let len = self.row_len(row);
        if row > 1 && self.row_len(row - 1) <= len {
            return None;
        }
        let mut rows = self.0.clone();
        if row > rows.len() {
            rows.push(1);
        } else {
            rows[row - 1] += 1;
        }
        Some(Shape(rows))
    }

    /// The shape with the corner square of `row` (1-based) removed, if `row`
    /// ends in a removable corner.
    pub fn remove_square(&self, row: usize) -> Option<Shape> {
        if row == 0 || row > self.0.len() {
            return None;
        }
        if self.row_len(row + 1) >= self.row_len(row) {
            return None;
        }
        let mut rows = self.0.clone();
        rows[row - 1] -= 1;
        if rows[row - 1] == 0 {
            rows.pop();
        }
        Some(Shape(rows))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "[")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// One step of a shape sequence. Rows are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    Nothing,
    AddSquare(usize),
    RemoveSquare(usize),
}

impl Move {
    /// Applies the move, returning `None` when the result is not a shape with
    /// at most `max_rows` rows.
    pub fn apply(self, shape: &Shape, max_rows: usize) -> Option<Shape> {
        match self {
            Move::Nothing => Some(shape.clone()),
            Move::AddSquare(row) => shape.add_square(row, max_rows),
            Move::RemoveSquare(row) => shape.remove_square(row),
        }
    }

    /// Identifies the move taking `from` to `to`, if the two shapes differ by
    /// at most one square.
    pub fn between(from: &Shape, to: &Shape) -> Option<Move> {
        let rows = from.num_rows().max(to.num_rows());
        let mut diff = None;
        for row in 1..=rows {
            let (a, b) = (from.row_len(row), to.row_len(row));
            if a == b {
                continue;
            }
            if diff.is_some() || a.abs_diff(b) != 1 {
                return None;
            }
            diff = Some(if b > a {
                Move::AddSquare(row)
            } else {
                Move::RemoveSquare(row)
            });
        }
        Some(diff.unwrap_or(Move::Nothing))
    }
}

/// True iff `rows` is strictly positive, weakly decreasing and has at most
/// `k - 1` entries.
pub fn valid_shape(rows: &[usize], k: usize) -> bool {
    rows.len() < k.max(1)
        && rows.iter().all(|&r| r > 0)
        && rows.windows(2).all(|w| w[0] >= w[1])
}

/// Every `(move, result)` pair reachable from `shape` in one step, inside
/// the `k - 1` row bound: `Nothing` first, then additions by ascending row,
/// then removals by ascending row.
pub fn enumerate_moves(shape: &Shape, k: usize) -> Vec<(Move, Shape)> {
    let max_rows = k - 1;
    let mut moves = vec![(Move::Nothing, shape.clone())];
    for row in 1..=max_rows {
        if let Some(s) = shape.add_square(row, max_rows) {
            moves.push((Move::AddSquare(row), s));
        }
    }
    for row in 1..=max_rows {
        if let Some(s) = shape.remove_square(row) {
            moves.push((Move::RemoveSquare(row), s));
        }
    }
    moves
}

const NONE: u32 = u32::MAX;

/// Dense enumeration of all shapes with at most `k - 1` rows and at most
/// `capacity` squares, ordered by size and then reverse-lexicographically,
/// so the empty shape has ordinal 0. Neighbour ordinals for every add and
/// remove move are precomputed.
#[derive(Debug, Clone)]
pub struct ShapeSpace {
    k: usize,
    capacity: usize,
    shapes: Vec<Shape>,
    lookup: HashMap<Shape, u32>,
    // [ordinal * (k - 1) + row - 1]
    add: Vec<u32>,
    remove: Vec<u32>,
}

impl ShapeSpace {
    pub fn new(k: usize, capacity: usize) -> Self {
        assert!(k >= 2, "k must be at least 2");
        let max_rows = k - 1;
        let mut shapes = Vec::new();
        for size in 0..=capacity {
            let mut parts = Vec::new();
            partitions(size, size, max_rows, &mut parts, &mut shapes);
        }
        let lookup: HashMap<Shape, u32> = shapes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut add = vec![NONE; shapes.len() * max_rows];
        let mut remove = vec![NONE; shapes.len() * max_rows];
        for (i, s) in shapes.iter().enumerate() {
            for row in 1..=max_rows {
                if let Some(t) = s.add_square(row, max_rows) {
                    if let Some(&j) = lookup.get(&t) {
                        add[i * max_rows + row - 1] = j;
                    }
                }
                if let Some(t) = s.remove_square(row) {
                    remove[i * max_rows + row - 1] = lookup[&t];
                }
            }
        }
        ShapeSpace {
            k,
            capacity,
            shapes,
            lookup,
            add,
            remove,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_rows(&self) -> usize {
        self.k - 1
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn index(&self, shape: &Shape) -> Result<usize, ShapeError> {
        if !valid_shape(shape.rows(), self.k) {
            return Err(ShapeError::Invalid {
                rows: shape.rows().to_vec(),
                max_rows: self.k - 1,
            });
        }
        self.lookup
            .get(shape)
            .map(|&i| i as usize)
            .ok_or_else(|| ShapeError::OutOfDomain {
                rows: shape.rows().to_vec(),
                squares: shape.squares(),
                capacity: self.capacity,
            })
    }

    pub fn shape(&self, ordinal: usize) -> &Shape {
        &self.shapes[ordinal]
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    /// Ordinal of the shape with a square added to `row` (1-based), if it is
    /// a valid shape inside the capacity.
    #[inline]
    pub fn add(&self, ordinal: usize, row: usize) -> Option<usize> {
        let v = self.add[ordinal * (self.k - 1) + row - 1];
        (v != NONE).then_some(v as usize)
    }

    #[inline]
    pub fn remove(&self, ordinal: usize, row: usize) -> Option<usize> {
        let v = self.remove[ordinal * (self.k - 1) + row - 1];
        (v != NONE).then_some(v as usize)
    }
}

// Partitions of `remaining` with parts at most `max_part` and at most
// `rows_left` further parts, in reverse-lexicographic order.
fn partitions(
    remaining: usize,
    max_part: usize,
    rows_left: usize,
    parts: &mut Vec<usize>,
    out: &mut Vec<Shape>,
) {
    if remaining == 0 {
        out.push(Shape(parts.clone()));
        return;
    }
    if rows_left == 0 {
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        parts.push(p);
        partitions(remaining - p, p, rows_left - 1, parts, out);
        parts.pop();
    }
}

/// Ordinal of `shape` among shapes with at most `k - 1` rows and at most `n`
/// squares.
pub fn shape_index(shape: &Shape, n: usize, k: usize) -> Result<usize, ShapeError> {
    ShapeSpace::new(k, n).index(shape)
}

pub fn shape_unindex(ordinal: usize, n: usize, k: usize) -> Option<Shape> {
    ShapeSpace::new(k, n).shapes.get(ordinal).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(rows: &[usize]) -> Shape {
        Shape::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn valid_shape_examples() {
        assert!(valid_shape(&[3, 2], 3));
        assert!(!valid_shape(&[2, 3], 3));
        assert!(!valid_shape(&[1, 1, 1], 3));
        assert!(valid_shape(&[], 2));
        assert!(!valid_shape(&[0], 3));
    }

    #[test]
    fn moves_from_empty() {
        let moves = enumerate_moves(&Shape::empty(), 3);
        assert_eq!(
            moves,
            vec![(Move::Nothing, Shape::empty()), (Move::AddSquare(1), sh(&[1]))]
        );
    }

    #[test]
    fn moves_single_row() {
        let moves = enumerate_moves(&sh(&[1]), 2);
        assert_eq!(
            moves,
            vec![
                (Move::Nothing, sh(&[1])),
                (Move::AddSquare(1), sh(&[2])),
                (Move::RemoveSquare(1), Shape::empty()),
            ]
        );
    }

    #[test]
    fn moves_two_rows() {
        let moves = enumerate_moves(&sh(&[2, 1]), 3);
        assert_eq!(
            moves,
            vec![
                (Move::Nothing, sh(&[2, 1])),
                (Move::AddSquare(1), sh(&[3, 1])),
                (Move::AddSquare(2), sh(&[2, 2])),
                (Move::RemoveSquare(1), sh(&[1, 1])),
                (Move::RemoveSquare(2), sh(&[2])),
            ]
        );
    }

    #[test]
    fn third_row_blocked_at_k3() {
        assert_eq!(sh(&[1, 1]).add_square(3, 2), None);
        assert_eq!(sh(&[1, 1]).add_square(2, 2), None);
    }

    #[test]
    fn move_between_detects_steps() {
        assert_eq!(Move::between(&sh(&[2, 1]), &sh(&[2, 2])), Some(Move::AddSquare(2)));
        assert_eq!(Move::between(&sh(&[1]), &Shape::empty()), Some(Move::RemoveSquare(1)));
        assert_eq!(Move::between(&sh(&[1]), &sh(&[1])), Some(Move::Nothing));
        assert_eq!(Move::between(&sh(&[1]), &sh(&[3])), None);
        assert_eq!(Move::between(&sh(&[2]), &sh(&[1, 1])), None);
    }

    #[test]
    fn index_conventions() {
        assert_eq!(shape_index(&Shape::empty(), 5, 4).unwrap(), 0);
        let a = shape_index(&sh(&[2, 1]), 6, 4).unwrap();
        let b = shape_index(&sh(&[3]), 6, 4).unwrap();
        assert_ne!(a, b);
        assert!(shape_index(&sh(&[1, 1, 1]), 6, 3).is_err());
        assert!(matches!(
            shape_index(&sh(&[4]), 3, 3),
            Err(ShapeError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn index_roundtrip_small() {
        for k in 2..=5 {
            let space = ShapeSpace::new(k, 6);
            for (i, s) in space.shapes().iter().enumerate() {
                assert!(valid_shape(s.rows(), k));
                assert_eq!(space.index(s).unwrap(), i);
                assert_eq!(shape_unindex(i, 6, k).as_ref(), Some(s));
            }
        }
    }

    #[test]
    fn shape_space_counts() {
        // partitions of 0..=6 into at most 2 parts: 1+1+2+2+3+3+4
        assert_eq!(ShapeSpace::new(3, 6).len(), 16);
        // k = 2: one row of each length
        assert_eq!(ShapeSpace::new(2, 6).len(), 7);
    }

    #[test]
    fn neighbour_tables_agree_with_moves() {
        let space = ShapeSpace::new(4, 7);
        for (i, s) in space.shapes().iter().enumerate() {
            for row in 1..=3 {
                let expect = s
                    .add_square(row, 3)
                    .filter(|t| t.squares() <= 7)
                    .map(|t| space.index(&t).unwrap());
                assert_eq!(space.add(i, row), expect);
                let expect = s.remove_square(row).map(|t| space.index(&t).unwrap());
                assert_eq!(space.remove(i, row), expect);
            }
        }
    }
}

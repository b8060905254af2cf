//! Increasing tableaux with RSK row insertion and reverse bumping, and the
//! two readings of the bijection between k-noncrossing diagrams and shape
//! sequences with at most `k - 1` rows.

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::shape::{valid_shape, Move, Shape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("label {0} is already in the tableau")]
    DuplicateLabel(usize),
    #[error("insertion would create row {row}, above the limit of {limit} rows")]
    RowOverflow { row: usize, limit: usize },
    #[error("row {0} has no removable corner")]
    NoCorner(usize),
    #[error("cannot place label {label} at the end of row {row}")]
    BadPlacement { row: usize, label: usize },
    #[error("shapes at steps {0} and {1} differ by more than one square")]
    NotAdjacent(usize, usize),
    #[error("shape at step {step} has more than {max_rows} rows")]
    TooManyRows { step: usize, max_rows: usize },
    #[error("a shape sequence must start at the empty shape")]
    NonEmptyStart,
    #[error("diagram is not {k}-noncrossing (row overflow while reading vertex {vertex})")]
    NotKNoncrossing { k: usize, vertex: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A tableau cell: a vertex label and, for weighted tableaux, the stack
/// size attached to it. The weight travels with the label through bumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub label: usize,
    pub weight: Option<usize>,
}

impl Entry {
    pub fn new(label: usize) -> Self {
        Entry {
            label,
            weight: None,
        }
    }

    pub fn weighted(label: usize, weight: usize) -> Self {
        Entry {
            label,
            weight: Some(weight),
        }
    }
}

impl From<usize> for Entry {
    fn from(label: usize) -> Self {
        Entry::new(label)
    }
}

/// Distinct labels, strictly increasing along rows and down columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    rows: Vec<Vec<Entry>>,
    row_limit: usize,
}

impl Default for Tableau {
    fn default() -> Self {
        Self::new()
    }
}

impl Tableau {
    pub fn new() -> Self {
        Tableau {
            rows: Vec::new(),
            row_limit: usize::MAX,
        }
    }

    /// An empty tableau that refuses to grow past `row_limit` rows.
    pub fn with_row_limit(row_limit: usize) -> Self {
        Tableau {
            rows: Vec::new(),
            row_limit,
        }
    }

    /// Builds a tableau from label rows, checking the increasing conditions.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Option<Self> {
        let rows: Vec<Vec<Entry>> = rows
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.into_iter().map(Entry::new).collect())
            .collect();
        let t = Tableau {
            rows,
            row_limit: usize::MAX,
        };
        t.is_standard().then_some(t)
    }

    fn is_standard(&self) -> bool {
        let mut labels: Vec<usize> = self.rows.iter().flatten().map(|e| e.label).collect();
        let total = labels.len();
        labels.sort_unstable();
        labels.dedup();
        labels.len() == total
            && self
                .rows
                .iter()
                .all(|r| r.windows(2).all(|w| w[0].label < w[1].label))
            && self.rows.windows(2).all(|p| {
                p[1].len() <= p[0].len()
                    && p[1].iter().zip(&p[0]).all(|(lo, hi)| hi.label < lo.label)
            })
    }

    pub fn rows(&self) -> &[Vec<Entry>] {
        &self.rows
    }

    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.label).collect())
            .collect()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.rows.iter().map(Vec::len).collect::<Vec<_>>())
            .expect("tableau rows are weakly decreasing")
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.rows
            .iter()
            .any(|r| r.binary_search_by_key(&label, |e| e.label).is_ok())
    }

    /// RSK row insertion. On error the tableau is left unchanged.
    pub fn insert(&mut self, entry: Entry) -> Result<(), TableauError> {
        if self.contains(entry.label) {
            return Err(TableauError::DuplicateLabel(entry.label));
        }
        // find the bump path first so an overflow leaves `self` intact
        let mut path = Vec::new();
        let mut x = entry.label;
        for row in &self.rows {
            let pos = row.partition_point(|e| e.label < x);
            path.push(pos);
            match row.get(pos) {
                Some(e) => x = e.label,
                None => break,
            }
        }
        let bumped_out = path.len() == self.rows.len()
            && path
                .last()
                .is_none_or(|&p| p < self.rows[path.len() - 1].len());
        if bumped_out && self.rows.len() >= self.row_limit {
            return Err(TableauError::RowOverflow {
                row: self.rows.len() + 1,
                limit: self.row_limit,
            });
        }
        let mut carry = entry;
        for (r, &pos) in path.iter().enumerate() {
            let row = &mut self.rows[r];
            if pos == row.len() {
                row.push(carry);
                return Ok(());
            }
            carry = std::mem::replace(&mut row[pos], carry);
        }
        self.rows.push(vec![carry]);
        Ok(())
    }

    /// Reverse bumping from the corner of `row` (1-based): returns the entry
    /// whose RSK insertion into the reduced tableau restores the original.
    pub fn extract(&mut self, row: usize) -> Result<Entry, TableauError> {
        let len = |r: usize| self.rows.get(r).map_or(0, Vec::len);
        if row == 0 || len(row - 1) == 0 || len(row) >= len(row - 1) {
            return Err(TableauError::NoCorner(row));
        }
        let r0 = row - 1;
        let mut x = self.rows[r0].pop().expect("non-empty row");
        if self.rows[r0].is_empty() {
            self.rows.pop();
        }
        for r in (0..r0).rev() {
            let cells = &mut self.rows[r];
            let pos = cells.partition_point(|e| e.label < x.label) - 1;
            x = std::mem::replace(&mut cells[pos], x);
        }
        Ok(x)
    }

    /// Puts `entry` into the new corner at the end of `row` (1-based). The
    /// label must exceed every label present.
    pub fn place(&mut self, row: usize, entry: Entry) -> Result<(), TableauError> {
        let bad = TableauError::BadPlacement {
            row,
            label: entry.label,
        };
        if row == 0 || row > self.rows.len() + 1 || row > self.row_limit {
            return Err(bad);
        }
        if row > 1 && self.rows[row - 2].len() <= self.rows.get(row - 1).map_or(0, Vec::len) {
            return Err(bad);
        }
        if self
            .rows
            .iter()
            .any(|r| r.last().is_some_and(|e| e.label >= entry.label))
        {
            return Err(bad);
        }
        if row > self.rows.len() {
            self.rows.push(vec![entry]);
        } else {
            self.rows[row - 1].push(entry);
        }
        Ok(())
    }

    /// Removes the largest label, which always sits in a corner.
    fn remove_max(&mut self, label: usize) -> bool {
        let Some(r) = self
            .rows
            .iter()
            .position(|row| row.last().is_some_and(|e| e.label == label))
        else {
            return false;
        };
        self.rows[r].pop();
        if self.rows[r].is_empty() {
            self.rows.remove(r);
        }
        true
    }
}

/// Pure form of [`Tableau::insert`].
pub fn rsk_insert(tableau: &Tableau, entry: impl Into<Entry>) -> Result<Tableau, TableauError> {
    let mut t = tableau.clone();
    t.insert(entry.into())?;
    Ok(t)
}

/// Pure form of [`Tableau::extract`].
pub fn rsk_extract(tableau: &Tableau, row: usize) -> Result<(Tableau, Entry), TableauError> {
    let mut t = tableau.clone();
    let e = t.extract(row)?;
    Ok((t, e))
}

/// A sequence of shapes `λ^0 = ∅, λ^1, ...` in which neighbours differ by at
/// most one square.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarSequence {
    shapes: Vec<Shape>,
}

impl StarSequence {
    pub fn new(shapes: Vec<Shape>, k: usize) -> Result<Self, TableauError> {
        if shapes.first().is_none_or(|s| !s.is_empty()) {
            return Err(TableauError::NonEmptyStart);
        }
        for (step, s) in shapes.iter().enumerate() {
            if !valid_shape(s.rows(), k) {
                return Err(TableauError::TooManyRows {
                    step,
                    max_rows: k - 1,
                });
            }
        }
        for i in 1..shapes.len() {
            if Move::between(&shapes[i - 1], &shapes[i]).is_none() {
                return Err(TableauError::NotAdjacent(i - 1, i));
            }
        }
        Ok(StarSequence { shapes })
    }

    pub(crate) fn from_trusted(shapes: Vec<Shape>) -> Self {
        StarSequence { shapes }
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    /// Number of steps, which is the vertex count of the induced diagram.
    pub fn steps(&self) -> usize {
        self.shapes.len() - 1
    }

    /// The move taken at step `i` (1-based), from `λ^{i-1}` to `λ^i`.
    pub fn step(&self, i: usize) -> Move {
        Move::between(&self.shapes[i - 1], &self.shapes[i]).expect("validated sequence")
    }

    pub fn is_closed(&self) -> bool {
        self.shapes.last().is_some_and(Shape::is_empty)
    }
}

/// Reads `diagram` from right to left: a terminal `i` of arc `(j, i)` RSK
/// inserts `j`, an origin removes its own square, an isolated vertex leaves
/// the shape alone. Fails if some shape needs `k` or more rows, which
/// happens exactly when the diagram has a `k`-crossing.
pub fn diagram_to_star_sequence(diagram: &Diagram, k: usize) -> Result<StarSequence, TableauError> {
    let n = diagram.n();
    let partner = diagram.partners();
    let mut tableau = Tableau::with_row_limit(k - 1);
    let mut shapes = vec![Shape::empty(); n + 1];
    for i in (1..=n).rev() {
        let j = partner[i];
        if j != 0 && j < i {
            tableau.insert(Entry::new(j)).map_err(|e| match e {
                TableauError::RowOverflow { .. } => TableauError::NotKNoncrossing { k, vertex: i },
                other => other,
            })?;
        } else if j > i {
            let removed = tableau.remove_max(i);
            debug_assert!(removed, "origin label must be the largest entry");
        }
        shapes[i - 1] = tableau.shape();
    }
    Ok(StarSequence { shapes })
}

/// Reads a shape sequence from left to right: a `+□` step at `i` puts `i`
/// into the new square, a `-□` step extracts an entry `j` by reverse
/// bumping and records the arc `(j, i)`, a `∅` step does nothing. Squares
/// still open at the end are isolated vertices.
pub fn star_sequence_to_diagram(seq: &StarSequence) -> Result<Diagram, TableauError> {
    let mut tableau = Tableau::new();
    let mut arcs = Vec::new();
    for i in 1..=seq.steps() {
        match seq.step(i) {
            Move::Nothing => {}
            Move::AddSquare(row) => tableau.place(row, Entry::new(i))?,
            Move::RemoveSquare(row) => {
                let e = tableau.extract(row)?;
                arcs.push((e.label, i));
            }
        }
    }
    Ok(Diagram::new(seq.steps(), arcs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tab(rows: &[&[usize]]) -> Tableau {
        Tableau::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn sh(rows: &[usize]) -> Shape {
        Shape::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn insert_examples() {
        assert_eq!(rsk_insert(&Tableau::new(), 5).unwrap(), tab(&[&[5]]));
        assert_eq!(rsk_insert(&tab(&[&[1, 3]]), 2).unwrap(), tab(&[&[1, 2], &[3]]));
        assert_eq!(rsk_insert(&tab(&[&[1, 2]]), 4).unwrap(), tab(&[&[1, 2, 4]]));
    }

    #[test]
    fn insert_errors() {
        assert_eq!(
            rsk_insert(&tab(&[&[1, 3]]), 3),
            Err(TableauError::DuplicateLabel(3))
        );
        let mut t = Tableau::with_row_limit(1);
        t.insert(Entry::new(3)).unwrap();
        let before = t.clone();
        assert!(matches!(
            t.insert(Entry::new(1)),
            Err(TableauError::RowOverflow { row: 2, limit: 1 })
        ));
        assert_eq!(t, before);
    }

    #[test]
    fn extract_examples() {
        assert_eq!(
            rsk_extract(&tab(&[&[5]]), 1).unwrap(),
            (Tableau::new(), Entry::new(5))
        );
        assert_eq!(
            rsk_extract(&tab(&[&[1, 2], &[3]]), 2).unwrap(),
            (tab(&[&[1, 3]]), Entry::new(2))
        );
        assert_eq!(
            rsk_extract(&tab(&[&[1, 2, 4]]), 1).unwrap(),
            (tab(&[&[1, 2]]), Entry::new(4))
        );
    }

    #[test]
    fn extract_requires_corner() {
        // row 1 of [[1,2],[3,4]] has no corner
        let t = tab(&[&[1, 2], &[3, 4]]);
        assert_eq!(rsk_extract(&t, 1), Err(TableauError::NoCorner(1)));
        assert_eq!(rsk_extract(&t, 3), Err(TableauError::NoCorner(3)));
        assert_eq!(rsk_extract(&Tableau::new(), 1), Err(TableauError::NoCorner(1)));
    }

    #[test]
    fn weights_follow_labels() {
        let mut t = Tableau::new();
        t.insert(Entry::weighted(1, 2)).unwrap();
        t.insert(Entry::weighted(3, 4)).unwrap();
        t.insert(Entry::weighted(2, 3)).unwrap();
        // 2 bumped 3 into row 2
        assert_eq!(t.rows()[1], vec![Entry::weighted(3, 4)]);
        assert_eq!(t.extract(2).unwrap(), Entry::weighted(2, 3));
    }

    #[test]
    fn placement_rules() {
        let mut t = Tableau::new();
        t.place(1, Entry::new(1)).unwrap();
        assert!(t.place(3, Entry::new(2)).is_err());
        assert!(t.place(1, Entry::new(1)).is_err());
        t.place(2, Entry::new(2)).unwrap();
        assert!(t.place(2, Entry::new(3)).is_err());
        assert_eq!(t, tab(&[&[1], &[2]]));
    }

    #[test]
    fn reading_examples() {
        let seq = diagram_to_star_sequence(&Diagram::empty(2), 2).unwrap();
        assert_eq!(seq.shapes(), &[Shape::empty(), Shape::empty(), Shape::empty()]);

        let one = Diagram::new(2, [(1, 2)]).unwrap();
        let seq = diagram_to_star_sequence(&one, 2).unwrap();
        assert_eq!(seq.shapes(), &[Shape::empty(), sh(&[1]), Shape::empty()]);

        let cross = Diagram::new(4, [(1, 3), (2, 4)]).unwrap();
        let seq = diagram_to_star_sequence(&cross, 3).unwrap();
        assert_eq!(
            seq.shapes(),
            &[Shape::empty(), sh(&[1]), sh(&[1, 1]), sh(&[1]), Shape::empty()]
        );
        assert_eq!(
            diagram_to_star_sequence(&cross, 2),
            Err(TableauError::NotKNoncrossing { k: 2, vertex: 3 })
        );
    }

    #[test]
    fn sequence_to_diagram_examples() {
        let e = Shape::empty();
        let seq = StarSequence::new(vec![e.clone(), e.clone(), e.clone()], 2).unwrap();
        assert_eq!(star_sequence_to_diagram(&seq).unwrap(), Diagram::empty(2));

        let seq = StarSequence::new(vec![e.clone(), sh(&[1]), sh(&[1]), e.clone()], 2).unwrap();
        assert_eq!(
            star_sequence_to_diagram(&seq).unwrap(),
            Diagram::new(3, [(1, 3)]).unwrap()
        );

        let seq = StarSequence::new(
            vec![e.clone(), sh(&[1]), sh(&[1, 1]), sh(&[1]), e.clone()],
            3,
        )
        .unwrap();
        assert_eq!(
            star_sequence_to_diagram(&seq).unwrap(),
            Diagram::new(4, [(1, 3), (2, 4)]).unwrap()
        );
    }

    #[test]
    fn sequence_validation() {
        let e = Shape::empty();
        assert_eq!(
            StarSequence::new(vec![e.clone(), sh(&[2])], 3),
            Err(TableauError::NotAdjacent(0, 1))
        );
        assert_eq!(
            StarSequence::new(vec![sh(&[1]), e.clone()], 3),
            Err(TableauError::NonEmptyStart)
        );
        assert!(matches!(
            StarSequence::new(vec![e, sh(&[1]), sh(&[1, 1])], 2),
            Err(TableauError::TooManyRows { step: 2, .. })
        ));
    }
}

//! Exact counting tables over (length, shape).
//!
//! One engine, [`StackTable`], covers both cases. A prefix of a shape
//! sequence is weighted by the stack sizes drawn at its extraction steps;
//! an extraction with size `s` consumes `2s - 1` positions. Cores allow
//! only `s = 1`, σ-modular diagrams allow every `s >= σ`.
//!
//! Four grids are kept:
//! * `count[i][λ]`: prefixes of length `i` ending at `λ` in which no
//!   extraction is preceded by the pattern that would stack it;
//! * `excluded[x][μ] = Σ_{s} residual[x - 2s][μ]`, the stacking correction;
//! * `free[i][λ]` and `free_ext[x][μ]`: the same recursion with no
//!   correction, counting every weighted shape sequence.
//!
//! `residual = count - excluded` is stored as well since sampling reads it
//! once per candidate stack size. Entries are exact for `i + |λ| <= n`
//! (auxiliary grids: `x + |μ| <= n + 2`), which is all a length-`n`
//! computation ever reads.

mod cache;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::shape::{Move, Shape, ShapeError, ShapeSpace};

pub use cache::{cache_file_name, load_or_build, FORMAT_VERSION};

/// Upper bound on stored cells across all grids.
pub const MAX_CELLS: usize = 200_000_000;

static ZERO: BigUint = BigUint::ZERO;

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("k must be at least 2 (got {0})")]
    BadK(usize),
    #[error("sigma must be at least 1 (got {0})")]
    BadSigma(usize),
    #[error("tables for n = {n} need {cells} cells, above the limit of {limit}")]
    Capacity { n: usize, cells: usize, limit: usize },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("cell ({len}, {shape}) lies outside the exact region of a table for n = {n}")]
    OutOfRegion { len: usize, shape: Shape, n: usize },
    #[error("state ({remaining}, {shape}) has count zero")]
    ZeroState { remaining: usize, shape: Shape },
    #[error("negative correction at ({len}, {shape}); the recursion is inconsistent")]
    NegativeResidual { len: usize, shape: Shape },
    #[error("table cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Allowed stack sizes at extraction steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StackSizes {
    /// Only `s = 1`: plain shape sequences, used for cores.
    Single,
    /// Every `s >= σ`.
    AtLeast(usize),
}

impl StackSizes {
    pub fn min(self) -> usize {
        match self {
            StackSizes::Single => 1,
            StackSizes::AtLeast(sigma) => sigma,
        }
    }

    /// Stack sizes whose extraction fits into `remaining` positions.
    pub fn range(self, remaining: usize) -> std::ops::RangeInclusive<usize> {
        let fit = remaining.div_ceil(2);
        match self {
            StackSizes::Single => 1..=fit.min(1),
            StackSizes::AtLeast(sigma) => sigma..=fit,
        }
    }
}

/// Which weights drive the sampling process.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    /// Weights count every weighted shape sequence. Every sequence is drawn
    /// with equal probability, so conditioning on "no stacked arcs" is
    /// exactly uniform on the target class.
    #[default]
    Unrestricted,
    /// Weights count sequences with the stacking correction subtracted at
    /// each extraction. Fewer restarts, but the accepted output is only
    /// approximately uniform.
    StackCorrected,
}

impl std::str::FromStr for WeightRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unrestricted" => Ok(WeightRule::Unrestricted),
            "stack-corrected" => Ok(WeightRule::StackCorrected),
            other => Err(format!(
                "unknown weight rule `{other}` (expected unrestricted or stack-corrected)"
            )),
        }
    }
}

/// Lengths `0..rows.len()`, each row a prefix of the shape ordinals. Reads
/// outside the stored region are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Grid {
    rows: Vec<Vec<BigUint>>,
}

impl Grid {
    fn zeros(limits: impl Iterator<Item = usize>) -> Self {
        Grid {
            rows: limits.map(|l| vec![BigUint::ZERO; l]).collect(),
        }
    }

    #[inline]
    pub(crate) fn at(&self, len: isize, ord: usize) -> &BigUint {
        if len < 0 {
            return &ZERO;
        }
        self.rows
            .get(len as usize)
            .and_then(|r| r.get(ord))
            .unwrap_or(&ZERO)
    }

    #[inline]
    fn at_opt(&self, len: isize, ord: Option<usize>) -> &BigUint {
        ord.map_or(&ZERO, |o| self.at(len, o))
    }

    fn cells(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub(crate) fn rows(&self) -> &[Vec<BigUint>] {
        &self.rows
    }
}

/// Which grid to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    Count,
    Excluded,
    Residual,
    Free,
    FreeExt,
}

/// A single step of the backward sampling process ending at a given state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    /// The forward step into the current shape.
    pub step: Move,
    /// Stack size for extraction steps.
    pub stack_size: Option<usize>,
    pub weight: BigUint,
}

#[derive(Debug, Clone)]
pub struct StackTable {
    n: usize,
    sizes: StackSizes,
    space: ShapeSpace,
    // shapes with at most m squares have ordinals below size_prefix[m]
    size_prefix: Vec<usize>,
    pub(crate) count: Grid,
    pub(crate) excluded: Grid,
    pub(crate) residual: Grid,
    pub(crate) free: Grid,
    pub(crate) free_ext: Grid,
}

impl StackTable {
    pub fn build(n: usize, k: usize, sizes: StackSizes) -> Result<Self, CountingError> {
        let mut table = Self::empty(n, k, sizes)?;
        table.fill()?;
        Ok(table)
    }

    fn empty(n: usize, k: usize, sizes: StackSizes) -> Result<Self, CountingError> {
        if k < 2 {
            return Err(CountingError::BadK(k));
        }
        if let StackSizes::AtLeast(0) = sizes {
            return Err(CountingError::BadSigma(0));
        }
        let cap = n / 2;
        let rough = shape_count(cap, k - 1).saturating_mul(5 * (n as u128 + 2));
        if rough > MAX_CELLS as u128 {
            return Err(CountingError::Capacity {
                n,
                cells: usize::try_from(rough).unwrap_or(usize::MAX),
                limit: MAX_CELLS,
            });
        }
        let space = ShapeSpace::new(k, cap);
        let mut size_prefix = vec![0; cap + 1];
        for s in space.shapes() {
            size_prefix[s.squares()] += 1;
        }
        for m in 1..=cap {
            size_prefix[m] += size_prefix[m - 1];
        }
        let main = |i: usize| size_prefix[i.min(n - i).min(cap)];
        let aux = |x: usize| size_prefix[x.min(n + 2 - x).min(cap)];
        let cells: usize =
            3 * (0..=n).map(main).sum::<usize>() + 2 * (0..=n + 1).map(aux).sum::<usize>();
        if cells > MAX_CELLS {
            return Err(CountingError::Capacity {
                n,
                cells,
                limit: MAX_CELLS,
            });
        }
        Ok(StackTable {
            n,
            sizes,
            count: Grid::zeros((0..=n).map(main)),
            residual: Grid::zeros((0..=n).map(main)),
            free: Grid::zeros((0..=n).map(main)),
            excluded: Grid::zeros((0..=n + 1).map(aux)),
            free_ext: Grid::zeros((0..=n + 1).map(aux)),
            space,
            size_prefix,
        })
    }

    fn fill(&mut self) -> Result<(), CountingError> {
        let n = self.n;
        self.count.rows[0][0] = BigUint::one();
        self.free.rows[0][0] = BigUint::one();
        self.residual.rows[0][0] = BigUint::one();
        for i in 0..=n {
            self.fill_aux(i + 1);
            if i >= 1 {
                self.fill_main(i)?;
            }
        }
        Ok(())
    }

    fn fill_aux(&mut self, x: usize) {
        let x = x as isize;
        for ord in 0..self.excluded.rows[x as usize].len() {
            let (ex, fx) = match self.sizes {
                StackSizes::Single => (
                    self.residual.at(x - 2, ord).clone(),
                    self.free.at(x - 2, ord).clone(),
                ),
                StackSizes::AtLeast(sigma) => {
                    let back = x - 2 * sigma as isize;
                    (
                        self.residual.at(back, ord) + self.excluded.at(x - 2, ord),
                        self.free.at(back, ord) + self.free_ext.at(x - 2, ord),
                    )
                }
            };
            self.excluded.rows[x as usize][ord] = ex;
            self.free_ext.rows[x as usize][ord] = fx;
        }
    }

    fn fill_main(&mut self, i: usize) -> Result<(), CountingError> {
        let rows = self.space.max_rows();
        let prev = i as isize - 1;
        let next = i as isize + 1;
        for ord in 0..self.count.rows[i].len() {
            let mut c = self.count.at(prev, ord).clone();
            let mut f = self.free.at(prev, ord).clone();
            for j in 1..=rows {
                let down = self.space.remove(ord, j);
                c += self.count.at_opt(prev, down);
                f += self.free.at_opt(prev, down);
                let up = self.space.add(ord, j);
                c += self.excluded.at_opt(next, up);
                f += self.free_ext.at_opt(next, up);
            }
            let ex = self.excluded.at(i as isize, ord);
            if *ex > c {
                return Err(CountingError::NegativeResidual {
                    len: i,
                    shape: self.space.shape(ord).clone(),
                });
            }
            self.residual.rows[i][ord] = &c - ex;
            self.count.rows[i][ord] = c;
            self.free.rows[i][ord] = f;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.space.k()
    }

    pub fn stack_sizes(&self) -> StackSizes {
        self.sizes
    }

    pub fn space(&self) -> &ShapeSpace {
        &self.space
    }

    /// Number of stored cells.
    pub fn cells(&self) -> usize {
        self.count.cells()
            + self.residual.cells()
            + self.free.cells()
            + self.excluded.cells()
            + self.free_ext.cells()
    }

    pub(crate) fn grid(&self, grade: Grade) -> &Grid {
        match grade {
            Grade::Count => &self.count,
            Grade::Excluded => &self.excluded,
            Grade::Residual => &self.residual,
            Grade::Free => &self.free,
            Grade::FreeExt => &self.free_ext,
        }
    }

    /// Exact table entry. Shapes with more squares than `len` read as zero;
    /// cells outside the exact region are an error.
    pub fn entry(&self, grade: Grade, len: usize, shape: &Shape) -> Result<BigUint, CountingError> {
        let slack = match grade {
            Grade::Excluded | Grade::FreeExt => 2,
            _ => 0,
        };
        if len + shape.squares() > self.n + slack {
            return Err(CountingError::OutOfRegion {
                len,
                shape: shape.clone(),
                n: self.n,
            });
        }
        if shape.squares() > len {
            crate::shape::valid_shape(shape.rows(), self.k())
                .then_some(())
                .ok_or(ShapeError::Invalid {
                    rows: shape.rows().to_vec(),
                    max_rows: self.k() - 1,
                })?;
            return Ok(BigUint::ZERO);
        }
        let ord = self.space.index(shape)?;
        Ok(self.grid(grade).at(len as isize, ord).clone())
    }

    /// `count[n][∅]`: the number of target objects of length `n`.
    pub fn total(&self) -> &BigUint {
        self.count.at(self.n as isize, 0)
    }

    /// `free[n][∅]`: the number of weighted shape sequences of length `n`.
    pub fn free_total(&self) -> &BigUint {
        self.free.at(self.n as isize, 0)
    }

    /// Ordinals of all shapes with at most `squares` squares.
    pub(crate) fn ordinals_upto(&self, squares: usize) -> usize {
        self.size_prefix[squares.min(self.size_prefix.len() - 1)]
    }

    pub(crate) fn grades(rule: WeightRule) -> (Grade, Grade, Grade) {
        match rule {
            WeightRule::Unrestricted => (Grade::Free, Grade::FreeExt, Grade::Free),
            WeightRule::StackCorrected => (Grade::Count, Grade::Excluded, Grade::Residual),
        }
    }

    fn check_state(&self, remaining: usize, shape: &Shape) -> Result<usize, CountingError> {
        if remaining == 0 || remaining + shape.squares() > self.n {
            return Err(CountingError::OutOfRegion {
                len: remaining,
                shape: shape.clone(),
                n: self.n,
            });
        }
        Ok(self.space.index(shape)?)
    }

    /// Every positive-weight step that can end a prefix of length
    /// `remaining` at `shape`, in the fixed order: nothing, insertions by
    /// ascending row, extractions by ascending row then ascending size.
    pub fn transitions(
        &self,
        rule: WeightRule,
        remaining: usize,
        shape: &Shape,
    ) -> Result<Vec<Transition>, CountingError> {
        let ord = self.check_state(remaining, shape)?;
        let (main, _, per_size) = Self::grades(rule);
        let (main, per_size) = (self.grid(main), self.grid(per_size));
        if main.at(remaining as isize, ord).is_zero() {
            return Err(CountingError::ZeroState {
                remaining,
                shape: shape.clone(),
            });
        }
        let t = remaining as isize;
        let mut out = Vec::new();
        let mut push = |step, stack_size, weight: &BigUint| {
            if !weight.is_zero() {
                out.push(Transition {
                    step,
                    stack_size,
                    weight: weight.clone(),
                });
            }
        };
        push(Move::Nothing, None, main.at(t - 1, ord));
        let rows = self.space.max_rows();
        for j in 1..=rows {
            push(
                Move::AddSquare(j),
                None,
                main.at_opt(t - 1, self.space.remove(ord, j)),
            );
        }
        for j in 1..=rows {
            let up = self.space.add(ord, j);
            for s in self.sizes.range(remaining) {
                let w = per_size.at_opt(t - 2 * s as isize + 1, up);
                push(Move::RemoveSquare(j), Some(s), w);
            }
        }
        Ok(out)
    }

    /// Checks every stored cell against its defining recursion. Returns the
    /// number of violations.
    pub fn check_recurrences(&self) -> usize {
        let mut bad = 0;
        let rows = self.space.max_rows();
        for x in 0..self.excluded.rows.len() {
            let xi = x as isize;
            for ord in 0..self.excluded.rows[x].len() {
                let (ex, fx) = match self.sizes {
                    StackSizes::Single => (
                        self.residual.at(xi - 2, ord).clone(),
                        self.free.at(xi - 2, ord).clone(),
                    ),
                    StackSizes::AtLeast(sigma) => {
                        let back = xi - 2 * sigma as isize;
                        (
                            self.residual.at(back, ord) + self.excluded.at(xi - 2, ord),
                            self.free.at(back, ord) + self.free_ext.at(xi - 2, ord),
                        )
                    }
                };
                bad += usize::from(ex != self.excluded.rows[x][ord]);
                bad += usize::from(fx != self.free_ext.rows[x][ord]);
            }
        }
        for i in 0..self.count.rows.len() {
            let ii = i as isize;
            for ord in 0..self.count.rows[i].len() {
                let (mut c, mut f) = if i == 0 {
                    let unit = BigUint::from(u8::from(ord == 0));
                    (unit.clone(), unit)
                } else {
                    (
                        self.count.at(ii - 1, ord).clone(),
                        self.free.at(ii - 1, ord).clone(),
                    )
                };
                if i > 0 {
                    for j in 1..=rows {
                        let down = self.space.remove(ord, j);
                        let up = self.space.add(ord, j);
                        c += self.count.at_opt(ii - 1, down) + self.excluded.at_opt(ii + 1, up);
                        f += self.free.at_opt(ii - 1, down) + self.free_ext.at_opt(ii + 1, up);
                    }
                }
                let ok = c == self.count.rows[i][ord]
                    && f == self.free.rows[i][ord]
                    && &self.residual.rows[i][ord] + self.excluded.at(ii, ord) == c;
                bad += usize::from(!ok);
            }
        }
        bad
    }

    /// Cells `(len, ordinal)` of the main grids.
    fn main_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.count
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| (0..r.len()).map(move |o| (i, o)))
    }
}

// Shapes with at most `max_rows` rows and at most `cap` squares, saturating.
fn shape_count(cap: usize, max_rows: usize) -> u128 {
    // ways[m]: partitions of m into parts of size at most `max_rows`, which
    // by conjugation have at most `max_rows` rows
    let mut ways = vec![0u128; cap + 1];
    ways[0] = 1;
    for part in 1..=max_rows.min(cap) {
        for m in part..=cap {
            ways[m] = ways[m].saturating_add(ways[m - part]);
        }
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Core counts: `t` is the number of prefixes without stacked arcs, `g`
/// the stacking correction.
#[derive(Debug, Clone)]
pub struct CoreTable(StackTable);

/// σ-weighted counts `w` and their correction `v`.
#[derive(Debug, Clone)]
pub struct WeightedTable(StackTable);

impl CoreTable {
    pub fn from_stack_table(table: StackTable) -> Option<Self> {
        (table.sizes == StackSizes::Single).then_some(CoreTable(table))
    }

    pub fn inner(&self) -> &StackTable {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn k(&self) -> usize {
        self.0.k()
    }

    pub fn t(&self, len: usize, shape: &Shape) -> Result<BigUint, CountingError> {
        self.0.entry(Grade::Count, len, shape)
    }

    pub fn g(&self, len: usize, shape: &Shape) -> Result<BigUint, CountingError> {
        self.0.entry(Grade::Excluded, len, shape)
    }

    /// Number of `k`-noncrossing cores on `n` vertices.
    pub fn total(&self) -> &BigUint {
        self.0.total()
    }
}

impl WeightedTable {
    pub fn from_stack_table(table: StackTable) -> Option<Self> {
        matches!(table.sizes, StackSizes::AtLeast(_)).then_some(WeightedTable(table))
    }

    pub fn inner(&self) -> &StackTable {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn k(&self) -> usize {
        self.0.k()
    }

    pub fn sigma(&self) -> usize {
        self.0.sizes.min()
    }

    pub fn w(&self, len: usize, shape: &Shape) -> Result<BigUint, CountingError> {
        self.0.entry(Grade::Count, len, shape)
    }

    pub fn v(&self, len: usize, shape: &Shape) -> Result<BigUint, CountingError> {
        self.0.entry(Grade::Excluded, len, shape)
    }

    /// Number of `k`-noncrossing σ-modular diagrams on `n` vertices.
    pub fn total(&self) -> &BigUint {
        self.0.total()
    }
}

pub fn build_core_table(n: usize, k: usize) -> Result<CoreTable, CountingError> {
    StackTable::build(n, k, StackSizes::Single).map(CoreTable)
}

pub fn build_weighted_table(n: usize, k: usize, sigma: usize) -> Result<WeightedTable, CountingError> {
    if sigma == 0 {
        return Err(CountingError::BadSigma(0));
    }
    StackTable::build(n, k, StackSizes::AtLeast(sigma)).map(WeightedTable)
}

/// Ordered tuples `(a_1, ..., a_parts)` with every `a_i >= min_part` and
/// sum `total`.
pub fn compositions_count(total: usize, parts: usize, min_part: usize) -> BigUint {
    if parts == 0 {
        return BigUint::from(u8::from(total == 0));
    }
    let Some(spare) = total.checked_sub(parts * min_part) else {
        return BigUint::ZERO;
    };
    binomial(spare + parts - 1, parts - 1)
}

fn binomial(n: usize, r: usize) -> BigUint {
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Moves and weights of the stack-corrected process for cores.
pub fn core_transition_weights(
    table: &CoreTable,
    remaining: usize,
    shape: &Shape,
) -> Result<Vec<(Move, BigUint)>, CountingError> {
    Ok(table
        .0
        .transitions(WeightRule::StackCorrected, remaining, shape)?
        .into_iter()
        .map(|t| (t.step, t.weight))
        .collect())
}

/// Moves, stack sizes and weights of the stack-corrected weighted process.
pub fn weighted_transition_weights(
    table: &WeightedTable,
    remaining: usize,
    shape: &Shape,
) -> Result<Vec<(Move, Option<usize>, BigUint)>, CountingError> {
    Ok(table
        .0
        .transitions(WeightRule::StackCorrected, remaining, shape)?
        .into_iter()
        .map(|t| (t.step, t.stack_size, t.weight))
        .collect())
}

/// Outcome of an identity sweep over table cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub cells: usize,
    pub mismatches: Vec<(usize, Shape)>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks `t[x] - g[x] = Σ_p (-1)^p t[x - 2p]` at every cell.
pub fn check_core_alternating(table: &CoreTable) -> IdentityReport {
    let st = &table.0;
    let mut report = IdentityReport::default();
    for (x, ord) in st.main_cells() {
        let mut alt = BigInt::zero();
        for p in 0..=x / 2 {
            let term = BigInt::from(st.count.at((x - 2 * p) as isize, ord).clone());
            if p % 2 == 0 {
                alt += term;
            } else {
                alt -= term;
            }
        }
        report.cells += 1;
        if alt != BigInt::from(st.residual.at(x as isize, ord).clone()) {
            report.mismatches.push((x, st.space.shape(ord).clone()));
        }
    }
    report
}

/// Checks, for every state `(t, μ)`, that the total extraction weight
/// `Σ_{s >= σ} (w - v)[t - 2s + 1][μ]` equals the grouped form
/// `Σ_s Σ_ℓ (-1)^(ℓ-1) c(s, ℓ, σ) w[t - 2s + 1][μ]`, with `c` counting
/// compositions of `s` into `ℓ` parts of size at least σ.
pub fn check_weighted_grouped(table: &WeightedTable) -> IdentityReport {
    let st = &table.0;
    let sigma = table.sigma();
    let mut report = IdentityReport::default();
    for t in 1..=st.n {
        // μ = λ + □ with t + |λ| <= n
        for ord in 0..st.ordinals_upto((st.n - t + 1).min(t + 1)) {
            let mut lhs = BigUint::zero();
            let mut rhs = BigInt::zero();
            for s in sigma..=t.div_ceil(2) {
                let len = t as isize - 2 * s as isize + 1;
                lhs += st.residual.at(len, ord);
                let w = BigInt::from(st.count.at(len, ord).clone());
                for parts in 1..=s / sigma {
                    let term = BigInt::from(compositions_count(s, parts, sigma)) * &w;
                    if parts % 2 == 1 {
                        rhs += term;
                    } else {
                        rhs -= term;
                    }
                }
            }
            report.cells += 1;
            if BigInt::from(lhs) != rhs {
                report.mismatches.push((t, st.space.shape(ord).clone()));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(rows: &[usize]) -> Shape {
        Shape::new(rows.to_vec()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn compositions() {
        assert_eq!(compositions_count(4, 2, 2), big(1));
        assert_eq!(compositions_count(5, 2, 2), big(2));
        assert_eq!(compositions_count(7, 1, 3), big(1));
        assert_eq!(compositions_count(3, 2, 2), big(0));
        assert_eq!(compositions_count(9, 3, 2), big(10));
    }

    #[test]
    fn core_table_values() {
        let t2 = build_core_table(6, 2).unwrap();
        let t3 = build_core_table(6, 3).unwrap();
        assert_eq!(t2.t(2, &Shape::empty()).unwrap(), big(2));
        assert_eq!(t3.t(2, &Shape::empty()).unwrap(), big(2));
        assert_eq!(t2.t(4, &Shape::empty()).unwrap(), big(8));
        assert_eq!(t3.t(4, &Shape::empty()).unwrap(), big(9));
        assert_eq!(t2.g(3, &sh(&[1])).unwrap(), big(1));
        assert_eq!(t2.t(3, &sh(&[1])).unwrap(), big(5));
        assert_eq!(build_core_table(4, 3).unwrap().total(), &big(9));
    }

    #[test]
    fn weighted_table_values() {
        let w = build_weighted_table(8, 2, 2).unwrap();
        for i in 0..4 {
            assert_eq!(w.w(i, &Shape::empty()).unwrap(), big(1));
        }
        assert_eq!(w.w(4, &Shape::empty()).unwrap(), big(2));
        assert_eq!(w.w(5, &Shape::empty()).unwrap(), big(4));
        assert_eq!(w.w(6, &Shape::empty()).unwrap(), big(8));
        assert_eq!(build_weighted_table(6, 2, 2).unwrap().total(), &big(8));
    }

    #[test]
    fn noncrossing_motzkin_totals() {
        let motzkin = [1u64, 1, 2, 4, 9, 21, 51, 127, 323, 835, 2188, 5798, 15511];
        for (n, &m) in motzkin.iter().enumerate() {
            assert_eq!(build_weighted_table(n, 2, 1).unwrap().total(), &big(m), "n={n}");
        }
    }

    #[test]
    fn free_totals_count_all_sequences() {
        // with s = 1 only, every shape sequence is a noncrossing diagram
        let motzkin = [1u64, 1, 2, 4, 9, 21, 51, 127, 323];
        for (n, &m) in motzkin.iter().enumerate() {
            assert_eq!(build_core_table(n, 2).unwrap().inner().free_total(), &big(m));
        }
    }

    #[test]
    fn transition_examples() {
        let t2 = build_core_table(6, 2).unwrap();
        assert_eq!(
            core_transition_weights(&t2, 1, &Shape::empty()).unwrap(),
            vec![(Move::Nothing, big(1))]
        );
        assert_eq!(
            core_transition_weights(&t2, 2, &Shape::empty()).unwrap(),
            vec![(Move::Nothing, big(1)), (Move::RemoveSquare(1), big(1))]
        );
        assert_eq!(
            core_transition_weights(&t2, 3, &sh(&[1])).unwrap(),
            vec![
                (Move::Nothing, big(2)),
                (Move::AddSquare(1), big(2)),
                (Move::RemoveSquare(1), big(1)),
            ]
        );

        let w = build_weighted_table(6, 2, 2).unwrap();
        assert_eq!(
            weighted_transition_weights(&w, 1, &Shape::empty()).unwrap(),
            vec![(Move::Nothing, None, big(1))]
        );
        assert_eq!(
            weighted_transition_weights(&w, 4, &Shape::empty()).unwrap(),
            vec![
                (Move::Nothing, None, big(1)),
                (Move::RemoveSquare(1), Some(2), big(1)),
            ]
        );
        assert_eq!(
            weighted_transition_weights(&w, 6, &Shape::empty()).unwrap(),
            vec![
                (Move::Nothing, None, big(4)),
                (Move::RemoveSquare(1), Some(2), big(3)),
                (Move::RemoveSquare(1), Some(3), big(1)),
            ]
        );
    }

    #[test]
    fn transitions_normalize() {
        for sizes in [StackSizes::Single, StackSizes::AtLeast(2), StackSizes::AtLeast(1)] {
            let st = StackTable::build(10, 3, sizes).unwrap();
            for rule in [WeightRule::StackCorrected, WeightRule::Unrestricted] {
                let main = StackTable::grades(rule).0;
                for t in 1..=10 {
                    for ord in 0..st.ordinals_upto(10 - t) {
                        let shape = st.space.shape(ord).clone();
                        let expected = st.grid(main).at(t as isize, ord).clone();
                        match st.transitions(rule, t, &shape) {
                            Ok(list) => {
                                let sum: BigUint = list.iter().map(|x| &x.weight).sum();
                                assert_eq!(sum, expected);
                            }
                            Err(CountingError::ZeroState { .. }) => assert!(expected.is_zero()),
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_state_and_region_errors() {
        let t2 = build_core_table(4, 2).unwrap();
        assert!(matches!(
            core_transition_weights(&t2, 1, &sh(&[2])),
            Err(CountingError::ZeroState { .. })
        ));
        assert!(matches!(
            t2.t(4, &sh(&[1])),
            Err(CountingError::OutOfRegion { .. })
        ));
        assert!(matches!(build_core_table(4, 1), Err(CountingError::BadK(1))));
        assert!(matches!(
            build_weighted_table(4, 2, 0),
            Err(CountingError::BadSigma(0))
        ));
    }

    #[test]
    fn identities_hold() {
        for k in 2..=4 {
            let t = build_core_table(12, k).unwrap();
            let r = check_core_alternating(&t);
            assert!(r.holds() && r.cells > 0, "{r:?}");
            assert_eq!(t.inner().check_recurrences(), 0);
        }
        for sigma in 1..=3 {
            let w = build_weighted_table(12, 3, sigma).unwrap();
            let r = check_weighted_grouped(&w);
            assert!(r.holds() && r.cells > 0, "{r:?}");
            assert_eq!(w.inner().check_recurrences(), 0);
        }
    }

    #[test]
    fn corrupted_cell_is_detected() {
        let mut st = StackTable::build(8, 3, StackSizes::AtLeast(2)).unwrap();
        st.count.rows[5][1] += 1u32;
        assert!(st.check_recurrences() > 0);
    }
}

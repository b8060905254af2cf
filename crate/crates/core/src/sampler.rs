//! Restart samplers for cores and σ-modular diagrams.
//!
//! A shape sequence is drawn backwards, one step per state `(remaining,
//! shape)`, with probabilities proportional to exact table entries. The
//! arcs are materialized by reading the drawn steps in the order they were
//! drawn, which yields the mirror image of the diagram; an attempt restarts
//! as soon as a new core arc would stack onto the previous one.

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::counting::{CountingError, CoreTable, StackSizes, StackTable, WeightRule, WeightedTable};
use crate::diagram::{expand, Diagram, DiagramError, WeightedCore};
use crate::shape::{Move, Shape};
use crate::tableau::{Entry, StarSequence, Tableau, TableauError};

/// Attempts running on one random stream in [`success_rate`].
pub const ATTEMPTS_PER_STREAM: u64 = 4096;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("gave up after {} restarts", .0.restarts)]
    GaveUp(SamplerStats),
    #[error("all weights are zero")]
    AllZero,
    #[error("transition weights at ({remaining}, {shape}) do not sum to the table entry")]
    Normalization { remaining: usize, shape: Shape },
    #[error("table is for {found}, sampler needs {wanted}")]
    TableMismatch { found: String, wanted: String },
    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Counting(#[from] CountingError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SamplerStats {
    pub attempts: u64,
    pub restarts: u64,
    pub successes: u64,
    /// Sampling steps taken over all attempts.
    pub steps: u64,
    /// States whose transition weights were summed against the table.
    pub normalization_checks: u64,
    pub normalization_violations: u64,
}

impl SamplerStats {
    pub fn merge(&mut self, other: &SamplerStats) {
        self.attempts += other.attempts;
        self.restarts += other.restarts;
        self.successes += other.successes;
        self.steps += other.steps;
        self.normalization_checks += other.normalization_checks;
        self.normalization_violations += other.normalization_violations;
    }

    pub fn success_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.successes as f64 / self.attempts as f64
        }
    }
}

/// Returns `i` with probability `weights[i] / Σ weights`, exactly.
pub fn draw_weighted_choice<R: Rng + ?Sized>(
    weights: &[BigUint],
    rng: &mut R,
) -> Result<usize, SampleError> {
    let total: BigUint = weights.iter().sum();
    if total.is_zero() {
        return Err(SampleError::AllZero);
    }
    let mut r = rng.gen_biguint_below(&total);
    for (i, w) in weights.iter().enumerate() {
        if r < *w {
            return Ok(i);
        }
        r -= w;
    }
    unreachable!("r is below the total")
}

/// A shape sequence whose extraction steps carry stack sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedStarSequence {
    shapes: StarSequence,
    // indexed by step - 1
    weights: Vec<Option<usize>>,
}

impl WeightedStarSequence {
    pub fn shapes(&self) -> &StarSequence {
        &self.shapes
    }

    /// Stack size of step `i` (1-based), present for extraction steps.
    pub fn weight(&self, i: usize) -> Option<usize> {
        self.weights[i - 1]
    }

    /// Vertex count after inflating every extraction into its stack.
    pub fn expanded_len(&self) -> usize {
        self.shapes.steps() + self.weights.iter().flatten().map(|s| 2 * (s - 1)).sum::<usize>()
    }
}

// One drawn step, in drawing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Drawn {
    Nothing,
    // removes a square from `row`: the forward step was an insertion
    Shrink { row: usize, ord: usize },
    // adds a square to `row`: the forward step was an extraction
    Grow { row: usize, ord: usize, size: usize },
}

// The sampling walk over one table, with the per-step normalization checks.
struct Walk<'a> {
    table: &'a StackTable,
    rule: WeightRule,
    verify: bool,
    remaining: usize,
    ord: usize,
}

impl<'a> Walk<'a> {
    fn new(table: &'a StackTable, rule: WeightRule, verify: bool) -> Self {
        Walk {
            table,
            rule,
            verify,
            remaining: table.n(),
            ord: 0,
        }
    }

    fn done(&self) -> bool {
        self.remaining == 0
    }

    fn normalization_error(&self) -> SampleError {
        SampleError::Normalization {
            remaining: self.remaining,
            shape: self.table.space().shape(self.ord).clone(),
        }
    }

    fn step<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        stats: &mut SamplerStats,
    ) -> Result<Drawn, SampleError> {
        let (main, ext, per_size) = StackTable::grades(self.rule);
        let (main, ext, per_size) = (
            self.table.grid(main),
            self.table.grid(ext),
            self.table.grid(per_size),
        );
        let space = self.table.space();
        let rows = space.max_rows();
        let t = self.remaining as isize;
        let ord = self.ord;
        let total = main.at(t, ord);
        if self.verify {
            stats.normalization_checks += 1;
            if !self.normalized(total) {
                stats.normalization_violations += 1;
                return Err(self.normalization_error());
            }
        }
        if total.is_zero() {
            return Err(self.normalization_error());
        }
        stats.steps += 1;
        let mut r = rng.gen_biguint_below(total);

        let stay = main.at(t - 1, ord);
        if r < *stay {
            self.remaining -= 1;
            return Ok(Drawn::Nothing);
        }
        r -= stay;
        for row in 1..=rows {
            if let Some(down) = space.remove(ord, row) {
                let w = main.at(t - 1, down);
                if r < *w {
                    self.remaining -= 1;
                    self.ord = down;
                    return Ok(Drawn::Shrink { row, ord: down });
                }
                r -= w;
            }
        }
        for row in 1..=rows {
            let Some(up) = space.add(ord, row) else {
                continue;
            };
            let block = ext.at(t + 1, up);
            if r >= *block {
                r -= block;
                continue;
            }
            for size in self.table.stack_sizes().range(self.remaining) {
                let w = per_size.at(t - 2 * size as isize + 1, up);
                if r < *w {
                    self.remaining -= 2 * size - 1;
                    self.ord = up;
                    return Ok(Drawn::Grow { row, ord: up, size });
                }
                r -= w;
            }
            break;
        }
        Err(self.normalization_error())
    }

    // Sum of every explicit transition weight, and of each extraction block
    // against its aggregate, compared with the state's entry.
    fn normalized(&self, total: &BigUint) -> bool {
        let (main, ext, per_size) = StackTable::grades(self.rule);
        let (main, ext, per_size) = (
            self.table.grid(main),
            self.table.grid(ext),
            self.table.grid(per_size),
        );
        let space = self.table.space();
        let t = self.remaining as isize;
        let mut sum = main.at(t - 1, self.ord).clone();
        for row in 1..=space.max_rows() {
            if let Some(down) = space.remove(self.ord, row) {
                sum += main.at(t - 1, down);
            }
            if let Some(up) = space.add(self.ord, row) {
                let mut block = BigUint::zero();
                for size in self.table.stack_sizes().range(self.remaining) {
                    block += per_size.at(t - 2 * size as isize + 1, up);
                }
                if block != *ext.at(t + 1, up) {
                    return false;
                }
                sum += block;
            }
        }
        sum == *total
    }
}

/// How an attempt turns drawn steps into a diagram.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Pass {
    /// Arcs are built while drawing; the attempt stops at the first stacked
    /// pair.
    #[default]
    Single,
    /// The full sequence is drawn first, then read forwards.
    Two,
}

/// A seeded sampling session over one frozen table.
pub struct SamplerSession<'a> {
    table: &'a StackTable,
    rng: ChaCha8Rng,
    rule: WeightRule,
    pass: Pass,
    max_restarts: u64,
    verify: bool,
    stats: SamplerStats,
}

impl<'a> SamplerSession<'a> {
    pub fn new(table: &'a StackTable, seed: u64) -> Self {
        Self::with_rng(table, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(table: &'a StackTable, rng: ChaCha8Rng) -> Self {
        SamplerSession {
            table,
            rng,
            rule: WeightRule::default(),
            pass: Pass::default(),
            max_restarts: 0,
            verify: false,
            stats: SamplerStats::default(),
        }
    }

    pub fn rule(mut self, rule: WeightRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn pass(mut self, pass: Pass) -> Self {
        self.pass = pass;
        self
    }

    /// Restarts allowed per sample; 0 means unlimited.
    pub fn max_restarts(mut self, max_restarts: u64) -> Self {
        self.max_restarts = max_restarts;
        self
    }

    /// Sums all transition weights at every visited state.
    pub fn verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    pub fn stats(&self) -> &SamplerStats {
        &self.stats
    }

    pub fn table(&self) -> &StackTable {
        self.table
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// One attempt: `None` if it had to restart.
    pub fn attempt(&mut self) -> Result<Option<Diagram>, SampleError> {
        self.stats.attempts += 1;
        let out = match self.pass {
            Pass::Single => single_pass(self.table, self.rule, self.verify, &mut self.rng, &mut self.stats)?,
            Pass::Two => two_pass(self.table, self.rule, self.verify, &mut self.rng, &mut self.stats)?,
        };
        if out.is_some() {
            self.stats.successes += 1;
        } else {
            self.stats.restarts += 1;
        }
        Ok(out)
    }

    /// Draws until an attempt succeeds. Returns the diagram and the number
    /// of attempts it took.
    pub fn sample_counted(&mut self) -> Result<(Diagram, u64), SampleError> {
        let mut tries = 0;
        loop {
            tries += 1;
            if let Some(d) = self.attempt()? {
                return Ok((d, tries));
            }
            if self.max_restarts > 0 && tries > self.max_restarts {
                return Err(SampleError::GaveUp(self.stats));
            }
        }
    }

    pub fn sample(&mut self) -> Result<Diagram, SampleError> {
        self.sample_counted().map(|(d, _)| d)
    }
}

fn single_pass<R: Rng + ?Sized>(
    table: &StackTable,
    rule: WeightRule,
    verify: bool,
    rng: &mut R,
    stats: &mut SamplerStats,
) -> Result<Option<Diagram>, SampleError> {
    let mut walk = Walk::new(table, rule, verify);
    let mut tableau = Tableau::new();
    let mut arcs: Vec<(usize, usize, usize)> = Vec::new();
    let mut last_arc = (0, 0);
    let mut pos = 0;
    while !walk.done() {
        pos += 1;
        match walk.step(rng, stats)? {
            Drawn::Nothing => {}
            Drawn::Shrink { row, .. } => {
                let e = tableau.extract(row)?;
                if last_arc == (e.label + 1, pos - 1) {
                    return Ok(None);
                }
                last_arc = (e.label, pos);
                arcs.push((e.label, pos, e.weight.unwrap_or(1)));
            }
            Drawn::Grow { row, size, .. } => tableau.place(row, Entry::weighted(pos, size))?,
        }
    }
    let m = pos;
    let core = WeightedCore::new(m, arcs.into_iter().map(|(a, b, s)| (m + 1 - b, m + 1 - a, s)))?;
    Ok(Some(expand(&core)))
}

fn two_pass<R: Rng + ?Sized>(
    table: &StackTable,
    rule: WeightRule,
    verify: bool,
    rng: &mut R,
    stats: &mut SamplerStats,
) -> Result<Option<Diagram>, SampleError> {
    let seq = draw_sequence(table, rule, verify, rng, stats)?;
    let (m, arcs) = weighted_sequence_to_arcs(&seq)?;
    // a stacked pair can only involve the arc closed one step earlier
    let last_pair = arcs
        .windows(2)
        .any(|w| w[1].1 == w[0].1 + 1 && w[1].0 + 1 == w[0].0);
    match WeightedCore::new(m, arcs) {
        Ok(core) => {
            debug_assert!(!last_pair);
            Ok(Some(expand(&core)))
        }
        Err(DiagramError::NotCore(..)) => {
            debug_assert!(last_pair);
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn draw_sequence<R: Rng + ?Sized>(
    table: &StackTable,
    rule: WeightRule,
    verify: bool,
    rng: &mut R,
    stats: &mut SamplerStats,
) -> Result<WeightedStarSequence, SampleError> {
    let mut walk = Walk::new(table, rule, verify);
    let space = table.space();
    // drawn backwards: shapes[0] is the last shape of the sequence
    let mut shapes = vec![Shape::empty()];
    let mut weights = Vec::new();
    while !walk.done() {
        let (ord, weight) = match walk.step(rng, stats)? {
            Drawn::Nothing => (walk.ord, None),
            Drawn::Shrink { ord, .. } => (ord, None),
            Drawn::Grow { ord, size, .. } => (ord, Some(size)),
        };
        shapes.push(space.shape(ord).clone());
        weights.push(weight);
    }
    shapes.reverse();
    weights.reverse();
    Ok(WeightedStarSequence {
        shapes: StarSequence::from_trusted(shapes),
        weights,
    })
}

/// Arc `(i, j)` carrying stack size `s`.
pub type WeightedArc = (usize, usize, usize);

/// Forward reading of a weighted sequence: the vertex count and the arcs
/// `(i, j, s)` of the core, sorted by terminal. The arcs may stack.
pub fn weighted_sequence_to_arcs(
    seq: &WeightedStarSequence,
) -> Result<(usize, Vec<WeightedArc>), SampleError> {
    let steps = seq.shapes.steps();
    let mut tableau = Tableau::new();
    let mut arcs = Vec::new();
    for i in 1..=steps {
        match seq.shapes.step(i) {
            Move::Nothing => {}
            Move::AddSquare(row) => tableau.place(row, Entry::new(i))?,
            Move::RemoveSquare(row) => {
                let e = tableau.extract(row)?;
                arcs.push((e.label, i, seq.weight(i).unwrap_or(1)));
            }
        }
    }
    Ok((steps, arcs))
}

fn require(table: &StackTable, n: usize, k: usize, sizes: StackSizes) -> Result<(), SampleError> {
    if (table.n(), table.k(), table.stack_sizes()) != (n, k, sizes) {
        return Err(SampleError::TableMismatch {
            found: format!("n={}, k={}, {:?}", table.n(), table.k(), table.stack_sizes()),
            wanted: format!("n={n}, k={k}, {sizes:?}"),
        });
    }
    Ok(())
}

/// Draws a core shape sequence (all stack sizes 1) of the table's length.
pub fn sample_star_sequence<R: Rng + ?Sized>(
    table: &CoreTable,
    rule: WeightRule,
    rng: &mut R,
) -> Result<StarSequence, SampleError> {
    let seq = draw_sequence(table.inner(), rule, false, rng, &mut SamplerStats::default())?;
    Ok(seq.shapes)
}

/// Draws a weighted shape sequence whose expanded length is the table's `n`.
pub fn sample_weighted_sequence<R: Rng + ?Sized>(
    table: &WeightedTable,
    rule: WeightRule,
    rng: &mut R,
) -> Result<WeightedStarSequence, SampleError> {
    let seq = draw_sequence(table.inner(), rule, false, rng, &mut SamplerStats::default())?;
    debug_assert_eq!(seq.expanded_len(), table.n());
    Ok(seq)
}

/// A `k`-noncrossing core on `n` vertices.
pub fn sample_core(n: usize, k: usize, session: &mut SamplerSession) -> Result<Diagram, SampleError> {
    require(session.table, n, k, StackSizes::Single)?;
    session.sample()
}

/// A `k`-noncrossing σ-modular diagram on `n` vertices.
pub fn sample_modular(
    n: usize,
    k: usize,
    sigma: usize,
    session: &mut SamplerSession,
) -> Result<Diagram, SampleError> {
    require(session.table, n, k, StackSizes::AtLeast(sigma))?;
    session.sample()
}

/// Settings shared by every session of a batch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchConfig {
    pub rule: WeightRule,
    pub max_restarts: u64,
    pub verify: bool,
    /// Worker threads; 0 uses the global pool.
    pub parallelism: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub diagram: Diagram,
    pub attempts: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Batch {
    pub samples: Vec<Sample>,
    pub stats: SamplerStats,
}

/// Stream `index` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn in_pool<T: Send>(parallelism: usize, job: impl FnOnce() -> T + Send) -> Result<T, SampleError> {
    if parallelism == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| SampleError::ThreadPool(e.to_string()))?;
    Ok(pool.install(job))
}

/// `count` samples; sample `i` runs on stream `i` of `seed`, so the output
/// does not depend on `parallelism`.
pub fn sample_batch(
    table: &StackTable,
    count: usize,
    seed: u64,
    config: BatchConfig,
) -> Result<Batch, SampleError> {
    let results: Vec<Result<(Sample, SamplerStats), SampleError>> = in_pool(config.parallelism, || {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut session = SamplerSession::with_rng(table, stream_rng(seed, i as u64))
                    .rule(config.rule)
                    .max_restarts(config.max_restarts)
                    .verify(config.verify);
                let (diagram, attempts) = session.sample_counted()?;
                Ok((Sample { diagram, attempts }, session.stats))
            })
            .collect()
    })?;
    let mut batch = Batch::default();
    for r in results {
        let (sample, stats) = r?;
        batch.stats.merge(&stats);
        batch.samples.push(sample);
    }
    Ok(batch)
}

/// Runs `attempts` independent attempts and reports how many succeeded.
/// Attempts are grouped into runs of [`ATTEMPTS_PER_STREAM`], one random
/// stream per run.
pub fn success_rate(
    table: &StackTable,
    attempts: u64,
    seed: u64,
    config: BatchConfig,
) -> Result<SamplerStats, SampleError> {
    let streams = attempts.div_ceil(ATTEMPTS_PER_STREAM);
    let parts: Vec<Result<SamplerStats, SampleError>> = in_pool(config.parallelism, || {
        (0..streams)
            .into_par_iter()
            .map(|s| {
                let n = ATTEMPTS_PER_STREAM.min(attempts - s * ATTEMPTS_PER_STREAM);
                let mut session = SamplerSession::with_rng(table, stream_rng(seed, s))
                    .rule(config.rule)
                    .verify(config.verify);
                for _ in 0..n {
                    session.attempt()?;
                }
                Ok(session.stats)
            })
            .collect()
    })?;
    let mut total = SamplerStats::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}

//! Diagrams (partial matchings on `1..=n` drawn above a line), their
//! crossing and stack structure, and the collapse/expand correspondence
//! between σ-modular diagrams and σ-weighted cores.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Arc = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("arc ({0}, {1}) is not of the form 1 <= i < j <= n")]
    BadArc(usize, usize),
    #[error("vertex {0} is an endpoint of more than one arc")]
    DegreeViolation(usize),
    #[error("arc ({0}, {1}) lies in a stack of length {2}, below sigma = {3}")]
    NotModular(usize, usize, usize, usize),
    #[error("arcs ({0}, {1}) and ({2}, {3}) stack, so the arc set is not a core")]
    NotCore(usize, usize, usize, usize),
    #[error("weight {weight} of arc ({i}, {j}) must be at least 1")]
    BadWeight { i: usize, j: usize, weight: usize },
}

/// A labeled graph on vertices `1..=n` in which every vertex has degree at
/// most one. Arcs are kept sorted by origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawDiagram", into = "RawDiagram")]
pub struct Diagram {
    n: usize,
    arcs: Vec<Arc>,
}

#[derive(Serialize, Deserialize)]
struct RawDiagram {
    n: usize,
    arcs: Vec<[usize; 2]>,
}

impl TryFrom<RawDiagram> for Diagram {
    type Error = DiagramError;
    fn try_from(raw: RawDiagram) -> Result<Self, Self::Error> {
        Diagram::new(raw.n, raw.arcs.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<Diagram> for RawDiagram {
    fn from(d: Diagram) -> Self {
        RawDiagram {
            n: d.n,
            arcs: d.arcs.into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl Diagram {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self, DiagramError> {
        let mut arcs: Vec<Arc> = arcs.into_iter().collect();
        let mut seen = vec![false; n + 1];
        for &(i, j) in &arcs {
            if i == 0 || i >= j || j > n {
                return Err(DiagramError::BadArc(i, j));
            }
            for v in [i, j] {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(DiagramError::DegreeViolation(v));
                }
            }
        }
        arcs.sort_unstable();
        Ok(Diagram { n, arcs })
    }

    pub fn empty(n: usize) -> Self {
        Diagram {
            n,
            arcs: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn contains(&self, arc: Arc) -> bool {
        self.arcs.binary_search(&arc).is_ok()
    }

    /// `partner[v]` is the other endpoint of the arc at `v`, or 0.
    pub fn partners(&self) -> Vec<usize> {
        let mut p = vec![0; self.n + 1];
        for &(i, j) in &self.arcs {
            p[i] = j;
            p[j] = i;
        }
        p
    }

    /// Reverses the vertex order, `v -> n + 1 - v`.
    pub fn mirror(&self) -> Diagram {
        let n = self.n;
        let mut arcs: Vec<Arc> = self.arcs.iter().map(|&(i, j)| (n + 1 - j, n + 1 - i)).collect();
        arcs.sort_unstable();
        Diagram { n, arcs }
    }

    /// Size of the largest set of mutually crossing arcs. A diagram is
    /// k-noncrossing iff this is below `k`.
    pub fn max_crossing(&self) -> usize {
        if self.arcs.is_empty() {
            return 0;
        }
        let mut best = 1;
        let mut tails: Vec<usize> = Vec::new();
        for (a, &(_, j1)) in self.arcs.iter().enumerate() {
            // arcs are sorted by origin, so the candidates for the rest of
            // the crossing follow `a` directly
            tails.clear();
            for &(i, j) in &self.arcs[a + 1..] {
                if i >= j1 {
                    break;
                }
                if j > j1 {
                    match tails.binary_search(&j) {
                        Ok(_) => {}
                        Err(pos) if pos == tails.len() => tails.push(j),
                        Err(pos) => tails[pos] = j,
                    }
                }
            }
            best = best.max(1 + tails.len());
        }
        best
    }

    pub fn is_k_noncrossing(&self, k: usize) -> bool {
        self.max_crossing() < k
    }

    pub fn is_core(&self) -> bool {
        self.arcs.iter().all(|&(i, j)| !(j > i + 2 && self.contains((i + 1, j - 1))))
    }

    pub fn is_sigma_modular(&self, sigma: usize) -> bool {
        stack_decomposition(self).iter().all(|s| s.len() >= sigma)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (i, j) in &self.arcs {
            write!(f, " {i}-{j}")?;
        }
        Ok(())
    }
}

/// A maximal run of parallel arcs `(i, j), (i + 1, j - 1), ...`, outermost
/// first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stack {
    pub arcs: Vec<Arc>,
}

impl Stack {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn outermost(&self) -> Arc {
        self.arcs[0]
    }
}

/// Partitions the arcs into maximal stacks, ordered by outermost origin.
pub fn stack_decomposition(diagram: &Diagram) -> Vec<Stack> {
    let mut stacks = Vec::new();
    for &(i, j) in diagram.arcs() {
        if i > 1 && diagram.contains((i - 1, j + 1)) {
            continue;
        }
        let mut arcs = vec![(i, j)];
        let (mut a, mut b) = (i, j);
        while b > a + 2 && diagram.contains((a + 1, b - 1)) {
            a += 1;
            b -= 1;
            arcs.push((a, b));
        }
        stacks.push(Stack { arcs });
    }
    stacks
}

/// Returns some `k` mutually crossing arcs, searching all `k`-subsets.
/// Exponential in `k`; meant as ground truth on small diagrams.
pub fn find_k_crossing(diagram: &Diagram, k: usize) -> Option<Vec<Arc>> {
    assert!(k >= 2);
    fn extend(arcs: &[Arc], start: usize, k: usize, chosen: &mut Vec<Arc>) -> bool {
        if chosen.len() == k {
            let (_, j1) = chosen[0];
            let (ik, _) = chosen[k - 1];
            return ik < j1 && chosen.windows(2).all(|w| w[0].1 < w[1].1);
        }
        for idx in start..arcs.len() {
            chosen.push(arcs[idx]);
            if extend(arcs, idx + 1, k, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(k);
    extend(diagram.arcs(), 0, k, &mut chosen).then_some(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_k_noncrossing: bool,
    pub is_core: bool,
    pub is_sigma_modular: bool,
}

pub fn classify(diagram: &Diagram, k: usize, sigma: usize) -> Classification {
    let stacks = stack_decomposition(diagram);
    Classification {
        is_k_noncrossing: diagram.is_k_noncrossing(k),
        is_core: stacks.iter().all(|s| s.len() == 1),
        is_sigma_modular: stacks.iter().all(|s| s.len() >= sigma),
    }
}

/// A core whose arcs carry stack weights. Arcs `(i, j, s)` are sorted by
/// origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedCore {
    m: usize,
    arcs: Vec<(usize, usize, usize)>,
}

impl WeightedCore {
    pub fn new(
        m: usize,
        arcs: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, DiagramError> {
        let arcs: Vec<(usize, usize, usize)> = arcs.into_iter().collect();
        if let Some(&(i, j, weight)) = arcs.iter().find(|a| a.2 == 0) {
            return Err(DiagramError::BadWeight { i, j, weight });
        }
        let core = Diagram::new(m, arcs.iter().map(|&(i, j, _)| (i, j)))?;
        if let Some(&(i, j)) = core
            .arcs()
            .iter()
            .find(|&&(i, j)| j > i + 2 && core.contains((i + 1, j - 1)))
        {
            return Err(DiagramError::NotCore(i, j, i + 1, j - 1));
        }
        let mut arcs = arcs;
        arcs.sort_unstable();
        Ok(WeightedCore { m, arcs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn arcs(&self) -> &[(usize, usize, usize)] {
        &self.arcs
    }

    pub fn min_weight(&self) -> Option<usize> {
        self.arcs.iter().map(|a| a.2).min()
    }

    /// Vertex count after inflating every arc into its stack.
    pub fn expanded_len(&self) -> usize {
        self.m + self.arcs.iter().map(|a| 2 * (a.2 - 1)).sum::<usize>()
    }

    pub fn underlying(&self) -> Diagram {
        Diagram {
            n: self.m,
            arcs: self.arcs.iter().map(|&(i, j, _)| (i, j)).collect(),
        }
    }
}

/// Maps a σ-modular diagram to its weighted core: each maximal stack of
/// length `s` keeps its outermost arc with weight `s`, the other `2(s - 1)`
/// stack endpoints are deleted and the survivors relabeled in order.
pub fn collapse(diagram: &Diagram, sigma: usize) -> Result<WeightedCore, DiagramError> {
    let stacks = stack_decomposition(diagram);
    let mut deleted = vec![false; diagram.n() + 1];
    for stack in &stacks {
        if stack.len() < sigma {
            let (i, j) = stack.outermost();
            return Err(DiagramError::NotModular(i, j, stack.len(), sigma));
        }
        for &(i, j) in &stack.arcs[1..] {
            deleted[i] = true;
            deleted[j] = true;
        }
    }
    let mut relabel = vec![0; diagram.n() + 1];
    let mut m = 0;
    for v in 1..=diagram.n() {
        if !deleted[v] {
            m += 1;
            relabel[v] = m;
        }
    }
    let arcs = stacks
        .iter()
        .map(|s| {
            let (i, j) = s.outermost();
            (relabel[i], relabel[j], s.len())
        })
        .collect();
    Ok(WeightedCore { m, arcs })
}

/// Inflates each weighted arc `(i, j, s)` into a stack of `s` parallel arcs.
pub fn expand(core: &WeightedCore) -> Diagram {
    let mut width = vec![1; core.m + 1];
    for &(i, j, s) in &core.arcs {
        width[i] = s;
        width[j] = s;
    }
    let mut pos = vec![0; core.m + 1];
    let mut next = 1;
    for v in 1..=core.m {
        pos[v] = next;
        next += width[v];
    }
    let mut arcs = Vec::with_capacity(core.arcs.iter().map(|a| a.2).sum());
    for &(i, j, s) in &core.arcs {
        for q in 0..s {
            arcs.push((pos[i] + q, pos[j] + s - 1 - q));
        }
    }
    arcs.sort_unstable();
    Diagram { n: next - 1, arcs }
}

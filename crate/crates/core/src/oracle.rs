//! Brute-force ground truth: every partial matching on `n` vertices, class
//! counts, the weighted-core census and a χ² uniformity test.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::diagram::{Arc, Diagram};

/// Largest `n` the enumerator accepts by default.
pub const ENUMERATION_CAP: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("n = {n} is above the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("the χ² test needs at least one category")]
    EmptyDomain,
    #[error("significance level {0} is not in (0, 1)")]
    BadAlpha(f64),
}

/// All partial matchings on `1..=n`, in lexicographic order of their sorted
/// arc lists (the empty diagram first).
pub fn enumerate_diagrams(n: usize) -> Result<Matchings, OracleError> {
    enumerate_diagrams_capped(n, ENUMERATION_CAP)
}

pub fn enumerate_diagrams_capped(n: usize, cap: usize) -> Result<Matchings, OracleError> {
    if n > cap {
        return Err(OracleError::CapExceeded { n, cap });
    }
    Ok(Matchings {
        n,
        arcs: Vec::new(),
        used: vec![false; n + 1],
        started: false,
    })
}

/// Iterator returned by [`enumerate_diagrams`].
#[derive(Debug, Clone)]
pub struct Matchings {
    n: usize,
    arcs: Vec<Arc>,
    used: Vec<bool>,
    started: bool,
}

impl Matchings {
    // Smallest free arc strictly after `after` whose origin exceeds the
    // origin of the current last arc.
    fn next_free(&self, after: Arc) -> Option<Arc> {
        let floor = self.arcs.last().map_or(0, |a| a.0);
        let (mut i, mut j) = after;
        loop {
            j += 1;
            if j > self.n {
                i += 1;
                j = i + 1;
                if j > self.n {
                    return None;
                }
            }
            if i > floor && !self.used[i] && !self.used[j] {
                return Some((i, j));
            }
        }
    }

    fn push(&mut self, arc: Arc) {
        self.used[arc.0] = true;
        self.used[arc.1] = true;
        self.arcs.push(arc);
    }

    fn pop(&mut self) -> Option<Arc> {
        let arc = self.arcs.pop()?;
        self.used[arc.0] = false;
        self.used[arc.1] = false;
        Some(arc)
    }

    fn current(&self) -> Diagram {
        Diagram::new(self.n, self.arcs.iter().copied()).expect("enumerated arcs are a matching")
    }
}

impl Iterator for Matchings {
    type Item = Diagram;

    fn next(&mut self) -> Option<Diagram> {
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        let first_child = self.arcs.last().map_or((1, 1), |&(i, _)| (i, self.n));
        if let Some(arc) = self.next_free(first_child) {
            self.push(arc);
            return Some(self.current());
        }
        while let Some(arc) = self.pop() {
            if let Some(sibling) = self.next_free(arc) {
                self.push(sibling);
                return Some(self.current());
            }
        }
        None
    }
}

/// `I(n)`: number of partial matchings on `n` vertices.
pub fn involution_number(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    for m in 2..=n {
        let c = &b + &a * (m - 1);
        a = b;
        b = c;
    }
    if n == 0 {
        a
    } else {
        b
    }
}

/// `M(n)`: number of noncrossing partial matchings on `n` vertices.
pub fn motzkin_number(n: usize) -> BigUint {
    let mut m = vec![BigUint::one(), BigUint::one()];
    for i in 2..=n {
        let next = (&m[i - 1] * (2 * i + 1) + &m[i - 2] * (3 * i - 3)) / (i + 2);
        m.push(next);
    }
    m.swap_remove(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramClass {
    All,
    KNoncrossing,
    /// `k`-noncrossing cores.
    Core,
    /// `k`-noncrossing σ-modular diagrams.
    SigmaModular,
}

impl DiagramClass {
    pub fn contains(self, d: &Diagram, k: usize, sigma: usize) -> bool {
        match self {
            DiagramClass::All => true,
            DiagramClass::KNoncrossing => d.is_k_noncrossing(k),
            DiagramClass::Core => d.is_core() && d.is_k_noncrossing(k),
            DiagramClass::SigmaModular => d.is_sigma_modular(sigma) && d.is_k_noncrossing(k),
        }
    }
}

pub fn count_class(
    n: usize,
    k: usize,
    sigma: usize,
    class: DiagramClass,
) -> Result<BigUint, OracleError> {
    let hits = enumerate_diagrams(n)?
        .filter(|d| class.contains(d, k, sigma))
        .count();
    Ok(BigUint::from(hits))
}

/// Members of `class` in enumeration order.
pub fn enumerate_class(
    n: usize,
    k: usize,
    sigma: usize,
    class: DiagramClass,
) -> Result<Vec<Diagram>, OracleError> {
    Ok(enumerate_diagrams(n)?
        .filter(|d| class.contains(d, k, sigma))
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub all: u64,
    pub k_noncrossing: u64,
    pub core: u64,
    pub sigma_modular: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub k: usize,
    pub sigma: usize,
    pub counts: ClassCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagrams: Option<Vec<Diagram>>,
}

/// Counts every class in one sweep, optionally keeping all diagrams.
pub fn enumeration_report(
    n: usize,
    k: usize,
    sigma: usize,
    keep: bool,
) -> Result<EnumerationReport, OracleError> {
    let mut counts = ClassCounts::default();
    let mut kept = keep.then(Vec::new);
    for d in enumerate_diagrams(n)? {
        counts.all += 1;
        if d.is_k_noncrossing(k) {
            counts.k_noncrossing += 1;
            counts.core += u64::from(d.is_core());
            counts.sigma_modular += u64::from(d.is_sigma_modular(sigma));
        }
        if let Some(v) = kept.as_mut() {
            v.push(d);
        }
    }
    Ok(EnumerationReport {
        n,
        k,
        sigma,
        counts,
        diagrams: kept,
    })
}

// Ordered tuples of `parts` integers, each at least `min`, summing to
// `total`, counted by recursion over the first part.
fn weight_assignments(parts: usize, total: usize, min: usize, memo: &mut BTreeMap<(usize, usize), BigUint>) -> BigUint {
    if parts == 0 {
        return BigUint::from(u8::from(total == 0));
    }
    if let Some(v) = memo.get(&(parts, total)) {
        return v.clone();
    }
    let mut acc = BigUint::zero();
    let mut first = min;
    while first + min * (parts - 1) <= total {
        acc += weight_assignments(parts - 1, total - first, min, memo);
        first += 1;
    }
    memo.insert((parts, total), acc.clone());
    acc
}

/// Weighted cores that expand to length `n`: for every `k`-noncrossing core
/// on `m <= n` vertices with `a` arcs, the number of weightings with every
/// weight at least σ and `m + Σ 2(s - 1) = n`.
pub fn weighted_core_census(n: usize, k: usize, sigma: usize) -> Result<BigUint, OracleError> {
    if n > ENUMERATION_CAP {
        return Err(OracleError::CapExceeded {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let mut total = BigUint::zero();
    for m in (0..=n).rev().step_by(2) {
        // cores by arc count
        let mut by_arcs: BTreeMap<usize, u64> = BTreeMap::new();
        for d in enumerate_diagrams(m)? {
            if d.is_core() && d.is_k_noncrossing(k) {
                *by_arcs.entry(d.arcs().len()).or_default() += 1;
            }
        }
        let extra = (n - m) / 2;
        let mut memo = BTreeMap::new();
        for (arcs, cores) in by_arcs {
            let ways = weight_assignments(arcs, extra + arcs, sigma, &mut memo);
            total += ways * cores;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Expected count per category below 5.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub categories: usize,
    pub samples: u64,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub alpha: f64,
    pub critical_value: f64,
    pub verdict: Verdict,
}

/// Upper `alpha` quantile of the χ² distribution.
pub fn chi_square_critical(degrees_of_freedom: usize, alpha: f64) -> f64 {
    ChiSquared::new(degrees_of_freedom as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

/// Goodness of fit of `observed` (one count per category, zeros included)
/// against the uniform distribution.
pub fn chi_square_uniformity(observed: &[u64], alpha: f64) -> Result<ChiSquareReport, OracleError> {
    if observed.is_empty() {
        return Err(OracleError::EmptyDomain);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(OracleError::BadAlpha(alpha));
    }
    let d = observed.len();
    let samples: u64 = observed.iter().sum();
    let expected = samples as f64 / d as f64;
    let statistic = if expected > 0.0 {
        observed
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum()
    } else {
        0.0
    };
    let dof = d - 1;
    let critical_value = if dof == 0 {
        0.0
    } else {
        chi_square_critical(dof, alpha)
    };
    let verdict = if expected < 5.0 {
        Verdict::Inconclusive
    } else if dof == 0 || statistic < critical_value {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ChiSquareReport {
        categories: d,
        samples,
        statistic,
        degrees_of_freedom: dof,
        alpha,
        critical_value,
        verdict,
    })
}

/// How many categories were hit exactly `m` times, for every `m`.
pub fn multiplicity_histogram(observed: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &o in observed {
        *h.entry(o).or_default() += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        for n in 0..=10 {
            assert_eq!(
                BigUint::from(enumerate_diagrams(n).unwrap().count()),
                involution_number(n)
            );
        }
        assert_eq!(involution_number(4), BigUint::from(10u8));
        assert_eq!(involution_number(6), BigUint::from(76u8));
        assert!(matches!(
            enumerate_diagrams(15),
            Err(OracleError::CapExceeded { n: 15, cap: 14 })
        ));
    }

    #[test]
    fn enumeration_is_lexicographic_and_distinct() {
        let all: Vec<Vec<Arc>> = enumerate_diagrams(7)
            .unwrap()
            .map(|d| d.arcs().to_vec())
            .collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], Vec::<Arc>::new());
        assert_eq!(all[1], vec![(1, 2)]);
    }

    #[test]
    fn class_counts() {
        use DiagramClass::*;
        assert_eq!(count_class(4, 3, 1, Core).unwrap(), BigUint::from(9u8));
        assert_eq!(count_class(4, 2, 2, SigmaModular).unwrap(), BigUint::from(2u8));
        assert_eq!(count_class(6, 2, 2, SigmaModular).unwrap(), BigUint::from(8u8));
        assert_eq!(count_class(4, 2, 1, SigmaModular).unwrap(), BigUint::from(9u8));
        for n in 0..=10 {
            assert_eq!(count_class(n, 2, 1, SigmaModular).unwrap(), motzkin_number(n));
        }
        let r = enumeration_report(8, 3, 2, false).unwrap();
        assert_eq!(r.counts.core, 582);
        assert!(r.counts.core <= r.counts.k_noncrossing && r.counts.k_noncrossing <= r.counts.all);
    }

    #[test]
    fn census_examples() {
        assert_eq!(weighted_core_census(4, 2, 2).unwrap(), BigUint::from(2u8));
        assert_eq!(weighted_core_census(5, 2, 2).unwrap(), BigUint::from(4u8));
        assert_eq!(weighted_core_census(6, 2, 2).unwrap(), BigUint::from(8u8));
        for n in 0..=9 {
            for (k, sigma) in [(2, 1), (3, 2), (2, 3)] {
                assert_eq!(
                    weighted_core_census(n, k, sigma).unwrap(),
                    count_class(n, k, sigma, DiagramClass::SigmaModular).unwrap(),
                    "n={n} k={k} sigma={sigma}"
                );
            }
        }
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_uniformity(&[50, 50, 50], 1e-3).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.verdict, Verdict::Pass);

        let r = chi_square_uniformity(&[10_000, 0], 1e-3).unwrap();
        assert_eq!(r.statistic, 10_000.0);
        assert_eq!(r.verdict, Verdict::Fail);

        assert!((chi_square_critical(1, 1e-3) - 10.83).abs() < 0.01);

        let r = chi_square_uniformity(&[3, 4, 2], 1e-3).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(chi_square_uniformity(&[], 0.1), Err(OracleError::EmptyDomain));
    }

    #[test]
    fn histogram() {
        let h = multiplicity_histogram(&[2, 3, 2, 0]);
        assert_eq!(h.into_iter().collect::<Vec<_>>(), vec![(0, 1), (2, 2), (3, 1)]);
    }
}

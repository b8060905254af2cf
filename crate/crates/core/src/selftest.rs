//! Exhaustive consistency grid: tables against enumeration, the bijections
//! on every small diagram, and normalization of the sampling process.

use std::path::Path;

use num_bigint::BigUint;
use serde::Serialize;

use crate::counting::{
    check_core_alternating, check_weighted_grouped, load_or_build, CoreTable, StackSizes,
    StackTable, WeightRule, WeightedTable,
};
use crate::diagram::{collapse, expand, stack_decomposition};
use crate::oracle::{enumerate_diagrams, motzkin_number, weighted_core_census};
use crate::sampler::{success_rate, BatchConfig};
use crate::tableau::{diagram_to_star_sequence, star_sequence_to_diagram};

pub const CORE_KS: [usize; 3] = [2, 3, 4];
pub const MODULAR_KS: [usize; 2] = [2, 3];
pub const SIGMAS: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// First few failing cases.
    pub examples: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestConfig {
    pub max_n: usize,
    /// Largest `n` for the shape sequence roundtrip.
    pub roundtrip_max_n: usize,
    /// Verified attempts per table in the normalization probe.
    pub probe_attempts: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            max_n: 12,
            roundtrip_max_n: 10,
            probe_attempts: 2_000,
        }
    }
}

// Per-diagram facts from one enumeration sweep.
struct Tally {
    // [k]: k-noncrossing cores
    cores: Vec<u64>,
    // [k][sigma]: k-noncrossing sigma-modular diagrams
    modular: Vec<Vec<u64>>,
}

pub fn run(config: SelftestConfig, cache: Option<&Path>) -> Vec<Check> {
    let mut tables = Check::new("table cache");
    let mut core_totals = Check::new("core totals vs enumeration");
    let mut modular_totals = Check::new("modular totals vs enumeration");
    let mut census = Check::new("weighted core census");
    let mut motzkin = Check::new("noncrossing totals vs Motzkin");
    let mut recurrences = Check::new("table recurrences");
    let mut identities = Check::new("alternating identities");
    let mut roundtrip = Check::new("shape sequence roundtrip");
    let mut expand_check = Check::new("collapse/expand roundtrip");
    let mut normalization = Check::new("transition normalization");

    let max_k = CORE_KS.iter().chain(&MODULAR_KS).copied().max().unwrap_or(2);
    let max_sigma = SIGMAS.iter().copied().max().unwrap_or(1);

    for n in 0..=config.max_n {
        let mut tally = Tally {
            cores: vec![0; max_k + 1],
            modular: vec![vec![0; max_sigma + 1]; max_k + 1],
        };
        let diagrams = match enumerate_diagrams(n) {
            Ok(it) => it,
            Err(e) => {
                core_totals.record(false, || e.to_string());
                continue;
            }
        };
        for d in diagrams {
            let crossing = d.max_crossing();
            let stacks = stack_decomposition(&d);
            let shortest = stacks.iter().map(|s| s.len()).min().unwrap_or(usize::MAX);
            let is_core = stacks.iter().all(|s| s.len() == 1);
            for k in 2..=max_k {
                if crossing < k {
                    tally.cores[k] += u64::from(is_core);
                    for sigma in 1..=max_sigma {
                        tally.modular[k][sigma] += u64::from(shortest >= sigma);
                    }
                }
            }
            if n <= config.roundtrip_max_n {
                for k in [2, 3] {
                    let ok = match diagram_to_star_sequence(&d, k) {
                        Ok(seq) => crossing < k && star_sequence_to_diagram(&seq).ok() == Some(d.clone()),
                        Err(_) => crossing >= k,
                    };
                    roundtrip.record(ok, || format!("k={k} {d}"));
                }
            }
            if shortest >= 2 {
                let ok = collapse(&d, 2).map(|c| expand(&c) == d).unwrap_or(false);
                expand_check.record(ok, || d.to_string());
            }
        }

        for k in CORE_KS {
            let Some(table) = load(&mut tables, cache, n, k, StackSizes::Single) else {
                continue;
            };
            let want = BigUint::from(tally.cores[k]);
            core_totals.record(*table.total() == want, || {
                format!("n={n} k={k}: table {} vs {want}", table.total())
            });
            recurrences.record(table.check_recurrences() == 0, || format!("cores n={n} k={k}"));
            if let Some(t) = CoreTable::from_stack_table(table.clone()) {
                identities.record(check_core_alternating(&t).holds(), || format!("cores n={n} k={k}"));
            }
            if n == config.max_n {
                probe(&mut normalization, &table, config.probe_attempts);
            }
        }
        for k in MODULAR_KS {
            for sigma in SIGMAS {
                let Some(table) = load(&mut tables, cache, n, k, StackSizes::AtLeast(sigma)) else {
                    continue;
                };
                let want = BigUint::from(tally.modular[k][sigma]);
                modular_totals.record(*table.total() == want, || {
                    format!("n={n} k={k} sigma={sigma}: table {} vs {want}", table.total())
                });
                match weighted_core_census(n, k, sigma) {
                    Ok(c) => census.record(c == want, || format!("n={n} k={k} sigma={sigma}: {c} vs {want}")),
                    Err(e) => census.record(false, || e.to_string()),
                }
                if k == 2 && sigma == 1 {
                    motzkin.record(want == motzkin_number(n), || format!("n={n}"));
                }
                recurrences.record(table.check_recurrences() == 0, || {
                    format!("modular n={n} k={k} sigma={sigma}")
                });
                if let Some(w) = WeightedTable::from_stack_table(table.clone()) {
                    identities.record(check_weighted_grouped(&w).holds(), || {
                        format!("modular n={n} k={k} sigma={sigma}")
                    });
                }
                if n == config.max_n {
                    probe(&mut normalization, &table, config.probe_attempts);
                }
            }
        }
    }

    vec![
        tables,
        core_totals,
        modular_totals,
        census,
        motzkin,
        recurrences,
        identities,
        roundtrip,
        expand_check,
        normalization,
    ]
}

fn load(check: &mut Check, cache: Option<&Path>, n: usize, k: usize, sizes: StackSizes) -> Option<StackTable> {
    match load_or_build(cache, n, k, sizes) {
        Ok(t) => {
            check.record(true, String::new);
            Some(t)
        }
        Err(e) => {
            check.record(false, || format!("n={n} k={k} {sizes:?}: {e}"));
            None
        }
    }
}

fn probe(check: &mut Check, table: &StackTable, attempts: u64) {
    for rule in [WeightRule::Unrestricted, WeightRule::StackCorrected] {
        let config = BatchConfig {
            rule,
            verify: true,
            ..Default::default()
        };
        match success_rate(table, attempts, 0, config) {
            Ok(stats) => {
                check.cases += stats.normalization_checks;
                check.failures += stats.normalization_violations;
            }
            Err(e) => check.record(false, || e.to_string()),
        }
    }
}

/// Plain-text summary, one line per check.
pub fn summary(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed() { "ok" } else { "MISMATCH" };
        out.push_str(&format!("{:<34} {:>10} cases  {status}\n", c.name, c.cases));
        for e in &c.examples {
            out.push_str(&format!("    {e}\n"));
        }
    }
    out
}

//! Chi-square test of sampler output against the enumerated class.
//!
//! cargo run --release --example uniformity_check -- [n] [k] [sigma]

use std::collections::HashMap;

use modular_diagrams::counting::{StackSizes, StackTable, WeightRule};
use modular_diagrams::oracle::{chi_square_uniformity, enumerate_class, DiagramClass};
use modular_diagrams::sampler::{sample_batch, BatchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>());
    let n = args.next().transpose()?.unwrap_or(10);
    let k = args.next().transpose()?.unwrap_or(3);
    let sigma = args.next().transpose()?.unwrap_or(2);

    let targets = enumerate_class(n, k, sigma, DiagramClass::SigmaModular)?;
    let index: HashMap<_, _> = targets.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
    let table = StackTable::build(n, k, StackSizes::AtLeast(sigma))?;
    let samples = 200 * targets.len();

    for rule in [WeightRule::Unrestricted, WeightRule::StackCorrected] {
        let config = BatchConfig { rule, ..Default::default() };
        let batch = sample_batch(&table, samples, 11, config)?;
        let mut observed = vec![0u64; targets.len()];
        for s in &batch.samples {
            observed[index[&s.diagram]] += 1;
        }
        let report = chi_square_uniformity(&observed, 1e-3)?;
        println!(
            "{rule:?}: {} diagrams, {} samples, chi2 = {:.1} (critical {:.1}), {:?}",
            report.categories, report.samples, report.statistic, report.critical_value, report.verdict
        );
    }
    Ok(())
}

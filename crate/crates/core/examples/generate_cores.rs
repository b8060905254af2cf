//! Uniform k-noncrossing cores, drawn in parallel with a fixed seed.
//!
//! cargo run --release --example generate_cores -- [n] [k] [count]

use modular_diagrams::counting::{StackSizes, StackTable};
use modular_diagrams::diagram::stack_decomposition;
use modular_diagrams::sampler::{sample_batch, BatchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>());
    let n = args.next().transpose()?.unwrap_or(30);
    let k = args.next().transpose()?.unwrap_or(3);
    let count = args.next().transpose()?.unwrap_or(8);

    let table = StackTable::build(n, k, StackSizes::Single)?;
    let batch = sample_batch(&table, count, 2024, BatchConfig::default())?;
    for s in &batch.samples {
        // every stack of a core is a single arc
        assert!(stack_decomposition(&s.diagram).iter().all(|st| st.len() == 1));
        println!("[{} tries] {}", s.attempts, s.diagram);
    }
    println!("total cores: {}", table.total());
    Ok(())
}

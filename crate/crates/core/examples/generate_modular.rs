//! Draw uniform 3-noncrossing 2-modular diagrams.
//!
//! cargo run --release --example generate_modular -- [n] [count] [seed]

use modular_diagrams::counting::{StackSizes, StackTable};
use modular_diagrams::sampler::{sample_modular, SamplerSession};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>());
    let n = args.next().transpose()?.unwrap_or(40) as usize;
    let count = args.next().transpose()?.unwrap_or(5);
    let seed = args.next().transpose()?.unwrap_or(7);
    let (k, sigma) = (3, 2);

    let table = StackTable::build(n, k, StackSizes::AtLeast(sigma))?;
    println!("{} diagrams on {n} vertices", table.total());

    let mut session = SamplerSession::new(&table, seed);
    for _ in 0..count {
        let d = sample_modular(n, k, sigma, &mut session)?;
        println!("{d}");
    }
    let stats = session.stats();
    println!(
        "{} attempts, {} accepted, rate {:.3}",
        stats.attempts,
        stats.successes,
        stats.success_rate()
    );
    Ok(())
}

//! Fraction of attempts that yield a diagram without restarting.
//!
//! cargo run --release --example success_rate -- [attempts]

use modular_diagrams::counting::{StackSizes, StackTable};
use modular_diagrams::sampler::{success_rate, BatchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let attempts = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(200_000);
    println!("n,sigma,rate,exact");
    for sigma in [1, 2, 3] {
        for n in (10..=60).step_by(10) {
            let table = StackTable::build(n, 3, StackSizes::AtLeast(sigma))?;
            let stats = success_rate(&table, attempts, 5, BatchConfig::default())?;
            // accepted walks over all walks the sampler can take
            let exact = ratio(table.total(), table.free_total());
            println!("{n},{sigma},{:.4},{exact:.4}", stats.success_rate());
        }
    }
    Ok(())
}

fn ratio(a: &num_bigint::BigUint, b: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let shift = b.bits().saturating_sub(60);
    let (a, b) = ((a >> shift).to_f64().unwrap_or(0.0), (b >> shift).to_f64().unwrap_or(1.0));
    a / b
}

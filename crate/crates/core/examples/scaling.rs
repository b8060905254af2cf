//! Preprocessing time and mean time per accepted sample as n grows.
//!
//! cargo run --release --example scaling -- [rule] [k] [sigma] [samples] [n...]

use std::time::Instant;

use modular_diagrams::counting::{build_weighted_table, WeightRule};
use modular_diagrams::sampler::SamplerSession;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rule: WeightRule = args.next().as_deref().unwrap_or("unrestricted").parse()?;
    let nums: Vec<usize> = args.map(|a| a.parse()).collect::<Result<_, _>>()?;
    let k = nums.first().copied().unwrap_or(3);
    let sigma = nums.get(1).copied().unwrap_or(2);
    let samples = nums.get(2).copied().unwrap_or(2000);
    let lengths = if nums.len() > 3 { nums[3..].to_vec() } else { vec![50, 100, 200] };

    println!("n,build_ms,per_sample_us,success_rate,steps_per_attempt");
    for n in lengths {
        let start = Instant::now();
        let table = build_weighted_table(n, k, sigma)?;
        let build = start.elapsed();
        let mut session = SamplerSession::new(table.inner(), 1).rule(rule);
        let start = Instant::now();
        for _ in 0..samples {
            session.sample()?;
        }
        let per = start.elapsed().as_secs_f64() * 1e6 / samples as f64;
        let stats = session.stats();
        println!(
            "{n},{},{per:.1},{:.4},{:.1}",
            build.as_millis(),
            stats.success_rate(),
            stats.steps as f64 / stats.attempts as f64
        );
    }
    Ok(())
}

//! Exact totals from the counting tables, compared with brute force where
//! enumeration is cheap.
//!
//! cargo run --release --example count_tables

use modular_diagrams::counting::{build_core_table, build_weighted_table};
use modular_diagrams::oracle::{count_class, motzkin_number, DiagramClass};
use modular_diagrams::shape::Shape;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("n  cores(k=3)  modular(k=3,s=2)  enumerated  noncrossing(s=1)  Motzkin");
    for n in 0..=12 {
        let cores = build_core_table(n, 3)?;
        let modular = build_weighted_table(n, 3, 2)?;
        let nc = build_weighted_table(n, 2, 1)?;
        let brute = count_class(n, 3, 2, DiagramClass::SigmaModular)?;
        println!(
            "{n:<2} {:<11} {:<17} {:<11} {:<17} {}",
            cores.total(),
            modular.total(),
            brute,
            nc.total(),
            motzkin_number(n)
        );
    }

    // entries away from the empty shape
    let t = build_weighted_table(20, 3, 2)?;
    let one = Shape::new(vec![1])?;
    println!("n = 20: w[20, ()] = {}", t.total());
    println!("        w[19, (1)] = {}", t.w(19, &one)?);
    println!("        v[19, (1)] = {}", t.v(19, &one)?);

    let big = build_weighted_table(200, 3, 2)?;
    println!("n = 200: {} diagrams", big.total());
    Ok(())
}

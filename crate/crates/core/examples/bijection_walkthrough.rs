//! Diagram to shape sequence and back, one tableau step at a time.
//!
//! cargo run --example bijection_walkthrough

use modular_diagrams::diagram::{collapse, expand, Diagram};
use modular_diagrams::shape::Move;
use modular_diagrams::tableau::{diagram_to_star_sequence, star_sequence_to_diagram, Entry, Tableau};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Diagram::new(10, [(1, 6), (2, 5), (3, 9), (4, 8), (7, 10)])?;
    println!("diagram      {d}");
    println!("max crossing {}", d.max_crossing());

    let seq = diagram_to_star_sequence(&d, 3)?;
    for (i, shape) in seq.shapes().iter().enumerate() {
        let step = if i == 0 { String::new() } else { format!("{:?}", seq.step(i)) };
        println!("  {i:>2} {shape:<8} {step}");
    }
    let back = star_sequence_to_diagram(&seq)?;
    assert_eq!(back, d);
    println!("roundtrip ok");

    // the same reconstruction by hand: a new square receives its vertex,
    // a removed square is reverse bumped out and closes an arc
    let mut tab = Tableau::new();
    for i in 1..=seq.steps() {
        match seq.step(i) {
            Move::AddSquare(row) => tab.place(row, Entry::new(i))?,
            Move::RemoveSquare(row) => {
                let e = tab.extract(row)?;
                println!("  vertex {i:>2} closes the arc from {}, tableau {:?}", e.label, tab.labels());
            }
            Move::Nothing => {}
        }
    }

    let stacked = Diagram::new(8, [(1, 8), (2, 7), (3, 5)])?;
    match collapse(&stacked, 2) {
        Ok(core) => println!("{stacked} collapses to {:?}", core.arcs()),
        Err(e) => println!("{stacked} is not 2-modular: {e}"),
    }
    let modular = Diagram::new(8, [(1, 8), (2, 7), (3, 6), (4, 5)])?;
    let core = collapse(&modular, 2)?;
    println!("{modular} collapses to {} vertices, arcs {:?}", core.m(), core.arcs());
    assert_eq!(expand(&core), modular);
    Ok(())
}

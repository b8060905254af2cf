//! Build once, reload from disk.
//!
//! cargo run --release --example table_cache -- [dir]

use std::path::PathBuf;
use std::time::Instant;

use modular_diagrams::counting::{cache_file_name, load_or_build, StackSizes};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("modular-tables"));
    let (n, k, sizes) = (120, 3, StackSizes::AtLeast(2));

    let start = Instant::now();
    let first = load_or_build(Some(&dir), n, k, sizes)?;
    println!("first call  {:?}", start.elapsed());
    let start = Instant::now();
    let second = load_or_build(Some(&dir), n, k, sizes)?;
    println!("second call {:?}", start.elapsed());

    assert_eq!(first.total(), second.total());
    assert_eq!(second.check_recurrences(), 0);
    println!("{}: {} diagrams", dir.join(cache_file_name(n, k, sizes)).display(), second.total());
    Ok(())
}

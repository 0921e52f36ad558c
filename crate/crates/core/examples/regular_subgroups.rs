//! Conjugacy classes of regular subgroups of Hol(G), layer by layer.
//!
//!     cargo run --release --example regular_subgroups -- 2,32

use std::time::Instant;

use holobrace::Context;

fn main() -> holobrace::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "2,8".into());
    let start = Instant::now();
    let ctx = Context::from_descriptor(&desc)?;
    let run = ctx.regular_classes()?;
    println!("G = {}, |Hol(G)| = {}, mode {}", ctx.group(), ctx.holomorph().order(), ctx.mode().name());
    print!("{}", run.stats.table());
    println!("classes: {} ({:.2?})", run.classes.len(), start.elapsed());
    for r in run.classes.iter().take(5) {
        println!("  {r}");
    }
    if run.classes.len() > 5 {
        println!("  …");
    }
    Ok(())
}

//! Left braces from regular subgroups, grouped by multiplicative group invariants.
//!
//!     cargo run --release --example braces -- 8

use std::collections::BTreeMap;

use holobrace::brace::additive_fingerprint;
use holobrace::{Brace, Context};

fn main() -> holobrace::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "8".into());
    let ctx = Context::from_descriptor(&desc)?;
    let classes = ctx.regular_classes()?.classes;
    let braces = classes.iter().map(|r| Brace::from_regular(&ctx, r)).collect::<holobrace::Result<Vec<_>>>()?;

    println!("{} braces with additive group {}", braces.len(), ctx.group());
    let additive = additive_fingerprint(ctx.group());
    let mut by_mult: BTreeMap<_, usize> = BTreeMap::new();
    for b in &braces {
        *by_mult.entry(b.fingerprint()).or_default() += 1;
    }
    for (f, count) in &by_mult {
        let tag = if *f == additive { "  (same invariants as G)" } else { "" };
        println!(
            "{count:>5} × orders {:?}, abelianization {:?}, |Z| {:>3}, |M'| {:>3}{tag}",
            f.order_counts,
            f.abelianization,
            f.center_order,
            f.derived_order
        );
    }

    let trivial: Vec<&Brace> = braces.iter().filter(|b| b.is_trivial()).collect();
    println!("trivial braces: {}", trivial.len());
    if let Some(b) = braces.iter().find(|b| !b.is_trivial()) {
        println!("a non-trivial one, from record {}:", b.origin());
        print!("{}", b.export_block());
    }
    Ok(())
}

//! Elementary abelian normal series of Hol(G), with both refinement strategies.
//!
//!     cargo run --example normal_series -- 2,2,4,4

use holobrace::{AbelianGroup, Context, ContextOptions, SeriesStrategy};

fn main() -> holobrace::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "2,2,4".into());
    let g = AbelianGroup::parse(&desc)?;
    for strategy in [SeriesStrategy::DerivedPowers, SeriesStrategy::Central] {
        let options = ContextOptions { strategy, ..Default::default() };
        let ctx = Context::with_options(&g, &options)?;
        let factors: Vec<String> = (1..=ctx.layer_count())
            .map(|i| {
                let f = ctx.series().factor(i);
                format!("{}^{}", f.prime, f.rank)
            })
            .collect();
        println!("{strategy:?} ({} mode, |S| = {}):", ctx.mode().name(), ctx.ambient().order());
        println!("  factors    {}", factors.join(" "));
        println!("  pcgs       {} generators, relative orders {:?}", ctx.pcgs().len(), ctx.pcgs().relative_orders());
        println!("  fingerprint {}", ctx.fingerprint());
    }
    Ok(())
}

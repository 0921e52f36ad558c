//! Cross-check of the lifting engine against the cyclic-extension oracle,
//! class by class.
//!
//!     cargo run --release --example oracle_crosscheck -- 4,4 3,9

use std::time::Instant;

use holobrace::oracle::Oracle;
use holobrace::{AbelianGroup, Context};

fn main() -> holobrace::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let descs = if args.is_empty() {
        ["4", "2,2", "8", "2,4", "2,2,2", "9", "3,3", "16", "2,8", "4,4", "2,2,4", "27", "3,9", "64", "2,32"]
            .map(String::from)
            .to_vec()
    } else {
        args
    };
    println!("{:<8} {:>7} {:>7} {:>10} {:>10}  keys", "group", "oracle", "engine", "t_oracle", "t_engine");
    for desc in descs {
        let g = AbelianGroup::parse(&desc)?;
        let t = Instant::now();
        let oracle = Oracle::new(&g)?;
        let expected = oracle.run().keys;
        let t_oracle = t.elapsed();
        let t = Instant::now();
        let ctx = Context::new(&g)?;
        let classes = ctx.regular_classes()?.classes;
        let t_engine = t.elapsed();
        let mut keys = classes
            .iter()
            .map(|r| oracle.class_key(&r.generators(ctx.pcgs())))
            .collect::<holobrace::Result<Vec<_>>>()?;
        keys.sort();
        let verdict = if keys == expected { "match" } else { "DIFFER" };
        println!(
            "{desc:<8} {:>7} {:>7} {:>10.2?} {:>10.2?}  {verdict}",
            expected.len(),
            classes.len(),
            t_oracle,
            t_engine
        );
    }
    Ok(())
}

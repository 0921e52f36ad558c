//! The checkpointed pipeline: context directory, split, per-shard jobs, merge.
//! Runs every layer with 1 and 3 jobs and checks the outputs are identical.
//!
//!     cargo run --release --example sharded_pipeline -- 2,8

use std::fs;

use holobrace::pipeline::layer_path;
use holobrace::{AbelianGroup, ContextDir, ShardFile};

fn main() -> holobrace::Result<()> {
    let desc = std::env::args().nth(1).unwrap_or_else(|| "2,8".into());
    let group = AbelianGroup::parse(&desc)?;
    let root = tempfile::tempdir()?;

    // one job per layer, driven by full_run
    let single = ContextDir::create(&root.path().join("single"), &group, None)?;
    let run = single.full_run(1)?;
    println!("classes: {}", run.classes.len());
    print!("{}", run.stats.table());

    // the same by hand: split, lift each shard, merge
    let dir = root.path().join("manual");
    let cd = ContextDir::create(&dir, &group, None)?;
    let mut current = ShardFile::read(&layer_path(&dir, 0))?;
    for i in 1..=cd.context().layer_count() {
        let mut outputs = Vec::new();
        for (j, part) in current.split(3)?.iter().enumerate() {
            outputs.push(cd.run_job(i, part, &dir.join(format!("job_{i}_{j}.hbl")))?);
        }
        current = ShardFile::merge(&outputs)?;
        current.write(&layer_path(&dir, i))?;
    }
    let r = cd.context().layer_count();
    let a = fs::read(layer_path(&single.path().to_path_buf(), r))?;
    let b = fs::read(layer_path(&dir, r))?;
    assert_eq!(a, b);
    println!("3-job output is byte-identical to the 1-job output");
    println!("{}", String::from_utf8_lossy(&b).lines().next().unwrap_or_default());
    Ok(())
}

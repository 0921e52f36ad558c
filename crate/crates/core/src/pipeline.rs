//! Checkpointed, sharded runs backed by a context directory.
//!
//! ```text
//! DIR/context.txt       group, mode, fingerprint, layer count
//! DIR/series.txt        generators of N_1 … N_{r-1}, one member per line
//! DIR/kernel_XX.hbl     kernel-factor classes for layer XX
//! DIR/layer_XX.hbl      merged class list of layer XX
//! DIR/jobs/…            per-job inputs and outputs of a full run
//! DIR/stats.txt         per-layer class and job counts
//! ```
//!
//! Series lines list generators separated by `;`, each generator as its
//! space-separated images.

use std::fs;
use std::path::{Path, PathBuf};

use crate::abelian::AbelianGroup;
use crate::context::{Context, ContextOptions};
use crate::error::{Error, Result};
use crate::lifting::LayerStats;
use crate::perm::Perm;
use crate::record::SubgroupRecord;
use crate::shard::{write_text, ShardFile};

pub fn layer_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("layer_{i:02}.hbl"))
}

pub fn kernel_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("kernel_{i:02}.hbl"))
}

pub fn format_series(members: &[Vec<Perm>]) -> String {
    let mut out = String::new();
    for gens in members {
        let line: Vec<String> = gens
            .iter()
            .map(|g| g.images().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        out.push_str(&line.join(";"));
        out.push('\n');
    }
    out
}

/// Inverse of [`format_series`]. Blank lines and lines starting with `#`
/// are skipped.
pub fn parse_series(text: &str) -> Result<Vec<Vec<Perm>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            line.split(';')
                .map(|g| {
                    let images = g
                        .split_whitespace()
                        .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad image {x:?}"))))
                        .collect::<Result<Vec<usize>>>()?;
                    Perm::from_images(&images)
                })
                .collect()
        })
        .collect()
}

/// A loaded context directory.
pub struct ContextDir {
    path: PathBuf,
    ctx: Context,
}

impl ContextDir {
    /// Computes the series for `group` and writes a fresh context directory:
    /// metadata, series, kernel classes of every layer, and layer 0.
    pub fn create(dir: &Path, group: &AbelianGroup, series: Option<Vec<Vec<Perm>>>) -> Result<Self> {
        let options = ContextOptions {
            series,
            ..Default::default()
        };
        let ctx = Context::with_options(group, &options)?;
        fs::create_dir_all(dir)?;
        let inner: Vec<Vec<Perm>> = (1..ctx.series().len())
            .map(|i| ctx.series().member(i).generators().to_vec())
            .collect();
        write_text(&dir.join("series.txt"), &format_series(&inner))?;
        for i in 1..=ctx.layer_count() {
            let classes = ctx.kernel_classes(i)?;
            ShardFile::new(&ctx, i, classes).write(&kernel_path(dir, i))?;
        }
        ShardFile::new(&ctx, 0, &ctx.initial_layer()).write(&layer_path(dir, 0))?;
        let meta = format!(
            "group {}\nmode {}\nfingerprint {}\nlayers {}\n",
            ctx.descriptor(),
            ctx.mode().name(),
            ctx.fingerprint(),
            ctx.layer_count()
        );
        // written last: its presence marks a complete directory
        write_text(&dir.join("context.txt"), &meta)?;
        Ok(ContextDir {
            path: dir.to_path_buf(),
            ctx,
        })
    }

    /// Rebuilds the context from a directory and checks its fingerprint.
    pub fn load(dir: &Path) -> Result<Self> {
        let meta = read(&dir.join("context.txt"))?;
        let field = |name: &str| -> Result<String> {
            meta.lines()
                .find_map(|l| l.strip_prefix(name).and_then(|v| v.strip_prefix(' ')))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("context.txt lacks {name}")))
        };
        let group = AbelianGroup::parse(&field("group")?)?;
        let expected = field("fingerprint")?;
        let series = parse_series(&read(&dir.join("series.txt"))?)?;
        let options = ContextOptions {
            series: Some(series),
            ..Default::default()
        };
        let ctx = Context::with_options(&group, &options)?;
        if ctx.fingerprint() != expected {
            return Err(Error::FingerprintMismatch {
                expected,
                found: ctx.fingerprint().to_string(),
            });
        }
        for i in 1..=ctx.layer_count() {
            let path = kernel_path(dir, i);
            if path.exists() {
                let shard = ShardFile::read(&path)?;
                if shard.header().layer != i {
                    return Err(Error::HeaderMismatch(format!("{} is not for layer {i}", path.display())));
                }
                ctx.preload_kernel_classes(i, shard.records(&ctx)?);
            }
        }
        Ok(ContextDir {
            path: dir.to_path_buf(),
            ctx,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    /// Lifts every record of a layer `layer - 1` shard and writes the
    /// sorted layer `layer` result to `out`. Nothing is left at `out` on failure.
    pub fn run_job(&self, layer: usize, input: &ShardFile, out: &Path) -> Result<ShardFile> {
        let result = self.lift_shard(layer, input).and_then(|shard| {
            shard.write(out)?;
            Ok(shard)
        });
        if result.is_err() {
            let _ = fs::remove_file(out);
        }
        result
    }

    fn lift_shard(&self, layer: usize, input: &ShardFile) -> Result<ShardFile> {
        let ctx = &self.ctx;
        if layer == 0 || layer > ctx.layer_count() {
            return Err(Error::Parse(format!("layer must be in 1..={}", ctx.layer_count())));
        }
        if input.header().layer + 1 != layer {
            return Err(Error::HeaderMismatch(format!(
                "input shard is layer {}, expected {}",
                input.header().layer,
                layer - 1
            )));
        }
        let parents = input.records(ctx)?;
        let lifted = ctx.lift_layer(&parents, layer - 1)?;
        Ok(ShardFile::new(ctx, layer, &lifted))
    }

    /// Final-layer records of `shard`, fused into `Hol(G)`-classes.
    pub fn final_classes(&self, shard: &ShardFile) -> Result<Vec<SubgroupRecord>> {
        if shard.header().layer != self.ctx.layer_count() {
            return Err(Error::HeaderMismatch(format!(
                "shard is layer {}, final layer is {}",
                shard.header().layer,
                self.ctx.layer_count()
            )));
        }
        self.ctx.fuse_final(&shard.records(&self.ctx)?)
    }

    /// Per-layer statistics: `stats.txt` if present, otherwise the counts in
    /// the merged layer files with one job each.
    pub fn stats(&self) -> Result<LayerStats> {
        let path = self.path.join("stats.txt");
        if path.exists() {
            return parse_stats(&read(&path)?);
        }
        let mut stats = LayerStats::default();
        for i in 0..=self.ctx.layer_count() {
            let path = layer_path(&self.path, i);
            if path.exists() {
                stats.rows.push((i, ShardFile::read(&path)?.len(), 1));
            }
        }
        Ok(stats)
    }

    /// Runs every layer with `jobs` shards each, resuming from whatever
    /// merged layers and job outputs already exist.
    pub fn full_run(&self, jobs: usize) -> Result<FullRun> {
        let jobs_dir = self.path.join("jobs");
        fs::create_dir_all(&jobs_dir)?;
        let mut stats = LayerStats::default();
        let mut current = ShardFile::read(&layer_path(&self.path, 0))?;
        current.header().check(&self.ctx)?;
        stats.rows.push((0, current.len(), 1));
        for i in 1..=self.ctx.layer_count() {
            let merged_path = layer_path(&self.path, i);
            if let Some(done) = valid_shard(&self.ctx, &merged_path, i) {
                stats.rows.push((i, done.len(), jobs));
                current = done;
                continue;
            }
            let mut outputs = Vec::with_capacity(jobs);
            for (j, part) in current.split(jobs)?.into_iter().enumerate() {
                let in_path = jobs_dir.join(format!("layer_{:02}_in_{j:04}.hbl", i - 1));
                let out_path = jobs_dir.join(format!("layer_{i:02}_out_{j:04}.hbl"));
                part.write(&in_path)?;
                let out = match valid_shard(&self.ctx, &out_path, i) {
                    Some(done) => done,
                    None => self.run_job(i, &part, &out_path)?,
                };
                outputs.push(out);
            }
            let merged = ShardFile::merge(&outputs)?;
            merged.write(&merged_path)?;
            stats.rows.push((i, merged.len(), jobs));
            current = merged;
        }
        write_text(&self.path.join("stats.txt"), &stats.table())?;
        let classes = self.final_classes(&current)?;
        Ok(FullRun { classes, stats })
    }
}

#[derive(Clone, Debug)]
pub struct FullRun {
    pub classes: Vec<SubgroupRecord>,
    pub stats: LayerStats,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// The shard at `path` if it exists, belongs to `ctx` and is for `layer`.
fn valid_shard(ctx: &Context, path: &Path, layer: usize) -> Option<ShardFile> {
    let shard = ShardFile::read(path).ok()?;
    (shard.header().layer == layer && shard.header().check(ctx).is_ok()).then_some(shard)
}

fn parse_stats(text: &str) -> Result<LayerStats> {
    let rows = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<usize> = l
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad stats line {l:?}"))))
                .collect::<Result<_>>()?;
            match v[..] {
                [a, b, c] => Ok((a, b, c)),
                _ => Err(Error::Parse(format!("bad stats line {l:?}"))),
            }
        })
        .collect::<Result<_>>()?;
    Ok(LayerStats { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_text_roundtrip() {
        let ctx = Context::from_descriptor("2,4").unwrap();
        let inner: Vec<Vec<Perm>> = (1..ctx.series().len())
            .map(|i| ctx.series().member(i).generators().to_vec())
            .collect();
        assert_eq!(parse_series(&format_series(&inner)).unwrap(), inner);
    }

    #[test]
    fn reloaded_context_matches() {
        let dir = tempfile::tempdir().unwrap();
        let group = AbelianGroup::parse("2,4").unwrap();
        let created = ContextDir::create(dir.path(), &group, None).unwrap();
        let loaded = ContextDir::load(dir.path()).unwrap();
        assert_eq!(created.context().fingerprint(), loaded.context().fingerprint());
        for i in 1..=loaded.context().layer_count() {
            assert_eq!(
                created.context().kernel_classes(i).unwrap(),
                loaded.context().kernel_classes(i).unwrap()
            );
        }
    }

    #[test]
    fn tampered_series_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        ContextDir::create(dir.path(), &AbelianGroup::parse("4").unwrap(), None).unwrap();
        let meta = fs::read_to_string(dir.path().join("context.txt")).unwrap();
        let fp = meta.lines().find_map(|l| l.strip_prefix("fingerprint ")).unwrap().to_string();
        fs::write(dir.path().join("context.txt"), meta.replace(&fp, "0000000000000000")).unwrap();
        assert!(matches!(ContextDir::load(dir.path()), Err(Error::FingerprintMismatch { .. })));
    }

    #[test]
    fn c4_full_run_and_job_idempotence() {
        let dir = tempfile::tempdir().unwrap();
        let cd = ContextDir::create(dir.path(), &AbelianGroup::parse("4").unwrap(), None).unwrap();
        let run = cd.full_run(1).unwrap();
        assert_eq!(run.classes.len(), 2);
        let r = cd.context().layer_count();
        let input = ShardFile::read(&layer_path(dir.path(), r - 1)).unwrap();
        let out = dir.path().join("again.hbl");
        cd.run_job(r, &input, &out).unwrap();
        let first = fs::read(&out).unwrap();
        cd.run_job(r, &input, &out).unwrap();
        assert_eq!(fs::read(&out).unwrap(), first);
        assert_eq!(first, fs::read(layer_path(dir.path(), r)).unwrap());
        assert_eq!(cd.stats().unwrap(), run.stats);
    }

    #[test]
    fn empty_shard_gives_empty_output() {
        let dir = tempfile::tempdir().unwrap();
        let cd = ContextDir::create(dir.path(), &AbelianGroup::parse("2,2").unwrap(), None).unwrap();
        let empty = ShardFile::new(cd.context(), 0, &[]);
        let out = cd.run_job(1, &empty, &dir.path().join("out.hbl")).unwrap();
        assert!(out.is_empty());
        assert_eq!(out.header().layer, 1);
    }

    #[test]
    fn failed_job_leaves_no_output() {
        let dir = tempfile::tempdir().unwrap();
        let cd = ContextDir::create(dir.path(), &AbelianGroup::parse("4").unwrap(), None).unwrap();
        let input = ShardFile::read(&layer_path(dir.path(), 0)).unwrap();
        let out = dir.path().join("bad.hbl");
        fs::write(&out, "stale").unwrap();
        // layer 0 input cannot produce layer 2
        assert!(cd.run_job(2, &input, &out).is_err());
        assert!(!out.exists());
    }
}

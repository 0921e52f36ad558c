use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holobrace::brace::{export, Brace};
use holobrace::oracle::{Oracle, DEFAULT_ORACLE_LIMIT};
use holobrace::pipeline::{layer_path, parse_series, ContextDir};
use holobrace::{AbelianGroup, Result, ShardFile};

#[derive(Parser)]
#[command(name = "holobrace", version, about = "Regular subgroups of abelian holomorphs and their left braces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the normal series and write a context directory.
    Series {
        #[arg(long)]
        group: String,
        /// Generators of N_1 … N_{r-1}, one member per line.
        #[arg(long)]
        series_file: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lift a shard of layer I-1 to layer I.
    Layer {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long)]
        layer: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a shard into K contiguous pieces named <prefix>NNNN.hbl.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        jobs: usize,
        #[arg(long)]
        out_prefix: String,
    },
    /// Merge shards of one layer into a single sorted shard.
    Merge {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print the number of classes in a final shard and the layer statistics.
    Count {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long = "final")]
        final_shard: PathBuf,
    },
    /// Write the brace of every final class.
    ExportBraces {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long = "final")]
        final_shard: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count classes with the brute-force oracle.
    Oracle {
        #[arg(long)]
        group: String,
        /// Largest holomorph order accepted.
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        limit: u64,
    },
    /// Run every layer and print the class count.
    FullRun {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("holobrace: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Removes `path` if `result` is an error.
fn cleanup<T>(path: &Path, result: Result<T>) -> Result<T> {
    if result.is_err() {
        let _ = fs::remove_file(path);
    }
    result
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Series { group, series_file, out } => {
            let group = AbelianGroup::parse(&group)?;
            let series = match series_file {
                Some(f) => Some(parse_series(&fs::read_to_string(f)?)?),
                None => None,
            };
            let cd = ContextDir::create(&out, &group, series)?;
            let ctx = cd.context();
            println!("group {} mode {} fingerprint {}", ctx.descriptor(), ctx.mode().name(), ctx.fingerprint());
            for i in 1..=ctx.layer_count() {
                let f = ctx.series().factor(i);
                println!("factor {i}: {}^{}", f.prime, f.rank);
            }
        }
        Command::Layer { ctx, layer, input, out } => {
            let cd = ContextDir::load(&ctx)?;
            let shard = cleanup(&out, ShardFile::read(&input))?;
            let result = cd.run_job(layer, &shard, &out)?;
            println!("layer {layer}: {} classes", result.len());
        }
        Command::Split { input, jobs, out_prefix } => {
            let parts = ShardFile::read(&input)?.split(jobs)?;
            for (j, part) in parts.iter().enumerate() {
                let path = PathBuf::from(format!("{out_prefix}{j:04}.hbl"));
                part.write(&path)?;
                println!("{} {}", path.display(), part.len());
            }
        }
        Command::Merge { out, inputs } => {
            let shards = inputs.iter().map(|p| ShardFile::read(p)).collect::<Result<Vec<_>>>()?;
            let merged = ShardFile::merge(&shards)?;
            merged.write(&out)?;
            println!("{} {}", out.display(), merged.len());
        }
        Command::Count { ctx, final_shard } => {
            let cd = ContextDir::load(&ctx)?;
            let classes = cd.final_classes(&ShardFile::read(&final_shard)?)?;
            println!("classes: {}", classes.len());
            print!("{}", cd.stats()?.table());
        }
        Command::ExportBraces { ctx, final_shard, out } => {
            let cd = ContextDir::load(&ctx)?;
            let classes = cd.final_classes(&ShardFile::read(&final_shard)?)?;
            let braces = classes
                .iter()
                .map(|r| Brace::from_regular(cd.context(), r))
                .collect::<Result<Vec<_>>>()?;
            cleanup(&out, holobrace::shard::write_text(&out, &export(&braces)))?;
            println!("{} braces written to {}", braces.len(), out.display());
        }
        Command::Oracle { group, limit } => {
            let oracle = Oracle::with_limit(&AbelianGroup::parse(&group)?, limit)?;
            println!("classes: {}", oracle.run().keys.len());
        }
        Command::FullRun { group, jobs, out } => {
            let group = AbelianGroup::parse(&group)?;
            let cd = if out.join("context.txt").exists() {
                let cd = ContextDir::load(&out)?;
                if cd.context().group() != &group {
                    return Err(holobrace::Error::HeaderMismatch(format!(
                        "{} holds a run for group {}",
                        out.display(),
                        cd.context().descriptor()
                    )));
                }
                cd
            } else {
                ContextDir::create(&out, &group, None)?
            };
            let run = cd.full_run(jobs)?;
            println!("classes: {}", run.classes.len());
            print!("{}", run.stats.table());
            println!("final: {}", layer_path(&out, cd.context().layer_count()).display());
        }
    }
    Ok(())
}

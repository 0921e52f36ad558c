//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use holobrace::brace::{is_regular, Brace};
use holobrace::oracle::{ElementSet, Oracle};
use holobrace::pipeline::layer_path;
use holobrace::{AbelianGroup, Context, ContextDir, ShardFile, SubgroupRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every abelian group with |Hol(G)| ≤ 5000 that the suite covers.
const SUITE: [&str; 15] = [
    "4", "2,2", "8", "2,4", "2,2,2", "9", "3,3", "16", "2,8", "4,4", "2,2,4", "27", "3,9", "64", "2,32",
];

const TRIALS: usize = 10_000;

type Outcome = Result<String, String>;

struct Suite {
    groups: Vec<Group>,
}

struct Group {
    desc: &'static str,
    ctx: Context,
    oracle: Oracle,
    classes: Vec<SubgroupRecord>,
    engine_time: Duration,
}

impl Suite {
    fn load() -> Self {
        let groups = SUITE
            .iter()
            .map(|&desc| {
                let g = AbelianGroup::parse(desc).unwrap();
                let start = Instant::now();
                let ctx = Context::new(&g).unwrap();
                let classes = ctx.regular_classes().unwrap().classes;
                let engine_time = start.elapsed();
                let oracle = Oracle::new(&g).unwrap();
                Group { desc, ctx, oracle, classes, engine_time }
            })
            .collect();
        Suite { groups }
    }
}

fn report(name: &str, outcome: Outcome) -> bool {
    match outcome {
        Ok(detail) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL  {name}: {detail}");
            false
        }
    }
}

fn full_run_cli(desc: &str, dir: &Path) -> Result<(usize, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_holobrace"))
        .args(["full-run", "--group", desc, "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    let count = stdout
        .lines()
        .find_map(|l| l.strip_prefix("classes: "))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("no class count in output {stdout:?}"))?;
    Ok((count, elapsed))
}

fn reference_counts() -> Outcome {
    let rows = [("64", 10, 60u64), ("2,32", 142, 300), ("4,16", 2724, 1800), ("2,2,16", 3124, 7200)];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut summary = Vec::new();
    for (desc, expected, limit) in rows {
        let (got, elapsed) = full_run_cli(desc, &tmp.path().join(desc.replace(',', "_")))?;
        let pass = got == expected && elapsed.as_secs() <= limit;
        ok &= pass;
        println!(
            "      full-run --group {desc}: expected {expected}, got {got}, {:.1} s (limit {limit} s) {}",
            elapsed.as_secs_f64(),
            if pass { "ok" } else { "MISMATCH" }
        );
        summary.push(format!("{desc}→{got}"));
    }
    let summary = summary.join(", ");
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn not_reproducible() -> Outcome {
    let g = AbelianGroup::parse("2,2,4,4").unwrap();
    let hol = holobrace::abelian::aut_order_formula(&g) * 64;
    Ok(format!(
        "not attempted at desk scale: the C2×C2×C4×C4 total (|Hol| = {hol}), its breakdown by \
         multiplicative group, and the full-scale per-layer counts; covered instead by the oracle, \
         soundness, non-redundancy, sharding and encoding suites"
    ))
}

fn oracle_equivalence(suite: &Suite) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for g in &suite.groups {
        let expected = g.oracle.run().keys;
        let mut keys = g
            .classes
            .iter()
            .map(|r| g.oracle.class_key(&r.generators(g.ctx.pcgs())))
            .collect::<holobrace::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        keys.sort();
        if keys != expected {
            bad.push(format!("{}: engine {} oracle {}", g.desc, keys.len(), expected.len()));
        }
    }
    let engine: Duration = suite.groups.iter().map(|g| g.engine_time).sum();
    let elapsed = start.elapsed() + engine;
    if bad.is_empty() && elapsed.as_secs() <= 1800 {
        Ok(format!("{} groups, class keys identical, {:.1} s", suite.groups.len(), elapsed.as_secs_f64()))
    } else {
        Err(format!("{bad:?}, {:.1} s", elapsed.as_secs_f64()))
    }
}

fn soundness(suite: &Suite) -> Outcome {
    let mut checked = 0;
    for g in &suite.groups {
        for r in &g.classes {
            if !is_regular(&g.ctx, r) {
                return Err(format!("{}: {r} is not regular", g.desc));
            }
            let brace = Brace::from_regular(&g.ctx, r).map_err(|e| format!("{}: {r}: {e}", g.desc))?;
            brace.verify().map_err(|t| format!("{}: {r}: triple {t:?}", g.desc))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} classes regular with valid braces, 0 failures"))
}

fn non_redundancy(suite: &Suite) -> Outcome {
    let mut pairs = 0usize;
    for g in &suite.groups {
        let sets: Vec<ElementSet> = g
            .classes
            .iter()
            .map(|r| g.oracle.element_set(&r.generators(g.ctx.pcgs())))
            .collect::<holobrace::Result<_>>()
            .map_err(|e| e.to_string())?;
        let mut owner: HashMap<ElementSet, usize> = HashMap::new();
        for (i, s) in sets.iter().enumerate() {
            for conj in g.oracle.conjugacy_class(s.clone()) {
                if let Some(j) = owner.insert(conj, i) {
                    if j != i {
                        return Err(format!("{}: classes {j} and {i} are conjugate", g.desc));
                    }
                }
            }
        }
        pairs += sets.len() * sets.len().saturating_sub(1) / 2;
    }
    Ok(format!("{pairs} pairs checked by orbit membership, 0 collisions"))
}

fn read_layers(dir: &Path, layers: usize) -> Vec<Vec<u8>> {
    (0..=layers).map(|i| fs::read(layer_path(dir, i)).unwrap()).collect()
}

fn sharding(suite: &Suite) -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for g in &suite.groups {
        let group = AbelianGroup::parse(g.desc).unwrap();
        let mut reference: Option<Vec<Vec<u8>>> = None;
        for k in [1usize, 2, 3, 5] {
            let dir = tmp.path().join(format!("{}_{k}", g.desc.replace(',', "_")));
            let cd = ContextDir::create(&dir, &group, None).map_err(|e| e.to_string())?;
            let run = cd.full_run(k).map_err(|e| e.to_string())?;
            if run.classes.len() != g.classes.len() {
                return Err(format!("{} k={k}: {} classes", g.desc, run.classes.len()));
            }
            let files = read_layers(&dir, cd.context().layer_count());
            match &reference {
                None => reference = Some(files),
                Some(r) if *r != files => return Err(format!("{} k={k}: layer files differ from k=1", g.desc)),
                Some(_) => {}
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, every layer file byte-identical across k ∈ {{1,2,3,5}}"))
}

fn trivial_brace(suite: &Suite) -> Outcome {
    for g in &suite.groups {
        let pcgs = g.ctx.pcgs();
        let translations = g.ctx.holomorph().translation_generators();
        let key = g.oracle.class_key(&translations).map_err(|e| e.to_string())?;
        let hits: Vec<&SubgroupRecord> = g
            .classes
            .iter()
            .filter(|r| g.oracle.class_key(&r.generators(pcgs)).unwrap() == key)
            .collect();
        if hits.len() != 1 {
            return Err(format!("{}: translation class appears {} times", g.desc, hits.len()));
        }
        let b = Brace::from_regular(&g.ctx, hits[0]).map_err(|e| e.to_string())?;
        let n = b.size();
        if !(0..n).all(|x| (0..n).all(|y| b.mul(x, y) == b.add(x, y))) {
            return Err(format!("{}: translation brace is not trivial", g.desc));
        }
    }
    Ok(format!("exactly once with x·y = x+y in all {} groups", suite.groups.len()))
}

fn random_record(ctx: &Context, rng: &mut ChaCha8Rng) -> SubgroupRecord {
    let pcgs = ctx.pcgs();
    let gens: Vec<_> = (0..rng.gen_range(0..4))
        .map(|_| pcgs.element(rng.gen_range(0..pcgs.order())))
        .collect();
    SubgroupRecord::generated_by(pcgs, &gens)
}

fn encoding_and_resume(suite: &Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = 0usize;
    let mut roundtrips = 0usize;
    for g in &suite.groups {
        for _ in 0..TRIALS {
            let r = random_record(&g.ctx, &mut rng);
            match SubgroupRecord::decode(&r.encode(), g.ctx.pcgs()) {
                Ok(back) if back == r => {}
                _ => mismatches += 1,
            }
            roundtrips += 1;
        }
    }

    // crash-resume: delete a random subset of one layer's job outputs, re-run
    // those jobs, merge, and compare with the undisturbed merge
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    struct Prepared {
        cd: ContextDir,
        inputs: Vec<Vec<ShardFile>>,
        merged: Vec<Vec<u8>>,
    }
    let mut prepared = Vec::new();
    for g in &suite.groups {
        let dir = tmp.path().join(g.desc.replace(',', "_"));
        let cd = ContextDir::create(&dir, &AbelianGroup::parse(g.desc).unwrap(), None).map_err(|e| e.to_string())?;
        cd.full_run(1).map_err(|e| e.to_string())?;
        let layers = cd.context().layer_count();
        let merged = read_layers(&dir, layers);
        let inputs = (1..=layers)
            .map(|i| ShardFile::parse(std::str::from_utf8(&merged[i - 1]).unwrap()).unwrap().split(5).unwrap())
            .collect();
        prepared.push(Prepared { cd, inputs, merged });
    }
    let mut resumes = 0usize;
    let deadline = Instant::now() + Duration::from_secs(600);
    while resumes < TRIALS && Instant::now() < deadline {
        let p = &prepared[rng.gen_range(0..prepared.len())];
        let layer = rng.gen_range(1..=p.inputs.len());
        let parts = &p.inputs[layer - 1];
        let job_dir = p.cd.path().join("resume");
        fs::create_dir_all(&job_dir).map_err(|e| e.to_string())?;
        let paths: Vec<_> = (0..parts.len()).map(|j| job_dir.join(format!("{layer}_{j}.hbl"))).collect();
        for (j, part) in parts.iter().enumerate() {
            if !paths[j].exists() {
                p.cd.run_job(layer, part, &paths[j]).map_err(|e| e.to_string())?;
            }
        }
        for path in &paths {
            if rng.gen_bool(0.5) {
                fs::remove_file(path).map_err(|e| e.to_string())?;
            }
        }
        let outputs = parts
            .iter()
            .zip(&paths)
            .map(|(part, path)| match ShardFile::read(path) {
                Ok(s) => Ok(s),
                Err(_) => p.cd.run_job(layer, part, path),
            })
            .collect::<holobrace::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let merged = ShardFile::merge(&outputs).map_err(|e| e.to_string())?;
        if merged.render().as_bytes() != p.merged[layer] {
            mismatches += 1;
        }
        resumes += 1;
    }
    if mismatches == 0 && resumes == TRIALS {
        Ok(format!("{roundtrips} record roundtrips, {resumes} crash-resume trials, 0 mismatches"))
    } else {
        Err(format!("{roundtrips} roundtrips, {resumes}/{TRIALS} resume trials, {mismatches} mismatches"))
    }
}

fn main() {
    // only run under `cargo test`, not when listing tests
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let suite = Suite::load();
    let results = [
        report("reference class counts", reference_counts()),
        report("desk-scale limits stated", not_reproducible()),
        report("oracle equivalence", oracle_equivalence(&suite)),
        report("soundness", soundness(&suite)),
        report("non-redundancy", non_redundancy(&suite)),
        report("determinism and sharding", sharding(&suite)),
        report("trivial brace presence", trivial_brace(&suite)),
        report("encoding roundtrip and crash-resume", encoding_and_resume(&suite)),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

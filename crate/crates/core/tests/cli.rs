use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn holobrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holobrace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = holobrace(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn oracle_prints_class_count() {
    assert_eq!(stdout_ok(&["oracle", "--group", "4"]).trim(), "classes: 2");
    assert_eq!(stdout_ok(&["oracle", "--group", "2,2"]).trim(), "classes: 2");
}

#[test]
fn full_run_c64() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_ok(&["full-run", "--group", "64", "--out", path(&dir.path().join("run"))]);
    assert_eq!(out.lines().next(), Some("classes: 10"));
    assert!(out.contains("layer  classes  jobs"));
}

#[test]
fn manual_pipeline_matches_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let full = d.join("full");
    let out = stdout_ok(&["full-run", "--group", "2,4", "--jobs", "2", "--out", path(&full)]);
    assert_eq!(out.lines().next(), Some("classes: 14"));

    let ctx = d.join("ctx");
    let series_out = stdout_ok(&["series", "--group", "2,4", "--out", path(&ctx)]);
    assert!(series_out.contains("fingerprint"));
    let layers = series_out.lines().filter(|l| l.starts_with("factor ")).count();

    let mut current = ctx.join("layer_00.hbl");
    for i in 1..=layers {
        let prefix = d.join(format!("part_{i}_"));
        stdout_ok(&["split", "--in", path(&current), "--jobs", "3", "--out-prefix", path(&prefix)]);
        let mut outputs = Vec::new();
        for j in 0..3 {
            let input = d.join(format!("part_{i}_{j:04}.hbl"));
            let output = d.join(format!("out_{i}_{j}.hbl"));
            stdout_ok(&["layer", "--ctx", path(&ctx), "--layer", &i.to_string(), "--in", path(&input), "--out", path(&output)]);
            outputs.push(output);
        }
        let merged = d.join(format!("merged_{i}.hbl"));
        let mut args = vec!["merge", "--out", path(&merged)];
        args.extend(outputs.iter().map(|p| path(p)));
        stdout_ok(&args);
        current = merged;
    }
    let final_full = full.join(format!("layer_{layers:02}.hbl"));
    assert_eq!(fs::read(&current).unwrap(), fs::read(&final_full).unwrap());

    let count = stdout_ok(&["count", "--ctx", path(&ctx), "--final", path(&current)]);
    assert_eq!(count.lines().next(), Some("classes: 14"));

    let braces = d.join("braces.txt");
    stdout_ok(&["export-braces", "--ctx", path(&ctx), "--final", path(&current), "--out", path(&braces)]);
    let text = fs::read_to_string(&braces).unwrap();
    let blocks = holobrace::brace::parse_export(&text).unwrap();
    assert_eq!(blocks.len(), 14);
    assert!(blocks.iter().all(|(desc, _, table)| desc == "2,4" && table.len() == 8));
}

#[test]
fn split_sizes_and_empty_shards() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let input = d.join("in.hbl");
    let body: String = (1..=10).map(|i| format!("1:{i}\n")).collect();
    fs::write(&input, format!("HBL1 2,4 0011223344556677 layer=1 n=10\n{body}")).unwrap();
    let out = stdout_ok(&["split", "--in", path(&input), "--jobs", "3", "--out-prefix", path(&d.join("p"))]);
    let sizes: Vec<&str> = out.lines().map(|l| l.rsplit(' ').next().unwrap()).collect();
    assert_eq!(sizes, ["4", "3", "3"]);

    let out = stdout_ok(&["split", "--in", path(&input), "--jobs", "12", "--out-prefix", path(&d.join("q"))]);
    assert_eq!(out.lines().filter(|l| l.ends_with(" 0")).count(), 2);
    let empty = fs::read_to_string(d.join("q0011.hbl")).unwrap();
    assert_eq!(empty, "HBL1 2,4 0011223344556677 layer=1 n=0\n");
}

#[test]
fn fingerprint_mismatch_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ctx = d.join("ctx");
    stdout_ok(&["series", "--group", "4", "--out", path(&ctx)]);
    let layer0 = fs::read_to_string(ctx.join("layer_00.hbl")).unwrap();
    let fp = layer0.split(' ').nth(2).unwrap();
    let forged = d.join("forged.hbl");
    fs::write(&forged, layer0.replace(fp, "ffffffffffffffff")).unwrap();
    let out_path = d.join("out.hbl");
    let out = holobrace(&["layer", "--ctx", path(&ctx), "--layer", "1", "--in", path(&forged), "--out", path(&out_path)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fingerprint"));
    assert!(!out_path.exists());
}

#[test]
fn merge_rejects_mixed_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("a.hbl"), "HBL1 4 00 layer=1 n=1\n1:1\n").unwrap();
    fs::write(d.join("b.hbl"), "HBL1 4 00 layer=2 n=0\n").unwrap();
    let out = holobrace(&["merge", "--out", path(&d.join("m.hbl")), path(&d.join("a.hbl")), path(&d.join("b.hbl"))]);
    assert!(!out.status.success());
    assert!(!d.join("m.hbl").exists());
}

#[test]
fn user_series_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout_ok(&["series", "--group", "2,4", "--out", path(&d.join("a"))]);
    let series = d.join("a").join("series.txt");
    let out = stdout_ok(&["series", "--group", "2,4", "--series-file", path(&series), "--out", path(&d.join("b"))]);
    let fp_a = fs::read_to_string(d.join("a/context.txt")).unwrap();
    let fp_b = fs::read_to_string(d.join("b/context.txt")).unwrap();
    assert_eq!(fp_a, fp_b);
    assert!(out.contains("factor 1"));

    // a non-normal "series" is refused
    fs::write(d.join("bad.txt"), "0 1 2 3 5 4 7 6\n").unwrap();
    let out = holobrace(&["series", "--group", "2,4", "--series-file", path(&d.join("bad.txt")), "--out", path(&d.join("c"))]);
    assert!(!out.status.success());
}

#[test]
fn bad_group_descriptor_is_an_error() {
    let out = holobrace(&["oracle", "--group", "6"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

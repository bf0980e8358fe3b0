use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bibog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bibog")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["gen", "--out", s(&out)];
    args.extend_from_slice(extra);
    let res = bibog(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

#[test]
fn random_generation_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["--p", "3", "--n", "2", "--generator", "random", "--density", "0.5", "--seed", "17"];
    let a = gen(&dir, "a.set", &args);
    let b = gen(&dir, "b.set", &args);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn product_of_codim_one_has_density_quarter() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.set");
    let res = bibog(&["gen", "--p", "2", "--n", "3", "--generator", "product", "--out", s(&out)]);
    assert!(String::from_utf8_lossy(&res.stdout).contains("16 pairs, density 0.250000"));
}

#[test]
fn rank_zero_bisubspace_is_everything() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "z.set");
    let res = bibog(&[
        "gen", "--p", "2", "--n", "2", "--generator", "bisubspace", "--rank", "0", "--format", "text", "--out", s(&out),
    ]);
    assert_eq!(code(&res), 0);
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 16);
}

#[test]
fn product_run_passes_and_verifies() {
    let dir = TempDir::new().unwrap();
    let set = gen(&dir, "p.set", &["--p", "2", "--n", "4", "--generator", "product", "--codim-u", "2", "--seed", "5"]);
    let cert = path(&dir, "p.json");
    let res = bibog(&["run", "--in", s(&set), "--out", s(&cert), "--seed", "5"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stdout));
    assert!(cert.with_extension("txt").exists() && cert.with_extension("variety").exists());
    let res = bibog(&["verify", "--in", s(&set), "--cert", s(&cert)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stdout));
}

#[test]
fn verify_rejects_a_different_input() {
    let dir = TempDir::new().unwrap();
    let set = gen(&dir, "p.set", &["--p", "2", "--n", "4", "--generator", "product"]);
    let other = gen(&dir, "q.set", &["--p", "2", "--n", "4", "--generator", "random", "--density", "0.2"]);
    let cert = path(&dir, "p.json");
    assert_eq!(code(&bibog(&["run", "--in", s(&set), "--out", s(&cert)])), 0);
    assert_eq!(code(&bibog(&["verify", "--in", s(&other), "--cert", s(&cert)])), 1);
}

#[test]
fn empty_set_is_a_guard_refusal() {
    let dir = TempDir::new().unwrap();
    let set = path(&dir, "e.txt");
    fs::write(&set, "# fpset p=2 n=3\n").unwrap();
    let res = bibog(&["run", "--in", s(&set), "--out", s(&path(&dir, "e.json"))]);
    assert_eq!(code(&res), 3);
}

#[test]
fn malformed_input_reports_offset() {
    let dir = TempDir::new().unwrap();
    let set = path(&dir, "bad.txt");
    fs::write(&set, "# fpset p=2 n=2\n0,1;1,x\n").unwrap();
    let res = bibog(&["run", "--in", s(&set), "--out", s(&path(&dir, "b.json"))]);
    assert_eq!(code(&res), 4);
    assert!(String::from_utf8_lossy(&res.stderr).contains("byte"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&bibog(&["gen", "--p", "2"])), 2);
    assert_eq!(code(&bibog(&["frobnicate"])), 2);
}

#[test]
fn thread_count_never_changes_outputs() {
    let dir = TempDir::new().unwrap();
    let set = gen(&dir, "b.set", &["--p", "2", "--n", "6", "--generator", "bisubspace", "--seed", "8"]);
    let outputs: Vec<(Vec<u8>, Vec<u8>)> = ["1", "2", "5"]
        .iter()
        .map(|t| {
            let cert = path(&dir, &format!("c{t}.json"));
            bibog(&["run", "--in", s(&set), "--out", s(&cert), "--seed", "8", "--threads", t]);
            (fs::read(&cert).unwrap(), fs::read(cert.with_extension("txt")).unwrap())
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn bisubspace_batch_mostly_passes() {
    let dir = TempDir::new().unwrap();
    let mut passes = 0;
    for seed in 0..20 {
        let seed = seed.to_string();
        let set = gen(&dir, "b.set", &["--p", "2", "--n", "6", "--generator", "bisubspace", "--seed", &seed]);
        let cert = path(&dir, "b.json");
        passes += (code(&bibog(&["run", "--in", s(&set), "--out", s(&cert), "--seed", &seed])) == 0) as usize;
    }
    assert!(passes >= 18, "{passes}/20");
}

#[test]
fn fourier_dump_is_tabular() {
    let dir = TempDir::new().unwrap();
    let set = gen(&dir, "p.set", &["--p", "3", "--n", "2", "--generator", "product"]);
    let res = bibog(&["fourier", "--in", s(&set)]);
    let text = String::from_utf8(res.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y\tr\tre\tim\tabs"));
    assert!(lines.all(|l| l.split('\t').count() == 5));
}

#[test]
fn bench_reports_small_errors() {
    let res = bibog(&["bench", "--p", "2", "--n", "6", "--reps", "1"]);
    let text = String::from_utf8(res.stdout).unwrap();
    let err: f64 = text.lines().nth(1).unwrap().split('\t').last().unwrap().parse().unwrap();
    assert!(err < 1e-9);
}

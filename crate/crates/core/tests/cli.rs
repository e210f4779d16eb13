mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixture_conf, fixture_csv};

fn pcadca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcadca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn stats_on_two_column_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "time,a\n0,1\n500,3\n1000,5\n1500,7\n").unwrap();
    let out = pcadca(&["stats", "--input", path(&csv), "--out-dir", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let raw = read(&dir.path().join("stats_raw.csv"));
    assert_eq!(raw, "name,min,max,median,mean,stdev\na,1,7,4,4,2.58199\n");
    let res = read(&dir.path().join("stats_resampled.csv"));
    assert_eq!(res, "name,min,max,median,mean,stdev\na,2,6,4,4,2.82843\n");
}

#[test]
fn missing_input_is_a_data_error() {
    let out = pcadca(&["stats", "--input", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[ingest]") && err.contains("/nonexistent/file.csv"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    let out = pcadca(&["run", "--population", "lots"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pcadca(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pcadca(&["run"]);
    assert_eq!(out.status.code(), Some(2));
}

fn write_table(path: &Path, names: &[&str], cols: &[Vec<f64>]) {
    let mut s = String::from("time");
    for n in names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for t in 0..cols[0].len() {
        s.push_str(&(t * 1000).to_string());
        for c in cols {
            s.push_str(&format!(",{}", c[t]));
        }
        s.push('\n');
    }
    fs::write(path, s).unwrap();
}

/// Seeded uniform noise in [0, 1), independent per salt.
fn wobble(i: usize, salt: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(salt as u64);
    let mut v = 0.0;
    for _ in 0..=i {
        v = rng.gen::<f64>();
    }
    v
}

/// Columns mixing two latent factors at the given angles, plus a little noise.
/// `f1` is bimodal and `f2` uniform, so arrows keep their angular spread.
fn mixed(n: usize, angles: &[f64], seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let f: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let f1 = if i % 2 == 0 { -1.0 } else { 1.0 } + rng.gen_range(-0.3..0.3);
            (f1, rng.gen_range(-1.5..1.5))
        })
        .collect();
    angles
        .iter()
        .map(|deg| {
            let (s, c) = deg.to_radians().sin_cos();
            f.iter().map(|(a, b)| c * a + s * b + rng.gen_range(-0.05..0.05)).collect()
        })
        .collect()
}

#[test]
fn dominant_attribute_becomes_antigen() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    let mut cols = mixed(300, &[0.0, 50.0, 90.0, 130.0, 170.0], 11);
    // an extra bimodal jump makes `big` dominate after normalisation
    for (i, v) in cols[0].iter_mut().enumerate() {
        *v += if i % 2 == 0 { -3.0 } else { 3.0 };
    }
    cols.swap(0, 1);
    write_table(&csv, &["n1", "big", "n2", "n3", "n4"], &cols);
    let out = pcadca(&["analyse", "--input", path(&csv), "--out-dir", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("antigen: big"), "{summary}");
    let assignment = read(&dir.path().join("assignment.csv"));
    assert!(assignment.lines().nth(1).unwrap().starts_with("big,1,"), "{assignment}");
    assert!(read(&dir.path().join("loadings.csv")).starts_with("attribute,pc1,pc2,pc3,pc4,pc5,score,rank\n"));
}

#[test]
fn duplicated_pair_is_merged_once() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    let mut cols = mixed(300, &[0.0, 45.0, 90.0, 135.0, 180.0 - 22.5], 12);
    let dup: Vec<f64> = cols[0].iter().map(|v| 3.0 * v + 1.0).collect();
    cols.insert(1, dup);
    write_table(&csv, &["foot GSR", "hand GSR", "a", "b", "c", "d"], &cols);
    let out = pcadca(&["analyse", "--input", path(&csv), "--out-dir", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let merges = read(&dir.path().join("merges.csv"));
    let rows: Vec<&str> = merges.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{merges}");
    assert!(rows[0].starts_with("foot GSR,hand GSR,1,"), "{merges}");
    assert!(rows[0].ends_with(",true,GSR"), "{merges}");
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("foot GSR + hand GSR -> GSR"), "{summary}");
}

#[test]
fn constant_column_named_in_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    let n = 20;
    let cols: Vec<Vec<f64>> = vec![
        vec![2.0; n],
        (0..n).map(|i| wobble(i, 1)).collect(),
        (0..n).map(|i| wobble(i, 2)).collect(),
    ];
    write_table(&csv, &["flat", "x", "y"], &cols);
    let out = pcadca(&["analyse", "--input", path(&csv), "--out-dir", path(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[prep]") && err.contains("`flat`"), "{err}");
}

#[test]
fn run_from_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcadca(&[
        "run",
        "--config",
        path(&fixture_conf()),
        "--out-dir",
        path(dir.path()),
        "--thresholds",
        "-2,-1.5,-1,-0.5,0",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let roc = read(&dir.path().join("roc.csv"));
    let lines: Vec<&str> = roc.lines().collect();
    assert_eq!(lines[0], "threshold,tp_rate,fp_rate");
    assert_eq!(lines.len(), 1 + 5 + 1);
    assert!(lines[6].starts_with("# auc="));
    for i in 0..5 {
        assert!(dir.path().join(format!("segments_{i:02}_th{}.csv", ["-2", "-1.5", "-1", "-0.5", "0"][i])).exists());
    }
    let seg = read(&dir.path().join("segments_00_th-2.csv"));
    assert!(seg.starts_with("segment,start,end,true_label,L,predicted_label\n0,0,100,normal,"));

    // summary rows equal the ROC rows
    let summary = String::from_utf8_lossy(&out.stdout);
    for row in &lines[1..6] {
        assert!(summary.lines().any(|l| l == *row), "summary lacks {row}");
    }
    assert_eq!(read(&dir.path().join("summary.txt")), summary);

    let ka = read(&dir.path().join("k_alpha.csv"));
    assert!(ka.starts_with("type,seconds,k_alpha,presented_count\n0,0,"));
    assert_eq!(ka.lines().count(), 701);
}

#[test]
fn explicit_boundaries_bypass_marker() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcadca(&[
        "run",
        "--input",
        path(&fixture_csv()),
        "--exclude",
        "marker",
        "--boundaries",
        "100,200,300,400,500,600",
        "--out-dir",
        path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("boundaries: 100,200,300,400,500,600"));

    // no marker, no boundaries
    let out = pcadca(&["run", "--input", path(&fixture_csv()), "--exclude", "marker", "--out-dir", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[segment]"));
}

#[test]
fn pc1_score_mode_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcadca(&[
        "analyse",
        "--config",
        path(&fixture_conf()),
        "--score-mode",
        "pc1",
        "--out-dir",
        path(dir.path()),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("ranking (pc1,"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn milrt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_milrt")).args(args).env_remove("MILRT_THREADS").output().expect("spawn milrt")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "milrt failed: {}", stderr(o));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

/// Rows with the last quarter missing, written in the plain (observed-only) layout.
fn incomplete_rows() -> String {
    let mut s = String::from("x,y\n");
    for i in 0..40 {
        if i >= 30 {
            s += "NA,NA\n";
        } else {
            let t = i as f64;
            s += &format!("{},{}\n", (t * 0.37).sin() + 0.5, (t * 0.91).cos() - 0.2);
        }
    }
    s
}

#[test]
fn care_survival_mutual_independence_is_rejected() {
    let data = repo("data/care_survival.csv").display().to_string();
    let out = json(&milrt(&["test", "--data", &data, "--model", "table", "--method", "L-5", "--m", "50", "--format", "json"]));
    let r = &out["results"][0];
    assert_eq!(r["method"], "L-5");
    assert!(r["p_value"].as_f64().unwrap() < 1e-6, "{r}");
    assert_eq!(out["k"], 4);
    assert_eq!(out["h"], 7);
}

#[test]
fn care_survival_conditional_null_by_axis_name() {
    let data = repo("data/care_survival.csv").display().to_string();
    let out = json(&milrt(&["test", "--data", &data, "--model", "table", "--null", "conditional:clinic", "--format", "json"]));
    assert_eq!(out["k"], 2);
    assert!(out["results"][0]["p_value"].as_f64().unwrap() > 0.05);
}

#[test]
fn single_imputation_is_incompatible() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "one.csv", ".imp,x,y\n1,0.5,1\n1,1.5,0\n1,-0.25,2\n1,2.0,1.5\n");
    let o = milrt(&["test", "--data", &data, "--method", "L5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("m >= 2"));
}

#[test]
fn identical_imputations_reduce_to_the_complete_data_test() {
    let dir = TempDir::new().unwrap();
    let rows = [[0.3, 1.1], [1.4, 0.2], [-0.6, 0.9], [2.2, 1.7], [0.8, -0.4], [1.9, 0.6]];
    let mut text = String::from(".imp,x,y\n");
    for l in 1..=3 {
        for r in rows {
            text += &format!("{l},{},{}\n", r[0], r[1]);
        }
    }
    let data = write(&dir, "same.csv", &text);
    let out = json(&milrt(&["test", "--data", &data, "--null", "zero-mean", "--method", "L-4", "--format", "json"]));
    let r = &out["results"][0];
    assert!(r["r_hat"]["r_hat"].as_f64().unwrap().abs() < 1e-12);

    // Complete-data LRT for a zero mean: n log(det S0 / det S1).
    let n = rows.len() as f64;
    let mean = [rows.iter().map(|r| r[0]).sum::<f64>() / n, rows.iter().map(|r| r[1]).sum::<f64>() / n];
    let det = |c: [f64; 2]| {
        let s = |a: usize, b: usize| rows.iter().map(|r| (r[a] - c[a]) * (r[b] - c[b])).sum::<f64>() / n;
        s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1)
    };
    let lrt = n * (det([0.0, 0.0]) / det(mean)).ln();
    let d = r["statistic"].as_f64().unwrap();
    assert!((d - lrt / 2.0).abs() < 1e-9 * lrt, "D = {d}, lrt / k = {}", lrt / 2.0);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "bad.csv", ".imp,x\n1,0.5\n1,oops\n");
    let o = milrt(&["test", "--data", &data]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_method_is_an_input_error() {
    let data = repo("data/care_survival.csv").display().to_string();
    let o = milrt(&["test", "--data", &data, "--model", "table", "--method", "L-9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn proposed_df_for_w2_is_unsupported() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "in.csv", &incomplete_rows());
    let imp = dir.path().join("imp.csv").display().to_string();
    assert!(milrt(&["impute", "--data", &data, "--m", "4", "--out", &imp]).status.success());
    let o = milrt(&["test", "--data", &imp, "--method", "W-2", "--df", "proposed"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn impute_rejects_a_non_block_pattern() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "mixed.csv", "x,y\n1,NA\nNA,2\n3,4\n5,6\n");
    let out = dir.path().join("o.csv").display().to_string();
    let o = milrt(&["impute", "--data", &data, "--m", "3", "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!Path::new(&out).exists());
}

#[test]
fn impute_is_deterministic_and_keeps_observed_values() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "in.csv", &incomplete_rows());
    let a = dir.path().join("a.csv").display().to_string();
    let b = dir.path().join("b.csv").display().to_string();
    for out in [&a, &b] {
        assert!(milrt(&["impute", "--data", &data, "--m", "5", "--seed", "9", "--out", out]).status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let c = dir.path().join("c.csv").display().to_string();
    assert!(milrt(&["impute", "--data", &data, "--m", "5", "--seed", "10", "--out", &c]).status.success());
    assert_ne!(std::fs::read(&c).unwrap(), ta);

    let text = String::from_utf8(ta).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 40 * 6);
    let rows = incomplete_rows();
    let src: Vec<&str> = rows.lines().skip(1).collect();
    for l in 1..=5 {
        for i in 0..30 {
            let row = lines[1 + 40 * l + i];
            let values = row.split_once(',').unwrap().1;
            let (x, y) = values.split_once(',').unwrap();
            let (sx, sy) = src[i].split_once(',').unwrap();
            assert_eq!(x.parse::<f64>().unwrap(), sx.parse::<f64>().unwrap());
            assert_eq!(y.parse::<f64>().unwrap(), sy.parse::<f64>().unwrap());
        }
    }
}

#[test]
fn fully_observed_input_gives_identical_blocks() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "full.csv", "x,y\n1,2\n3,5\n4,4\n6,1\n");
    let out = dir.path().join("o.csv").display().to_string();
    assert!(milrt(&["impute", "--data", &data, "--m", "3", "--out", &out]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let blocks: Vec<Vec<&str>> = (0..=3)
        .map(|l| text.lines().skip(1).filter_map(|r| r.strip_prefix(&format!("{l},"))).collect())
        .collect();
    assert_eq!(blocks[1].len(), 4);
    assert_eq!(blocks[1], blocks[2]);
    assert_eq!(blocks[2], blocks[3]);
}

#[test]
fn impute_then_test() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "in.csv", &incomplete_rows());
    let imp = dir.path().join("imp.csv").display().to_string();
    assert!(milrt(&["impute", "--data", &data, "--m", "6", "--out", &imp]).status.success());
    let out = json(&milrt(&["test", "--data", &imp, "--method", "L-3,L-4,L-5,W-1", "--format", "json"]));
    assert_eq!(out["m"], 6);
    for r in out["results"].as_array().unwrap() {
        let p = r["p_value"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn dirichlet_imputation_round_trips_through_test() {
    let dir = TempDir::new().unwrap();
    let data = repo("data/care_survival.csv").display().to_string();
    let imp = dir.path().join("tables.csv").display().to_string();
    assert!(milrt(&["impute", "--data", &data, "--imputer", "dirichlet", "--m", "20", "--out", &imp]).status.success());
    let out = json(&milrt(&["test", "--data", &imp, "--model", "table", "--format", "json"]));
    assert_eq!(out["m"], 20);
    assert!(out["imputed"].is_null());
    assert!(out["results"][0]["p_value"].as_f64().unwrap() < 1e-6);
}

#[test]
fn simulation_output_does_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "size.json",
        r#"{"seed": 2, "replicates": 40, "study": {"experiment": "size", "n": [60], "m": [3], "f": [0.2, 0.4], "methods": ["L-5", "W-1"], "params": ["i", "iii"]}}"#,
    );
    let csv: Vec<Vec<u8>> = ["1", "8"]
        .iter()
        .map(|t| {
            let out = dir.path().join(format!("t{t}"));
            let o = milrt(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", t]);
            assert!(o.status.success(), "{}", stderr(&o));
            let manifest: Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
            assert_eq!(manifest["seed"], 2);
            std::fs::read(out.join("size.csv")).unwrap()
        })
        .collect();
    assert_eq!(csv[0], csv[1]);
}

#[test]
fn empty_grid_is_reported_by_pointer() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.json",
        r#"{"seed": 1, "replicates": 10, "study": {"experiment": "nulldist", "m": [3], "k": [], "tau": [1], "f_m": [0.1], "alpha": [0.05]}}"#,
    );
    let o = milrt(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/study/k"), "{}", stderr(&o));
}

#[test]
fn bundled_nulldist_grid() {
    let dir = TempDir::new().unwrap();
    let o = milrt(&["nulldist", "--draws", "256", "--out", dir.path().to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("nulldist_fig1.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.split(',').any(|c| c == "f_m"));
    assert!(text.contains(",alpha_hat,") && text.contains(",alpha_tilde,"));
    // 3 m × 4 k × 3 τ × 10 f_m × 2 α × 2 metrics.
    assert_eq!(text.lines().count() - 1, 1440);
    assert!(dir.path().join("charts/nulldist_alpha_hat.svg").exists());
}

#[test]
fn nulldist_refuses_other_studies() {
    let o = milrt(&["nulldist", "--config", repo("configs/size.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

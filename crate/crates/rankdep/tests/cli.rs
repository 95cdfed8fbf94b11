use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rankdep::io::{read_power_csv, read_table};
use rankdep_core::stats::StatisticId;

fn rankdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankdep"))
        .args(args)
        .env_remove("RANKDEP_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn comonotone_csv(n: usize) -> String {
    let mut s = String::from("x,y\n");
    for i in 0..n {
        s += &format!("{},{}\n", i, (i * i) as f64 + 0.5);
    }
    s
}

#[test]
fn t1_table_for_n30() {
    let out = rankdep(&["quantiles", "--stat", "T1", "--n", "30", "--iters", "100000", "--seed", "42"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table: rankdep_core::mc::QuantileTable = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table.values, vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
    assert_eq!((table.statistic, table.n, table.iterations, table.seed), (StatisticId::T1, 30, 100_000, 42));
}

#[test]
fn comonotone_sample_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t1.json");
    let table = table.to_str().unwrap();
    let q = rankdep(&["quantiles", "--stat", "T1", "--n", "30", "--iters", "2000", "--out", table]);
    assert_eq!(code(&q), 0);
    let input = write(dir.path(), "data.csv", &comonotone_csv(30));
    let out = rankdep(&["test", "--stat", "T1", "--input", &input, "--table", table, "--alpha", "0.05"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reject"], true);
    assert_eq!(v["value"], 30.0);
}

#[test]
fn pearson_test_needs_no_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.csv", "1,2\n2,1\n3,4\n4,3\n5,5\n");
    let out = rankdep(&["test", "--stat", "Tp", "--input", &input]);
    assert!(matches!(code(&out), 0 | 3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["statistic"], "Tp");
    assert_eq!(v["reject"], code(&out) == 3);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.csv", &comonotone_csv(10));
    for args in [
        vec!["quantiles", "--stat", "T9", "--n", "30"],
        vec!["quantiles", "--stat", "T1", "--n", "30", "--iters", "10"],
        vec!["quantiles", "--stat", "T1", "--n", "30", "--probs", "0.5,0.2"],
        vec!["quantiles", "--stat", "T2", "--n", "8"],
        vec!["power", "--stat", "T1", "--alt", "normal", "--r", "0:0.5:2", "--n", "30"],
        vec!["power", "--stat", "T1", "--alt", "cauchy", "--r", "0", "--n", "30"],
        vec!["test", "--stat", "T3", "--input", &input],
        vec!["test", "--stat", "Tp", "--input", &input, "--alpha", "1.5"],
        vec!["frobnicate"],
    ] {
        let out = rankdep(&args);
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&rankdep(&["--help"])), 0);
    assert_eq!(code(&rankdep(&["--version"])), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "1,abc\n");
    let out = rankdep(&["test", "--stat", "Tp", "--input", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let table = dir.path().join("t.json");
    rankdep(&["quantiles", "--stat", "T1", "--n", "20", "--iters", "200", "--out", table.to_str().unwrap()]);
    let input = write(dir.path(), "d.csv", &comonotone_csv(30));
    let out = rankdep(&["test", "--stat", "T1", "--input", &input, "--table", table.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "table for n=20 used on n=30");

    let ties = write(dir.path(), "ties.csv", "1,1\n1,2\n3,4\n");
    assert_eq!(code(&rankdep(&["copula", "--input", &ties, "--measures"])), 2);
    assert_eq!(code(&rankdep(&["copula", "--input", &ties, "--measures", "--ties", "random"])), 0);
}

#[test]
fn power_csv_is_sorted_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("p.csv");
    let out = rankdep(&[
        "power", "--stat", "SpearmanRho,Tp", "--alt", "normal", "--r", "-1:0.5:1", "--n", "20", "--iters", "300",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_power_csv(fs::File::open(&out_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.windows(2).all(|w| w[0].r <= w[1].r));
    for row in rows.iter().filter(|r| r.r.abs() == 1.0) {
        assert_eq!(row.power, 1.0, "{row:?}");
    }
    assert!(fs::read_to_string(&out_path).unwrap().starts_with("statistic,n,r,alpha,iterations,seed,power\n"));
}

#[test]
fn seed_flag_overrides_environment() {
    let args = ["quantiles", "--stat", "T3", "--n", "20", "--iters", "200"];
    let run_env = |seed: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_rankdep"))
            .args(args)
            .args(extra)
            .env("RANKDEP_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run_env("7", &[]), run_env("999", &["--seed", "7"]));
    assert_ne!(run_env("7", &[]), run_env("8", &[]));
    let default = rankdep(&args).stdout;
    assert_eq!(default, run_env("1", &["--seed", "42"]));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let q = |w: &str| rankdep(&["quantiles", "--stat", "T5", "--n", "40", "--iters", "1000", "--workers", w]).stdout;
    assert_eq!(q("1"), q("4"));
    let p = |w: &str| {
        rankdep(&["power", "--stat", "T4", "--alt", "rwalk", "--r", "0,0.5", "--n", "30", "--iters", "500", "--workers", w])
            .stdout
    };
    assert_eq!(p("1"), p("3"));
}

#[test]
fn copula_grid_and_measures() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.csv", "1,5\n2,3\n3,9\n");
    let grid = dir.path().join("g.csv");
    let out = rankdep(&["copula", "--input", &input, "--out", grid.to_str().unwrap(), "--measures"]);
    assert_eq!(code(&out), 0);
    let m: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((m["spearman_rho"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((m["gini_g"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let text = fs::read_to_string(grid).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,j,u,v,C");
    assert_eq!(lines.len(), 1 + 16);
    assert_eq!(*lines.last().unwrap(), "3,3,1,1,1");
}

#[test]
fn cg_estimate_with_jackknife() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cr.csv", "time,delta\n1,1\n2,0\n3,1\n4,1\n5,0\n");
    let out = rankdep(&["cg-estimate", "--input", &input, "--copula", "clayton:2.0", "--jackknife"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,F_hat,G_hat,var_F");
    assert_eq!(lines.len(), 6);
    let plain = rankdep(&["cg-estimate", "--input", &input]);
    assert!(String::from_utf8(plain.stdout).unwrap().starts_with("t,F_hat,G_hat\n"));
    assert_eq!(code(&rankdep(&["cg-estimate", "--input", &input, "--copula", "frechet-upper"])), 2);
    assert_eq!(code(&rankdep(&["cg-estimate", "--input", &input, "--copula", "clayton:-2"])), 1);
}

#[test]
fn table_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    rankdep(&["quantiles", "--stat", "T4", "--n", "25", "--iters", "500", "--out", path.to_str().unwrap()]);
    let t = read_table(&path).unwrap();
    let again = rankdep_core::mc::QuantileTable { ..t.clone() };
    rankdep::io::write_table(&path, &again).unwrap();
    assert_eq!(read_table(&path).unwrap(), t);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mopvrp_core::instances::{gen_realistic, ScenarioSpec};
use mopvrp_core::io::write_instance;
use mopvrp_core::oracle::parse_lp;
use tempfile::TempDir;

fn mopvrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mopvrp")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mopvrp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Realistic instance with `n` customers written to `dir`.
fn instance_file(dir: &TempDir, n: usize, seed: u64) -> PathBuf {
    let spec = ScenarioSpec {
        scenario: "M_T".parse().unwrap(),
        n,
        seed,
    };
    let mut inst = gen_realistic(&spec, 2).unwrap();
    inst.num_vehicles = inst.num_vehicles.clamp(2, 3);
    let path = dir.path().join(format!("inst_{n}_{seed}.json"));
    fs::write(&path, write_instance(&inst)).unwrap();
    path
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn solve_writes_one_row_per_run_and_their_mean() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 12, 1);
    let out = dir.path().join("runs.csv");
    ok(&["solve", "--instance", p(&inst), "--variant", "mop", "--runs", "10", "--iterations", "200", "--seed", "7", "--out-csv", p(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("instance,variant,seed,travel,delay,objective,vehicles\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 11);
    for (k, r) in rows[..10].iter().enumerate() {
        assert_eq!(r[2], (7 + k).to_string());
    }
    let mean = &rows[10];
    assert_eq!(mean[2], "mean");
    for col in 3..7 {
        let avg = rows[..10].iter().map(|r| r[col].parse::<f64>().unwrap()).sum::<f64>() / 10.0;
        let got: f64 = mean[col].parse().unwrap();
        assert!((got - avg).abs() <= 1e-9 * (1.0 + avg.abs()));
    }
}

#[test]
fn solve_output_does_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 10, 2);
    let args = ["solve", "--instance", p(&inst), "--variant", "cp", "--runs", "4", "--iterations", "150", "--seed", "3"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_mopvrp"))
            .args(args)
            .env("MOPVRP_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("4"));
}

#[test]
fn timing_adds_a_column() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 6, 3);
    let text = ok(&["solve", "--instance", p(&inst), "--variant", "mop", "--iterations", "20", "--timing"]);
    assert!(text.lines().next().unwrap().ends_with(",wall_seconds"));
    assert!(rows(&text).iter().all(|r| r.len() == 8));
}

#[test]
fn oracle_grades_solutions() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 5, 4);
    for variant in ["mop", "cp"] {
        let opt = dir.path().join(format!("opt_{variant}.json"));
        ok(&["oracle", "--instance", p(&inst), "--variant", variant, "--out-solution", p(&opt)]);
        let text = ok(&["oracle", "--instance", p(&inst), "--variant", variant, "--compare-solution", p(&opt)]);
        let r = &rows(&text)[0];
        assert_eq!(r[4], "true");
        assert_eq!(r[5].parse::<f64>().unwrap(), 0.0);

        let heur = dir.path().join(format!("heur_{variant}.json"));
        ok(&["solve", "--instance", p(&inst), "--variant", variant, "--iterations", "50", "--out-solution", p(&heur)]);
        let text = ok(&["oracle", "--instance", p(&inst), "--variant", variant, "--compare-solution", p(&heur)]);
        let r = &rows(&text)[0];
        assert!(r[5].parse::<f64>().unwrap() >= -1e-9);
    }
    let opt = dir.path().join("opt_mop.json");
    let out = mopvrp(&["oracle", "--instance", p(&inst), "--variant", "cp", "--compare-solution", p(&opt)]);
    assert!(!out.status.success());
}

#[test]
fn oracle_size_guard_is_reported() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 12, 5);
    let out = mopvrp(&["oracle", "--instance", p(&inst), "--variant", "mop"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("too large"), "{err}");
}

#[test]
fn generators_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        ok(&["gen-realistic", "--scenario", "S_W", "--n", "99", "--seed", "1", "--out", p(out)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let fleet: usize = ok(&["fleet-size", "--instance", p(&a)]).trim().parse().unwrap();
    assert!(fleet >= 1);

    let solomon = dir.path().join("tiny.txt");
    fs::write(
        &solomon,
        "TINY\n\nVEHICLE\nNUMBER CAPACITY\n 5 20\n\nCUSTOMER\nCUST NO. XCOORD. YCOORD. DEMAND READY TIME DUE DATE SERVICE TIME\n\n\
         0 0 0 0 0 500 0\n1 3 4 4 10 50 5\n2 0 8 6 0 90 5\n3 6 8 5 0 120 5\n",
    )
    .unwrap();
    for variant in ["mop", "cp"] {
        let x = dir.path().join(format!("x_{variant}.json"));
        let y = dir.path().join(format!("y_{variant}.json"));
        for out in [&x, &y] {
            ok(&["gen-benchmark", "--solomon", p(&solomon), "--mu", "5", "--machines", "2", "--variant", variant, "--out", p(out)]);
        }
        assert_eq!(fs::read(&x).unwrap(), fs::read(&y).unwrap());
    }
}

#[test]
fn exported_models_parse() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 2, 6);
    for variant in ["mop", "cp"] {
        let lp = dir.path().join(format!("{variant}.lp"));
        ok(&["export-mip", "--instance", p(&inst), "--variant", variant, "--out", p(&lp)]);
        let model = parse_lp(&fs::read_to_string(&lp).unwrap()).unwrap();
        assert!(!model.rows.is_empty());
    }
}

#[test]
fn cost_reproduces_the_reference_row() {
    let text = ok(&["cost", "--travel", "319.9", "--vehicles", "5", "--fleet", "6", "--customers", "99"]);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row = &rows(&text)[0];
    let get = |name: &str| row[header.iter().position(|h| *h == name).unwrap()].parse::<f64>().unwrap();
    assert!((get("cost_per_order") - 16.3).abs() <= 0.1);
    assert_eq!(get("orders_per_year"), 24_750.0);
    assert_eq!(get("machines_to_buy"), 6.0);
}

#[test]
fn cost_reads_solve_tables() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("runs.csv");
    fs::write(
        &csv,
        "instance,variant,seed,travel,delay,objective,vehicles\na,mop,0,300,1,301,4\na,mop,1,340,1,341,6\na,mop,mean,320,1,321,5\n",
    )
    .unwrap();
    let text = ok(&["cost", "--from-csv", p(&csv), "--machines", "2", "--customers", "99"]);
    let direct = ok(&["cost", "--travel", "320", "--vehicles", "5", "--fleet", "6", "--printers", "12", "--customers", "99"]);
    assert_eq!(text, direct);
    let table = dir.path().join("table.json");
    fs::write(&table, "{\"fuel_price\": 0.0}").unwrap();
    assert!(!mopvrp(&["cost", "--table", p(&table), "--travel", "1", "--vehicles", "1", "--customers", "1"]).status.success());
}

#[test]
fn bad_inputs_fail_without_touching_files() {
    let dir = TempDir::new().unwrap();
    let inst = instance_file(&dir, 5, 7);
    let before = fs::read(&inst).unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, "{\"removal_range\": [0.5, 0.2]}").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--instance", "/nonexistent.json", "--variant", "mop"],
        vec!["solve", "--instance", p(&inst), "--variant", "xyz"],
        vec!["solve", "--instance", p(&inst), "--variant", "mop", "--config", p(&config)],
        vec!["solve", "--instance", p(&inst), "--variant", "mop", "--runs", "0"],
        vec!["gen-realistic", "--scenario", "Q_W", "--n", "5", "--seed", "1", "--out", "/tmp/x.json"],
        vec!["cost", "--customers", "5"],
    ];
    for args in cases {
        let out = mopvrp(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    ok(&["solve", "--instance", p(&inst), "--variant", "cp", "--iterations", "30"]);
    ok(&["oracle", "--instance", p(&inst), "--variant", "cp"]);
    assert_eq!(fs::read(&inst).unwrap(), before);
}

use std::fs;
use std::process::{Command, Output};

use clap::Parser as _;
use qpersist::cli::{execute, Cli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn qpersist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpersist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn run(args: &[&str]) -> Result<String, u8> {
    let mut full = vec!["qpersist"];
    full.extend_from_slice(args);
    let cli = Cli::try_parse_from(full).map_err(|_| 2u8)?;
    execute(&cli.command).map_err(|e| e.exit_code())
}

#[test]
fn betti_two_squares() {
    let out = qpersist(&["betti", "--two-squares", "--k", "1", "--eps", "1.2", "--eps2", "1.8"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0\n");
    let out = qpersist(&["betti", "--two-squares", "--k", "1", "--eps", "1.2"]);
    assert_eq!(stdout(&out), "1\n");
    let out = qpersist(&["betti", "--two-squares", "--variant", "projected", "--eps", "1.8"]);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn betti_grid_json() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = qpersist(&["betti", "--two-squares", "--scales", "1.2,1.8", "--out", out_dir]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1 1 1\n1 2 0\n2 2 1\n");
    let json = fs::read_to_string(dir.path().join("betti.json")).unwrap();
    assert_eq!(json.trim(), r#"{"k":1,"scales":[1.2,1.8],"betti":{"1,1":1,"1,2":0,"2,2":1}}"#);
}

#[test]
fn empty_input_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    fs::write(&path, "").unwrap();
    let out = qpersist(&["betti", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no points"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qpersist(&["betti"]).status.code(), Some(2));
    assert_eq!(qpersist(&["simulate", "--two-squares", "--eps", "1.2", "--M", "12"]).status.code(), Some(2));
    assert_eq!(qpersist(&["simulate", "--two-squares", "--eps", "1.8", "--eps2", "1.2"]).status.code(), Some(2));
    assert_eq!(qpersist(&["simulate", "--two-squares", "--eps", "1.2", "--xi", "0"]).status.code(), Some(2));
    assert_eq!(qpersist(&["simulate", "--two-squares", "--eps", "1.2", "--evolution", "fast"]).status.code(), Some(2));
}

#[test]
fn cap_breach_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qpersist"))
        .args(["simulate", "--two-squares", "--eps", "1.2", "--out", dir.path().to_str().unwrap()])
        .env("QPERSIST_MAX_DIM", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap"));
}

#[test]
fn simulate_writes_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = qpersist(&["simulate", "--two-squares", "--eps", "1.2", "--drop-isolated", "--out", d, "--svg"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("N = 8\n"));
    assert!(text.contains("P(3) = 0.128233278560\n"));
    assert!(text.ends_with("beta = 1\n"));
    let csv = fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
    assert!(csv.starts_with("p,probability\n"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("distribution.json")).unwrap()).unwrap();
    assert_eq!(json["N"], 8);
    assert_eq!(json["M"], 16);
    assert_eq!(json["P"].as_array().unwrap().len(), 16);
    assert!(dir.path().join("distribution.svg").exists());

    let out = qpersist(&["simulate", "--two-squares", "--eps", "1.2", "--eps2", "1.8", "--drop-isolated", "--out", d]);
    assert!(stdout(&out).ends_with("beta = 0\n"));
}

#[test]
fn format_selects_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    qpersist(&["simulate", "--two-squares", "--eps", "1.2", "--format", "csv", "--out", d]);
    assert!(dir.path().join("distribution.csv").exists());
    assert!(!dir.path().join("distribution.json").exists());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = qpersist(&[
            "simulate", "--two-squares", "--eps", "1.2", "--shots", "1000", "--seed", "7",
            "--out", dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in ["counts.csv", "distribution.json", "distribution.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let counts = fs::read_to_string(a.path().join("counts.csv")).unwrap();
    let total: u64 = counts.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1000);
}

#[test]
fn spectrum_listings() {
    let out = qpersist(&["spectrum", "--two-squares", "--k", "1", "--eps", "1.8"]);
    assert_eq!(
        stdout(&out),
        "-2.2360679775 7\n-1.7320508076 2\n-1.0000000000 3\n1.0000000000 1\n1.7320508076 2\n2.2360679775 7\n"
    );
    let out = qpersist(&["spectrum", "--two-squares", "--eps", "1.2", "--operator", "laplacian"]);
    assert_eq!(stdout(&out), "0.0000000000 1\n2.0000000000 2\n4.0000000000 1\n");
}

#[test]
fn spectrum_of_isolated_points_is_one_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("far.csv");
    fs::write(&path, "0,0\n10,0\n20,0\n").unwrap();
    let out = qpersist(&["spectrum", "--input", path.to_str().unwrap(), "--k", "0", "--eps", "1", "--xi", "2"]);
    assert_eq!(stdout(&out), "2.0000000000 3\n");
}

fn beta_line(text: &str) -> usize {
    text.lines().find_map(|l| l.strip_prefix("beta = ")).unwrap().parse().unwrap()
}

#[test]
fn classical_and_simulated_betti_agree() {
    for (a, b) in [("1.2", "1.2"), ("1.8", "1.8"), ("1.2", "1.8")] {
        let classical: usize = run(&["betti", "--two-squares", "--eps", a, "--eps2", b]).unwrap().trim().parse().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let sim = run(&[
            "simulate", "--two-squares", "--eps", a, "--eps2", b, "--variant", "chain",
            "--out", dir.path().to_str().unwrap(),
        ])
        .unwrap();
        assert_eq!(classical, beta_line(&sim), "({a},{b})");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut compared, mut skipped) = (0, 0);
    for _ in 0..30 {
        let n = rng.random_range(3..=6);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cloud.csv");
        let rows: Vec<String> = (0..n)
            .map(|_| format!("{},{}", rng.random_range(0.0..1.0f64), rng.random_range(0.0..1.0f64)))
            .collect();
        fs::write(&path, rows.join("\n")).unwrap();
        let input = path.to_str().unwrap();
        let k = rng.random_range(0..=1).to_string();
        let e1 = rng.random_range(0.2..1.0f64);
        let e2 = e1 + rng.random_range(0.0..0.4f64);
        let (e1, e2) = (e1.to_string(), e2.to_string());
        let classical: usize = run(&["betti", "--input", input, "--k", &k, "--eps", &e1, "--eps2", &e2])
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        let sim = run(&[
            "simulate", "--input", input, "--k", &k, "--eps", &e1, "--eps2", &e2, "--variant", "chain",
            "--l", "64", "--M", "1024", "--format", "json", "--out", dir.path().to_str().unwrap(),
        ]);
        match sim {
            Ok(text) => {
                assert_eq!(classical, beta_line(&text), "n={n} k={k} eps=({e1},{e2})");
                compared += 1;
            }
            Err(code) => {
                assert_eq!(code, 3);
                skipped += 1;
            }
        }
    }
    assert!(compared >= 25, "compared {compared}, skipped {skipped}");
}

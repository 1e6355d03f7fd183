use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ftspec(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftspec"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn psi(l: usize, tau: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let m = l.div_ceil(2) as f64;
    if l % 2 == 1 {
        2f64.sqrt() * (2.0 * PI * m * tau).cos()
    } else {
        2f64.sqrt() * (2.0 * PI * m * tau).sin()
    }
}

/// Deterministic pseudo-random coefficients without pulling in an RNG.
fn coeffs(t: usize, l: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..t)
        .map(|_| {
            (0..l)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect()
        })
        .collect()
}

fn write_series(dir: &Path, id: &str, rows: &[Vec<f64>]) -> PathBuf {
    let mut text = format!("{id},{},{}\n", rows.len(), rows[0].len());
    for r in rows {
        let cells: Vec<String> = r.iter().map(f64::to_string).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let path = dir.join(format!("{id}.csv"));
    fs::write(&path, text).unwrap();
    path
}

fn scaled(rows: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|v| v * c).collect()).collect()
}

fn read_matrix(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|line| line.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn gridded_csv(grid: &[f64], rows: &[(&str, usize, Vec<Option<f64>>)]) -> String {
    let head: Vec<String> = grid.iter().map(f64::to_string).collect();
    let mut text = format!("id,t,{}\n", head.join(","));
    for (id, t, values) in rows {
        let cells: Vec<String> = values
            .iter()
            .map(|v| v.map_or_else(|| "NA".to_string(), |v| v.to_string()))
            .collect();
        text.push_str(&format!("{id},{t},{}\n", cells.join(",")));
    }
    text
}

#[test]
fn ingest_recovers_known_coefficients() {
    let dir = TempDir::new().unwrap();
    let grid: Vec<f64> = (0..64).map(|i| i as f64 / 64.0).collect();
    let truth = coeffs(6, 5, 1);
    let rows: Vec<_> = truth
        .iter()
        .enumerate()
        .map(|(t, c)| {
            let values = grid
                .iter()
                .map(|&tau| Some((0..5).map(|l| c[l] * psi(l, tau)).sum::<f64>()))
                .collect();
            ("curve", t, values)
        })
        .collect();
    fs::write(dir.path().join("grid.csv"), gridded_csv(&grid, &rows)).unwrap();
    ok(&ftspec(&["ingest", "--input", "grid.csv", "--l", "5", "--out", "fit"], dir.path()));

    let text = fs::read_to_string(dir.path().join("fit/curve.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,6,5"));
    for (line, expect) in lines.zip(&truth) {
        let got: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-6, "{g} vs {e}");
        }
    }
    assert!(dir.path().join("fit/run_config.json").exists());
}

#[test]
fn ingest_skips_rows_over_missing_cap() {
    let dir = TempDir::new().unwrap();
    let grid: Vec<f64> = (0..50).map(|i| i as f64 / 50.0).collect();
    let full: Vec<Option<f64>> = grid.iter().map(|&tau| Some(1.0 + psi(1, tau))).collect();
    let mut sparse = full.clone();
    for v in sparse.iter_mut().take(6) {
        *v = None;
    }
    let rows = vec![("s", 0, full.clone()), ("s", 1, sparse), ("s", 2, full)];
    fs::write(dir.path().join("grid.csv"), gridded_csv(&grid, &rows)).unwrap();
    let out = ftspec(&["ingest", "--input", "grid.csv", "--l", "3", "--out", "fit"], dir.path());
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let report = json(dir.path().join("fit/ingest_report.json"));
    assert_eq!(report[0]["T"], 2);
    assert_eq!(report[0]["skipped"][0]["t"], "1");
}

#[test]
fn malformed_input_reports_line() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("grid.csv"), "id,t,0,0.5\na,0,1.0,2.0\na,1,abc,2.0\n").unwrap();
    let out = ftspec(&["ingest", "--input", "grid.csv", "--l", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    fs::write(dir.path().join("bad.csv"), "x,4,2\n1,2\n3,4\n").unwrap();
    let out = ftspec(&["similarity", "bad.csv", "bad.csv", "--m", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn similarity_of_copies_and_scaled_copy() {
    let dir = TempDir::new().unwrap();
    let x = coeffs(64, 4, 3);
    for id in ["a", "b", "c"] {
        write_series(dir.path(), id, &x);
    }
    ok(&ftspec(&["similarity", "a.csv", "b.csv", "c.csv", "--m", "4", "--out", "copies"], dir.path()));
    let m = read_matrix(&dir.path().join("copies/similarity.csv"));
    assert!(m.iter().flatten().all(|&v| v == 0.0));

    write_series(dir.path(), "double", &scaled(&x, 2.0));
    ok(&ftspec(&["similarity", "a.csv", "double.csv", "--m", "4", "--out", "pair"], dir.path()));
    let m = read_matrix(&dir.path().join("pair/similarity.csv"));
    assert!((m[0][1] - 9.0 / 17.0).abs() < 1e-12);
    let w = read_matrix(&dir.path().join("pair/adjacency.csv"));
    assert!((w[0][1] - (-9.0f64 / 17.0).exp()).abs() < 1e-12);
}

#[test]
fn simulated_setting_shows_block_structure() {
    let dir = TempDir::new().unwrap();
    ok(&ftspec(
        &["simulate", "--setting", "1", "--n", "4", "--t", "256", "--seed", "3", "--out", "data"],
        dir.path(),
    ));
    let out = ftspec(
        &["similarity", "data", "--labels", "data/labels.json", "--out", "sim"],
        dir.path(),
    );
    ok(&out);
    let env = json(dir.path().join("sim/similarity.json"));
    assert_eq!(env["M"], 8);
    assert_eq!(env["N"], 32);
    let labels = json(dir.path().join("data/labels.json"));
    let ids: Vec<&str> = env["ids"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let label_of = |id: &str| {
        let pos = labels["ids"].as_array().unwrap().iter().position(|v| v == id).unwrap();
        labels["labels"][pos].as_u64().unwrap()
    };
    let (mut within, mut between) = (Vec::new(), Vec::new());
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            let v = env["values"][i][j].as_f64().unwrap();
            if label_of(ids[i]) == label_of(ids[j]) {
                within.push(v);
            } else {
                between.push(v);
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&within) < mean(&between));
    assert!(dir.path().join("sim/similarity_ordered.csv").exists());
}

fn ideal_matrix(dir: &Path) -> PathBuf {
    let labels = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    let ids: Vec<String> = (0..9).map(|i| format!("s{i}")).collect();
    let mut text = format!("id,{}\n", ids.join(","));
    for i in 0..9 {
        let row: Vec<String> = (0..9)
            .map(|j| if i == j { "0" } else if labels[i] == labels[j] { "0.05" } else { "0.9" }.to_string())
            .collect();
        text.push_str(&format!("{},{}\n", ids[i], row.join(",")));
    }
    let path = dir.join("ideal.csv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn cluster_recovers_blocks() {
    let dir = TempDir::new().unwrap();
    ideal_matrix(dir.path());
    ok(&ftspec(&["cluster", "--input", "ideal.csv", "--k", "3", "--embedding", "--out", "k3"], dir.path()));
    let report = json(dir.path().join("k3/cluster_report.json"));
    let labels: Vec<u64> = report["labels"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    for block in labels.chunks(3) {
        assert!(block.iter().all(|&l| l == block[0]));
    }
    assert_ne!(labels[0], labels[3]);
    assert_ne!(labels[3], labels[6]);
    assert_ne!(labels[0], labels[6]);
    assert!(dir.path().join("k3/embedding.csv").exists());

    ok(&ftspec(&["cluster", "--input", "ideal.csv", "--k", "9", "--out", "k9"], dir.path()));
    let report = json(dir.path().join("k9/cluster_report.json"));
    assert!(report["inertia"].as_f64().unwrap().abs() < 1e-20);

    ok(&ftspec(&["cluster", "--input", "ideal.csv", "--method", "ch", "--out", "ch"], dir.path()));
    assert_eq!(json(dir.path().join("ch/cluster_report.json"))["k"], 3);
}

#[test]
fn select_k_reports_every_method() {
    let dir = TempDir::new().unwrap();
    ideal_matrix(dir.path());
    ok(&ftspec(&["select-k", "--input", "ideal.csv", "--k-max", "5", "--out", "sel"], dir.path()));
    let text = fs::read_to_string(dir.path().join("sel/select_k.json")).unwrap();
    for method in ["relgap", "sd1gap", "ch", "silhouette"] {
        assert!(text.contains(method), "missing {method}");
    }
}

#[test]
fn equality_test_of_identical_series() {
    let dir = TempDir::new().unwrap();
    let x = coeffs(64, 3, 9);
    write_series(dir.path(), "x", &x);
    write_series(dir.path(), "y", &x);
    ok(&ftspec(&["test", "x.csv", "y.csv", "--m", "4", "--p-values", "--out", "t"], dir.path()));
    let report = json(dir.path().join("t/test_report.json"));
    assert_eq!(report[0]["statistic"], 0.0);
    assert_eq!(report[0]["p_value"], 0.5);
    assert_eq!(report[0]["reject"], false);
    let p = read_matrix(&dir.path().join("t/p_values.csv"));
    assert_eq!(p, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);

    for alpha in ["0", "1", "1.5"] {
        let out = ftspec(&["test", "x.csv", "y.csv", "--m", "4", "--alpha", alpha], dir.path());
        assert_eq!(out.status.code(), Some(1), "alpha {alpha}");
    }
}

#[test]
fn all_zero_pair_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let zeros = vec![vec![0.0; 3]; 32];
    write_series(dir.path(), "z1", &zeros);
    write_series(dir.path(), "z2", &zeros);
    let out = ftspec(&["similarity", "z1.csv", "z2.csv", "--m", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = ftspec(&["test", "z1.csv", "z2.csv", "--m", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coefficient_files_round_trip_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    ok(&ftspec(&["simulate", "--model", "II", "--n", "2", "--t", "64", "--seed", "5", "--out", "a"], dir.path()));
    let series = ftspec_cli::formats::read_coefficients(&dir.path().join("a/II_1.csv")).unwrap();
    let again = ftspec_cli::formats::coefficient_csv(&series);
    assert_eq!(again, fs::read_to_string(dir.path().join("a/II_1.csv")).unwrap());
}

#[test]
fn config_file_is_merged_and_emitted() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"command": "simulate", "setting": 2, "n": 3, "t": 128, "seed": 11}"#,
    )
    .unwrap();
    ok(&ftspec(&["simulate", "--config", "cfg.json", "--n", "2", "--out", "run"], dir.path()));
    let cfg = json(dir.path().join("run/run_config.json"));
    assert_eq!(cfg["command"], "simulate");
    assert_eq!(cfg["setting"], 2);
    assert_eq!(cfg["n"], 2);
    assert_eq!(cfg["t"], 128);
    assert_eq!(cfg["seed"], 11);
    assert_eq!(json(dir.path().join("run/labels.json"))["ids"].as_array().unwrap().len(), 2 * 3);

    // The emitted record replays to identical output.
    ok(&ftspec(&["simulate", "--config", "run/run_config.json", "--out", "replay"], dir.path()));
    for name in ["labels.json", "I_1.csv", "II_3.csv"] {
        let a = fs::read(dir.path().join("run").join(name)).ok();
        let b = fs::read(dir.path().join("replay").join(name)).ok();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    for out in ["one", "two"] {
        ok(&ftspec(&["simulate", "--setting", "3", "--n", "3", "--t", "128", "--seed", "8", "--out", out], dir.path()));
        let sim = format!("{out}/sim");
        ok(&ftspec(&["similarity", out, "--out", &sim], dir.path()));
        let input = format!("{sim}/similarity.csv");
        ok(&ftspec(&["cluster", "--input", &input, "--k", "3", "--seed", "4", "--out", &sim], dir.path()));
    }
    for name in ["similarity.csv", "cluster_report.json"] {
        let a = fs::read(dir.path().join("one/sim").join(name)).unwrap();
        let b = fs::read(dir.path().join("two/sim").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn small_bench_writes_tables() {
    let dir = TempDir::new().unwrap();
    ok(&ftspec(
        &[
            "bench", "--setting", "1", "--n", "3", "--t", "128", "--replications", "2", "--tests", "--out", "b",
        ],
        dir.path(),
    ));
    for name in ["bench_k.csv", "bench_misclustering.csv", "bench_tests.csv", "run_config.json"] {
        assert!(dir.path().join("b").join(name).exists(), "{name}");
    }
}

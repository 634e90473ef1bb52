//! End-to-end tests of the command-line interface: output formats, exit
//! codes and the signal file round trip.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::Lcg;
use num_complex::Complex64;

const BIN: &str = env!("CARGO_BIN_EXE_fractal-fft");

fn work_dir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fractal-fft-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn dyadic_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "dyadic.json",
        r#"{"dim":1,"K":2,"a_inverse":[[2]],"b":[[0],[1]],"c":[[0],[1]],"m1_class":"hadamard"}"#,
    )
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_signal_file(path: &Path, samples: &[Complex64]) {
    let mut text = String::new();
    for z in samples {
        text.push_str(&format!("{:.16e},{:.16e}\n", z.re, z.im));
    }
    fs::write(path, text).unwrap();
}

fn read_signal_file(path: &Path) -> Vec<Complex64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|line| {
            let (re, im) = line.split_once(',').unwrap();
            Complex64::new(re.parse().unwrap(), im.parse().unwrap())
        })
        .collect()
}

#[test]
fn points_dyadic_spatial_reverse() {
    let dir = work_dir("points");
    let config = dyadic_config(&dir);
    let out = run(&[
        "points",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "2",
        "--kind",
        "spatial",
        "--ordering",
        "reverse",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let coords: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(2).unwrap())
        .collect();
    assert_eq!(coords, vec!["0", "1/4", "1/2", "3/4"]);
}

#[test]
fn points_dyadic_frequency_obverse() {
    let dir = work_dir("points-freq");
    let config = dyadic_config(&dir);
    let out = run(&[
        "points",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "2",
        "--kind",
        "frequency",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let coords: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(2).unwrap())
        .collect();
    assert_eq!(coords, vec!["0", "1", "2", "3"]);
}

#[test]
fn points_quarter_cantor_frequency() {
    let dir = work_dir("points-qc");
    let config = write_config(
        &dir,
        "qc.json",
        r#"{"dim":1,"K":2,"a_inverse":[[4]],"b":[[0],[2]],"c":[[0],[1]],"m1_class":"hadamard"}"#,
    );
    let out = run(&[
        "points",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "2",
        "--kind",
        "frequency",
    ]);
    assert!(out.status.success());
    let coords: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(2).unwrap().to_string())
        .collect();
    assert_eq!(coords, vec!["0", "1", "4", "5"]);
}

#[test]
fn forward_delta_gives_all_ones() {
    let dir = work_dir("delta");
    let config = dyadic_config(&dir);
    let signal = dir.join("delta.sig");
    let mut samples = vec![Complex64::new(0.0, 0.0); 4];
    samples[0] = Complex64::new(1.0, 0.0);
    write_signal_file(&signal, &samples);
    let out_path = dir.join("delta.out");
    let out = run(&[
        "forward",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "2",
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("operations:"));
    assert!(stdout(&out).contains("elapsed_ms:"));
    let result = read_signal_file(&out_path);
    for z in result {
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn forward_then_inverse_round_trips_1024_samples() {
    let dir = work_dir("roundtrip");
    let config = dyadic_config(&dir);
    let signal = dir.join("in.sig");
    let samples = Lcg(4242).vec(1024);
    write_signal_file(&signal, &samples);

    let mid = dir.join("mid.sig");
    let out = run(&[
        "forward",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "10",
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        mid.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let back = dir.join("back.sig");
    let out = run(&[
        "inverse",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "10",
        "--signal",
        mid.to_str().unwrap(),
        "--out",
        back.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let round = read_signal_file(&back);
    let worst = samples
        .iter()
        .zip(&round)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-8, "round-trip residual {worst:.3e}");
}

#[test]
fn forward_with_dense_oracle_flag() {
    let dir = work_dir("oracle");
    let config = dyadic_config(&dir);
    let signal = dir.join("in.sig");
    write_signal_file(&signal, &Lcg(7).vec(32));
    let out_path = dir.join("out.sig");
    let out = run(&[
        "forward",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "5",
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--oracle",
        "dense",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("oracle_max_deviation:"))
        .expect("oracle deviation reported");
    let value: f64 = line.split(':').nth(1).unwrap().trim().parse().unwrap();
    assert!(value < 1e-9);
}

#[test]
fn inverse_with_dense_oracle_flag() {
    let dir = work_dir("oracle-inv");
    let config = dyadic_config(&dir);
    let signal = dir.join("in.sig");
    write_signal_file(&signal, &Lcg(8).vec(16));
    let out_path = dir.join("out.sig");
    let out = run(&[
        "inverse",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "4",
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--oracle",
        "dense",
        "--ordering",
        "reverse",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("oracle_max_deviation:"));
}

#[test]
fn wrong_signal_length_is_validation_error() {
    let dir = work_dir("shape");
    let config = dyadic_config(&dir);
    let signal = dir.join("short.sig");
    write_signal_file(&signal, &Lcg(1).vec(3));
    let out = run(&[
        "forward",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "2",
        "--signal",
        signal.to_str().unwrap(),
        "--out",
        dir.join("x.sig").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("shape mismatch"));
}

#[test]
fn verify_passes_on_fixtures() {
    let dir = work_dir("verify");
    for (name, json) in [
        (
            "dyadic.json",
            r#"{"dim":1,"K":2,"a_inverse":[[2]],"b":[[0],[1]],"c":[[0],[1]],"m1_class":"hadamard"}"#,
        ),
        (
            "qc.json",
            r#"{"dim":1,"K":2,"a_inverse":[[4]],"b":[[0],[2]],"c":[[0],[1]],"m1_class":"hadamard"}"#,
        ),
    ] {
        let config = write_config(&dir, name, json);
        let out = run(&[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--level",
            "5",
        ]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains("PASS block identities"));
        assert!(text.contains("PASS round trip"));
        assert!(!text.contains("FAIL"));
    }
}

#[test]
fn verify_rejects_singular_seed_matrix() {
    let dir = work_dir("singular");
    // c_1 = 3 against A = 1/3, b_1 = 2: phase 3·(2/3) = 2 ≡ 0, so M1 is the
    // all-ones matrix.
    let config = write_config(
        &dir,
        "singular.json",
        r#"{"dim":1,"K":2,"a_inverse":[[3]],"b":[[0],[2]],"c":[[0],[3]],"m1_class":"invertible"}"#,
    );
    let out = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("M1 singular"));
}

#[test]
fn bench_emits_csv_with_closed_form_bounds() {
    let dir = work_dir("bench");
    let config = dyadic_config(&dir);
    let out = run(&[
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,measured,bound,ratio,dense_ops");
    let row2: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row2[0], "2");
    assert_eq!(row2[2], "28");
    let row3: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(row3[0], "3");
    assert_eq!(row3[2], "88");
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let measured: u64 = cols[1].parse().unwrap();
        let bound: u64 = cols[2].parse().unwrap();
        assert!(measured <= bound);
    }
}

#[test]
fn search_middle_third_invertible_and_hadamard() {
    let dir = work_dir("search");
    let config = write_config(
        &dir,
        "mt.json",
        r#"{"dim":1,"K":2,"a_inverse":[[3]],"b":[[0],[2]]}"#,
    );

    let out = run(&[
        "search",
        "--config",
        config.to_str().unwrap(),
        "--target",
        "invertible",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let found: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(found["c"], serde_json::json!([[0], [1]]));

    let out = run(&[
        "search",
        "--config",
        config.to_str().unwrap(),
        "--target",
        "hadamard",
        "--bound",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exhausted bound 50"));
}

#[test]
fn search_quarter_cantor_hadamard_writes_config() {
    let dir = work_dir("search-qc");
    let config = write_config(
        &dir,
        "qc.json",
        r#"{"dim":1,"K":2,"a_inverse":[[4]],"b":[[0],[2]]}"#,
    );
    let out_path = dir.join("found.json");
    let out = run(&[
        "search",
        "--config",
        config.to_str().unwrap(),
        "--target",
        "hadamard",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let found: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(found["c"], serde_json::json!([[0], [1]]));
    assert_eq!(found["m1_class"], "hadamard");

    // The emitted config is directly usable.
    let out = run(&[
        "verify",
        "--config",
        out_path.to_str().unwrap(),
        "--level",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn size_cap_exceeded_is_resource_error() {
    let dir = work_dir("cap");
    let config = dyadic_config(&dir);
    let out = run(&[
        "points",
        "--config",
        config.to_str().unwrap(),
        "--level",
        "21",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cap"));
}

#[test]
fn unknown_flags_and_commands_are_rejected() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["points", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("USAGE"));
}

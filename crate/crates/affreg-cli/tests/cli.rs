use std::path::Path;
use std::process::{Command, Output};

fn affreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affreg"))
        .args(args)
        .output()
        .expect("failed to launch affreg")
}

fn write_static(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("static.txt");
    let mut contents = String::from("# synthetic grid\n");
    for i in 0..5 {
        for j in 0..4 {
            contents.push_str(&format!("{}.5 {}.25\n", i * 7, j * 9));
        }
    }
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn distort_then_register_recovers_alignment() {
    let dir = tempfile::tempdir().unwrap();
    let static_path = write_static(dir.path());
    let deformed = dir.path().join("deformed.txt");
    let truth = dir.path().join("truth.txt");

    let out = affreg(&[
        "distort",
        "--input",
        static_path.to_str().unwrap(),
        "--scale",
        "1.1",
        "--rotation",
        "0.2",
        "--tx",
        "4.0",
        "--ty",
        "-3.0",
        "--out",
        deformed.to_str().unwrap(),
        "--truth-out",
        truth.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "distort failed: {out:?}");
    assert!(deformed.exists() && truth.exists());

    let reg_dir = dir.path().join("reg");
    let out = affreg(&[
        "register",
        "--static",
        static_path.to_str().unwrap(),
        "--deformed",
        deformed.to_str().unwrap(),
        "--pop-size",
        "20",
        "--generations",
        "80",
        "--seed",
        "3",
        "--out-dir",
        reg_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "register failed: {out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("final fitness"), "stdout: {stdout}");

    let transform = std::fs::read_to_string(reg_dir.join("transform.txt")).unwrap();
    let params: Vec<f64> = transform
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(params.len(), 6);
    assert!(reg_dir.join("warped.txt").exists());
}

#[test]
fn missing_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = affreg(&[
        "register",
        "--static",
        dir.path().join("absent.txt").to_str().unwrap(),
        "--deformed",
        dir.path().join("absent.txt").to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1.0 banana\n").unwrap();
    let out = affreg(&[
        "register",
        "--static",
        bad.to_str().unwrap(),
        "--deformed",
        bad.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
}

#[test]
fn invalid_population_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let static_path = write_static(dir.path());
    let out = affreg(&[
        "register",
        "--static",
        static_path.to_str().unwrap(),
        "--deformed",
        static_path.to_str().unwrap(),
        "--pop-size",
        "7",
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn missing_required_flag_exits_two() {
    let out = affreg(&["register"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn negative_scale_distortion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let static_path = write_static(dir.path());
    let out = affreg(&[
        "distort",
        "--input",
        static_path.to_str().unwrap(),
        "--scale",
        "-1.0",
        "--out",
        dir.path().join("d.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn battery_writes_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let static_path = write_static(dir.path());
    let run = |out_dir: &Path| {
        let out = affreg(&[
            "battery",
            "--static",
            static_path.to_str().unwrap(),
            "--deformed",
            static_path.to_str().unwrap(),
            "--pop-sizes",
            "10,20",
            "--runs",
            "2",
            "--generations",
            "12",
            "--base-seed",
            "9",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "battery failed: {out:?}");
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run(&a);
    run(&b);

    let csv_a = std::fs::read_to_string(a.join("convergence.csv")).unwrap();
    let csv_b = std::fs::read(b.join("convergence.csv")).unwrap();
    assert_eq!(csv_a.as_bytes(), csv_b.as_slice());
    let rows = csv_a
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("pop_size"))
        .count();
    assert_eq!(rows, 12 * 2 * 2);
    assert!(a.join("summary.csv").exists());
    assert!(a.join("transforms/p010_r001.txt").exists());
}

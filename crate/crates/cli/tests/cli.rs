use std::path::Path;
use std::process::{Command, Output};

fn mctrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mctrace"))
        .args(args)
        .env_remove("MC_WORKERS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn trace_writes_a_closed_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sphere.mesh");
    let o = mctrace(&[
        "trace",
        "--manifold",
        "sphere:r=1",
        "--dim",
        "3",
        "--lambda",
        "0.25",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("closure pass"));
    let h = header(&out);
    let fields: Vec<&str> = h.split_whitespace().collect();
    assert_eq!(&fields[..3], &["EDGEMESH", "n", "3"]);
    assert!(fields[4].parse::<usize>().unwrap() > 0);
}

#[test]
fn worker_count_does_not_change_the_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for w in ["1", "8"] {
        let out = dir.path().join(format!("w{w}.mesh"));
        let o = mctrace(&[
            "trace",
            "--manifold",
            "ellipsoid:a=1;0.7;1.2",
            "--lambda",
            "0.1",
            "--k",
            "2",
            "--workers",
            w,
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn bad_parameters_are_usage_errors() {
    for args in [
        &["trace", "--manifold", "sphere:r=1", "--lambda", "0"][..],
        &["trace", "--manifold", "sphere:r=1", "--lambda", "-1"],
        &["trace", "--manifold", "torus:r=1"],
        &["prove", "wall2d", "--k", "0"],
    ] {
        let o = mctrace(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn prove_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("wall.proof");
    let p = proof.to_str().unwrap();
    let o = mctrace(&["prove", "wall2d", "-o", p]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(header(&proof), "INFPROOF v1");

    let o = mctrace(&["verify", p, "wall2d"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );

    let o = mctrace(&["verify", p, "gap2d"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("fingerprint mismatch"));

    let text = std::fs::read_to_string(&proof).unwrap();
    let tampered = dir.path().join("tampered.proof");
    std::fs::write(&tampered, text.replacen("lambda = ", "lambda = 1", 1)).unwrap();
    let o = mctrace(&["verify", tampered.to_str().unwrap(), "wall2d"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn same_seed_gives_identical_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.proof");
    let b = dir.path().join("b.proof");
    for path in [&a, &b] {
        assert!(mctrace(&[
            "prove",
            "wall2d",
            "--rng-seed",
            "3",
            "-o",
            path.to_str().unwrap()
        ])
        .status
        .success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn gap_scene_writes_a_plan() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("gap.plan");
    let o = mctrace(&["prove", "gap2d", "-o", plan.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&plan).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "PLAN v1");
    assert_eq!(lines[2], "0.5 2.0");
    assert_eq!(*lines.last().unwrap(), "3.5 2.0");
}

#[test]
fn scene_files_and_missing_scenes() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("room.toml");
    std::fs::write(&scene, mctrace::scenes::WALL2D).unwrap();
    let o = mctrace(&[
        "prove",
        scene.to_str().unwrap(),
        "--start",
        "0.5,1.0",
        "--goal",
        "3.5,3.0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("INFPROOF v1"));

    let missing = dir.path().join("missing.toml");
    let o = mctrace(&["prove", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not found"));

    let o = mctrace(&[
        "prove",
        scene.to_str().unwrap(),
        "-o",
        scene.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_with_timeout_code() {
    let o = mctrace(&[
        "prove",
        "arm3_wall",
        "--lambda",
        "0.2",
        "--timeout",
        "0.000001",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn bench_emits_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let run = || {
        let o = mctrace(&[
            "bench",
            "wall2d",
            "--lambdas",
            "0.5,0.25",
            "--timeout",
            "60",
            "-o",
            csv.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(&csv).unwrap()
    };
    let first = run();
    let rows: Vec<Vec<String>> = first
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    let header = &rows[0];
    for col in ["tri_time", "check_time", "total_time"] {
        assert!(header.iter().any(|h| h == col), "{col}");
    }
    let counts = |text: &str| -> Vec<Vec<String>> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').take(13).map(str::to_string).collect())
            .collect()
    };
    assert_eq!(counts(&first), counts(&run()));
}

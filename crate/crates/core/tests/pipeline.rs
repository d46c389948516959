use std::sync::OnceLock;
use std::time::Instant;

use mctrace::collision::SceneFile;
use mctrace::pipeline::{
    solve, validate_plan, verify_proof, InfeasibilityProof, Integrity, Outcome, Problem,
    SolveParams,
};
use mctrace::scenes;

fn problem(text: &str) -> Problem {
    Problem::from_scene_file(&SceneFile::parse(text).unwrap(), None, None).unwrap()
}

fn prove(p: &Problem, params: &SolveParams) -> InfeasibilityProof {
    match solve(p, params).unwrap() {
        Outcome::Proof { proof, stats } => {
            eprintln!("{stats:?}");
            *proof
        }
        Outcome::Plan { path, .. } => panic!("unexpected plan with {} waypoints", path.len()),
        Outcome::Timeout { stats } => panic!("timeout: {stats:?}"),
    }
}

#[test]
fn wall_scene_yields_a_verified_proof() {
    let p = problem(scenes::WALL2D);
    let t = Instant::now();
    let proof = prove(&p, &SolveParams::default());
    eprintln!("proof in {:?}, {} points", t.elapsed(), proof.points.len());
    let report = verify_proof(&proof, &p);
    assert!(report.passed(), "{}", report.to_text());
    let parsed = InfeasibilityProof::from_text(&proof.to_text()).unwrap();
    assert!(verify_proof(&parsed, &p).passed());
}

#[test]
fn gap_scene_yields_a_plan() {
    let p = problem(scenes::GAP2D);
    let params = SolveParams::default();
    match solve(&p, &params).unwrap() {
        Outcome::Plan { path, stats } => {
            eprintln!("{stats:?}");
            assert!(validate_plan(&p, &path, params.lambda / 8.0).unwrap());
        }
        other => panic!("expected a plan, got {:?}", other.stats()),
    }
}

#[test]
fn arm_scene_yields_a_verified_proof() {
    let p = problem(scenes::ARM3_WALL);
    let params = SolveParams {
        lambda: 0.2,
        ..SolveParams::default()
    };
    let t = Instant::now();
    let proof = prove(&p, &params);
    eprintln!(
        "arm proof in {:?}, {} points",
        t.elapsed(),
        proof.points.len()
    );
    let report = verify_proof(&proof, &p);
    assert!(report.passed(), "{}", report.to_text());
}

fn wall_proof() -> &'static (Problem, InfeasibilityProof) {
    static CELL: OnceLock<(Problem, InfeasibilityProof)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = problem(scenes::WALL2D);
        let proof = prove(&p, &SolveParams::default());
        (p, proof)
    })
}

fn failed_checks(proof: &InfeasibilityProof, p: &Problem) -> Vec<&'static str> {
    verify_proof(proof, p)
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect()
}

#[test]
fn every_edited_point_line_is_caught() {
    let (p, proof) = wall_proof();
    let text = proof.to_text();
    let lines: Vec<&str> = text.lines().collect();
    let first = lines
        .iter()
        .position(|l| l.starts_with("count = "))
        .unwrap()
        + 1;
    for i in 0..proof.points.len() {
        let mut edited: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        let coords: Vec<f64> = edited[first + i]
            .split(' ')
            .map(|x| x.parse().unwrap())
            .collect();
        edited[first + i] = format!("{:?} {:?}", coords[0] + 1e-9, coords[1]);
        let parsed = InfeasibilityProof::from_text(&(edited.join("\n") + "\n")).unwrap();
        assert!(matches!(parsed.integrity, Integrity::Mismatch { .. }));
        assert_eq!(failed_checks(&parsed, p), vec!["digest"], "point {i}");
    }
}

#[test]
fn point_moved_into_free_space_is_named() {
    let (p, proof) = wall_proof();
    let mut forged = proof.clone();
    let victim = forged.points.len() / 2;
    forged.points[victim] = vec![0.5, 1.0];
    let report = verify_proof(&forged, p);
    assert!(!report.passed());
    assert!(report.bad_points.contains(&victim));
    let collision = report
        .checks
        .iter()
        .find(|c| c.name == "collision")
        .unwrap();
    assert!(
        !collision.passed && collision.detail.contains(&victim.to_string()),
        "{}",
        collision.detail
    );
}

#[test]
fn point_moved_off_the_manifold_is_named() {
    let (p, proof) = wall_proof();
    let mut forged = proof.clone();
    forged.points[0] = vec![2.0, 2.0];
    let report = verify_proof(&forged, p);
    assert!(report.bad_points.contains(&0));
    assert!(failed_checks(&forged, p).contains(&"on_manifold"));
}

#[test]
fn parameter_edits_are_caught() {
    let (p, proof) = wall_proof();
    let text = proof.to_text();
    for (from, to) in [
        (
            format!("lambda = {:?}", proof.lambda),
            "lambda = 0.5".to_string(),
        ),
        (format!("eps = {:?}", proof.eps), "eps = 0.1".to_string()),
        (format!("k = {}", proof.k), "k = 3".to_string()),
        ("open_ends = 0".to_string(), "open_ends = 1".to_string()),
        (
            "trace_complete = true".to_string(),
            "trace_complete = false".to_string(),
        ),
    ] {
        assert!(text.contains(&from), "{from}");
        let parsed = InfeasibilityProof::from_text(&text.replacen(&from, &to, 1)).unwrap();
        assert!(!verify_proof(&parsed, p).passed(), "{to}");
    }
    let mut forged = proof.clone();
    forged.f_start = -forged.f_start;
    assert!(failed_checks(&forged, p).contains(&"separation"));
}

#[test]
fn substituted_scene_is_caught() {
    let (_, proof) = wall_proof();
    let gap = problem(scenes::GAP2D);
    let report = verify_proof(proof, &gap);
    let fp = report
        .checks
        .iter()
        .find(|c| c.name == "fingerprint")
        .unwrap();
    assert!(!fp.passed && fp.detail.contains("fingerprint mismatch"));
    let moved = Problem::from_scene_file(
        &SceneFile::parse(scenes::WALL2D).unwrap(),
        Some(vec![0.5, 1.5]),
        None,
    )
    .unwrap();
    assert!(failed_checks(proof, &moved).contains(&"fingerprint"));
}

#[test]
fn empty_scene_gives_a_direct_plan() {
    let text = scenes::WALL2D
        .split("[[scene.obstacles]]")
        .next()
        .unwrap()
        .to_string()
        + "[problem]\nstart = [0.5, 2.0]\ngoal = [3.5, 2.0]\n";
    let p = problem(&text);
    match solve(&p, &SolveParams::default()).unwrap() {
        Outcome::Plan { path, stats } => {
            assert_eq!(stats.iterations, 1);
            assert_eq!(path.first().unwrap(), &p.start);
            assert_eq!(path.last().unwrap(), &p.goal);
        }
        other => panic!("expected a plan, got {:?}", other.stats()),
    }
}

#[test]
fn fixed_seed_reproduces_the_certificate() {
    let (p, proof) = wall_proof();
    let again = prove(p, &SolveParams::default());
    assert_eq!(again.to_text(), proof.to_text());
}

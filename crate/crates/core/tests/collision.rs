use mctrace::collision::{
    batch_check, config_in_collision, sphere_box_collides, sphere_cylinder_collides, JointKind,
    Scene, SceneFile, Shape,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distance from `c` to the box `[-l/2, l/2]^3` (zero inside).
fn box_distance(c: [f64; 3], l: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| (c[i].abs() - l[i] / 2.0).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Distance from `c` to the z-axis cylinder of height `h`, radius `rc` (zero inside).
fn cylinder_distance(c: [f64; 3], h: f64, rc: f64) -> f64 {
    let radial = c[0].hypot(c[1]);
    (radial - rc)
        .max(0.0)
        .hypot((c[2].abs() - h / 2.0).max(0.0))
}

#[test]
fn box_agrees_with_closest_point_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut decided = 0;
    for _ in 0..100_000 {
        let l = [
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
        ];
        let c = [
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        ];
        let r = rng.gen_range(0.01..1.5);
        let d = box_distance(c, l);
        if (d - r).abs() < 1e-12 {
            continue;
        }
        decided += 1;
        assert_eq!(sphere_box_collides(c, r, l), d < r, "c={c:?} l={l:?} r={r}");
    }
    assert!(decided > 99_000);
}

#[test]
fn cylinder_agrees_with_closest_point_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100_000 {
        let h = rng.gen_range(0.1..3.0);
        let rc = rng.gen_range(0.1..2.0);
        let c = [
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        ];
        let r = rng.gen_range(0.01..1.5);
        let d = cylinder_distance(c, h, rc);
        if (d - r).abs() < 1e-12 {
            continue;
        }
        assert_eq!(
            sphere_cylinder_collides(c, r, h, rc),
            d < r,
            "c={c:?} h={h} rc={rc} r={r}"
        );
    }
}

proptest! {
    #[test]
    fn octant_symmetry(c in prop::array::uniform3(-3.0f64..3.0), l in prop::array::uniform3(0.1f64..3.0),
                       r in 0.01f64..1.5, flips in prop::array::uniform3(any::<bool>())) {
        let f = [0, 1, 2].map(|i| if flips[i] { -c[i] } else { c[i] });
        prop_assert_eq!(sphere_box_collides(c, r, l), sphere_box_collides(f, r, l));
        prop_assert_eq!(sphere_cylinder_collides(c, r, l[0], l[1]), sphere_cylinder_collides(f, r, l[0], l[1]));
    }

    #[test]
    fn growing_radius_never_clears(c in prop::array::uniform3(-3.0f64..3.0), l in prop::array::uniform3(0.1f64..3.0),
                                   r in 0.01f64..1.5, grow in 0.0f64..1.0) {
        if sphere_box_collides(c, r, l) {
            prop_assert!(sphere_box_collides(c, r + grow, l));
        }
        if sphere_cylinder_collides(c, r, l[0], l[1]) {
            prop_assert!(sphere_cylinder_collides(c, r + grow, l[0], l[1]));
        }
    }
}

const ARM: &str = r#"
[[robot.joints]]
type = "revolute"
axis = [0, 0, 1]
limits = [-3.2, 3.2]

[[robot.joints]]
type = "revolute"
axis = [0, 1, 0]
origin = { xyz = [0.6, 0, 0.1], rpy = [0.2, 0, 0] }
limits = [-2, 2]

[[robot.joints]]
type = "prismatic"
axis = [1, 0, 0]
origin = { xyz = [0.5, 0, 0] }
limits = [0, 0.4]

[[robot.spheres]]
link = 0
radius = 0.15

[[robot.spheres]]
link = 1
offset = [0.3, 0, 0]
radius = 0.1

[[robot.spheres]]
link = 1
offset = [0.5, 0.05, 0]
radius = 0.08

[[robot.spheres]]
link = 3
offset = [0.2, 0, 0.02]
radius = 0.05

[[scene.obstacles]]
kind = "box"
dims = [0.3, 0.4, 0.5]
origin = { xyz = [0.8, 0.4, 0], rpy = [0.1, 0.2, 0.3] }

[[scene.obstacles]]
kind = "cylinder"
dims = [1.0, 0.15]
origin = { xyz = [-0.7, -0.3, 0.2], rpy = [1.2, 0, 0] }

[[scene.obstacles]]
kind = "sphere"
dims = [0.2]
origin = { xyz = [0, 0.9, 0.3] }
"#;

/// Dense oracle: world-frame closest-point distance per (sphere, obstacle) pair.
fn oracle_collides(file: &SceneFile, scene: &Scene<f64>, centers: &[[f64; 3]]) -> Option<bool> {
    let mut hit = false;
    for (s, c) in file.robot.spheres.iter().zip(centers) {
        for o in &scene.obstacles {
            let local = o.pose().inverse().apply(*c);
            let d = match *o.shape() {
                Shape::Box { size } => box_distance(local, size),
                Shape::Cylinder { height, radius } => cylinder_distance(local, height, radius),
                Shape::Sphere { radius } => {
                    (local[0].hypot(local[1]).hypot(local[2]) - radius).max(0.0)
                }
            };
            if (d - s.radius).abs() < 1e-12 {
                return None;
            }
            hit |= d < s.radius;
        }
    }
    Some(hit)
}

fn random_configs(n: usize, seed: u64, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            lo.iter()
                .zip(hi)
                .map(|(&l, &h)| rng.gen_range(l..=h))
                .collect()
        })
        .collect()
}

#[test]
fn configurations_agree_with_dense_oracle() {
    let file = SceneFile::parse(ARM).unwrap();
    let robot = file.robot::<f64>().unwrap();
    let scene = file.scene::<f64>().unwrap();
    assert_eq!(robot.joints()[2].kind, JointKind::Prismatic);
    let (lo, hi) = robot.limits();
    let qs = random_configs(10_000, 3, &lo, &hi);
    let mut both = [0usize; 2];
    for q in &qs {
        let centers = robot.forward_kinematics(q).unwrap();
        if let Some(expected) = oracle_collides(&file, &scene, &centers) {
            let got = config_in_collision(&robot, &scene, q).unwrap();
            assert_eq!(got, expected, "q={q:?}");
            both[usize::from(got)] += 1;
        }
    }
    assert!(both[0] > 100 && both[1] > 100, "{both:?}");
}

#[test]
fn link_spheres_stay_rigid_and_within_reach() {
    let file = SceneFile::parse(ARM).unwrap();
    let robot = file.robot::<f64>().unwrap();
    let (lo, hi) = robot.limits();
    let reach = 0.6f64.hypot(0.1) + 0.5 + 0.4 + 0.2f64.hypot(0.02) + 0.01;
    let d = |a: [f64; 3], b: [f64; 3]| {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    };
    let reference = robot.forward_kinematics(&lo).unwrap();
    let gap = d(reference[1], reference[2]);
    for q in random_configs(2_000, 4, &lo, &hi) {
        let c = robot.forward_kinematics(&q).unwrap();
        assert!((d(c[1], c[2]) - gap).abs() < 1e-9);
        assert!(c.iter().all(|p| d(*p, [0.0; 3]) <= reach));
        assert_eq!(c[0], [0.0; 3]);
    }
}

#[test]
fn batch_sizes_and_permutations_agree() {
    let file = SceneFile::parse(ARM).unwrap();
    let robot = file.robot::<f64>().unwrap();
    let scene = file.scene::<f64>().unwrap();
    let (lo, hi) = robot.limits();
    let qs = random_configs(3_000, 5, &lo, &hi);
    let serial: Vec<bool> = qs
        .iter()
        .map(|q| config_in_collision(&robot, &scene, q).unwrap())
        .collect();
    for size in [1, 7, 1024] {
        let reports = batch_check(&qs, &robot, &scene, size).unwrap();
        assert_eq!(
            reports.iter().map(|r| r.colliding).collect::<Vec<_>>(),
            serial
        );
        assert!(reports.iter().all(|r| r.colliding == r.contact.is_some()));
    }
    let mut rev = qs.clone();
    rev.reverse();
    let mut back: Vec<bool> = batch_check(&rev, &robot, &scene, 64)
        .unwrap()
        .iter()
        .map(|r| r.colliding)
        .collect();
    back.reverse();
    assert_eq!(back, serial);
    assert!(batch_check(&qs, &robot, &scene, 0).is_err());
}

#[test]
fn batch_errors_name_the_configuration() {
    let file = SceneFile::parse(ARM).unwrap();
    let robot = file.robot::<f64>().unwrap();
    let scene = file.scene::<f64>().unwrap();
    let qs = vec![
        vec![0.0, 0.0, 0.1],
        vec![0.0, 0.0, 0.1],
        vec![0.0, 5.0, 0.1],
    ];
    let err = batch_check(&qs, &robot, &scene, 2).unwrap_err().to_string();
    assert!(err.starts_with("configuration 2:"), "{err}");
}

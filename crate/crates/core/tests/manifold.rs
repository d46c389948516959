use mctrace::manifold::{
    edge_intersects, intersection_point, train_classifier, ImplicitManifold,
    KernelClassifierManifold, TrainParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(rng: &mut ChaCha8Rng, count: usize, dim: usize, half: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-half..half)).collect())
        .collect()
}

fn trained(dim: usize, seed: u64) -> KernelClassifierManifold<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_points(&mut rng, 120, dim, 2.0);
    let (pos, neg): (Vec<_>, Vec<_>) = pts
        .into_iter()
        .partition(|p| p.iter().map(|x| x * x).sum::<f64>() < 1.5);
    train_classifier(&pos, &neg, &TrainParams::default())
        .unwrap()
        .0
}

/// Richardson-extrapolated central differences.
fn fd_gradient(m: &impl ImplicitManifold<f64>, q: &[f64]) -> Vec<f64> {
    let central = |i: usize, h: f64| {
        let mut a = q.to_vec();
        let mut b = q.to_vec();
        a[i] += h;
        b[i] -= h;
        (m.value(&a) - m.value(&b)) / (2.0 * h)
    };
    (0..q.len())
        .map(|i| {
            let h = 1e-3;
            (4.0 * central(i, h / 2.0) - central(i, h)) / 3.0
        })
        .collect()
}

#[test]
fn kernel_gradient_matches_finite_differences() {
    for (dim, seed) in [(2, 1), (3, 2), (5, 3)] {
        let m = trained(dim, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        for q in random_points(&mut rng, 100, dim, 2.5) {
            let g = m.gradient(&q).unwrap();
            let fd = fd_gradient(&m, &q);
            let scale = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
            for (a, b) in g.iter().zip(&fd) {
                assert!(
                    (a - b).abs() <= 1e-5 * scale,
                    "dim={dim} q={q:?} g={g:?} fd={fd:?}"
                );
            }
        }
    }
}

#[test]
fn annulus_is_separated() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    while pos.len() + neg.len() < 200 {
        let p: Vec<f64> = vec![rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5)];
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if r < 1.0 {
            pos.push(p);
        } else if r > 1.5 {
            neg.push(p);
        }
    }
    let (m, report) = train_classifier(&pos, &neg, &TrainParams::default()).unwrap();
    let correct = pos.iter().filter(|p| m.value(p) > 0.0).count()
        + neg.iter().filter(|p| m.value(p) <= 0.0).count();
    assert!(correct as f64 >= 0.99 * 200.0, "{correct}");
    assert!((report.accuracy - correct as f64 / 200.0).abs() < 1e-12);
}

#[test]
fn cubic_root_residual_is_bounded_by_slope() {
    struct Cubic;
    impl ImplicitManifold<f64> for Cubic {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, q: &[f64]) -> f64 {
            let x = q[0];
            (x - 0.3) * (x * x + 0.5) + 0.1 * q[1]
        }
    }
    let eps = 1e-9;
    let (a, b) = (vec![-1.0, 0.2], vec![2.0, 0.2]);
    let hit = intersection_point(&Cubic, &a, &b, eps).unwrap();
    let len = 3.0;
    let steps = 30_000;
    let mut slope: f64 = 0.0;
    for i in 0..steps {
        let t0 = i as f64 / steps as f64;
        let t1 = (i + 1) as f64 / steps as f64;
        let f = |t: f64| Cubic.value(&[a[0] + t * (b[0] - a[0]), 0.2]);
        slope = slope.max((f(t1) - f(t0)).abs() / ((t1 - t0) * len));
    }
    assert!(
        hit.residual <= slope * eps,
        "{} > {}",
        hit.residual,
        slope * eps
    );
}

proptest! {
    #[test]
    fn training_ignores_row_order(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pos = random_points(&mut rng, 15, 3, 1.0);
        let neg: Vec<Vec<f64>> = random_points(&mut rng, 15, 3, 1.0)
            .into_iter()
            .map(|p| p.iter().map(|x| x + 1.5).collect())
            .collect();
        let params = TrainParams::default();
        let (m, _) = train_classifier(&pos, &neg, &params).unwrap();
        let mut pos2 = pos.clone();
        let mut neg2 = neg.clone();
        pos2.reverse();
        neg2.rotate_left(4);
        let (m2, _) = train_classifier(&pos2, &neg2, &params).unwrap();
        for q in random_points(&mut rng, 20, 3, 2.0) {
            prop_assert!((m.value(&q) - m2.value(&q)).abs() <= 1e-9);
        }
    }

    #[test]
    fn intersection_is_symmetric(a in prop::collection::vec(-0.4f64..0.4, 3), dir in prop::collection::vec(-1.0f64..1.0, 3)) {
        let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(len > 0.1);
        let b: Vec<f64> = a.iter().zip(&dir).map(|(x, d)| x + 3.0 * d / len).collect();
        let m = trained(3, 5);
        prop_assert_eq!(edge_intersects(&m, &a, &b), edge_intersects(&m, &b, &a));
        prop_assume!(edge_intersects(&m, &a, &b));
        let eps = 1e-7;
        let p = intersection_point(&m, &a, &b, eps).unwrap();
        let q = intersection_point(&m, &b, &a, eps).unwrap();
        let d = p.point.iter().zip(&q.point).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!(d <= eps, "{}", d);
    }

    #[test]
    fn linear_roots_are_located_to_eps(root in 0.01f64..0.99, shift in 0.0f64..0.2) {
        struct Linear(f64);
        impl ImplicitManifold<f64> for Linear {
            fn dim(&self) -> usize { 2 }
            fn value(&self, q: &[f64]) -> f64 { q[0] - self.0 }
        }
        let eps = 1e-10;
        let t1 = intersection_point(&Linear(root), &[0.0, 0.0], &[1.0, 0.0], eps).unwrap().t;
        prop_assert!((t1 - root).abs() <= eps);
        let later = (root + shift).min(0.995);
        let t2 = intersection_point(&Linear(later), &[0.0, 0.0], &[1.0, 0.0], eps).unwrap().t;
        prop_assert!(t2 >= t1 - eps);
    }
}

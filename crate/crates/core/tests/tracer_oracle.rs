mod common;

use common::{sign_scan_edges, sphere};
use mctrace::lattice::LatticeConfig;
use mctrace::manifold::{AnalyticManifold, ImplicitManifold};
use mctrace::tracer::{trace, TraceConfig};

fn check(n: usize, scale: f64) {
    let m = AnalyticManifold::sphere(n, 1.0);
    let cfg = TraceConfig::new(LatticeConfig::new(n, scale).unwrap());
    let mut seed = vec![0.0; n];
    seed[0] = 1.0;
    let r = trace(&[seed], &m, &cfg).unwrap();
    let got: std::collections::BTreeSet<_> = r.edge_vertex_pairs().into_iter().collect();
    assert_eq!(got.len(), r.len(), "duplicate edges");
    let oracle = sign_scan_edges(n, scale, 2.0, sphere(1.0));
    assert_eq!(got, oracle, "n={n} scale={scale}");
    assert!(r.closure().is_closed());
    for p in r.points() {
        assert!(m.value(p).abs() < 1e-4);
    }
}

#[test]
fn circle_matches_sign_scan() {
    check(2, 0.5);
    check(2, 0.25);
}

#[test]
fn sphere3_matches_sign_scan() {
    check(3, 0.5);
    check(3, 0.25);
}

#[test]
fn ellipsoid_and_offset_lattice() {
    let m = AnalyticManifold::Ellipsoid {
        center: vec![0.1, -0.2, 0.05],
        semi_axes: vec![1.3, 0.7, 1.0],
    };
    let lat = LatticeConfig::new(3, 0.2).unwrap();
    let r = trace(&[vec![1.4, -0.2, 0.05]], &m, &TraceConfig::new(lat)).unwrap();
    let oracle = sign_scan_edges(3, 0.2, 2.0, |q| m.value(q));
    let got: std::collections::BTreeSet<_> = r.edge_vertex_pairs().into_iter().collect();
    assert_eq!(got, oracle);
}

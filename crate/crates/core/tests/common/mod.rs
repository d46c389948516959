//! Test-only oracles, independent of the tracing code paths.
#![allow(dead_code)]

use std::collections::BTreeSet;

pub type VertexPair = (Vec<i64>, Vec<i64>);

/// Every lattice edge `(v, v + 1_S)` with `v` in `[-half, half]^n / scale` and
/// a strict sign change of `f` (`f <= 0` counts as negative).
pub fn sign_scan_edges(
    n: usize,
    scale: f64,
    half: f64,
    f: impl Fn(&[f64]) -> f64,
) -> BTreeSet<VertexPair> {
    let lo = (-half / scale).floor() as i64;
    let hi = (half / scale).ceil() as i64;
    let mut out = BTreeSet::new();
    let mut v = vec![lo; n];
    loop {
        let xv: Vec<f64> = v.iter().map(|&c| scale * c as f64).collect();
        let sv = f(&xv) > 0.0;
        for subset in 1u32..(1 << n) {
            let w: Vec<i64> = v
                .iter()
                .enumerate()
                .map(|(i, &c)| c + ((subset >> i) & 1) as i64)
                .collect();
            let xw: Vec<f64> = w.iter().map(|&c| scale * c as f64).collect();
            if (f(&xw) > 0.0) != sv {
                out.insert((v.clone(), w));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            v[i] += 1;
            if v[i] <= hi {
                break;
            }
            v[i] = lo;
            i += 1;
        }
    }
}

pub fn sphere(r: f64) -> impl Fn(&[f64]) -> f64 {
    move |q: &[f64]| q.iter().map(|x| x * x).sum::<f64>() - r * r
}

/// Maximum one-to-one matching of two point sets within `tol` (max-norm).
/// Returns the number of unmatched points on either side.
pub fn unmatched(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> usize {
    let close = |p: &[f64], q: &[f64]| p.iter().zip(q).all(|(x, y)| (x - y).abs() <= tol);
    let candidates: Vec<Vec<usize>> = a
        .iter()
        .map(|p| (0..b.len()).filter(|&j| close(p, &b[j])).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; b.len()];
    fn augment(
        i: usize,
        candidates: &[Vec<usize>],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &j in &candidates[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, candidates, owner, seen)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut matched = 0;
    for i in 0..a.len() {
        let mut seen = vec![false; b.len()];
        matched += usize::from(augment(i, &candidates, &mut owner, &mut seen));
    }
    a.len() + b.len() - 2 * matched
}

/// `k >= v_0 >= v_1 >= ... >= v_{n-1} >= 0`
fn inside_subdivided_simplex(v: &[i64], k: i64) -> bool {
    let mut prev = k;
    for &c in v {
        if c > prev || c < 0 {
            return false;
        }
        prev = c;
    }
    true
}

/// Every unit lattice edge `(v, v + 1_S)` inside the `k`-fold subdivided simplex.
pub fn enumerate_local_edges(n: usize, k: i64) -> BTreeSet<VertexPair> {
    let mut verts = vec![vec![]];
    for _ in 0..n {
        verts = verts
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (0..=k).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    let mut out = BTreeSet::new();
    for v in verts.iter().filter(|v| inside_subdivided_simplex(v, k)) {
        for s in 1u32..(1 << n) {
            let w: Vec<i64> = (0..n).map(|i| v[i] + i64::from(s >> i & 1)).collect();
            if inside_subdivided_simplex(&w, k) {
                out.insert((v.clone(), w));
            }
        }
    }
    out
}

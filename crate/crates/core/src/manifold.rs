//! Implicit codimension-1 manifolds `{q | F(q) = 0}`.
//!
//! Sign convention shared with the tracer: a value is positive iff `F > 0`;
//! `F = 0` counts as negative, so an edge crosses the manifold iff exactly one
//! endpoint is strictly positive.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::region::BoxRegion;
use crate::scalar::{dist_sq, lerp, norm_sq, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifoldError {
    #[error("training class `{0}` is empty")]
    EmptyClass(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("kernel system is singular or ill-conditioned (min pivot {min_pivot:e}, condition estimate {condition:e})")]
    IllConditioned { min_pivot: f64, condition: f64 },
    #[error("gradient vanishes at the current iterate")]
    ZeroGradient,
    #[error("projection did not reach |F| <= {tol:e} within {iterations} iterations (|F| = {residual:e})")]
    NoConvergence {
        tol: f64,
        iterations: usize,
        residual: f64,
    },
    #[error("segment endpoints do not straddle the manifold")]
    NoSignChange,
    #[error("seed count must be at least 1")]
    ZeroSeedCount,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("malformed classifier record at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An evaluable scalar field whose zero set is the manifold.
pub trait ImplicitManifold<T: Real>: Sync {
    fn dim(&self) -> usize;

    fn value(&self, q: &[T]) -> T;

    /// Closed-form gradient, when the manifold has one.
    fn gradient(&self, _q: &[T]) -> Option<Vec<T>> {
        None
    }
}

impl<T: Real, M: ImplicitManifold<T> + ?Sized> ImplicitManifold<T> for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, q: &[T]) -> T {
        (**self).value(q)
    }
    fn gradient(&self, q: &[T]) -> Option<Vec<T>> {
        (**self).gradient(q)
    }
}

#[inline]
pub fn is_positive<T: Real>(value: T) -> bool {
    value > T::zero()
}

/// Sign test on two already-evaluated endpoint values.
#[inline]
pub fn values_straddle<T: Real>(fa: T, fb: T) -> bool {
    is_positive(fa) != is_positive(fb)
}

/// Analytic gradient, falling back to central differences.
pub fn gradient_or_fd<T: Real, M: ImplicitManifold<T> + ?Sized>(m: &M, q: &[T]) -> Vec<T> {
    if let Some(g) = m.gradient(q) {
        return g;
    }
    central_difference(m, q)
}

pub fn central_difference<T: Real, M: ImplicitManifold<T> + ?Sized>(m: &M, q: &[T]) -> Vec<T> {
    let base_step = T::epsilon().cbrt();
    let mut x = q.to_vec();
    (0..q.len())
        .map(|i| {
            let h = base_step * q[i].abs().max(T::one());
            x[i] = q[i] + h;
            let fp = m.value(&x);
            x[i] = q[i] - h;
            let fm = m.value(&x);
            x[i] = q[i];
            (fp - fm) / (h + h)
        })
        .collect()
}

/// Ground-truth test surfaces with exact gradients.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticManifold<T> {
    /// `|q - c|^2 - r^2`
    Sphere { center: Vec<T>, radius: T },
    /// `sum ((q_i - c_i) / a_i)^2 - 1`
    Ellipsoid { center: Vec<T>, semi_axes: Vec<T> },
    /// `n . q - offset`
    Plane { normal: Vec<T>, offset: T },
}

impl<T: Real> AnalyticManifold<T> {
    pub fn sphere(dim: usize, radius: T) -> Self {
        Self::Sphere {
            center: vec![T::zero(); dim],
            radius,
        }
    }
}

impl<T: Real> ImplicitManifold<T> for AnalyticManifold<T> {
    fn dim(&self) -> usize {
        match self {
            Self::Sphere { center, .. } => center.len(),
            Self::Ellipsoid { center, .. } => center.len(),
            Self::Plane { normal, .. } => normal.len(),
        }
    }

    fn value(&self, q: &[T]) -> T {
        match self {
            Self::Sphere { center, radius } => dist_sq(q, center) - *radius * *radius,
            Self::Ellipsoid { center, semi_axes } => {
                q.iter()
                    .zip(center)
                    .zip(semi_axes)
                    .map(|((&x, &c), &a)| {
                        let u = (x - c) / a;
                        u * u
                    })
                    .sum::<T>()
                    - T::one()
            }
            Self::Plane { normal, offset } => crate::scalar::dot(normal, q) - *offset,
        }
    }

    fn gradient(&self, q: &[T]) -> Option<Vec<T>> {
        let two = T::lit(2.0);
        Some(match self {
            Self::Sphere { center, .. } => {
                q.iter().zip(center).map(|(&x, &c)| two * (x - c)).collect()
            }
            Self::Ellipsoid { center, semi_axes } => q
                .iter()
                .zip(center)
                .zip(semi_axes)
                .map(|((&x, &c), &a)| two * (x - c) / (a * a))
                .collect(),
            Self::Plane { normal, .. } => normal.clone(),
        })
    }
}

/// RBF kernel expansion `F(q) = sum_i w_i exp(-gamma |q - s_i|^2) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelClassifierManifold<T> {
    dim: usize,
    support: Vec<T>,
    weights: Vec<T>,
    gamma: T,
    bias: T,
}

impl<T: Real> KernelClassifierManifold<T> {
    /// `support` holds one row per weight.
    pub fn new(
        support: Vec<Vec<T>>,
        weights: Vec<T>,
        gamma: T,
        bias: T,
    ) -> Result<Self, ManifoldError> {
        if support.len() != weights.len() || support.is_empty() {
            return Err(ManifoldError::Parameter(
                "support rows and weights must be non-empty and of equal count".into(),
            ));
        }
        if !(gamma > T::zero()) {
            return Err(ManifoldError::Parameter("gamma must be positive".into()));
        }
        let dim = support[0].len();
        let mut flat = Vec::with_capacity(dim * support.len());
        for row in &support {
            if row.len() != dim {
                return Err(ManifoldError::Dimension {
                    expected: dim,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            dim,
            support: flat,
            weights,
            gamma,
            bias,
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn bias(&self) -> T {
        self.bias
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn support_rows(&self) -> impl Iterator<Item = &[T]> {
        self.support.chunks_exact(self.dim)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Text record: `n`, `gamma`, `bias`, `rows`, then one line per support
    /// point with its weight last. Values use the shortest lossless decimal form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n {}", self.dim).unwrap();
        writeln!(s, "gamma {:?}", self.gamma).unwrap();
        writeln!(s, "bias {:?}", self.bias).unwrap();
        writeln!(s, "rows {}", self.len()).unwrap();
        for (row, w) in self.support_rows().zip(&self.weights) {
            for x in row {
                write!(s, "{x:?} ").unwrap();
            }
            writeln!(s, "{w:?}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ManifoldError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let mut header = |key: &str| -> Result<(usize, String), ManifoldError> {
            let (i, line) = lines.next().ok_or(ManifoldError::Parse {
                line: 0,
                msg: format!("missing `{key}`"),
            })?;
            let mut it = line.split_whitespace();
            if it.next() != Some(key) {
                return Err(ManifoldError::Parse {
                    line: i + 1,
                    msg: format!("expected `{key}`"),
                });
            }
            let v = it.next().ok_or(ManifoldError::Parse {
                line: i + 1,
                msg: format!("`{key}` has no value"),
            })?;
            Ok((i + 1, v.to_string()))
        };
        let parse_err = |line: usize, what: &str| ManifoldError::Parse {
            line,
            msg: format!("bad {what}"),
        };
        let (l, n) = header("n")?;
        let n: usize = n.parse().map_err(|_| parse_err(l, "dimension"))?;
        let (l, g) = header("gamma")?;
        let gamma: T = g.parse().map_err(|_| parse_err(l, "gamma"))?;
        let (l, b) = header("bias")?;
        let bias: T = b.parse().map_err(|_| parse_err(l, "bias"))?;
        let (l, r) = header("rows")?;
        let rows: usize = r.parse().map_err(|_| parse_err(l, "row count"))?;
        let mut support = Vec::with_capacity(rows);
        let mut weights = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (i, line) = lines.next().ok_or(ManifoldError::Parse {
                line: 0,
                msg: "truncated support rows".into(),
            })?;
            let vals: Vec<T> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(i + 1, "number")))
                .collect::<Result<_, _>>()?;
            if vals.len() != n + 1 {
                return Err(parse_err(i + 1, "row width"));
            }
            weights.push(vals[n]);
            support.push(vals[..n].to_vec());
        }
        if let Some((i, _)) = lines.next() {
            return Err(parse_err(i + 1, "trailing content"));
        }
        Self::new(support, weights, gamma, bias)
    }
}

impl<T: Real> ImplicitManifold<T> for KernelClassifierManifold<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, q: &[T]) -> T {
        self.support_rows()
            .zip(&self.weights)
            .map(|(s, &w)| w * (-self.gamma * dist_sq(q, s)).exp())
            .sum::<T>()
            + self.bias
    }

    fn gradient(&self, q: &[T]) -> Option<Vec<T>> {
        let mut g = vec![T::zero(); self.dim];
        let c = -(self.gamma + self.gamma);
        for (s, &w) in self.support_rows().zip(&self.weights) {
            let k = w * (-self.gamma * dist_sq(q, s)).exp();
            for ((gi, &qi), &si) in g.iter_mut().zip(q).zip(s) {
                *gi = *gi + c * k * (qi - si);
            }
        }
        Some(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams<T> {
    /// RBF bandwidth; `None` selects `1 / (2 median_dist^2)`.
    pub gamma: Option<T>,
    /// Ridge added to the Gram diagonal.
    pub regularization: T,
}

impl<T: Real> Default for TrainParams<T> {
    fn default() -> Self {
        Self {
            gamma: None,
            regularization: T::lit(1e-3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingReport<T> {
    pub gamma: T,
    /// Fraction of training rows on the correct side of the zero set.
    pub accuracy: f64,
    pub condition_estimate: f64,
}

/// `1 / (2 m^2)` where `m` is the median pairwise distance.
pub fn default_gamma<T: Real>(points: &[&[T]]) -> T {
    let mut d: Vec<T> = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d.push(dist_sq(a, b));
        }
    }
    if d.is_empty() {
        return T::one();
    }
    let mid = d.len() / 2;
    let (_, m2, _) = d.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
    if *m2 > T::zero() {
        T::one() / (T::lit(2.0) * *m2)
    } else {
        T::one()
    }
}

/// Regularized kernel least squares with a free bias (labels +1 / -1).
///
/// Solves `[K + r I, 1; 1^T, 0] [w; b] = [y; 0]`, so `F > 0` tends toward the
/// positive class.
pub fn train_classifier<T: Real>(
    positive: &[Vec<T>],
    negative: &[Vec<T>],
    params: &TrainParams<T>,
) -> Result<(KernelClassifierManifold<T>, TrainingReport<T>), ManifoldError> {
    if positive.is_empty() {
        return Err(ManifoldError::EmptyClass("positive"));
    }
    if negative.is_empty() {
        return Err(ManifoldError::EmptyClass("negative"));
    }
    let dim = positive[0].len();
    let rows: Vec<&[T]> = positive.iter().chain(negative).map(Vec::as_slice).collect();
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(ManifoldError::Dimension {
            expected: dim,
            got: bad.len(),
        });
    }
    if !(params.regularization > T::zero()) {
        return Err(ManifoldError::Parameter(
            "regularization must be positive".into(),
        ));
    }
    let gamma = params.gamma.unwrap_or_else(|| default_gamma(&rows));
    if !(gamma > T::zero()) {
        return Err(ManifoldError::Parameter("gamma must be positive".into()));
    }
    let n = rows.len();
    let mut a = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = (-gamma * dist_sq(rows[i], rows[j])).exp();
            a[i * n + j] = k;
            a[j * n + i] = k;
        }
        a[i * n + i] = a[i * n + i] + params.regularization;
    }
    let chol = Cholesky::factor(a, n)?;
    let y: Vec<T> = (0..n)
        .map(|i| {
            if i < positive.len() {
                T::one()
            } else {
                -T::one()
            }
        })
        .collect();
    let x1 = chol.solve(&y);
    let x2 = chol.solve(&vec![T::one(); n]);
    let s1: T = x1.iter().copied().sum();
    let s2: T = x2.iter().copied().sum();
    let bias = s1 / s2;
    let weights: Vec<T> = x1.iter().zip(&x2).map(|(&u, &v)| u - bias * v).collect();
    let model = KernelClassifierManifold::new(
        rows.iter().map(|r| r.to_vec()).collect(),
        weights,
        gamma,
        bias,
    )?;
    let correct = rows
        .iter()
        .enumerate()
        .filter(|(i, r)| is_positive(model.value(r)) == (*i < positive.len()))
        .count();
    let report = TrainingReport {
        gamma,
        accuracy: correct as f64 / n as f64,
        condition_estimate: chol.condition_estimate,
    };
    Ok((model, report))
}

struct Cholesky<T> {
    l: Vec<T>,
    n: usize,
    condition_estimate: f64,
}

impl<T: Real> Cholesky<T> {
    fn factor(mut a: Vec<T>, n: usize) -> Result<Self, ManifoldError> {
        let mut min_d = f64::INFINITY;
        let mut max_d = 0.0f64;
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d = d - a[j * n + k] * a[j * n + k];
            }
            let df = d.to_f64().unwrap_or(f64::NAN);
            if !(df > 0.0) {
                return Err(ManifoldError::IllConditioned {
                    min_pivot: df,
                    condition: f64::INFINITY,
                });
            }
            min_d = min_d.min(df);
            max_d = max_d.max(df);
            let ljj = d.sqrt();
            a[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                let (ri, rj) = (i * n, j * n);
                for k in 0..j {
                    s = s - a[ri + k] * a[rj + k];
                }
                a[i * n + j] = s / ljj;
            }
        }
        let condition = max_d / min_d;
        if condition * T::epsilon().to_f64().unwrap() > 1e-2 {
            return Err(ManifoldError::IllConditioned {
                min_pivot: min_d,
                condition,
            });
        }
        Ok(Self {
            l: a,
            n,
            condition_estimate: condition,
        })
    }

    #[allow(clippy::needless_range_loop)]
    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// Damped Newton on `F` toward the zero set, with Armijo backtracking on `|F|`.
pub fn project_to_manifold<T: Real, M: ImplicitManifold<T> + ?Sized>(
    q0: &[T],
    m: &M,
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>, ManifoldError> {
    let mut p = q0.to_vec();
    let mut f = m.value(&p);
    let armijo = T::lit(1e-4);
    for _ in 0..max_iter {
        if f.abs() <= tol {
            return Ok(p);
        }
        let g = gradient_or_fd(m, &p);
        let g2 = norm_sq(&g);
        if !(g2 > T::epsilon() * T::epsilon()) {
            return Err(ManifoldError::ZeroGradient);
        }
        let scale = -f / g2;
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<T> = p
                .iter()
                .zip(&g)
                .map(|(&x, &gi)| x + alpha * scale * gi)
                .collect();
            let fc = m.value(&cand);
            if fc.abs() <= (T::one() - armijo * alpha) * f.abs() {
                p = cand;
                f = fc;
                accepted = true;
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    if f.abs() <= tol {
        return Ok(p);
    }
    Err(ManifoldError::NoConvergence {
        tol: tol.to_f64().unwrap_or(f64::NAN),
        iterations: max_iter,
        residual: f.abs().to_f64().unwrap_or(f64::NAN),
    })
}

/// Projects uniform samples from `region` onto the manifold.
///
/// Seeds that leave the region or land within `dedup_radius` of an accepted
/// seed are discarded. At most `10 * count` projections are attempted.
pub fn sample_seeds<T: Real, M: ImplicitManifold<T> + ?Sized, R: Rng + ?Sized>(
    m: &M,
    region: &BoxRegion<T>,
    count: usize,
    tol: T,
    dedup_radius: T,
    rng: &mut R,
) -> Result<Vec<Vec<T>>, ManifoldError> {
    if count == 0 {
        return Err(ManifoldError::ZeroSeedCount);
    }
    let r2 = dedup_radius * dedup_radius;
    let mut seeds: Vec<Vec<T>> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let mut failures = 0usize;
    while seeds.len() < count && attempts < 10 * count {
        attempts += 1;
        let q0 = region.sample(rng);
        match project_to_manifold(&q0, m, tol, 100) {
            Ok(p) if region.contains(&p) => {
                if seeds.iter().all(|s| dist_sq(s, &p) > r2) {
                    seeds.push(p);
                }
            }
            _ => failures += 1,
        }
    }
    if seeds.len() < count && failures * 10 > attempts * 9 {
        log::warn!(
            "seed sampling: {failures}/{attempts} projections failed, returning {} of {count} seeds",
            seeds.len()
        );
    }
    Ok(seeds)
}

pub fn edge_intersects<T: Real, M: ImplicitManifold<T> + ?Sized>(m: &M, a: &[T], b: &[T]) -> bool {
    values_straddle(m.value(a), m.value(b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Intersection<T> {
    pub point: Vec<T>,
    /// Segment parameter of `point`, in `[0, 1]`.
    pub t: T,
    /// `|F(point)|`
    pub residual: T,
}

/// Bisection on the segment until the bracket is no longer than `eps`.
pub fn intersection_point<T: Real, M: ImplicitManifold<T> + ?Sized>(
    m: &M,
    a: &[T],
    b: &[T],
    eps: T,
) -> Result<Intersection<T>, ManifoldError> {
    let fa = m.value(a);
    if !values_straddle(fa, m.value(b)) {
        return Err(ManifoldError::NoSignChange);
    }
    Ok(bisect(m, a, b, is_positive(fa), eps))
}

/// Bisection with the sign of `F(a)` already known.
pub(crate) fn bisect<T: Real, M: ImplicitManifold<T> + ?Sized>(
    m: &M,
    a: &[T],
    b: &[T],
    a_positive: bool,
    eps: T,
) -> Intersection<T> {
    let len = dist_sq(a, b).sqrt();
    let (mut lo, mut hi) = (T::zero(), T::one());
    let half = T::lit(0.5);
    let mut iters = 0;
    while (hi - lo) * len > eps && iters < 200 {
        let mid = (lo + hi) * half;
        if is_positive(m.value(&lerp(a, b, mid))) == a_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let t = (lo + hi) * half;
    let point = lerp(a, b, t);
    let residual = m.value(&point).abs();
    Intersection { point, t, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle() -> AnalyticManifold<f64> {
        AnalyticManifold::sphere(2, 1.0)
    }

    #[test]
    fn two_point_separability() {
        let (m, _) = train_classifier(
            &[vec![0.0, 0.0]],
            &[vec![2.0, 0.0]],
            &TrainParams {
                gamma: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.value(&[0.0, 0.0]) > 0.0);
        assert!(m.value(&[2.0, 0.0]) < 0.0);
    }

    #[test]
    fn annulus_training_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        while pos.len() + neg.len() < 200 {
            let q: Vec<f64> = vec![rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5)];
            let r = norm_sq(&q).sqrt();
            if r < 1.0 {
                pos.push(q);
            } else if r > 1.5 {
                neg.push(q);
            }
        }
        let (m, report) = train_classifier(&pos, &neg, &TrainParams::default()).unwrap();
        assert!(report.accuracy >= 0.99, "accuracy {}", report.accuracy);
        assert!(m.value(&[0.0, 0.0]) > 0.0);
    }

    #[test]
    fn symmetric_data_gives_symmetric_field() {
        let pos = vec![vec![0.0, 0.0], vec![0.3, 0.1], vec![-0.3, -0.1]];
        let neg = vec![
            vec![2.0, 0.5],
            vec![-2.0, -0.5],
            vec![1.0, -2.0],
            vec![-1.0, 2.0],
        ];
        let (m, _) = train_classifier(&pos, &neg, &TrainParams::default()).unwrap();
        for probe in [[0.4f64, 0.7], [1.3, -0.2], [-0.9, 2.2]] {
            let neg_probe = [-probe[0], -probe[1]];
            assert!((m.value(&probe) - m.value(&neg_probe)).abs() <= 1e-9);
        }
    }

    #[test]
    fn empty_class_rejected() {
        let r = train_classifier::<f64>(&[], &[vec![1.0, 1.0]], &TrainParams::default());
        assert_eq!(r.unwrap_err(), ManifoldError::EmptyClass("positive"));
    }

    #[test]
    fn duplicate_rows_without_ridge_are_rejected() {
        let p = TrainParams {
            gamma: Some(1.0),
            regularization: 1e-300,
        };
        let r = train_classifier(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[vec![1.0, 0.0]], &p);
        assert!(matches!(r, Err(ManifoldError::IllConditioned { .. })));
    }

    #[test]
    fn projection_onto_circle() {
        let p = project_to_manifold(&[2.0, 0.0], &circle(), 1e-8, 100).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-6 && p[1].abs() < 1e-12);
        let p = project_to_manifold(&[0.1, 0.1], &circle(), 1e-8, 100).unwrap();
        assert!(circle().value(&p).abs() <= 1e-8);
        assert_eq!(
            project_to_manifold(&[0.0, 0.0], &circle(), 1e-8, 100).unwrap_err(),
            ManifoldError::ZeroGradient
        );
    }

    #[test]
    fn seeds_lie_on_the_manifold() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let region = BoxRegion::cube(2, 2.0);
        let seeds = sample_seeds(&circle(), &region, 10, 1e-9, 0.05, &mut rng).unwrap();
        assert_eq!(seeds.len(), 10);
        for s in &seeds {
            assert!((norm_sq(s).sqrt() - 1.0).abs() < 1e-8);
        }
        let plane = AnalyticManifold::Plane {
            normal: vec![1.0, 2.0],
            offset: 0.5,
        };
        for s in sample_seeds(&plane, &region, 5, 1e-10, 0.05, &mut rng).unwrap() {
            assert!((s[0] + 2.0 * s[1] - 0.5).abs() <= 1e-10);
        }
        assert_eq!(
            sample_seeds(&circle(), &region, 0, 1e-9, 0.05, &mut rng).unwrap_err(),
            ManifoldError::ZeroSeedCount
        );
    }

    #[test]
    fn sign_convention() {
        assert!(values_straddle(-0.19, 0.21));
        assert!(!values_straddle(0.5, 0.5));
        assert!(!values_straddle(0.0, -1.0));
        assert!(values_straddle(0.0, 1.0));
        assert!(edge_intersects(&circle(), &[0.9, 0.0], &[1.1, 0.0]));
    }

    #[test]
    fn bisection_hits_roots() {
        let hit = intersection_point(&circle(), &[0.9, 0.0], &[1.1, 0.0], 1e-9).unwrap();
        assert!((hit.point[0] - 1.0).abs() <= 1e-8);
        let line = AnalyticManifold::<f64>::Plane {
            normal: vec![1.0, 0.0],
            offset: 0.25,
        };
        let hit = intersection_point(&line, &[0.0, 0.0], &[1.0, 0.0], 1e-12).unwrap();
        assert!((hit.t - 0.25).abs() <= 1e-12);
        assert_eq!(
            intersection_point(&circle(), &[0.0, 0.0], &[0.5, 0.0], 1e-9).unwrap_err(),
            ManifoldError::NoSignChange
        );
    }

    #[test]
    fn classifier_text_round_trip() {
        let m = KernelClassifierManifold::new(
            vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-7, 1e300]],
            vec![0.7, -std::f64::consts::PI],
            0.123456789,
            -1e-17,
        )
        .unwrap();
        let back = KernelClassifierManifold::<f64>::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(
            KernelClassifierManifold::<f64>::from_text("n 2\ngamma 1\nbias 0\nrows 1\n1 2\n")
                .is_err()
        );
    }

    #[test]
    fn works_in_single_precision() {
        let m = AnalyticManifold::<f32>::sphere(2, 1.0);
        let hit = intersection_point(&m, &[0.5f32, 0.0], &[1.5, 0.0], 1e-5).unwrap();
        assert!((hit.point[0] - 1.0).abs() < 1e-4);
    }
}

//! Permutahedral representation of the Freudenthal–Kuhn triangulation of R^n.
//!
//! A simplex is stored as a base lattice vertex plus an ordered partition of
//! the labels `{0, …, n}`. Label `i < n` steps along the `i`-th unit vector and
//! label `n` steps along `-(1, …, 1)`, so applying every part in order walks
//! the vertex cycle and returns to the base. Parts are kept as label bitmasks,
//! which caps the ambient dimension at [`MAX_DIM`].
//!
//! A simplex is canonical when its base is the lexicographically smallest of
//! its vertices. In this triangulation that is equivalent to the part holding
//! label `n` being last.
//!
//! Every query allocates exactly its output size and nothing else.

use itertools::Itertools;
use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::Real;

/// Largest supported ambient dimension (labels `0..=n` must fit a `u64` mask).
pub const MAX_DIM: usize = 63;

/// Integer lattice coordinates.
pub type LatticePoint = SmallVec<[i64; 8]>;

type Parts = SmallVec<[u64; 9]>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice dimension must be in 2..={MAX_DIM}, got {0}")]
    Dimension(usize),
    #[error("lattice scale must be positive and finite")]
    Scale,
    #[error("expected a {expected}-vector, got length {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid partition: {0}")]
    Partition(String),
}

/// Ambient triangulation parameters: dimension, cell edge length and origin.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig<T> {
    dim: usize,
    scale: T,
    offset: Vec<T>,
}

impl<T: Real> LatticeConfig<T> {
    pub fn new(dim: usize, scale: T) -> Result<Self, LatticeError> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(LatticeError::Dimension(dim));
        }
        if !(scale > T::zero() && scale.is_finite()) {
            return Err(LatticeError::Scale);
        }
        Ok(Self {
            dim,
            scale,
            offset: vec![T::zero(); dim],
        })
    }

    pub fn with_offset(mut self, offset: Vec<T>) -> Result<Self, LatticeError> {
        if offset.len() != self.dim {
            return Err(LatticeError::Length {
                expected: self.dim,
                got: offset.len(),
            });
        }
        self.offset = offset;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn offset(&self) -> &[T] {
        &self.offset
    }

    /// Same origin, different cell size.
    pub fn rescaled(&self, scale: T) -> Result<Self, LatticeError> {
        Self::new(self.dim, scale)?.with_offset(self.offset.clone())
    }
}

/// A simplex of the ambient triangulation: base vertex plus ordered label partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermSimplex {
    base: LatticePoint,
    parts: Parts,
}

/// Hashable identity of a canonical edge: base vertex and the first part's labels.
///
/// The second part is the complement, so the pair is injective on canonical edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    base: LatticePoint,
    first: u64,
}

impl PermSimplex {
    /// Builds a simplex from a base vertex and parts given as label lists.
    pub fn new<P, I>(base: &[i64], parts: P) -> Result<Self, LatticeError>
    where
        P: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let n = base.len();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(LatticeError::Dimension(n));
        }
        let mut masks = Parts::new();
        for part in parts {
            let mut m = 0u64;
            for label in part {
                if label > n {
                    return Err(LatticeError::Partition(format!(
                        "label {label} out of range 0..={n}"
                    )));
                }
                m |= 1 << label;
            }
            masks.push(m);
        }
        Self::from_masks(base.iter().copied().collect(), masks)
    }

    fn from_masks(base: LatticePoint, parts: Parts) -> Result<Self, LatticeError> {
        let n = base.len();
        let full = full_mask(n);
        let mut seen = 0u64;
        if parts.len() < 2 {
            return Err(LatticeError::Partition("need at least two parts".into()));
        }
        for &m in &parts {
            if m == 0 {
                return Err(LatticeError::Partition("empty part".into()));
            }
            if m & seen != 0 {
                return Err(LatticeError::Partition("parts overlap".into()));
            }
            seen |= m;
        }
        if seen != full {
            return Err(LatticeError::Partition(format!(
                "parts do not cover 0..={n}"
            )));
        }
        Ok(Self { base, parts })
    }

    /// Ambient dimension `n`.
    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Simplex dimension `k` (number of parts minus one).
    pub fn dim(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    /// Parts as label bitmasks, in cycle order.
    pub fn part_masks(&self) -> &[u64] {
        &self.parts
    }

    /// Parts as ascending label lists, in cycle order.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        self.parts
            .iter()
            .map(|&m| mask_labels(m).collect())
            .collect()
    }

    /// The `k + 1` vertices in cycle order, starting at the base.
    pub fn vertices(&self) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(self.parts.len());
        let mut v = self.base.clone();
        out.push(v.clone());
        for &m in &self.parts[..self.parts.len() - 1] {
            apply_step(&mut v, m);
            out.push(v.clone());
        }
        out
    }

    /// Re-bases at the lexicographically smallest vertex and rotates the partition to match.
    pub fn canonicalize(&self) -> PermSimplex {
        let verts = self.vertices();
        let (j, _) = verts
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .expect("simplex has vertices");
        if j == 0 {
            return self.clone();
        }
        let mut parts = Parts::with_capacity(self.parts.len());
        parts.extend_from_slice(&self.parts[j..]);
        parts.extend_from_slice(&self.parts[..j]);
        PermSimplex {
            base: verts[j].clone(),
            parts,
        }
    }

    pub fn is_canonical(&self) -> bool {
        let top = 1u64 << self.ambient_dim();
        self.parts.last().is_some_and(|&m| m & top != 0)
    }
}

fn full_mask(n: usize) -> u64 {
    if n + 1 == 64 {
        u64::MAX
    } else {
        (1u64 << (n + 1)) - 1
    }
}

fn mask_labels(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| m & (1 << i) != 0)
}

/// Adds the step-vector sum of the labels in `mask` to `v`.
fn apply_step(v: &mut [i64], mask: u64) {
    let n = v.len();
    for (i, c) in v.iter_mut().enumerate() {
        if mask & (1 << i) != 0 {
            *c += 1;
        }
    }
    if mask & (1 << n) != 0 {
        for c in v.iter_mut() {
            *c -= 1;
        }
    }
}

/// Returns the canonical full-dimensional simplex whose closure contains `x`.
///
/// Coordinates are ordered by descending fractional part; equal fractional
/// parts are ordered by ascending coordinate index.
pub fn locate_point<T: Real>(x: &[T], cfg: &LatticeConfig<T>) -> PermSimplex {
    let n = cfg.dim;
    assert_eq!(x.len(), n, "point dimension must match the lattice");
    let mut base = LatticePoint::with_capacity(n);
    let mut frac: SmallVec<[T; 8]> = SmallVec::with_capacity(n);
    for (i, &xi) in x.iter().enumerate() {
        let y = (xi - cfg.offset[i]) / cfg.scale;
        let f = y.floor();
        base.push(f.to_i64().expect("finite coordinate"));
        frac.push(y - f);
    }
    let mut order: SmallVec<[usize; 8]> = (0..n).collect();
    order.sort_by(|&a, &b| {
        frac[b]
            .partial_cmp(&frac[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut parts: Parts = order.iter().map(|&i| 1u64 << i).collect();
    parts.push(1u64 << n);
    PermSimplex { base, parts }
}

/// Maps lattice coordinates to R^n: `scale * v + offset`.
pub fn cartesian<T: Real>(v: &[i64], cfg: &LatticeConfig<T>) -> Vec<T> {
    v.iter()
        .zip(&cfg.offset)
        .map(|(&c, &o)| cfg.scale * T::from_i64(c).expect("lattice coordinate") + o)
        .collect()
}

/// Number of edges of an `n`-simplex, `C(n + 1, 2)`.
pub fn cell_edge_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Number of 2-simplex cofaces of an edge: `(2^|p1| - 2) + (2^|p2| - 2)`.
pub fn coface2_count(e: &PermSimplex) -> usize {
    debug_assert_eq!(e.dim(), 1);
    e.parts.iter().map(|m| (1usize << m.count_ones()) - 2).sum()
}

/// Number of full-dimensional cofaces of an edge: `|p1|! * |p2|!`.
pub fn cellcoface_count(e: &PermSimplex) -> usize {
    debug_assert_eq!(e.dim(), 1);
    e.parts
        .iter()
        .map(|m| (1..=m.count_ones() as usize).product::<usize>())
        .product()
}

/// All edges of a simplex, canonicalized, one per vertex pair.
#[allow(clippy::needless_range_loop)]
fn edges_of_simplex(s: &PermSimplex) -> Vec<PermSimplex> {
    let k = s.dim();
    let verts = s.vertices();
    let full = full_mask(s.ambient_dim());
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for a in 0..=k {
        for b in a + 1..=k {
            let first = s.parts[a..b].iter().fold(0, |acc, m| acc | m);
            let mut parts = Parts::new();
            parts.push(first);
            parts.push(full & !first);
            let e = PermSimplex {
                base: verts[a].clone(),
                parts,
            };
            out.push(e.canonicalize());
        }
    }
    out
}

/// The `C(n + 1, 2)` canonical edges of a full-dimensional cell.
pub fn edges_of_cell(cell: &PermSimplex) -> Vec<PermSimplex> {
    debug_assert_eq!(cell.dim(), cell.ambient_dim());
    edges_of_simplex(cell)
}

/// The three canonical edges of a 2-simplex.
pub fn edges_of_2simplex(t: &PermSimplex) -> [PermSimplex; 3] {
    debug_assert_eq!(t.dim(), 2);
    let [a, b, c]: [PermSimplex; 3] = edges_of_simplex(t)
        .try_into()
        .expect("triangle has three edges");
    [a, b, c]
}

/// All 2-simplex cofaces of an edge, canonicalized.
///
/// Each is obtained by splitting one of the two parts into an ordered pair of
/// non-empty subsets.
pub fn cofaces2_of_edge(e: &PermSimplex) -> Vec<PermSimplex> {
    debug_assert_eq!(e.dim(), 1);
    let (p1, p2) = (e.parts[0], e.parts[1]);
    let mut out = Vec::with_capacity(coface2_count(e));
    let mut push = |parts: [u64; 3]| {
        let t = PermSimplex {
            base: e.base.clone(),
            parts: parts.iter().copied().collect(),
        };
        out.push(t.canonicalize());
    };
    for_each_proper_submask(p1, |a| push([a, p1 & !a, p2]));
    for_each_proper_submask(p2, |a| push([p1, a, p2 & !a]));
    out
}

fn for_each_proper_submask(m: u64, mut f: impl FnMut(u64)) {
    let mut a = (m.wrapping_sub(1)) & m;
    while a != 0 {
        f(a);
        a = (a - 1) & m;
    }
}

/// All full-dimensional cofaces of an edge: every ordering of the labels of
/// `p1` followed by every ordering of `p2`, as singleton parts.
pub fn cellcofaces_of_edge(e: &PermSimplex) -> Vec<PermSimplex> {
    debug_assert_eq!(e.dim(), 1);
    let l1: Vec<usize> = mask_labels(e.parts[0]).collect();
    let l2: Vec<usize> = mask_labels(e.parts[1]).collect();
    let mut out = Vec::with_capacity(cellcoface_count(e));
    for o1 in l1.iter().permutations(l1.len()) {
        for o2 in l2.iter().permutations(l2.len()) {
            let parts: Parts = o1.iter().chain(&o2).map(|&&i| 1u64 << i).collect();
            let cell = PermSimplex {
                base: e.base.clone(),
                parts,
            };
            out.push(cell.canonicalize());
        }
    }
    out
}

/// The canonical edge joining two lattice points, if they are adjacent in the triangulation.
pub fn edge_between(a: &[i64], b: &[i64]) -> Option<PermSimplex> {
    let n = a.len();
    if n != b.len() || !(2..=MAX_DIM).contains(&n) {
        return None;
    }
    let mut up = 0u64;
    let mut down = 0u64;
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        match y - x {
            0 => {}
            1 => up |= 1 << i,
            -1 => down |= 1 << i,
            _ => return None,
        }
    }
    let first = match (up, down) {
        (0, 0) => return None,
        (u, 0) => u,
        (0, d) => full_mask(n) & !d,
        _ => return None,
    };
    let mut parts = Parts::new();
    parts.push(first);
    parts.push(full_mask(n) & !first);
    Some(
        PermSimplex {
            base: a.iter().copied().collect(),
            parts,
        }
        .canonicalize(),
    )
}

/// Hash key of a canonical edge.
pub fn edge_key(e: &PermSimplex) -> EdgeKey {
    debug_assert_eq!(e.dim(), 1);
    debug_assert!(e.is_canonical(), "edge_key requires a canonical edge");
    EdgeKey {
        base: e.base.clone(),
        first: e.parts[0],
    }
}

impl EdgeKey {
    /// Rebuilds the canonical edge.
    pub fn to_edge(&self) -> PermSimplex {
        let n = self.base.len();
        let mut parts = Parts::new();
        parts.push(self.first);
        parts.push(full_mask(n) & !self.first);
        PermSimplex {
            base: self.base.clone(),
            parts,
        }
    }

    /// The two endpoints in lattice coordinates, base first.
    pub fn endpoints(&self) -> (LatticePoint, LatticePoint) {
        let mut b = self.base.clone();
        apply_step(&mut b, self.first);
        (self.base.clone(), b)
    }
}

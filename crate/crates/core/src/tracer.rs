//! Manifold tracing over the ambient triangulation.
//!
//! Tracing runs as a breadth-first search over lattice edges that cross the
//! manifold. Every step is a sequence of data-parallel stages over
//! preallocated buffers (see [`crate::stage`]):
//!
//! * seed location: seed → cell (one slot per seed), cell → crossing edges
//!   (`C(n+1, 2)` slots per cell), hash deduplication;
//! * expansion: frontier edge → 2-simplex cofaces (exact coface count), coface →
//!   unvisited crossing edge (one slot per coface), hash deduplication against
//!   the visited set.
//!
//! A coface containing a crossing edge has exactly two crossing edges under the
//! binary sign convention, so one slot per coface always suffices; a coface that
//! needs more is reported as an overflow.

use std::collections::HashMap;
use std::convert::Infallible;
use std::sync::atomic::{AtomicUsize, Ordering};

use indexmap::IndexSet;
use thiserror::Error;

use crate::lattice::{
    cartesian, cell_edge_count, coface2_count, cofaces2_of_edge, edges_of_2simplex, edges_of_cell,
    locate_point, LatticeConfig, LatticePoint, PermSimplex,
};
use crate::manifold::{bisect, is_positive, ImplicitManifold};
use crate::region::BoxRegion;
use crate::scalar::Real;
use crate::stage::{map_into_slots, with_workers, StageStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("no seed points given")]
    NoSeeds,
    #[error("seed {index} has dimension {got}, expected {expected}")]
    SeedDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("no located cell has a crossing edge (seeds too far from the zero set or resolution too coarse)")]
    NoIntersectingEdges,
    #[error("coface {coface:?} yields {count} unvisited crossing edges; the one-new-edge bound is violated")]
    CofaceOverflow {
        coface: Box<PermSimplex>,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfig<T> {
    pub lattice: LatticeConfig<T>,
    /// Edges with an endpoint outside this box are dropped.
    pub bounds: Option<BoxRegion<T>>,
    pub max_edges: usize,
    pub workers: usize,
    /// Bisection bracket length for intersection points.
    pub eps: T,
}

impl<T: Real> TraceConfig<T> {
    pub fn new(lattice: LatticeConfig<T>) -> Self {
        let eps = lattice.scale() * T::lit(1e-6);
        Self {
            lattice,
            bounds: None,
            max_edges: 10_000_000,
            workers: 1,
            eps,
        }
    }

    pub fn with_bounds(mut self, bounds: BoxRegion<T>) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_eps(mut self, eps: T) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_max_edges(mut self, max_edges: usize) -> Self {
        self.max_edges = max_edges;
        self
    }

    fn in_bounds(&self, x: &[T]) -> bool {
        self.bounds.as_ref().is_none_or(|b| b.contains(x))
    }
}

/// Edges of one BFS level.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frontier {
    pub edges: Vec<PermSimplex>,
    /// Slots preallocated by the stage that produced these edges.
    pub capacity: usize,
}

impl Frontier {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Every edge discovered so far, in discovery order.
#[derive(Debug, Clone, Default)]
pub struct Visited {
    set: IndexSet<PermSimplex>,
}

impl Visited {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, e: &PermSimplex) -> bool {
        self.set.contains(e)
    }

    pub fn index_of(&self, e: &PermSimplex) -> Option<usize> {
        self.set.get_index_of(e)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// Returns `false` if already present.
    pub fn insert(&mut self, e: PermSimplex) -> bool {
        self.set.insert(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PermSimplex> {
        self.set.iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStats {
    pub seed_cells: usize,
    pub initial_edges: usize,
    pub levels: usize,
    pub dropped_out_of_box: usize,
    pub two_edge_violations: usize,
    pub stages: Vec<StageStats>,
}

impl Default for TraceStats {
    fn default() -> Self {
        Self {
            seed_cells: 0,
            initial_edges: 0,
            levels: 0,
            dropped_out_of_box: 0,
            two_edge_violations: 0,
            stages: [
                "locate_cells",
                "cell_edges",
                "edge_cofaces",
                "coface_edges",
                "intersections",
                "closure",
                "vertex_probes",
            ]
            .into_iter()
            .map(StageStats::new)
            .collect(),
        }
    }
}

impl TraceStats {
    fn stage(&mut self, i: usize) -> &mut StageStats {
        &mut self.stages[i]
    }
}

const ST_LOCATE: usize = 0;
const ST_CELL_EDGES: usize = 1;
const ST_COFACES: usize = 2;
const ST_COFACE_EDGES: usize = 3;
const ST_POINTS: usize = 4;
const ST_CLOSURE: usize = 5;
const ST_PROBES: usize = 6;

/// Whether the traced edge set closes up on itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClosureReport {
    /// Coface partners that cross the manifold but were never visited.
    pub open_ends: usize,
    /// Coface partners dropped because they leave the bounding box.
    pub box_ends: usize,
    /// Visited-edge cofaces with a crossing-edge count other than two.
    pub two_edge_violations: usize,
    /// Smallest number of in-box polyline neighbors of any point (counting box ends).
    pub min_degree: usize,
    pub max_degree: usize,
}

impl ClosureReport {
    /// Closed relative to the bounding box: the only open ends lie on the box.
    pub fn is_closed(&self) -> bool {
        self.open_ends == 0 && self.two_edge_violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct TraceResult<T> {
    lattice: LatticeConfig<T>,
    edges: Vec<PermSimplex>,
    points: Vec<Vec<T>>,
    residuals: Vec<T>,
    adjacency: Vec<(usize, usize)>,
    closure: ClosureReport,
    complete: bool,
    stats: TraceStats,
}

impl<T: Real> TraceResult<T> {
    pub fn lattice(&self) -> &LatticeConfig<T> {
        &self.lattice
    }

    /// Canonical crossing edges in discovery order.
    pub fn edges(&self) -> &[PermSimplex] {
        &self.edges
    }

    /// One intersection point per edge, same order as [`Self::edges`].
    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    /// `|F|` at each point.
    pub fn residuals(&self) -> &[T] {
        &self.residuals
    }

    /// Point index pairs that share a 2-simplex coface, sorted.
    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    pub fn closure(&self) -> &ClosureReport {
        &self.closure
    }

    /// `false` when the edge cap stopped the search early.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn stats(&self) -> &TraceStats {
        &self.stats
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// Edge set as sorted vertex pairs in lattice coordinates.
    pub fn edge_vertex_pairs(&self) -> Vec<(Vec<i64>, Vec<i64>)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let v = e.vertices();
                (v[0].to_vec(), v[1].to_vec())
            })
            .collect();
        out.sort();
        out
    }
}

/// Sign and box membership of a lattice vertex.
fn probe<T: Real, M: ImplicitManifold<T> + ?Sized>(
    v: &[i64],
    m: &M,
    cfg: &TraceConfig<T>,
) -> (bool, bool) {
    let x = cartesian(v, &cfg.lattice);
    (is_positive(m.value(&x)), cfg.in_bounds(&x))
}

/// Probe results of every lattice vertex touched so far in one trace.
#[derive(Default)]
struct VertexCache {
    probes: HashMap<LatticePoint, (bool, bool)>,
}

impl VertexCache {
    /// Probes the not-yet-seen vertices of `simplices` in one parallel stage.
    fn fill<'a, T: Real, M: ImplicitManifold<T> + ?Sized>(
        &mut self,
        simplices: impl IntoIterator<Item = &'a PermSimplex>,
        m: &M,
        cfg: &TraceConfig<T>,
        stats: &mut StageStats,
    ) {
        let mut missing: IndexSet<LatticePoint> = IndexSet::new();
        for s in simplices {
            for v in s.vertices() {
                if !self.probes.contains_key(&v) {
                    missing.insert(v);
                }
            }
        }
        let missing: Vec<LatticePoint> = missing.into_iter().collect();
        let values: Vec<(bool, bool)> = map_into_slots(
            &missing,
            |_| 1,
            |v, slot| {
                slot[0] = Some(probe(v, m, cfg));
                Ok::<_, Infallible>(())
            },
            stats,
        )
        .unwrap_or_else(|e| match e {});
        self.probes.extend(missing.into_iter().zip(values));
    }

    fn get(&self, v: &LatticePoint) -> (bool, bool) {
        self.probes[v]
    }
}

fn locate_edges_with<T: Real, M: ImplicitManifold<T> + ?Sized>(
    seeds: &[Vec<T>],
    m: &M,
    cfg: &TraceConfig<T>,
    cache: &mut VertexCache,
    stats: &mut TraceStats,
) -> Result<Frontier, TraceError> {
    if seeds.is_empty() {
        return Err(TraceError::NoSeeds);
    }
    let n = cfg.lattice.dim();
    if let Some((index, s)) = seeds.iter().enumerate().find(|(_, s)| s.len() != n) {
        return Err(TraceError::SeedDimension {
            index,
            expected: n,
            got: s.len(),
        });
    }

    let cells: Vec<PermSimplex> = map_into_slots(
        seeds,
        |_| 1,
        |seed, slot| {
            slot[0] = Some(locate_point(seed, &cfg.lattice));
            Ok::<_, TraceError>(())
        },
        stats.stage(ST_LOCATE),
    )?;
    stats.seed_cells = cells.len();
    cache.fill(&cells, m, cfg, stats.stage(ST_PROBES));
    let cache = &*cache;

    let dropped = AtomicUsize::new(0);
    let crossing: Vec<PermSimplex> = map_into_slots(
        &cells,
        |_| cell_edge_count(n),
        |cell, slots| {
            let probes: Vec<(bool, bool)> = cell.vertices().iter().map(|v| cache.get(v)).collect();
            let edges = edges_of_cell(cell);
            let mut k = 0;
            for a in 0..=n {
                for b in a + 1..=n {
                    if probes[a].0 != probes[b].0 {
                        if probes[a].1 && probes[b].1 {
                            slots[k] = Some(edges[k].clone());
                        } else {
                            dropped.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                    k += 1;
                }
            }
            Ok::<_, TraceError>(())
        },
        stats.stage(ST_CELL_EDGES),
    )?;
    stats.dropped_out_of_box += dropped.into_inner();

    let capacity = cells.len() * cell_edge_count(n);
    let mut seen = IndexSet::with_capacity(crossing.len());
    for e in crossing {
        seen.insert(e);
    }
    Ok(Frontier {
        edges: seen.into_iter().collect(),
        capacity,
    })
}

fn expand_frontier_with<T: Real, M: ImplicitManifold<T> + ?Sized>(
    frontier: &Frontier,
    visited: &mut Visited,
    m: &M,
    cfg: &TraceConfig<T>,
    cache: &mut VertexCache,
    stats: &mut TraceStats,
) -> Result<Frontier, TraceError> {
    if frontier.is_empty() {
        return Ok(Frontier::default());
    }
    let cofaces: Vec<PermSimplex> = map_into_slots(
        &frontier.edges,
        coface2_count,
        |e, slots| {
            for (s, t) in slots.iter_mut().zip(cofaces2_of_edge(e)) {
                *s = Some(t);
            }
            Ok::<_, TraceError>(())
        },
        stats.stage(ST_COFACES),
    )?;
    cache.fill(&cofaces, m, cfg, stats.stage(ST_PROBES));
    let cache = &*cache;

    let dropped = AtomicUsize::new(0);
    let violations = AtomicUsize::new(0);
    let seen: &Visited = visited;
    let fresh: Vec<PermSimplex> = map_into_slots(
        &cofaces,
        |_| 1,
        |t, slot| {
            let probes: Vec<(bool, bool)> = t.vertices().iter().map(|v| cache.get(v)).collect();
            let edges = edges_of_2simplex(t);
            let mut crossing = 0;
            let mut new_edges = 0;
            for (k, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                if probes[a].0 == probes[b].0 {
                    continue;
                }
                crossing += 1;
                if !(probes[a].1 && probes[b].1) {
                    dropped.fetch_add(1, Ordering::Relaxed);
                } else if !seen.contains(&edges[k]) {
                    new_edges += 1;
                    if slot[0].is_none() {
                        slot[0] = Some(edges[k].clone());
                    }
                }
            }
            if crossing != 2 {
                violations.fetch_add(1, Ordering::Relaxed);
            }
            if new_edges > 1 {
                return Err(TraceError::CofaceOverflow {
                    coface: Box::new(t.clone()),
                    count: new_edges,
                });
            }
            Ok(())
        },
        stats.stage(ST_COFACE_EDGES),
    )?;
    stats.dropped_out_of_box += dropped.into_inner();
    stats.two_edge_violations += violations.into_inner();

    let capacity = cofaces.len();
    let mut next = Vec::with_capacity(fresh.len());
    for e in fresh {
        if visited.len() >= cfg.max_edges {
            break;
        }
        if visited.insert(e.clone()) {
            next.push(e);
        }
    }
    Ok(Frontier {
        edges: next,
        capacity,
    })
}

/// Crossing edges of the cells that contain the seeds, deduplicated.
pub fn locate_edges<T: Real, M: ImplicitManifold<T> + ?Sized>(
    seeds: &[Vec<T>],
    m: &M,
    cfg: &TraceConfig<T>,
) -> Result<Frontier, TraceError> {
    let mut stats = TraceStats::default();
    with_workers(cfg.workers, || {
        locate_edges_with(seeds, m, cfg, &mut VertexCache::default(), &mut stats)
    })
}

/// One BFS level: unvisited crossing edges that share a 2-simplex with the frontier.
///
/// New edges are added to `visited`.
pub fn expand_frontier<T: Real, M: ImplicitManifold<T> + ?Sized>(
    frontier: &Frontier,
    visited: &mut Visited,
    m: &M,
    cfg: &TraceConfig<T>,
) -> Result<Frontier, TraceError> {
    let mut stats = TraceStats::default();
    with_workers(cfg.workers, || {
        expand_frontier_with(
            frontier,
            visited,
            m,
            cfg,
            &mut VertexCache::default(),
            &mut stats,
        )
    })
}

/// Traces the connected pieces of the manifold reachable from the seeds.
pub fn trace<T: Real, M: ImplicitManifold<T> + ?Sized>(
    seeds: &[Vec<T>],
    m: &M,
    cfg: &TraceConfig<T>,
) -> Result<TraceResult<T>, TraceError> {
    with_workers(cfg.workers, || trace_inner(seeds, m, cfg))
}

fn trace_inner<T: Real, M: ImplicitManifold<T> + ?Sized>(
    seeds: &[Vec<T>],
    m: &M,
    cfg: &TraceConfig<T>,
) -> Result<TraceResult<T>, TraceError> {
    let mut stats = TraceStats::default();
    let mut visited = Visited::new();
    let mut cache = VertexCache::default();
    let initial = locate_edges_with(seeds, m, cfg, &mut cache, &mut stats)?;
    if initial.is_empty() {
        return Err(TraceError::NoIntersectingEdges);
    }
    let mut frontier = Frontier {
        edges: Vec::with_capacity(initial.len()),
        capacity: initial.capacity,
    };
    for e in initial.edges {
        if visited.len() >= cfg.max_edges {
            break;
        }
        if visited.insert(e.clone()) {
            frontier.edges.push(e);
        }
    }
    stats.initial_edges = frontier.len();

    while !frontier.is_empty() && visited.len() < cfg.max_edges {
        frontier = expand_frontier_with(&frontier, &mut visited, m, cfg, &mut cache, &mut stats)?;
        stats.levels += 1;
    }
    let complete = frontier.is_empty();
    if !complete {
        log::warn!("trace stopped at the edge cap of {}", cfg.max_edges);
    }

    let edges: Vec<PermSimplex> = visited.iter().cloned().collect();
    let (adjacency, closure) = closure_pass(&visited, m, cfg, &mut cache, &mut stats)?;
    let cache = &cache;
    let hits: Vec<(Vec<T>, T)> = map_into_slots(
        &edges,
        |_| 1,
        |e, slot| {
            let v = e.vertices();
            let a = cartesian(&v[0], &cfg.lattice);
            let b = cartesian(&v[1], &cfg.lattice);
            let hit = bisect(m, &a, &b, cache.get(&v[0]).0, cfg.eps);
            slot[0] = Some((hit.point, hit.residual));
            Ok::<_, TraceError>(())
        },
        stats.stage(ST_POINTS),
    )?;
    let (points, residuals) = hits.into_iter().unzip();

    Ok(TraceResult {
        lattice: cfg.lattice.clone(),
        edges,
        points,
        residuals,
        adjacency,
        closure,
        complete,
        stats,
    })
}

enum Partner {
    Edge(usize),
    Open,
    OutOfBox,
    Violation,
}

/// For every visited edge and each of its cofaces, finds the other crossing edge.
fn closure_pass<T: Real, M: ImplicitManifold<T> + ?Sized>(
    visited: &Visited,
    m: &M,
    cfg: &TraceConfig<T>,
    cache: &mut VertexCache,
    stats: &mut TraceStats,
) -> Result<(Vec<(usize, usize)>, ClosureReport), TraceError> {
    let cofaces: Vec<PermSimplex> = visited.iter().flat_map(cofaces2_of_edge).collect();
    cache.fill(&cofaces, m, cfg, stats.stage(ST_PROBES));
    drop(cofaces);
    let cache = &*cache;
    let edges: Vec<(usize, &PermSimplex)> = visited.iter().enumerate().collect();
    let partners: Vec<(usize, Partner)> = map_into_slots(
        &edges,
        |(_, e)| coface2_count(e),
        |&(i, e), slots| {
            for (slot, t) in slots.iter_mut().zip(cofaces2_of_edge(e)) {
                let probes: Vec<(bool, bool)> = t.vertices().iter().map(|v| cache.get(v)).collect();
                let tri_edges = edges_of_2simplex(&t);
                let mut crossing = 0;
                let mut other = None;
                for (k, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                    if probes[a].0 != probes[b].0 {
                        crossing += 1;
                        if &tri_edges[k] != e {
                            other = Some((k, probes[a].1 && probes[b].1));
                        }
                    }
                }
                let p = match (crossing, other) {
                    (2, Some((_, false))) => Partner::OutOfBox,
                    (2, Some((k, true))) => match visited.index_of(&tri_edges[k]) {
                        Some(j) => Partner::Edge(j),
                        None => Partner::Open,
                    },
                    _ => Partner::Violation,
                };
                *slot = Some((i, p));
            }
            Ok::<_, TraceError>(())
        },
        stats.stage(ST_CLOSURE),
    )?;

    let mut report = ClosureReport::default();
    let mut degree = vec![0usize; visited.len()];
    let mut adjacency = Vec::with_capacity(partners.len() / 2);
    for (i, p) in partners {
        match p {
            Partner::Edge(j) => {
                degree[i] += 1;
                adjacency.push((i.min(j), i.max(j)));
            }
            Partner::OutOfBox => {
                degree[i] += 1;
                report.box_ends += 1;
            }
            Partner::Open => report.open_ends += 1,
            Partner::Violation => report.two_edge_violations += 1,
        }
    }
    adjacency.sort_unstable();
    adjacency.dedup();
    report.min_degree = degree.iter().copied().min().unwrap_or(0);
    report.max_degree = degree.iter().copied().max().unwrap_or(0);
    Ok((adjacency, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::AnalyticManifold;

    fn plane_x(offset: f64) -> AnalyticManifold<f64> {
        AnalyticManifold::Plane {
            normal: vec![1.0, 0.0],
            offset,
        }
    }

    #[test]
    fn seed_cell_of_plane() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 1.0).unwrap());
        let f = locate_edges(&[vec![0.25, 0.5]], &plane_x(0.25), &cfg).unwrap();
        // cell ([0,0], {{1},{0},{2}}) has vertices (0,0), (0,1), (1,1);
        // x = 0.25 separates (1,1) from the other two.
        let mut pairs: Vec<_> = f.edges.iter().map(|e| e.vertices()).collect();
        pairs.sort();
        let expect: Vec<Vec<Vec<i64>>> =
            vec![vec![vec![0, 0], vec![1, 1]], vec![vec![0, 1], vec![1, 1]]];
        assert_eq!(
            pairs
                .iter()
                .map(|p| p.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            expect
        );
        assert_eq!(f.capacity, 3);
    }

    #[test]
    fn duplicate_seeds_are_harmless() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 0.5).unwrap());
        let m = AnalyticManifold::sphere(2, 1.0);
        let one = locate_edges(&[vec![1.0, 0.0]], &m, &cfg).unwrap();
        let two = locate_edges(&[vec![1.0, 0.0], vec![1.0, 0.0]], &m, &cfg).unwrap();
        assert_eq!(one.edges, two.edges);
        assert!(!one.is_empty());
    }

    #[test]
    fn plane_frontier_grows_by_two() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 1.0).unwrap());
        let m = plane_x(0.25);
        let e = PermSimplex::new(&[0, 0], [vec![0], vec![1, 2]]).unwrap();
        let mut visited = Visited::new();
        visited.insert(e.clone());
        let f = Frontier {
            edges: vec![e],
            capacity: 1,
        };
        let next = expand_frontier(&f, &mut visited, &m, &cfg).unwrap();
        assert_eq!(next.len(), 2);
        assert_eq!(next.capacity, 2);
        assert_eq!(visited.len(), 3);
        let empty = expand_frontier(&Frontier::default(), &mut visited, &m, &cfg).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn circle_trace_closes() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 0.25).unwrap());
        let m = AnalyticManifold::sphere(2, 1.0);
        let r = trace(&[vec![1.0, 0.0]], &m, &cfg).unwrap();
        assert!(r.is_complete());
        assert!(r.closure().is_closed());
        assert_eq!((r.closure().min_degree, r.closure().max_degree), (2, 2));
        assert_eq!(r.adjacency().len(), r.len());
        let two = trace(&[vec![1.0, 0.0], vec![0.0, -1.0]], &m, &cfg).unwrap();
        assert_eq!(two.edge_vertex_pairs(), r.edge_vertex_pairs());
    }

    #[test]
    fn bounding_box_clips_and_counts() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 0.25).unwrap())
            .with_bounds(BoxRegion::new(vec![0.0, -2.0], vec![2.0, 2.0]).unwrap());
        let m = AnalyticManifold::sphere(2, 1.0);
        let r = trace(&[vec![1.0, 0.0]], &m, &cfg).unwrap();
        assert!(r.closure().is_closed());
        assert!(r.closure().box_ends > 0);
        assert!(r.points().iter().all(|p| p[0] >= 0.0));
    }

    #[test]
    fn edge_cap_flags_incomplete() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 0.25).unwrap()).with_max_edges(5);
        let m = AnalyticManifold::sphere(2, 1.0);
        let r = trace(&[vec![1.0, 0.0]], &m, &cfg).unwrap();
        assert!(!r.is_complete());
        assert_eq!(r.len(), 5);
        assert!(!r.closure().is_closed());
    }

    #[test]
    fn far_seed_is_an_error() {
        let cfg = TraceConfig::new(LatticeConfig::new(2, 0.25).unwrap());
        let m = AnalyticManifold::sphere(2, 1.0);
        assert_eq!(
            trace(&[vec![5.0, 5.0]], &m, &cfg).unwrap_err(),
            TraceError::NoIntersectingEdges
        );
        assert_eq!(trace(&[], &m, &cfg).unwrap_err(), TraceError::NoSeeds);
    }
}

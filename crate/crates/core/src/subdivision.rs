//! Batch triangulation: symmetric `k`-fold subdivision of coarse cells.
//!
//! A coarse cell at scale `k * lambda` is refined with a local unit-lattice
//! triangulation whose vertices `v'` satisfy `k >= v'_0 >= … >= v'_{n-1} >= 0`.
//! The local edge list is computed once per `(n, k)` and reused for every cell.
//! Local vertex `v'` of cell `(base, parts)` sits at fine lattice coordinate
//! `k * base + sum_i v'_i * step(part_i)`, which is exactly a vertex of the
//! scale-`lambda` triangulation, so refined edges coincide with the edges a
//! direct trace at `lambda` would visit.

use std::collections::{HashMap, VecDeque};
use std::convert::Infallible;
use std::error::Error as StdError;
use std::ops::Range;
use std::time::{Duration, Instant};

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::lattice::{
    cartesian, cellcoface_count, cellcofaces_of_edge, cofaces2_of_edge, edge_between, edge_key,
    edges_of_2simplex, locate_point, EdgeKey, LatticeConfig, LatticePoint, PermSimplex,
};
use crate::manifold::{bisect, is_positive, ImplicitManifold};
use crate::region::BoxRegion;
use crate::scalar::Real;
use crate::stage::{map_into_slots, with_workers, StageStats};
use crate::tracer::TraceResult;

#[derive(Debug, Error)]
pub enum SubdivisionError {
    #[error("subdivision needs n >= 2 and k >= 1, got n = {n}, k = {k}")]
    Parameters { n: usize, k: i64 },
    #[error("local vertex {vertex:?} lies outside the cell for k = {k}")]
    Containment { vertex: Vec<i64>, k: i64 },
    #[error("one cell needs {cell_bytes} bytes but the budget is {budget} bytes; raise the budget or lower k")]
    Budget { cell_bytes: usize, budget: usize },
    #[error("cell dimension {got} does not match template dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("collision check failed in batch {batch}: {source}")]
    Checker {
        batch: usize,
        #[source]
        source: Box<dyn StdError + Send + Sync>,
    },
}

/// Closed containment of a local vertex in the subdivided cell, integers only.
pub fn containment_check(v: &[i64], k: i64) -> bool {
    let mut upper = k;
    for &c in v {
        if c > upper {
            return false;
        }
        upper = c;
    }
    upper >= 0
}

/// Local edge list of the `k`-fold subdivision of one `n`-simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionTemplate {
    n: usize,
    k: i64,
    edges: Vec<(LatticePoint, LatticePoint)>,
}

impl SubdivisionTemplate {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn factor(&self) -> i64 {
        self.k
    }

    /// Local edges as `(base, other)` endpoint pairs, in flood-fill order.
    pub fn edges(&self) -> &[(LatticePoint, LatticePoint)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Distinct local vertices touched by the template.
    pub fn vertex_count(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|(a, b)| [a, b])
            .collect::<IndexSet<_>>()
            .len()
    }
}

/// Flood fill from the edge `([0,…,0], {{0}, {1,…,n}})` through 2-simplex
/// cofaces, keeping edges whose endpoints both pass [`containment_check`].
pub fn build_template(n: usize, k: i64) -> Result<SubdivisionTemplate, SubdivisionError> {
    if n < 2 || k < 1 {
        return Err(SubdivisionError::Parameters { n, k });
    }
    let first = PermSimplex::new(&vec![0; n], [vec![0], (1..=n).collect()])
        .map_err(|_| SubdivisionError::Parameters { n, k })?;
    let inside = |e: &PermSimplex| e.vertices().iter().all(|v| containment_check(v, k));
    let mut seen: IndexSet<PermSimplex> = IndexSet::new();
    let mut queue = VecDeque::new();
    seen.insert(first.clone());
    queue.push_back(first);
    while let Some(e) = queue.pop_front() {
        for t in cofaces2_of_edge(&e) {
            for f in edges_of_2simplex(&t) {
                if !seen.contains(&f) && inside(&f) {
                    seen.insert(f.clone());
                    queue.push_back(f);
                }
            }
        }
    }
    let edges = seen
        .into_iter()
        .map(|e| {
            let mut v = e.vertices().into_iter();
            (v.next().unwrap(), v.next().unwrap())
        })
        .collect();
    Ok(SubdivisionTemplate { n, k, edges })
}

/// Barycentric weights `(1 - v'_0/k, (v'_0 - v'_1)/k, …, v'_{n-1}/k)`.
pub fn barycentric_weights<T: Real>(v: &[i64], k: i64) -> Vec<T> {
    let kf = T::from_i64(k).expect("k representable");
    let c = |x: i64| T::from_i64(x).expect("coordinate representable");
    let mut w = Vec::with_capacity(v.len() + 1);
    let mut prev = k;
    for &x in v {
        w.push(c(prev - x) / kf);
        prev = x;
    }
    w.push(c(prev) / kf);
    w
}

/// Cartesian position of a local vertex via barycentric blending of the
/// coarse cell's vertices (taken in cycle order).
pub fn local_to_global<T: Real>(
    v: &[i64],
    cell: &PermSimplex,
    k: i64,
    coarse: &LatticeConfig<T>,
) -> Result<Vec<T>, SubdivisionError> {
    if v.len() != cell.ambient_dim() {
        return Err(SubdivisionError::Dimension {
            expected: cell.ambient_dim(),
            got: v.len(),
        });
    }
    if !containment_check(v, k) {
        return Err(SubdivisionError::Containment {
            vertex: v.to_vec(),
            k,
        });
    }
    let w = barycentric_weights::<T>(v, k);
    let mut out = vec![T::zero(); v.len()];
    for (wi, vert) in w.iter().zip(cell.vertices()) {
        for (o, x) in out.iter_mut().zip(cartesian(&vert, coarse)) {
            *o = *o + *wi * x;
        }
    }
    Ok(out)
}

/// Fine-lattice coordinates of a local vertex: `k * base + sum_i v'_i * step(part_i)`.
pub fn local_to_lattice(v: &[i64], cell: &PermSimplex, k: i64) -> LatticePoint {
    let n = cell.ambient_dim();
    let mut out: LatticePoint = cell.base().iter().map(|&b| b * k).collect();
    for (&c, &mask) in v.iter().zip(cell.part_masks()) {
        if c == 0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *o += c;
            }
        }
        if mask & (1 << n) != 0 {
            for o in out.iter_mut() {
                *o -= c;
            }
        }
    }
    out
}

/// Full-dimensional cofaces of every traced edge, deduplicated.
pub fn coarse_cells<T: Real>(trace: &TraceResult<T>) -> Vec<PermSimplex> {
    cells_of_edges(trace.edges())
}

/// Full-dimensional cofaces of `edges` in first-seen order, without repeats.
pub fn cells_of_edges(edges: &[PermSimplex]) -> Vec<PermSimplex> {
    let mut stats = StageStats::new("cell_cofaces");
    let cells: Vec<PermSimplex> = map_into_slots(
        edges,
        cellcoface_count,
        |e, slots| {
            for (s, c) in slots.iter_mut().zip(cellcofaces_of_edge(e)) {
                *s = Some(c);
            }
            Ok::<_, Infallible>(())
        },
        &mut stats,
    )
    .unwrap_or_else(|e| match e {});
    cells
        .into_iter()
        .collect::<IndexSet<_>>()
        .into_iter()
        .collect()
}

/// Bytes per refined edge record: two endpoints, one point, one label byte.
pub fn edge_record_bytes<T>(n: usize) -> usize {
    3 * n * std::mem::size_of::<T>() + 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub batches: Vec<Range<usize>>,
    pub cell_bytes: usize,
    pub budget: usize,
}

/// Greedy in-order packing of `cell_count` cells into budget-sized batches.
pub fn plan_batches<T>(
    cell_count: usize,
    template: &SubdivisionTemplate,
    budget_bytes: usize,
) -> Result<BatchPlan, SubdivisionError> {
    let cell_bytes = template.len() * edge_record_bytes::<T>(template.n);
    if cell_bytes > budget_bytes {
        return Err(SubdivisionError::Budget {
            cell_bytes,
            budget: budget_bytes,
        });
    }
    let per_batch = (budget_bytes / cell_bytes).max(1);
    let batches = (0..cell_count)
        .step_by(per_batch)
        .map(|s| s..(s + per_batch).min(cell_count))
        .collect();
    Ok(BatchPlan {
        batches,
        cell_bytes,
        budget: budget_bytes,
    })
}

/// Collision labels for a batch of configurations (`true` = in collision).
pub trait PointChecker<T>: Sync {
    type Error: StdError + Send + Sync + 'static;

    fn check(&self, points: &[Vec<T>]) -> Result<Vec<bool>, Self::Error>;
}

/// Every point is free.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoObstacles;

impl<T> PointChecker<T> for NoObstacles {
    type Error = Infallible;

    fn check(&self, points: &[Vec<T>]) -> Result<Vec<bool>, Infallible> {
        Ok(vec![false; points.len()])
    }
}

/// Adapts a per-point predicate.
pub struct PredicateChecker<F>(pub F);

impl<T, F: Fn(&[T]) -> bool + Sync> PointChecker<T> for PredicateChecker<F> {
    type Error = Infallible;

    fn check(&self, points: &[Vec<T>]) -> Result<Vec<bool>, Infallible> {
        Ok(points.iter().map(|p| (self.0)(p)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineConfig<T> {
    /// Target (fine) triangulation; coarse cells live at `k` times its scale.
    pub fine: LatticeConfig<T>,
    pub k: i64,
    pub eps: T,
    pub budget_bytes: usize,
    pub workers: usize,
    pub bounds: Option<BoxRegion<T>>,
    /// Also refine coarse cells that hold fine crossings next to found ones,
    /// which the coarse sign pattern alone can miss.
    pub fill_gaps: bool,
}

impl<T: Real> RefineConfig<T> {
    pub fn new(fine: LatticeConfig<T>, k: i64) -> Self {
        let eps = fine.scale() * T::lit(1e-6);
        Self {
            fine,
            k,
            eps,
            budget_bytes: 64 << 20,
            workers: 1,
            bounds: None,
            fill_gaps: true,
        }
    }

    /// Lattice of the coarse cells.
    pub fn coarse(&self) -> LatticeConfig<T> {
        self.fine
            .rescaled(self.fine.scale() * T::from_i64(self.k).expect("k representable"))
            .expect("positive scale")
    }

    /// Point-merge radius `lambda_coarse / (10 k)`.
    pub fn dedup_radius(&self) -> T {
        self.fine.scale() / T::lit(10.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchStats {
    pub cells: usize,
    pub local_edges: usize,
    pub unique_vertices: usize,
    pub crossing_edges: usize,
    pub free_points: usize,
    pub triangulate_time: Duration,
    pub check_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedResult<T> {
    edges: Vec<(LatticePoint, LatticePoint)>,
    points: Vec<Vec<T>>,
    in_collision: Vec<bool>,
    pub batches: Vec<BatchStats>,
    pub dropped_out_of_box: usize,
    /// Cells added beyond the requested ones to close gaps in the fine mesh.
    pub gap_cells: usize,
}

impl<T: Real> RefinedResult<T> {
    /// Fine intersection points, ordered by their fine lattice edge.
    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    /// Fine lattice edge of each point, lexicographically smaller endpoint first.
    pub fn edges(&self) -> &[(LatticePoint, LatticePoint)] {
        &self.edges
    }

    pub fn labels(&self) -> &[bool] {
        &self.in_collision
    }

    pub fn free_points(&self) -> Vec<Vec<T>> {
        self.points
            .iter()
            .zip(&self.in_collision)
            .filter(|(_, &c)| !c)
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Pairs of points whose fine edges bound a common fine triangle.
    pub fn adjacency(&self) -> Vec<(usize, usize)> {
        let canonical: Vec<PermSimplex> = self
            .edges
            .iter()
            .map(|(a, b)| edge_between(a, b).expect("refined edges join adjacent lattice points"))
            .collect();
        let index: HashMap<EdgeKey, usize> = canonical
            .iter()
            .enumerate()
            .map(|(i, e)| (edge_key(e), i))
            .collect();
        let mut out = Vec::new();
        for (i, e) in canonical.iter().enumerate() {
            for t in cofaces2_of_edge(e) {
                for other in edges_of_2simplex(&t) {
                    if let Some(&j) = index.get(&edge_key(&other)) {
                        if j > i {
                            out.push((i, j));
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn triangulate_time(&self) -> Duration {
        self.batches.iter().map(|b| b.triangulate_time).sum()
    }

    pub fn check_time(&self) -> Duration {
        self.batches.iter().map(|b| b.check_time).sum()
    }
}

type FineEdge = (LatticePoint, LatticePoint);

/// Refines coarse cells batch by batch, intersects, deduplicates and
/// collision-checks the fine points.
pub fn refine<T, M, C>(
    cells: &[PermSimplex],
    template: &SubdivisionTemplate,
    m: &M,
    checker: &C,
    cfg: &RefineConfig<T>,
) -> Result<RefinedResult<T>, SubdivisionError>
where
    T: Real,
    M: ImplicitManifold<T> + ?Sized,
    C: PointChecker<T> + ?Sized,
{
    if template.k != cfg.k || template.n != cfg.fine.dim() {
        return Err(SubdivisionError::Parameters {
            n: template.n,
            k: template.k,
        });
    }
    if let Some(c) = cells.iter().find(|c| c.ambient_dim() != template.n) {
        return Err(SubdivisionError::Dimension {
            expected: template.n,
            got: c.ambient_dim(),
        });
    }
    let plan = plan_batches::<T>(cells.len(), template, cfg.budget_bytes)?;
    with_workers(cfg.workers, || {
        refine_batches(cells, template, m, checker, cfg, &plan)
    })
}

struct BatchRun<'a, T, M: ?Sized, C: ?Sized> {
    template: &'a SubdivisionTemplate,
    m: &'a M,
    checker: &'a C,
    cfg: &'a RefineConfig<T>,
    seen: IndexSet<FineEdge>,
    collected: Vec<(FineEdge, Vec<T>, bool)>,
    result: RefinedResult<T>,
    stats: StageStats,
}

impl<T, M, C> BatchRun<'_, T, M, C>
where
    T: Real,
    M: ImplicitManifold<T> + ?Sized,
    C: PointChecker<T> + ?Sized,
{
    fn probe(&mut self, vertices: &[&LatticePoint]) -> Vec<(bool, bool)> {
        let (m, cfg) = (self.m, self.cfg);
        map_into_slots(
            vertices,
            |_| 1,
            |v, slot| {
                let x = cartesian(v, &cfg.fine);
                let inside = cfg.bounds.as_ref().is_none_or(|b| b.contains(&x));
                slot[0] = Some((is_positive(m.value(&x)), inside));
                Ok::<_, Infallible>(())
            },
            &mut self.stats,
        )
        .unwrap_or_else(|e| match e {})
    }

    /// Refines one batch of cells and returns how many new crossing edges it added.
    fn run(&mut self, batch: &[PermSimplex]) -> Result<usize, SubdivisionError> {
        let (template, m, cfg) = (self.template, self.m, self.cfg);
        let k = template.k;
        let started = Instant::now();

        // (1) cell x local edge -> fine endpoints, smaller endpoint first
        let raw: Vec<FineEdge> = map_into_slots(
            batch,
            |_| template.len(),
            |cell, slots| {
                for (s, (a, b)) in slots.iter_mut().zip(&template.edges) {
                    let wa = local_to_lattice(a, cell, k);
                    let wb = local_to_lattice(b, cell, k);
                    *s = Some(if wa <= wb { (wa, wb) } else { (wb, wa) });
                }
                Ok::<_, Infallible>(())
            },
            &mut self.stats,
        )
        .unwrap_or_else(|e| match e {});

        // shared faces produce repeated fine edges; evaluate each vertex once
        let mut vertex_index: IndexMap<LatticePoint, ()> = IndexMap::new();
        let mut unique_edges: IndexSet<FineEdge> = IndexSet::with_capacity(raw.len());
        for e in raw {
            if self.seen.contains(&e) {
                continue;
            }
            vertex_index.entry(e.0.clone()).or_default();
            vertex_index.entry(e.1.clone()).or_default();
            unique_edges.insert(e);
        }
        let vertices: Vec<&LatticePoint> = vertex_index.keys().collect();
        let probes = self.probe(&vertices);

        let mut dropped = 0;
        let mut crossing: Vec<FineEdge> = Vec::new();
        for e in unique_edges {
            let pa = probes[vertex_index.get_index_of(&e.0).unwrap()];
            let pb = probes[vertex_index.get_index_of(&e.1).unwrap()];
            if pa.0 != pb.0 {
                if pa.1 && pb.1 {
                    crossing.push(e);
                } else {
                    dropped += 1;
                }
            }
        }
        self.result.dropped_out_of_box += dropped;

        // (2) intersection point per crossing edge
        let points: Vec<Vec<T>> = map_into_slots(
            &crossing,
            |_| 1,
            |(a, b), slot| {
                let xa = cartesian(a, &cfg.fine);
                let xb = cartesian(b, &cfg.fine);
                let pos = is_positive(m.value(&xa));
                slot[0] = Some(bisect(m, &xa, &xb, pos, cfg.eps).point);
                Ok::<_, Infallible>(())
            },
            &mut self.stats,
        )
        .unwrap_or_else(|e| match e {});
        let triangulate_time = started.elapsed();

        // (4) collision check the surviving points
        let check_started = Instant::now();
        let batch_index = self.result.batches.len();
        let labels = self
            .checker
            .check(&points)
            .map_err(|e| SubdivisionError::Checker {
                batch: batch_index,
                source: Box::new(e),
            })?;
        let check_time = check_started.elapsed();

        let free = labels.iter().filter(|c| !**c).count();
        self.result.batches.push(BatchStats {
            cells: batch.len(),
            local_edges: batch.len() * template.len(),
            unique_vertices: vertices.len(),
            crossing_edges: crossing.len(),
            free_points: free,
            triangulate_time,
            check_time,
        });
        let added = crossing.len();
        for ((e, p), c) in crossing.into_iter().zip(points).zip(labels) {
            self.seen.insert(e.clone());
            self.collected.push((e, p, c));
        }
        Ok(added)
    }

    /// Coarse cells holding a crossing fine edge that shares a fine triangle
    /// with one of `edges` but has not been found yet.
    fn gap_cells(
        &mut self,
        edges: &[FineEdge],
        refined: &IndexSet<PermSimplex>,
    ) -> Vec<PermSimplex> {
        let mut candidates: IndexSet<FineEdge> = IndexSet::new();
        for (a, b) in edges {
            let e = edge_between(a, b).expect("refined edges join adjacent lattice points");
            for t in cofaces2_of_edge(&e) {
                for other in edges_of_2simplex(&t) {
                    let (u, v) = edge_key(&other).endpoints();
                    let pair = if u <= v { (u, v) } else { (v, u) };
                    if !self.seen.contains(&pair) {
                        candidates.insert(pair);
                    }
                }
            }
        }
        let mut vertex_index: IndexMap<LatticePoint, ()> = IndexMap::new();
        for (u, v) in &candidates {
            vertex_index.entry(u.clone()).or_default();
            vertex_index.entry(v.clone()).or_default();
        }
        let vertices: Vec<&LatticePoint> = vertex_index.keys().collect();
        let probes = self.probe(&vertices);

        // midpoints in half-units of the fine lattice locate the coarse cell exactly
        let n = self.template.n;
        let half = LatticeConfig::new(
            n,
            T::from_i64(2 * self.template.k).expect("k representable"),
        )
        .expect("positive scale");
        let mut cells: IndexSet<PermSimplex> = IndexSet::new();
        for (u, v) in &candidates {
            let pu = probes[vertex_index.get_index_of(u).unwrap()];
            let pv = probes[vertex_index.get_index_of(v).unwrap()];
            if pu.0 == pv.0 || !(pu.1 && pv.1) {
                continue;
            }
            let mid: Vec<T> = u
                .iter()
                .zip(v.iter())
                .map(|(x, y)| T::from_i64(x + y).unwrap())
                .collect();
            let cell = locate_point(&mid, &half);
            if !refined.contains(&cell) {
                cells.insert(cell);
            }
        }
        let mut cells: Vec<PermSimplex> = cells.into_iter().collect();
        cells.sort();
        cells
    }
}

fn refine_batches<T, M, C>(
    cells: &[PermSimplex],
    template: &SubdivisionTemplate,
    m: &M,
    checker: &C,
    cfg: &RefineConfig<T>,
    plan: &BatchPlan,
) -> Result<RefinedResult<T>, SubdivisionError>
where
    T: Real,
    M: ImplicitManifold<T> + ?Sized,
    C: PointChecker<T> + ?Sized,
{
    let mut run = BatchRun {
        template,
        m,
        checker,
        cfg,
        seen: IndexSet::new(),
        collected: Vec::new(),
        result: RefinedResult {
            edges: Vec::new(),
            points: Vec::new(),
            in_collision: Vec::new(),
            batches: Vec::new(),
            dropped_out_of_box: 0,
            gap_cells: 0,
        },
        stats: StageStats::new("refine"),
    };
    for range in &plan.batches {
        run.run(&cells[range.clone()])?;
    }

    if cfg.fill_gaps {
        let mut refined: IndexSet<PermSimplex> = cells.iter().cloned().collect();
        let mut frontier = 0;
        loop {
            let fresh: Vec<FineEdge> = run.collected[frontier..]
                .iter()
                .map(|(e, _, _)| e.clone())
                .collect();
            frontier = run.collected.len();
            let extra = run.gap_cells(&fresh, &refined);
            if extra.is_empty() {
                break;
            }
            run.result.gap_cells += extra.len();
            let extra_plan = plan_batches::<T>(extra.len(), template, cfg.budget_bytes)?;
            for range in &extra_plan.batches {
                run.run(&extra[range.clone()])?;
            }
            refined.extend(extra);
        }
    }

    let BatchRun {
        mut collected,
        mut result,
        ..
    } = run;
    collected.sort_by(|a, b| a.0.cmp(&b.0));
    for (e, p, c) in collected {
        result.edges.push(e);
        result.points.push(p);
        result.in_collision.push(c);
    }
    Ok(result)
}

//! Simplified probabilistic roadmap: uniform samples, K-nearest connections
//! validated by dense collision checks, union-find connectivity.

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::collision::{batch_check, config_in_collision, CollisionError};
use crate::pipeline::Problem;
use crate::scalar::dist_sq;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Nearest free vertices tried per new vertex.
    pub neighbors: usize,
    /// Maximum spacing of collision checks along an edge.
    pub step: f64,
    /// Points closer than this to an existing vertex are not inserted again.
    pub duplicate_tol: f64,
    pub batch_size: usize,
}

impl PlannerConfig {
    pub fn new(step: f64) -> Self {
        Self {
            neighbors: 10,
            step,
            duplicate_tol: 1e-9,
            batch_size: 1024,
        }
    }
}

/// Which query endpoint defines the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PositiveSide {
    #[default]
    Start,
    Goal,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSamples {
    pub positive: Vec<Vec<f64>>,
    pub negative: Vec<Vec<f64>>,
}

pub struct Roadmap {
    cfg: PlannerConfig,
    vertices: Vec<Vec<f64>>,
    free: Vec<bool>,
    graph: UnGraph<(), f64>,
    components: UnionFind<usize>,
    rng: ChaCha8Rng,
}

/// Vertex 0 is the start and vertex 1 the goal.
pub const START: usize = 0;
pub const GOAL: usize = 1;

impl Roadmap {
    pub fn new(problem: &Problem, cfg: PlannerConfig, seed: u64) -> Result<Self, CollisionError> {
        let mut map = Self {
            cfg,
            vertices: Vec::new(),
            free: Vec::new(),
            graph: UnGraph::default(),
            components: UnionFind::new(0),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        map.add_vertex(problem, problem.start.clone(), true)?;
        map.add_vertex(problem, problem.goal.clone(), true)?;
        Ok(map)
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn is_free(&self, index: usize) -> bool {
        self.free[index]
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph
            .edge_indices()
            .filter_map(|e| self.graph.edge_endpoints(e))
            .map(|(a, b)| (a.index(), b.index()))
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.components.equiv(a, b)
    }

    /// Adds `count` uniform samples and connects the free ones.
    pub fn grow(&mut self, problem: &Problem, count: usize) -> Result<(), CollisionError> {
        let samples: Vec<Vec<f64>> = (0..count)
            .map(|_| problem.bounds.sample(&mut self.rng))
            .collect();
        let reports = batch_check(
            &samples,
            &problem.robot,
            &problem.scene,
            self.cfg.batch_size,
        )?;
        for (q, r) in samples.into_iter().zip(reports) {
            self.add_vertex(problem, q, !r.colliding)?;
        }
        Ok(())
    }

    /// Inserts collision-free configurations, skipping near duplicates.
    pub fn insert_free_points(
        &mut self,
        problem: &Problem,
        points: &[Vec<f64>],
    ) -> Result<usize, CollisionError> {
        let tol2 = self.cfg.duplicate_tol * self.cfg.duplicate_tol;
        let mut added = 0;
        for p in points {
            if self.vertices.iter().any(|v| dist_sq(v, p) <= tol2) {
                continue;
            }
            let free = !config_in_collision(&problem.robot, &problem.scene, p)?;
            self.add_vertex(problem, p.clone(), free)?;
            added += 1;
        }
        Ok(added)
    }

    fn add_vertex(
        &mut self,
        problem: &Problem,
        q: Vec<f64>,
        free: bool,
    ) -> Result<usize, CollisionError> {
        let index = self.vertices.len();
        self.vertices.push(q);
        self.free.push(free);
        self.graph.add_node(());
        self.components.new_set();
        if free {
            self.connect(problem, index)?;
        }
        Ok(index)
    }

    fn connect(&mut self, problem: &Problem, index: usize) -> Result<(), CollisionError> {
        let q = &self.vertices[index];
        let mut near: Vec<(f64, usize)> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index && self.free[i])
            .map(|(i, v)| (dist_sq(q, v), i))
            .collect();
        let k = self.cfg.neighbors.min(near.len());
        if k == 0 {
            return Ok(());
        }
        near.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        near.truncate(k);
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (d2, j) in near {
            if self.components.equiv(index, j) {
                continue;
            }
            if segment_free(
                problem,
                &self.vertices[index],
                &self.vertices[j],
                self.cfg.step,
            )? {
                self.graph
                    .add_edge(NodeIndex::new(index), NodeIndex::new(j), d2.sqrt());
                self.components.union(index, j);
            }
        }
        Ok(())
    }

    /// Start-side component as positive, every other stored sample as negative.
    pub fn labeled_samples(&self, side: PositiveSide) -> LabeledSamples {
        let anchor = match side {
            PositiveSide::Start => START,
            PositiveSide::Goal => GOAL,
        };
        let mut out = LabeledSamples::default();
        for (i, v) in self.vertices.iter().enumerate() {
            if self.components.equiv(anchor, i) {
                out.positive.push(v.clone());
            } else {
                out.negative.push(v.clone());
            }
        }
        out
    }

    /// Shortest roadmap path between two stored vertices.
    pub fn find_path(&self, from: usize, to: usize) -> Option<Vec<Vec<f64>>> {
        if from >= self.len() || to >= self.len() || !self.components.equiv(from, to) {
            return None;
        }
        let (_, nodes) = astar(
            &self.graph,
            NodeIndex::new(from),
            |n| n.index() == to,
            |e| *e.weight(),
            |_| 0.0,
        )?;
        Some(
            nodes
                .into_iter()
                .map(|n| self.vertices[n.index()].clone())
                .collect(),
        )
    }
}

/// Checks interior points spaced at most `step` apart; endpoints are assumed free.
pub fn segment_free(
    problem: &Problem,
    a: &[f64],
    b: &[f64],
    step: f64,
) -> Result<bool, CollisionError> {
    let len = dist_sq(a, b).sqrt();
    let pieces = (len / step).ceil().max(1.0) as usize;
    for i in 1..pieces {
        let t = i as f64 / pieces as f64;
        let q: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect();
        if config_in_collision(&problem.robot, &problem.scene, &q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when every vertex and every segment of `path` is collision-free at spacing `step`.
pub fn path_is_free(
    problem: &Problem,
    path: &[Vec<f64>],
    step: f64,
) -> Result<bool, CollisionError> {
    for q in path {
        if config_in_collision(&problem.robot, &problem.scene, q)? {
            return Ok(false);
        }
    }
    for w in path.windows(2) {
        if !segment_free(problem, &w[0], &w[1], step)? {
            return Ok(false);
        }
    }
    Ok(true)
}

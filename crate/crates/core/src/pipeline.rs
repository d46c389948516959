//! Plan-or-prove loop and infeasibility certificates.
//!
//! Each iteration grows a roadmap. If start and goal connect, the path is
//! returned. Otherwise a kernel classifier is trained to separate the start
//! component from everything else, its zero set is traced on a coarse
//! lattice, refined, and every fine intersection point is collision-checked.
//! Free points go back into the roadmap. When none are free, the zero set
//! lies in the obstacle region and separates start from goal; it is written
//! out as an `INFPROOF v1` certificate.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::collision::{
    batch_check, config_in_collision, CollisionError, JointKind, RobotModel, Scene, SceneChecker,
    SceneFile, Shape,
};
use crate::lattice::LatticeConfig;
use crate::manifold::{
    gradient_or_fd, sample_seeds, train_classifier, ImplicitManifold, KernelClassifierManifold,
    ManifoldError, TrainParams,
};
use crate::planner::{
    path_is_free, LabeledSamples, PlannerConfig, PositiveSide, Roadmap, GOAL, START,
};
use crate::region::BoxRegion;
use crate::scalar::dist_sq;
use crate::subdivision::{build_template, coarse_cells, refine, RefineConfig, SubdivisionError};
use crate::tracer::{trace, ClosureReport, TraceConfig, TraceError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Collision(#[from] CollisionError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

/// Robot, obstacles and a start/goal query inside the joint-limit box.
#[derive(Debug, Clone)]
pub struct Problem {
    pub robot: RobotModel<f64>,
    pub scene: Scene<f64>,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    pub bounds: BoxRegion<f64>,
}

impl Problem {
    pub fn new(
        robot: RobotModel<f64>,
        scene: Scene<f64>,
        start: Vec<f64>,
        goal: Vec<f64>,
    ) -> Result<Self, PipelineError> {
        let (lo, hi) = robot.limits();
        let bounds = BoxRegion::new(lo, hi)
            .ok_or_else(|| PipelineError::Problem("empty joint-limit box".into()))?;
        for (name, q) in [("start", &start), ("goal", &goal)] {
            if q.len() != robot.dof() {
                return Err(PipelineError::Problem(format!(
                    "{name} has {} coordinates, the robot has {} joints",
                    q.len(),
                    robot.dof()
                )));
            }
            if config_in_collision(&robot, &scene, q)? {
                return Err(PipelineError::Problem(format!(
                    "{name} {q:?} is in collision"
                )));
            }
        }
        Ok(Self {
            robot,
            scene,
            start,
            goal,
            bounds,
        })
    }

    /// Builds the problem from a scene file; `start` and `goal` override the file's query.
    pub fn from_scene_file(
        file: &SceneFile,
        start: Option<Vec<f64>>,
        goal: Option<Vec<f64>>,
    ) -> Result<Self, PipelineError> {
        let query = file.problem.as_ref();
        let start = start
            .or_else(|| query.map(|q| q.start.clone()))
            .ok_or_else(|| PipelineError::Problem("no start configuration given".into()))?;
        let goal = goal
            .or_else(|| query.map(|q| q.goal.clone()))
            .ok_or_else(|| PipelineError::Problem("no goal configuration given".into()))?;
        Self::new(file.robot()?, file.scene()?, start, goal)
    }

    pub fn dim(&self) -> usize {
        self.robot.dof()
    }

    /// SHA-256 (hex) of a canonical text form of robot, obstacles, start and goal.
    pub fn fingerprint(&self) -> String {
        let mut s = String::from("robot\n");
        for j in self.robot.joints() {
            let kind = match j.kind {
                JointKind::Revolute => "revolute",
                JointKind::Prismatic => "prismatic",
            };
            let _ = writeln!(
                s,
                "joint {kind} {:?} {:?} {:?} {:?} {:?}",
                j.axis, j.origin.rotation, j.origin.translation, j.lo, j.hi
            );
        }
        for sp in self.robot.spheres() {
            let _ = writeln!(s, "sphere {} {:?} {:?}", sp.link, sp.offset, sp.radius);
        }
        for o in &self.scene.obstacles {
            let shape = match o.shape() {
                Shape::Box { size } => format!("box {size:?}"),
                Shape::Cylinder { height, radius } => format!("cylinder {height:?} {radius:?}"),
                Shape::Sphere { radius } => format!("sphere {radius:?}"),
            };
            let _ = writeln!(
                s,
                "obstacle {shape} {:?} {:?}",
                o.pose().rotation,
                o.pose().translation
            );
        }
        let _ = writeln!(s, "start {:?}\ngoal {:?}", self.start, self.goal);
        hex::encode(Sha256::digest(s.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    /// Fine lattice scale; traces run at `lambda * k`.
    pub lambda: f64,
    pub k: i64,
    /// Bisection tolerance for intersection points; `None` uses `lambda * 1e-4`.
    pub eps: Option<f64>,
    pub mem_budget: usize,
    pub seeds: usize,
    pub rng_seed: u64,
    pub workers: usize,
    pub timeout: Duration,
    pub max_iterations: usize,
    pub samples_per_iteration: usize,
    /// Largest classifier training set.
    pub train_cap: usize,
    pub train: TrainParams<f64>,
    pub positive_side: PositiveSide,
    pub batch_size: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            lambda: 0.05,
            k: 2,
            eps: None,
            mem_budget: 64 << 20,
            seeds: 32,
            rng_seed: 0,
            workers: 1,
            timeout: Duration::from_secs(300),
            max_iterations: 50,
            samples_per_iteration: 500,
            train_cap: 1500,
            train: TrainParams::default(),
            positive_side: PositiveSide::Start,
            batch_size: 1024,
        }
    }
}

impl SolveParams {
    pub fn eps(&self) -> f64 {
        self.eps.unwrap_or(self.lambda * 1e-4)
    }

    fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Params(m.into()));
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad("lambda must be positive");
        }
        if self.k < 1 {
            return bad("k must be at least 1");
        }
        if !(self.eps() > 0.0) {
            return bad("eps must be positive");
        }
        if self.seeds == 0 || self.samples_per_iteration == 0 || self.batch_size == 0 {
            return bad("seed count, sample count and batch size must be positive");
        }
        if self.train_cap < 4 {
            return bad("training cap must be at least 4");
        }
        Ok(())
    }
}

/// Per-phase wall times and counts, accumulated over iterations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub iterations: usize,
    pub plan_time: Duration,
    pub train_time: Duration,
    pub seed_time: Duration,
    pub trace_time: Duration,
    pub refine_time: Duration,
    pub check_time: Duration,
    pub total_time: Duration,
    pub roadmap_vertices: usize,
    pub coarse_edges: usize,
    pub coarse_cells: usize,
    pub fine_points: usize,
    pub free_points: usize,
    pub batches: usize,
}

impl RunStats {
    /// Trace plus refinement time.
    pub fn triangulation_time(&self) -> Duration {
        self.trace_time + self.refine_time
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Plan {
        path: Vec<Vec<f64>>,
        stats: RunStats,
    },
    Proof {
        proof: Box<InfeasibilityProof>,
        stats: RunStats,
    },
    Timeout {
        stats: RunStats,
    },
}

impl Outcome {
    pub fn stats(&self) -> &RunStats {
        match self {
            Outcome::Plan { stats, .. }
            | Outcome::Proof { stats, .. }
            | Outcome::Timeout { stats } => stats,
        }
    }
}

/// Keeps both query endpoints, then per class the samples nearest the other
/// class, then an even stride through the rest.
pub fn cap_training_set(samples: &LabeledSamples, cap: usize) -> LabeledSamples {
    let (np, nn) = (samples.positive.len(), samples.negative.len());
    if np + nn <= cap {
        return samples.clone();
    }
    let half = cap / 2;
    let (bp, bn) = if np <= half {
        (np, cap - np)
    } else if nn <= half {
        (cap - nn, nn)
    } else {
        (half, cap - half)
    };
    LabeledSamples {
        positive: pick(&samples.positive, &samples.negative, bp),
        negative: pick(&samples.negative, &samples.positive, bn),
    }
}

fn pick(own: &[Vec<f64>], other: &[Vec<f64>], budget: usize) -> Vec<Vec<f64>> {
    if own.len() <= budget {
        return own.to_vec();
    }
    let gap: Vec<f64> = own
        .par_iter()
        .map(|p| {
            other
                .iter()
                .map(|o| dist_sq(p, o))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut order: Vec<usize> = (1..own.len()).collect();
    order.sort_by(|&a, &b| gap[a].total_cmp(&gap[b]).then(a.cmp(&b)));
    let near = (budget / 2).max(1);
    // index 0 is the query endpoint of this class
    let mut keep: Vec<usize> = vec![0];
    keep.extend(order.iter().take(near.min(budget - 1)));
    let rest: Vec<usize> = order[near.min(order.len())..].to_vec();
    let want = budget - keep.len();
    if want > 0 && !rest.is_empty() {
        let stride = rest.len() as f64 / want as f64;
        keep.extend((0..want).map(|i| rest[((i as f64 * stride) as usize).min(rest.len() - 1)]));
    }
    keep.sort_unstable();
    keep.dedup();
    keep.into_iter().map(|i| own[i].clone()).collect()
}

/// Zero crossings of `m` along the straight segment between the query endpoints.
fn segment_seeds(
    m: &KernelClassifierManifold<f64>,
    a: &[f64],
    b: &[f64],
    step: f64,
    eps: f64,
) -> Vec<Vec<f64>> {
    let pieces = ((dist_sq(a, b).sqrt() / step).ceil() as usize).max(1);
    let at = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect() };
    let mut out = Vec::new();
    let mut prev = at(0.0);
    for i in 1..=pieces {
        let next = at(i as f64 / pieces as f64);
        if let Ok(hit) = crate::manifold::intersection_point(m, &prev, &next, eps) {
            out.push(hit.point);
        }
        prev = next;
    }
    out
}

pub fn solve(problem: &Problem, params: &SolveParams) -> Result<Outcome, PipelineError> {
    params.validate()?;
    let started = Instant::now();
    let n = problem.dim();
    let eps = params.eps();
    let mut stats = RunStats::default();
    let mut roadmap = Roadmap::new(
        problem,
        PlannerConfig {
            batch_size: params.batch_size,
            ..PlannerConfig::new(params.lambda / 4.0)
        },
        params.rng_seed,
    )?;
    let mut seed_rng = ChaCha8Rng::seed_from_u64(params.rng_seed.wrapping_add(0x5eed));
    let fine =
        LatticeConfig::new(n, params.lambda).map_err(|e| PipelineError::Params(e.to_string()))?;
    let refine_cfg = RefineConfig {
        eps,
        budget_bytes: params.mem_budget,
        workers: params.workers,
        bounds: Some(problem.bounds.clone()),
        ..RefineConfig::new(fine, params.k)
    };
    let template = build_template(n, params.k)?;
    let trace_cfg = TraceConfig::new(refine_cfg.coarse())
        .with_bounds(problem.bounds.clone())
        .with_workers(params.workers)
        .with_eps(eps);
    let checker = SceneChecker {
        robot: &problem.robot,
        scene: &problem.scene,
        batch_size: params.batch_size,
    };
    let (anchor, other) = match params.positive_side {
        PositiveSide::Start => (&problem.start, &problem.goal),
        PositiveSide::Goal => (&problem.goal, &problem.start),
    };

    let finish = |mut stats: RunStats, roadmap: &Roadmap| {
        stats.total_time = started.elapsed();
        stats.roadmap_vertices = roadmap.len();
        stats
    };

    for iteration in 1..=params.max_iterations {
        if started.elapsed() > params.timeout {
            break;
        }
        stats.iterations = iteration;

        let t = Instant::now();
        roadmap.grow(problem, params.samples_per_iteration)?;
        let path = roadmap.find_path(START, GOAL);
        stats.plan_time += t.elapsed();
        if let Some(path) = path {
            return Ok(Outcome::Plan {
                path,
                stats: finish(stats, &roadmap),
            });
        }

        let t = Instant::now();
        let samples = cap_training_set(
            &roadmap.labeled_samples(params.positive_side),
            params.train_cap,
        );
        let trained = train_classifier(&samples.positive, &samples.negative, &params.train);
        stats.train_time += t.elapsed();
        let model = match trained {
            Ok((model, report)) => {
                log::debug!(
                    "iteration {iteration}: trained on {} rows, accuracy {:.3}",
                    model.len(),
                    report.accuracy
                );
                model
            }
            Err(e) => {
                log::warn!("iteration {iteration}: training failed: {e}");
                continue;
            }
        };
        let (f_anchor, f_other) = (model.value(anchor), model.value(other));
        if !(f_anchor > 0.0 && f_other <= 0.0) {
            log::debug!("iteration {iteration}: classifier does not separate the query");
            continue;
        }

        let t = Instant::now();
        let mut seeds = segment_seeds(&model, anchor, other, params.lambda, eps);
        seeds.extend(sample_seeds(
            &model,
            &problem.bounds,
            params.seeds,
            eps,
            params.lambda * params.k as f64 / 2.0,
            &mut seed_rng,
        )?);
        stats.seed_time += t.elapsed();

        let t = Instant::now();
        let traced = trace(&seeds, &model, &trace_cfg);
        stats.trace_time += t.elapsed();
        let traced = match traced {
            Ok(r) => r,
            Err(TraceError::NoIntersectingEdges) => continue,
            Err(e) => {
                log::warn!("iteration {iteration}: trace failed: {e}");
                continue;
            }
        };
        stats.coarse_edges += traced.len();

        let cells = coarse_cells(&traced);
        stats.coarse_cells += cells.len();
        let refined = refine(&cells, &template, &model, &checker, &refine_cfg)?;
        stats.refine_time += refined.triangulate_time();
        stats.check_time += refined.check_time();
        stats.fine_points += refined.len();
        stats.batches += refined.batches.len();

        let free = refined.free_points();
        stats.free_points += free.len();
        if !free.is_empty() {
            let t = Instant::now();
            roadmap.insert_free_points(problem, &free)?;
            stats.plan_time += t.elapsed();
            continue;
        }
        if refined.is_empty() || !traced.is_complete() || traced.closure().open_ends > 0 {
            log::debug!("iteration {iteration}: zero set is not closed within the box");
            continue;
        }
        let proof = InfeasibilityProof {
            manifold: model,
            lambda: params.lambda,
            k: params.k,
            eps,
            positive_side: params.positive_side,
            closure: *traced.closure(),
            trace_complete: traced.is_complete(),
            points: refined.points().to_vec(),
            start: problem.start.clone(),
            goal: problem.goal.clone(),
            f_start: 0.0,
            f_goal: 0.0,
            iterations: iteration,
            scene_fingerprint: problem.fingerprint(),
            integrity: Integrity::Fresh,
        }
        .with_signs();
        return Ok(Outcome::Proof {
            proof: Box::new(proof),
            stats: finish(stats, &roadmap),
        });
    }
    Ok(Outcome::Timeout {
        stats: finish(stats, &roadmap),
    })
}

/// Re-checks a returned plan with collision checks spaced `step` apart.
pub fn validate_plan(
    problem: &Problem,
    path: &[Vec<f64>],
    step: f64,
) -> Result<bool, PipelineError> {
    let ends_match = path.first() == Some(&problem.start) && path.last() == Some(&problem.goal);
    Ok(ends_match && path_is_free(problem, path, step)?)
}

// ---- certificates ----

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("certificate line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("certificate section [{0}] is missing")]
    MissingSection(&'static str),
    #[error("certificate key `{key}` is missing from [{section}]")]
    MissingKey {
        section: &'static str,
        key: &'static str,
    },
    #[error("certificate manifold: {0}")]
    Manifold(String),
}

/// Whether the stored body digest matched the text it was parsed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Integrity {
    Fresh,
    Matches,
    Mismatch { recorded: String, computed: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityProof {
    pub manifold: KernelClassifierManifold<f64>,
    pub lambda: f64,
    pub k: i64,
    pub eps: f64,
    pub positive_side: PositiveSide,
    pub closure: ClosureReport,
    pub trace_complete: bool,
    pub points: Vec<Vec<f64>>,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    pub f_start: f64,
    pub f_goal: f64,
    pub iterations: usize,
    pub scene_fingerprint: String,
    pub integrity: Integrity,
}

const HEADER: &str = "INFPROOF v1";

fn side_name(side: PositiveSide) -> &'static str {
    match side {
        PositiveSide::Start => "start",
        PositiveSide::Goal => "goal",
    }
}

fn row(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn body_digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

impl InfeasibilityProof {
    fn with_signs(mut self) -> Self {
        self.f_start = self.manifold.value(&self.start);
        self.f_goal = self.manifold.value(&self.goal);
        self
    }

    fn body(&self) -> String {
        let mut s = format!("{HEADER}\n[manifold]\n");
        s.push_str(&self.manifold.to_text());
        let c = &self.closure;
        let _ = write!(
            s,
            "[params]\nlambda = {:?}\nk = {}\neps = {:?}\npositive_side = {}\n\
             open_ends = {}\nbox_ends = {}\ntwo_edge_violations = {}\ntrace_complete = {}\n",
            self.lambda,
            self.k,
            self.eps,
            side_name(self.positive_side),
            c.open_ends,
            c.box_ends,
            c.two_edge_violations,
            self.trace_complete
        );
        let _ = writeln!(s, "[points]\ncount = {}", self.points.len());
        for p in &self.points {
            let _ = writeln!(s, "{}", row(p));
        }
        let _ = write!(
            s,
            "[signs]\nstart = {}\ngoal = {}\nf_start = {:?}\nf_goal = {:?}\n",
            row(&self.start),
            row(&self.goal),
            self.f_start,
            self.f_goal
        );
        let _ = write!(
            s,
            "[meta]\ntool = mctrace {}\niterations = {}\n",
            env!("CARGO_PKG_VERSION"),
            self.iterations
        );
        let _ = write!(s, "[fingerprint]\nscene = {}\n", self.scene_fingerprint);
        s
    }

    pub fn to_text(&self) -> String {
        let body = self.body();
        let digest = body_digest(&body);
        format!("{body}body = {digest}\n")
    }

    pub fn from_text(text: &str) -> Result<Self, CertificateError> {
        let syntax = |line: usize, msg: String| CertificateError::Syntax { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, HEADER)) => {}
            _ => return Err(syntax(1, format!("expected `{HEADER}`"))),
        }
        let mut sections: Vec<(String, Vec<(usize, &str)>)> = Vec::new();
        let mut body_end = None;
        let mut offset = HEADER.len() + 1;
        for (no, l) in lines {
            let line_start = offset;
            offset += l.len() + 1;
            if l.trim().is_empty() {
                continue;
            }
            if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                if sections.iter().any(|(s, _)| s == name) {
                    return Err(syntax(no, format!("duplicate section [{name}]")));
                }
                sections.push((name.to_string(), Vec::new()));
                continue;
            }
            let (_, current) = sections
                .last_mut()
                .ok_or_else(|| syntax(no, "content before the first section".into()))?;
            if l.starts_with("body = ") && body_end.is_none() {
                body_end = Some(line_start);
            }
            current.push((no, l));
        }
        let section = |name: &'static str| -> Result<&[(usize, &str)], CertificateError> {
            sections
                .iter()
                .find(|(s, _)| s == name)
                .map(|(_, v)| v.as_slice())
                .ok_or(CertificateError::MissingSection(name))
        };
        let kv =
            |name: &'static str, key: &'static str| -> Result<(usize, &str), CertificateError> {
                section(name)?
                    .iter()
                    .find_map(|&(no, l)| {
                        l.split_once(" = ")
                            .filter(|(k, _)| k.trim() == key)
                            .map(|(_, v)| (no, v.trim()))
                    })
                    .ok_or(CertificateError::MissingKey { section: name, key })
            };
        fn num<X: std::str::FromStr>(v: (usize, &str)) -> Result<X, CertificateError> {
            v.1.parse().map_err(|_| CertificateError::Syntax {
                line: v.0,
                msg: format!("cannot parse {:?}", v.1),
            })
        }
        let vec_of = |v: (usize, &str)| -> Result<Vec<f64>, CertificateError> {
            v.1.split_whitespace().map(|t| num((v.0, t))).collect()
        };

        let manifold_text: String = section("manifold")?
            .iter()
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        let manifold = KernelClassifierManifold::from_text(&manifold_text)
            .map_err(|e| CertificateError::Manifold(e.to_string()))?;

        let positive_side = match kv("params", "positive_side")? {
            (_, "start") => PositiveSide::Start,
            (_, "goal") => PositiveSide::Goal,
            (no, v) => return Err(syntax(no, format!("unknown positive_side {v:?}"))),
        };
        let trace_complete = match kv("params", "trace_complete")? {
            (_, "true") => true,
            (_, "false") => false,
            (no, v) => return Err(syntax(no, format!("expected true or false, got {v:?}"))),
        };
        let closure = ClosureReport {
            open_ends: num(kv("params", "open_ends")?)?,
            box_ends: num(kv("params", "box_ends")?)?,
            two_edge_violations: num(kv("params", "two_edge_violations")?)?,
            ..ClosureReport::default()
        };

        let count: usize = num(kv("points", "count")?)?;
        let rows: Vec<(usize, &str)> = section("points")?
            .iter()
            .copied()
            .filter(|(_, l)| !l.starts_with("count = "))
            .collect();
        if rows.len() != count {
            return Err(syntax(
                rows.last().map_or(0, |r| r.0),
                format!("[points] declares {count} points but lists {}", rows.len()),
            ));
        }
        let points = rows
            .into_iter()
            .map(|r| {
                let p = vec_of(r)?;
                if p.len() != manifold.dim() {
                    return Err(syntax(
                        r.0,
                        format!(
                            "point has {} coordinates, expected {}",
                            p.len(),
                            manifold.dim()
                        ),
                    ));
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>, _>>()?;

        let (recorded_line, recorded) = kv("fingerprint", "body")?;
        let computed = body_digest(
            &text[..body_end.ok_or_else(|| syntax(recorded_line, "misplaced digest".into()))?],
        );
        let integrity = if computed == recorded {
            Integrity::Matches
        } else {
            Integrity::Mismatch {
                recorded: recorded.to_string(),
                computed,
            }
        };

        Ok(Self {
            manifold,
            lambda: num(kv("params", "lambda")?)?,
            k: num(kv("params", "k")?)?,
            eps: num(kv("params", "eps")?)?,
            positive_side,
            closure,
            trace_complete,
            points,
            start: vec_of(kv("signs", "start")?)?,
            goal: vec_of(kv("signs", "goal")?)?,
            f_start: num(kv("signs", "f_start")?)?,
            f_goal: num(kv("signs", "f_goal")?)?,
            iterations: num(kv("meta", "iterations")?)?,
            scene_fingerprint: kv("fingerprint", "scene")?.1.to_string(),
            integrity,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    /// Indices of stored points that failed the collision or on-manifold test.
    pub bad_points: Vec<usize>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(CheckOutcome {
            name,
            passed,
            detail,
        });
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {}: {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        s
    }
}

const LISTED: usize = 10;

fn list(ids: &[usize]) -> String {
    let shown: Vec<String> = ids.iter().take(LISTED).map(usize::to_string).collect();
    let more = if ids.len() > LISTED {
        format!(" and {} more", ids.len() - LISTED)
    } else {
        String::new()
    };
    format!("{}{more}", shown.join(", "))
}

/// Independently re-checks a certificate against a problem; every check runs.
pub fn verify_proof(proof: &InfeasibilityProof, problem: &Problem) -> VerifyReport {
    let mut report = VerifyReport::default();

    match &proof.integrity {
        Integrity::Mismatch { recorded, computed } => report.push(
            "digest",
            false,
            format!("certificate body was edited (recorded {recorded}, computed {computed})"),
        ),
        _ => report.push("digest", true, "body digest matches".into()),
    }

    let fp = problem.fingerprint();
    let same_query = proof.start == problem.start && proof.goal == problem.goal;
    report.push(
        "fingerprint",
        fp == proof.scene_fingerprint && same_query,
        if fp == proof.scene_fingerprint {
            "scene fingerprint matches".into()
        } else {
            format!(
                "scene fingerprint mismatch: certificate {}, problem {fp}",
                proof.scene_fingerprint
            )
        },
    );

    let m = &proof.manifold;
    let dims_ok =
        m.dim() == problem.dim() && proof.start.len() == m.dim() && proof.goal.len() == m.dim();
    if !dims_ok {
        report.push(
            "dimension",
            false,
            format!("manifold dimension {} vs robot {}", m.dim(), problem.dim()),
        );
        return report;
    }
    let (fs, fg) = (m.value(&proof.start), m.value(&proof.goal));
    let recorded = fs == proof.f_start && fg == proof.f_goal;
    report.push(
        "separation",
        fs * fg < 0.0 && recorded,
        format!(
            "F(start) = {fs:?}, F(goal) = {fg:?}{}",
            if recorded {
                ""
            } else {
                " (differs from recorded values)"
            }
        ),
    );

    let checker_input: Vec<usize> = (0..proof.points.len())
        .filter(|&i| problem.bounds.contains(&proof.points[i]))
        .collect();
    let outside: Vec<usize> = (0..proof.points.len())
        .filter(|&i| !problem.bounds.contains(&proof.points[i]))
        .collect();
    let configs: Vec<Vec<f64>> = checker_input
        .iter()
        .map(|&i| proof.points[i].clone())
        .collect();
    let mut not_colliding = outside.clone();
    match batch_check(&configs, &problem.robot, &problem.scene, 1024) {
        Ok(r) => not_colliding.extend(
            checker_input
                .iter()
                .zip(r)
                .filter(|(_, r)| !r.colliding)
                .map(|(&i, _)| i),
        ),
        Err(e) => {
            report.push("collision", false, e.to_string());
        }
    }
    not_colliding.sort_unstable();
    report.push(
        "collision",
        not_colliding.is_empty() && !proof.points.is_empty(),
        if proof.points.is_empty() {
            "certificate has no points".into()
        } else if not_colliding.is_empty() {
            format!("all {} points in collision", proof.points.len())
        } else {
            format!(
                "{} points not in collision: {}",
                not_colliding.len(),
                list(&not_colliding)
            )
        },
    );

    let slack = 1e-12;
    let off: Vec<usize> = proof
        .points
        .par_iter()
        .enumerate()
        .filter(|(_, p)| {
            let g = gradient_or_fd(m, p);
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            !(m.value(p).abs() <= 2.0 * proof.eps * gn + slack)
        })
        .map(|(i, _)| i)
        .collect();
    report.push(
        "on_manifold",
        off.is_empty(),
        if off.is_empty() {
            format!("all points within eps = {:?} of the zero set", proof.eps)
        } else {
            format!("{} points off the zero set: {}", off.len(), list(&off))
        },
    );

    let closed = proof.trace_complete && proof.closure.open_ends == 0;
    report.push(
        "closure",
        closed,
        format!(
            "open ends {}, box ends {}, two-edge violations {}, complete {}",
            proof.closure.open_ends,
            proof.closure.box_ends,
            proof.closure.two_edge_violations,
            proof.trace_complete
        ),
    );

    report.bad_points = not_colliding.into_iter().chain(off).collect();
    report.bad_points.sort_unstable();
    report.bad_points.dedup();
    report
}

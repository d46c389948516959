//! Exact sphere-vs-primitive collision checking for sphere-decomposed serial robots.
//!
//! Obstacles are boxes, cylinders and spheres with a world pose. Robot links
//! carry spheres; forward kinematics places them in the world, each sphere
//! center is moved into the obstacle's frame and tested against the
//! primitive centered at that frame's origin. Touching counts as collision.

use serde::Deserialize;
use thiserror::Error;

use crate::rigid::{axis_angle, norm, orthonormality_error, scale, sub, Rigid, Vec3};
use crate::scalar::Real;
use crate::stage::{map_into_slots, StageStats};
use crate::subdivision::PointChecker;

#[derive(Debug, Error)]
pub enum CollisionError {
    #[error("configuration has {got} coordinates, the robot has {expected} joints")]
    Dimension { expected: usize, got: usize },
    #[error("joint {joint} value {value} is outside its limits [{lo}, {hi}]")]
    JointLimit {
        joint: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("joint {joint} value is NaN")]
    NotANumber { joint: usize },
    #[error("invalid model: {0}")]
    Model(String),
    #[error("scene file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("configuration {index}: {source}")]
    Config {
        index: usize,
        #[source]
        source: Box<CollisionError>,
    },
    #[error("batch size must be at least 1")]
    BatchSize,
}

/// Sphere of radius `r` centered at `c` (box frame) against the box
/// `[-l/2, l/2]` per axis.
pub fn sphere_box_collides<T: Real>(c: Vec3<T>, r: T, size: Vec3<T>) -> bool {
    let half = T::lit(0.5);
    let d = [
        c[0].abs() - size[0] * half,
        c[1].abs() - size[1] * half,
        c[2].abs() - size[2] * half,
    ];
    if d.iter().any(|&di| di > r) {
        return false;
    }
    let r2 = r * r;
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        if d[j] > T::zero() && d[k] > T::zero() && d[j] * d[j] + d[k] * d[k] > r2 {
            return false;
        }
    }
    if d.iter().all(|&di| di > T::zero()) && d.iter().map(|&di| di * di).sum::<T>() > r2 {
        return false;
    }
    true
}

/// Sphere of radius `rs` centered at `c` (cylinder frame) against the
/// cylinder of height `h` and radius `rc` around the z axis, centered at the origin.
pub fn sphere_cylinder_collides<T: Real>(c: Vec3<T>, rs: T, h: T, rc: T) -> bool {
    let radial = (c[0] * c[0] + c[1] * c[1]).sqrt();
    let dz = c[2].abs() - h * T::lit(0.5);
    if dz > rs || radial > rs + rc {
        return false;
    }
    if dz > T::zero() && radial > rc {
        let dr = radial - rc;
        if dr * dr + dz * dz > rs * rs {
            return false;
        }
    }
    true
}

pub fn sphere_sphere_collides<T: Real>(c1: Vec3<T>, r1: T, c2: Vec3<T>, r2: T) -> bool {
    let d = sub(c1, c2);
    let sum = r1 + r2;
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= sum * sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape<T> {
    Box { size: Vec3<T> },
    Cylinder { height: T, radius: T },
    Sphere { radius: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle<T> {
    shape: Shape<T>,
    pose: Rigid<T>,
    to_local: Rigid<T>,
}

impl<T: Real> Obstacle<T> {
    pub fn new(shape: Shape<T>, pose: Rigid<T>) -> Result<Self, CollisionError> {
        let dims: Vec<T> = match shape {
            Shape::Box { size } => size.to_vec(),
            Shape::Cylinder { height, radius } => vec![height, radius],
            Shape::Sphere { radius } => vec![radius],
        };
        if dims.iter().any(|&d| !(d > T::zero())) {
            return Err(CollisionError::Model(format!(
                "obstacle dimensions must be positive: {dims:?}"
            )));
        }
        if orthonormality_error(&pose.rotation) > T::lit(1e-9) {
            return Err(CollisionError::Model(
                "obstacle rotation is not orthonormal".into(),
            ));
        }
        Ok(Self {
            shape,
            pose,
            to_local: pose.inverse(),
        })
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn pose(&self) -> &Rigid<T> {
        &self.pose
    }

    /// Sphere given in world coordinates.
    pub fn collides(&self, center: Vec3<T>, radius: T) -> bool {
        let local = self.to_local.apply(center);
        match self.shape {
            Shape::Box { size } => sphere_box_collides(local, radius, size),
            Shape::Cylinder { height, radius: rc } => {
                sphere_cylinder_collides(local, radius, height, rc)
            }
            Shape::Sphere { radius: ro } => {
                sphere_sphere_collides(local, radius, [T::zero(); 3], ro)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene<T> {
    pub obstacles: Vec<Obstacle<T>>,
}

impl<T: Real> Scene<T> {
    /// Index of the first obstacle touching the sphere.
    pub fn first_hit(&self, center: Vec3<T>, radius: T) -> Option<usize> {
        self.obstacles
            .iter()
            .position(|o| o.collides(center, radius))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint<T> {
    pub kind: JointKind,
    /// Unit axis in the joint frame.
    pub axis: Vec3<T>,
    /// Joint frame relative to the previous link frame.
    pub origin: Rigid<T>,
    pub lo: T,
    pub hi: T,
}

/// Sphere rigidly attached to a link. Link 0 is the base; link `l` is the frame after joint `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSphere<T> {
    pub link: usize,
    pub offset: Vec3<T>,
    pub radius: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel<T> {
    joints: Vec<Joint<T>>,
    spheres: Vec<LinkSphere<T>>,
}

impl<T: Real> RobotModel<T> {
    pub fn new(
        mut joints: Vec<Joint<T>>,
        spheres: Vec<LinkSphere<T>>,
    ) -> Result<Self, CollisionError> {
        if joints.is_empty() {
            return Err(CollisionError::Model("robot has no joints".into()));
        }
        for (i, j) in joints.iter_mut().enumerate() {
            let len = norm(j.axis);
            if !(len > T::zero()) {
                return Err(CollisionError::Model(format!("joint {i} has a zero axis")));
            }
            j.axis = scale(j.axis, T::one() / len);
            if !(j.lo < j.hi) {
                return Err(CollisionError::Model(format!(
                    "joint {i} limits need lo < hi"
                )));
            }
            if orthonormality_error(&j.origin.rotation) > T::lit(1e-9) {
                return Err(CollisionError::Model(format!(
                    "joint {i} origin is not a rotation"
                )));
            }
        }
        for (i, s) in spheres.iter().enumerate() {
            if !(s.radius > T::zero()) {
                return Err(CollisionError::Model(format!(
                    "sphere {i} radius must be positive"
                )));
            }
            if s.link > joints.len() {
                return Err(CollisionError::Model(format!(
                    "sphere {i} is on link {} but the robot has {} joints",
                    s.link,
                    joints.len()
                )));
            }
        }
        Ok(Self { joints, spheres })
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn joints(&self) -> &[Joint<T>] {
        &self.joints
    }

    pub fn spheres(&self) -> &[LinkSphere<T>] {
        &self.spheres
    }

    pub fn limits(&self) -> (Vec<T>, Vec<T>) {
        (
            self.joints.iter().map(|j| j.lo).collect(),
            self.joints.iter().map(|j| j.hi).collect(),
        )
    }

    fn validate(&self, q: &[T]) -> Result<(), CollisionError> {
        if q.len() != self.dof() {
            return Err(CollisionError::Dimension {
                expected: self.dof(),
                got: q.len(),
            });
        }
        for (i, (&v, j)) in q.iter().zip(&self.joints).enumerate() {
            if v.is_nan() {
                return Err(CollisionError::NotANumber { joint: i });
            }
            if v < j.lo || v > j.hi {
                let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
                return Err(CollisionError::JointLimit {
                    joint: i,
                    value: f(v),
                    lo: f(j.lo),
                    hi: f(j.hi),
                });
            }
        }
        Ok(())
    }

    /// World frame of every link, base first.
    pub fn link_frames(&self, q: &[T]) -> Result<Vec<Rigid<T>>, CollisionError> {
        self.validate(q)?;
        let mut frames = Vec::with_capacity(self.dof() + 1);
        frames.push(Rigid::identity());
        for (j, &v) in self.joints.iter().zip(q) {
            let motion = match j.kind {
                JointKind::Revolute => Rigid::rotation(axis_angle(j.axis, v)),
                JointKind::Prismatic => Rigid::translation(scale(j.axis, v)),
            };
            let prev = frames.last().expect("base frame");
            frames.push(prev.then(&j.origin).then(&motion));
        }
        Ok(frames)
    }

    /// World-frame centers of all robot spheres.
    pub fn forward_kinematics(&self, q: &[T]) -> Result<Vec<Vec3<T>>, CollisionError> {
        let frames = self.link_frames(q)?;
        Ok(self
            .spheres
            .iter()
            .map(|s| frames[s.link].apply(s.offset))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contact {
    pub sphere: usize,
    pub obstacle: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionReport {
    pub colliding: bool,
    /// First contact found; present only when `colliding`.
    pub contact: Option<Contact>,
}

fn first_contact<T: Real>(
    robot: &RobotModel<T>,
    scene: &Scene<T>,
    centers: &[Vec3<T>],
) -> Option<Contact> {
    robot
        .spheres
        .iter()
        .zip(centers)
        .enumerate()
        .find_map(|(i, (s, &c))| {
            scene.first_hit(c, s.radius).map(|o| Contact {
                sphere: i,
                obstacle: o,
            })
        })
}

pub fn config_in_collision<T: Real>(
    robot: &RobotModel<T>,
    scene: &Scene<T>,
    q: &[T],
) -> Result<bool, CollisionError> {
    let centers = robot.forward_kinematics(q)?;
    Ok(first_contact(robot, scene, &centers).is_some())
}

/// Checks `configs` in chunks of `batch_size`: forward kinematics per
/// configuration, then one data-parallel map over (sphere, configuration)
/// pairs, then a per-configuration reduction.
pub fn batch_check<T: Real>(
    configs: &[Vec<T>],
    robot: &RobotModel<T>,
    scene: &Scene<T>,
    batch_size: usize,
) -> Result<Vec<CollisionReport>, CollisionError> {
    if batch_size == 0 {
        return Err(CollisionError::BatchSize);
    }
    let ns = robot.spheres.len();
    let mut fk_stats = StageStats::new("forward_kinematics");
    let mut pair_stats = StageStats::new("sphere_tests");
    let mut reports = Vec::with_capacity(configs.len());
    for (chunk_index, chunk) in configs.chunks(batch_size).enumerate() {
        let offset = chunk_index * batch_size;
        let indexed: Vec<(usize, &Vec<T>)> = chunk
            .iter()
            .enumerate()
            .map(|(i, q)| (offset + i, q))
            .collect();
        let centers: Vec<Vec3<T>> = map_into_slots(
            &indexed,
            |_| ns,
            |(index, q), slots| {
                let c = robot
                    .forward_kinematics(q)
                    .map_err(|e| CollisionError::Config {
                        index: *index,
                        source: Box::new(e),
                    })?;
                for (s, c) in slots.iter_mut().zip(c) {
                    *s = Some(c);
                }
                Ok::<_, CollisionError>(())
            },
            &mut fk_stats,
        )?;
        // pair p = config * ns + sphere
        let pairs: Vec<usize> = (0..centers.len()).collect();
        let hits: Vec<Option<usize>> = map_into_slots(
            &pairs,
            |_| 1,
            |&p, slot| {
                slot[0] = Some(scene.first_hit(centers[p], robot.spheres[p % ns].radius));
                Ok::<_, CollisionError>(())
            },
            &mut pair_stats,
        )?;
        for c in 0..chunk.len() {
            let contact = (0..ns).find_map(|s| {
                hits[c * ns + s].map(|o| Contact {
                    sphere: s,
                    obstacle: o,
                })
            });
            reports.push(CollisionReport {
                colliding: contact.is_some(),
                contact,
            });
        }
    }
    Ok(reports)
}

/// Robot plus scene as a [`PointChecker`].
#[derive(Debug, Clone)]
pub struct SceneChecker<'a, T> {
    pub robot: &'a RobotModel<T>,
    pub scene: &'a Scene<T>,
    pub batch_size: usize,
}

impl<T: Real> PointChecker<T> for SceneChecker<'_, T> {
    type Error = CollisionError;

    fn check(&self, points: &[Vec<T>]) -> Result<Vec<bool>, CollisionError> {
        Ok(
            batch_check(points, self.robot, self.scene, self.batch_size)?
                .into_iter()
                .map(|r| r.colliding)
                .collect(),
        )
    }
}

// ---- scene files ----

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OriginSpec {
    #[serde(default)]
    pub xyz: [f64; 3],
    #[serde(default)]
    pub rpy: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub axis: [f64; 3],
    #[serde(default)]
    pub origin: OriginSpec,
    pub limits: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSpec {
    pub link: usize,
    #[serde(default)]
    pub offset: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub kind: String,
    pub dims: Vec<f64>,
    #[serde(default)]
    pub origin: OriginSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub joints: Vec<JointSpec>,
    #[serde(default)]
    pub spheres: Vec<SphereSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstaclesSpec {
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
}

/// Parsed scene file: robot, obstacles and an optional start/goal query.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub robot: RobotSpec,
    #[serde(default)]
    pub scene: ObstaclesSpec,
    pub problem: Option<QuerySpec>,
}

fn lit3<T: Real>(v: [f64; 3]) -> Vec3<T> {
    [T::lit(v[0]), T::lit(v[1]), T::lit(v[2])]
}

fn pose<T: Real>(o: &OriginSpec) -> Rigid<T> {
    Rigid::from_xyz_rpy(lit3(o.xyz), lit3(o.rpy))
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, CollisionError> {
        Ok(toml::from_str(text)?)
    }

    pub fn robot<T: Real>(&self) -> Result<RobotModel<T>, CollisionError> {
        let joints = self
            .robot
            .joints
            .iter()
            .enumerate()
            .map(|(i, j)| {
                let kind = match j.kind.as_str() {
                    "revolute" => JointKind::Revolute,
                    "prismatic" => JointKind::Prismatic,
                    other => {
                        return Err(CollisionError::Model(format!(
                            "joint {i}: unknown type {other:?}"
                        )))
                    }
                };
                Ok(Joint {
                    kind,
                    axis: lit3(j.axis),
                    origin: pose(&j.origin),
                    lo: T::lit(j.limits[0]),
                    hi: T::lit(j.limits[1]),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spheres = self
            .robot
            .spheres
            .iter()
            .map(|s| LinkSphere {
                link: s.link,
                offset: lit3(s.offset),
                radius: T::lit(s.radius),
            })
            .collect();
        RobotModel::new(joints, spheres)
    }

    pub fn scene<T: Real>(&self) -> Result<Scene<T>, CollisionError> {
        let obstacles = self
            .scene
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let shape = match (o.kind.as_str(), o.dims.as_slice()) {
                    ("box", &[x, y, z]) => Shape::Box {
                        size: lit3([x, y, z]),
                    },
                    ("cylinder", &[h, r]) => Shape::Cylinder {
                        height: T::lit(h),
                        radius: T::lit(r),
                    },
                    ("sphere", &[r]) => Shape::Sphere { radius: T::lit(r) },
                    (kind, dims) => {
                        return Err(CollisionError::Model(format!(
                        "obstacle {i}: {kind:?} with {} dims (box takes 3, cylinder 2, sphere 1)",
                        dims.len()
                    )))
                    }
                };
                Obstacle::new(shape, pose(&o.origin))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scene { obstacles })
    }
}

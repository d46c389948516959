//! Manifold tracing on the Freudenthal–Kuhn lattice and motion-planning
//! infeasibility certificates built on it.
//!
//! The geometric core ([`lattice`], [`manifold`], [`tracer`], [`subdivision`],
//! [`collision`]) is generic over the float type through [`scalar::Real`];
//! the planning layer ([`planner`], [`pipeline`]) works in `f64`. The
//! aliases below fix the scalar to `f64` for everyday use.

// `!(x > 0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod lattice;
pub mod manifold;
pub mod mesh;
pub mod pipeline;
pub mod planner;
pub mod region;
pub mod rigid;
pub mod scalar;
pub mod scenes;
pub mod stage;
pub mod subdivision;
pub mod tracer;

pub use lattice::{EdgeKey, PermSimplex};
pub use pipeline::{solve, verify_proof, InfeasibilityProof, Outcome, Problem, SolveParams};
pub use scalar::Real;

pub type LatticeConfig = lattice::LatticeConfig<f64>;
pub type BoxRegion = region::BoxRegion<f64>;
pub type AnalyticManifold = manifold::AnalyticManifold<f64>;
pub type KernelManifold = manifold::KernelClassifierManifold<f64>;
pub type TraceConfig = tracer::TraceConfig<f64>;
pub type TraceResult = tracer::TraceResult<f64>;
pub type RefineConfig = subdivision::RefineConfig<f64>;
pub type RefinedResult = subdivision::RefinedResult<f64>;
pub type RobotModel = collision::RobotModel<f64>;
pub type Scene = collision::Scene<f64>;
pub type EdgeMesh = mesh::EdgeMesh<f64>;

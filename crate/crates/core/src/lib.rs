//! Swept volume computation for watertight triangle meshes under rigid
//! trajectories.
//!
//! The motion perspective is inverted: the model stays fixed while spatial
//! points trace inverse trajectories, linearized over short time intervals.
//! Each tetrahedron of a uniform five-tet grid stores one linear distance
//! field per contributing interval; the swept boundary is the zero set of
//! their lower envelope, extracted per tet by convex clipping. A Stamping
//! baseline and analytic oracles make the quantitative claims checkable.

pub mod envelope;
pub mod error;
pub mod fieldprop;
pub mod geom;
pub mod mesh;
pub mod motion;
pub mod pipeline;
pub mod tetgrid;

pub use envelope::{extract_tet_surface, interpolate_field, OutputMesh};
pub use error::{Result, SweptError};
pub use fieldprop::{compute_field, defeats, propagate, select_seeds, DistanceField};
pub use geom::{Aabb, Segment3};
pub use mesh::{
    clip_segment_interior, load_mesh, save_obj, segment_signed_distance, signed_distance,
    TriangleMesh,
};
pub use motion::{discretize, RigidTransform, TimeInterval, Trajectory, TrajectorySpec};
pub use pipeline::{
    analytic_sphere_circle_sdf, compute_metrics, resolution_sweep, run_sweep, run_sweep_with_mesh,
    run_stamping_with_mesh, run_with_mesh, Method, MetricsReport, Reference, ReferenceSpec,
    RunConfig, RunOutput,
};
pub use tetgrid::{build_grid, TetGrid, TetRef};

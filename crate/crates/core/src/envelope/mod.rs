//! Per-tetrahedron zero-isosurface extraction for the lower envelope of the
//! stored linear distance fields, plus assembly of the per-tet patches into
//! an output surface.
//!
//! The production route clips the tet by the half-space `{pi_i(x) >= 0}` of
//! each field; faces created by a field plane are exactly the zero surface of
//! `min_i pi_i` inside the tet. An independent 4D route (`fourd`) realizes
//! the prism-cutting formulation and is used as a cross-check.

mod assemble;
mod cell;
pub mod fourd;
pub mod marching;

pub use assemble::{assemble_surface, open_edge_count, OutputMesh};
pub use cell::ConvexCell;

use crate::fieldprop::DistanceField;
use crate::geom::tet_barycentric;
use crate::tetgrid::TetRef;
use nalgebra::{Matrix3, Point3, Vector3};

/// One planar convex polygon of the extracted surface, tagged with the
/// interval of the field that produced it. The loop is canonicalized to start
/// at its lexicographically smallest vertex and wound so its normal points
/// toward the positive side of the field.
#[derive(Clone, Debug)]
pub struct Patch {
    pub interval: u32,
    pub polygon: Vec<Point3<f64>>,
}

/// Extraction result for one tet.
#[derive(Clone, Debug)]
pub struct TetPatches {
    pub tet: TetRef,
    pub patches: Vec<Patch>,
}

/// Barycentric interpolation of a field's vertex values at `x`.
pub fn interpolate_field(
    field: &DistanceField,
    verts: &[Point3<f64>; 4],
    x: &Point3<f64>,
) -> f64 {
    let w = tet_barycentric(x, &verts[0], &verts[1], &verts[2], &verts[3]);
    (0..4).map(|k| w[k] * field.d[k]).sum()
}

/// The unique linear extension `pi(x) = g . x + c` of four vertex values.
pub fn field_plane(verts: &[Point3<f64>; 4], d: &[f64; 4]) -> (Vector3<f64>, f64) {
    let rows = [verts[0] - verts[3], verts[1] - verts[3], verts[2] - verts[3]];
    let m = Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
    let rhs = Vector3::new(d[0] - d[3], d[1] - d[3], d[2] - d[3]);
    let g = m.try_inverse().expect("grid tets are non-degenerate") * rhs;
    let c = d[3] - g.dot(&verts[3].coords);
    (g, c)
}

/// Zero isosurface of `min_i pi_i` within one tet via incremental convex
/// clipping. Returns the field-tagged faces; an empty result is valid (all
/// fields positive over the tet, or the tet fully inside the swept volume).
pub fn extract_tet_surface(
    verts: &[Point3<f64>; 4],
    fields: &[DistanceField],
    eps: f64,
) -> Vec<Patch> {
    let mut cell = ConvexCell::from_tet(verts);
    for f in fields {
        let (g, c) = field_plane(verts, &f.d);
        cell.clip(&g, c, f.interval, eps, Some(&f.d));
        if cell.is_empty() {
            return Vec::new();
        }
    }
    cell.field_patches()
}

//! Watertight triangle meshes with precomputed angle-weighted pseudonormals
//! and an accelerator for point/segment distance queries.

mod bvh;
mod obj;
mod query;
pub mod shapes;

pub use bvh::{ClosestHit, DistanceQueryAccelerator, SegmentClosest};
pub use obj::{load_mesh, parse_obj, save_obj, write_obj};
pub use query::{clip_segment_interior, segment_signed_distance, signed_distance};

use crate::error::{Result, SweptError};
use crate::geom::{Aabb, TriFeature};
use nalgebra::{Point3, Vector3};
use rustc_hash::FxHashMap;

/// Default interior sample count for segment distance queries.
pub const DEFAULT_INTERIOR_SAMPLES: usize = 10;

/// A closed, consistently oriented triangle mesh.
///
/// Construction validates that every edge is shared by exactly two faces with
/// opposite traversal directions and that the enclosed volume is positive.
/// Degenerate faces and unreferenced vertices are dropped before validation;
/// the number of removed faces is retained for reporting.
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
    face_normals: Vec<Vector3<f64>>,
    vertex_normals: Vec<Vector3<f64>>,
    edge_normals: FxHashMap<(u32, u32), Vector3<f64>>,
    bbox: Aabb,
    accel: DistanceQueryAccelerator,
    removed_degenerate: usize,
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TriangleMesh {
    /// Build and validate a mesh from raw vertices and triangle indices.
    pub fn from_parts(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let mut bbox = Aabb::from_points(vertices.iter());
        let diag = bbox.diagonal();
        if !diag.is_finite() {
            return Err(SweptError::EmptyMesh);
        }
        let area_eps = 1e-14 * diag * diag;

        // Drop degenerate faces first; validation runs on what remains.
        let mut kept = Vec::with_capacity(triangles.len());
        let mut removed = 0usize;
        for t in &triangles {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                removed += 1;
                continue;
            }
            let (a, b, c) = (
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            let area2 = (b - a).cross(&(c - a)).norm();
            if area2 <= area_eps {
                removed += 1;
                continue;
            }
            kept.push(*t);
        }
        if kept.is_empty() {
            return Err(SweptError::EmptyMesh);
        }

        // Drop unreferenced vertices and reindex.
        let mut remap = vec![u32::MAX; vertices.len()];
        let mut packed = Vec::new();
        for t in &mut kept {
            for idx in t.iter_mut() {
                let old = *idx as usize;
                if remap[old] == u32::MAX {
                    remap[old] = packed.len() as u32;
                    packed.push(vertices[old]);
                }
                *idx = remap[old];
            }
        }
        let vertices = packed;
        bbox = Aabb::from_points(vertices.iter());

        // Manifold and orientation audit over directed edges.
        let mut edges: FxHashMap<(u32, u32), (u32, u32)> = FxHashMap::default();
        for t in &kept {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                let e = edges.entry(edge_key(a, b)).or_insert((0, 0));
                if a < b {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        for (&(v0, v1), &(fw, bw)) in &edges {
            let count = (fw + bw) as usize;
            if count == 1 {
                return Err(SweptError::OpenEdge { v0, v1, count });
            }
            if count > 2 {
                return Err(SweptError::NonManifoldEdge { v0, v1, count });
            }
            if fw != 1 || bw != 1 {
                return Err(SweptError::InconsistentWinding { v0, v1 });
            }
        }

        let volume: f64 = kept
            .iter()
            .map(|t| {
                let (a, b, c) = (
                    vertices[t[0] as usize],
                    vertices[t[1] as usize],
                    vertices[t[2] as usize],
                );
                a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
            })
            .sum();
        if volume <= 0.0 {
            return Err(SweptError::InsideOut { volume });
        }

        // Face normals plus angle-weighted vertex and edge pseudonormals.
        let mut face_normals = Vec::with_capacity(kept.len());
        let mut vertex_normals = vec![Vector3::zeros(); vertices.len()];
        let mut edge_normals: FxHashMap<(u32, u32), Vector3<f64>> = FxHashMap::default();
        for t in &kept {
            let (a, b, c) = (
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            let n = (b - a).cross(&(c - a)).normalize();
            face_normals.push(n);
            let corners = [a, b, c];
            for k in 0..3 {
                let p = corners[k];
                let u = corners[(k + 1) % 3] - p;
                let v = corners[(k + 2) % 3] - p;
                let angle = (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos();
                vertex_normals[t[k] as usize] += n * angle;
                *edge_normals
                    .entry(edge_key(t[k], t[(k + 1) % 3]))
                    .or_insert_with(Vector3::zeros) += n;
            }
        }
        for n in &mut vertex_normals {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        for n in edge_normals.values_mut() {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }

        let accel = DistanceQueryAccelerator::build(&vertices, &kept);

        Ok(TriangleMesh {
            vertices,
            triangles: kept,
            face_normals,
            vertex_normals,
            edge_normals,
            bbox,
            accel,
            removed_degenerate: removed,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn accelerator(&self) -> &DistanceQueryAccelerator {
        &self.accel
    }

    /// Faces dropped during load-time validation.
    pub fn removed_degenerate_faces(&self) -> usize {
        self.removed_degenerate
    }

    pub fn triangle_points(&self, tri: u32) -> [Point3<f64>; 3] {
        let t = self.triangles[tri as usize];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    /// Angle-weighted pseudonormal at the given feature of triangle `tri`.
    pub fn pseudonormal(&self, tri: u32, feature: TriFeature) -> Vector3<f64> {
        let t = self.triangles[tri as usize];
        match feature {
            TriFeature::Face => self.face_normals[tri as usize],
            TriFeature::Vertex(k) => self.vertex_normals[t[k as usize] as usize],
            TriFeature::Edge(k) => {
                let key = edge_key(t[k as usize], t[((k + 1) % 3) as usize]);
                self.edge_normals[&key]
            }
        }
    }

    /// Uniformly scaled copy about the origin. Revalidates on construction.
    pub fn scaled(&self, s: f64) -> Result<TriangleMesh> {
        let vertices = self.vertices.iter().map(|p| p * s).collect();
        TriangleMesh::from_parts(vertices, self.triangles.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn cube_is_valid() {
        let mesh = shapes::unit_cube();
        assert_eq!(mesh.triangles().len(), 12);
        assert_eq!(mesh.vertices().len(), 8);
        assert_eq!(mesh.removed_degenerate_faces(), 0);
    }

    #[test]
    fn open_mesh_rejected_with_edge_diagnostic() {
        let mesh = shapes::unit_cube();
        let verts = mesh.vertices().to_vec();
        let mut tris = mesh.triangles().to_vec();
        tris.pop();
        match TriangleMesh::from_parts(verts, tris) {
            Err(SweptError::OpenEdge { count: 1, .. }) => {}
            other => panic!("expected open-edge rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn inside_out_rejected() {
        let mesh = shapes::unit_cube();
        let verts = mesh.vertices().to_vec();
        let tris: Vec<[u32; 3]> = mesh
            .triangles()
            .iter()
            .map(|t| [t[0], t[2], t[1]])
            .collect();
        assert!(matches!(
            TriangleMesh::from_parts(verts, tris),
            Err(SweptError::InsideOut { .. })
        ));
    }

    #[test]
    fn degenerate_faces_removed_and_counted() {
        let mesh = shapes::unit_cube();
        let verts = mesh.vertices().to_vec();
        let mut tris = mesh.triangles().to_vec();
        tris.push([0, 0, 1]);
        // A duplicated-index face is degenerate; removing it restores the cube.
        let rebuilt = TriangleMesh::from_parts(verts, tris).unwrap();
        assert_eq!(rebuilt.triangles().len(), 12);
        assert_eq!(rebuilt.removed_degenerate_faces(), 1);
    }
}

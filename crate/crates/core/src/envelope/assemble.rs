//! Patch concatenation, vertex welding, and output surface bookkeeping.

use super::TetPatches;
use crate::geom::Aabb;
use nalgebra::Point3;
use rustc_hash::FxHashMap;

/// Triangle soup produced by extraction, post-welding.
#[derive(Clone, Debug, Default)]
pub struct OutputMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[u32; 3]>,
}

impl OutputMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    pub fn scaled(&self, s: f64) -> OutputMesh {
        OutputMesh {
            vertices: self.vertices.iter().map(|p| p * s).collect(),
            triangles: self.triangles.clone(),
        }
    }
}

/// Weld patch polygons into an indexed mesh.
///
/// Vertices are merged within `1e-6 * cell_size` by quantized spatial
/// hashing with neighbor probing; fan triangles below `1e-12 * cell_size^2`
/// area are dropped. Patch sets must arrive in a deterministic order (the
/// pipeline sorts by tet) so the output is byte-stable.
pub fn assemble_surface(patch_sets: &[TetPatches], cell_size: f64) -> OutputMesh {
    let tol = 1e-6 * cell_size;
    let area_eps = 1e-12 * cell_size * cell_size;
    let mut grid: FxHashMap<[i64; 3], Vec<u32>> = FxHashMap::default();
    let mut out = OutputMesh::default();

    let key_of = |p: &Point3<f64>| -> [i64; 3] {
        [
            (p.x / tol).round() as i64,
            (p.y / tol).round() as i64,
            (p.z / tol).round() as i64,
        ]
    };

    let intern = |p: &Point3<f64>,
                      grid: &mut FxHashMap<[i64; 3], Vec<u32>>,
                      vertices: &mut Vec<Point3<f64>>|
     -> u32 {
        let k = key_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let probe = [k[0] + dx, k[1] + dy, k[2] + dz];
                    if let Some(ids) = grid.get(&probe) {
                        for &id in ids {
                            if (vertices[id as usize] - p).norm() <= tol {
                                return id;
                            }
                        }
                    }
                }
            }
        }
        let id = vertices.len() as u32;
        vertices.push(*p);
        grid.entry(k).or_default().push(id);
        id
    };

    for set in patch_sets {
        for patch in &set.patches {
            let poly = &patch.polygon;
            if poly.len() < 3 {
                continue;
            }
            let ids: Vec<u32> = poly
                .iter()
                .map(|p| intern(p, &mut grid, &mut out.vertices))
                .collect();
            for k in 1..ids.len() - 1 {
                let tri = [ids[0], ids[k], ids[k + 1]];
                if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                    continue;
                }
                let [a, b, c] = [
                    out.vertices[tri[0] as usize],
                    out.vertices[tri[1] as usize],
                    out.vertices[tri[2] as usize],
                ];
                if 0.5 * (b - a).cross(&(c - a)).norm() <= area_eps {
                    continue;
                }
                out.triangles.push(tri);
            }
        }
    }
    out
}

/// Number of edges not shared by exactly two triangles. Reported as a
/// quality metric; per-tet extraction can leave T-junctions.
pub fn open_edge_count(mesh: &OutputMesh) -> usize {
    let mut edges: FxHashMap<(u32, u32), usize> = FxHashMap::default();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = if a < b { (a, b) } else { (b, a) };
            *edges.entry(key).or_insert(0) += 1;
        }
    }
    edges.values().filter(|&&c| c != 2).count()
}

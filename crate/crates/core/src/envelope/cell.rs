//! Convex cell maintained under half-space clipping.

use super::Patch;
use nalgebra::{Point3, Vector3};
use rustc_hash::FxHashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FaceTag {
    Tet,
    Field(u32),
}

#[derive(Clone, Debug)]
struct CellFace {
    tag: FaceTag,
    indices: Vec<u32>,
}


/// Convex polytope represented by vertices and oriented face loops.
///
/// Face loops are wound so their normals point out of the cell. Removed
/// vertices stay in the vertex list as orphans, so indices are stable; in
/// particular the four original tet corners keep ids 0..4, which lets clips
/// reuse exact per-corner field values.
#[derive(Clone, Debug)]
pub struct ConvexCell {
    vertices: Vec<Point3<f64>>,
    faces: Vec<CellFace>,
    empty: bool,
}

impl ConvexCell {
    pub fn from_tet(verts: &[Point3<f64>; 4]) -> Self {
        let mut faces = Vec::with_capacity(4);
        for omit in 0..4u32 {
            let mut loop_ids: Vec<u32> = (0..4).filter(|&k| k != omit).collect();
            let [a, b, c] = [
                verts[loop_ids[0] as usize],
                verts[loop_ids[1] as usize],
                verts[loop_ids[2] as usize],
            ];
            let n = (b - a).cross(&(c - a));
            if n.dot(&(verts[omit as usize] - a)) > 0.0 {
                loop_ids.swap(1, 2);
            }
            faces.push(CellFace {
                tag: FaceTag::Tet,
                indices: loop_ids,
            });
        }
        ConvexCell {
            vertices: verts.to_vec(),
            faces,
            empty: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Membership test against the live faces.
    pub fn contains(&self, p: &Point3<f64>, eps: f64) -> bool {
        if self.empty {
            return false;
        }
        self.faces.iter().all(|f| {
            let (n, d) = self.face_plane(f);
            n.dot(&p.coords) - d <= eps * n.norm().max(1.0)
        })
    }

    fn face_plane(&self, f: &CellFace) -> (Vector3<f64>, f64) {
        let n = newell_normal(&f.indices, &self.vertices);
        let p0 = self.vertices[f.indices[0] as usize];
        (n, n.dot(&p0.coords))
    }

    /// Clip by the half-space `{x : g . x + c >= 0}`, keeping the
    /// non-negative side. `exact` supplies bit-exact plane values for the
    /// four original tet corners. Vertices within `eps` of the plane are
    /// retained on the kept side, so a zero surface that coincides with a
    /// tet face is still emitted (by the cell on its positive side).
    pub fn clip(&mut self, g: &Vector3<f64>, c: f64, interval: u32, eps: f64, exact: Option<&[f64; 4]>) {
        if self.empty {
            return;
        }
        let values: Vec<f64> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| match exact {
                Some(d) if i < 4 => d[i],
                _ => g.dot(&v.coords) + c,
            })
            .collect();
        let old_len = values.len() as u32;
        let kept: Vec<bool> = values.iter().map(|&s| s >= -eps).collect();

        if kept.iter().all(|&k| k) {
            return; // nothing removed
        }
        if !kept.iter().any(|&k| k) {
            self.empty = true;
            self.faces.clear();
            return;
        }

        let mut crossings: FxHashMap<(u32, u32), u32> = FxHashMap::default();
        let mut new_faces: Vec<CellFace> = Vec::with_capacity(self.faces.len() + 1);
        let mut boundary_edges: Vec<(u32, u32)> = Vec::new();

        for face in &self.faces {
            let n = face.indices.len();
            let mut out_loop: Vec<u32> = Vec::with_capacity(n + 2);
            let mut lost = false;
            for i in 0..n {
                let cur = face.indices[i];
                let nxt = face.indices[(i + 1) % n];
                if kept[cur as usize] {
                    out_loop.push(cur);
                } else {
                    lost = true;
                }
                if kept[cur as usize] != kept[nxt as usize] {
                    let (lo, hi) = if cur < nxt { (cur, nxt) } else { (nxt, cur) };
                    let id = *crossings.entry((lo, hi)).or_insert_with(|| {
                        let p = crate::geom::edge_zero_crossing(
                            &self.vertices[lo as usize],
                            &self.vertices[hi as usize],
                            values[lo as usize],
                            values[hi as usize],
                        );
                        self.vertices.push(p);
                        (self.vertices.len() - 1) as u32
                    });
                    out_loop.push(id);
                }
            }
            if out_loop.len() >= 3 {
                if lost {
                    // Consecutive crossing vertices of a cut face trace the
                    // cut polygon.
                    let m = out_loop.len();
                    for i in 0..m {
                        let u = out_loop[i];
                        let w = out_loop[(i + 1) % m];
                        if u >= old_len && w >= old_len && u != w {
                            boundary_edges.push(if u < w { (u, w) } else { (w, u) });
                        }
                    }
                }
                new_faces.push(CellFace {
                    tag: face.tag,
                    indices: out_loop,
                });
            }
        }

        boundary_edges.sort_unstable();
        boundary_edges.dedup();
        if let Some(mut loop_ids) = chain_loop(&boundary_edges) {
            if loop_ids.len() >= 3 {
                // Orient the cut face outward: toward the removed side (-g).
                let n = newell_normal(&loop_ids, &self.vertices);
                if n.dot(g) > 0.0 {
                    loop_ids.reverse();
                }
                new_faces.push(CellFace {
                    tag: FaceTag::Field(interval),
                    indices: loop_ids,
                });
            }
        }

        self.faces = new_faces;
        if self.faces.is_empty() {
            self.empty = true;
        }
    }

    /// Field-tagged faces as canonicalized patches, wound toward the
    /// positive side of their field (outward for the swept volume).
    pub fn field_patches(&self) -> Vec<Patch> {
        let mut out = Vec::new();
        for f in &self.faces {
            let FaceTag::Field(interval) = f.tag else {
                continue;
            };
            let mut poly: Vec<Point3<f64>> = f
                .indices
                .iter()
                .map(|&i| self.vertices[i as usize])
                .collect();
            poly.dedup_by(|a, b| a == b);
            if poly.len() >= 2 && poly[0] == poly[poly.len() - 1] {
                poly.pop();
            }
            if poly.len() < 3 {
                continue;
            }
            // Cut faces are stored cell-outward (toward -g); emit reversed.
            poly.reverse();
            canonical_rotate(&mut poly);
            out.push(Patch {
                interval,
                polygon: poly,
            });
        }
        out.sort_by_key(|p| p.interval);
        out
    }
}

fn newell_normal(ids: &[u32], vertices: &[Point3<f64>]) -> Vector3<f64> {
    let mut n = Vector3::zeros();
    for i in 0..ids.len() {
        let a = vertices[ids[i] as usize];
        let b = vertices[ids[(i + 1) % ids.len()] as usize];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

/// Chain undirected edges into a single closed loop; `None` when the edge set
/// is not a simple cycle.
fn chain_loop(edges: &[(u32, u32)]) -> Option<Vec<u32>> {
    if edges.len() < 3 {
        return None;
    }
    let mut adj: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|v| v.len() != 2) {
        return None;
    }
    let start = *adj.keys().min()?;
    let mut loop_ids = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0].min(adj[&start][1]);
    while cur != start {
        loop_ids.push(cur);
        let ns = &adj[&cur];
        let nxt = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = nxt;
        if loop_ids.len() > edges.len() {
            return None;
        }
    }
    if loop_ids.len() == edges.len() {
        Some(loop_ids)
    } else {
        None
    }
}

/// Rotate the loop so the lexicographically smallest vertex leads, keeping
/// orientation. Makes fan triangulation deterministic across routes.
pub(crate) fn canonical_rotate(poly: &mut Vec<Point3<f64>>) {
    let min_idx = poly
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (a.x, a.y, a.z)
                .partial_cmp(&(b.x, b.y, b.z))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    poly.rotate_left(min_idx);
}

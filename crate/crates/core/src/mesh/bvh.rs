//! Bounding-volume hierarchy over mesh triangles.
//!
//! Closest-point queries return the exact brute-force minimum; segment
//! queries report every intersection parameter and the closest approach with
//! its triangle feature so callers can resolve signs via pseudonormals.

use crate::geom::{
    closest_point_triangle, segment_triangle_closest, segment_triangle_intersection, Aabb,
    Segment3, TriFeature,
};
use nalgebra::Point3;

const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
struct Node {
    aabb: Aabb,
    // Leaf when count > 0: triangles order[start..start + count].
    left: u32,
    right: u32,
    start: u32,
    count: u32,
}

/// BVH accelerator for point and segment queries against a triangle set.
pub struct DistanceQueryAccelerator {
    nodes: Vec<Node>,
    order: Vec<u32>,
    leaf_size: usize,
}

/// Result of a closest-point query.
#[derive(Clone, Copy, Debug)]
pub struct ClosestHit {
    pub dist: f64,
    pub point: Point3<f64>,
    pub tri: u32,
    pub feature: TriFeature,
}

/// Result of a segment closest-approach query.
#[derive(Clone, Copy, Debug)]
pub struct SegmentClosest {
    pub dist: f64,
    pub point_on_segment: Point3<f64>,
    pub point_on_mesh: Point3<f64>,
    pub tri: u32,
    pub feature: TriFeature,
}

fn tri_points(
    vertices: &[Point3<f64>],
    triangles: &[[u32; 3]],
    tri: u32,
) -> (Point3<f64>, Point3<f64>, Point3<f64>) {
    let t = triangles[tri as usize];
    (
        vertices[t[0] as usize],
        vertices[t[1] as usize],
        vertices[t[2] as usize],
    )
}

impl DistanceQueryAccelerator {
    pub fn build(vertices: &[Point3<f64>], triangles: &[[u32; 3]]) -> Self {
        assert!(!triangles.is_empty(), "cannot build a BVH over zero triangles");
        let centroids: Vec<Point3<f64>> = triangles
            .iter()
            .map(|t| {
                Point3::from(
                    (vertices[t[0] as usize].coords
                        + vertices[t[1] as usize].coords
                        + vertices[t[2] as usize].coords)
                        / 3.0,
                )
            })
            .collect();
        let tri_boxes: Vec<Aabb> = triangles
            .iter()
            .map(|t| {
                Aabb::from_points(
                    t.iter().map(|&i| &vertices[i as usize]),
                )
            })
            .collect();

        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::new();
        Self::split(&mut nodes, &mut order, 0, triangles.len(), &centroids, &tri_boxes);
        DistanceQueryAccelerator {
            nodes,
            order,
            leaf_size: LEAF_SIZE,
        }
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    fn split(
        nodes: &mut Vec<Node>,
        order: &mut [u32],
        start: usize,
        count: usize,
        centroids: &[Point3<f64>],
        tri_boxes: &[Aabb],
    ) -> u32 {
        let mut aabb = Aabb::empty();
        for &t in &order[start..start + count] {
            aabb = aabb.union(&tri_boxes[t as usize]);
        }
        let idx = nodes.len() as u32;
        nodes.push(Node {
            aabb,
            left: 0,
            right: 0,
            start: start as u32,
            count: 0,
        });
        if count <= LEAF_SIZE {
            nodes[idx as usize].count = count as u32;
            return idx;
        }
        // Median split along the widest centroid axis; index tiebreak keeps
        // the build deterministic.
        let cbox = Aabb::from_points(order[start..start + count].iter().map(|&t| &centroids[t as usize]));
        let e = cbox.extents();
        let axis = if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        };
        order[start..start + count].sort_unstable_by(|&a, &b| {
            centroids[a as usize][axis]
                .total_cmp(&centroids[b as usize][axis])
                .then(a.cmp(&b))
        });
        let half = count / 2;
        let left = Self::split(nodes, order, start, half, centroids, tri_boxes);
        let right = Self::split(nodes, order, start + half, count - half, centroids, tri_boxes);
        nodes[idx as usize].left = left;
        nodes[idx as usize].right = right;
        idx
    }

    /// Exact closest point on the mesh to `q`.
    pub fn closest_point(
        &self,
        vertices: &[Point3<f64>],
        triangles: &[[u32; 3]],
        q: &Point3<f64>,
    ) -> ClosestHit {
        let mut best = ClosestHit {
            dist: f64::INFINITY,
            point: *q,
            tri: 0,
            feature: TriFeature::Face,
        };
        let mut best_d2 = f64::INFINITY;
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.dist2_to_point(q) >= best_d2 {
                continue;
            }
            if node.count > 0 {
                for &t in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let (a, b, c) = tri_points(vertices, triangles, t);
                    let (cp, feat) = closest_point_triangle(q, &a, &b, &c);
                    let d2 = (q - cp).norm_squared();
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = ClosestHit {
                            dist: 0.0,
                            point: cp,
                            tri: t,
                            feature: feat,
                        };
                    }
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = self.nodes[l as usize].aabb.dist2_to_point(q);
                let dr = self.nodes[r as usize].aabb.dist2_to_point(q);
                // Visit nearer child first.
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        best.dist = best_d2.sqrt();
        best
    }

    /// All segment/triangle intersection parameters along `seg`, unsorted.
    pub fn segment_intersections(
        &self,
        vertices: &[Point3<f64>],
        triangles: &[[u32; 3]],
        seg: &Segment3,
    ) -> Vec<f64> {
        let seg_box = seg.aabb();
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !node.aabb.overlaps(&seg_box) {
                continue;
            }
            if node.count > 0 {
                for &t in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let (a, b, c) = tri_points(vertices, triangles, t);
                    if let Some(tp) = segment_triangle_intersection(seg, &a, &b, &c) {
                        out.push(tp);
                    }
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        out
    }

    /// Closest approach between `seg` and the mesh (zero when they intersect).
    pub fn segment_closest(
        &self,
        vertices: &[Point3<f64>],
        triangles: &[[u32; 3]],
        seg: &Segment3,
    ) -> SegmentClosest {
        let seg_box = seg.aabb();
        let mut best = SegmentClosest {
            dist: f64::INFINITY,
            point_on_segment: seg.p0,
            point_on_mesh: seg.p0,
            tri: 0,
            feature: TriFeature::Face,
        };
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.dist2_to_aabb(&seg_box) >= best.dist * best.dist {
                continue;
            }
            if node.count > 0 {
                for &t in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let (a, b, c) = tri_points(vertices, triangles, t);
                    let (d, on_seg, on_tri, feat) = segment_triangle_closest(seg, &a, &b, &c);
                    if d < best.dist {
                        best = SegmentClosest {
                            dist: d,
                            point_on_segment: on_seg,
                            point_on_mesh: on_tri,
                            tri: t,
                            feature: feat,
                        };
                        if d == 0.0 {
                            return best;
                        }
                    }
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = self.nodes[l as usize].aabb.dist2_to_aabb(&seg_box);
                let dr = self.nodes[r as usize].aabb.dist2_to_aabb(&seg_box);
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        best
    }
}

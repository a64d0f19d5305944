//! Shared geometric primitives: axis-aligned boxes, segments, and
//! closest-point / intersection routines on triangles.

use nalgebra::{Point3, Vector3};

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3<f64>>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Point3<f64>) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: Point3::new(
                self.min.x.min(other.min.x),
                self.min.y.min(other.min.y),
                self.min.z.min(other.min.z),
            ),
            max: Point3::new(
                self.max.x.max(other.max.x),
                self.max.y.max(other.max.y),
                self.max.z.max(other.max.z),
            ),
        }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|k| self.min[k] > self.max[k])
    }

    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn extents(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn max_extent(&self) -> f64 {
        let e = self.extents();
        e.x.max(e.y).max(e.z)
    }

    pub fn diagonal(&self) -> f64 {
        self.extents().norm()
    }

    pub fn expanded(&self, margin: f64) -> Aabb {
        let m = Vector3::repeat(margin);
        Aabb {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn scaled(&self, s: f64) -> Aabb {
        Aabb {
            min: self.min * s,
            max: self.max * s,
        }
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn dist2_to_point(&self, p: &Point3<f64>) -> f64 {
        let mut d2 = 0.0;
        for k in 0..3 {
            let v = if p[k] < self.min[k] {
                self.min[k] - p[k]
            } else if p[k] > self.max[k] {
                p[k] - self.max[k]
            } else {
                0.0
            };
            d2 += v * v;
        }
        d2
    }

    /// Component-wise gap between two boxes; zero when they overlap.
    pub fn dist2_to_aabb(&self, other: &Aabb) -> f64 {
        let mut d2 = 0.0;
        for k in 0..3 {
            let gap = (self.min[k] - other.max[k]).max(other.min[k] - self.max[k]).max(0.0);
            d2 += gap * gap;
        }
        d2
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && self.max[k] >= other.min[k])
    }
}

/// Line segment between two points. Zero length is allowed and treated as a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment3 {
    pub p0: Point3<f64>,
    pub p1: Point3<f64>,
}

impl Segment3 {
    pub fn new(p0: Point3<f64>, p1: Point3<f64>) -> Self {
        Segment3 { p0, p1 }
    }

    pub fn at(&self, t: f64) -> Point3<f64> {
        self.p0 + (self.p1 - self.p0) * t
    }

    pub fn length(&self) -> f64 {
        (self.p1 - self.p0).norm()
    }

    pub fn aabb(&self) -> Aabb {
        let mut b = Aabb::empty();
        b.grow(&self.p0);
        b.grow(&self.p1);
        b
    }
}

/// Which feature of a triangle realizes a closest-point query.
///
/// `Edge(k)` is the edge from corner `k` to corner `(k + 1) % 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriFeature {
    Vertex(u8),
    Edge(u8),
    Face,
}

/// Closest point on triangle `(a, b, c)` to `p`, with the realizing feature.
///
/// Region classification follows the standard Voronoi-region walk, so the
/// feature is exact rather than inferred from barycentric tolerances.
pub fn closest_point_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> (Point3<f64>, TriFeature) {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, TriFeature::Vertex(0));
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, TriFeature::Vertex(1));
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (a + ab * t, TriFeature::Edge(0));
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, TriFeature::Vertex(2));
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (a + ac * t, TriFeature::Edge(2));
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * t, TriFeature::Edge(1));
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, TriFeature::Face)
}

/// Closest points between segments `(p1, q1)` and `(p2, q2)`.
/// Returns `(s, t, point_on_1, point_on_2)` with clamped parameters.
pub fn closest_segment_segment(
    p1: &Point3<f64>,
    q1: &Point3<f64>,
    p2: &Point3<f64>,
    q2: &Point3<f64>,
) -> (f64, f64, Point3<f64>, Point3<f64>) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);

    let (mut s, mut t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        s = 0.0;
        t = 0.0;
    } else if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            s = if denom != 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (s, t, c1, c2)
}

/// Segment/triangle intersection parameter on the segment, if any.
///
/// Near-parallel configurations return `None`; callers resolve tangencies by
/// sign classification instead.
pub fn segment_triangle_intersection(
    seg: &Segment3,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Option<f64> {
    let dir = seg.p1 - seg.p0;
    let e1 = b - a;
    let e2 = c - a;
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    let scale = dir.norm() * e1.norm() * e2.norm();
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let inv = 1.0 / det;
    let s = seg.p0 - a;
    let u = s.dot(&h) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    if (-1e-12..=1.0 + 1e-12).contains(&t) {
        Some(t.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Closest approach between a segment and a triangle.
/// Returns `(distance, point_on_segment, point_on_triangle, feature)`.
pub fn segment_triangle_closest(
    seg: &Segment3,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> (f64, Point3<f64>, Point3<f64>, TriFeature) {
    if let Some(t) = segment_triangle_intersection(seg, a, b, c) {
        let p = seg.at(t);
        return (0.0, p, p, TriFeature::Face);
    }

    let mut best = f64::INFINITY;
    let mut best_seg = seg.p0;
    let mut best_tri = *a;
    let mut best_feat = TriFeature::Vertex(0);

    for (p, _is_start) in [(seg.p0, true), (seg.p1, false)] {
        let (cp, feat) = closest_point_triangle(&p, a, b, c);
        let d2 = (p - cp).norm_squared();
        if d2 < best {
            best = d2;
            best_seg = p;
            best_tri = cp;
            best_feat = feat;
        }
    }

    let corners = [*a, *b, *c];
    for k in 0..3u8 {
        let e0 = corners[k as usize];
        let e1 = corners[((k + 1) % 3) as usize];
        let (_, t, on_seg, on_edge) = closest_segment_segment(&seg.p0, &seg.p1, &e0, &e1);
        let d2 = (on_seg - on_edge).norm_squared();
        if d2 < best {
            best = d2;
            best_seg = on_seg;
            best_tri = on_edge;
            best_feat = if t <= 0.0 {
                TriFeature::Vertex(k)
            } else if t >= 1.0 {
                TriFeature::Vertex((k + 1) % 3)
            } else {
                TriFeature::Edge(k)
            };
        }
    }

    (best.sqrt(), best_seg, best_tri, best_feat)
}

/// Barycentric coordinates of `p` with respect to tetrahedron `(a, b, c, d)`.
pub fn tet_barycentric(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
    d: &Point3<f64>,
) -> [f64; 4] {
    let m = nalgebra::Matrix3::from_columns(&[b - a, c - a, d - a]);
    let rhs = p - a;
    let inv = m.try_inverse().expect("degenerate tetrahedron");
    let bc = inv * rhs;
    [1.0 - bc.x - bc.y - bc.z, bc.x, bc.y, bc.z]
}

/// Signed volume of tetrahedron `(a, b, c, d)`.
pub fn tet_volume(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>, d: &Point3<f64>) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

/// Zero crossing of a linear scalar along the edge from `v_lo` to `v_hi`.
///
/// Callers must pass the endpoints in a canonical order so that crossings
/// computed independently for adjacent elements are bit-identical.
pub fn edge_zero_crossing(
    v_lo: &Point3<f64>,
    v_hi: &Point3<f64>,
    s_lo: f64,
    s_hi: f64,
) -> Point3<f64> {
    let t = s_lo / (s_lo - s_hi);
    v_lo + (v_hi - v_lo) * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_point_regions() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);

        let (p, f) = closest_point_triangle(&Point3::new(-1.0, -1.0, 0.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Vertex(0));
        assert_eq!(p, a);

        let (p, f) = closest_point_triangle(&Point3::new(0.5, -1.0, 0.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Edge(0));
        assert!((p - Point3::new(0.5, 0.0, 0.0)).norm() < 1e-15);

        let (p, f) = closest_point_triangle(&Point3::new(0.25, 0.25, 3.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Face);
        assert!((p - Point3::new(0.25, 0.25, 0.0)).norm() < 1e-15);

        let (_, f) = closest_point_triangle(&Point3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert_eq!(f, TriFeature::Edge(1));
    }

    #[test]
    fn segment_segment_parallel_and_crossing() {
        let (s, t, c1, c2) = closest_segment_segment(
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::new(0.5, 1.0, 0.0),
            &Point3::new(0.5, 2.0, 0.0),
        );
        assert!((s - 0.5).abs() < 1e-15);
        assert_eq!(t, 0.0);
        assert!((c1 - c2).norm() - 1.0 < 1e-15);
    }

    #[test]
    fn segment_triangle_hit_and_miss() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        let seg = Segment3::new(Point3::new(0.2, 0.2, -1.0), Point3::new(0.2, 0.2, 1.0));
        let t = segment_triangle_intersection(&seg, &a, &b, &c).unwrap();
        assert!((t - 0.5).abs() < 1e-12);

        let seg = Segment3::new(Point3::new(2.0, 2.0, -1.0), Point3::new(2.0, 2.0, 1.0));
        assert!(segment_triangle_intersection(&seg, &a, &b, &c).is_none());
        let (d, _, _, f) = segment_triangle_closest(&seg, &a, &b, &c);
        assert!((d - 1.5 * 2.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(f, TriFeature::Edge(1));
    }

    #[test]
    fn barycentric_roundtrip() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        let d = Point3::new(0.0, 0.0, 1.0);
        let p = Point3::new(0.1, 0.2, 0.3);
        let w = tet_barycentric(&p, &a, &b, &c, &d);
        let q = Point3::from(
            a.coords * w[0] + b.coords * w[1] + c.coords * w[2] + d.coords * w[3],
        );
        assert!((p - q).norm() < 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}

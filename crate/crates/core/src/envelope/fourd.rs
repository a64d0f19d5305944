//! Reference extraction route through 4D.
//!
//! The tet is extended to a prism in (x, y, z, w) with a finite w-bound
//! exceeding every |d| value, cut by the half-spaces `w <= pi_i(x)` (the
//! lower envelope), sliced at `w = 0`, and projected back to 3D. Implemented
//! by brute-force vertex enumeration over hyperplane quadruples, a completely
//! different computational path from the incremental clip route, so the two
//! can check each other.

use super::cell::canonical_rotate;
use super::{field_plane, Patch};
use crate::fieldprop::DistanceField;
use nalgebra::{Matrix4, Point3, Vector3, Vector4};

struct HalfSpace {
    // a . (x, w) <= b
    a: Vector4<f64>,
    b: f64,
    field: Option<u32>,
}

pub fn extract_tet_surface_4d(
    verts: &[Point3<f64>; 4],
    fields: &[DistanceField],
    eps: f64,
) -> Vec<Patch> {
    if fields.is_empty() {
        return Vec::new();
    }
    let w_bound = fields
        .iter()
        .flat_map(|f| f.d.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        + 1.0;

    let mut planes: Vec<HalfSpace> = Vec::new();
    // Tet side facets, outward.
    for omit in 0..4 {
        let ids: Vec<usize> = (0..4).filter(|&k| k != omit).collect();
        let (a, b, c) = (verts[ids[0]], verts[ids[1]], verts[ids[2]]);
        let mut n = (b - a).cross(&(c - a)).normalize();
        if n.dot(&(verts[omit] - a)) > 0.0 {
            n = -n;
        }
        planes.push(HalfSpace {
            a: Vector4::new(n.x, n.y, n.z, 0.0),
            b: n.dot(&a.coords),
            field: None,
        });
    }
    // w caps.
    planes.push(HalfSpace {
        a: Vector4::new(0.0, 0.0, 0.0, 1.0),
        b: w_bound,
        field: None,
    });
    planes.push(HalfSpace {
        a: Vector4::new(0.0, 0.0, 0.0, -1.0),
        b: w_bound,
        field: None,
    });
    // Envelope cuts: w <= pi_i(x).
    for f in fields {
        let (g, c) = field_plane(verts, &f.d);
        planes.push(HalfSpace {
            a: Vector4::new(-g.x, -g.y, -g.z, 1.0),
            b: c,
            field: Some(f.interval),
        });
    }

    // Vertex enumeration over hyperplane quadruples.
    let n = planes.len();
    let mut vertices: Vec<(Vector4<f64>, Vec<usize>)> = Vec::new();
    let sat_eps = eps.max(1e-9) * w_bound.max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let m = Matrix4::from_rows(&[
                        planes[i].a.transpose(),
                        planes[j].a.transpose(),
                        planes[k].a.transpose(),
                        planes[l].a.transpose(),
                    ]);
                    let rhs = Vector4::new(planes[i].b, planes[j].b, planes[k].b, planes[l].b);
                    let Some(inv) = m.try_inverse() else {
                        continue;
                    };
                    if m.determinant().abs() < 1e-10 {
                        continue;
                    }
                    let v = inv * rhs;
                    if !v.iter().all(|c| c.is_finite()) {
                        continue;
                    }
                    if planes.iter().any(|p| p.a.dot(&v) > p.b + sat_eps) {
                        continue;
                    }
                    if let Some((_, tight)) = vertices
                        .iter_mut()
                        .find(|(u, _)| (u - v).norm() < 1e-9 * w_bound.max(1.0))
                    {
                        for idx in [i, j, k, l] {
                            if !tight.contains(&idx) {
                                tight.push(idx);
                            }
                        }
                    } else {
                        let mut tight: Vec<usize> = (0..n)
                            .filter(|&p| (planes[p].a.dot(&v) - planes[p].b).abs() <= sat_eps)
                            .collect();
                        tight.sort_unstable();
                        vertices.push((v, tight));
                    }
                }
            }
        }
    }

    // Slice edges (vertex pairs sharing >= 3 tight hyperplanes) at w = 0.
    let mut section: Vec<(Vector3<f64>, Vec<usize>)> = Vec::new();
    let mut push_section = |p: Vector3<f64>, tight: Vec<usize>| {
        if !section
            .iter()
            .any(|(q, _)| (q - p).norm() < 1e-9 * w_bound.max(1.0))
        {
            section.push((p, tight));
        }
    };
    for (v, tight) in &vertices {
        if v.w.abs() <= sat_eps {
            push_section(Vector3::new(v.x, v.y, v.z), tight.clone());
        }
    }
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let (va, ta) = &vertices[i];
            let (vb, tb) = &vertices[j];
            let shared: Vec<usize> = ta.iter().copied().filter(|p| tb.contains(p)).collect();
            if shared.len() < 3 {
                continue;
            }
            if va.w * vb.w < 0.0 && va.w.abs() > sat_eps && vb.w.abs() > sat_eps {
                let t = -va.w / (vb.w - va.w);
                let p = va + (vb - va) * t;
                push_section(Vector3::new(p.x, p.y, p.z), shared);
            }
        }
    }

    // Group section vertices per field hyperplane and order each polygon.
    let mut patches = Vec::new();
    for (pi, plane) in planes.iter().enumerate() {
        let Some(interval) = plane.field else {
            continue;
        };
        let members: Vec<Vector3<f64>> = section
            .iter()
            .filter(|(_, tight)| tight.contains(&pi))
            .map(|(p, _)| *p)
            .collect();
        if members.len() < 3 {
            continue;
        }
        let g = -Vector3::new(plane.a.x, plane.a.y, plane.a.z);
        let polygon = order_convex_polygon(&members, &g);
        if polygon.len() >= 3 {
            let mut polygon: Vec<Point3<f64>> =
                polygon.into_iter().map(Point3::from).collect();
            canonical_rotate(&mut polygon);
            patches.push(Patch { interval, polygon });
        }
    }
    patches.sort_by_key(|p| p.interval);
    patches
}

/// Order coplanar points into a convex loop whose normal aligns with `g`.
fn order_convex_polygon(points: &[Vector3<f64>], g: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let centroid = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let axis = g.normalize();
    let mut u = axis.cross(&Vector3::x());
    if u.norm() < 1e-9 {
        u = axis.cross(&Vector3::y());
    }
    let u = u.normalize();
    let v = axis.cross(&u);
    let mut angled: Vec<(f64, Vector3<f64>)> = points
        .iter()
        .map(|p| {
            let r = p - centroid;
            (r.dot(&v).atan2(r.dot(&u)), *p)
        })
        .collect();
    angled.sort_by(|a, b| a.0.total_cmp(&b.0));
    angled.into_iter().map(|(_, p)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tet() -> [Point3<f64>; 4] {
        [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ]
    }

    #[test]
    fn single_field_triangle() {
        let f = DistanceField {
            interval: 0,
            d: [-1.0, 1.0, 1.0, 1.0],
        };
        let patches = extract_tet_surface_4d(&unit_tet(), &[f], 1e-10);
        assert_eq!(patches.len(), 1);
        assert_eq!(patches[0].polygon.len(), 3);
        for p in &patches[0].polygon {
            assert!((p.coords.norm() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn all_positive_empty() {
        let f = DistanceField {
            interval: 0,
            d: [1.0, 1.0, 2.0, 0.5],
        };
        assert!(extract_tet_surface_4d(&unit_tet(), &[f], 1e-10).is_empty());
    }
}

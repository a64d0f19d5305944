//! Marching tetrahedra on a single scalar field.
//!
//! Shares the canonical edge-crossing formula with the convex-clip route so
//! single-field extraction agrees bit-for-bit. Also drives the Stamping
//! baseline's surface extraction.

use crate::geom::edge_zero_crossing;
use nalgebra::{Point3, Vector3};

/// Crossing polygon of the zero level set inside one tet, or `None` when all
/// four values share a sign. Vertices with value exactly zero count as
/// outside (kept side), matching the clip route's on-plane retention.
/// The polygon starts at its lexicographically smallest vertex and is wound
/// so its normal points toward the positive side.
pub fn marching_tet(verts: &[Point3<f64>; 4], d: &[f64; 4]) -> Option<Vec<Point3<f64>>> {
    let inside: Vec<u8> = (0..4u8).filter(|&k| d[k as usize] < 0.0).collect();
    let outside: Vec<u8> = (0..4u8).filter(|&k| d[k as usize] >= 0.0).collect();
    if inside.is_empty() || outside.is_empty() {
        return None;
    }

    let crossing = |a: u8, b: u8| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        edge_zero_crossing(
            &verts[lo as usize],
            &verts[hi as usize],
            d[lo as usize],
            d[hi as usize],
        )
    };

    let mut poly: Vec<Point3<f64>> = match inside.len() {
        1 => outside.iter().map(|&o| crossing(inside[0], o)).collect(),
        3 => inside.iter().map(|&i| crossing(i, outside[0])).collect(),
        2 => {
            let (i0, i1) = (inside[0], inside[1]);
            let (o0, o1) = (outside[0], outside[1]);
            vec![
                crossing(i0, o0),
                crossing(i0, o1),
                crossing(i1, o1),
                crossing(i1, o0),
            ]
        }
        _ => unreachable!(),
    };

    // Orient toward the positive side.
    let centroid = |ids: &[u8]| -> Vector3<f64> {
        ids.iter()
            .fold(Vector3::zeros(), |acc, &k| acc + verts[k as usize].coords)
            / ids.len() as f64
    };
    let toward_positive = centroid(&outside) - centroid(&inside);
    let mut normal = Vector3::zeros();
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        normal.x += (a.y - b.y) * (a.z + b.z);
        normal.y += (a.z - b.z) * (a.x + b.x);
        normal.z += (a.x - b.x) * (a.y + b.y);
    }
    if normal.dot(&toward_positive) < 0.0 {
        poly.reverse();
    }
    super::cell::canonical_rotate(&mut poly);
    Some(poly)
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
    fn one_inside_gives_triangle_at_midpoints() {
        let poly = marching_tet(&unit_tet(), &[-1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(poly.len(), 3);
        for p in &poly {
            assert!((p.coords.norm() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn two_inside_gives_quad() {
        let poly = marching_tet(&unit_tet(), &[-1.0, -1.0, 1.0, 1.0]).unwrap();
        assert_eq!(poly.len(), 4);
    }

    #[test]
    fn uniform_signs_give_nothing() {
        assert!(marching_tet(&unit_tet(), &[1.0, 2.0, 3.0, 4.0]).is_none());
        assert!(marching_tet(&unit_tet(), &[-1.0, -2.0, -3.0, -4.0]).is_none());
        // Zeros count as outside.
        assert!(marching_tet(&unit_tet(), &[0.0, 0.0, 1.0, 2.0]).is_none());
    }

    #[test]
    fn orientation_points_toward_positive() {
        let poly = marching_tet(&unit_tet(), &[-1.0, 1.0, 1.0, 1.0]).unwrap();
        let mut n = Vector3::zeros();
        for i in 0..poly.len() {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
        }
        // Positive side is away from the origin vertex.
        assert!(n.dot(&Vector3::new(1.0, 1.0, 1.0)) > 0.0);
    }
}

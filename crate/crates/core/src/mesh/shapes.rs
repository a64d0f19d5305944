//! Procedural test and benchmark geometry.

use super::TriangleMesh;
use nalgebra::Point3;
use rustc_hash::FxHashMap;

/// Axis-aligned box with outward-facing triangles.
pub fn box_mesh(min: &Point3<f64>, max: &Point3<f64>) -> TriangleMesh {
    let v = vec![
        Point3::new(min.x, min.y, min.z),
        Point3::new(max.x, min.y, min.z),
        Point3::new(max.x, max.y, min.z),
        Point3::new(min.x, max.y, min.z),
        Point3::new(min.x, min.y, max.z),
        Point3::new(max.x, min.y, max.z),
        Point3::new(max.x, max.y, max.z),
        Point3::new(min.x, max.y, max.z),
    ];
    let quads: [[u32; 4]; 6] = [
        [0, 3, 2, 1], // -z
        [4, 5, 6, 7], // +z
        [0, 1, 5, 4], // -y
        [1, 2, 6, 5], // +x
        [2, 3, 7, 6], // +y
        [3, 0, 4, 7], // -x
    ];
    let mut t = Vec::with_capacity(12);
    for q in quads {
        t.push([q[0], q[1], q[2]]);
        t.push([q[0], q[2], q[3]]);
    }
    TriangleMesh::from_parts(v, t).expect("box construction is valid")
}

/// Unit cube spanning `[0, 1]^3`.
pub fn unit_cube() -> TriangleMesh {
    box_mesh(&Point3::origin(), &Point3::new(1.0, 1.0, 1.0))
}

/// Icosphere of the given radius centered at the origin.
///
/// Each subdivision level splits every face into four and reprojects new
/// vertices onto the sphere. Level 0 is the icosahedron (20 faces).
pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| {
        let n: f64 = x * x + y * y + z * z;
        Point3::new(x, y, z) * (radius / n.sqrt())
    })
    .collect();

    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: FxHashMap<(u32, u32), u32> = FxHashMap::default();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let mut mids = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                mids[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = nalgebra::center(&vertices[a as usize], &vertices[b as usize]);
                    let m = Point3::from(m.coords * (radius / m.coords.norm()));
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                });
            }
            next.push([t[0], mids[0], mids[2]]);
            next.push([t[1], mids[1], mids[0]]);
            next.push([t[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next;
    }

    TriangleMesh::from_parts(vertices, triangles).expect("icosphere construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts_and_radius() {
        let m = icosphere(0.3, 2);
        assert_eq!(m.triangles().len(), 20 * 16);
        for v in m.vertices() {
            assert!((v.coords.norm() - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn box_volume_is_positive() {
        // from_parts rejects inside-out meshes, so construction is the check.
        let m = box_mesh(&Point3::new(-1.0, -2.0, 0.5), &Point3::new(1.0, 2.0, 3.0));
        assert_eq!(m.triangles().len(), 12);
    }
}

//! Uniform cube lattice split into five tetrahedra per cube.
//!
//! Cubes with odd coordinate parity use the x-mirrored split so the induced
//! triangulations of shared cube faces match across neighbors. Tetrahedra are
//! implicit: only indices are stored, vertices are derived from the lattice.

use crate::error::{Result, SweptError};
use crate::geom::{tet_volume, Aabb};
use nalgebra::{Matrix3, Point3, Vector3};
use std::sync::OnceLock;

/// Cube corners are encoded as 3-bit codes: bit0 = x, bit1 = y, bit2 = z.
///
/// Locals 0..3 are the corner tetrahedra, local 4 the central one. Each row
/// is ordered for positive volume.
const EVEN_TETS: [[u8; 4]; 5] = [
    [1, 0, 5, 3],
    [2, 0, 3, 6],
    [4, 0, 6, 5],
    [7, 3, 5, 6],
    [0, 3, 6, 5],
];

/// x-mirrored split for odd-parity cubes (corner codes XOR 1, reordered for
/// positive volume).
const ODD_TETS: [[u8; 4]; 5] = [
    [0, 1, 2, 4],
    [3, 1, 7, 2],
    [5, 1, 4, 7],
    [6, 2, 7, 4],
    [1, 2, 4, 7],
];

fn corner_offset(code: u8) -> Vector3<f64> {
    Vector3::new(
        (code & 1) as f64,
        ((code >> 1) & 1) as f64,
        ((code >> 2) & 1) as f64,
    )
}

fn tets_for_parity(parity: u8) -> &'static [[u8; 4]; 5] {
    if parity == 0 {
        &EVEN_TETS
    } else {
        &ODD_TETS
    }
}

/// Reference to one tetrahedron: cube index plus local index 0..4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TetRef {
    pub cube: [i32; 3],
    pub local: u8,
}

#[derive(Clone, Copy, Debug)]
struct NeighborRule {
    delta: [i8; 3],
    local: u8,
}

/// Neighbor rules per (parity, local, face). Face `f` of a tet is the
/// triangle omitting vertex `f`.
fn neighbor_rules() -> &'static [[[NeighborRule; 4]; 5]; 2] {
    static RULES: OnceLock<[[[NeighborRule; 4]; 5]; 2]> = OnceLock::new();
    RULES.get_or_init(|| {
        let mut rules = [[[NeighborRule { delta: [0; 3], local: 0 }; 4]; 5]; 2];
        for parity in 0..2u8 {
            let tets = tets_for_parity(parity);
            for local in 0..5 {
                for face in 0..4 {
                    let mut corners = [0u8; 3];
                    let mut n = 0;
                    for k in 0..4 {
                        if k != face {
                            corners[n] = tets[local][k];
                            n += 1;
                        }
                    }
                    // Does the face lie on a cube boundary plane?
                    let mut boundary_axis = None;
                    for axis in 0..3 {
                        let bit = |c: u8| (c >> axis) & 1;
                        if corners.iter().all(|&c| bit(c) == bit(corners[0])) {
                            boundary_axis = Some((axis, bit(corners[0])));
                        }
                    }
                    let rule = match boundary_axis {
                        Some((axis, value)) => {
                            let mut delta = [0i8; 3];
                            delta[axis] = if value == 1 { 1 } else { -1 };
                            let mapped: Vec<u8> =
                                corners.iter().map(|&c| c ^ (1 << axis)).collect();
                            let other = tets_for_parity(1 - parity);
                            let local = find_tet_with_corners(other, &mapped);
                            NeighborRule { delta, local }
                        }
                        None => {
                            let local = (0..5)
                                .find(|&l| {
                                    l != local
                                        && corners
                                            .iter()
                                            .all(|c| tets[l].contains(c))
                                })
                                .expect("interior face must be shared inside the cube")
                                as u8;
                            NeighborRule { delta: [0; 3], local }
                        }
                    };
                    rules[parity as usize][local][face] = rule;
                }
            }
        }
        rules
    })
}

fn find_tet_with_corners(tets: &[[u8; 4]; 5], corners: &[u8]) -> u8 {
    (0..5)
        .find(|&l| corners.iter().all(|c| tets[l].contains(c)))
        .expect("conforming split must cover the mirrored face") as u8
}

/// Inverse barycentric matrices for the unit-cell tets, per (parity, local).
fn barycentric_tables() -> &'static [[(Vector3<f64>, Matrix3<f64>); 5]; 2] {
    static TABLES: OnceLock<[[(Vector3<f64>, Matrix3<f64>); 5]; 2]> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut out = [[(Vector3::zeros(), Matrix3::zeros()); 5]; 2];
        for parity in 0..2usize {
            let tets = tets_for_parity(parity as u8);
            for local in 0..5 {
                let corners = tets[local].map(corner_offset);
                let m = Matrix3::from_columns(&[
                    corners[1] - corners[0],
                    corners[2] - corners[0],
                    corners[3] - corners[0],
                ]);
                out[parity][local] = (
                    corners[0],
                    m.try_inverse().expect("unit-cell tets are non-degenerate"),
                );
            }
        }
        out
    })
}

/// Uniform tetrahedral grid over an axis-aligned domain.
#[derive(Clone, Debug)]
pub struct TetGrid {
    origin: Point3<f64>,
    cell_size: f64,
    dims: [u32; 3],
}

/// Cover `domain` with `resolution^3` cubes of equal size, centered on the
/// domain. The cube edge equals the largest domain extent divided by the
/// resolution, so shorter axes get extra slack.
pub fn build_grid(domain: &Aabb, resolution: u32) -> Result<TetGrid> {
    if domain.is_empty() || !domain.diagonal().is_finite() || domain.max_extent() <= 0.0 {
        return Err(SweptError::Grid("empty domain".into()));
    }
    if resolution < 2 {
        return Err(SweptError::Grid(format!(
            "resolution {resolution} too small, need >= 2"
        )));
    }
    if resolution > 16_000 {
        return Err(SweptError::Grid(format!(
            "resolution {resolution} exceeds the supported 16000"
        )));
    }
    let cell_size = domain.max_extent() / resolution as f64;
    let half = resolution as f64 * cell_size / 2.0;
    let center = domain.center();
    Ok(TetGrid {
        origin: center - Vector3::repeat(half),
        cell_size,
        dims: [resolution; 3],
    })
}

impl TetGrid {
    pub fn origin(&self) -> Point3<f64> {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    pub fn cube_count(&self) -> usize {
        self.dims.iter().map(|&d| d as usize).product()
    }

    pub fn tet_count(&self) -> usize {
        5 * self.cube_count()
    }

    /// The box covered by the grid (a cube superset of the build domain).
    pub fn domain(&self) -> Aabb {
        Aabb {
            min: self.origin,
            max: self.origin
                + Vector3::new(
                    self.dims[0] as f64 * self.cell_size,
                    self.dims[1] as f64 * self.cell_size,
                    self.dims[2] as f64 * self.cell_size,
                ),
        }
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        self.domain().contains(p)
    }

    fn cube_in_range(&self, cube: &[i32; 3]) -> bool {
        (0..3).all(|k| cube[k] >= 0 && (cube[k] as u32) < self.dims[k])
    }

    pub fn is_valid(&self, tet: &TetRef) -> bool {
        tet.local < 5 && self.cube_in_range(&tet.cube)
    }

    fn parity(cube: &[i32; 3]) -> u8 {
        ((cube[0] + cube[1] + cube[2]).rem_euclid(2)) as u8
    }

    /// Integer lattice coordinates of a tet's four corners.
    pub fn tet_corner_coords(&self, tet: &TetRef) -> [[i32; 3]; 4] {
        debug_assert!(self.is_valid(tet));
        let codes = tets_for_parity(Self::parity(&tet.cube))[tet.local as usize];
        codes.map(|c| {
            [
                tet.cube[0] + (c & 1) as i32,
                tet.cube[1] + ((c >> 1) & 1) as i32,
                tet.cube[2] + ((c >> 2) & 1) as i32,
            ]
        })
    }

    pub fn lattice_position(&self, coord: &[i32; 3]) -> Point3<f64> {
        self.origin
            + Vector3::new(
                coord[0] as f64 * self.cell_size,
                coord[1] as f64 * self.cell_size,
                coord[2] as f64 * self.cell_size,
            )
    }

    /// Positions of the tet's four corners, ordered for positive volume.
    pub fn tet_vertices(&self, tet: &TetRef) -> Result<[Point3<f64>; 4]> {
        if !self.is_valid(tet) {
            return Err(SweptError::Grid(format!("tet reference out of range: {tet:?}")));
        }
        Ok(self.tet_corner_coords(tet).map(|c| self.lattice_position(&c)))
    }

    pub fn tet_centroid(&self, tet: &TetRef) -> Point3<f64> {
        let vs = self.tet_corner_coords(tet);
        let sum = vs
            .iter()
            .fold(Vector3::zeros(), |acc, c| {
                acc + Vector3::new(c[0] as f64, c[1] as f64, c[2] as f64)
            });
        self.origin + sum * (self.cell_size / 4.0)
    }

    /// Tets sharing a full triangular face with `tet`; boundary tets return
    /// fewer than four.
    pub fn face_neighbors(&self, tet: &TetRef) -> Vec<TetRef> {
        let mut out = Vec::with_capacity(4);
        self.for_each_face_neighbor(tet, |n| out.push(n));
        out
    }

    pub fn for_each_face_neighbor(&self, tet: &TetRef, mut f: impl FnMut(TetRef)) {
        debug_assert!(self.is_valid(tet));
        let rules = &neighbor_rules()[Self::parity(&tet.cube) as usize][tet.local as usize];
        for rule in rules {
            let cube = [
                tet.cube[0] + rule.delta[0] as i32,
                tet.cube[1] + rule.delta[1] as i32,
                tet.cube[2] + rule.delta[2] as i32,
            ];
            if self.cube_in_range(&cube) {
                f(TetRef {
                    cube,
                    local: rule.local,
                });
            }
        }
    }

    /// The tetrahedron containing `p`; on-face ties resolve to the lowest
    /// local index of the cube that owns `p` by floor indexing.
    pub fn locate_tet(&self, p: &Point3<f64>) -> Result<TetRef> {
        if !self.contains(p) {
            return Err(SweptError::OutsideDomain(p.x, p.y, p.z));
        }
        let rel = (p - self.origin) / self.cell_size;
        let cube = [
            (rel.x.floor() as i32).clamp(0, self.dims[0] as i32 - 1),
            (rel.y.floor() as i32).clamp(0, self.dims[1] as i32 - 1),
            (rel.z.floor() as i32).clamp(0, self.dims[2] as i32 - 1),
        ];
        let local_p = Vector3::new(
            rel.x - cube[0] as f64,
            rel.y - cube[1] as f64,
            rel.z - cube[2] as f64,
        );
        let tables = &barycentric_tables()[Self::parity(&cube) as usize];
        let mut best = (0u8, f64::NEG_INFINITY);
        for local in 0..5u8 {
            let (base, inv) = &tables[local as usize];
            let bc = inv * (local_p - base);
            let min_b = (1.0 - bc.x - bc.y - bc.z).min(bc.x).min(bc.y).min(bc.z);
            if min_b >= -1e-12 {
                return Ok(TetRef { cube, local });
            }
            if min_b > best.1 {
                best = (local, min_b);
            }
        }
        // Numerical fallback: take the least-violating tet.
        Ok(TetRef {
            cube,
            local: best.0,
        })
    }

    /// Barycentric coordinates of `p` in `tet` (may be negative outside).
    pub fn barycentric(&self, tet: &TetRef, p: &Point3<f64>) -> [f64; 4] {
        let rel = (p - self.origin) / self.cell_size;
        let local_p = Vector3::new(
            rel.x - tet.cube[0] as f64,
            rel.y - tet.cube[1] as f64,
            rel.z - tet.cube[2] as f64,
        );
        let (base, inv) =
            &barycentric_tables()[Self::parity(&tet.cube) as usize][tet.local as usize];
        let bc = inv * (local_p - base);
        [1.0 - bc.x - bc.y - bc.z, bc.x, bc.y, bc.z]
    }

    pub fn iter_cubes(&self) -> impl Iterator<Item = [i32; 3]> + '_ {
        let [nx, ny, nz] = self.dims;
        (0..nx as i32).flat_map(move |i| {
            (0..ny as i32).flat_map(move |j| (0..nz as i32).map(move |k| [i, j, k]))
        })
    }

    pub fn iter_tets(&self) -> impl Iterator<Item = TetRef> + '_ {
        self.iter_cubes()
            .flat_map(|cube| (0..5u8).map(move |local| TetRef { cube, local }))
    }

    pub fn tet_volume(&self, tet: &TetRef) -> f64 {
        let v = self.tet_corner_coords(tet).map(|c| self.lattice_position(&c));
        tet_volume(&v[0], &v[1], &v[2], &v[3])
    }
}

/// Pack a tet reference and interval index into a single map key.
/// Requires dims < 2^14 and interval < 2^12.
pub fn pack_tet_interval(tet: &TetRef, interval: u32) -> u64 {
    debug_assert!(interval < (1 << 12));
    let x = tet.cube[0] as u64 & 0x3FFF;
    let y = tet.cube[1] as u64 & 0x3FFF;
    let z = tet.cube[2] as u64 & 0x3FFF;
    (x << 50) | (y << 36) | (z << 22) | ((tet.local as u64) << 19) | interval as u64
}

/// Pack a lattice vertex coordinate and interval index into a map key.
pub fn pack_vertex_interval(coord: &[i32; 3], interval: u32) -> u64 {
    debug_assert!(interval < (1 << 12));
    let x = coord[0] as u64 & 0x3FFF;
    let y = coord[1] as u64 & 0x3FFF;
    let z = coord[2] as u64 & 0x3FFF;
    (x << 50) | (y << 36) | (z << 22) | interval as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_grid(res: u32) -> TetGrid {
        let domain = Aabb {
            min: Point3::origin(),
            max: Point3::new(1.0, 1.0, 1.0),
        };
        build_grid(&domain, res).unwrap()
    }

    #[test]
    fn split_tables_have_positive_volumes() {
        for parity in 0..2u8 {
            for (local, tet) in tets_for_parity(parity).iter().enumerate() {
                let v = tet.map(|c| Point3::from(corner_offset(c)));
                let vol = tet_volume(&v[0], &v[1], &v[2], &v[3]);
                let expect = if local == 4 { 1.0 / 3.0 } else { 1.0 / 6.0 };
                assert!(
                    (vol - expect).abs() < 1e-15,
                    "parity {parity} local {local}: {vol}"
                );
            }
        }
    }

    #[test]
    fn grid_counts_and_volume_tiling() {
        let g = unit_grid(2);
        assert_eq!(g.cube_count(), 8);
        assert_eq!(g.tet_count(), 40);
        let total: f64 = g.iter_tets().map(|t| g.tet_volume(&t)).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let g25 = unit_grid(25);
        assert_eq!(g25.cube_count(), 25usize.pow(3));
        assert_eq!(g25.tet_count(), 5 * 25usize.pow(3));

        let g256 = unit_grid(256);
        assert_eq!(g256.tet_count(), 5 * 256usize.pow(3));
    }

    #[test]
    fn per_cube_volumes() {
        let g = unit_grid(4);
        let cell = g.cell_size();
        for cube in [[0, 0, 0], [1, 0, 0], [2, 1, 3]] {
            let mut sum = 0.0;
            for local in 0..5u8 {
                let t = TetRef { cube, local };
                let vol = g.tet_volume(&t);
                let expect = if local == 4 {
                    cell.powi(3) / 3.0
                } else {
                    cell.powi(3) / 6.0
                };
                assert!((vol - expect).abs() < 1e-15);
                sum += vol;
            }
            assert!((sum - cell.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn central_tet_has_four_same_cube_neighbors() {
        let g = unit_grid(4);
        for cube in [[1, 1, 1], [2, 1, 1]] {
            let n = g.face_neighbors(&TetRef { cube, local: 4 });
            assert_eq!(n.len(), 4);
            assert!(n.iter().all(|t| t.cube == cube && t.local < 4));
        }
    }

    #[test]
    fn corner_cube_tets_lose_boundary_neighbors() {
        let g = unit_grid(4);
        for local in 0..4u8 {
            let n = g.face_neighbors(&TetRef {
                cube: [0, 0, 0],
                local,
            });
            assert!(n.len() <= 4);
            assert!(n.len() >= 1);
        }
    }

    #[test]
    fn neighbor_relation_is_symmetric_and_interior_tets_have_four() {
        let g = unit_grid(6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let t = TetRef {
                cube: [
                    rng.gen_range(0..6),
                    rng.gen_range(0..6),
                    rng.gen_range(0..6),
                ],
                local: rng.gen_range(0..5),
            };
            let neighbors = g.face_neighbors(&t);
            let interior = (0..3).all(|k| t.cube[k] > 0 && t.cube[k] < 5);
            if interior {
                assert_eq!(neighbors.len(), 4, "{t:?}");
            }
            for n in neighbors {
                assert!(
                    g.face_neighbors(&n).contains(&t),
                    "asymmetric: {t:?} vs {n:?}"
                );
            }
        }
    }

    #[test]
    fn shared_faces_conform_across_cubes() {
        // Two face-adjacent cubes must triangulate their shared face with the
        // same vertex triples.
        let g = unit_grid(10);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let face_triangles = |cube: [i32; 3], axis: usize, value: i32| {
            let mut tris = Vec::new();
            for local in 0..5u8 {
                let t = TetRef { cube, local };
                let coords = g.tet_corner_coords(&t);
                for omit in 0..4 {
                    let mut face: Vec<[i32; 3]> = (0..4)
                        .filter(|&k| k != omit)
                        .map(|k| coords[k])
                        .collect();
                    if face.iter().all(|c| c[axis] == value) {
                        face.sort();
                        tris.push(face);
                    }
                }
            }
            tris.sort();
            tris
        };
        for _ in 0..1000 {
            let cube = [
                rng.gen_range(0..9),
                rng.gen_range(0..9),
                rng.gen_range(0..9),
            ];
            let axis = rng.gen_range(0..3);
            let mut other = cube;
            other[axis] += 1;
            let plane = cube[axis] + 1;
            let a = face_triangles(cube, axis, plane);
            let b = face_triangles(other, axis, plane);
            assert_eq!(a.len(), 2);
            assert_eq!(a, b, "cube {cube:?} axis {axis}");
        }
    }

    #[test]
    fn locate_roundtrips_centroids() {
        let g = unit_grid(10);
        for t in g.iter_tets() {
            let c = g.tet_centroid(&t);
            assert_eq!(g.locate_tet(&c).unwrap(), t);
        }
    }

    #[test]
    fn locate_examples() {
        let g = unit_grid(4);
        // Cube center lives in the central tet.
        let even_center = Point3::new(0.125, 0.125, 0.125);
        assert_eq!(
            g.locate_tet(&even_center).unwrap(),
            TetRef {
                cube: [0, 0, 0],
                local: 4
            }
        );
        // Lattice vertices tie-break to the lowest incident local index.
        let vertex = Point3::new(0.25, 0.25, 0.25);
        let t = g.locate_tet(&vertex).unwrap();
        assert_eq!(t.cube, [1, 1, 1]);
        assert_eq!(t.local, 0);

        assert!(g.locate_tet(&Point3::new(2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn locate_contains_random_points() {
        let g = unit_grid(8);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let p = Point3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
            let t = g.locate_tet(&p).unwrap();
            let b = g.barycentric(&t, &p);
            for w in b {
                assert!(w >= -1e-9 && w <= 1.0 + 1e-9, "{p:?} -> {t:?}: {b:?}");
            }
        }
    }

    #[test]
    fn build_grid_validation() {
        let empty = Aabb::empty();
        assert!(build_grid(&empty, 8).is_err());
        let domain = Aabb {
            min: Point3::origin(),
            max: Point3::new(1.0, 1.0, 1.0),
        };
        assert!(build_grid(&domain, 1).is_err());
        assert!(build_grid(&domain, 2).is_ok());
    }
}

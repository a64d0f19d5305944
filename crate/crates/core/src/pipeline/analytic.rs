//! Analytic reference surfaces and their exact distance functions.

use crate::error::{Result, SweptError};
use crate::geom::Aabb;
use crate::mesh::{DistanceQueryAccelerator, TriangleMesh};
use crate::envelope::OutputMesh;
use nalgebra::{Point3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// SDF of the surface swept by a sphere of radius `r` on a full circle of
/// radius `major_r` in the xy-plane about the origin: a torus.
pub fn analytic_sphere_circle_sdf(p: &Point3<f64>, major_r: f64, r: f64) -> f64 {
    let ring = (p.x * p.x + p.y * p.y).sqrt() - major_r;
    (ring * ring + p.z * p.z).sqrt() - r
}

/// Exact SDF of an axis-aligned box.
pub fn box_sdf(p: &Point3<f64>, min: &Point3<f64>, max: &Point3<f64>) -> f64 {
    let c = nalgebra::center(min, max);
    let h = (max - min) / 2.0;
    let q = Vector3::new(
        (p.x - c.x).abs() - h.x,
        (p.y - c.y).abs() - h.y,
        (p.z - c.z).abs() - h.z,
    );
    let outside = Vector3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
    outside + q.x.max(q.y).max(q.z).min(0.0)
}

/// Serialized reference description in run configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReferenceSpec {
    Torus { major_radius: f64, minor_radius: f64 },
    Box { min: [f64; 3], max: [f64; 3] },
    Sphere { center: [f64; 3], radius: f64 },
    Mesh { path: PathBuf },
}

/// A reference surface that supports exact distance queries and
/// area-uniform sampling.
pub enum Reference {
    Torus {
        major_radius: f64,
        minor_radius: f64,
    },
    Box {
        min: Point3<f64>,
        max: Point3<f64>,
    },
    Sphere {
        center: Point3<f64>,
        radius: f64,
    },
    Mesh(MeshSurface),
}

impl Reference {
    pub fn from_spec(spec: &ReferenceSpec) -> Result<Reference> {
        Ok(match spec {
            ReferenceSpec::Torus {
                major_radius,
                minor_radius,
            } => {
                if !(*major_radius > *minor_radius && *minor_radius > 0.0) {
                    return Err(SweptError::Config(
                        "torus reference needs major_radius > minor_radius > 0".into(),
                    ));
                }
                Reference::Torus {
                    major_radius: *major_radius,
                    minor_radius: *minor_radius,
                }
            }
            ReferenceSpec::Box { min, max } => Reference::Box {
                min: Point3::new(min[0], min[1], min[2]),
                max: Point3::new(max[0], max[1], max[2]),
            },
            ReferenceSpec::Sphere { center, radius } => Reference::Sphere {
                center: Point3::new(center[0], center[1], center[2]),
                radius: *radius,
            },
            ReferenceSpec::Mesh { path } => {
                let mesh = crate::mesh::load_mesh(path)?;
                Reference::Mesh(MeshSurface::from_triangle_mesh(&mesh))
            }
        })
    }

    /// Unsigned distance from `p` to the reference surface.
    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        match self {
            Reference::Torus {
                major_radius,
                minor_radius,
            } => analytic_sphere_circle_sdf(p, *major_radius, *minor_radius).abs(),
            Reference::Box { min, max } => box_sdf(p, min, max).abs(),
            Reference::Sphere { center, radius } => ((p - center).norm() - radius).abs(),
            Reference::Mesh(m) => m.distance(p),
        }
    }

    pub fn bbox(&self) -> Aabb {
        match self {
            Reference::Torus {
                major_radius,
                minor_radius,
            } => {
                let e = major_radius + minor_radius;
                Aabb {
                    min: Point3::new(-e, -e, -minor_radius),
                    max: Point3::new(e, e, *minor_radius),
                }
            }
            Reference::Box { min, max } => Aabb {
                min: *min,
                max: *max,
            },
            Reference::Sphere { center, radius } => Aabb {
                min: center - Vector3::repeat(*radius),
                max: center + Vector3::repeat(*radius),
            },
            Reference::Mesh(m) => m.bbox(),
        }
    }

    /// Draw one area-uniform surface sample.
    pub fn sample(&self, rng: &mut impl Rng) -> Point3<f64> {
        match self {
            Reference::Torus {
                major_radius: big_r,
                minor_radius: r,
            } => {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                // Area element scales with (R + r cos phi); rejection-correct.
                let phi = loop {
                    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                    let w = (big_r + r * phi.cos()) / (big_r + r);
                    if rng.gen::<f64>() < w {
                        break phi;
                    }
                };
                let ring = big_r + r * phi.cos();
                Point3::new(ring * theta.cos(), ring * theta.sin(), r * phi.sin())
            }
            Reference::Box { min, max } => {
                let e = max - min;
                let areas = [
                    e.y * e.z,
                    e.y * e.z,
                    e.x * e.z,
                    e.x * e.z,
                    e.x * e.y,
                    e.x * e.y,
                ];
                let total: f64 = areas.iter().sum();
                let mut pick = rng.gen_range(0.0..total);
                let mut face = 0;
                for (i, a) in areas.iter().enumerate() {
                    if pick < *a {
                        face = i;
                        break;
                    }
                    pick -= a;
                }
                let u = rng.gen::<f64>();
                let v = rng.gen::<f64>();
                match face {
                    0 => Point3::new(min.x, min.y + u * e.y, min.z + v * e.z),
                    1 => Point3::new(max.x, min.y + u * e.y, min.z + v * e.z),
                    2 => Point3::new(min.x + u * e.x, min.y, min.z + v * e.z),
                    3 => Point3::new(min.x + u * e.x, max.y, min.z + v * e.z),
                    4 => Point3::new(min.x + u * e.x, min.y + v * e.y, min.z),
                    _ => Point3::new(min.x + u * e.x, min.y + v * e.y, max.z),
                }
            }
            Reference::Sphere { center, radius } =>

                loop {
                    let u = rng.gen_range(-1.0..1.0);
                    let v = rng.gen_range(-1.0..1.0);
                    let s: f64 = u * u + v * v;
                    if s < 1.0 {
                        let f = 2.0 * (1.0 - s).sqrt();
                        break Point3::new(
                            center.x + radius * u * f,
                            center.y + radius * v * f,
                            center.z + radius * (1.0 - 2.0 * s),
                        );
                    }
                },
            Reference::Mesh(m) => m.sample(rng),
        }
    }
}

/// Triangle soup with a BVH and an area table; no manifold requirements.
pub struct MeshSurface {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
    accel: DistanceQueryAccelerator,
    cumulative_area: Vec<f64>,
    bbox: Aabb,
}

impl MeshSurface {
    pub fn from_parts(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(SweptError::EmptyResult);
        }
        let accel = DistanceQueryAccelerator::build(&vertices, &triangles);
        let mut cumulative_area = Vec::with_capacity(triangles.len());
        let mut acc = 0.0;
        for t in &triangles {
            let (a, b, c) = (
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            acc += 0.5 * (b - a).cross(&(c - a)).norm();
            cumulative_area.push(acc);
        }
        let bbox = Aabb::from_points(vertices.iter());
        Ok(MeshSurface {
            vertices,
            triangles,
            accel,
            cumulative_area,
            bbox,
        })
    }

    pub fn from_output(mesh: &OutputMesh) -> Result<Self> {
        Self::from_parts(mesh.vertices.clone(), mesh.triangles.clone())
    }

    pub fn from_triangle_mesh(mesh: &TriangleMesh) -> Self {
        Self::from_parts(mesh.vertices().to_vec(), mesh.triangles().to_vec())
            .expect("validated meshes are non-empty")
    }

    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        self.accel
            .closest_point(&self.vertices, &self.triangles, p)
            .dist
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Point3<f64> {
        let total = *self.cumulative_area.last().unwrap();
        let pick = rng.gen_range(0.0..total);
        let idx = self.cumulative_area.partition_point(|&a| a < pick);
        let t = self.triangles[idx.min(self.triangles.len() - 1)];
        let (a, b, c) = (
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        );
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let su = r1.sqrt();
        let (u, v) = (1.0 - su, su * r2);
        Point3::from(a.coords * u + b.coords * v + c.coords * (1.0 - u - v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_sdf_examples() {
        let (big_r, r) = (0.6, 0.3);
        let outer = Point3::new(big_r + r, 0.0, 0.0);
        assert!(analytic_sphere_circle_sdf(&outer, big_r, r).abs() < 1e-15);
        let tube_center = Point3::new(big_r, 0.0, 0.0);
        assert!((analytic_sphere_circle_sdf(&tube_center, big_r, r) + r).abs() < 1e-15);
        let hole = Point3::origin();
        assert!((analytic_sphere_circle_sdf(&hole, big_r, r) - (big_r - r)).abs() < 1e-15);
    }

    #[test]
    fn torus_samples_lie_on_surface() {
        let reference = Reference::Torus {
            major_radius: 0.6,
            minor_radius: 0.3,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = reference.sample(&mut rng);
            assert!(reference.distance(&p) < 1e-12);
        }
    }

    #[test]
    fn box_sdf_is_exact_distance_to_surface() {
        let min = Point3::new(0.0, 0.0, 0.0);
        let max = Point3::new(2.0, 1.0, 1.0);
        assert!((box_sdf(&Point3::new(3.0, 0.5, 0.5), &min, &max) - 1.0).abs() < 1e-15);
        assert!((box_sdf(&Point3::new(1.0, 0.5, 0.5), &min, &max) + 0.5).abs() < 1e-15);
        let reference = Reference::Box { min, max };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = reference.sample(&mut rng);
            assert!(reference.distance(&p) < 1e-12);
        }
    }

    #[test]
    fn sphere_samples_uniform_enough() {
        let reference = Reference::Sphere {
            center: Point3::origin(),
            radius: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut mean = Vector3::zeros();
        for _ in 0..20_000 {
            let p = reference.sample(&mut rng);
            assert!((p.coords.norm() - 1.0).abs() < 1e-12);
            mean += p.coords;
        }
        assert!(mean.norm() / 20_000.0 < 0.02);
    }
}

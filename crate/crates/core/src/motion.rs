//! Rigid trajectories over normalized time `[0, 1]`, their inverses, and
//! uniform temporal discretization.

use crate::error::{Result, SweptError};
use crate::geom::Segment3;
use nalgebra::{Isometry3, Point3, Translation3, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

/// Rigid transform: unit-quaternion rotation plus translation.
pub type RigidTransform = Isometry3<f64>;

/// One slot of a uniform temporal discretization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeInterval {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
}

/// Serialized trajectory description used in run configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrajectorySpec {
    /// Piecewise-linear translation offsets, uniformly parameterized;
    /// `f(t)` translates the model by the interpolated offset.
    Translation { path: Vec<[f64; 3]> },
    /// Carry the model around a circle: it is first translated so its origin
    /// lands on the circle start point `center + radius * u0` (`u0` is the
    /// Gram-Schmidt projection of the x- or y-axis against `axis`), then
    /// co-rotates about the `axis` line through `center` by `angle * t`.
    Circular {
        center: [f64; 3],
        axis: [f64; 3],
        radius: f64,
        angle: f64,
    },
    /// Rotation by `angle * t` about the axis line plus a linear advance of
    /// `pitch` per full turn along the axis direction.
    Screw {
        axis_point: [f64; 3],
        axis_dir: [f64; 3],
        angle: f64,
        pitch: f64,
    },
    /// Keyframed rigid transforms; rotations `[x, y, z, w]` quaternions.
    /// Interpolation is piecewise slerp/lerp between adjacent keys.
    Keyframes { keys: Vec<KeyframeSpec> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeyframeSpec {
    pub t: f64,
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
}

/// Validated, evaluable trajectory `f(t): [0, 1] -> SE(3)`.
#[derive(Clone, Debug)]
pub enum Trajectory {
    Translation {
        path: Vec<Point3<f64>>,
    },
    Circular {
        center: Point3<f64>,
        axis: Unit<Vector3<f64>>,
        radius: f64,
        angle: f64,
        start_dir: Unit<Vector3<f64>>,
    },
    Screw {
        axis_point: Point3<f64>,
        axis_dir: Unit<Vector3<f64>>,
        angle: f64,
        pitch: f64,
    },
    Keyframes {
        keys: Vec<(f64, RigidTransform)>,
    },
}

fn unit_axis(v: [f64; 3], what: &str) -> Result<Unit<Vector3<f64>>> {
    let v = Vector3::new(v[0], v[1], v[2]);
    if !v.norm().is_finite() || v.norm() < 1e-12 {
        return Err(SweptError::Trajectory(format!("{what} must be a nonzero vector")));
    }
    Ok(Unit::new_normalize(v))
}

/// Deterministic in-plane start direction perpendicular to `axis`.
fn orthogonal_dir(axis: &Unit<Vector3<f64>>) -> Unit<Vector3<f64>> {
    let h = if axis.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    Unit::new_normalize(h - axis.as_ref() * h.dot(axis))
}

impl Trajectory {
    pub fn from_spec(spec: &TrajectorySpec) -> Result<Trajectory> {
        match spec {
            TrajectorySpec::Translation { path } => {
                if path.is_empty() {
                    return Err(SweptError::Trajectory("translation path is empty".into()));
                }
                Ok(Trajectory::Translation {
                    path: path.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect(),
                })
            }
            TrajectorySpec::Circular {
                center,
                axis,
                radius,
                angle,
            } => {
                let axis = unit_axis(*axis, "circular axis")?;
                if *radius < 0.0 {
                    return Err(SweptError::Trajectory("circular radius must be >= 0".into()));
                }
                Ok(Trajectory::Circular {
                    center: Point3::new(center[0], center[1], center[2]),
                    axis,
                    radius: *radius,
                    angle: *angle,
                    start_dir: orthogonal_dir(&axis),
                })
            }
            TrajectorySpec::Screw {
                axis_point,
                axis_dir,
                angle,
                pitch,
            } => Ok(Trajectory::Screw {
                axis_point: Point3::new(axis_point[0], axis_point[1], axis_point[2]),
                axis_dir: unit_axis(*axis_dir, "screw axis")?,
                angle: *angle,
                pitch: *pitch,
            }),
            TrajectorySpec::Keyframes { keys } => {
                if keys.len() < 2 {
                    return Err(SweptError::Trajectory("need at least two keyframes".into()));
                }
                let parsed: Vec<(f64, RigidTransform)> = keys
                    .iter()
                    .map(|k| {
                        let q = nalgebra::Quaternion::new(
                            k.rotation[3],
                            k.rotation[0],
                            k.rotation[1],
                            k.rotation[2],
                        );
                        let rot = UnitQuaternion::from_quaternion(q);
                        let tr = Translation3::new(
                            k.translation[0],
                            k.translation[1],
                            k.translation[2],
                        );
                        (k.t, Isometry3::from_parts(tr, rot))
                    })
                    .collect();
                if parsed[0].0 != 0.0 || parsed[parsed.len() - 1].0 != 1.0 {
                    return Err(SweptError::Trajectory(
                        "keyframes must start at t=0 and end at t=1".into(),
                    ));
                }
                if parsed.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(SweptError::Trajectory(
                        "keyframe times must be strictly increasing".into(),
                    ));
                }
                Ok(Trajectory::Keyframes { keys: parsed })
            }
        }
    }

    /// Evaluate `f(t)`.
    pub fn evaluate(&self, t: f64) -> Result<RigidTransform> {
        if !(0.0..=1.0).contains(&t) {
            return Err(SweptError::Range(format!("trajectory time {t} outside [0, 1]")));
        }
        Ok(match self {
            Trajectory::Translation { path } => {
                Isometry3::from_parts(Translation3::from(polyline_at(path, t).coords), UnitQuaternion::identity())
            }
            Trajectory::Circular {
                center,
                axis,
                radius,
                angle,
                start_dir,
            } => {
                let rot = UnitQuaternion::from_axis_angle(axis, angle * t);
                let translation =
                    center.coords + rot * (start_dir.as_ref() * *radius);
                Isometry3::from_parts(Translation3::from(translation), rot)
            }
            Trajectory::Screw {
                axis_point,
                axis_dir,
                angle,
                pitch,
            } => {
                let theta = angle * t;
                let rot = UnitQuaternion::from_axis_angle(axis_dir, theta);
                let advance = pitch * theta / std::f64::consts::TAU;
                let translation =
                    axis_point.coords - rot * axis_point.coords + axis_dir.as_ref() * advance;
                Isometry3::from_parts(Translation3::from(translation), rot)
            }
            Trajectory::Keyframes { keys } => {
                let hi = keys.partition_point(|(kt, _)| *kt <= t).min(keys.len() - 1);
                let lo = hi - 1;
                let (t0, a) = &keys[lo];
                let (t1, b) = &keys[hi];
                let u = (t - t0) / (t1 - t0);
                let rot = a
                    .rotation
                    .try_slerp(&b.rotation, u, 1e-9)
                    .unwrap_or_else(|| {
                        // Antipodal keys: fall back to normalized lerp.
                        let q = a.rotation.lerp(&b.rotation, u);
                        UnitQuaternion::from_quaternion(q)
                    });
                let tr = a.translation.vector.lerp(&b.translation.vector, u);
                Isometry3::from_parts(Translation3::from(tr), rot)
            }
        })
    }

    /// Linear approximation of the inverse trajectory of `q` on `interval`:
    /// the segment from `f(t_start)^-1 q` to `f(t_end)^-1 q`.
    pub fn inverse_point_positions(
        &self,
        q: &Point3<f64>,
        interval: &TimeInterval,
    ) -> Result<Segment3> {
        let start = self.evaluate(interval.t_start)?.inverse_transform_point(q);
        let end = self.evaluate(interval.t_end)?.inverse_transform_point(q);
        Ok(Segment3::new(start, end))
    }

    /// `n` uniform intervals tiling `[0, 1]`.
    pub fn discretize(&self, n: usize) -> Result<Vec<TimeInterval>> {
        discretize(n)
    }

    /// Copy with all translational quantities scaled by `s` (rotations are
    /// unchanged, so this commutes with scaling the model about the origin).
    pub fn scaled(&self, s: f64) -> Trajectory {
        match self {
            Trajectory::Translation { path } => Trajectory::Translation {
                path: path.iter().map(|p| p * s).collect(),
            },
            Trajectory::Circular {
                center,
                axis,
                radius,
                angle,
                start_dir,
            } => Trajectory::Circular {
                center: center * s,
                axis: *axis,
                radius: radius * s,
                angle: *angle,
                start_dir: *start_dir,
            },
            Trajectory::Screw {
                axis_point,
                axis_dir,
                angle,
                pitch,
            } => Trajectory::Screw {
                axis_point: axis_point * s,
                axis_dir: *axis_dir,
                angle: *angle,
                pitch: pitch * s,
            },
            Trajectory::Keyframes { keys } => Trajectory::Keyframes {
                keys: keys
                    .iter()
                    .map(|(t, iso)| {
                        (
                            *t,
                            Isometry3::from_parts(
                                Translation3::from(iso.translation.vector * s),
                                iso.rotation,
                            ),
                        )
                    })
                    .collect(),
            },
        }
    }
}

fn polyline_at(path: &[Point3<f64>], t: f64) -> Point3<f64> {
    if path.len() == 1 {
        return path[0];
    }
    let segments = (path.len() - 1) as f64;
    let s = t * segments;
    let i = (s.floor() as usize).min(path.len() - 2);
    let u = s - i as f64;
    path[i] + (path[i + 1] - path[i]) * u
}

/// `n` uniform time intervals tiling `[0, 1]` exactly.
pub fn discretize(n: usize) -> Result<Vec<TimeInterval>> {
    if n == 0 {
        return Err(SweptError::Range("time step count must be positive".into()));
    }
    Ok((0..n)
        .map(|i| TimeInterval {
            index: i,
            t_start: i as f64 / n as f64,
            t_end: (i + 1) as f64 / n as f64,
        })
        .collect())
}

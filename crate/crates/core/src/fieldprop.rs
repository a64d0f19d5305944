//! Per-tetrahedron distance fields for each time interval, computed by motion
//! inversion and spread by seed-based priority-queue propagation with a
//! componentwise defeat competition.

use crate::error::{Result, SweptError};
use crate::geom::Aabb;
use crate::mesh::{segment_signed_distance, signed_distance, TriangleMesh, DEFAULT_INTERIOR_SAMPLES};
use crate::motion::{RigidTransform, TimeInterval, Trajectory};
use crate::tetgrid::{pack_tet_interval, pack_vertex_interval, TetGrid, TetRef};
use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::BinaryHeap;

/// One time interval's swept-volume distance field restricted to a tet,
/// encoded by the four vertex values in `tet_vertices` order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceField {
    pub interval: u32,
    pub d: [f64; 4],
}

impl DistanceField {
    pub fn min_value(&self) -> f64 {
        self.d.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_positive(&self) -> bool {
        self.d.iter().all(|&v| v > 0.0)
    }
}

/// Strict componentwise domination: `a` defeats `b` when every vertex value
/// of `a` is strictly below the corresponding value of `b`.
pub fn defeats(a: &DistanceField, b: &DistanceField) -> bool {
    (0..4).all(|k| a.d[k] < b.d[k])
}

/// Undefeated fields stored per tet after propagation.
pub type FieldMap = FxHashMap<TetRef, Vec<DistanceField>>;

/// Axis-aligned bounds of a box's eight corners under a rigid transform.
pub fn transformed_bbox(b: &Aabb, f: &RigidTransform) -> Aabb {
    let mut out = Aabb::empty();
    for dx in 0..2 {
        for dy in 0..2 {
            for dz in 0..2 {
                let c = Point3::new(
                    if dx == 0 { b.min.x } else { b.max.x },
                    if dy == 0 { b.min.y } else { b.max.y },
                    if dz == 0 { b.min.z } else { b.max.z },
                );
                out.grow(&f.transform_point(&c));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PropagateOptions {
    /// Keep propagating fields whose four vertex values are all positive.
    /// Such fields are never stored; this only widens the visited region.
    pub propagate_all_positive: bool,
    /// Push face neighbors in reversed order (diagnostic; the fixpoint must
    /// not depend on it).
    pub reverse_neighbor_order: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PropagationStats {
    pub evaluated: usize,
    pub stored: usize,
    pub evicted: usize,
}

/// Compute the distance field of `interval` on `tet`: each vertex value is
/// the segment-signed-distance of that vertex's linearized inverse
/// trajectory.
pub fn compute_field(
    tet: &TetRef,
    interval: &TimeInterval,
    mesh: &TriangleMesh,
    traj: &Trajectory,
    grid: &TetGrid,
) -> Result<DistanceField> {
    let inv_start = traj.evaluate(interval.t_start)?.inverse();
    let inv_end = traj.evaluate(interval.t_end)?.inverse();
    let mut d = [0.0; 4];
    for (k, coord) in grid.tet_corner_coords(tet).iter().enumerate() {
        let q = grid.lattice_position(coord);
        d[k] = vertex_field_value(&q, &inv_start, &inv_end, mesh);
    }
    Ok(DistanceField {
        interval: interval.index as u32,
        d,
    })
}

fn vertex_field_value(
    q: &Point3<f64>,
    inv_start: &RigidTransform,
    inv_end: &RigidTransform,
    mesh: &TriangleMesh,
) -> f64 {
    let seg = crate::geom::Segment3::new(
        inv_start.transform_point(q),
        inv_end.transform_point(q),
    );
    segment_signed_distance(&seg, mesh, DEFAULT_INTERIOR_SAMPLES)
}

/// Seed tetrahedra for one interval: rejection sampling inside the
/// transformed model, falling back to mesh-vertex located tets for models
/// thinner than a cell.
pub fn select_seeds(
    interval: &TimeInterval,
    mesh: &TriangleMesh,
    traj: &Trajectory,
    grid: &TetGrid,
    count: usize,
    rng_seed: u64,
) -> Result<Vec<TetRef>> {
    assert!(count >= 1, "seed count must be positive");
    let f_start = traj.evaluate(interval.t_start)?;
    let inv_start = f_start.inverse();

    let model_box = transformed_bbox(&mesh.bbox(), &f_start);

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(interval.index as u64 + 1);

    let mut picked: Vec<TetRef> = Vec::with_capacity(count);
    let mut seen: FxHashSet<TetRef> = FxHashSet::default();
    let mut attempts = 0usize;
    while picked.len() < count && attempts < 100_000 {
        attempts += 1;
        let p = Point3::new(
            rng.gen_range(model_box.min.x..=model_box.max.x),
            rng.gen_range(model_box.min.y..=model_box.max.y),
            rng.gen_range(model_box.min.z..=model_box.max.z),
        );
        if !grid.contains(&p) {
            continue;
        }
        let tet = grid.locate_tet(&p)?;
        if seen.contains(&tet) {
            continue;
        }
        let c = grid.tet_centroid(&tet);
        if signed_distance(&inv_start.transform_point(&c), mesh) < 0.0 {
            seen.insert(tet);
            picked.push(tet);
        }
    }

    if picked.is_empty() {
        // Model thinner than a cell: fall back to tets hit by transformed
        // mesh vertices, truncated to the requested count.
        for v in mesh.vertices() {
            let p = f_start.transform_point(v);
            if !grid.contains(&p) {
                continue;
            }
            let tet = grid.locate_tet(&p)?;
            if seen.insert(tet) {
                picked.push(tet);
                if picked.len() == count {
                    break;
                }
            }
        }
    }

    if picked.is_empty() {
        return Err(SweptError::NoSeeds {
            interval: interval.index,
        });
    }
    Ok(picked)
}

/// Queue event ordered most-negative key first, with a total tiebreak so the
/// execution is deterministic.
#[derive(Clone, Copy, Debug)]
struct Event {
    key: f64,
    code: u64,
    tet: TetRef,
    interval: u32,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert to pop the most negative key.
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.code.cmp(&self.code))
    }
}

/// Memoizing evaluator for per-(vertex, interval) distances. Tets sharing a
/// lattice vertex reuse the same value bit-for-bit.
struct FieldEvaluator<'a> {
    mesh: &'a TriangleMesh,
    grid: &'a TetGrid,
    inverses: Vec<(RigidTransform, RigidTransform)>,
    memo: FxHashMap<u64, f64>,
}

impl<'a> FieldEvaluator<'a> {
    fn new(
        mesh: &'a TriangleMesh,
        grid: &'a TetGrid,
        traj: &Trajectory,
        intervals: &[TimeInterval],
    ) -> Result<Self> {
        let inverses = intervals
            .iter()
            .map(|iv| {
                Ok((
                    traj.evaluate(iv.t_start)?.inverse(),
                    traj.evaluate(iv.t_end)?.inverse(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldEvaluator {
            mesh,
            grid,
            inverses,
            memo: FxHashMap::default(),
        })
    }

    fn vertex_value(&mut self, coord: &[i32; 3], interval: u32) -> f64 {
        let key = pack_vertex_interval(coord, interval);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let q = self.grid.lattice_position(coord);
        let (inv_s, inv_e) = &self.inverses[interval as usize];
        let v = vertex_field_value(&q, inv_s, inv_e, self.mesh);
        self.memo.insert(key, v);
        v
    }

    fn field(&mut self, tet: &TetRef, interval: u32) -> DistanceField {
        let coords = self.grid.tet_corner_coords(tet);
        let mut d = [0.0; 4];
        for k in 0..4 {
            d[k] = self.vertex_value(&coords[k], interval);
        }
        DistanceField { interval, d }
    }
}

/// Run the seeded propagation over all intervals and return the undefeated
/// fields stored per tet.
pub fn propagate(
    grid: &TetGrid,
    mesh: &TriangleMesh,
    traj: &Trajectory,
    intervals: &[TimeInterval],
    seeds_per_interval: usize,
    rng_seed: u64,
    opts: PropagateOptions,
) -> Result<(FieldMap, PropagationStats)> {
    assert!(
        intervals.len() < (1 << 12),
        "interval count exceeds key packing"
    );
    let mut evaluator = FieldEvaluator::new(mesh, grid, traj, intervals)?;
    let mut scheduled: FxHashSet<u64> = FxHashSet::default();
    let mut heap: BinaryHeap<Event> = BinaryHeap::new();
    let mut store: FieldMap = FxHashMap::default();
    let mut stats = PropagationStats::default();

    for iv in intervals {
        let seeds = select_seeds(iv, mesh, traj, grid, seeds_per_interval, rng_seed)?;
        for tet in seeds {
            let code = pack_tet_interval(&tet, iv.index as u32);
            if scheduled.insert(code) {
                heap.push(Event {
                    key: f64::NEG_INFINITY,
                    code,
                    tet,
                    interval: iv.index as u32,
                });
            }
        }
    }

    while let Some(ev) = heap.pop() {
        let field = evaluator.field(&ev.tet, ev.interval);
        stats.evaluated += 1;

        if store
            .get(&ev.tet)
            .is_some_and(|fs| fs.iter().any(|g| defeats(g, &field)))
        {
            continue;
        }

        if field.all_positive() {
            if !opts.propagate_all_positive {
                continue;
            }
        } else {
            let fields = store.entry(ev.tet).or_default();
            match fields.iter().position(|g| g.d == field.d) {
                Some(i) => {
                    // Identical values from different intervals: keep the
                    // lower interval index, the envelope is unaffected.
                    if field.interval < fields[i].interval {
                        fields[i] = field;
                    }
                }
                None => {
                    let before = fields.len();
                    fields.retain(|g| !defeats(&field, g));
                    stats.evicted += before - fields.len();
                    fields.push(field);
                    stats.stored += 1;
                }
            }
        }

        let key = field.min_value();
        let push = |n: TetRef| {
            let code = pack_tet_interval(&n, ev.interval);
            if scheduled.insert(code) {
                heap.push(Event {
                    key,
                    code,
                    tet: n,
                    interval: ev.interval,
                });
            }
        };
        if opts.reverse_neighbor_order {
            let mut ns = grid.face_neighbors(&ev.tet);
            ns.reverse();
            ns.into_iter().for_each(push);
        } else {
            grid.for_each_face_neighbor(&ev.tet, push);
        }
    }

    Ok((store, stats))
}

/// Lower-envelope value of the stored fields at `x`: the minimum over the
/// tet's fields of their barycentric interpolation. `None` when the
/// containing tet holds no fields.
pub fn min_field_value(map: &FieldMap, grid: &TetGrid, x: &Point3<f64>) -> Result<Option<f64>> {
    let tet = grid.locate_tet(x)?;
    let Some(fields) = map.get(&tet) else {
        return Ok(None);
    };
    let bary = grid.barycentric(&tet, x);
    let mut best = f64::INFINITY;
    for f in fields {
        let v = (0..4).map(|k| bary[k] * f.d[k]).sum::<f64>();
        best = best.min(v);
    }
    Ok(Some(best))
}

//! Chamfer / Hausdorff evaluation against a reference surface.

use super::analytic::{MeshSurface, Reference};
use crate::envelope::OutputMesh;
use crate::error::Result;
use nalgebra::Point3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Chamfer and Hausdorff numbers, normalized by the reference bounding-box
/// diagonal (per-mille and percent respectively).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Metrics {
    pub cd_permille: f64,
    pub hd_percent: f64,
}

/// Bidirectional point-sampled distances: `samples` area-uniform points from
/// each surface, L1 Chamfer as the mean of both directed means, Hausdorff as
/// the max of both directed maxima.
pub fn compute_metrics(
    result: &OutputMesh,
    reference: &Reference,
    samples: usize,
    rng_seed: u64,
) -> Result<Metrics> {
    let surface = MeshSurface::from_output(result)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let from_result: Vec<Point3<f64>> = (0..samples).map(|_| surface.sample(&mut rng)).collect();
    let from_reference: Vec<Point3<f64>> =
        (0..samples).map(|_| reference.sample(&mut rng)).collect();

    let to_reference: Vec<f64> = from_result
        .par_iter()
        .map(|p| reference.distance(p))
        .collect();
    let to_result: Vec<f64> = from_reference
        .par_iter()
        .map(|p| surface.distance(p))
        .collect();

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let max = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max);

    let cd = 0.5 * (mean(&to_reference) + mean(&to_result));
    let hd = max(&to_reference).max(max(&to_result));
    let diag = reference.bbox().diagonal();

    Ok(Metrics {
        cd_permille: cd / diag * 1000.0,
        hd_percent: hd / diag * 100.0,
    })
}

//! Stamping baseline: fold per-stamp signed distance fields with a pointwise
//! minimum on the cube-lattice vertices, then extract with marching
//! tetrahedra over the same five-tet grid.

use super::SweepSetup;
use crate::envelope::{assemble_surface, marching, OutputMesh, Patch, TetPatches};
use crate::error::Result;
use crate::fieldprop::transformed_bbox;
use crate::mesh::signed_distance;
use crate::tetgrid::TetRef;
use rayon::prelude::*;

/// Values farther than this many cells from a stamp are skipped; skipped
/// stamps can only contribute values above the band, so every crossing edge
/// still sees exact endpoint values (tet edges are at most sqrt(2) cells).
const BAND_CELLS: f64 = 2.5;

const FAR: f64 = 1e30;

pub fn stamp_fold_field(setup: &SweepSetup) -> Result<Vec<f64>> {
    let grid = &setup.grid;
    let dims = grid.dims();
    let nv = [dims[0] as usize + 1, dims[1] as usize + 1, dims[2] as usize + 1];
    let cell = grid.cell_size();

    // N+1 stamp times over the interval.
    let n = setup.intervals.len();
    let stamps: Vec<_> = (0..=n)
        .map(|j| {
            let t = j as f64 / n as f64;
            let f = setup.traj.evaluate(t)?;
            let bbox = transformed_bbox(&setup.mesh.bbox(), &f).expanded(BAND_CELLS * cell);
            Ok((f.inverse(), bbox))
        })
        .collect::<Result<Vec<_>>>()?;

    let index = |i: usize, j: usize, k: usize| (i * nv[1] + j) * nv[2] + k;
    let mut field = vec![FAR; nv[0] * nv[1] * nv[2]];
    field
        .par_chunks_mut(nv[1] * nv[2])
        .enumerate()
        .for_each(|(i, slab)| {
            for j in 0..nv[1] {
                for k in 0..nv[2] {
                    let p = grid.lattice_position(&[i as i32, j as i32, k as i32]);
                    let mut best = FAR;
                    for (inv, bbox) in &stamps {
                        if bbox.contains(&p) {
                            best = best
                                .min(signed_distance(&inv.transform_point(&p), &setup.mesh));
                        }
                    }
                    slab[j * nv[2] + k] = best;
                }
            }
        });
    debug_assert_eq!(index(nv[0] - 1, nv[1] - 1, nv[2] - 1), field.len() - 1);
    Ok(field)
}

/// Marching-tets extraction of a folded lattice field over the 5-tet grid.
pub fn extract_lattice_field(grid: &crate::tetgrid::TetGrid, field: &[f64]) -> OutputMesh {
    let dims = grid.dims();
    let nv = [dims[1] as usize + 1, dims[2] as usize + 1];
    let value = |c: &[i32; 3]| -> f64 {
        field[(c[0] as usize * nv[0] + c[1] as usize) * nv[1] + c[2] as usize]
    };

    let cubes: Vec<[i32; 3]> = grid.iter_cubes().collect();
    let patch_sets: Vec<TetPatches> = cubes
        .par_iter()
        .flat_map_iter(|cube| {
            (0..5u8).filter_map(move |local| {
                let tet = TetRef { cube: *cube, local };
                let coords = grid.tet_corner_coords(&tet);
                let d = [
                    value(&coords[0]),
                    value(&coords[1]),
                    value(&coords[2]),
                    value(&coords[3]),
                ];
                if d.iter().all(|&v| v >= 0.0) || d.iter().all(|&v| v < 0.0) {
                    return None;
                }
                let verts = coords.map(|c| grid.lattice_position(&c));
                marching::marching_tet(&verts, &d).map(|polygon| TetPatches {
                    tet,
                    patches: vec![Patch {
                        interval: 0,
                        polygon,
                    }],
                })
            })
        })
        .collect();

    assemble_surface(&patch_sets, grid.cell_size())
}

/// Full stamping run in the normalized frame.
pub fn run(setup: &SweepSetup) -> Result<OutputMesh> {
    let field = stamp_fold_field(setup)?;
    Ok(extract_lattice_field(&setup.grid, &field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::open_edge_count;
    use crate::mesh::shapes;
    use crate::motion::{Trajectory, TrajectorySpec};
    use crate::pipeline::prepare;

    #[test]
    fn static_stamping_is_marching_tets_of_the_model_sdf() {
        let mesh = shapes::icosphere(0.3, 2);
        let traj = Trajectory::from_spec(&TrajectorySpec::Translation {
            path: vec![[0.0, 0.0, 0.0]],
        })
        .unwrap();
        let setup = prepare(&mesh, &traj, 24, 3).unwrap();
        let out = run(&setup).unwrap();
        assert!(!out.is_empty());
        // Closed surface: marching tets on a conforming grid welds shut.
        assert_eq!(open_edge_count(&out), 0);

        // Single-stamp reference computed densely.
        let grid = &setup.grid;
        let dims = grid.dims();
        let nv = [dims[0] as usize + 1, dims[1] as usize + 1, dims[2] as usize + 1];
        let mut reference = vec![0.0; nv[0] * nv[1] * nv[2]];
        for i in 0..nv[0] {
            for j in 0..nv[1] {
                for k in 0..nv[2] {
                    let p = grid.lattice_position(&[i as i32, j as i32, k as i32]);
                    reference[(i * nv[1] + j) * nv[2] + k] =
                        signed_distance(&p, &setup.mesh);
                }
            }
        }
        let ref_mesh = extract_lattice_field(&setup.grid, &reference);
        assert_eq!(out.triangles.len(), ref_mesh.triangles.len());
        for (a, b) in out.vertices.iter().zip(&ref_mesh.vertices) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

//! End-to-end orchestration: normalize, discretize, propagate, extract,
//! assemble, and score. Also hosts the Stamping baseline and the
//! resolution/step sweep driver.

pub mod analytic;
pub mod metrics;
pub mod stamping;

pub use analytic::{analytic_sphere_circle_sdf, box_sdf, MeshSurface, Reference, ReferenceSpec};
pub use metrics::{compute_metrics, Metrics};

use crate::envelope::{
    assemble_surface, extract_tet_surface, open_edge_count, OutputMesh, TetPatches,
};
use crate::error::{Result, SweptError};
use crate::fieldprop::{propagate, transformed_bbox, FieldMap, PropagateOptions};
use crate::geom::Aabb;
use crate::mesh::{load_mesh, TriangleMesh};
use crate::motion::{discretize, TimeInterval, Trajectory, TrajectorySpec};
use crate::tetgrid::{build_grid, TetGrid, TetRef};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::time::Instant;

pub const DEFAULT_GRID_RESOLUTION: u32 = 256;
pub const DEFAULT_TIME_STEPS: usize = 50;
pub const DEFAULT_SEEDS_PER_INTERVAL: usize = 100;
pub const DEFAULT_RNG_SEED: u64 = 1;
pub const DEFAULT_METRIC_SAMPLES: usize = 100_000;

fn default_grid() -> u32 {
    DEFAULT_GRID_RESOLUTION
}
fn default_steps() -> usize {
    DEFAULT_TIME_STEPS
}
fn default_seeds() -> usize {
    DEFAULT_SEEDS_PER_INTERVAL
}
fn default_rng() -> u64 {
    DEFAULT_RNG_SEED
}
fn default_samples() -> usize {
    DEFAULT_METRIC_SAMPLES
}
fn default_output() -> PathBuf {
    PathBuf::from("swept.obj")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Ours,
    Stamping,
}

impl std::str::FromStr for Method {
    type Err = SweptError;
    fn from_str(s: &str) -> Result<Method> {
        match s {
            "ours" => Ok(Method::Ours),
            "stamping" => Ok(Method::Stamping),
            other => Err(SweptError::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// One experiment: mesh, trajectory, discretization, and output settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Input OBJ path; optional when running with an in-memory mesh.
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    pub trajectory: TrajectorySpec,
    #[serde(default = "default_grid")]
    pub grid_resolution: u32,
    #[serde(default = "default_steps")]
    pub time_steps: usize,
    #[serde(default = "default_seeds")]
    pub seeds_per_interval: usize,
    #[serde(default = "default_rng")]
    pub rng_seed: u64,
    /// Worker threads for extraction and metrics; 0 uses the rayon default.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub method: Method,
    /// Escape hatch: let all-positive fields keep propagating (never stored).
    #[serde(default)]
    pub propagate_all_positive: bool,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(default = "default_samples")]
    pub metric_samples: usize,
    /// Grid resolutions for the `ablate` sweep; defaults to `grid_resolution`.
    #[serde(default)]
    pub ablate_grids: Option<Vec<u32>>,
    /// Time-step counts for the `ablate` sweep; defaults to `time_steps`.
    #[serde(default)]
    pub ablate_steps: Option<Vec<usize>>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 8 {
            return Err(SweptError::Config(
                "grid_resolution must be at least 8".into(),
            ));
        }
        if self.time_steps == 0 {
            return Err(SweptError::Config("time_steps must be positive".into()));
        }
        if self.seeds_per_interval == 0 {
            return Err(SweptError::Config(
                "seeds_per_interval must be positive".into(),
            ));
        }
        if self.metric_samples == 0 {
            return Err(SweptError::Config("metric_samples must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<RunConfig> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| SweptError::Config(format!("bad config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

/// Per-phase wall times in seconds.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct PhaseTimings {
    pub discretize: f64,
    pub propagate: f64,
    pub extract: f64,
}

/// Quality and timing numbers for one run. Chamfer/Hausdorff are present
/// only when the config names a reference.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub chamfer_l1_permille: Option<f64>,
    pub hausdorff_percent: Option<f64>,
    pub wall_seconds: f64,
    pub phases: PhaseTimings,
    pub open_edges: usize,
    pub triangles: usize,
    /// Grid cell edge length in input units.
    pub cell_size: f64,
}

/// Output mesh (in input units) plus its report.
pub struct RunOutput {
    pub mesh: OutputMesh,
    pub report: MetricsReport,
    /// Normalization factor applied internally (unit bbox diagonal).
    pub scale: f64,
}

/// Normalized problem: geometry scaled so the swept bounding box has unit
/// diagonal, grid built over the padded domain.
pub struct SweepSetup {
    pub mesh: TriangleMesh,
    pub traj: Trajectory,
    pub grid: TetGrid,
    pub intervals: Vec<TimeInterval>,
    pub scale: f64,
}

/// Swept-volume bounding box estimated by transforming the model's bbox
/// corners at `4 * time_steps` sample times.
pub fn swept_bounding_box(
    mesh: &TriangleMesh,
    traj: &Trajectory,
    time_steps: usize,
) -> Result<Aabb> {
    let samples = (4 * time_steps).max(8);
    let mut swept = Aabb::empty();
    for j in 0..=samples {
        let t = j as f64 / samples as f64;
        let f = traj.evaluate(t)?;
        swept = swept.union(&transformed_bbox(&mesh.bbox(), &f));
    }
    Ok(swept)
}

/// Normalize and build the grid: two cells of padding around the swept box
/// on its largest axis.
pub fn prepare(
    mesh: &TriangleMesh,
    traj: &Trajectory,
    grid_resolution: u32,
    time_steps: usize,
) -> Result<SweepSetup> {
    if grid_resolution < 8 {
        return Err(SweptError::Config(
            "grid_resolution must be at least 8".into(),
        ));
    }
    let swept = swept_bounding_box(mesh, traj, time_steps)?;
    let scale = 1.0 / swept.diagonal();
    if !scale.is_finite() || scale <= 0.0 {
        return Err(SweptError::Grid("degenerate swept bounding box".into()));
    }
    let mesh_s = mesh.scaled(scale)?;
    let traj_s = traj.scaled(scale);
    let swept_s = swept.scaled(scale);
    let cell = swept_s.max_extent() / (grid_resolution - 4) as f64;
    let grid = build_grid(&swept_s.expanded(2.0 * cell), grid_resolution)?;
    Ok(SweepSetup {
        mesh: mesh_s,
        traj: traj_s,
        grid,
        intervals: discretize(time_steps)?,
        scale,
    })
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        Ok(f())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SweptError::Config(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// Extract every stored tet's patches (in deterministic tet order) and weld.
pub fn extract_surface(grid: &TetGrid, map: &FieldMap) -> OutputMesh {
    let mut keys: Vec<TetRef> = map.keys().copied().collect();
    keys.sort_unstable();
    let eps = 1e-10 * grid.cell_size();
    let patch_sets: Vec<TetPatches> = keys
        .par_iter()
        .map(|tet| {
            let verts = grid
                .tet_vertices(tet)
                .expect("stored tets are in range");
            let mut fields = map[tet].clone();
            fields.sort_by_key(|f| f.interval);
            TetPatches {
                tet: *tet,
                patches: extract_tet_surface(&verts, &fields, eps),
            }
        })
        .collect();
    assemble_surface(&patch_sets, grid.cell_size())
}

/// Run the motion-inversion pipeline on an in-memory mesh. No file output.
pub fn run_sweep_with_mesh(mesh: &TriangleMesh, config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let wall = Instant::now();
    let t0 = Instant::now();
    let setup = prepare(mesh, &trajectory(config)?, config.grid_resolution, config.time_steps)
        .map_err(|e| e.in_stage("discretize"))?;
    let discretize_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let (map, _stats) = propagate(
        &setup.grid,
        &setup.mesh,
        &setup.traj,
        &setup.intervals,
        config.seeds_per_interval,
        config.rng_seed,
        PropagateOptions {
            propagate_all_positive: config.propagate_all_positive,
            ..Default::default()
        },
    )
    .map_err(|e| e.in_stage("propagate"))?;
    let propagate_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let normalized = with_pool(config.threads, || extract_surface(&setup.grid, &map))?;
    let mesh_out = normalized.scaled(1.0 / setup.scale);
    let extract_s = t2.elapsed().as_secs_f64();

    finish(mesh_out, config, &setup, wall, discretize_s, propagate_s, extract_s)
}

/// Run the Stamping baseline on an in-memory mesh. No file output.
pub fn run_stamping_with_mesh(mesh: &TriangleMesh, config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let wall = Instant::now();
    let t0 = Instant::now();
    let setup = prepare(mesh, &trajectory(config)?, config.grid_resolution, config.time_steps)
        .map_err(|e| e.in_stage("discretize"))?;
    let discretize_s = t0.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let normalized = with_pool(config.threads, || stamping::run(&setup))?
        .map_err(|e| e.in_stage("extract"))?;
    let mesh_out = normalized.scaled(1.0 / setup.scale);
    let extract_s = t2.elapsed().as_secs_f64();

    finish(mesh_out, config, &setup, wall, discretize_s, 0.0, extract_s)
}

/// Dispatch on `config.method`.
pub fn run_with_mesh(mesh: &TriangleMesh, config: &RunConfig) -> Result<RunOutput> {
    match config.method {
        Method::Ours => run_sweep_with_mesh(mesh, config),
        Method::Stamping => run_stamping_with_mesh(mesh, config),
    }
}

fn trajectory(config: &RunConfig) -> Result<Trajectory> {
    Trajectory::from_spec(&config.trajectory)
}

fn finish(
    mesh_out: OutputMesh,
    config: &RunConfig,
    setup: &SweepSetup,
    wall: Instant,
    discretize_s: f64,
    propagate_s: f64,
    extract_s: f64,
) -> Result<RunOutput> {
    let (cd, hd) = match (&config.reference, mesh_out.is_empty()) {
        (Some(spec), false) => {
            let reference = Reference::from_spec(spec)?;
            let m = with_pool(config.threads, || {
                compute_metrics(&mesh_out, &reference, config.metric_samples, config.rng_seed)
            })?
            .map_err(|e| e.in_stage("metrics"))?;
            (Some(m.cd_permille), Some(m.hd_percent))
        }
        _ => (None, None),
    };
    let report = MetricsReport {
        chamfer_l1_permille: cd,
        hausdorff_percent: hd,
        wall_seconds: wall.elapsed().as_secs_f64(),
        phases: PhaseTimings {
            discretize: discretize_s,
            propagate: propagate_s,
            extract: extract_s,
        },
        open_edges: open_edge_count(&mesh_out),
        triangles: mesh_out.triangles.len(),
        cell_size: setup.grid.cell_size() / setup.scale,
    };
    Ok(RunOutput {
        mesh: mesh_out,
        report,
        scale: setup.scale,
    })
}

/// Full file-based run: load the mesh, execute the configured method, write
/// the OBJ and a JSON metrics sidecar next to it.
pub fn run_sweep(config: &RunConfig) -> Result<RunOutput> {
    let mesh_path = config
        .mesh
        .as_ref()
        .ok_or_else(|| SweptError::Config("config needs a mesh path".into()))?;
    let mesh = load_mesh(mesh_path).map_err(|e| e.in_stage("load"))?;
    let out = run_with_mesh(&mesh, config)?;
    crate::mesh::write_obj(&out.mesh.vertices, &out.mesh.triangles, &config.output)
        .map_err(|e| e.in_stage("output"))?;
    let sidecar = metrics_sidecar_path(&config.output);
    let json = serde_json::to_string_pretty(&out.report)
        .map_err(|e| SweptError::Config(format!("serialize report: {e}")))?;
    std::fs::write(&sidecar, json).map_err(|source| SweptError::Io {
        path: sidecar.clone(),
        source,
    })?;
    Ok(out)
}

pub fn metrics_sidecar_path(output: &std::path::Path) -> PathBuf {
    output.with_extension("metrics.json")
}

/// One cell of a resolution/step ablation table.
#[derive(Debug)]
pub struct SweepRow {
    pub grid: u32,
    pub steps: usize,
    pub report: Option<MetricsReport>,
    pub error: Option<String>,
}

/// Cross product of grid resolutions and step counts, one run per cell.
/// Failures are captured per cell rather than aborting the table.
pub fn resolution_sweep(
    mesh: &TriangleMesh,
    config: &RunConfig,
    grids: &[u32],
    steps_list: &[usize],
) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(grids.len() * steps_list.len());
    for &grid in grids {
        for &steps in steps_list {
            let cell = RunConfig {
                grid_resolution: grid,
                time_steps: steps,
                ..config.clone()
            };
            match run_with_mesh(mesh, &cell) {
                Ok(out) => rows.push(SweepRow {
                    grid,
                    steps,
                    report: Some(out.report),
                    error: None,
                }),
                Err(e) => rows.push(SweepRow {
                    grid,
                    steps,
                    report: None,
                    error: Some(e.to_string()),
                }),
            }
        }
    }
    rows
}

/// Render sweep rows as CSV.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("grid,steps,cd_permille,hd_percent,seconds,open_edges,tris\n");
    for row in rows {
        match &row.report {
            Some(r) => {
                let cd = r
                    .chamfer_l1_permille
                    .map(|v| format!("{v:.6}"))
                    .unwrap_or_default();
                let hd = r
                    .hausdorff_percent
                    .map(|v| format!("{v:.6}"))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{:.3},{},{}\n",
                    row.grid, row.steps, cd, hd, r.wall_seconds, r.open_edges, r.triangles
                ));
            }
            None => {
                out.push_str(&format!("{},{},,,,,\n", row.grid, row.steps));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    fn static_config() -> RunConfig {
        RunConfig {
            mesh: None,
            trajectory: TrajectorySpec::Translation {
                path: vec![[0.0, 0.0, 0.0]],
            },
            grid_resolution: 24,
            time_steps: 2,
            seeds_per_interval: 20,
            rng_seed: 1,
            threads: 0,
            output: default_output(),
            method: Method::Ours,
            propagate_all_positive: false,
            reference: None,
            metric_samples: 10_000,
            ablate_grids: None,
            ablate_steps: None,
        }
    }

    #[test]
    fn config_defaults_from_json() {
        let config = RunConfig::from_json(
            r#"{"mesh":"m.obj","trajectory":{"type":"translation","path":[[0,0,0],[1,0,0]]}}"#,
        )
        .unwrap();
        assert_eq!(config.grid_resolution, 256);
        assert_eq!(config.time_steps, 50);
        assert_eq!(config.seeds_per_interval, 100);
        assert_eq!(config.rng_seed, 1);
        assert_eq!(config.method, Method::Ours);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = RunConfig::from_json(
            r#"{"trajectory":{"type":"translation","path":[[0,0,0]]},"grid":128}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bad config JSON"));
    }

    #[test]
    fn identity_sweep_recovers_the_model() {
        let mesh = shapes::icosphere(0.3, 3);
        let mut config = static_config();
        config.reference = Some(ReferenceSpec::Sphere {
            center: [0.0, 0.0, 0.0],
            radius: 0.3,
        });
        let out = run_sweep_with_mesh(&mesh, &config).unwrap();
        assert!(!out.mesh.is_empty());
        let hd = out.report.hausdorff_percent.unwrap();
        // Within ~1.5 cell diagonals of the sphere.
        let diag_pct = 1.5 * out.report.cell_size * 3.0f64.sqrt()
            / (0.6 * 3.0f64.sqrt())
            * 100.0;
        assert!(hd <= diag_pct, "hd {hd} vs bound {diag_pct}");
    }

    #[test]
    fn stamping_runs_and_reports() {
        let mesh = shapes::icosphere(0.3, 2);
        let mut config = static_config();
        config.method = Method::Stamping;
        let out = run_with_mesh(&mesh, &config).unwrap();
        assert!(!out.mesh.is_empty());
        assert_eq!(out.report.open_edges, 0);
    }

    #[test]
    fn sweep_single_cell_matches_run() {
        let mesh = shapes::icosphere(0.3, 2);
        let config = static_config();
        let rows = resolution_sweep(&mesh, &config, &[24], &[2]);
        assert_eq!(rows.len(), 1);
        let row = rows[0].report.as_ref().unwrap();
        let direct = run_sweep_with_mesh(&mesh, &config).unwrap();
        assert_eq!(row.triangles, direct.report.triangles);
        assert_eq!(row.open_edges, direct.report.open_edges);

        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("grid,steps,cd_permille,hd_percent,seconds,open_edges,tris\n"));
        assert!(csv.lines().nth(1).unwrap().starts_with("24,2,"));
    }

    #[test]
    fn minkowski_band_box() {
        // Unit cube translated by (1,0,0): swept volume is [0,2]x[0,1]x[0,1].
        let mesh = shapes::unit_cube();
        let config = RunConfig {
            trajectory: TrajectorySpec::Translation {
                path: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            },
            grid_resolution: 32,
            time_steps: 4,
            seeds_per_interval: 30,
            reference: Some(ReferenceSpec::Box {
                min: [0.0, 0.0, 0.0],
                max: [2.0, 1.0, 1.0],
            }),
            ..static_config()
        };
        let out = run_sweep_with_mesh(&mesh, &config).unwrap();
        let diag = 6.0f64.sqrt();
        let hd_abs = out.report.hausdorff_percent.unwrap() / 100.0 * diag;
        assert!(
            hd_abs <= 2.0 * out.report.cell_size * 3.0f64.sqrt(),
            "hd {hd_abs} vs 2 cells {}",
            2.0 * out.report.cell_size * 3.0f64.sqrt()
        );
    }
}

//! Command-line front end: parse a JSON run config, apply flag overrides,
//! run the pipelines, and emit meshes and reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime
//! failure. Diagnostics go to standard error.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use sweptvol::envelope::{open_edge_count, OutputMesh};
use sweptvol::pipeline::{
    compute_metrics, metrics_sidecar_path, resolution_sweep, sweep_csv, Method, Reference,
    RunConfig,
};
use sweptvol::SweptError;

const CONFIG_HELP: &str = "\
Config keys (JSON document passed via --config):
  mesh                    input OBJ path
  trajectory              {\"type\":\"translation\"|\"circular\"|\"screw\"|\"keyframes\", ...}
  grid_resolution         cubes per axis (default 256)
  time_steps              temporal intervals (default 50)
  seeds_per_interval      seed tetrahedra per interval (default 100)
  rng_seed                RNG seed (default 1)
  threads                 worker threads, 0 = all cores (default 0)
  output                  output OBJ path (default swept.obj)
  method                  \"ours\" | \"stamping\" (default ours)
  propagate_all_positive  propagate all-positive fields (default false)
  reference               metrics reference: torus | box | sphere | mesh (default none)
  metric_samples          surface samples per side (default 100000)
  ablate_grids            grid list for `ablate` (default [grid_resolution])
  ablate_steps            step list for `ablate` (default [time_steps])

Flag overrides beat config values, which beat the defaults above.
SWEPT_THREADS is honored when --threads is absent.";

#[derive(Parser)]
#[command(name = "sweptvol", version, about = "Swept volume computation for triangle meshes under rigid motion", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run config path.
    #[arg(long)]
    config: PathBuf,
    /// Override grid_resolution (default 256).
    #[arg(long)]
    grid: Option<u32>,
    /// Override time_steps (default 50).
    #[arg(long)]
    steps: Option<usize>,
    /// Override seeds_per_interval (default 100).
    #[arg(long)]
    seeds: Option<usize>,
    /// Override rng_seed (default 1).
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Override threads; falls back to SWEPT_THREADS, then 0 (all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override method: ours | stamping.
    #[arg(long)]
    method: Option<String>,
    /// Override output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep; writes the OBJ and a JSON metrics sidecar.
    Sweep(RunArgs),
    /// Run the Stamping baseline (forces method = stamping).
    Stamp(RunArgs),
    /// Score an existing result mesh against the config's reference.
    Metrics {
        #[command(flatten)]
        args: RunArgs,
        /// Result OBJ to score.
        #[arg(long)]
        result: PathBuf,
    },
    /// Run the grid/steps cross product and write a CSV table.
    Ablate {
        #[command(flatten)]
        args: RunArgs,
        /// Comma-separated grid resolutions (defaults to config ablate_grids).
        #[arg(long, value_delimiter = ',')]
        grids: Option<Vec<u32>>,
        /// Comma-separated step counts (defaults to config ablate_steps).
        #[arg(long = "steps-list", value_delimiter = ',')]
        steps_list: Option<Vec<usize>>,
    },
    /// Check an OBJ for watertightness and consistent outward orientation.
    ValidateMesh {
        /// Mesh to validate.
        mesh: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn from_swept(e: SweptError) -> Failure {
    let code = match e.root() {
        SweptError::ObjParse { .. }
        | SweptError::OpenEdge { .. }
        | SweptError::NonManifoldEdge { .. }
        | SweptError::InconsistentWinding { .. }
        | SweptError::InsideOut { .. }
        | SweptError::EmptyMesh
        | SweptError::Trajectory(_)
        | SweptError::Range(_)
        | SweptError::Io { .. }
        | SweptError::Config(_) => 2,
        _ => 3,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        usage(format!(
            "cannot read config {}: {e}\nusage: sweptvol <sweep|stamp|metrics|ablate> --config <file.json> [overrides]",
            args.config.display()
        ))
    })?;
    let mut config = RunConfig::from_json(&text).map_err(from_swept)?;
    apply_overrides(&mut config, args)?;
    config.validate().map_err(from_swept)?;
    Ok(config)
}

fn apply_overrides(config: &mut RunConfig, args: &RunArgs) -> Result<(), Failure> {
    if let Some(v) = args.grid {
        config.grid_resolution = v;
    }
    if let Some(v) = args.steps {
        config.time_steps = v;
    }
    if let Some(v) = args.seeds {
        config.seeds_per_interval = v;
    }
    if let Some(v) = args.rng_seed {
        config.rng_seed = v;
    }
    match (args.threads, std::env::var("SWEPT_THREADS").ok()) {
        (Some(v), _) => config.threads = v,
        (None, Some(env)) => {
            config.threads = env
                .parse()
                .map_err(|e| usage(format!("bad SWEPT_THREADS {env:?}: {e}")))?;
        }
        (None, None) => {}
    }
    if let Some(m) = &args.method {
        config.method = m.parse::<Method>().map_err(from_swept)?;
    }
    if let Some(o) = &args.out {
        config.output = o.clone();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(args) => run_and_report(&load_config(&args)?),
        Command::Stamp(args) => {
            let mut config = load_config(&args)?;
            config.method = Method::Stamping;
            run_and_report(&config)
        }
        Command::Metrics { args, result } => metrics_command(&load_config(&args)?, &result),
        Command::Ablate {
            args,
            grids,
            steps_list,
        } => ablate_command(&load_config(&args)?, grids, steps_list),
        Command::ValidateMesh { mesh } => validate_mesh_command(&mesh),
    }
}

fn run_and_report(config: &RunConfig) -> Result<(), Failure> {
    let out = sweptvol::run_sweep(config).map_err(from_swept)?;
    let r = &out.report;
    println!(
        "method={:?} grid={} steps={} seeds={} rng_seed={} threads={}",
        config.method,
        config.grid_resolution,
        config.time_steps,
        config.seeds_per_interval,
        config.rng_seed,
        config.threads
    );
    println!(
        "wrote {} ({} triangles, {} open edges) and {}",
        config.output.display(),
        r.triangles,
        r.open_edges,
        metrics_sidecar_path(&config.output).display()
    );
    if let (Some(cd), Some(hd)) = (r.chamfer_l1_permille, r.hausdorff_percent) {
        println!("cd_permille={cd:.4} hd_percent={hd:.4}");
    }
    println!(
        "seconds={:.2} (discretize {:.2}, propagate {:.2}, extract {:.2})",
        r.wall_seconds, r.phases.discretize, r.phases.propagate, r.phases.extract
    );
    Ok(())
}

fn metrics_command(config: &RunConfig, result: &Path) -> Result<(), Failure> {
    let spec = config.reference.as_ref().ok_or_else(|| Failure {
        code: 2,
        message: "config has no \"reference\"; metrics needs one".into(),
    })?;
    let reference = Reference::from_spec(spec).map_err(from_swept)?;
    let text = std::fs::read_to_string(result).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read result mesh {}: {e}", result.display()),
    })?;
    let (vertices, triangles) = sweptvol::mesh::parse_obj(&text, result).map_err(from_swept)?;
    let mesh = OutputMesh {
        vertices,
        triangles,
    };
    let m = compute_metrics(&mesh, &reference, config.metric_samples, config.rng_seed)
        .map_err(from_swept)?;
    let report = serde_json::json!({
        "cd_permille": m.cd_permille,
        "hd_percent": m.hd_percent,
        "triangles": mesh.triangles.len(),
        "open_edges": open_edge_count(&mesh),
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

fn ablate_command(
    config: &RunConfig,
    grids: Option<Vec<u32>>,
    steps_list: Option<Vec<usize>>,
) -> Result<(), Failure> {
    let grids = grids
        .or_else(|| config.ablate_grids.clone())
        .unwrap_or_else(|| vec![config.grid_resolution]);
    let steps = steps_list
        .or_else(|| config.ablate_steps.clone())
        .unwrap_or_else(|| vec![config.time_steps]);
    if grids.is_empty() || steps.is_empty() {
        return Err(usage("ablate needs non-empty grid and step lists"));
    }
    let mesh_path = config.mesh.as_ref().ok_or_else(|| Failure {
        code: 2,
        message: "config needs a mesh path".into(),
    })?;
    let mesh = sweptvol::load_mesh(mesh_path).map_err(from_swept)?;
    let rows = resolution_sweep(&mesh, config, &grids, &steps);
    for row in &rows {
        if let Some(err) = &row.error {
            eprintln!("cell grid={} steps={}: {err}", row.grid, row.steps);
        }
    }
    let csv = sweep_csv(&rows);
    let out = config.output.with_extension("csv");
    std::fs::write(&out, &csv).map_err(|e| Failure {
        code: 3,
        message: format!("cannot write {}: {e}", out.display()),
    })?;
    print!("{csv}");
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn validate_mesh_command(path: &Path) -> Result<(), Failure> {
    let mesh = sweptvol::load_mesh(path).map_err(from_swept)?;
    println!(
        "{}: OK - {} vertices, {} triangles, closed 2-manifold, outward orientation, {} degenerate face(s) removed",
        path.display(),
        mesh.vertices().len(),
        mesh.triangles().len(),
        mesh.removed_degenerate_faces()
    );
    Ok(())
}

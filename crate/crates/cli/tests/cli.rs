//! Black-box tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sweptvol"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sweptvol_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_sphere_obj(path: &Path) {
    let sphere = sweptvol::mesh::shapes::icosphere(0.3, 2);
    sweptvol::save_obj(&sphere, path).unwrap();
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sweep_happy_path_writes_obj_and_sidecar() {
    let dir = temp_dir("sweep");
    let mesh_path = dir.join("sphere.obj");
    write_sphere_obj(&mesh_path);
    let config_path = dir.join("run.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{
                "mesh": {mesh:?},
                "trajectory": {{"type":"translation","path":[[0,0,0],[0.4,0,0]]}},
                "grid_resolution": 24, "time_steps": 2, "seeds_per_interval": 20,
                "output": {out:?},
                "reference": {{"type":"sphere","center":[0,0,0],"radius":0.3}}
            }}"#,
            mesh = mesh_path,
            out = dir.join("out.obj"),
        ),
    )
    .unwrap();

    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config_path)
        .args(["--grid", "32"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("grid=32"), "flag override missing: {text}");
    assert!(dir.join("out.obj").exists());
    let sidecar = dir.join("out.metrics.json");
    assert!(sidecar.exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert!(report["triangles"].as_u64().unwrap() > 0);
    assert!(report["chamfer_l1_permille"].as_f64().is_some());

    // metrics subcommand scores the written mesh.
    let out = bin()
        .args(["metrics", "--config"])
        .arg(&config_path)
        .arg("--result")
        .arg(dir.join("out.obj"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let scored: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let cd = scored["cd_permille"].as_f64().unwrap();
    assert!(cd.is_finite() && cd > 0.0);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = bin()
        .args(["sweep", "--config", "definitely_missing.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("usage"));
}

#[test]
fn validate_mesh_reports_open_edges() {
    let dir = temp_dir("validate");
    let open_path = dir.join("open.obj");
    // One face removed from a cube.
    let cube = sweptvol::mesh::shapes::unit_cube();
    let mut tris = cube.triangles().to_vec();
    tris.pop();
    sweptvol::mesh::write_obj(cube.vertices(), &tris, &open_path).unwrap();

    let out = bin().arg("validate-mesh").arg(&open_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("open mesh"), "{err}");
    assert!(err.contains("edge ("), "edge id missing: {err}");

    let good_path = dir.join("good.obj");
    write_sphere_obj(&good_path);
    let out = bin().arg("validate-mesh").arg(&good_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("closed 2-manifold"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_lists_config_keys_and_defaults() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for key in [
        "mesh",
        "trajectory",
        "grid_resolution",
        "time_steps",
        "seeds_per_interval",
        "rng_seed",
        "threads",
        "output",
        "method",
        "propagate_all_positive",
        "reference",
        "metric_samples",
        "ablate_grids",
        "ablate_steps",
    ] {
        assert!(text.contains(key), "help is missing config key {key}");
    }
    for default in ["default 256", "default 50", "default 100", "default 1"] {
        assert!(text.contains(default), "help is missing {default:?}");
    }
    for sub in ["sweep", "stamp", "metrics", "ablate", "validate-mesh"] {
        assert!(text.contains(sub), "help is missing subcommand {sub}");
    }
}

#[test]
fn ablate_writes_the_csv_table() {
    let dir = temp_dir("ablate");
    let mesh_path = dir.join("sphere.obj");
    write_sphere_obj(&mesh_path);
    let config_path = dir.join("run.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{
                "mesh": {mesh:?},
                "trajectory": {{"type":"translation","path":[[0,0,0],[0.4,0,0]]}},
                "time_steps": 2, "seeds_per_interval": 20,
                "output": {out:?},
                "reference": {{"type":"sphere","center":[0,0,0],"radius":0.3}}
            }}"#,
            mesh = mesh_path,
            out = dir.join("table.obj"),
        ),
    )
    .unwrap();

    let out = bin()
        .args(["ablate", "--config"])
        .arg(&config_path)
        .args(["--grids", "16,24", "--steps-list", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("table.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "grid,steps,cd_permille,hd_percent,seconds,open_edges,tris"
    );
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("16,2,"));
    assert!(csv.lines().nth(2).unwrap().starts_with("24,2,"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stamp_subcommand_forces_the_baseline() {
    let dir = temp_dir("stamp");
    let mesh_path = dir.join("sphere.obj");
    write_sphere_obj(&mesh_path);
    let config_path = dir.join("run.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{
                "mesh": {mesh:?},
                "trajectory": {{"type":"translation","path":[[0,0,0]]}},
                "grid_resolution": 24, "time_steps": 2, "seeds_per_interval": 20,
                "output": {out:?}
            }}"#,
            mesh = mesh_path,
            out = dir.join("stamp.obj"),
        ),
    )
    .unwrap();
    let out = bin()
        .args(["stamp", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("method=Stamping"));
    assert!(dir.join("stamp.obj").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn env_threads_fallback_is_used() {
    let dir = temp_dir("env");
    let mesh_path = dir.join("sphere.obj");
    write_sphere_obj(&mesh_path);
    let config_path = dir.join("run.json");
    std::fs::write(
        &config_path,
        format!(
            r#"{{
                "mesh": {mesh:?},
                "trajectory": {{"type":"translation","path":[[0,0,0]]}},
                "grid_resolution": 16, "time_steps": 1, "seeds_per_interval": 10,
                "output": {out:?}
            }}"#,
            mesh = mesh_path,
            out = dir.join("env.obj"),
        ),
    )
    .unwrap();
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config_path)
        .env("SWEPT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("threads=2"));

    // Explicit flag beats the environment.
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config_path)
        .args(["--threads", "1"])
        .env("SWEPT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("threads=1"));
    std::fs::remove_dir_all(&dir).ok();
}

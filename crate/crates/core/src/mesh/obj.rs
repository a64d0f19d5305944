//! Minimal ASCII OBJ reader/writer: `v` and `f` records, 1-based indices,
//! quads and larger faces fan-triangulated on load, normals ignored.

use super::TriangleMesh;
use crate::error::{Result, SweptError};
use nalgebra::Point3;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Parse OBJ text into raw vertices and fan-triangulated faces.
pub fn parse_obj(text: &str, path: &Path) -> Result<(Vec<Point3<f64>>, Vec<[u32; 3]>)> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| SweptError::ObjParse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message,
        };
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    *c = tokens
                        .next()
                        .ok_or_else(|| err("vertex needs 3 coordinates".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad coordinate: {e}")))?;
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(4);
                for tok in tokens {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first
                        .parse()
                        .map_err(|e| err(format!("bad face index {tok:?}: {e}")))?;
                    if i < 1 || i as usize > vertices.len() {
                        return Err(err(format!("face index {i} out of range")));
                    }
                    idx.push((i - 1) as u32);
                }
                if idx.len() < 3 {
                    return Err(err("face needs at least 3 vertices".into()));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            // Normals, texture coords, groups, materials: ignored.
            _ => {}
        }
    }
    Ok((vertices, triangles))
}

/// Load and validate a mesh from an OBJ file.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SweptError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (vertices, triangles) = parse_obj(&text, path)?;
    TriangleMesh::from_parts(vertices, triangles)
}

/// Write raw geometry as ASCII OBJ (`v`/`f` records only).
pub fn write_obj(
    vertices: &[Point3<f64>],
    triangles: &[[u32; 3]],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| SweptError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        for v in vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for t in triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        w.flush()
    };
    emit().map_err(io_err)
}

/// Write a validated mesh as ASCII OBJ.
pub fn save_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    write_obj(mesh.vertices(), mesh.triangles(), path)
}

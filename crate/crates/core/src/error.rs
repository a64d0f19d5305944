use std::path::PathBuf;
use thiserror::Error;

/// Errors surfaced by the swept-volume pipeline.
#[derive(Debug, Error)]
pub enum SweptError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("obj parse error at {path}:{line}: {message}")]
    ObjParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("open mesh: edge ({v0}, {v1}) bounds {count} face(s), expected 2")]
    OpenEdge { v0: u32, v1: u32, count: usize },

    #[error("non-manifold mesh: edge ({v0}, {v1}) bounds {count} faces, expected 2")]
    NonManifoldEdge { v0: u32, v1: u32, count: usize },

    #[error("inconsistent winding: edge ({v0}, {v1}) is traversed twice in the same direction")]
    InconsistentWinding { v0: u32, v1: u32 },

    #[error("inside-out mesh: enclosed volume is {volume}, expected positive")]
    InsideOut { volume: f64 },

    #[error("mesh has no valid faces")]
    EmptyMesh,

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("invalid trajectory: {0}")]
    Trajectory(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("point outside grid domain: ({0}, {1}, {2})")]
    OutsideDomain(f64, f64, f64),

    #[error("model unresolvable at this grid resolution: no seed tetrahedron found for interval {interval}")]
    NoSeeds { interval: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("metrics require a non-empty mesh")]
    EmptyResult,

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SweptError>,
    },
}

impl SweptError {
    pub fn in_stage(self, stage: &'static str) -> SweptError {
        SweptError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping stage tags.
    pub fn root(&self) -> &SweptError {
        match self {
            SweptError::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, SweptError>;

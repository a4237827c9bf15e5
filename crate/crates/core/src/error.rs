use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed {format} file: {reason}")]
    Format {
        format: &'static str,
        reason: String,
    },

    #[error("width ≠ 2×height (got {width}×{height})")]
    Aspect { width: usize, height: usize },

    #[error("invalid radiance {value} at texel (u={u}, v={v})")]
    BadTexel { u: usize, v: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no specular lightmap for shininess {requested}; available: {available:?}")]
    MissingExponent { requested: u32, available: Vec<u32> },

    #[error("control points are degenerate: {0}")]
    Degenerate(String),

    #[error("control set has no normals")]
    MissingNormals,

    #[error("control set has no triangles")]
    MissingTriangles,

    #[error("density gradient vanishes at ({0:.4}, {1:.4}, {2:.4})")]
    UndefinedNormal(f64, f64, f64),

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(format: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            format,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

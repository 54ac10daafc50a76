//! File formats, the spectrum cache, report emission and the `weyl-lab`
//! command line on top of `weyl-core`.

pub mod cache;
pub mod cli;
pub mod config;
pub mod io;
pub mod report;
pub mod spec;

use std::path::PathBuf;

use thiserror::Error;
use weyl_core::count::CountError;
use weyl_core::lb_spectrum::SpectrumError;
use weyl_core::regions::RegionError;
use weyl_core::surface::SurfaceError;
use weyl_core::symbols::SymbolError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_GATE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => EXIT_USAGE,
            _ => EXIT_PRECONDITION,
        }
    }
}

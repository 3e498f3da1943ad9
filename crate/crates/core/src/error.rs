//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by image I/O, geometry validation, and the numeric
/// pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    ImageRead {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("failed to write {path}: {source}")]
    ImageWrite {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("unsupported image format in {path}: {detail}")]
    UnsupportedImage { path: PathBuf, detail: String },
    #[error("expected color space {expected}, got {actual}")]
    WrongColorSpace { expected: String, actual: String },
    #[error("image {width}x{height} too small for {scales} pyramid scales (needs min dimension >= {min})")]
    ImageTooSmall {
        width: usize,
        height: usize,
        scales: usize,
        min: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid pooling geometry: {0}")]
    InvalidGeometry(String),
    #[error("pooled statistic stacks do not match: {0}")]
    PooledMismatch(String),
    #[error("synthesis aborted: loss became non-finite at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },
    #[error("degenerate calibration corpus: descriptor {descriptor} has zero range")]
    DegenerateCalibration { descriptor: String },
    #[error("calibration file error: {0}")]
    CalibrationFormat(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("height {z} outside the domain {domain} of weight {weight}")]
    Domain { weight: String, z: f64, domain: String },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("surface is not spacelike at {invalid} of {total} nodes")]
    NotSpacelike { invalid: usize, total: usize },

    #[error("valid region is disconnected: {0} valid nodes unreachable from the base node")]
    Disconnected(usize),

    #[error("image projection folds over at {} cells, first {:?}", .cells.len(), .cells.first())]
    FoldOver { cells: Vec<(usize, usize)> },

    #[error("radial profile collided with the rotation axis at s = {s} (x = {x})")]
    AxisCollision { s: f64, x: f64 },

    #[error("causality violated at r = {r}: |u'| reached the light cone")]
    Causality { r: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

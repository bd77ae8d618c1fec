use thiserror::Error;

use crate::lattice::Window;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("axis {0} out of range, expected 1..=4")]
    InvalidAxis(usize),

    #[error("Lie algebra basis index {0} out of range, expected 1..=3")]
    InvalidBasisIndex(usize),

    #[error("plane needs two distinct axes, got ({0}, {0})")]
    DegeneratePlane(usize),

    #[error("group element at site {site:?} is singular (det = {det:e})")]
    SingularGroupElement { site: [i64; 4], det: f64 },

    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: Window, right: Window },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("plane-12 slice is not invariant under the diagonal shift (max deviation {0:e})")]
    NotDiagonalInvariant(f64),

    #[error("slice length {found} does not match window site count {expected}")]
    SliceLength { expected: usize, found: usize },

    #[error("operation requires a {expected} boundary window")]
    BoundaryMode { expected: &'static str },

    #[error("support bound {bound} does not fit inside window {window}")]
    WindowTooSmall { bound: i64, window: Window },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

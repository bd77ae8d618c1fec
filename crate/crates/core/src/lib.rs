//! Lattice-cochain model of the self-dual and anti-self-dual Yang-Mills
//! equations on Z⁴, in Euclidean and Minkowski signature.
//!
//! * [`algebra`]: 2×2 complex matrices, su(2)/sl(2,C) and their groups.
//! * [`lattice`]: multi-indices, shift operators, finite windows.
//! * [`cochain`]: 0-, 1- and 2-cochains with matrix values.
//! * [`curvature`]: curvature of a connection, pure gauges, synthetic dual fields.
//! * [`hodge`]: the discrete Hodge star on 2-cochains.
//! * [`duality`]: (anti-)self-duality residuals and relation checks.
//! * [`solver`]: residual minimisation over connections.
//! * [`io`] and [`cli`]: JSON field files and the `sdym` command line.

pub mod algebra;
pub mod cli;
pub mod cochain;
pub mod curvature;
pub mod duality;
pub mod error;
pub mod hodge;
pub mod io;
pub mod lattice;
pub mod solver;

pub use algebra::{AlgebraElement, AlgebraKind, GroupElement};
pub use cochain::{Cochain, ConnectionField, CurvatureField, Field, GaugeField};
pub use duality::{DualityProblem, Orientation};
pub use error::{Error, Result};
pub use hodge::Metric;
pub use lattice::{Axis, Boundary, LatticeIndex, Plane, Window};

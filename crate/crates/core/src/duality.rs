//! Self-dual and anti-self-dual residuals, the diagonal-shift relation and the
//! compact-support triviality check.
//!
//! Residual operators:
//!
//! | metric | self-dual    | anti-self-dual |
//! |--------|--------------|----------------|
//! | euclid | `F - ∗F`     | `F + ∗F`       |
//! | mink   | `∗F - iF`    | `∗F + iF`      |
//!
//! In Minkowski signature the self-dual equation is taken as `∗F = iF`; the
//! continuum form `∗F = ∓iF` pairs the upper sign with the opposite naming.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{AlgebraElement, C64, ENTRY_TOL};
use crate::cochain::{delta, Cochain, ConnectionField, CurvatureField};
use crate::error::{Error, Result};
use crate::hodge::{star, Metric, StarTable};
use crate::lattice::{Boundary, Direction, LatticeIndex, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    SelfDual,
    AntiSelfDual,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::SelfDual => "sd",
            Orientation::AntiSelfDual => "asd",
        }
    }

    /// +1 for self-dual, -1 for anti-self-dual.
    pub fn sign(self) -> f64 {
        match self {
            Orientation::SelfDual => 1.0,
            Orientation::AntiSelfDual => -1.0,
        }
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sd" => Ok(Orientation::SelfDual),
            "asd" => Ok(Orientation::AntiSelfDual),
            other => Err(format!("unknown duality '{other}' (expected sd or asd)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualityProblem {
    pub metric: Metric,
    pub orientation: Orientation,
}

impl DualityProblem {
    pub fn new(metric: Metric, orientation: Orientation) -> Self {
        Self { metric, orientation }
    }

    pub fn all() -> [DualityProblem; 4] {
        [
            Self::new(Metric::Euclid, Orientation::SelfDual),
            Self::new(Metric::Euclid, Orientation::AntiSelfDual),
            Self::new(Metric::Mink, Orientation::SelfDual),
            Self::new(Metric::Mink, Orientation::AntiSelfDual),
        ]
    }

    /// Coefficients `(a, b)` such that the residual is `a·F + b·∗F`.
    pub(crate) fn coefficients(self) -> (C64, C64) {
        let s = self.orientation.sign();
        match self.metric {
            Metric::Euclid => (C64::new(1.0, 0.0), C64::new(-s, 0.0)),
            Metric::Mink => (C64::new(0.0, -s), C64::new(1.0, 0.0)),
        }
    }
}

impl fmt::Display for DualityProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.metric, self.orientation.as_str())
    }
}

/// The residual 2-cochain; zero iff all six component relations hold.
pub fn residual(field: &CurvatureField, problem: DualityProblem) -> CurvatureField {
    let (a, b) = problem.coefficients();
    let starred = star(field, problem.metric);
    field.zip_with(&starred, |f, s| f.scale_c(a) + s.scale_c(b)).expect("same window")
}

/// Scalar residual `‖residual(F)‖`.
pub fn residual_norm(field: &CurvatureField, problem: DualityProblem) -> f64 {
    residual(field, problem).norm()
}

/// `Δ_{k_i}A^j_k - Δ_{k_j}A^i_k + A^i_k·A^j_{τ_i k} - A^j_k·A^i_{τ_j k}`.
fn plane_expr_at(a: &ConnectionField, plane: Plane, k: LatticeIndex) -> AlgebraElement {
    let (i, j) = plane.axes();
    delta(a, i, j, k) - delta(a, j, i, k) + a.get(k, i) * a.get(k.shift_up(i), j)
        - a.get(k, j) * a.get(k.shift_up(j), i)
}

/// The same expression evaluated at `m = σ_{ij} k`, with the product reads
/// addressed from `k` as `σ_j k` and `σ_i k` (since `τ_i σ_{ij} k = σ_j k`).
fn plane_expr_shifted(a: &ConnectionField, plane: Plane, k: LatticeIndex) -> AlgebraElement {
    let (i, j) = plane.axes();
    let m = k.shift_plane(plane, Direction::Down);
    delta(a, i, j, m) - delta(a, j, i, m) + a.get(m, i) * a.get(k.shift_down(j), j)
        - a.get(m, j) * a.get(k.shift_down(i), i)
}

/// Evaluates the six long difference equations in terms of `A` directly.
///
/// Slot `plane` of the result holds the equation whose left side is the
/// curvature expression of `plane` at `k` (Euclidean), or whose left side is
/// the starred expression read at `σ_{src} k` (Minkowski), as left minus right.
pub fn residual_componentwise(a: &ConnectionField, problem: DualityProblem) -> CurvatureField {
    let table = StarTable::new(problem.metric);
    let s = problem.orientation.sign();
    CurvatureField::from_fn(a.window(), a.algebra(), |k, plane| {
        let entry = table.to_target(plane);
        let here = plane_expr_at(a, plane, k);
        let there = plane_expr_shifted(a, entry.source, k).scale(entry.sign);
        match problem.metric {
            // F^{p}_k = ±(sign · F^{src}_{σ_src k})
            Metric::Euclid => here - there.scale(s),
            // sign · F^{src}_{σ_src k} = ±i F^{p}_k
            Metric::Mink => there - here.scale_c(C64::new(0.0, s)),
        }
    })
}

/// Outcome of a slotwise relation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationReport {
    pub holds: bool,
    pub max_violation: f64,
}

impl RelationReport {
    fn from_violation(max_violation: f64) -> Self {
        Self { holds: max_violation <= ENTRY_TOL, max_violation }
    }
}

/// Checks `F^{ij}_k = F^{ij}_{σk}` for every slot.
pub fn check_diagonal_relation(field: &CurvatureField) -> RelationReport {
    let shifted = field.diagonal_down_shift();
    RelationReport::from_violation(field.max_abs_diff(&shifted).expect("same window"))
}

/// The diagonal relation written out on `A`: the curvature expression at `k`
/// against the same expression with every read moved to `σk`.
pub fn check_diagonal_difference_form(a: &ConnectionField) -> RelationReport {
    let mut worst: f64 = 0.0;
    for k in a.window().sites() {
        let sk = k.shift_diag(Direction::Down);
        for plane in Plane::ALL {
            let (j, r) = plane.axes();
            let lhs = plane_expr_at(a, plane, k);
            // Δ_{k_j}A^r_{σk} - Δ_{k_r}A^j_{σk} + A^j_{σk}·A^r_{στ_j k} - A^r_{σk}·A^j_{στ_r k}
            let rhs = delta(a, j, r, sk) - delta(a, r, j, sk) + a.get(sk, j) * a.get(sk.shift_up(j), r)
                - a.get(sk, r) * a.get(sk.shift_up(r), j);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    RelationReport::from_violation(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremVerdict {
    /// `F ≡ 0`.
    Consistent,
    /// A nonzero slot sits at `|k| ≥ |N|`.
    ViolatesSupport,
    /// Support holds but the duality residual does not vanish.
    ViolatesDuality,
    /// Both hold yet `F` is nonzero; impossible by diagonal propagation.
    NonzeroContradiction,
}

impl TheoremVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremVerdict::Consistent => "consistent",
            TheoremVerdict::ViolatesSupport => "violates_support",
            TheoremVerdict::ViolatesDuality => "violates_duality",
            TheoremVerdict::NonzeroContradiction => "nonzero_contradiction",
        }
    }
}

/// Decides the compact-support triviality statement for one field.
///
/// The support bound uses the max-norm: slots at `max_i |k_i| ≥ max_i |N_i|`
/// must vanish. Support is checked before duality. If both hold, every
/// nonzero slot is walked down its diagonal orbit until it leaves the support
/// box; the diagonal relation then forces it to equal a vanishing slot.
pub fn verify_triviality_theorem(
    field: &CurvatureField,
    bound: [i64; 4],
    problem: DualityProblem,
) -> Result<TheoremVerdict> {
    let window = field.window();
    if window.boundary() != Boundary::Zero {
        return Err(Error::BoundaryMode { expected: "zero" });
    }
    let radius = LatticeIndex(bound).max_norm();
    if window.dims().iter().any(|&n| radius > n as i64) {
        return Err(Error::WindowTooSmall { bound: radius, window });
    }

    let is_zero = |v: &AlgebraElement| v.max_abs() <= ENTRY_TOL;
    if field.values().iter().all(is_zero) {
        return Ok(TheoremVerdict::Consistent);
    }

    let support_ok = window
        .sites()
        .filter(|k| k.max_norm() >= radius)
        .all(|k| Plane::ALL.iter().all(|&p| is_zero(&field.get(k, p))));
    if !support_ok {
        return Ok(TheoremVerdict::ViolatesSupport);
    }

    if residual(field, problem).max_abs() > ENTRY_TOL {
        return Ok(TheoremVerdict::ViolatesDuality);
    }

    // Both checks passed on a nonzero field. Walk a nonzero slot down its
    // diagonal orbit: the diagonal relation equates it with a slot outside the
    // support box, which vanishes.
    let witness = window.sites().flat_map(|k| Plane::ALL.map(|p| (k, p))).find(|&(k, p)| !is_zero(&field.get(k, p)));
    if let Some((k, plane)) = witness {
        let mut site = k;
        while window.contains(site) && site.max_norm() < radius {
            site = site.shift_diag(Direction::Down);
        }
        debug_assert!(is_zero(&field.get(site, plane)));
    }
    Ok(TheoremVerdict::NonzeroContradiction)
}

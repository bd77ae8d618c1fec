//! Lattice curvature of a connection, pure-gauge connections and synthetic
//! dual curvature fields.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{sample_algebra, AlgebraElement, AlgebraKind, GroupElement, C64, ENTRY_TOL};
use crate::cochain::{delta, Cochain, ConnectionField, CurvatureField, GaugeField};
use crate::duality::DualityProblem;
use crate::error::{Error, Result};
use crate::hodge::Metric;
use crate::lattice::{Axis, Direction, Plane, Window};

/// `F_k^{ij} = Δ_{k_i}A_k^j - Δ_{k_j}A_k^i + A_k^i·A_{τ_i k}^j - A_k^j·A_{τ_j k}^i`.
///
/// The product order is kept exactly as written; it is not a commutator, so
/// the result keeps the connection's algebra label only if every value still
/// belongs to it, and is labelled `Gl2` otherwise.
pub fn curvature(a: &ConnectionField) -> CurvatureField {
    let f = CurvatureField::from_fn(a.window(), a.algebra(), |k, plane| {
        let (i, j) = plane.axes();
        let (ai, aj) = (a.get(k, i), a.get(k, j));
        delta(a, i, j, k) - delta(a, j, i, k) + ai * a.get(k.shift_up(i), j) - aj * a.get(k.shift_up(j), i)
    });
    if f.values().iter().all(|x| a.algebra().contains(x, ENTRY_TOL)) {
        f
    } else {
        CurvatureField::with_values(f.window(), AlgebraKind::Gl2, f.values().to_vec())
    }
}

/// `A_k^j = -(Δ_{k_j} g_k) g_k^{-1} = I - g_{τ_j k} g_k^{-1}`.
///
/// On a zero-boundary window the reads past the upper edge see the identity.
/// The result is a general 2×2 field even when `g` is SU(2)-valued.
pub fn pure_gauge(g: &GaugeField) -> Result<ConnectionField> {
    let window = g.window();
    let mut inverses = Vec::with_capacity(window.num_sites());
    for (k, gk) in window.sites().zip(g.values()) {
        let inv = gk.inverse().ok_or(Error::SingularGroupElement { site: k.0, det: gk.det().norm() })?;
        inverses.push(inv);
    }
    Ok(ConnectionField::from_fn(window, AlgebraKind::Gl2, |k, j| {
        let o = window.site_offset(k).expect("site in window");
        let next = g.get(k.shift_up(j)).unwrap_or_else(GroupElement::identity);
        let diff = *next.matrix() - *g.values()[o].matrix();
        -(diff * *inverses[o].matrix())
    }))
}

/// Producers of a plane-12 slice invariant under the diagonal shift.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaneGenerator {
    Zero,
    Constant(AlgebraElement),
    /// One draw per diagonal orbit, orbits visited in storage order.
    Random {
        seed: u64,
        kind: AlgebraKind,
        scale: f64,
    },
}

impl PlaneGenerator {
    pub fn slice(&self, window: Window) -> Vec<AlgebraElement> {
        let n = window.num_sites();
        match self {
            PlaneGenerator::Zero => vec![AlgebraElement::zero(); n],
            PlaneGenerator::Constant(m) => vec![*m; n],
            PlaneGenerator::Random { seed, kind, scale } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut out: Vec<Option<AlgebraElement>> = vec![None; n];
                for start in 0..n {
                    if out[start].is_some() {
                        continue;
                    }
                    let value = sample_algebra(&mut rng, *kind, *scale);
                    let mut site = window.site_at(start);
                    while let Some(o) = window.site_offset(site) {
                        if out[o].is_some() {
                            break;
                        }
                        out[o] = Some(value);
                        site = site.shift_diag(Direction::Down);
                    }
                }
                out.into_iter().map(|v| v.unwrap_or_default()).collect()
            }
        }
    }
}

/// Builds a curvature field solving the duality equations of `problem` exactly.
///
/// Plane 12 comes from `slice` (storage order), plane 34 is
/// `c · F^{12}_{σ_{12} k}` with `c = ±1` (Euclidean) or `c = ±i` (Minkowski),
/// and the planes 13, 24, 14, 23 are zero. Requires a periodic window and a
/// slice invariant under the diagonal shift.
pub fn synthetic_dual_curvature(
    slice: &[AlgebraElement],
    window: Window,
    problem: DualityProblem,
) -> Result<CurvatureField> {
    if !window.is_periodic() {
        return Err(Error::BoundaryMode { expected: "periodic" });
    }
    if slice.len() != window.num_sites() {
        return Err(Error::SliceLength { expected: window.num_sites(), found: slice.len() });
    }
    let at = |k| slice[window.site_offset(k).expect("periodic")];
    let deviation = window.sites().map(|k| at(k).max_abs_diff(&at(k.shift_diag(Direction::Down)))).fold(0.0, f64::max);
    if deviation > ENTRY_TOL {
        return Err(Error::NotDiagonalInvariant(deviation));
    }
    let s = problem.orientation.sign();
    let c = match problem.metric {
        Metric::Euclid => C64::new(s, 0.0),
        Metric::Mink => C64::new(0.0, s),
    };
    let algebra = match problem.metric {
        Metric::Euclid => AlgebraKind::Su2,
        Metric::Mink => AlgebraKind::Sl2c,
    };
    let algebra = if slice.iter().all(|m| algebra.contains(m, ENTRY_TOL)) { algebra } else { AlgebraKind::Gl2 };
    Ok(CurvatureField::from_fn(window, algebra, |k, plane| match plane {
        Plane::P12 => at(k),
        Plane::P34 => at(k.shift_plane(Plane::P12, Direction::Down)).scale_c(c),
        _ => AlgebraElement::zero(),
    }))
}

/// [`synthetic_dual_curvature`] fed by a generator.
pub fn synthetic_sd_curvature(gen: &PlaneGenerator, window: Window, problem: DualityProblem) -> Result<CurvatureField> {
    synthetic_dual_curvature(&gen.slice(window), window, problem)
}

/// Sites whose curvature can depend on the connection at `site`: the site
/// itself and its single-axis backward neighbours.
pub fn curvature_stencil(window: Window, site: crate::lattice::LatticeIndex) -> Vec<crate::lattice::LatticeIndex> {
    let mut out: Vec<_> = std::iter::once(site)
        .chain(Axis::ALL.iter().map(|&i| site.shift_down(i)))
        .filter_map(|k| window.wrap(k))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Per-plane maxima of `‖F^{ij}_k‖_F` over the window.
pub fn plane_maxima(field: &CurvatureField) -> HashMap<Plane, f64> {
    let mut out: HashMap<Plane, f64> = Plane::ALL.iter().map(|&p| (p, 0.0)).collect();
    for k in field.window().sites() {
        for p in Plane::ALL {
            let e = out.get_mut(&p).expect("all planes");
            *e = e.max(field.get(k, p).frobenius_norm());
        }
    }
    out
}

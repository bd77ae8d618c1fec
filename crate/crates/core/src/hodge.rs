//! Discrete Hodge star on 2-cochains.
//!
//! The star is a signed permutation of planes combined with a pair shift.
//! On basis elements it acts as `∗ε_src^k = s · ε_tgt^{τ_src k}`; on
//! components this reads `(∗F)^{tgt}_k = s · F^{src}_{σ_src k}`. The Lorentz
//! signs of the Minkowski table flip for the source planes containing the time
//! axis 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, CurvatureField};
use crate::lattice::{Direction, LatticeIndex, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclid,
    Mink,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Euclid => "euclid",
            Metric::Mink => "mink",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclid" => Ok(Metric::Euclid),
            "mink" => Ok(Metric::Mink),
            other => Err(format!("unknown metric '{other}' (expected euclid or mink)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEntry {
    pub source: Plane,
    pub target: Plane,
    pub sign: f64,
}

/// The star as a table over the six planes, ordered by target plane.
#[derive(Debug, Clone, PartialEq)]
pub struct StarTable {
    pub metric: Metric,
    pub entries: [StarEntry; 6],
}

impl StarTable {
    pub fn new(metric: Metric) -> Self {
        let signs = match metric {
            Metric::Euclid => [1.0, -1.0, 1.0, 1.0, -1.0, 1.0],
            Metric::Mink => [1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        };
        let entries = std::array::from_fn(|n| {
            let target = Plane::ALL[n];
            StarEntry { source: target.complement(), target, sign: signs[n] }
        });
        Self { metric, entries }
    }

    /// Entry whose source plane is `source`.
    pub fn from_source(&self, source: Plane) -> StarEntry {
        *self.entries.iter().find(|e| e.source == source).expect("table is a bijection")
    }

    /// Entry whose target plane is `target`.
    pub fn to_target(&self, target: Plane) -> StarEntry {
        self.entries[target.offset()]
    }

    /// Basis action `∗ε_plane^k = sign · ε_target^{site}`.
    pub fn act_on_basis(&self, k: LatticeIndex, plane: Plane) -> (f64, Plane, LatticeIndex) {
        let e = self.from_source(plane);
        (e.sign, e.target, k.shift_plane(plane, Direction::Up))
    }
}

/// `∗F` in component form.
pub fn star(field: &CurvatureField, metric: Metric) -> CurvatureField {
    let table = StarTable::new(metric);
    CurvatureField::from_fn(field.window(), field.algebra(), |k, target| {
        let e = table.to_target(target);
        field.get(k.shift_plane(e.source, Direction::Down), e.source).scale(e.sign)
    })
}

/// `∗F` assembled from the basis action: every source slot is pushed forward
/// onto its target basis element. Agrees with [`star`] on periodic windows.
pub fn star_via_basis(field: &CurvatureField, metric: Metric) -> CurvatureField {
    let table = StarTable::new(metric);
    let window = field.window();
    let mut out = CurvatureField::zero(window, field.algebra());
    for k in window.sites() {
        for plane in Plane::ALL {
            let (sign, target, site) = table.act_on_basis(k, plane);
            if window.wrap(site).is_some() {
                let v = out.get(site, target) + field.get(k, plane).scale(sign);
                out.set(site, target, v);
            }
        }
    }
    out
}

/// `∗∗F`.
pub fn double_star(field: &CurvatureField, metric: Metric) -> CurvatureField {
    star(&star(field, metric), metric)
}

/// Adjoint of [`star`] with respect to the slotwise Frobenius inner product:
/// `(∗ᵀR)^{src}_m = sign · R^{tgt}_{τ_src m}`.
pub(crate) fn star_adjoint(field: &CurvatureField, metric: Metric) -> CurvatureField {
    let table = StarTable::new(metric);
    CurvatureField::from_fn(field.window(), field.algebra(), |m, source| {
        let e = table.from_source(source);
        field.get(m.shift_plane(source, Direction::Up), e.target).scale(e.sign)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_algebra, AlgebraElement, AlgebraKind};
    use crate::lattice::{Axis, Window};

    fn m() -> AlgebraElement {
        random_algebra(3, AlgebraKind::Sl2c, 1.0)
    }

    #[test]
    fn table_signs() {
        let e = StarTable::new(Metric::Euclid);
        let sources: Vec<_> = e.entries.iter().map(|x| x.source.to_string()).collect();
        assert_eq!(sources, ["34", "24", "23", "14", "13", "12"]);
        let signs: Vec<_> = e.entries.iter().map(|x| x.sign).collect();
        assert_eq!(signs, [1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
        let mk = StarTable::new(Metric::Mink);
        let signs: Vec<_> = mk.entries.iter().map(|x| x.sign).collect();
        assert_eq!(signs, [1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn basis_action_matches_written_table() {
        let t = StarTable::new(Metric::Euclid);
        let k = LatticeIndex::new(1, 2, 3, 4);
        assert_eq!(t.act_on_basis(k, Plane::P12), (1.0, Plane::P34, LatticeIndex::new(2, 3, 3, 4)));
        assert_eq!(t.act_on_basis(k, Plane::P13), (-1.0, Plane::P24, LatticeIndex::new(2, 2, 4, 4)));
        assert_eq!(t.act_on_basis(k, Plane::P24), (-1.0, Plane::P13, LatticeIndex::new(1, 3, 3, 5)));
    }

    #[test]
    fn constant_34_maps_to_12() {
        let w = Window::periodic(3);
        let f =
            CurvatureField::from_fn(
                w,
                AlgebraKind::Gl2,
                |_, p| if p == Plane::P34 { m() } else { AlgebraElement::zero() },
            );
        let s = star(&f, Metric::Euclid);
        for k in w.sites() {
            assert_eq!(s.get(k, Plane::P12), m());
            for p in &Plane::ALL[1..] {
                assert_eq!(s.get(k, *p), AlgebraElement::zero());
            }
        }
    }

    #[test]
    fn impulse_24_lands_on_13_with_minus_sign() {
        let w = Window::periodic(4);
        let k0 = LatticeIndex::new(1, 1, 2, 0);
        let s = star(&CurvatureField::impulse(w, AlgebraKind::Gl2, k0, Plane::P24, m()), Metric::Euclid);
        let dest = k0.shift_plane(Plane::P24, Direction::Up);
        assert_eq!(s.get(dest, Plane::P13), -m());
        assert!((s.norm() - m().frobenius_norm()).abs() < 1e-15);
    }

    #[test]
    fn mink_impulse_14_lands_on_23_negated() {
        let w = Window::periodic(4);
        let k0 = LatticeIndex::new(3, 0, 1, 3);
        let s = star(&CurvatureField::impulse(w, AlgebraKind::Gl2, k0, Plane::P14, m()), Metric::Mink);
        let dest = w.wrap(k0.shift_pair(Axis::X1, Axis::X4, Direction::Up).unwrap()).unwrap();
        assert_eq!(s.get(dest, Plane::P23), -m());
    }

    #[test]
    fn basis_and_component_forms_agree() {
        let w = Window::periodic(3);
        for metric in [Metric::Euclid, Metric::Mink] {
            let f = CurvatureField::random(w, AlgebraKind::Sl2c, 17, 1.0);
            assert_eq!(star(&f, metric), star_via_basis(&f, metric));
        }
    }

    #[test]
    fn adjoint_is_inverse_on_periodic_windows() {
        let w = Window::periodic(3);
        let f = CurvatureField::random(w, AlgebraKind::Sl2c, 8, 1.0);
        for metric in [Metric::Euclid, Metric::Mink] {
            assert_eq!(star_adjoint(&star(&f, metric), metric), f);
        }
    }

    #[test]
    fn adjoint_satisfies_inner_product_identity() {
        let w = Window::zero(3);
        let f = CurvatureField::random(w, AlgebraKind::Sl2c, 1, 1.0);
        let g = CurvatureField::random(w, AlgebraKind::Sl2c, 2, 1.0);
        let ip = |a: &CurvatureField, b: &CurvatureField| -> num_complex::Complex64 {
            a.values().iter().zip(b.values()).map(|(x, y)| x.inner(y)).sum()
        };
        for metric in [Metric::Euclid, Metric::Mink] {
            let lhs = ip(&g, &star(&f, metric));
            let rhs = ip(&star_adjoint(&g, metric), &f);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn star_is_linear_and_norm_preserving() {
        let w = Window::periodic(3);
        let f = CurvatureField::random(w, AlgebraKind::Su2, 5, 1.0);
        let g = CurvatureField::random(w, AlgebraKind::Su2, 6, 1.0);
        let (a, b) = (2.0, -0.5);
        for metric in [Metric::Euclid, Metric::Mink] {
            let lhs = star(&f.scale(a).add(&g.scale(b)).unwrap(), metric);
            let rhs = star(&f, metric).scale(a).add(&star(&g, metric).scale(b)).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(star(&f, metric).norm(), f.norm());
        }
    }

    #[test]
    fn double_star_is_signed_diagonal_shift() {
        let w = Window::periodic(4);
        for seed in 0..5 {
            let f = CurvatureField::random(w, AlgebraKind::Sl2c, seed, 1.0);
            let shifted = f.diagonal_down_shift();
            assert_eq!(double_star(&f, Metric::Euclid), shifted);
            assert_eq!(double_star(&f, Metric::Mink), shifted.scale(-1.0));
        }
        let c = CurvatureField::from_fn(w, AlgebraKind::Sl2c, |_, p| {
            random_algebra(p.offset() as u64, AlgebraKind::Sl2c, 1.0)
        });
        assert_eq!(double_star(&c, Metric::Euclid), c);
    }
}

//! Matrix-valued 0-, 1- and 2-cochains over a [`Window`].
//!
//! Storage is dense: site-major in [`Window::sites`] order, then axis (rank 1)
//! or canonical plane (rank 2).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{sample_algebra, sample_group, AlgebraElement, AlgebraKind, GroupElement, C64};
use crate::error::{Error, Result};
use crate::lattice::{Axis, LatticeIndex, Plane, Window};

/// Shared arithmetic for the algebra-valued cochains.
pub trait Cochain: Sized + Clone {
    const RANK: usize;
    /// Matrix slots per site.
    const SLOTS: usize;

    fn window(&self) -> Window;
    fn algebra(&self) -> AlgebraKind;
    fn values(&self) -> &[AlgebraElement];
    fn values_mut(&mut self) -> &mut [AlgebraElement];
    fn with_values(window: Window, algebra: AlgebraKind, values: Vec<AlgebraElement>) -> Self;

    fn zip_with(&self, other: &Self, f: impl Fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement) -> Result<Self> {
        if self.window() != other.window() {
            return Err(Error::WindowMismatch { left: self.window(), right: other.window() });
        }
        let values = self.values().iter().zip(other.values()).map(|(a, b)| f(a, b)).collect();
        let algebra = if self.algebra() == other.algebra() { self.algebra() } else { AlgebraKind::Gl2 };
        Ok(Self::with_values(self.window(), algebra, values))
    }

    fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| *a + *b)
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| *a - *b)
    }

    fn scale(&self, s: f64) -> Self {
        let values = self.values().iter().map(|v| v.scale(s)).collect();
        Self::with_values(self.window(), self.algebra(), values)
    }

    fn scale_c(&self, s: C64) -> Self {
        let algebra = match self.algebra() {
            AlgebraKind::Su2 if s.im != 0.0 => AlgebraKind::Sl2c,
            other => other,
        };
        let values = self.values().iter().map(|v| v.scale_c(s)).collect();
        Self::with_values(self.window(), algebra, values)
    }

    /// `sqrt(Σ ‖slot‖²_F)` over all sites and slots.
    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Sum of squared slot norms, accumulated in ascending order so the
    /// result is independent of slot order.
    fn norm_sqr(&self) -> f64 {
        let mut parts: Vec<f64> = self.values().iter().map(AlgebraElement::norm_sqr).collect();
        parts.sort_by(f64::total_cmp);
        parts.iter().sum()
    }

    /// Largest entry-wise difference between two fields on the same window.
    fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.window() != other.window() {
            return Err(Error::WindowMismatch { left: self.window(), right: other.window() });
        }
        Ok(self.values().iter().zip(other.values()).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }

    fn max_abs(&self) -> f64 {
        self.values().iter().map(AlgebraElement::max_abs).fold(0.0, f64::max)
    }
}

macro_rules! cochain_impl {
    ($ty:ty, $rank:expr, $slots:expr) => {
        impl Cochain for $ty {
            const RANK: usize = $rank;
            const SLOTS: usize = $slots;

            fn window(&self) -> Window {
                self.window
            }
            fn algebra(&self) -> AlgebraKind {
                self.algebra
            }
            fn values(&self) -> &[AlgebraElement] {
                &self.values
            }
            fn values_mut(&mut self) -> &mut [AlgebraElement] {
                &mut self.values
            }
            fn with_values(window: Window, algebra: AlgebraKind, values: Vec<AlgebraElement>) -> Self {
                assert_eq!(values.len(), window.num_sites() * $slots);
                Self { window, algebra, values }
            }
        }
    };
}

/// Discrete connection `A = Σ_k Σ_i A_k^i e_i^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionField {
    window: Window,
    algebra: AlgebraKind,
    values: Vec<AlgebraElement>,
}

cochain_impl!(ConnectionField, 1, 4);

impl ConnectionField {
    pub fn zero(window: Window, algebra: AlgebraKind) -> Self {
        Self::with_values(window, algebra, vec![AlgebraElement::zero(); window.num_sites() * 4])
    }

    pub fn from_fn(
        window: Window,
        algebra: AlgebraKind,
        mut f: impl FnMut(LatticeIndex, Axis) -> AlgebraElement,
    ) -> Self {
        let mut values = Vec::with_capacity(window.num_sites() * 4);
        for k in window.sites() {
            values.extend(Axis::ALL.map(|i| f(k, i)));
        }
        Self::with_values(window, algebra, values)
    }

    /// The same four components at every site.
    pub fn constant(window: Window, algebra: AlgebraKind, components: [AlgebraElement; 4]) -> Self {
        Self::from_fn(window, algebra, |_, i| components[i.offset()])
    }

    /// Independent draws per slot in storage order; deterministic in `seed`.
    pub fn random(window: Window, algebra: AlgebraKind, seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(window, algebra, |_, _| sample_algebra(&mut rng, algebra, scale))
    }

    /// `A_k^i`, resolved through the boundary mode.
    pub fn get(&self, k: LatticeIndex, axis: Axis) -> AlgebraElement {
        match self.window.site_offset(k) {
            Some(o) => self.values[o * 4 + axis.offset()],
            None => AlgebraElement::zero(),
        }
    }

    /// Writes `A_k^i`; returns `false` for a zero-boundary site outside the window.
    pub fn set(&mut self, k: LatticeIndex, axis: Axis, value: AlgebraElement) -> bool {
        match self.window.site_offset(k) {
            Some(o) => {
                self.values[o * 4 + axis.offset()] = value;
                true
            }
            None => false,
        }
    }
}

/// Discrete curvature `F = Σ_k Σ_{i<j} F_k^{ij} ε_{ij}^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    window: Window,
    algebra: AlgebraKind,
    values: Vec<AlgebraElement>,
}

cochain_impl!(CurvatureField, 2, 6);

impl CurvatureField {
    pub fn zero(window: Window, algebra: AlgebraKind) -> Self {
        Self::with_values(window, algebra, vec![AlgebraElement::zero(); window.num_sites() * 6])
    }

    pub fn from_fn(
        window: Window,
        algebra: AlgebraKind,
        mut f: impl FnMut(LatticeIndex, Plane) -> AlgebraElement,
    ) -> Self {
        let mut values = Vec::with_capacity(window.num_sites() * 6);
        for k in window.sites() {
            values.extend(Plane::ALL.map(|p| f(k, p)));
        }
        Self::with_values(window, algebra, values)
    }

    pub fn random(window: Window, algebra: AlgebraKind, seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(window, algebra, |_, _| sample_algebra(&mut rng, algebra, scale))
    }

    /// A single nonzero slot `value` at `(site, plane)`.
    pub fn impulse(
        window: Window,
        algebra: AlgebraKind,
        site: LatticeIndex,
        plane: Plane,
        value: AlgebraElement,
    ) -> Self {
        let mut f = Self::zero(window, algebra);
        f.set(site, plane, value);
        f
    }

    /// `F_k^{ij}` for `i < j`, resolved through the boundary mode.
    pub fn get(&self, k: LatticeIndex, plane: Plane) -> AlgebraElement {
        match self.window.site_offset(k) {
            Some(o) => self.values[o * 6 + plane.offset()],
            None => AlgebraElement::zero(),
        }
    }

    /// `F_k^{ij}` for any ordered axis pair: `F^{ji} = -F^{ij}` and `F^{ii} = 0`.
    pub fn component(&self, k: LatticeIndex, i: Axis, j: Axis) -> AlgebraElement {
        match Plane::from_axes(i, j) {
            Ok((plane, sign)) => self.get(k, plane).scale(sign),
            Err(_) => AlgebraElement::zero(),
        }
    }

    pub fn set(&mut self, k: LatticeIndex, plane: Plane, value: AlgebraElement) -> bool {
        match self.window.site_offset(k) {
            Some(o) => {
                self.values[o * 6 + plane.offset()] = value;
                true
            }
            None => false,
        }
    }

    /// `(SF)_k = F_{σk}`: the field read one diagonal step down.
    pub fn diagonal_down_shift(&self) -> Self {
        use crate::lattice::Direction;
        Self::from_fn(self.window, self.algebra, |k, p| self.get(k.shift_diag(Direction::Down), p))
    }
}

/// Group-valued 0-cochain `g = Σ_k g_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    window: Window,
    group: AlgebraKind,
    values: Vec<GroupElement>,
}

impl GaugeField {
    pub fn from_fn(window: Window, group: AlgebraKind, f: impl FnMut(LatticeIndex) -> GroupElement) -> Self {
        let values = window.sites().map(f).collect();
        Self { window, group, values }
    }

    pub fn from_values(window: Window, group: AlgebraKind, values: Vec<GroupElement>) -> Result<Self> {
        if values.len() != window.num_sites() {
            return Err(Error::SliceLength { expected: window.num_sites(), found: values.len() });
        }
        Ok(Self { window, group, values })
    }

    pub fn identity(window: Window, group: AlgebraKind) -> Self {
        Self::constant(window, group, GroupElement::identity())
    }

    pub fn constant(window: Window, group: AlgebraKind, g: GroupElement) -> Self {
        Self::from_fn(window, group, |_| g)
    }

    /// `g_k = exp(X_k)` with independent algebra draws per site.
    pub fn random(window: Window, group: AlgebraKind, seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(window, group, |_| sample_group(&mut rng, group, scale))
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn group(&self) -> AlgebraKind {
        self.group
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    /// `g_k`, or `None` for a zero-boundary site outside the window.
    pub fn get(&self, k: LatticeIndex) -> Option<GroupElement> {
        self.window.site_offset(k).map(|o| self.values[o])
    }

    pub fn set(&mut self, k: LatticeIndex, g: GroupElement) -> bool {
        match self.window.site_offset(k) {
            Some(o) => {
                self.values[o] = g;
                true
            }
            None => false,
        }
    }
}

/// `Δ_{k_i} A_k^j = A_{τ_i k}^j - A_k^j`.
pub fn delta(field: &ConnectionField, diff_axis: Axis, comp_axis: Axis, k: LatticeIndex) -> AlgebraElement {
    field.get(k.shift_up(diff_axis), comp_axis) - field.get(k, comp_axis)
}

/// A cochain of any rank, as stored in field files.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Gauge(GaugeField),
    Connection(ConnectionField),
    Curvature(CurvatureField),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldOp {
    Add,
    Sub,
    Scale(f64),
}

impl Field {
    pub fn rank(&self) -> usize {
        match self {
            Field::Gauge(_) => 0,
            Field::Connection(_) => 1,
            Field::Curvature(_) => 2,
        }
    }

    pub fn window(&self) -> Window {
        match self {
            Field::Gauge(g) => g.window(),
            Field::Connection(a) => a.window(),
            Field::Curvature(f) => f.window(),
        }
    }

    pub fn algebra(&self) -> AlgebraKind {
        match self {
            Field::Gauge(g) => g.group(),
            Field::Connection(a) => a.algebra(),
            Field::Curvature(f) => f.algebra(),
        }
    }
}

/// Slotwise arithmetic on two fields of equal rank and window.
///
/// `Scale` ignores `b` beyond the rank and window checks. Group-valued fields
/// are not a linear space and are rejected.
pub fn field_algebra(a: &Field, b: &Field, op: FieldOp) -> Result<Field> {
    if a.rank() != b.rank() || a.rank() == 0 {
        return Err(Error::RankMismatch { left: a.rank(), right: b.rank() });
    }
    if a.window() != b.window() {
        return Err(Error::WindowMismatch { left: a.window(), right: b.window() });
    }
    fn apply<T: Cochain>(x: &T, y: &T, op: FieldOp) -> Result<T> {
        match op {
            FieldOp::Add => x.add(y),
            FieldOp::Sub => x.sub(y),
            FieldOp::Scale(c) => Ok(x.scale(c)),
        }
    }
    match (a, b) {
        (Field::Connection(x), Field::Connection(y)) => apply(x, y, op).map(Field::Connection),
        (Field::Curvature(x), Field::Curvature(y)) => apply(x, y, op).map(Field::Curvature),
        _ => unreachable!("ranks checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::basis;
    use crate::lattice::{Boundary, Direction};

    fn l(a: usize) -> AlgebraElement {
        basis(a).unwrap()
    }

    #[test]
    fn delta_of_constant_field_vanishes() {
        let w = Window::periodic(3);
        let a = ConnectionField::constant(w, AlgebraKind::Su2, [l(1), l(2), l(3), l(1)]);
        for k in w.sites() {
            for i in Axis::ALL {
                for j in Axis::ALL {
                    assert_eq!(delta(&a, i, j, k), AlgebraElement::zero());
                }
            }
        }
    }

    #[test]
    fn delta_of_linear_ramp() {
        let w = Window::zero(4);
        let a = ConnectionField::from_fn(w, AlgebraKind::Su2, |k, i| {
            if i == Axis::X1 {
                l(1).scale(k.0[0] as f64)
            } else {
                AlgebraElement::zero()
            }
        });
        let interior = LatticeIndex::new(1, 2, 1, 1);
        assert_eq!(delta(&a, Axis::X1, Axis::X1, interior), l(1));
        // Last site reads zero beyond the window.
        let edge = LatticeIndex::new(3, 0, 0, 0);
        assert_eq!(delta(&a, Axis::X1, Axis::X1, edge), -l(1).scale(3.0));
    }

    #[test]
    fn delta_wraps_on_two_site_axis() {
        let w = Window::new([2, 1, 1, 1], Boundary::Periodic);
        let (x, y) = (l(1), l(3));
        let a = ConnectionField::from_fn(w, AlgebraKind::Su2, |k, _| if k.0[0] == 0 { x } else { y });
        assert_eq!(delta(&a, Axis::X1, Axis::X2, LatticeIndex::ORIGIN), y - x);
        assert_eq!(delta(&a, Axis::X1, Axis::X2, LatticeIndex::new(1, 0, 0, 0)), x - y);
    }

    #[test]
    fn delta_commutes_with_diagonal_shift() {
        let w = Window::periodic(3);
        let a = ConnectionField::random(w, AlgebraKind::Su2, 9, 1.0);
        let shifted = ConnectionField::from_fn(w, AlgebraKind::Su2, |k, i| a.get(k.shift_diag(Direction::Down), i));
        for k in w.sites() {
            for i in Axis::ALL {
                for j in Axis::ALL {
                    let lhs = delta(&a, i, j, k.shift_diag(Direction::Down));
                    assert_eq!(lhs, delta(&shifted, i, j, k));
                }
            }
        }
    }

    #[test]
    fn field_norms() {
        let w = Window::periodic(2);
        let zero = CurvatureField::zero(w, AlgebraKind::Su2);
        assert_eq!(zero.norm(), 0.0);
        let mut f = CurvatureField::impulse(w, AlgebraKind::Su2, LatticeIndex::ORIGIN, Plane::P12, l(3));
        assert!((f.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        f.set(LatticeIndex::new(1, 1, 0, 0), Plane::P34, l(3));
        assert!((f.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derived_antisymmetric_accessor() {
        let w = Window::periodic(2);
        let f = CurvatureField::random(w, AlgebraKind::Sl2c, 2, 1.0);
        let k = LatticeIndex::new(1, 0, 1, 0);
        assert_eq!(f.component(k, Axis::X4, Axis::X2), -f.get(k, Plane::P24));
        assert_eq!(f.component(k, Axis::X2, Axis::X4), f.get(k, Plane::P24));
        assert_eq!(f.component(k, Axis::X3, Axis::X3), AlgebraElement::zero());
    }

    #[test]
    fn field_algebra_ops_and_errors() {
        let w = Window::periodic(2);
        let f = Field::Curvature(CurvatureField::random(w, AlgebraKind::Su2, 1, 1.0));
        let g = Field::Curvature(CurvatureField::random(w, AlgebraKind::Su2, 2, 1.0));
        let Field::Curvature(diff) = field_algebra(&f, &f, FieldOp::Sub).unwrap() else { panic!() };
        assert_eq!(diff.norm(), 0.0);
        assert_eq!(field_algebra(&f, &f, FieldOp::Scale(1.0)).unwrap(), f);
        let (Field::Curvature(fc), Field::Curvature(gc)) = (&f, &g) else { panic!() };
        let Field::Curvature(sum) = field_algebra(&f, &g, FieldOp::Add).unwrap() else { panic!() };
        for (o, s) in sum.values().iter().enumerate() {
            assert_eq!(*s, fc.values()[o] + gc.values()[o]);
        }

        let a = Field::Connection(ConnectionField::zero(w, AlgebraKind::Su2));
        assert_eq!(field_algebra(&f, &a, FieldOp::Add), Err(Error::RankMismatch { left: 2, right: 1 }));
        let other = Field::Curvature(CurvatureField::zero(Window::periodic(3), AlgebraKind::Su2));
        assert!(matches!(field_algebra(&f, &other, FieldOp::Add), Err(Error::WindowMismatch { .. })));
        let gauge = Field::Gauge(GaugeField::identity(w, AlgebraKind::Su2));
        assert!(field_algebra(&gauge, &gauge, FieldOp::Add).is_err());
    }

    #[test]
    fn random_fields_are_seeded() {
        let w = Window::periodic(2);
        assert_eq!(
            ConnectionField::random(w, AlgebraKind::Sl2c, 4, 0.3),
            ConnectionField::random(w, AlgebraKind::Sl2c, 4, 0.3)
        );
        assert_ne!(
            ConnectionField::random(w, AlgebraKind::Sl2c, 4, 0.3),
            ConnectionField::random(w, AlgebraKind::Sl2c, 5, 0.3)
        );
        let g = GaugeField::random(w, AlgebraKind::Su2, 3, 1.0);
        assert!(g.values().iter().all(|x| x.is_member(AlgebraKind::Su2, 1e-12)));
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        proptest! {
            #[test]
            fn add_is_commutative_and_sub_is_add_negated(s1 in 0u64..1000, s2 in 0u64..1000) {
                let w = Window::periodic(2);
                let a = CurvatureField::random(w, AlgebraKind::Sl2c, s1, 1.0);
                let b = CurvatureField::random(w, AlgebraKind::Sl2c, s2, 1.0);
                prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
                prop_assert_eq!(a.sub(&b).unwrap(), a.add(&b.scale(-1.0)).unwrap());
            }
        }
    }
}

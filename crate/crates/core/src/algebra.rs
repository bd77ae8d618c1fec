//! 2×2 complex matrix arithmetic for su(2), sl(2,C) and their groups.
//!
//! Connection values live in su(2) (Euclidean) or sl(2,C) (Minkowski).
//! Curvature values are kept as general 2×2 matrices: the quadratic terms of
//! the lattice curvature produce identity components that leave the algebra.
//!
//! The basis is `λ_a = -(i/2) σ_a` with σ_a the Pauli matrices, so that
//! `[λ_a, λ_b] = ε_abc λ_c`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance on matrix entries used by membership predicates.
pub const ENTRY_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Which matrix set a field's values are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    /// Traceless anti-Hermitian; group SU(2).
    Su2,
    /// Traceless complex; group SL(2,C).
    Sl2c,
    /// Unconstrained 2×2 complex matrices (pure-gauge connections, curvatures).
    Gl2,
}

impl AlgebraKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraKind::Su2 => "su2",
            AlgebraKind::Sl2c => "sl2c",
            AlgebraKind::Gl2 => "gl2",
        }
    }

    /// Real coordinate basis of the algebra, used by the solver.
    ///
    /// su(2): λ₁..λ₃. sl(2,C): λ₁..λ₃ then iλ₁..iλ₃. gl(2,C): the eight
    /// real and imaginary elementary matrices.
    pub fn coordinate_basis(self) -> Vec<AlgebraElement> {
        let lambdas = [lambda(1), lambda(2), lambda(3)];
        match self {
            AlgebraKind::Su2 => lambdas.to_vec(),
            AlgebraKind::Sl2c => lambdas.iter().copied().chain(lambdas.iter().map(|l| l.scale_c(I))).collect(),
            AlgebraKind::Gl2 => {
                let mut out = Vec::with_capacity(8);
                for unit in [ONE, I] {
                    for r in 0..2 {
                        for c in 0..2 {
                            let mut m = AlgebraElement::zero();
                            m.entries[r][c] = unit;
                            out.push(m);
                        }
                    }
                }
                out
            }
        }
    }

    /// Whether `x` belongs to this set within `tol`.
    pub fn contains(self, x: &AlgebraElement, tol: f64) -> bool {
        match self {
            AlgebraKind::Su2 => x.is_su2(tol),
            AlgebraKind::Sl2c => x.is_sl2c(tol),
            AlgebraKind::Gl2 => true,
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlgebraKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "su2" => Ok(AlgebraKind::Su2),
            "sl2c" => Ok(AlgebraKind::Sl2c),
            "gl2" => Ok(AlgebraKind::Gl2),
            other => Err(format!("unknown algebra '{other}' (expected su2, sl2c or gl2)")),
        }
    }
}

/// A 2×2 complex matrix.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct AlgebraElement {
    pub entries: [[C64; 2]; 2],
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    }
}

fn lambda(a: usize) -> AlgebraElement {
    let h = 0.5;
    match a {
        // -(i/2) σ₁
        1 => AlgebraElement::new([[ZERO, C64::new(0.0, -h)], [C64::new(0.0, -h), ZERO]]),
        // -(i/2) σ₂
        2 => AlgebraElement::new([[ZERO, C64::new(-h, 0.0)], [C64::new(h, 0.0), ZERO]]),
        // -(i/2) σ₃
        3 => AlgebraElement::new([[C64::new(0.0, -h), ZERO], [ZERO, C64::new(0.0, h)]]),
        _ => unreachable!(),
    }
}

/// The su(2) basis element `λ_a = -(i/2) σ_a`, `a ∈ {1, 2, 3}`.
pub fn basis(a: usize) -> Result<AlgebraElement> {
    if (1..=3).contains(&a) {
        Ok(lambda(a))
    } else {
        Err(Error::InvalidBasisIndex(a))
    }
}

/// `XY - YX`.
pub fn commutator(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    *x * *y - *y * *x
}

impl AlgebraElement {
    pub const fn new(entries: [[C64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub const fn zero() -> Self {
        Self { entries: [[ZERO, ZERO], [ZERO, ZERO]] }
    }

    pub const fn identity() -> Self {
        Self { entries: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// Builds `Σ c_a λ_a` from real coefficients.
    pub fn from_su2_coeffs(c: [f64; 3]) -> Self {
        lambda(1).scale(c[0]) + lambda(2).scale(c[1]) + lambda(3).scale(c[2])
    }

    /// Builds `Σ c_a λ_a` from complex coefficients.
    pub fn from_sl2c_coeffs(c: [C64; 3]) -> Self {
        lambda(1).scale_c(c[0]) + lambda(2).scale_c(c[1]) + lambda(3).scale_c(c[2])
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> C64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::new([[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let e = &self.entries;
        Self::new([[f(e[0][0]), f(e[0][1])], [f(e[1][0]), f(e[1][1])]])
    }

    fn iter(&self) -> impl Iterator<Item = &C64> {
        self.entries.iter().flatten()
    }

    /// Frobenius inner product `trace(X† Y)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.iter().zip(other.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_su2(&self, tol: f64) -> bool {
        (*self + self.adjoint()).max_abs() <= tol && self.trace().norm() <= tol
    }

    pub fn is_sl2c(&self, tol: f64) -> bool {
        self.trace().norm() <= tol
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> [[f64; 2]; 4] {
        let e = &self.entries;
        [e[0][0], e[0][1], e[1][0], e[1][1]].map(|z| [z.re, z.im])
    }

    pub fn from_pairs(p: [[f64; 2]; 4]) -> Self {
        let z = p.map(|[re, im]| C64::new(re, im));
        Self::new([[z[0], z[1]], [z[2], z[3]]])
    }

    /// Matrix exponential, exact for traceless input up to roundoff.
    ///
    /// For traceless `X`, `X² = -det(X)·I`, hence
    /// `exp(X) = cosh(s)·I + sinh(s)/s·X` with `s² = -det(X)`.
    /// A trace part is split off as the scalar factor `exp(tr/2)`.
    pub fn exp(&self) -> Self {
        let half_tr = self.trace() * 0.5;
        let x = *self - Self::identity().scale_c(half_tr);
        let s = (-x.det()).sqrt();
        let (c, sinc) = if s.norm() < 1e-4 {
            let s2 = s * s;
            (ONE + s2 / 2.0 + s2 * s2 / 24.0, ONE + s2 / 6.0 + s2 * s2 / 120.0)
        } else {
            (s.cosh(), s.sinh() / s)
        };
        (Self::identity().scale_c(c) + x.scale_c(sinc)).scale_c(half_tr.exp())
    }
}

impl Add for AlgebraElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for AlgebraElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl Neg for AlgebraElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for AlgebraElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::new([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl AddAssign for AlgebraElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for AlgebraElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for AlgebraElement {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

/// Draws an algebra element from `rng`.
///
/// su2: `Σ c_a λ_a`, `c_a ~ U[-scale, scale]`. sl2c: the same with independent
/// uniform real and imaginary parts. gl2: every entry's real and imaginary
/// part uniform in `[-scale, scale]`.
pub fn sample_algebra<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind, scale: f64) -> AlgebraElement {
    let mut u = || rng.gen_range(-scale..=scale);
    match kind {
        AlgebraKind::Su2 => AlgebraElement::from_su2_coeffs([u(), u(), u()]),
        AlgebraKind::Sl2c => {
            let c = [C64::new(u(), u()), C64::new(u(), u()), C64::new(u(), u())];
            AlgebraElement::from_sl2c_coeffs(c)
        }
        AlgebraKind::Gl2 => {
            let mut m = AlgebraElement::zero();
            for z in m.entries.iter_mut().flatten() {
                *z = C64::new(u(), u());
            }
            m
        }
    }
}

/// Deterministic single draw seeded by `seed`.
pub fn random_algebra(seed: u64, kind: AlgebraKind, scale: f64) -> AlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_algebra(&mut rng, kind, scale)
}

/// An invertible 2×2 complex matrix, element of SU(2) or SL(2,C).
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct GroupElement(AlgebraElement);

impl GroupElement {
    pub fn identity() -> Self {
        Self(AlgebraElement::identity())
    }

    /// Wraps a matrix without checking group membership.
    pub fn from_matrix(m: AlgebraElement) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &AlgebraElement {
        &self.0
    }

    pub fn det(&self) -> C64 {
        self.0.det()
    }

    /// `exp(X)` rescaled so that `det = 1`.
    pub fn exp(x: &AlgebraElement) -> Self {
        let m = x.exp();
        let root = m.det().sqrt();
        Self(m.scale_c(root.inv()))
    }

    /// Inverse via the adjugate; `None` when `|det| ≤ 1e-300`.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() <= 1e-300 {
            return None;
        }
        let e = &self.0.entries;
        let adj = AlgebraElement::new([[e[1][1], -e[0][1]], [-e[1][0], e[0][0]]]);
        Some(Self(adj.scale_c(det.inv())))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.0.adjoint() * self.0).max_abs_diff(&AlgebraElement::identity()) <= tol
    }

    pub fn is_member(&self, kind: AlgebraKind, tol: f64) -> bool {
        let unit_det = (self.det() - ONE).norm() <= tol;
        match kind {
            AlgebraKind::Su2 => unit_det && self.is_unitary(tol),
            AlgebraKind::Sl2c => unit_det,
            AlgebraKind::Gl2 => self.det().norm() > 0.0,
        }
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// Draws `exp(X)` with `X` from [`sample_algebra`]; `Gl2` falls back to `Sl2c`.
pub fn sample_group<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind, scale: f64) -> GroupElement {
    let kind = if kind == AlgebraKind::Gl2 { AlgebraKind::Sl2c } else { kind };
    GroupElement::exp(&sample_algebra(rng, kind, scale))
}

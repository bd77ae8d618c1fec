//! Multi-indices on Z⁴, the unit shift operators and finite windows.
//!
//! `τ_i` raises component `i` by one, `σ_i` lowers it, `τ_ij`/`σ_ij` move two
//! distinct components at once and `σk` lowers all four. Axes are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four lattice directions, stored 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Axis(u8);

impl Axis {
    pub const X1: Axis = Axis(1);
    pub const X2: Axis = Axis(2);
    pub const X3: Axis = Axis(3);
    pub const X4: Axis = Axis(4);
    pub const ALL: [Axis; 4] = [Axis::X1, Axis::X2, Axis::X3, Axis::X4];

    pub fn new(i: usize) -> Result<Self> {
        match i {
            1..=4 => Ok(Axis(i as u8)),
            _ => Err(Error::InvalidAxis(i)),
        }
    }

    /// 1-based number.
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// 0-based offset into per-site storage.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A coordinate plane `(i, j)` with `i < j`, in canonical order 12, 13, 14, 23, 24, 34.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Plane {
    P12,
    P13,
    P14,
    P23,
    P24,
    P34,
}

impl Plane {
    pub const ALL: [Plane; 6] = [Plane::P12, Plane::P13, Plane::P14, Plane::P23, Plane::P24, Plane::P34];

    pub fn axes(self) -> (Axis, Axis) {
        match self {
            Plane::P12 => (Axis::X1, Axis::X2),
            Plane::P13 => (Axis::X1, Axis::X3),
            Plane::P14 => (Axis::X1, Axis::X4),
            Plane::P23 => (Axis::X2, Axis::X3),
            Plane::P24 => (Axis::X2, Axis::X4),
            Plane::P34 => (Axis::X3, Axis::X4),
        }
    }

    pub fn offset(self) -> usize {
        self as usize
    }

    /// The plane spanned by `i` and `j` and the orientation sign (+1 when `i < j`).
    pub fn from_axes(i: Axis, j: Axis) -> Result<(Plane, f64)> {
        let (lo, hi, sign) = match i.cmp(&j) {
            std::cmp::Ordering::Less => (i, j, 1.0),
            std::cmp::Ordering::Greater => (j, i, -1.0),
            std::cmp::Ordering::Equal => return Err(Error::DegeneratePlane(i.get())),
        };
        let plane = Plane::ALL.into_iter().find(|p| p.axes() == (lo, hi)).expect("six planes");
        Ok((plane, sign))
    }

    /// The complementary plane, e.g. 12 ↔ 34.
    pub fn complement(self) -> Plane {
        match self {
            Plane::P12 => Plane::P34,
            Plane::P13 => Plane::P24,
            Plane::P14 => Plane::P23,
            Plane::P23 => Plane::P14,
            Plane::P24 => Plane::P13,
            Plane::P34 => Plane::P12,
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.axes();
        write!(f, "{i}{j}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn step(self) -> i64 {
        match self {
            Direction::Up => 1,
            Direction::Down => -1,
        }
    }
}

/// A site `k = (k₁, k₂, k₃, k₄)` of Z⁴.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeIndex(pub [i64; 4]);

impl LatticeIndex {
    pub const ORIGIN: LatticeIndex = LatticeIndex([0; 4]);

    pub fn new(k1: i64, k2: i64, k3: i64, k4: i64) -> Self {
        Self([k1, k2, k3, k4])
    }

    pub fn component(&self, axis: Axis) -> i64 {
        self.0[axis.offset()]
    }

    fn moved(mut self, axis: Axis, step: i64) -> Self {
        self.0[axis.offset()] += step;
        self
    }

    /// `τ_i k`.
    pub fn shift_up(self, axis: Axis) -> Self {
        self.moved(axis, 1)
    }

    /// `σ_i k`.
    pub fn shift_down(self, axis: Axis) -> Self {
        self.moved(axis, -1)
    }

    /// `τ_ij k` or `σ_ij k`.
    pub fn shift_pair(self, i: Axis, j: Axis, dir: Direction) -> Result<Self> {
        if i == j {
            return Err(Error::DegeneratePlane(i.get()));
        }
        Ok(self.moved(i, dir.step()).moved(j, dir.step()))
    }

    /// `τ_ij k` / `σ_ij k` for the axes of `plane`.
    pub fn shift_plane(self, plane: Plane, dir: Direction) -> Self {
        let (i, j) = plane.axes();
        self.moved(i, dir.step()).moved(j, dir.step())
    }

    /// All four components shifted one step (`σk` for `Down`).
    pub fn shift_diag(self, dir: Direction) -> Self {
        Self(self.0.map(|c| c + dir.step()))
    }

    /// `max_i |k_i|`.
    pub fn max_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = &self.0;
        write!(f, "({},{},{},{})", k[0], k[1], k[2], k[3])
    }
}

/// How reads outside `[0, N_i)` are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Indices wrap modulo the window size.
    #[default]
    Periodic,
    /// Reads outside the window see the zero element.
    Zero,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Zero => "zero",
        }
    }
}

impl FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "zero" => Ok(Boundary::Zero),
            other => Err(format!("unknown boundary '{other}' (expected periodic or zero)")),
        }
    }
}

/// A finite box `[0,N₁)×…×[0,N₄)` of Z⁴.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    dims: [usize; 4],
    boundary: Boundary,
}

impl Window {
    /// Panics if any extent is zero.
    pub fn new(dims: [usize; 4], boundary: Boundary) -> Self {
        assert!(dims.iter().all(|&n| n > 0), "window extents must be positive: {dims:?}");
        Self { dims, boundary }
    }

    pub fn periodic(n: usize) -> Self {
        Self::new([n; 4], Boundary::Periodic)
    }

    pub fn zero(n: usize) -> Self {
        Self::new([n; 4], Boundary::Zero)
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn num_sites(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, k: LatticeIndex) -> bool {
        k.0.iter().zip(self.dims).all(|(&c, n)| c >= 0 && (c as usize) < n)
    }

    /// Resolves `k` into the window; `None` marks a zero-boundary read outside it.
    pub fn wrap(&self, k: LatticeIndex) -> Option<LatticeIndex> {
        match self.boundary {
            Boundary::Periodic => {
                let mut out = k;
                for (c, n) in out.0.iter_mut().zip(self.dims) {
                    let n = n as i64;
                    if *c < 0 || *c >= n {
                        *c = c.rem_euclid(n);
                    }
                }
                Some(out)
            }
            Boundary::Zero => self.contains(k).then_some(k),
        }
    }

    /// Row-major storage offset of a resolved site, `k₁` slowest.
    pub fn site_offset(&self, k: LatticeIndex) -> Option<usize> {
        let k = self.wrap(k)?;
        Some(k.0.iter().zip(self.dims).fold(0, |acc, (&c, n)| acc * n + c as usize))
    }

    pub fn site_at(&self, mut offset: usize) -> LatticeIndex {
        let mut k = [0i64; 4];
        for (c, n) in k.iter_mut().zip(self.dims).rev() {
            *c = (offset % n) as i64;
            offset /= n;
        }
        LatticeIndex(k)
    }

    /// All sites in storage order.
    pub fn sites(&self) -> impl Iterator<Item = LatticeIndex> + '_ {
        (0..self.num_sites()).map(move |o| self.site_at(o))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.dims;
        write!(f, "{},{},{},{} {}", d[0], d[1], d[2], d[3], self.boundary.as_str())
    }
}

/// Parses `"N1,N2,N3,N4"`.
pub fn parse_dims(s: &str) -> std::result::Result<[usize; 4], String> {
    let parts: Vec<_> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated extents, got '{s}'"));
    }
    let mut dims = [0usize; 4];
    for (d, p) in dims.iter_mut().zip(parts) {
        *d = p.parse().map_err(|_| format!("invalid extent '{p}'"))?;
        if *d == 0 {
            return Err("extents must be positive".into());
        }
    }
    Ok(dims)
}

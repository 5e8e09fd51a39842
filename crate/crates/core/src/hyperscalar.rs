//! Hyperbolic and bicomplex scalars.
//!
//! Both types are stored in idempotent coordinates: a hyperbolic number is
//! `a1·e1 + a2·e2` with real `a1, a2`, a bicomplex number is `z1·e1 + z2·e2`
//! with complex `z1, z2`, where `e1 = (1+k)/2` and `e2 = (1-k)/2`. In these
//! coordinates products, inverses and the k-norm all act componentwise.
//! Cartesian views (`β1 + kβ2`, `w1 + j·w2`, `a + bi + cj + dk`) are
//! conversions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this modulus an idempotent component is treated as zero when inverting.
pub const ZERO_DIVISOR_TOL: f64 = 1e-300;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

fn check_finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_finite_c(z: Complex64, what: &'static str) -> Result<Complex64> {
    check_finite(z.re, what)?;
    check_finite(z.im, what)?;
    Ok(z)
}

/// Relation between two hyperbolic numbers under the cone order
/// `α ≤ β ⟺ β − α ∈ D+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderRel {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// A hyperbolic number `a1·e1 + a2·e2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Hyperbolic {
    a1: f64,
    a2: f64,
}

impl Hyperbolic {
    pub const ZERO: Hyperbolic = Hyperbolic { a1: 0.0, a2: 0.0 };
    pub const ONE: Hyperbolic = Hyperbolic { a1: 1.0, a2: 1.0 };
    pub const E1: Hyperbolic = Hyperbolic { a1: 1.0, a2: 0.0 };
    pub const E2: Hyperbolic = Hyperbolic { a1: 0.0, a2: 1.0 };
    pub const K: Hyperbolic = Hyperbolic { a1: 1.0, a2: -1.0 };

    /// Builds from idempotent components.
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        Ok(Self {
            a1: check_finite(a1, "hyperbolic component")?,
            a2: check_finite(a2, "hyperbolic component")?,
        })
    }

    pub(crate) const fn raw(a1: f64, a2: f64) -> Self {
        Self { a1, a2 }
    }

    /// Builds `β1 + k·β2`.
    pub fn from_cartesian(b1: f64, b2: f64) -> Result<Self> {
        check_finite(b1, "hyperbolic cartesian component")?;
        check_finite(b2, "hyperbolic cartesian component")?;
        Self::new(b1 + b2, b1 - b2)
    }

    /// A real number `s` is `s·e1 + s·e2`.
    pub fn real(s: f64) -> Result<Self> {
        Self::new(s, s)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn components(&self) -> [f64; 2] {
        [self.a1, self.a2]
    }

    /// `(β1, β2)` with `self = β1 + k·β2`.
    pub fn cartesian(&self) -> (f64, f64) {
        ((self.a1 + self.a2) / 2.0, (self.a1 - self.a2) / 2.0)
    }

    pub fn in_cone(&self) -> bool {
        self.a1 >= 0.0 && self.a2 >= 0.0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.a1 > 0.0 && self.a2 > 0.0
    }

    /// `|α|_k = |α1|·e1 + |α2|·e2`.
    pub fn abs(&self) -> DPlus {
        DPlus(Hyperbolic::raw(self.a1.abs(), self.a2.abs()))
    }

    pub fn compare(&self, other: &Hyperbolic) -> OrderRel {
        let le = self.a1 <= other.a1 && self.a2 <= other.a2;
        let ge = self.a1 >= other.a1 && self.a2 >= other.a2;
        match (le, ge) {
            (true, true) => OrderRel::Equal,
            (true, false) => OrderRel::Less,
            (false, true) => OrderRel::Greater,
            (false, false) => OrderRel::Incomparable,
        }
    }

    /// `self ≤ other` in the cone order.
    pub fn le(&self, other: &Hyperbolic) -> bool {
        matches!(self.compare(other), OrderRel::Less | OrderRel::Equal)
    }

    /// Strict in both components: `other − self` is strictly positive.
    pub fn lt_strict(&self, other: &Hyperbolic) -> bool {
        self.a1 < other.a1 && self.a2 < other.a2
    }

    /// `self ≤ other + tol·(1,1)`.
    pub fn le_tol(&self, other: &Hyperbolic, tol: f64) -> bool {
        self.a1 <= other.a1 + tol && self.a2 <= other.a2 + tol
    }

    /// Componentwise `other − self`; nonnegative components mean the
    /// inequality `self ≤ other` holds with that much room.
    pub fn margin_to(&self, other: &Hyperbolic) -> Hyperbolic {
        *other - *self
    }

    pub fn min_component(&self) -> f64 {
        self.a1.min(self.a2)
    }

    pub fn max_component(&self) -> f64 {
        self.a1.max(self.a2)
    }

    pub fn component_max(&self, other: &Hyperbolic) -> Hyperbolic {
        Hyperbolic::raw(self.a1.max(other.a1), self.a2.max(other.a2))
    }

    pub fn component_min(&self, other: &Hyperbolic) -> Hyperbolic {
        Hyperbolic::raw(self.a1.min(other.a1), self.a2.min(other.a2))
    }
}

impl Add for Hyperbolic {
    type Output = Hyperbolic;
    fn add(self, rhs: Hyperbolic) -> Hyperbolic {
        Hyperbolic::raw(self.a1 + rhs.a1, self.a2 + rhs.a2)
    }
}

impl Sub for Hyperbolic {
    type Output = Hyperbolic;
    fn sub(self, rhs: Hyperbolic) -> Hyperbolic {
        Hyperbolic::raw(self.a1 - rhs.a1, self.a2 - rhs.a2)
    }
}

impl Mul for Hyperbolic {
    type Output = Hyperbolic;
    fn mul(self, rhs: Hyperbolic) -> Hyperbolic {
        Hyperbolic::raw(self.a1 * rhs.a1, self.a2 * rhs.a2)
    }
}

impl Mul<f64> for Hyperbolic {
    type Output = Hyperbolic;
    fn mul(self, rhs: f64) -> Hyperbolic {
        Hyperbolic::raw(self.a1 * rhs, self.a2 * rhs)
    }
}

impl Neg for Hyperbolic {
    type Output = Hyperbolic;
    fn neg(self) -> Hyperbolic {
        Hyperbolic::raw(-self.a1, -self.a2)
    }
}

impl fmt::Display for Hyperbolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e1 + {}e2", self.a1, self.a2)
    }
}

/// Least upper bound of a finite set under the cone order (componentwise max).
pub fn hyp_sup<I: IntoIterator<Item = Hyperbolic>>(items: I) -> Result<Hyperbolic> {
    items
        .into_iter()
        .reduce(|acc, h| acc.component_max(&h))
        .ok_or(Error::EmptySet)
}

/// Greatest lower bound of a finite set under the cone order.
pub fn hyp_inf<I: IntoIterator<Item = Hyperbolic>>(items: I) -> Result<Hyperbolic> {
    items
        .into_iter()
        .reduce(|acc, h| acc.component_min(&h))
        .ok_or(Error::EmptySet)
}

/// A hyperbolic number in the nonnegative cone `D+`. Every norm and
/// seminorm value is one of these.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DPlus(Hyperbolic);

impl DPlus {
    pub const ZERO: DPlus = DPlus(Hyperbolic::ZERO);
    pub const ONE: DPlus = DPlus(Hyperbolic::ONE);

    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        Self::try_from(Hyperbolic::new(a1, a2)?)
    }

    /// `s·(1,1)` for a real `s ≥ 0`.
    pub fn real(s: f64) -> Result<Self> {
        Self::new(s, s)
    }

    /// Caller guarantees both components are finite and nonnegative.
    pub(crate) fn raw(a1: f64, a2: f64) -> Self {
        debug_assert!(a1 >= 0.0 && a2 >= 0.0, "DPlus::raw({a1}, {a2})");
        DPlus(Hyperbolic::raw(a1, a2))
    }

    pub fn a1(&self) -> f64 {
        self.0.a1
    }

    pub fn a2(&self) -> f64 {
        self.0.a2
    }

    pub fn components(&self) -> [f64; 2] {
        self.0.components()
    }

    pub fn hyperbolic(&self) -> Hyperbolic {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.a1 == 0.0 && self.0.a2 == 0.0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.is_strictly_positive()
    }

    /// `1/α = (1/α1)·e1 + (1/α2)·e2`, defined for strictly positive `α`.
    pub fn inverse(&self) -> Result<DPlus> {
        if !self.is_strictly_positive() {
            return Err(Error::NotStrictlyPositive {
                a1: self.a1(),
                a2: self.a2(),
            });
        }
        DPlus::new(1.0 / self.a1(), 1.0 / self.a2())
    }

    /// Componentwise `self / rhs`; `rhs` must be strictly positive.
    pub fn div(&self, rhs: &DPlus) -> Result<DPlus> {
        Ok(*self * rhs.inverse()?)
    }

    /// Multiplies by a real `s ≥ 0`.
    pub fn scale(&self, s: f64) -> DPlus {
        assert!(s >= 0.0, "DPlus::scale by negative factor {s}");
        DPlus::raw(self.a1() * s, self.a2() * s)
    }

    pub fn le(&self, other: &DPlus) -> bool {
        self.0.le(&other.0)
    }

    pub fn le_tol(&self, other: &DPlus, tol: f64) -> bool {
        self.0.le_tol(&other.0, tol)
    }

    pub fn compare(&self, other: &DPlus) -> OrderRel {
        self.0.compare(&other.0)
    }

    pub fn sup<I: IntoIterator<Item = DPlus>>(items: I) -> Result<DPlus> {
        hyp_sup(items.into_iter().map(|d| d.0)).map(DPlus)
    }
}

impl TryFrom<Hyperbolic> for DPlus {
    type Error = Error;
    fn try_from(h: Hyperbolic) -> Result<DPlus> {
        if h.in_cone() {
            Ok(DPlus(h))
        } else {
            Err(Error::NotInCone(h.to_string()))
        }
    }
}

impl From<DPlus> for Hyperbolic {
    fn from(d: DPlus) -> Hyperbolic {
        d.0
    }
}

impl Add for DPlus {
    type Output = DPlus;
    fn add(self, rhs: DPlus) -> DPlus {
        DPlus(self.0 + rhs.0)
    }
}

impl Mul for DPlus {
    type Output = DPlus;
    fn mul(self, rhs: DPlus) -> DPlus {
        DPlus(self.0 * rhs.0)
    }
}

impl fmt::Display for DPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A bicomplex number `z1·e1 + z2·e2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Bicomplex {
    z1: Complex64,
    z2: Complex64,
}

impl Bicomplex {
    pub const ZERO: Bicomplex = Bicomplex { z1: C0, z2: C0 };
    pub const ONE: Bicomplex = Bicomplex { z1: C1, z2: C1 };
    /// `i = i·e1 + i·e2`
    pub const I: Bicomplex = Bicomplex { z1: CI, z2: CI };
    /// `j = -i·e1 + i·e2`
    pub const J: Bicomplex = Bicomplex {
        z1: Complex64::new(0.0, -1.0),
        z2: CI,
    };
    /// `k = ij = e1 - e2`
    pub const K: Bicomplex = Bicomplex {
        z1: C1,
        z2: Complex64::new(-1.0, 0.0),
    };
    pub const E1: Bicomplex = Bicomplex { z1: C1, z2: C0 };
    pub const E2: Bicomplex = Bicomplex { z1: C0, z2: C1 };

    /// Builds from idempotent components.
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        Ok(Self {
            z1: check_finite_c(z1, "bicomplex component")?,
            z2: check_finite_c(z2, "bicomplex component")?,
        })
    }

    pub(crate) const fn raw(z1: Complex64, z2: Complex64) -> Self {
        Self { z1, z2 }
    }

    /// `Z = w1 + j·w2` gives `z1 = w1 − i·w2`, `z2 = w1 + i·w2`.
    pub fn from_cartesian(w1: Complex64, w2: Complex64) -> Result<Self> {
        check_finite_c(w1, "bicomplex cartesian component")?;
        check_finite_c(w2, "bicomplex cartesian component")?;
        Self::new(w1 - CI * w2, w1 + CI * w2)
    }

    /// Inverse of [`Bicomplex::from_cartesian`]: `(w1, w2)`.
    pub fn to_cartesian(&self) -> (Complex64, Complex64) {
        ((self.z1 + self.z2) * 0.5, CI * (self.z1 - self.z2) * 0.5)
    }

    /// `a + b·i + c·j + d·k`, i.e. `w1 = a + bi`, `w2 = c + di`.
    pub fn from_real4(w: [f64; 4]) -> Result<Self> {
        Self::from_cartesian(Complex64::new(w[0], w[1]), Complex64::new(w[2], w[3]))
    }

    pub fn to_real4(&self) -> [f64; 4] {
        let (w1, w2) = self.to_cartesian();
        [w1.re, w1.im, w2.re, w2.im]
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn is_zero(&self) -> bool {
        self.z1 == C0 && self.z2 == C0
    }

    /// `|Z|_k = |z1|·e1 + |z2|·e2`.
    pub fn knorm(&self) -> DPlus {
        DPlus::raw(self.z1.norm(), self.z2.norm())
    }

    /// Euclidean modulus of the 4-real vector `(a, b, c, d)`.
    pub fn euclid_norm(&self) -> f64 {
        let (n1, n2) = (self.z1.norm(), self.z2.norm());
        ((n1 * n1 + n2 * n2) / 2.0).sqrt()
    }

    pub fn inverse(&self) -> Result<Bicomplex> {
        self.inverse_with_tol(ZERO_DIVISOR_TOL)
    }

    /// `(1/z1)·e1 + (1/z2)·e2`; fails when either component has modulus `≤ tol`.
    pub fn inverse_with_tol(&self, tol: f64) -> Result<Bicomplex> {
        for (component, z) in [(1u8, self.z1), (2, self.z2)] {
            let modulus = z.norm();
            if modulus <= tol {
                return Err(Error::ZeroDivisor { component, modulus });
            }
        }
        Bicomplex::new(recip(self.z1), recip(self.z2))
    }

    /// Hyperbolic part when both components are real.
    pub fn as_hyperbolic(&self) -> Option<Hyperbolic> {
        (self.z1.im == 0.0 && self.z2.im == 0.0).then(|| Hyperbolic::raw(self.z1.re, self.z2.re))
    }
}

// |z| is formed before dividing so that moduli near the zero-divisor floor do
// not underflow through |z|².
fn recip(z: Complex64) -> Complex64 {
    let n = z.norm();
    (z.conj() / n) / n
}

impl From<Hyperbolic> for Bicomplex {
    fn from(h: Hyperbolic) -> Bicomplex {
        Bicomplex::raw(Complex64::new(h.a1, 0.0), Complex64::new(h.a2, 0.0))
    }
}

impl From<DPlus> for Bicomplex {
    fn from(d: DPlus) -> Bicomplex {
        Bicomplex::from(d.0)
    }
}

impl Add for Bicomplex {
    type Output = Bicomplex;
    fn add(self, rhs: Bicomplex) -> Bicomplex {
        Bicomplex::raw(self.z1 + rhs.z1, self.z2 + rhs.z2)
    }
}

impl Sub for Bicomplex {
    type Output = Bicomplex;
    fn sub(self, rhs: Bicomplex) -> Bicomplex {
        Bicomplex::raw(self.z1 - rhs.z1, self.z2 - rhs.z2)
    }
}

impl Mul for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, rhs: Bicomplex) -> Bicomplex {
        Bicomplex::raw(self.z1 * rhs.z1, self.z2 * rhs.z2)
    }
}

impl Mul<f64> for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, rhs: f64) -> Bicomplex {
        Bicomplex::raw(self.z1 * rhs, self.z2 * rhs)
    }
}

impl Neg for Bicomplex {
    type Output = Bicomplex;
    fn neg(self) -> Bicomplex {
        Bicomplex::raw(-self.z1, -self.z2)
    }
}

impl fmt::Display for Bicomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})e1 + ({})e2", self.z1, self.z2)
    }
}

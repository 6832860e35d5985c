//! Principal-branch complex arithmetic and the real special-function
//! primitives (Pochhammer symbol, generalized binomial) the rest of the
//! crate builds on.
//!
//! All powers use the principal branch `z^a = |z|^a exp(i a Arg z)` with
//! `Arg z` in `(-pi, pi]`. A negative real number carrying a negative zero
//! imaginary part is treated as lying on the upper side of the cut, so
//! `Arg(-4 - 0i) = pi`.

use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{domain, Error, Result};

/// A point of the complex plane in Cartesian form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

/// Which part of the plane a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    UpperHalfPlane,
    LowerHalfPlane,
    RealAxis,
}

impl ComplexPoint {
    pub const ZERO: ComplexPoint = ComplexPoint { re: 0.0, im: 0.0 };
    pub const ONE: ComplexPoint = ComplexPoint { re: 1.0, im: 0.0 };
    pub const I: ComplexPoint = ComplexPoint { re: 0.0, im: 1.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        ComplexPoint { re, im }
    }

    /// Builds a point, rejecting NaN and infinite components.
    pub fn try_new(re: f64, im: f64) -> Result<Self> {
        let z = ComplexPoint { re, im };
        z.check_finite()?;
        Ok(z)
    }

    #[inline]
    pub fn from_polar(r: f64, theta: f64) -> Self {
        ComplexPoint::new(r * libm::cos(theta), r * libm::sin(theta))
    }

    #[inline]
    pub fn real(x: f64) -> Self {
        ComplexPoint::new(x, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if !self.re.is_finite() {
            return Err(domain("non-finite real part", self.re));
        }
        if !self.im.is_finite() {
            return Err(domain("non-finite imaginary part", self.im));
        }
        Ok(())
    }

    pub fn region(&self) -> Region {
        if self.im > 0.0 {
            Region::UpperHalfPlane
        } else if self.im < 0.0 {
            Region::LowerHalfPlane
        } else {
            Region::RealAxis
        }
    }

    #[inline]
    pub fn conj(self) -> Self {
        ComplexPoint::new(self.re, -self.im)
    }

    #[inline]
    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    /// Principal argument in `(-pi, pi]`; a signed zero imaginary part is
    /// normalized to `+0` first.
    #[inline]
    pub fn arg(self) -> f64 {
        let im = if self.im == 0.0 { 0.0 } else { self.im };
        libm::atan2(im, self.re)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        ComplexPoint::new(self.re * s, self.im * s)
    }

    pub fn recip(self) -> Self {
        ComplexPoint::ONE / self
    }

    pub fn exp(self) -> Self {
        let m = libm::exp(self.re);
        ComplexPoint::new(m * libm::cos(self.im), m * libm::sin(self.im))
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        ComplexPoint::new(libm::log(self.abs()), self.arg())
    }

    /// `Log(1 + self)` without cancellation for small arguments.
    pub fn ln_1p(self) -> Self {
        let (x, y) = (self.re, self.im);
        let re = if x.abs() < 0.5 && y.abs() < 0.5 {
            0.5 * libm::log1p(x * (2.0 + x) + y * y)
        } else {
            libm::log(libm::hypot(1.0 + x, y))
        };
        let one_plus = ComplexPoint::new(1.0 + x, y);
        ComplexPoint::new(re, one_plus.arg())
    }

    /// `exp(self) - 1` without cancellation for small arguments.
    pub fn exp_m1(self) -> Self {
        let (a, b) = (self.re, self.im);
        let half = libm::sin(0.5 * b);
        let re = libm::expm1(a) * libm::cos(b) - 2.0 * half * half;
        let im = libm::exp(a) * libm::sin(b);
        ComplexPoint::new(re, im)
    }

    /// Principal power for a positive real exponent, without input checks.
    /// `0^alpha = 0`.
    pub fn powf(self, alpha: f64) -> Self {
        if self.re == 0.0 && self.im == 0.0 {
            return ComplexPoint::ZERO;
        }
        let modulus = libm::pow(self.abs(), alpha);
        let angle = alpha * self.arg();
        ComplexPoint::new(modulus * libm::cos(angle), modulus * libm::sin(angle))
    }
}

impl Add for ComplexPoint {
    type Output = ComplexPoint;
    #[inline]
    fn add(self, rhs: ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for ComplexPoint {
    #[inline]
    fn add_assign(&mut self, rhs: ComplexPoint) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for ComplexPoint {
    type Output = ComplexPoint;
    #[inline]
    fn sub(self, rhs: ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexPoint {
    type Output = ComplexPoint;
    #[inline]
    fn mul(self, rhs: ComplexPoint) -> ComplexPoint {
        ComplexPoint::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<f64> for ComplexPoint {
    type Output = ComplexPoint;
    #[inline]
    fn mul(self, rhs: f64) -> ComplexPoint {
        self.scale(rhs)
    }
}

impl Div for ComplexPoint {
    type Output = ComplexPoint;
    // Smith's algorithm
    fn div(self, rhs: ComplexPoint) -> ComplexPoint {
        let (a, b, c, d) = (self.re, self.im, rhs.re, rhs.im);
        if c.abs() >= d.abs() {
            let r = d / c;
            let den = c + d * r;
            ComplexPoint::new((a + b * r) / den, (b - a * r) / den)
        } else {
            let r = c / d;
            let den = c * r + d;
            ComplexPoint::new((a * r + b) / den, (b * r - a) / den)
        }
    }
}

impl Neg for ComplexPoint {
    type Output = ComplexPoint;
    #[inline]
    fn neg(self) -> ComplexPoint {
        ComplexPoint::new(-self.re, -self.im)
    }
}

/// A validated Hölder pair `(p, q)` with `1/p + 1/q = 1` and `p > 1`.
///
/// Only `p` is stored; `q` and its reciprocal are derived on access so the
/// constraint cannot drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderPair {
    p: f64,
}

impl HolderPair {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(HolderPair { p })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `1/q = (p - 1)/p`, computed directly.
    #[inline]
    pub fn inv_q(&self) -> f64 {
        (self.p - 1.0) / self.p
    }

    /// `p - 1`, the outer exponent appearing throughout.
    #[inline]
    pub fn outer(&self) -> f64 {
        self.p - 1.0
    }

    /// `((p - 1)/p)^p`, the sharp classical constant and total mass of the density.
    pub fn landau_constant(&self) -> f64 {
        libm::pow(self.inv_q(), self.p)
    }

    /// `Some(p)` when `p` is an integer.
    pub fn as_integer(&self) -> Option<u32> {
        if libm::floor(self.p) == self.p && self.p < u32::MAX as f64 {
            Some(self.p as u32)
        } else {
            None
        }
    }
}

/// Principal power `z^alpha` for `alpha > 0`.
///
/// Negative real inputs take `Arg = +pi` regardless of the sign of the zero
/// imaginary part.
pub fn principal_pow(z: ComplexPoint, alpha: f64) -> Result<ComplexPoint> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(domain("exponent must be finite and positive", alpha));
    }
    z.check_finite()?;
    Ok(z.powf(alpha))
}

/// Rising factorial `(alpha)_n = alpha (alpha + 1) ... (alpha + n - 1)`.
pub fn pochhammer(alpha: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..n {
        acc *= alpha + i as f64;
    }
    acc
}

/// Generalized binomial coefficient `alpha (alpha - 1) ... (alpha - k + 1) / k!`.
///
/// Exact for integer `alpha >= k >= 0` as long as the result fits in the
/// 53-bit significand together with the intermediate `C(alpha, i) * (alpha - i)`.
pub fn generalized_binomial(alpha: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        let i = i as f64;
        acc = acc * (alpha - i) / (i + 1.0);
    }
    acc
}

/// `e^{i pi / q}`, the rotation used by the boundary formulas.
pub(crate) fn boundary_rotation(hp: &HolderPair) -> ComplexPoint {
    let angle = PI * hp.inv_q();
    ComplexPoint::new(libm::cos(angle), libm::sin(angle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: ComplexPoint, b: ComplexPoint, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn principal_pow_examples() {
        let one = principal_pow(ComplexPoint::new(1.0, 0.0), 3.7).unwrap();
        assert_eq!(one, ComplexPoint::new(1.0, 0.0));

        let r = principal_pow(ComplexPoint::new(-4.0, 0.0), 0.5).unwrap();
        assert!(close(r, ComplexPoint::new(0.0, 2.0), 1e-15), "{r:?}");

        let r = principal_pow(ComplexPoint::new(0.0, 2.0), 2.0).unwrap();
        assert!(close(r, ComplexPoint::new(-4.0, 0.0), 1e-14), "{r:?}");
    }

    #[test]
    fn negative_zero_imaginary_part_stays_on_principal_branch() {
        let r = principal_pow(ComplexPoint::new(-4.0, -0.0), 0.5).unwrap();
        assert!(close(r, ComplexPoint::new(0.0, 2.0), 1e-15), "{r:?}");
    }

    #[test]
    fn principal_pow_rejects_bad_input() {
        assert!(principal_pow(ComplexPoint::ONE, 0.0).is_err());
        assert!(principal_pow(ComplexPoint::ONE, -1.0).is_err());
        assert!(principal_pow(ComplexPoint::new(f64::NAN, 0.0), 1.0).is_err());
        assert!(principal_pow(ComplexPoint::new(0.0, f64::INFINITY), 1.0).is_err());
        assert_eq!(
            principal_pow(ComplexPoint::ZERO, 0.3).unwrap(),
            ComplexPoint::ZERO
        );
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(0.5, 0), 1.0);
        assert_eq!(pochhammer(0.5, 3), 1.875);
        assert_eq!(pochhammer(1.0, 5), 120.0);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(generalized_binomial(0.5, 2), -0.125);
        assert_eq!(generalized_binomial(3.0, 2), 3.0);
        assert_eq!(generalized_binomial(0.5, 0), 1.0);
        assert_eq!(generalized_binomial(3.0, 4), 0.0);
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        let mut row = [0u64; 61];
        row[0] = 1;
        for m in 1..=50u32 {
            for k in (1..=m as usize).rev() {
                row[k] += row[k - 1];
            }
            for k in 0..=m {
                assert_eq!(
                    generalized_binomial(m as f64, k),
                    row[k as usize] as f64,
                    "C({m},{k})"
                );
            }
        }
    }

    #[test]
    fn holder_pair_validation() {
        assert!(HolderPair::new(1.0).is_err());
        assert!(HolderPair::new(0.9).is_err());
        assert!(HolderPair::new(f64::NAN).is_err());
        assert!(HolderPair::new(f64::INFINITY).is_err());
        let hp = HolderPair::new(3.0).unwrap();
        assert_eq!(hp.q(), 1.5);
        assert_eq!(hp.as_integer(), Some(3));
        assert_eq!(HolderPair::new(2.5).unwrap().as_integer(), None);
    }

    #[test]
    fn ln_1p_and_exp_m1_are_accurate_for_tiny_arguments() {
        let w = ComplexPoint::new(1e-12, -3e-13);
        let l = w.ln_1p();
        assert!((l.re - (1e-12 - 0.5 * (1e-24 - 9e-26))).abs() < 1e-27);
        let e = l.exp_m1();
        assert!(close(e, w, 1e-27));
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(re in -50.0f64..50.0, im in 1e-6f64..50.0, a in 0.01f64..6.0) {
            for z in [ComplexPoint::new(re, im), ComplexPoint::new(re.abs() + 1e-3, -im)] {
                let lhs = principal_pow(z.conj(), a).unwrap();
                let rhs = principal_pow(z, a).unwrap().conj();
                prop_assert!(lhs == rhs);
            }
        }

        #[test]
        fn exponents_add(re in -20.0f64..20.0, im in 1e-3f64..20.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
            let z = ComplexPoint::new(re, im);
            let lhs = principal_pow(z, a).unwrap() * principal_pow(z, b).unwrap();
            let rhs = principal_pow(z, a + b).unwrap();
            // rounding in alpha * ln z is amplified by |alpha ln z|
            let scale = 1.0 + (a + b) * z.ln().abs();
            prop_assert!((lhs - rhs).abs() <= 8.0 * f64::EPSILON * scale * rhs.abs(),
                "{lhs:?} vs {rhs:?}");
        }

        #[test]
        fn pochhammer_recurrence(alpha in -10.0f64..10.0, n in 0u32..60) {
            let next = pochhammer(alpha, n + 1);
            let stepped = pochhammer(alpha, n) * (alpha + n as f64);
            prop_assert!((next - stepped).abs() <= 2.0 * f64::EPSILON * next.abs());
        }

        #[test]
        fn ln_1p_inverts_exp_m1(re in -2.0f64..2.0, im in -3.0f64..3.0) {
            let u = ComplexPoint::new(re, im);
            let back = u.exp_m1().ln_1p();
            prop_assert!((back - u).abs() < 1e-14 * (1.0 + u.abs()));
        }
    }
}

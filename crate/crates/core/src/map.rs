//! The Double Standard Map `f_{a,b}(x) = 2x + a + (b/π) sin(2πx) (mod 1)`,
//! its lift, and the holomorphic extension
//! `g_{a,b}(z) = e^{2πia} z² exp(bz − b/z)` on the punctured plane.
//!
//! On the unit circle `g(e^{2πix}) = e^{2πi f(x)}`, and `g` commutes with the
//! reflection `η(z) = 1/z̄` in the circle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DsmError, Result};

/// Largest exponent we let `exp` see before calling the value out of range.
const LOG_RANGE: f64 = 700.0;

/// `x` reduced into `[-1/2, 1/2]` by subtracting the nearest integer.
///
/// Odd under negation (`round` is symmetric), which keeps mirrored
/// computations bit-identical.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    x - x.round()
}

/// `x mod 1` in `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let y = wrap_centered(x);
    let y = if y < 0.0 { y + 1.0 } else { y };
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Distance between two points of `ℝ/ℤ`.
#[inline]
pub fn circle_distance(x: f64, y: f64) -> f64 {
    wrap_centered(x - y).abs()
}

/// A point `(a, b)` of the parameter space `ℝ/ℤ × [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    a: f64,
    b: f64,
}

impl Parameter {
    /// Stores `a` as its representative in `[-1/2, 1/2)`; rejects `b ∉ [0, 1]`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(DsmError::InvalidParameter(format!(
                "non-finite parameter (a = {a}, b = {b})"
            )));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(DsmError::InvalidParameter(format!("b = {b} not in [0, 1]")));
        }
        Ok(Parameter {
            a: canonical_angle(a),
            b,
        })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// The parameter `(-a, b)`, conjugate to `(a, b)` through `x ↦ -x`.
    pub fn mirror(&self) -> Parameter {
        Parameter {
            a: canonical_angle(-self.a),
            b: self.b,
        }
    }

    /// `F(x) - 2x = a + (b/π) sin(2πx)`; 1-periodic in `x`.
    #[inline]
    pub fn displacement(&self, x: f64) -> f64 {
        self.a + self.b / PI * (TAU * x).sin()
    }

    /// The degree-2 lift `F(x) = 2x + a + (b/π) sin(2πx)`, no reduction.
    #[inline]
    pub fn lift(&self, x: f64) -> f64 {
        2.0 * x + self.a + self.b / PI * (TAU * x).sin()
    }

    /// `F(x)` reduced to `[-1/2, 1/2]`; the workhorse for long orbits.
    #[inline]
    pub fn step_centered(&self, x: f64) -> f64 {
        wrap_centered(self.lift(x))
    }

    /// `f(x) = F(x) mod 1` in `[0, 1)`.
    #[inline]
    pub fn circle(&self, x: f64) -> f64 {
        wrap_unit(self.lift(x))
    }

    /// `f'(x) = 2 + 2b cos(2πx)`.
    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        2.0 + 2.0 * self.b * (TAU * x).cos()
    }

    /// `f''(x) = -4πb sin(2πx)`.
    #[inline]
    pub fn second_deriv(&self, x: f64) -> f64 {
        -2.0 * TAU * self.b * (TAU * x).sin()
    }

    /// Lift of `f^n` together with `(f^n)'`.
    pub fn lift_iterate(&self, x: f64, n: usize) -> (f64, f64) {
        let mut y = x;
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.deriv(y);
            y = self.lift(y);
        }
        (y, d)
    }

    /// `g_{a,b}(z) = e^{2πia} z² exp(bz - b/z)`.
    pub fn complex(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(DsmError::ZeroPoint);
        }
        let inv = z.inv();
        let exponent = self.b * (z - inv);
        let log_modulus = exponent.re + 2.0 * z.norm().ln();
        if !log_modulus.is_finite() || log_modulus.abs() > LOG_RANGE {
            return Err(DsmError::Range(format!("log|g(z)| = {log_modulus:.3e} at z = {z}")));
        }
        let phase = TAU * self.a + exponent.im + 2.0 * z.arg();
        Ok(Complex64::from_polar(log_modulus.exp(), phase))
    }

    /// `g'(z) = g(z) (2/z + b + b/z²)`.
    pub fn complex_deriv(&self, z: Complex64) -> Result<Complex64> {
        let g = self.complex(z)?;
        Ok(g * self.log_deriv(z))
    }

    /// `g(z)`, `g'(z)` and `g''(z)` in one pass.
    pub fn complex_jet(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let g = self.complex(z)?;
        let l = self.log_deriv(z);
        let inv = z.inv();
        let dl = -2.0 * inv * inv - 2.0 * self.b * inv * inv * inv;
        Ok((g, g * l, g * (l * l + dl)))
    }

    #[inline]
    fn log_deriv(&self, z: Complex64) -> Complex64 {
        let inv = z.inv();
        2.0 * inv + self.b + self.b * inv * inv
    }

    /// Critical points `c1 < -1 < c2 < 0` of `g`, roots of `bc² + 2c + b = 0`.
    ///
    /// `c1 c2 = 1`; both equal `-1` at `b = 1`.
    pub fn critical_points(&self) -> Result<(Complex64, Complex64)> {
        if self.b == 0.0 {
            return Err(DsmError::NoCriticalPoints);
        }
        let s = (1.0 - self.b * self.b).max(0.0).sqrt();
        let c1 = -(1.0 + s) / self.b;
        // Avoids the cancellation in (-1 + s)/b for small b.
        let c2 = -self.b / (1.0 + s);
        Ok((Complex64::new(c1, 0.0), Complex64::new(c2, 0.0)))
    }
}

/// Representative of `a mod 1` in `[-1/2, 1/2)`.
pub fn canonical_angle(a: f64) -> f64 {
    let r = a - (a + 0.5).floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// A point of the circle, stored as `x ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(x: f64) -> Self {
        CirclePoint(wrap_unit(x))
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0
    }

    /// `e^{2πix}` on the unit circle.
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.0)
    }
}

/// A point of `ℂ*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuncturedPlanePoint(Complex64);

impl PuncturedPlanePoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z == Complex64::new(0.0, 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(DsmError::ZeroPoint);
        }
        Ok(PuncturedPlanePoint(z))
    }

    #[inline]
    pub fn z(self) -> Complex64 {
        self.0
    }
}

pub fn eval_circle(p: &Parameter, x: CirclePoint) -> CirclePoint {
    CirclePoint::new(p.lift(x.x()))
}

pub fn eval_lift(p: &Parameter, x: f64) -> f64 {
    p.lift(x)
}

pub fn deriv_circle(p: &Parameter, x: CirclePoint) -> f64 {
    p.deriv(x.x())
}

pub fn eval_complex(p: &Parameter, z: PuncturedPlanePoint) -> Result<PuncturedPlanePoint> {
    PuncturedPlanePoint::new(p.complex(z.z())?)
}

pub fn deriv_complex(p: &Parameter, z: PuncturedPlanePoint) -> Result<Complex64> {
    p.complex_deriv(z.z())
}

pub fn critical_points(p: &Parameter) -> Result<(Complex64, Complex64)> {
    p.critical_points()
}

/// The reflection `η(z) = 1/z̄`; an involution fixing the unit circle.
pub fn reflect(z: PuncturedPlanePoint) -> PuncturedPlanePoint {
    let w = z.z();
    PuncturedPlanePoint(w / w.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn param(a: f64, b: f64) -> Parameter {
        Parameter::new(a, b).unwrap()
    }

    #[test]
    fn canonical_representative() {
        assert_eq!(param(0.5, 0.3).a(), -0.5);
        assert_eq!(param(-0.5, 0.3).a(), -0.5);
        assert!((param(1.25, 0.3).a() - 0.25).abs() < 1e-15);
        assert!((param(0.75, 0.3).a() + 0.25).abs() < 1e-15);
        assert!(Parameter::new(0.0, 1.5).is_err());
        assert!(Parameter::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn circle_values() {
        assert_eq!(eval_circle(&param(0.0, 0.4), CirclePoint::new(0.0)).x(), 0.0);
        let y = eval_circle(&param(0.5, 1.0), CirclePoint::new(0.25)).x();
        assert!((y - 1.0 / PI).abs() < 1e-12, "{y}");
        let y = eval_circle(&param(0.5, 1.0), CirclePoint::new(0.5)).x();
        assert!(circle_distance(y, 0.5) < 1e-12);
    }

    #[test]
    fn lift_values() {
        let p = param(0.5, 1.0);
        // a is stored as -1/2, so the lift differs from the a = +1/2 lift by an integer
        assert!(circle_distance(p.lift(0.5), 1.5) < 1e-12);
        let p0 = param(0.0, 0.0);
        for x in [-1.3, 0.0, 0.2, 7.7] {
            assert_eq!(p0.lift(x), 2.0 * x);
        }
    }

    #[test]
    fn wrap_edges() {
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert_eq!(wrap_unit(1.0), 0.0);
        assert!(wrap_unit(-0.25) - 0.75 < 1e-16);
        assert_eq!(wrap_centered(-0.5), 0.5);
        assert_eq!(wrap_centered(0.5), -0.5);
    }

    #[test]
    fn derivative_values() {
        assert!(deriv_circle(&param(0.1, 1.0), CirclePoint::new(0.5)).abs() < 1e-15);
        assert_eq!(deriv_circle(&param(0.1, 0.0), CirclePoint::new(0.37)), 2.0);
    }

    #[test]
    fn complex_quadratic_case() {
        let z = param(0.0, 0.0).complex(Complex64::new(2.0, 0.0)).unwrap();
        assert!((z - Complex64::new(4.0, 0.0)).norm() < 1e-14);
        let p = param(0.3, 0.0);
        let z = Complex64::new(0.4, -1.1);
        let d = p.complex_deriv(z).unwrap();
        let expected = 2.0 * Complex64::from_polar(1.0, TAU * p.a()) * z;
        assert!((d - expected).norm() < 1e-13);
    }

    #[test]
    fn complex_rejects_zero_and_overflow() {
        let p = param(0.1, 0.8);
        assert_eq!(p.complex(Complex64::new(0.0, 0.0)), Err(DsmError::ZeroPoint));
        assert!(matches!(
            p.complex(Complex64::new(2000.0, 0.0)),
            Err(DsmError::Range(_))
        ));
        assert!(matches!(p.complex(Complex64::new(-1e-3, 0.0)), Err(DsmError::Range(_))));
        assert!(PuncturedPlanePoint::new(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn critical_point_values() {
        let (c1, c2) = param(0.2, 1.0).critical_points().unwrap();
        assert_eq!((c1.re, c2.re), (-1.0, -1.0));
        let p = param(0.2, 0.5);
        let (c1, c2) = p.critical_points().unwrap();
        assert!((c1.re - (-2.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!((c2.re - (-2.0 + 3f64.sqrt())).abs() < 1e-12);
        assert!((c1.re + 3.7320508).abs() < 1e-7 && (c2.re + 0.2679492).abs() < 1e-7);
        for c in [c1, c2] {
            assert!(p.complex_deriv(c).unwrap().norm() < 1e-10);
        }
        assert_eq!(param(0.2, 0.0).critical_points(), Err(DsmError::NoCriticalPoints));
    }

    #[test]
    fn critical_points_ordered() {
        for i in 1..100 {
            let b = i as f64 / 100.0;
            let (c1, c2) = param(0.0, b).critical_points().unwrap();
            assert!(c1.re < -1.0 && -1.0 < c2.re && c2.re < 0.0);
            assert!((c1 * c2 - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn reflection_basics() {
        let z = PuncturedPlanePoint::new(Complex64::new(0.3, -2.0)).unwrap();
        assert!((reflect(reflect(z)).z() - z.z()).norm() < 1e-15);
        let u = PuncturedPlanePoint::new(Complex64::from_polar(1.0, 0.77)).unwrap();
        assert!((reflect(u).z() - u.z()).norm() < 1e-15);
    }

    #[test]
    fn jet_matches_derivatives() {
        let p = param(0.17, 0.63);
        let z = Complex64::new(-0.7, 0.45);
        let (g, d1, d2) = p.complex_jet(z).unwrap();
        assert!((g - p.complex(z).unwrap()).norm() < 1e-14);
        assert!((d1 - p.complex_deriv(z).unwrap()).norm() < 1e-13);
        let h = 1e-5;
        let fd = (p.complex_deriv(z + h).unwrap() - p.complex_deriv(z - h).unwrap()) / (2.0 * h);
        assert!((fd - d2).norm() < 1e-6 * d2.norm().max(1.0), "{fd} vs {d2}");
    }
}

//! Koenigs linearization at the distinguished attracting point, the critical
//! angle, and the uniformizing invariant `Ξ(a, b) = λ e^{2iν}` of a tongue.
//!
//! The linearizing coordinate is normalized by `κ(x*) = 0`, `κ'(x*) = i/x*`,
//! which makes it commute with the reflections: `κ(1/z̄) = conj κ(z)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::cycles::{self, classify, AttractingCycle, OrbitType, TongueClassification};
use crate::error::{DsmError, Result};
use crate::map::{canonical_angle, Parameter};

/// Default period bound used when a routine has to classify on its own.
pub const DEFAULT_Q_MAX: usize = 12;

/// Koenigs estimates are taken once the orbit is this close to `x*`.
const KOENIGS_RADIUS: f64 = 1e-5;
const KOENIGS_BLOCK_BUDGET: usize = 100_000;

/// Range of multipliers for which linearization is attempted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearizationWindow {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for LinearizationWindow {
    fn default() -> Self {
        LinearizationWindow {
            lambda_min: 1e-4,
            lambda_max: 1.0 - 1e-4,
        }
    }
}

impl LinearizationWindow {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.lambda_min && lambda < self.lambda_max
    }

    fn check(&self, lambda: f64) -> Result<()> {
        if self.contains(lambda) {
            Ok(())
        } else {
            Err(DsmError::MultiplierOutsideWindow {
                lambda,
                min: self.lambda_min,
                max: self.lambda_max,
            })
        }
    }
}

/// Everything needed to evaluate `κ` near one attracting cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoenigsFrame {
    pub parameter: Parameter,
    pub cycle: AttractingCycle,
    /// `e^{2πi x}` for the distinguished cycle point.
    pub x_star: Complex64,
    pub lambda: f64,
    /// `i / x*`.
    pub normalization: Complex64,
    /// Cap on the number of `g^q` blocks per evaluation.
    pub depth: usize,
    /// Quadratic Koenigs coefficient `(g^q)''(x*) / (2λ(1 - λ))`.
    quadratic: Complex64,
    /// The other cycle points, used to detect the wrong basin component.
    others: Vec<Complex64>,
}

fn circle_point(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

impl KoenigsFrame {
    pub fn new(p: &Parameter, cycle: &AttractingCycle) -> Result<KoenigsFrame> {
        Self::with_window(p, cycle, LinearizationWindow::default())
    }

    pub fn with_window(p: &Parameter, cycle: &AttractingCycle, window: LinearizationWindow) -> Result<KoenigsFrame> {
        window.check(cycle.lambda)?;
        let x_star = circle_point(cycle.distinguished());
        // Second derivative of g^q at x* by the chain rule.
        let mut z = x_star;
        let mut d1 = Complex64::new(1.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for _ in 0..cycle.period {
            let (g, g1, g2) = p.complex_jet(z)?;
            d2 = g2 * d1 * d1 + g1 * d2;
            d1 *= g1;
            z = g;
        }
        let lambda = cycle.lambda;
        let quadratic = d2 / (2.0 * lambda * (1.0 - lambda));
        let others = cycle
            .points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != cycle.distinguished_index)
            .map(|(_, &x)| circle_point(x))
            .collect();
        Ok(KoenigsFrame {
            parameter: *p,
            cycle: cycle.clone(),
            x_star,
            lambda,
            normalization: Complex64::new(0.0, 1.0) / x_star,
            depth: (KOENIGS_BLOCK_BUDGET / cycle.period).max(1),
            quadratic,
            others,
        })
    }

    fn block(&self, z: Complex64) -> Result<Complex64> {
        let mut w = z;
        for _ in 0..self.cycle.period {
            w = self.parameter.complex(w)?;
        }
        Ok(w)
    }

    /// Index of the cycle point that `g^{nq}(z)` approaches.
    pub fn limit_index(&self, z: Complex64) -> Result<usize> {
        let mut w = z;
        for _ in 0..self.depth {
            for (i, &x) in self.cycle.points.iter().enumerate() {
                if (w - circle_point(x)).norm() < 1e-6 {
                    return Ok(i);
                }
            }
            w = self.block(w).map_err(|e| DsmError::KoenigsDivergence(e.to_string()))?;
        }
        Err(DsmError::KoenigsDivergence(format!(
            "orbit of {z} did not approach the cycle"
        )))
    }
}

/// `κ(z) = (i/x*) lim λ^{-n} (g^{nq}(z) - x*)`, with a quadratic correction
/// so the limit is read off at `|g^{nq}(z) - x*| ≈ 1e-5` where truncation and
/// rounding errors balance.
pub fn koenigs_value(frame: &KoenigsFrame, z: Complex64) -> Result<Complex64> {
    if z == frame.x_star {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let estimate = |d: Complex64, scale: f64| scale * (d + frame.quadratic * d * d);
    let error_model = |r: f64| r * r + 1e-16 / r;
    let mut w = z;
    let mut scale = 1.0;
    let mut previous: Option<(Complex64, f64)> = None;
    for _ in 0..=frame.depth {
        let d = w - frame.x_star;
        let r = d.norm();
        if r <= KOENIGS_RADIUS {
            let mut best = (estimate(d, scale), error_model(r));
            if let Some((d_prev, s_prev)) = previous {
                let r_prev = d_prev.norm();
                let candidate = error_model(r_prev);
                if r_prev > 0.0 && candidate < best.1 {
                    best = (estimate(d_prev, s_prev), candidate);
                }
            }
            if r == 0.0 {
                if let Some((d_prev, s_prev)) = previous {
                    best = (estimate(d_prev, s_prev), 0.0);
                }
            }
            return Ok(frame.normalization * best.0);
        }
        if let Some(&other) = frame.others.iter().find(|&&o| (w - o).norm() < 1e-3) {
            return Err(DsmError::KoenigsDivergence(format!(
                "{z} is attracted to the cycle point {other}, not x*"
            )));
        }
        previous = Some((d, scale));
        w = frame.block(w).map_err(|e| DsmError::KoenigsDivergence(e.to_string()))?;
        scale /= frame.lambda;
        if !scale.is_finite() {
            break;
        }
    }
    Err(DsmError::KoenigsDivergence(format!(
        "{z} did not reach the linearization disk within {} blocks",
        frame.depth
    )))
}

/// A frame seated at the cycle point whose basin component contains the
/// critical points (located by following the outer critical orbit).
pub fn critical_frame(p: &Parameter, cycle: &AttractingCycle) -> Result<KoenigsFrame> {
    let frame = KoenigsFrame::new(p, cycle)?;
    let (c1, _) = p.critical_points()?;
    let index = frame.limit_index(c1)?;
    if index == cycle.distinguished_index {
        return Ok(frame);
    }
    let mut reseated = cycle.clone();
    reseated.distinguished_index = index;
    KoenigsFrame::new(p, &reseated)
}

/// `κ(c1)` and `κ(c2)` for the frame.
fn critical_images(frame: &KoenigsFrame) -> Result<(Complex64, Complex64)> {
    let (c1, c2) = frame.parameter.critical_points()?;
    Ok((koenigs_value(frame, c1)?, koenigs_value(frame, c2)?))
}

/// `ν = arg κ(c1) ∈ (0, π)`.
pub fn critical_angle(p: &Parameter, cycle: &AttractingCycle) -> Result<f64> {
    if p.b() >= 1.0 {
        return Err(DsmError::InvalidParameter(
            "critical angle needs b < 1 (critical points on the circle)".into(),
        ));
    }
    let frame = critical_frame(p, cycle)?;
    let (k1, k2) = critical_images(&frame)?;
    angle_from_images(k1, k2)
}

fn angle_from_images(k1: Complex64, k2: Complex64) -> Result<f64> {
    let nu = k1.arg();
    if !(nu > 0.0 && nu < PI) {
        return Err(DsmError::CriticalAngleOutOfRange { arg: nu });
    }
    if (k2.arg() + nu).abs() > 1e-6 {
        return Err(DsmError::CrossCheck(format!(
            "arg κ(c2) = {} but arg κ(c1) = {nu}",
            k2.arg()
        )));
    }
    Ok(nu)
}

/// `Ξ = λ e^{2iν}` together with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformizingValue {
    pub xi: Complex64,
    pub lambda: f64,
    pub nu: f64,
}

/// Full uniformization record, including the tongue label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Uniformization {
    pub parameter: Parameter,
    pub value: UniformizingValue,
    pub orbit_type: OrbitType,
    pub cycle: AttractingCycle,
}

/// `Ξ(a, b)`, cross-checked against `λ κ(c1)/κ(c2)`.
pub fn uniformize(p: &Parameter) -> Result<UniformizingValue> {
    uniformize_full(p, DEFAULT_Q_MAX).map(|u| u.value)
}

pub fn uniformize_full(p: &Parameter, q_max: usize) -> Result<Uniformization> {
    if p.b() >= 1.0 {
        return Err(DsmError::InvalidParameter("uniformization is defined for b < 1".into()));
    }
    let (cycle, orbit_type) = match classify(p, q_max)? {
        TongueClassification::InTongue { cycle, orbit_type } => (cycle, orbit_type),
        TongueClassification::NoAttractingCycleFound => return Err(DsmError::NoAttractingCycle { q_max }),
    };
    let frame = critical_frame(p, &cycle)?;
    let (k1, k2) = critical_images(&frame)?;
    let nu = angle_from_images(k1, k2)?;
    let lambda = cycle.lambda;
    let xi = Complex64::from_polar(lambda, 2.0 * nu);
    let ratio = lambda * k1 / k2;
    if (ratio - xi).norm() > 1e-8 {
        return Err(DsmError::CrossCheck(format!(
            "λe^(2iν) = {xi} but λκ(c1)/κ(c2) = {ratio}"
        )));
    }
    let cycle = frame.cycle.clone();
    Ok(Uniformization {
        parameter: *p,
        value: UniformizingValue { xi, lambda, nu },
        orbit_type,
        cycle,
    })
}

/// Tuning for [`invert_uniformization`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    /// Largest continuation step in the disk.
    pub max_step: f64,
    /// Residual accepted at the final target.
    pub tol: f64,
    /// Residual accepted at intermediate waypoints.
    pub waypoint_tol: f64,
    pub fd_step: f64,
    pub max_halvings: usize,
    pub max_newton: usize,
    pub q_max: usize,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            max_step: 0.05,
            tol: 1e-10,
            waypoint_tol: 1e-8,
            fd_step: 1e-6,
            max_halvings: 20,
            max_newton: 40,
            q_max: DEFAULT_Q_MAX,
        }
    }
}

/// Polar data `(λ, ν)` of a point of `𝔻 \ [0, 1)`, with `ν ∈ (0, π)`.
fn polar_target(w: Complex64, window: &LinearizationWindow) -> Result<(f64, f64)> {
    let lambda = w.norm();
    let mut theta = w.arg();
    if theta < 0.0 {
        theta += TAU;
    }
    if !(theta > 0.0 && theta < TAU) || w.im == 0.0 && w.re >= 0.0 {
        return Err(DsmError::InvalidParameter(format!(
            "target {w} lies on the slit [0, 1)"
        )));
    }
    window.check(lambda)?;
    Ok((lambda, 0.5 * theta))
}

struct Inverter {
    label: OrbitType,
    options: InversionOptions,
}

impl Inverter {
    fn xi(&self, a: f64, b: f64) -> Result<Complex64> {
        let p = Parameter::new(a, b)?;
        let u = uniformize_full(&p, self.options.q_max)?;
        if u.orbit_type != self.label {
            return Err(DsmError::InvalidParameter(format!(
                "left the tongue: type {}/{} instead of {}/{}",
                u.orbit_type.k,
                u.orbit_type.denominator(),
                self.label.k,
                self.label.denominator()
            )));
        }
        Ok(u.value.xi)
    }

    fn jacobian(&self, a: f64, b: f64) -> Result<(Complex64, Complex64)> {
        let h = self.options.fd_step;
        let da = (self.xi(a + h, b)? - self.xi(a - h, b)?) / (2.0 * h);
        let db = if b + h < 1.0 {
            (self.xi(a, b + h)? - self.xi(a, b - h)?) / (2.0 * h)
        } else {
            (self.xi(a, b)? - self.xi(a, b - h)?) / h
        };
        Ok((da, db))
    }

    /// Damped Newton from `(a, b)` towards `Ξ = w`.
    fn solve(&self, mut a: f64, mut b: f64, w: Complex64, tol: f64, step: usize) -> Result<(f64, f64)> {
        let fail = |a: f64, b: f64, reason: String| DsmError::Continuation {
            step,
            reason,
            last_a: a,
            last_b: b,
        };
        let mut r = self.xi(a, b).map_err(|e| fail(a, b, e.to_string()))? - w;
        for _ in 0..self.options.max_newton {
            if r.norm() < tol {
                return Ok((a, b));
            }
            let (ja, jb) = self.jacobian(a, b).map_err(|e| fail(a, b, e.to_string()))?;
            let det = ja.re * jb.im - jb.re * ja.im;
            if det == 0.0 || !det.is_finite() {
                return Err(fail(a, b, "singular Jacobian".into()));
            }
            let da = -(jb.im * r.re - jb.re * r.im) / det;
            let db = -(-ja.im * r.re + ja.re * r.im) / det;
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=self.options.max_halvings {
                let (na, nb) = (a + t * da, b + t * db);
                if nb > 0.0 && nb < 1.0 {
                    if let Ok(x) = self.xi(na, nb) {
                        let nr = x - w;
                        if nr.norm() < r.norm() {
                            accepted = Some((na, nb, nr));
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            match accepted {
                Some((na, nb, nr)) => {
                    a = na;
                    b = nb;
                    r = nr;
                }
                None => return Err(fail(a, b, format!("Newton stalled at residual {:.3e}", r.norm()))),
            }
        }
        if r.norm() < tol {
            Ok((a, b))
        } else {
            Err(fail(a, b, format!("no convergence, residual {:.3e}", r.norm())))
        }
    }
}

/// Parameter in the tongue of `seed` with `Ξ = target`.
///
/// Continuation runs along the path that is linear in `(λ, ν)`, which stays
/// inside `𝔻 \ [0, 1)`, with steps of at most `max_step` in the disk.
pub fn invert_uniformization(seed: &Parameter, target: Complex64) -> Result<Parameter> {
    invert_with(seed, target, InversionOptions::default())
}

pub fn invert_with(seed: &Parameter, target: Complex64, options: InversionOptions) -> Result<Parameter> {
    let window = LinearizationWindow::default();
    let (lambda1, nu1) = polar_target(target, &window)?;
    let start = uniformize_full(seed, options.q_max)?;
    let inverter = Inverter {
        label: start.orbit_type,
        options,
    };
    let (lambda0, nu0) = (start.value.lambda, start.value.nu);
    let length = (lambda1 - lambda0).abs() + 2.0 * lambda0.max(lambda1) * (nu1 - nu0).abs();
    let steps = ((length / options.max_step).ceil() as usize).max(1);
    let (mut a, mut b) = (seed.a(), seed.b());
    for s in 1..=steps {
        let t = s as f64 / steps as f64;
        let lambda = lambda0 + t * (lambda1 - lambda0);
        let nu = nu0 + t * (nu1 - nu0);
        let w = if s == steps {
            target
        } else {
            Complex64::from_polar(lambda, 2.0 * nu)
        };
        let tol = if s == steps { options.tol } else { options.waypoint_tol };
        let (na, nb) = inverter.solve(a, b, w, tol, s)?;
        a = na;
        b = nb;
    }
    Parameter::new(a, b)
}

/// Parameters on the internal ray at angle `ν` with multipliers `lambdas`.
pub fn trace_internal_ray(seed: &Parameter, nu: f64, lambdas: &[f64]) -> Result<Vec<Parameter>> {
    if !(nu > 0.0 && nu < PI) {
        return Err(DsmError::InvalidParameter(format!("ray angle {nu} not in (0, π)")));
    }
    let mut current = *seed;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        current = invert_uniformization(&current, Complex64::from_polar(lambda, 2.0 * nu))?;
        out.push(current);
    }
    Ok(out)
}

/// A ceiling parameter `(a, 1)` whose critical point `1/2` has exact period `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperattractingParameter {
    pub a: f64,
    pub orbit_type: OrbitType,
}

/// All `a ∈ [-1/2, 1/2)` with `f_{a,1}^q(1/2) ≡ 1/2` of exact period `q`.
///
/// On the lift `G(a) = F_{a,1}^q(1/2) - 1/2` is strictly increasing with
/// `G(-1/2) = 0` and `G(1/2) = 2^q - 1`, so each integer level in between
/// has exactly one root, found by bisection.
pub fn superattracting_parameters(q: usize) -> Vec<SuperattractingParameter> {
    if q == 0 || q > 30 {
        return Vec::new();
    }
    let orbit_end = |a: f64| -> f64 {
        let p = Parameter::new(a, 1.0).expect("b = 1 is valid");
        // f(1/2) = 1 + a exactly on the lift
        let mut x = 1.0 + a;
        for _ in 1..q {
            x = 2.0 * x + a + (TAU * x).sin() / PI;
        }
        let _ = p;
        x - 0.5
    };
    let levels = (1u64 << q) - 1;
    let mut out = Vec::new();
    for m in 0..levels {
        let level = m as f64;
        let (mut lo, mut hi) = (-0.5, 0.5);
        // the lowest level is hit exactly at the left endpoint
        if orbit_end(lo) - level >= -1e-13 {
            hi = lo;
        }
        while hi - lo > 1e-16 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if orbit_end(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = if hi == -0.5 { -0.5 } else { 0.5 * (lo + hi) };
        let a = canonical_angle(a);
        let p = Parameter::new(a, 1.0).expect("valid");
        // exact period of 1/2
        let mut x = 0.5;
        let mut period = q;
        for d in 1..=q {
            x = p.step_centered(x);
            if q.is_multiple_of(d) && crate::map::circle_distance(x, 0.5) < 1e-9 {
                period = d;
                break;
            }
        }
        if period != q {
            continue;
        }
        if let Ok(orbit_type) = cycles::orbit_type_of_point(&p, 0.5, q) {
            out.push(SuperattractingParameter { a, orbit_type });
        }
    }
    out.sort_by(|u, v| u.a.total_cmp(&v.a));
    out
}

//! Attracting cycles of `f_{a,b}` on the circle, their multipliers, and the
//! combinatorial type obtained from the semi-conjugacy to the doubling map.

use serde::Serialize;

use crate::error::{DsmError, Result};
use crate::map::{circle_distance, wrap_centered, wrap_unit, Parameter};

/// Burn-in length for the seed orbit of `x = 1/2`.
pub const BURN_IN: usize = 2000;
/// Closeness required between `x_N` and `x_{N+q}` to call the orbit periodic.
pub const DETECT_TOL: f64 = 1e-6;
/// Cycles with `λ > 1 - ATTRACTING_MARGIN` are treated as not found.
pub const ATTRACTING_MARGIN: f64 = 1e-6;
/// Default depth of the `φ` series.
pub const PHI_DEPTH: usize = 60;
const PHI_MAX_DEPTH: usize = 200;

/// An attracting cycle on the circle, ordered by the dynamics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractingCycle {
    pub period: usize,
    /// `points[i + 1] = f(points[i])`, each in `[0, 1)`.
    pub points: Vec<f64>,
    pub lambda: f64,
    pub distinguished_index: usize,
}

impl AttractingCycle {
    pub fn distinguished(&self) -> f64 {
        self.points[self.distinguished_index]
    }

    /// Same cycle, starting from `points[shift]`.
    pub fn rotated(&self, shift: usize) -> AttractingCycle {
        let q = self.period;
        let points = (0..q).map(|i| self.points[(i + shift) % q]).collect();
        AttractingCycle {
            period: q,
            points,
            lambda: self.lambda,
            distinguished_index: (self.distinguished_index + q - shift % q) % q,
        }
    }
}

/// The type `k/(2^q - 1)` of an attracting cycle: the image of its
/// distinguished point under the semi-conjugacy to the doubling map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitType {
    pub k: u64,
    pub q: usize,
}

impl OrbitType {
    pub fn denominator(&self) -> u64 {
        (1u64 << self.q) - 1
    }

    pub fn value(&self) -> f64 {
        self.k as f64 / self.denominator() as f64
    }

    /// Type of the mirrored parameter `(-a, b)`.
    pub fn mirrored(&self) -> OrbitType {
        let d = self.denominator();
        OrbitType {
            k: (d - self.k) % d,
            q: self.q,
        }
    }

    /// Exact period of `k/(2^q - 1)` under doubling.
    pub fn doubling_period(k: u64, q: usize) -> usize {
        let d = (1u64 << q) - 1;
        let mut x = k % d;
        for n in 1..=q {
            x = (2 * x) % d;
            if x == k % d {
                return n;
            }
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TongueClassification {
    NoAttractingCycleFound,
    InTongue {
        cycle: AttractingCycle,
        orbit_type: OrbitType,
    },
}

impl TongueClassification {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, TongueClassification::InTongue { .. })
    }

    /// `(period, k)` when in a tongue.
    pub fn label(&self) -> Option<(usize, u64)> {
        match self {
            TongueClassification::InTongue { orbit_type, .. } => Some((orbit_type.q, orbit_type.k)),
            TongueClassification::NoAttractingCycleFound => None,
        }
    }
}

/// Solves `F^q(x) - x - m = 0` on the lift by Newton's method.
pub(crate) fn polish_periodic(p: &Parameter, x0: f64, q: usize, m: f64) -> Option<f64> {
    let mut x = x0;
    for _ in 0..60 {
        let (y, d) = p.lift_iterate(x, q);
        let g = y - x - m;
        let dg = d - 1.0;
        if dg == 0.0 || !dg.is_finite() {
            return None;
        }
        let step = g / dg;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Some(x);
        }
    }
    let (y, _) = p.lift_iterate(x, q);
    ((y - x - m).abs() < 1e-12).then_some(x)
}

/// Seed orbit of `1/2` after `steps` iterations, in `[-1/2, 1/2]`.
///
/// Starts from `f(1/2) = a` exactly, so that mirrored parameters produce
/// exactly negated orbits.
fn half_orbit(p: &Parameter, steps: usize) -> f64 {
    let mut x = p.a();
    for _ in 1..steps {
        x = p.step_centered(x);
    }
    x
}

/// Looks for an attracting cycle of period at most `q_max` attracting the orbit of `1/2`.
///
/// `points[distinguished_index]` is the cycle point approached by the orbit of
/// `1/2` at times divisible by the period.
pub fn find_attracting_cycle(p: &Parameter, q_max: usize, tol: f64) -> Option<AttractingCycle> {
    if p.b() <= 0.0 || q_max == 0 {
        return None;
    }
    let mut x = half_orbit(p, BURN_IN);
    let mut y = x;
    let mut period = None;
    for q in 1..=q_max {
        y = p.step_centered(y);
        if circle_distance(x, y) < tol {
            period = Some(q);
            break;
        }
    }
    let q = period?;
    // Advance to a time divisible by q so that x tracks the distinguished point.
    let mut steps = BURN_IN;
    while !steps.is_multiple_of(q) {
        x = p.step_centered(x);
        steps += 1;
    }
    let (fx, _) = p.lift_iterate(x, q);
    let m = (fx - x).round();
    let x = polish_periodic(p, x, q, m)?;
    if !x.is_finite() {
        return None;
    }
    let mut pts = Vec::with_capacity(q);
    let mut z = wrap_centered(x);
    let mut lambda = 1.0;
    for _ in 0..q {
        pts.push(z);
        lambda *= p.deriv(z);
        z = p.step_centered(z);
    }
    if circle_distance(z, pts[0]) > 1e-9 {
        return None;
    }
    // Exact period: no proper divisor may close the orbit.
    for d in 1..q {
        if q % d == 0 && circle_distance(pts[d], pts[0]) < 1e-9 {
            return None;
        }
    }
    if !(0.0..=1.0 - ATTRACTING_MARGIN).contains(&lambda) {
        return None;
    }
    Some(AttractingCycle {
        period: q,
        points: pts.into_iter().map(wrap_unit).collect(),
        lambda,
        distinguished_index: 0,
    })
}

/// Product of `f'` over the cycle.
pub fn multiplier(p: &Parameter, cycle: &AttractingCycle) -> Result<f64> {
    let lambda: f64 = cycle.points.iter().map(|&x| p.deriv(x)).product();
    if lambda >= 1.0 {
        return Err(DsmError::InvalidParameter(format!(
            "cycle is not attracting (multiplier {lambda})"
        )));
    }
    Ok(lambda)
}

/// `F^n(x)/2^n mod 1`, which approximates `φ(x)` with error at most
/// `(1/2 + b/π)/2^n`.
///
/// Summed as `x + Σ_{j<n} (F(x_j) - 2x_j)/2^{j+1}` along the reduced orbit so
/// the lift never has to be carried to `2^n`.
pub fn semiconjugacy_phi(p: &Parameter, x: f64, n: usize) -> f64 {
    wrap_unit(phi_centered(p, x, n))
}

fn phi_centered(p: &Parameter, x: f64, n: usize) -> f64 {
    let mut y = wrap_centered(x);
    let mut acc = 0.0;
    let mut scale = 0.5;
    for _ in 0..n {
        acc += scale * p.displacement(y);
        scale *= 0.5;
        y = p.step_centered(y);
    }
    wrap_centered(wrap_centered(x) + acc)
}

/// A priori error of [`semiconjugacy_phi`] at depth `n`.
pub fn phi_error_bound(p: &Parameter, n: usize) -> f64 {
    (0.5 + p.b() / std::f64::consts::PI) * 0.5f64.powi(n as i32)
}

/// Rounds `φ(distinguished point)` to the nearest `k/(2^q - 1)`.
pub fn orbit_type(p: &Parameter, cycle: &AttractingCycle) -> Result<OrbitType> {
    orbit_type_of_point(p, cycle.distinguished(), cycle.period)
}

pub(crate) fn orbit_type_of_point(p: &Parameter, x: f64, q: usize) -> Result<OrbitType> {
    let denominator = (1u64 << q) - 1;
    let quarter_gap = 0.25 / denominator as f64;
    let mut depth = PHI_DEPTH;
    while phi_error_bound(p, depth) >= quarter_gap && depth < PHI_MAX_DEPTH {
        depth += 20;
    }
    loop {
        let v = phi_centered(p, x, depth);
        let scaled = v * denominator as f64;
        let k_raw = scaled.round();
        let offset = (scaled - k_raw).abs();
        if offset < 0.25 {
            let k = (k_raw as i64).rem_euclid(denominator as i64) as u64;
            if OrbitType::doubling_period(k, q) != q {
                return Err(DsmError::TypePeriodMismatch { k, denominator, q });
            }
            return Ok(OrbitType { k, q });
        }
        if depth >= PHI_MAX_DEPTH {
            return Err(DsmError::AmbiguousType { depth, offset });
        }
        depth = (depth + 40).min(PHI_MAX_DEPTH);
    }
}

/// Index of the cycle point whose immediate-basin arc contains `1/2`,
/// falling back to the orbit phase of `1/2` if no arc contains it.
pub fn distinguished_point(p: &Parameter, cycle: &AttractingCycle) -> Result<usize> {
    match crate::repeller::immediate_basin_arcs(p, cycle) {
        Ok(arcs) => arcs.index_containing(0.5).ok_or(DsmError::NoDistinguishedArc),
        Err(_) => orbit_phase_index(p, cycle),
    }
}

/// Index of the cycle point tracked by `f^{nq}(1/2)` for large `n`.
pub fn orbit_phase_index(p: &Parameter, cycle: &AttractingCycle) -> Result<usize> {
    let q = cycle.period;
    let steps = (BURN_IN / q + 1) * q;
    let x = half_orbit(p, steps);
    cycle
        .points
        .iter()
        .enumerate()
        .map(|(i, &c)| (i, circle_distance(c, x)))
        .min_by(|u, v| u.1.total_cmp(&v.1))
        .filter(|&(_, d)| d < 1e-6)
        .map(|(i, _)| i)
        .ok_or(DsmError::NoDistinguishedArc)
}

/// Finds the attracting cycle and its type.
pub fn classify(p: &Parameter, q_max: usize) -> Result<TongueClassification> {
    let Some(cycle) = find_attracting_cycle(p, q_max, DETECT_TOL) else {
        return Ok(TongueClassification::NoAttractingCycleFound);
    };
    let orbit_type = orbit_type(p, &cycle)?;
    Ok(TongueClassification::InTongue { cycle, orbit_type })
}

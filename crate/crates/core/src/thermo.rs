//! Pressure of the potential `-t log f'` on `C_{a,b}`, the Bowen root
//! `t* = dim_H C_{a,b}`, dimension tables over a tongue, and a smoothness
//! diagnostic for such tables.
//!
//! Pressure at rank `n` is bracketed by the spectral radii of two weighted
//! transfer matrices on the rank-`(n-1)` cylinders: each rank-`n` cylinder `C`
//! is an edge from its prefix to `f(C)`, weighted by `(min_C f')^{-t}` for the
//! upper bound and `(max_C f')^{-t}` for the lower bound (swapped for `t < 0`).
//! Path sums of these matrices dominate, respectively are dominated by, the
//! cylinder sums that define the pressure, and the spectral radii themselves
//! are bracketed by Collatz–Wielandt ratios, so both bounds are rigorous up to
//! rounding. The upper bound is non-increasing and the lower bound
//! non-decreasing in the rank.

use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{classify, AttractingCycle, OrbitType, TongueClassification};
use crate::error::{DsmError, Result};
use crate::linearize::{uniformize_full, DEFAULT_Q_MAX};
use crate::map::{wrap_centered, Parameter};
use crate::repeller::{
    deriv_range, immediate_basin_arcs, markov_partition, CylinderLevel, MarkovPartition, Refinement,
};

/// Rank schedule for [`bowen_dimension`].
pub const RANK_SCHEDULE: [usize; 3] = [8, 16, 18];

const POWER_MAX_ITER: usize = 20_000;
const POWER_RATIO_TOL: f64 = 1e-14;
/// Relative slack applied to Collatz–Wielandt ratios for rounding.
const ROUNDING_SLACK: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureBracket {
    pub t: f64,
    pub rank: usize,
    pub lower: f64,
    pub upper: f64,
}

impl PressureBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn is_positive(&self) -> bool {
        self.lower > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.upper < 0.0
    }
}

/// Transfer graph at one rank, reusable across values of `t`.
#[derive(Debug, Clone)]
pub struct PressureModel {
    pub rank: usize,
    states: usize,
    /// CSR rows by prefix state.
    row_start: Vec<usize>,
    target: Vec<u32>,
    log_min: Vec<f64>,
    log_max: Vec<f64>,
}

impl PressureModel {
    /// Builds the graph from the current level of `refinement` (rank ≥ 2).
    pub fn from_level(part: &MarkovPartition, level: &CylinderLevel, states: usize) -> Result<PressureModel> {
        if level.rank < 2 {
            return Err(DsmError::InvalidParameter("pressure needs rank >= 2".into()));
        }
        let p = &part.parameter;
        let ranges: Vec<(f64, f64)> = level
            .cylinders
            .par_iter()
            .map(|c| deriv_range(p, c.left, c.right))
            .collect();
        if let Some(&(lo, _)) = ranges.iter().find(|r| !(r.0 > 0.0)) {
            return Err(DsmError::MarkovViolation(format!(
                "f' = {lo} is not positive on a cylinder"
            )));
        }
        let mut order: Vec<usize> = (0..level.len()).collect();
        order.sort_by_key(|&e| (level.prefix[e], e));
        let mut row_start = vec![0usize; states + 1];
        for &e in &order {
            row_start[level.prefix[e] as usize + 1] += 1;
        }
        for i in 0..states {
            row_start[i + 1] += row_start[i];
        }
        Ok(PressureModel {
            rank: level.rank,
            states,
            row_start,
            target: order.iter().map(|&e| level.suffix[e]).collect(),
            log_min: order.iter().map(|&e| ranges[e].0.ln()).collect(),
            log_max: order.iter().map(|&e| ranges[e].1.ln()).collect(),
        })
    }

    pub fn edges(&self) -> usize {
        self.target.len()
    }

    /// `log ρ` bracket of the matrix with edge weights `exp(-t log f')`.
    fn log_radius(&self, log_deriv: &[f64], t: f64) -> (f64, f64) {
        let weights: Vec<f64> = log_deriv.iter().map(|&l| (-t * l).exp()).collect();
        // (M + I) has the same Perron vector and is aperiodic.
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..self.states)
                .into_par_iter()
                .with_min_len(1024)
                .map(|i| {
                    let mut s = v[i];
                    for e in self.row_start[i]..self.row_start[i + 1] {
                        s += weights[e] * v[self.target[e] as usize];
                    }
                    s
                })
                .collect()
        };
        let mut v = vec![1.0; self.states];
        let (mut lo, mut hi) = (0.0, f64::INFINITY);
        for _ in 0..POWER_MAX_ITER {
            let w = apply(&v);
            let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
            for (a, b) in w.iter().zip(&v) {
                let r = a / b;
                rmin = rmin.min(r);
                rmax = rmax.max(r);
            }
            lo = f64::max(lo, rmin - 1.0);
            hi = f64::min(hi, rmax - 1.0);
            if hi - lo <= POWER_RATIO_TOL * hi {
                break;
            }
            let norm = w.iter().fold(0.0f64, |m, &x| m.max(x));
            v = w.into_iter().map(|x| x / norm).collect();
        }
        let lo = (lo * (1.0 - ROUNDING_SLACK)).max(f64::MIN_POSITIVE);
        let hi = hi * (1.0 + ROUNDING_SLACK);
        (lo.ln(), hi.ln())
    }

    pub fn bracket(&self, t: f64) -> PressureBracket {
        // Large f' makes (f')^{-t} small for t > 0.
        let (upper_weights, lower_weights) = if t >= 0.0 {
            (&self.log_min, &self.log_max)
        } else {
            (&self.log_max, &self.log_min)
        };
        let (_, upper) = self.log_radius(upper_weights, t);
        let (lower, _) = self.log_radius(lower_weights, t);
        PressureBracket {
            t,
            rank: self.rank,
            lower,
            upper,
        }
    }
}

/// Cylinder refinement plus the pressure model at the current rank.
#[derive(Debug, Clone)]
pub struct PressureSolver {
    refinement: Refinement,
    model: Option<PressureModel>,
}

impl PressureSolver {
    pub fn new(part: MarkovPartition) -> PressureSolver {
        PressureSolver {
            refinement: Refinement::new(part),
            model: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.model.as_ref().map_or(0, |m| m.rank)
    }

    pub fn refinement(&self) -> &Refinement {
        &self.refinement
    }

    /// Moves to rank `n` (≥ 2); the rank can only grow.
    pub fn set_rank(&mut self, n: usize) -> Result<&PressureModel> {
        if n < 2 {
            return Err(DsmError::InvalidParameter("pressure needs rank >= 2".into()));
        }
        if self.model.as_ref().is_none_or(|m| m.rank != n) {
            if self.refinement.rank() >= n {
                return Err(DsmError::InvalidParameter(format!(
                    "cannot coarsen from rank {} to {n}",
                    self.refinement.rank()
                )));
            }
            self.refinement.advance_to(n - 1)?;
            let states = self.refinement.level().len();
            self.refinement.advance()?;
            let model = PressureModel::from_level(self.refinement.partition(), self.refinement.level(), states)?;
            self.model = Some(model);
        }
        Ok(self.model.as_ref().expect("model set"))
    }

    pub fn bracket(&mut self, t: f64, rank: usize) -> Result<PressureBracket> {
        Ok(self.set_rank(rank)?.bracket(t))
    }
}

pub fn pressure_bracket(_p: &Parameter, part: &MarkovPartition, t: f64, rank: usize) -> Result<PressureBracket> {
    PressureSolver::new(part.clone()).bracket(t, rank)
}

/// Attracting cycle, tongue label and Markov partition of an in-tongue parameter.
#[derive(Debug, Clone)]
pub struct ChaoticSet {
    pub cycle: AttractingCycle,
    pub orbit_type: OrbitType,
    pub partition: MarkovPartition,
}

pub fn chaotic_set(p: &Parameter, q_max: usize) -> Result<ChaoticSet> {
    let (cycle, orbit_type) = match classify(p, q_max)? {
        TongueClassification::InTongue { cycle, orbit_type } => (cycle, orbit_type),
        TongueClassification::NoAttractingCycleFound => return Err(DsmError::NoAttractingCycle { q_max }),
    };
    let arcs = immediate_basin_arcs(p, &cycle)?;
    let partition = markov_partition(p, &arcs)?;
    Ok(ChaoticSet {
        cycle,
        orbit_type,
        partition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub t_star: f64,
    pub t_lower: f64,
    pub t_upper: f64,
    pub rank: usize,
    /// False when the rank cap was reached before the width met `tol`.
    pub certified: bool,
}

impl DimensionEstimate {
    pub fn width(&self) -> f64 {
        self.t_upper - self.t_lower
    }
}

/// Bowen root of `t ↦ P(-t log f')` for an in-tongue parameter.
pub fn bowen_dimension(p: &Parameter, tol: f64) -> Result<DimensionEstimate> {
    let set = chaotic_set(p, DEFAULT_Q_MAX)?;
    bowen_root(PressureSolver::new(set.partition), tol)
}

/// Certified bisection on `t ∈ [0, 1]` followed by the root of the midpoint
/// pressure inside the final bracket.
pub fn bowen_root(mut solver: PressureSolver, tol: f64) -> Result<DimensionEstimate> {
    if !(tol > 0.0) {
        return Err(DsmError::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let mut schedule = RANK_SCHEDULE.iter().copied();
    let mut rank = schedule.next().expect("schedule");
    solver.set_rank(rank)?;
    let (mut lo, mut hi) = (0.0, 1.0);
    // P(1) < 0 needs certification too.
    loop {
        if solver.bracket(hi, rank)?.is_negative() {
            break;
        }
        match schedule.next() {
            Some(r) => rank = r,
            None => {
                return Err(DsmError::InvalidParameter(
                    "pressure at t = 1 is not certifiably negative".into(),
                ))
            }
        }
    }
    let mut certified = true;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let b = solver.bracket(mid, rank)?;
        if b.is_positive() {
            lo = mid;
        } else if b.is_negative() {
            hi = mid;
        } else if let Some(r) = schedule.next() {
            rank = r;
        } else {
            certified = false;
            break;
        }
    }
    let model = solver.set_rank(rank)?;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if model.bracket(mid).midpoint() > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(DimensionEstimate {
        t_star: 0.5 * (a + b),
        t_lower: lo,
        t_upper: hi,
        rank,
        certified,
    })
}

/// Box-counting estimate of `dim C_{a,b}` from dyadic boxes of side `2^{-k}`,
/// `k ∈ scales`, meeting `C_{a,b}`. Cylinders are refined individually until
/// shorter than `box / 16`.
pub fn box_counting_dimension(
    p: &Parameter,
    part: &MarkovPartition,
    scales: std::ops::RangeInclusive<u32>,
) -> Result<BoxCount> {
    let _ = p;
    let mut counts = Vec::new();
    for k in scales {
        counts.push((k, count_boxes(part, k)?));
    }
    if counts.len() < 2 {
        return Err(DsmError::InvalidParameter("need at least two box scales".into()));
    }
    let xs: Vec<f64> = counts.iter().map(|&(k, _)| k as f64 * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(BoxCount {
        slope: sxy / sxx,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCount {
    pub slope: f64,
    /// `(k, N(2^{-k}))`
    pub counts: Vec<(u32, usize)>,
}

fn count_boxes(part: &MarkovPartition, k: u32) -> Result<usize> {
    let cells = 1usize << k;
    let side = 1.0 / cells as f64;
    let stop = side / 16.0;
    let mut hit = vec![false; cells];
    let mark = |hit: &mut Vec<bool>, lo: f64, hi: f64| {
        let first = (lo / side).floor() as i64;
        let last = (hi / side).floor() as i64;
        for c in first..=last {
            hit[c.rem_euclid(cells as i64) as usize] = true;
        }
    };
    // Depth-first over cylinders: (interval, branches from the first symbol).
    let mut stack: Vec<(f64, f64, usize, Vec<usize>)> = part
        .intervals
        .iter()
        .enumerate()
        .map(|(i, r)| (r.lo, r.hi, i, Vec::new()))
        .collect();
    let out: Vec<Vec<usize>> = (0..part.len())
        .map(|i| {
            (0..part.branches.len())
                .filter(|&e| part.branches[e].from == i)
                .collect()
        })
        .collect();
    while let Some((lo, hi, last, path)) = stack.pop() {
        if hi - lo < stop {
            mark(&mut hit, lo, hi);
            continue;
        }
        for &e in &out[last] {
            let br = &part.branches[e];
            let target = part.intervals[br.to];
            let mut l = part.invert(br, target.lo + br.shift)?;
            let mut r = part.invert(br, target.hi + br.shift)?;
            for &f in path.iter().rev() {
                let b = &part.branches[f];
                l = part.invert(b, l + b.shift)?;
                r = part.invert(b, r + b.shift)?;
            }
            let mut next = path.clone();
            next.push(e);
            stack.push((l, r, br.to, next));
        }
    }
    Ok(hit.iter().filter(|&&h| h).count())
}

/// One row of a dimension table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub a: f64,
    pub b: f64,
    pub lambda: Option<f64>,
    pub nu: Option<f64>,
    pub t_lower: Option<f64>,
    pub t_star: Option<f64>,
    pub t_upper: Option<f64>,
    pub rank: Option<usize>,
    pub status: String,
}

impl DimensionRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn dimension_row(p: &Parameter, label: Option<OrbitType>, tol: f64) -> DimensionRow {
    let mut row = DimensionRow {
        a: p.a(),
        b: p.b(),
        lambda: None,
        nu: None,
        t_lower: None,
        t_star: None,
        t_upper: None,
        rank: None,
        status: String::new(),
    };
    let set = match chaotic_set(p, DEFAULT_Q_MAX) {
        Ok(s) => s,
        Err(e) => {
            row.status = e.status().into();
            return row;
        }
    };
    row.lambda = Some(set.cycle.lambda);
    if label.is_some_and(|l| l != set.orbit_type) {
        row.status = "different_tongue".into();
        return row;
    }
    if p.b() < 1.0 {
        row.nu = uniformize_full(p, DEFAULT_Q_MAX).ok().map(|u| u.value.nu);
    }
    match bowen_root(PressureSolver::new(set.partition), tol) {
        Ok(d) => {
            row.t_lower = Some(d.t_lower);
            row.t_star = Some(d.t_star);
            row.t_upper = Some(d.t_upper);
            row.rank = Some(d.rank);
            row.status = if d.certified { "ok" } else { "rank_cap" }.into();
        }
        Err(e) => row.status = e.status().into(),
    }
    row
}

/// Dimension estimates over `grid`, all expected in the tongue of `seed`.
/// Rows are evaluated in parallel and returned in grid order; failures are
/// recorded in `status`.
pub fn dimension_field(seed: &Parameter, grid: &[Parameter], tol: f64) -> Result<Vec<DimensionRow>> {
    let label = chaotic_set(seed, DEFAULT_Q_MAX)?.orbit_type;
    Ok(grid.par_iter().map(|p| dimension_row(p, Some(label), tol)).collect())
}

fn csv_field<T: std::fmt::Debug>(x: Option<T>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

pub const DIMENSION_CSV_HEADER: &str = "a,b,lambda,nu,t_lower,t_star,t_upper,rank,status";

pub fn dimension_csv(rows: &[DimensionRow]) -> String {
    let mut s = String::from(DIMENSION_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{:?},{:?},{},{},{},{},{},{},{}\n",
            r.a,
            r.b,
            csv_field(r.lambda),
            csv_field(r.nu),
            csv_field(r.t_lower),
            csv_field(r.t_star),
            csv_field(r.t_upper),
            csv_field(r.rank),
            r.status
        ));
    }
    s
}

pub fn write_dimension_csv(path: &Path, rows: &[DimensionRow]) -> Result<()> {
    let io_err = |e: std::io::Error| DsmError::Io {
        context: path.display().to_string(),
        message: e.to_string(),
    };
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    f.write_all(dimension_csv(rows).as_bytes()).map_err(io_err)
}

/// Least-squares fit quality at one polynomial degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeResidual {
    pub degree: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub samples: usize,
    pub median_width: f64,
    pub threshold: f64,
    pub residuals: Vec<DegreeResidual>,
    pub best_degree: usize,
    pub pass: bool,
}

impl SmoothnessReport {
    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

impl std::fmt::Display for SmoothnessReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "samples {}  median bracket width {:.3e}  threshold {:.3e}",
            self.samples, self.median_width, self.threshold
        )?;
        for r in &self.residuals {
            writeln!(f, "  degree {}  max residual {:.3e}", r.degree, r.max_residual)?;
        }
        write!(f, "{} (best degree {})", self.verdict(), self.best_degree)
    }
}

/// Fits `t*` along the sample path by polynomials of degree 3..=6 in
/// normalized arclength and compares the worst residual with the typical
/// certified bracket width.
pub fn smoothness_diagnostic(samples: &[DimensionRow]) -> Result<SmoothnessReport> {
    let rows: Vec<&DimensionRow> = samples.iter().filter(|r| r.is_ok() && r.t_star.is_some()).collect();
    if rows.len() < 8 {
        return Err(DsmError::DegeneratePath(format!(
            "need at least 8 usable samples, have {}",
            rows.len()
        )));
    }
    let mut s = vec![0.0];
    for w in rows.windows(2) {
        let da = wrap_centered(w[1].a - w[0].a);
        let db = w[1].b - w[0].b;
        let step = da.hypot(db);
        if step == 0.0 {
            return Err(DsmError::DegeneratePath(format!(
                "repeated parameter ({}, {})",
                w[1].a, w[1].b
            )));
        }
        s.push(s.last().unwrap() + step);
    }
    let total = *s.last().unwrap();
    let x: Vec<f64> = s.iter().map(|v| 2.0 * v / total - 1.0).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.t_star.unwrap()).collect();
    let mut widths: Vec<f64> = rows
        .iter()
        .map(|r| r.t_upper.unwrap_or(f64::NAN) - r.t_lower.unwrap_or(f64::NAN))
        .collect();
    widths.sort_by(f64::total_cmp);
    let m = widths.len();
    let median_width = if m % 2 == 1 {
        widths[m / 2]
    } else {
        0.5 * (widths[m / 2 - 1] + widths[m / 2])
    };
    let threshold = 3.0 * median_width;
    let mut residuals = Vec::new();
    for degree in 3..=6usize {
        if degree + 1 >= x.len() {
            break;
        }
        let fit = chebyshev_fit(&x, &y, degree);
        let max_residual = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| (chebyshev_eval(&fit, xi) - yi).abs())
            .fold(0.0, f64::max);
        residuals.push(DegreeResidual { degree, max_residual });
    }
    let best = residuals
        .iter()
        .min_by(|u, v| u.max_residual.total_cmp(&v.max_residual))
        .copied()
        .expect("at least one degree");
    Ok(SmoothnessReport {
        samples: rows.len(),
        median_width,
        threshold,
        pass: residuals.iter().any(|r| r.max_residual <= threshold),
        best_degree: best.degree,
        residuals,
    })
}

fn chebyshev_row(x: f64, degree: usize) -> Vec<f64> {
    let mut t = vec![1.0, x];
    while t.len() <= degree {
        let n = t.len();
        t.push(2.0 * x * t[n - 1] - t[n - 2]);
    }
    t.truncate(degree + 1);
    t
}

fn chebyshev_eval(c: &[f64], x: f64) -> f64 {
    chebyshev_row(x, c.len() - 1).iter().zip(c).map(|(t, c)| t * c).sum()
}

/// Least-squares Chebyshev coefficients via SVD.
fn chebyshev_fit(x: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    let design = DMatrix::from_fn(x.len(), degree + 1, |i, j| chebyshev_row(x[i], degree)[j]);
    let rhs = DVector::from_column_slice(y);
    design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .expect("U and V were requested")
        .iter()
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn solver(a: f64, b: f64) -> PressureSolver {
        let p = Parameter::new(a, b).unwrap();
        PressureSolver::new(chaotic_set(&p, 8).unwrap().partition)
    }

    #[test]
    fn zero_pressure_is_log_two() {
        let mut s = solver(0.5, 0.75);
        for rank in [4, 9, 14] {
            let b = s.bracket(0.0, rank).unwrap();
            assert!((b.lower - LN_2).abs() < 1e-9 && (b.upper - LN_2).abs() < 1e-9, "{b:?}");
        }
        let level = s.refinement().level();
        let words = (level.len() as f64).ln() / (level.rank - 1) as f64;
        assert!((words - LN_2).abs() < 0.02, "{words}");
    }

    #[test]
    fn brackets_shrink_and_nest() {
        let mut s = solver(0.5, 0.75);
        let mut last: Option<PressureBracket> = None;
        for rank in [6, 8, 10, 12, 14] {
            let b = s.bracket(0.7, rank).unwrap();
            assert!(b.lower <= b.upper);
            if let Some(prev) = last {
                assert!(b.width() < prev.width());
                assert!(b.upper <= prev.upper + 1e-9 && b.lower >= prev.lower - 1e-9);
            }
            last = Some(b);
        }
    }

    #[test]
    fn monotone_in_t() {
        let mut s = solver(0.5, 0.75);
        let mut last = s.bracket(-0.5, 10).unwrap();
        for i in 0..=12 {
            let b = s.bracket(-0.4 + 0.125 * i as f64, 10).unwrap();
            assert!(b.lower < last.lower && b.upper < last.upper);
            last = b;
        }
        assert!(s.bracket(0.5, 10).unwrap().lower > s.bracket(0.9, 10).unwrap().upper);
    }

    #[test]
    fn bowen_root_is_certified() {
        let p = Parameter::new(0.5, 0.75).unwrap();
        let d = bowen_dimension(&p, 1e-2).unwrap();
        assert!(d.certified && d.width() <= 1e-2 && d.rank <= 16);
        assert!(0.0 < d.t_lower && d.t_lower <= d.t_star && d.t_star <= d.t_upper && d.t_upper < 1.0);
        let mut s = solver(0.5, 0.75);
        assert!(s.bracket(d.t_lower, d.rank).unwrap().is_positive());
        assert!(s.bracket(d.t_upper, d.rank).unwrap().is_negative());
        assert_eq!(bowen_dimension(&p, 1e-2).unwrap(), d);
    }

    #[test]
    fn chebyshev_fit_is_exact_on_polynomials() {
        let x: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| 1.0 - 2.0 * t + 0.5 * t * t * t).collect();
        let c = chebyshev_fit(&x, &y, 4);
        for (&xi, &yi) in x.iter().zip(&y) {
            assert!((chebyshev_eval(&c, xi) - yi).abs() < 1e-13);
        }
    }

    fn synthetic_rows(width: f64) -> Vec<DimensionRow> {
        (0..8)
            .map(|i| {
                let b = 0.6 + 0.05 * i as f64;
                let t = 0.4 + 0.3 * (b - 0.6) - 0.2 * (b - 0.6) * (b - 0.6);
                DimensionRow {
                    a: 0.5,
                    b,
                    lambda: None,
                    nu: None,
                    t_lower: Some(t - 0.5 * width),
                    t_star: Some(t),
                    t_upper: Some(t + 0.5 * width),
                    rank: Some(8),
                    status: "ok".into(),
                }
            })
            .collect()
    }

    #[test]
    fn smoothness_control() {
        let w = 1e-3;
        let mut rows = synthetic_rows(w);
        let report = smoothness_diagnostic(&rows).unwrap();
        assert!(report.pass);
        assert_eq!(report.residuals.len(), 4);
        rows[3].t_star = Some(rows[3].t_star.unwrap() + 10.0 * w);
        let report = smoothness_diagnostic(&rows).unwrap();
        assert!(!report.pass, "{report}");
        rows[4].a = rows[3].a;
        rows[4].b = rows[3].b;
        assert!(matches!(smoothness_diagnostic(&rows), Err(DsmError::DegeneratePath(_))));
        assert!(smoothness_diagnostic(&rows[..5]).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = synthetic_rows(1e-3);
        let csv = dimension_csv(&rows[..1]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), DIMENSION_CSV_HEADER);
        assert_eq!(lines.next().unwrap().split(',').count(), 9);
    }
}

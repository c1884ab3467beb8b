//! The maximal chaotic set `C_{a,b}`: the circle minus the basin of the
//! attracting cycle.
//!
//! The complement of the immediate basin is a finite union of closed arcs
//! forming a Markov partition; pulling those arcs back through the monotone
//! inverse branches of the lift produces nested covers of `C_{a,b}` by cylinders.
//!
//! Rank conventions: a rank-`n` cylinder carries `n` partition symbols, rank-1
//! cylinders are the partition arcs, and `f^{n-1}` maps a rank-`n` cylinder
//! diffeomorphically onto a partition arc. Because `f(R_i)` may cover the same
//! arc `R_j` more than once (always, in the period-one case), each transition
//! also records which monotone branch is used.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::AttractingCycle;
use crate::error::{DsmError, Result};
use crate::map::{circle_distance, wrap_unit, Parameter};

const ENDPOINT_SCAN_STEP: f64 = 1e-5;
const MARKOV_TOL: f64 = 1e-9;

/// Immediate-basin component of one cycle point, in lift coordinates
/// (`left < center < right`, `right - left < 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinArc {
    pub left: f64,
    pub center: f64,
    pub right: f64,
    /// `(f^q)'` at the two endpoints; both exceed 1.
    pub left_expansion: f64,
    pub right_expansion: f64,
    /// Exact periods of the endpoints under `f` (divisors of `q`).
    pub left_period: usize,
    pub right_period: usize,
}

impl BasinArc {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn contains(&self, x: f64) -> bool {
        let offset = wrap_unit(x - self.left);
        offset > 0.0 && offset < self.length()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinArcs {
    pub period: usize,
    /// `arcs[i]` surrounds `cycle.points[i]`.
    pub arcs: Vec<BasinArc>,
}

impl BasinArcs {
    pub fn index_containing(&self, x: f64) -> Option<usize> {
        self.arcs.iter().position(|arc| arc.contains(x))
    }

    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(BasinArc::length).sum()
    }

    /// Arcs whose endpoints turned out to have a period smaller than `q`.
    pub fn short_period_arcs(&self) -> Vec<usize> {
        (0..self.arcs.len())
            .filter(|&i| {
                let a = &self.arcs[i];
                a.left_period != self.period || a.right_period != self.period
            })
            .collect()
    }
}

fn exact_period(p: &Parameter, x: f64, q: usize) -> usize {
    let mut y = x;
    for d in 1..=q {
        y = p.step_centered(y);
        if q.is_multiple_of(d) && circle_distance(y, x) < 1e-9 {
            return d;
        }
    }
    q
}

/// Walks away from `center` in direction `dir` until `F^q(x) - x - m` changes
/// sign, then bisects and Newton-polishes the crossing.
fn arc_endpoint(p: &Parameter, center: f64, q: usize, m: f64, dir: f64) -> Result<(f64, f64)> {
    let h = |x: f64| p.lift_iterate(x, q).0 - x - m;
    // Just right of an attracting fixed point h < 0, just left h > 0.
    let inside = |v: f64| if dir > 0.0 { v < 0.0 } else { v > 0.0 };
    let mut step = 1e-9;
    let mut near = center;
    let mut far = center;
    let mut found = false;
    while (far - center).abs() < 1.0 {
        far = near + dir * step;
        if !inside(h(far)) {
            found = true;
            break;
        }
        near = far;
        step = (step * 2.0).min(ENDPOINT_SCAN_STEP);
    }
    if !found {
        return Err(DsmError::NewtonFailure(format!(
            "no basin boundary found around {center}"
        )));
    }
    let (mut lo, mut hi) = (near, far);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if inside(h(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let guess = 0.5 * (lo + hi);
    let x = crate::cycles::polish_periodic(p, guess, q, m).unwrap_or(guess);
    let x = if (x - guess).abs() < 1e-8 { x } else { guess };
    if h(x).abs() > 1e-10 {
        return Err(DsmError::NewtonFailure(format!(
            "basin endpoint near {guess} not polished (residual {:.2e})",
            h(x)
        )));
    }
    let expansion = p.lift_iterate(x, q).1;
    if expansion <= 1.0 {
        return Err(DsmError::NewtonFailure(format!(
            "basin endpoint {x} is not repelling ((f^q)' = {expansion})"
        )));
    }
    Ok((x, expansion))
}

/// The immediate basin of each cycle point, endpoints polished as repelling
/// fixed points of `f^q`.
pub fn immediate_basin_arcs(p: &Parameter, cycle: &AttractingCycle) -> Result<BasinArcs> {
    let q = cycle.period;
    let arcs = cycle
        .points
        .iter()
        .map(|&c| {
            let m = (p.lift_iterate(c, q).0 - c).round();
            let (right, right_expansion) = arc_endpoint(p, c, q, m, 1.0)?;
            let (left, left_expansion) = arc_endpoint(p, c, q, m, -1.0)?;
            Ok(BasinArc {
                left,
                center: c,
                right,
                left_expansion,
                right_expansion,
                left_period: exact_period(p, left, q),
                right_period: exact_period(p, right, q),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinArcs { period: q, arcs })
}

/// A closed partition arc `[lo, hi]` in lift coordinates, `lo ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PartitionInterval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// One monotone branch of `F` on `R_from` onto the translate `R_to + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovPartition {
    pub parameter: Parameter,
    pub intervals: Vec<PartitionInterval>,
    /// `matrix[i][j] = 1` iff `f(R_i) ⊇ R_j`.
    pub matrix: Vec<Vec<u8>>,
    /// Number of monotone branches of `f|R_i` onto `R_j`.
    pub multiplicity: Vec<Vec<u32>>,
    pub branches: Vec<Branch>,
    /// `sup |f''| / inf |f'|` over the partition arcs.
    pub distortion: f64,
}

/// Exact range of `f' = 2 + 2b cos(2πx)` over `[lo, hi]`.
pub fn deriv_range(p: &Parameter, lo: f64, hi: f64) -> (f64, f64) {
    let (dl, dh) = (p.deriv(lo), p.deriv(hi));
    let mut min = dl.min(dh);
    let mut max = dl.max(dh);
    if (hi.floor() - lo.floor()) >= 1.0 || lo.fract() == 0.0 {
        max = 2.0 + 2.0 * p.b();
    }
    if ((hi - 0.5).floor() - (lo - 0.5).floor()) >= 1.0 || (lo - 0.5).fract() == 0.0 {
        min = 2.0 - 2.0 * p.b();
    }
    (min, max)
}

/// Upper bound of `|f''| = 4πb |sin 2πx|` over `[lo, hi]`.
fn second_deriv_sup(p: &Parameter, lo: f64, hi: f64) -> f64 {
    let full = 2.0 * std::f64::consts::TAU * p.b();
    let hits = |c: f64| ((hi - c).floor() - (lo - c).floor()) >= 1.0 || (lo - c).fract() == 0.0;
    if hits(0.25) || hits(0.75) {
        full
    } else {
        p.second_deriv(lo).abs().max(p.second_deriv(hi).abs())
    }
}

/// The coarse Markov partition: the closed arcs complementary to the immediate basin.
pub fn markov_partition(p: &Parameter, arcs: &BasinArcs) -> Result<MarkovPartition> {
    let mut sorted: Vec<BasinArc> = arcs.arcs.clone();
    sorted.sort_by(|u, v| wrap_unit(u.left).total_cmp(&wrap_unit(v.left)));
    let k = sorted.len();
    let intervals: Vec<PartitionInterval> = (0..k)
        .map(|j| {
            let lo = wrap_unit(sorted[j].right);
            let gap = wrap_unit(sorted[(j + 1) % k].left - sorted[j].right);
            PartitionInterval { lo, hi: lo + gap }
        })
        .collect();

    let endpoints: Vec<f64> = intervals.iter().flat_map(|r| [r.lo, wrap_unit(r.hi)]).collect();
    let is_endpoint = |y: f64| endpoints.iter().any(|&e| circle_distance(e, y) < MARKOV_TOL);

    let mut branches = Vec::new();
    let mut multiplicity = vec![vec![0u32; k]; k];
    for (i, r) in intervals.iter().enumerate() {
        let (y0, y1) = (p.lift(r.lo), p.lift(r.hi));
        for y in [y0, y1] {
            if !is_endpoint(y) {
                return Err(DsmError::MarkovViolation(format!(
                    "image {} of an endpoint of R_{i} is not a partition endpoint",
                    wrap_unit(y)
                )));
            }
        }
        let mut found = Vec::new();
        for (j, s) in intervals.iter().enumerate() {
            let n_lo = (y0 - s.hi).floor() as i64 - 1;
            let n_hi = (y1 - s.lo).ceil() as i64 + 1;
            for n in n_lo..=n_hi {
                let shift = n as f64;
                if s.lo + shift >= y0 - MARKOV_TOL && s.hi + shift <= y1 + MARKOV_TOL {
                    found.push(Branch { from: i, to: j, shift });
                }
            }
        }
        found.sort_by(|u, v| (intervals[u.to].lo + u.shift).total_cmp(&(intervals[v.to].lo + v.shift)));
        for b in &found {
            multiplicity[i][b.to] += 1;
        }
        branches.extend(found);
    }
    let matrix = multiplicity
        .iter()
        .map(|row| row.iter().map(|&m| u8::from(m > 0)).collect())
        .collect();

    let mut sup2: f64 = 0.0;
    let mut inf1 = f64::INFINITY;
    for r in &intervals {
        sup2 = sup2.max(second_deriv_sup(p, r.lo, r.hi));
        inf1 = inf1.min(deriv_range(p, r.lo, r.hi).0);
    }
    if inf1 <= 0.0 {
        return Err(DsmError::MarkovViolation("f' vanishes on the partition".into()));
    }
    Ok(MarkovPartition {
        parameter: *p,
        intervals,
        matrix,
        multiplicity,
        branches,
        distortion: sup2 / inf1,
    })
}

impl MarkovPartition {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Perron root of the branch-multiplicity matrix.
    pub fn spectral_radius(&self) -> f64 {
        let m: Vec<Vec<f64>> = self
            .multiplicity
            .iter()
            .map(|row| row.iter().map(|&x| x as f64).collect())
            .collect();
        perron_root(&m)
    }

    /// Some power of the multiplicity matrix is strictly positive.
    pub fn is_primitive(&self) -> bool {
        let k = self.len();
        let step = |a: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
            (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| (0..k).any(|l| a[i][l] && self.multiplicity[l][j] > 0))
                        .collect()
                })
                .collect()
        };
        let mut power: Vec<Vec<bool>> = self
            .multiplicity
            .iter()
            .map(|row| row.iter().map(|&x| x > 0).collect())
            .collect();
        for _ in 0..(k * k + 1) {
            if power.iter().all(|row| row.iter().all(|&x| x)) {
                return true;
            }
            power = step(&power);
        }
        false
    }

    /// Solves `F(x) = y` on the domain of `branch`.
    pub fn invert(&self, branch: &Branch, y: f64) -> Result<f64> {
        let p = &self.parameter;
        let r = &self.intervals[branch.from];
        let (mut lo, mut hi) = (r.lo, r.hi);
        let (flo, fhi) = (p.lift(lo), p.lift(hi));
        if y < flo - MARKOV_TOL || y > fhi + MARKOV_TOL {
            return Err(DsmError::BranchInversion(format!(
                "{y} outside F(R_{}) = [{flo}, {fhi}]",
                branch.from
            )));
        }
        if y <= flo {
            return Ok(lo);
        }
        if y >= fhi {
            return Ok(hi);
        }
        let mut x = lo + (hi - lo) * (y - flo) / (fhi - flo);
        for _ in 0..100 {
            let g = p.lift(x) - y;
            if g == 0.0 {
                return Ok(x);
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = p.deriv(x);
            let mut next = x - g / d;
            if !(next > lo && next < hi) || d <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) || hi - lo <= f64::EPSILON {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }
}

/// Perron root of a small nonnegative matrix by power iteration.
pub fn perron_root(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    if k == 0 {
        return 0.0;
    }
    // (M + I) has the same Perron vector and is aperiodic.
    let mut v = vec![1.0; k];
    let mut rho = 0.0;
    for _ in 0..10_000 {
        let w: Vec<f64> = (0..k)
            .map(|i| v[i] + (0..k).map(|j| m[i][j] * v[j]).sum::<f64>())
            .collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let new_rho = norm - 1.0;
        let done = (new_rho - rho).abs() < 1e-15 * new_rho.abs().max(1.0)
            && next.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-15);
        v = next;
        rho = new_rho;
        if done {
            break;
        }
    }
    // Collatz-Wielandt estimate from the final vector.
    let ratios: Vec<f64> = (0..k)
        .filter(|&i| v[i] > 0.0)
        .map(|i| (0..k).map(|j| m[i][j] * v[j]).sum::<f64>() / v[i])
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    0.5 * (lo + hi)
}

/// A rank-`n` cylinder: points of `R_{word[0]}` whose first `n - 1` iterates
/// follow `word` through the listed branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderSet {
    pub word: Vec<u16>,
    /// Branch index (into `MarkovPartition::branches`) used between consecutive symbols.
    pub branches: Vec<u16>,
    /// Lift coordinates inside `R_{word[0]}`.
    pub left: f64,
    pub right: f64,
    /// Bounds on `|(f^{n-1})'|` over the cylinder.
    pub deriv_min: f64,
    pub deriv_max: f64,
    /// `(f^{n-1})'` at the two endpoints.
    pub deriv_left: f64,
    pub deriv_right: f64,
    /// `Σ_{j<n-1} diam f^j(C)`, which controls the distortion of `f^{n-1}`.
    pub orbit_diameter: f64,
}

impl CylinderSet {
    pub fn rank(&self) -> usize {
        self.word.len()
    }

    pub fn diameter(&self) -> f64 {
        self.right - self.left
    }

    /// `w0.w1.../b0.b1...`
    pub fn word_label(&self) -> String {
        let mut s = String::new();
        for (i, w) in self.word.iter().enumerate() {
            if i > 0 {
                s.push('.');
            }
            let _ = write!(s, "{w}");
        }
        s.push('/');
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                s.push('.');
            }
            let _ = write!(s, "{b}");
        }
        s
    }
}

/// All cylinders of one rank, with the combinatorics needed to step the
/// refinement and to build transfer matrices.
#[derive(Debug, Clone)]
pub struct CylinderLevel {
    pub rank: usize,
    pub cylinders: Vec<CylinderSet>,
    /// Index of the rank-`(n-1)` cylinder containing each cylinder (for rank 1: itself).
    pub prefix: Vec<u32>,
    /// Index of the rank-`(n-1)` cylinder `f(C)` (for rank 1: itself).
    pub suffix: Vec<u32>,
    by_first: Vec<Vec<u32>>,
    pos_in_first: Vec<u32>,
    branch_offset: Vec<u32>,
}

impl CylinderLevel {
    fn first(part: &MarkovPartition) -> CylinderLevel {
        let cylinders: Vec<CylinderSet> = part
            .intervals
            .iter()
            .enumerate()
            .map(|(i, r)| CylinderSet {
                word: vec![i as u16],
                branches: Vec::new(),
                left: r.lo,
                right: r.hi,
                deriv_min: 1.0,
                deriv_max: 1.0,
                deriv_left: 1.0,
                deriv_right: 1.0,
                orbit_diameter: 0.0,
            })
            .collect();
        let k = cylinders.len();
        CylinderLevel {
            rank: 1,
            cylinders,
            prefix: (0..k as u32).collect(),
            suffix: (0..k as u32).collect(),
            by_first: (0..k as u32).map(|i| vec![i]).collect(),
            pos_in_first: vec![0; k],
            branch_offset: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn max_diameter(&self) -> f64 {
        self.cylinders.iter().map(CylinderSet::diameter).fold(0.0, f64::max)
    }
}

/// Produces successive cylinder levels by dynamical pullback.
#[derive(Debug, Clone)]
pub struct Refinement {
    partition: MarkovPartition,
    previous: Option<CylinderLevel>,
    current: CylinderLevel,
}

impl Refinement {
    pub fn new(partition: MarkovPartition) -> Refinement {
        let current = CylinderLevel::first(&partition);
        Refinement {
            partition,
            previous: None,
            current,
        }
    }

    pub fn partition(&self) -> &MarkovPartition {
        &self.partition
    }

    pub fn level(&self) -> &CylinderLevel {
        &self.current
    }

    pub fn rank(&self) -> usize {
        self.current.rank
    }

    /// Refines until the current level has rank `n` (never coarsens).
    pub fn advance_to(&mut self, n: usize) -> Result<&CylinderLevel> {
        while self.current.rank < n {
            self.advance()?;
        }
        Ok(&self.current)
    }

    pub fn advance(&mut self) -> Result<&CylinderLevel> {
        let next = self.next_level()?;
        let old = std::mem::replace(&mut self.current, next);
        self.previous = Some(old);
        Ok(&self.current)
    }

    fn next_level(&self) -> Result<CylinderLevel> {
        let part = &self.partition;
        let p = &part.parameter;
        let prev = &self.current;
        let v = part.distortion;

        let mut tasks: Vec<(usize, u32, u32)> = Vec::new();
        let mut branch_offset = Vec::with_capacity(part.branches.len());
        for (e, br) in part.branches.iter().enumerate() {
            branch_offset.push(tasks.len() as u32);
            for &k in &prev.by_first[br.to] {
                let prefix = if prev.rank == 1 {
                    br.from as u32
                } else {
                    let older = self.previous.as_ref().expect("previous level");
                    prev.branch_offset[e] + older.pos_in_first[prev.prefix[k as usize] as usize]
                };
                tasks.push((e, k, prefix));
            }
        }

        let cylinders: Vec<CylinderSet> = tasks
            .par_iter()
            .map(|&(e, k, _)| {
                let br = &part.branches[e];
                let child = &prev.cylinders[k as usize];
                let left = part.invert(br, child.left + br.shift)?;
                let right = part.invert(br, child.right + br.shift)?;
                if right < left {
                    return Err(DsmError::BranchInversion(format!("orientation flip on branch {e}")));
                }
                let dl = p.deriv(left) * child.deriv_left;
                let dr = p.deriv(right) * child.deriv_right;
                if dl <= 0.0 || dr <= 0.0 {
                    return Err(DsmError::BranchInversion(format!("vanishing derivative on branch {e}")));
                }
                let orbit_diameter = (right - left) + child.orbit_diameter;
                let spread = (v * orbit_diameter).exp();
                let mut word = Vec::with_capacity(child.word.len() + 1);
                word.push(br.from as u16);
                word.extend_from_slice(&child.word);
                let mut branches = Vec::with_capacity(child.branches.len() + 1);
                branches.push(e as u16);
                branches.extend_from_slice(&child.branches);
                Ok(CylinderSet {
                    word,
                    branches,
                    left,
                    right,
                    deriv_min: dl.max(dr) / spread,
                    deriv_max: dl.min(dr) * spread,
                    deriv_left: dl,
                    deriv_right: dr,
                    orbit_diameter,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let k = part.len();
        let mut by_first = vec![Vec::new(); k];
        let mut pos_in_first = vec![0u32; cylinders.len()];
        for (idx, c) in cylinders.iter().enumerate() {
            let first = c.word[0] as usize;
            pos_in_first[idx] = by_first[first].len() as u32;
            by_first[first].push(idx as u32);
        }
        Ok(CylinderLevel {
            rank: prev.rank + 1,
            prefix: tasks.iter().map(|t| t.2).collect(),
            suffix: tasks.iter().map(|t| t.1).collect(),
            cylinders,
            by_first,
            pos_in_first,
            branch_offset,
        })
    }
}

/// All rank-`n` cylinders.
pub fn refine_cylinders(_p: &Parameter, part: &MarkovPartition, n: usize) -> Result<Vec<CylinderSet>> {
    if n == 0 {
        return Err(DsmError::InvalidParameter("cylinder rank must be >= 1".into()));
    }
    let mut r = Refinement::new(part.clone());
    Ok(r.advance_to(n)?.cylinders.clone())
}

/// Total length of the cover (cylinders of one rank have disjoint interiors).
pub fn cover_length(cylinders: &[CylinderSet]) -> f64 {
    cylinders.iter().map(CylinderSet::diameter).sum()
}

/// Finds the fixed point of `f^{n}` inside a cylinder of rank `n + 1` whose
/// last symbol equals its first.
pub fn periodic_point_in(p: &Parameter, part: &MarkovPartition, cyl: &CylinderSet) -> Option<f64> {
    let n = cyl.rank() - 1;
    if n == 0 || cyl.word[0] != cyl.word[n] {
        return None;
    }
    let target = part.intervals[cyl.word[0] as usize];
    let shift = (p.lift_iterate(cyl.left, n).0 - target.lo).round();
    let h = |x: f64| p.lift_iterate(x, n).0 - shift - x;
    let (mut lo, mut hi) = (cyl.left, cyl.right);
    if h(lo) > 1e-12 || h(hi) < -1e-12 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Writes `word,left,right,deriv_min,deriv_max` rows.
pub fn write_cylinders_csv(path: &Path, cylinders: &[CylinderSet]) -> Result<()> {
    let io_err = |e: std::io::Error| DsmError::Io {
        context: path.display().to_string(),
        message: e.to_string(),
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    writeln!(out, "word,left,right,deriv_min,deriv_max").map_err(io_err)?;
    for c in cylinders {
        writeln!(
            out,
            "{},{:?},{:?},{:?},{:?}",
            c.word_label(),
            c.left,
            c.right,
            c.deriv_min,
            c.deriv_max
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

//! Parameter-plane scans of the tongues, their PPM rendering, and the grid
//! properties checked on them (empty floor, ceiling connectivity, mirror
//! symmetry).

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cycles::{classify, TongueClassification};
use crate::error::{DsmError, Result};
use crate::map::Parameter;

/// Largest period the scanner will look for.
pub const SCAN_Q_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub width: usize,
    pub height: usize,
    pub q_max: usize,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            a_min: -0.5,
            a_max: 0.5,
            b_min: 0.0,
            b_max: 1.0,
            width: 600,
            height: 400,
            q_max: 10,
            workers: 0,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DsmError::InvalidParameter(m));
        if !(self.a_max > self.a_min) || !(self.b_max > self.b_min) {
            return bad("scan window is empty".into());
        }
        if self.a_min < -0.5 || self.a_max > 0.5 || self.b_min < 0.0 || self.b_max > 1.0 {
            return bad(format!(
                "scan window [{}, {}] x [{}, {}] leaves [-1/2, 1/2] x [0, 1]",
                self.a_min, self.a_max, self.b_min, self.b_max
            ));
        }
        if self.width == 0 || self.height == 0 {
            return bad("scan grid needs positive width and height".into());
        }
        if self.q_max == 0 || self.q_max > SCAN_Q_MAX {
            return bad(format!("q_max = {} must lie in 1..={SCAN_Q_MAX}", self.q_max));
        }
        Ok(())
    }

    /// Pixel-center `a` of column `i`; symmetric windows give exactly
    /// negated values in mirrored columns.
    pub fn pixel_a(&self, i: usize) -> f64 {
        let center = 0.5 * (self.a_min + self.a_max);
        let half = 0.5 * (self.a_max - self.a_min);
        let w = self.width as f64;
        center + half * ((2.0 * i as f64 + 1.0 - w) / w)
    }

    /// Pixel-center `b` of row `j`; row 0 is the top (`b_max`).
    pub fn pixel_b(&self, j: usize) -> f64 {
        let step = (self.b_max - self.b_min) / self.height as f64;
        self.b_max - (j as f64 + 0.5) * step
    }
}

/// `(q << 16) | k`, with 0 reserved for "no attracting cycle found".
pub fn encode(q: usize, k: u64) -> u32 {
    ((q as u32) << 16) | k as u32
}

pub fn decode(code: u32) -> Option<(usize, u64)> {
    (code != 0).then_some(((code >> 16) as usize, (code & 0xffff) as u64))
}

/// Code of the mirrored tongue `(q, 2^q - 1 - k)`.
pub fn mirror_code(code: u32) -> u32 {
    match decode(code) {
        None => 0,
        Some((q, k)) => {
            let d = (1u64 << q) - 1;
            encode(q, (d - k) % d)
        }
    }
}

pub fn classify_code(p: &Parameter, q_max: usize) -> u32 {
    match classify(p, q_max) {
        Ok(TongueClassification::InTongue { orbit_type, .. }) => encode(orbit_type.q, orbit_type.k),
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    /// Row-major, row 0 at the top.
    pub codes: Vec<u32>,
    /// SHA-256 over a git-style blob of the configuration and codes.
    pub hash: String,
}

impl ScanResult {
    pub fn width(&self) -> usize {
        self.config.width
    }

    pub fn height(&self) -> usize {
        self.config.height
    }

    pub fn code(&self, i: usize, j: usize) -> u32 {
        self.codes[j * self.config.width + i]
    }

    pub fn hyperbolic_count(&self) -> usize {
        self.codes.iter().filter(|&&c| c != 0).count()
    }
}

fn content_hash(cfg: &ScanConfig, codes: &[u32]) -> String {
    let mut body = format!(
        "{:?} {:?} {:?} {:?} {} {} {}\n",
        cfg.a_min, cfg.a_max, cfg.b_min, cfg.b_max, cfg.width, cfg.height, cfg.q_max
    )
    .into_bytes();
    for c in codes {
        body.extend_from_slice(&c.to_le_bytes());
    }
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(&body);
    hex::encode(h.finalize())
}

/// Classifies every pixel center. The worker count only affects speed.
pub fn scan_tongues(cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let run = || -> Vec<u32> {
        (0..cfg.height)
            .into_par_iter()
            .flat_map_iter(|j| {
                let b = cfg.pixel_b(j);
                (0..cfg.width)
                    .map(move |i| Parameter::new(cfg.pixel_a(i), b).map_or(0, |p| classify_code(&p, cfg.q_max)))
            })
            .collect()
    };
    let codes = if cfg.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| DsmError::InvalidParameter(format!("worker pool: {e}")))?
            .install(run)
    };
    let hash = content_hash(cfg, &codes);
    Ok(ScanResult {
        config: *cfg,
        codes,
        hash,
    })
}

/// Black for 0; otherwise hue by period and brightness by type index.
pub fn palette(code: u32) -> [u8; 3] {
    let Some((q, k)) = decode(code) else {
        return [0, 0, 0];
    };
    let hue = ((q as f64 - 1.0) * 137.507_764_050_037_85).rem_euclid(360.0);
    let span = (1u64 << q) as f64;
    let value = 0.45 + 0.55 * (k as f64 + 1.0) / span;
    hsv_to_rgb(hue, 0.85, value)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to_byte = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to_byte(r), to_byte(g), to_byte(b)]
}

/// Binary PPM (P6, maxval 255) bytes for `codes` on a `width x height` grid.
pub fn ppm_bytes(width: usize, height: usize, codes: &[u32]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(3 * codes.len());
    for &c in codes {
        out.extend_from_slice(&palette(c));
    }
    out
}

pub fn render_ppm(result: &ScanResult, path: &Path) -> Result<()> {
    std::fs::write(path, ppm_bytes(result.width(), result.height(), &result.codes)).map_err(|e| DsmError::Io {
        context: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Which neighbouring pixels are joined into one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Any two nonzero pixels.
    Nonzero,
    /// Nonzero pixels with equal codes (one tongue label).
    SameCode,
}

/// An 8-connected component of nonzero pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    /// Code of the seed pixel.
    pub code: u32,
    pub size: usize,
    pub top_row: usize,
    /// A pixel of the component, `(column, row)`.
    pub seed: (usize, usize),
}

pub fn components(result: &ScanResult, grouping: Grouping) -> Vec<Component> {
    let (w, h) = (result.width(), result.height());
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        let code = result.codes[start];
        if code == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Component {
            code,
            size: 0,
            top_row: start / w,
            seed: (start % w, start / w),
        };
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx % w, idx / w);
            comp.size += 1;
            comp.top_row = comp.top_row.min(j);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                        continue;
                    }
                    let n = nj as usize * w + ni as usize;
                    let joined = match grouping {
                        Grouping::Nonzero => result.codes[n] != 0,
                        Grouping::SameCode => result.codes[n] == code,
                    };
                    if !seen[n] && joined {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Follows the tongue of `comp` upward on a grid refined `refine` times in
/// each direction (odd `refine`, so sub-cell centers include the pixel
/// centers). Returns `Some(true)` when the same label is reached inside the
/// top pixel row, `Some(false)` when the refined component is exhausted, and
/// `None` when `budget` classifications were not enough.
pub fn reaches_top_refined(cfg: &ScanConfig, comp: &Component, refine: usize, budget: usize) -> Option<bool> {
    let r = refine.max(1) | 1;
    let fine = ScanConfig {
        width: cfg.width * r,
        height: cfg.height * r,
        ..*cfg
    };
    let (w, h) = (fine.width, fine.height);
    let code_at = |i: usize, j: usize| {
        Parameter::new(fine.pixel_a(i), fine.pixel_b(j)).map_or(0, |p| classify_code(&p, cfg.q_max))
    };
    let start = (comp.seed.0 * r + r / 2, comp.seed.1 * r + r / 2);
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    seen.insert(start);
    if code_at(start.0, start.1) != comp.code {
        return Some(false);
    }
    queue.push_back(start);
    let mut spent = 1;
    while let Some((i, j)) = queue.pop_front() {
        if j < r {
            return Some(true);
        }
        for (di, dj) in [
            (0i64, -1i64),
            (-1, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ] {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                continue;
            }
            let n = (ni as usize, nj as usize);
            if !seen.insert(n) {
                continue;
            }
            spent += 1;
            if spent > budget {
                return None;
            }
            if code_at(n.0, n.1) == comp.code {
                queue.push_back(n);
            }
        }
    }
    Some(false)
}

/// Pixels `(i, j)` whose mirror `(w - 1 - i, j)` does not carry the mirrored code.
pub fn mirror_mismatches(result: &ScanResult) -> Vec<(usize, usize)> {
    let w = result.width();
    let mut bad = Vec::new();
    for j in 0..result.height() {
        for i in 0..w {
            if result.code(w - 1 - i, j) != mirror_code(result.code(i, j)) {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// Lowest `b` (pixel center) carrying a nonzero code.
pub fn lowest_hyperbolic_b(result: &ScanResult) -> Option<f64> {
    (0..result.height())
        .rev()
        .find(|&j| (0..result.width()).any(|i| result.code(i, j) != 0))
        .map(|j| result.config.pixel_b(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_centers_are_mirror_exact() {
        let cfg = ScanConfig {
            width: 37,
            ..ScanConfig::default()
        };
        for i in 0..cfg.width {
            assert_eq!(cfg.pixel_a(i), -cfg.pixel_a(cfg.width - 1 - i));
        }
        assert_eq!(cfg.pixel_b(0), 1.0 - 0.5 / 400.0);
    }

    #[test]
    fn codes_round_trip() {
        assert_eq!(decode(encode(3, 5)), Some((3, 5)));
        assert_eq!(decode(0), None);
        assert_eq!(mirror_code(encode(1, 0)), encode(1, 0));
        assert_eq!(mirror_code(encode(3, 1)), encode(3, 6));
        assert_eq!(palette(0), [0, 0, 0]);
        assert_ne!(palette(encode(2, 1)), palette(encode(2, 2)));
    }

    #[test]
    fn ppm_contract() {
        let bytes = ppm_bytes(2, 1, &[0, encode(1, 0)]);
        assert!(bytes.starts_with(b"P6\n2 1\n255\n"));
        assert_eq!(bytes.len(), 11 + 6);
        assert_eq!(&bytes[11..14], &[0, 0, 0]);
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            ScanConfig {
                a_min: 0.2,
                a_max: 0.1,
                ..ScanConfig::default()
            },
            ScanConfig {
                b_max: 1.2,
                ..ScanConfig::default()
            },
            ScanConfig {
                q_max: 13,
                ..ScanConfig::default()
            },
            ScanConfig {
                width: 0,
                ..ScanConfig::default()
            },
        ] {
            assert!(scan_tongues(&cfg).is_err());
        }
    }

    #[test]
    fn small_scan_properties() {
        let cfg = ScanConfig {
            width: 40,
            height: 24,
            q_max: 6,
            ..ScanConfig::default()
        };
        let r = scan_tongues(&cfg).unwrap();
        assert!(mirror_mismatches(&r).is_empty());
        assert!(lowest_hyperbolic_b(&r).unwrap() >= 0.5);
        let one = scan_tongues(&ScanConfig { workers: 1, ..cfg }).unwrap();
        assert_eq!(one.codes, r.codes);
        assert_eq!(one.hash, r.hash);
        let p = Parameter::new(0.5, 0.75).unwrap();
        assert_eq!(classify_code(&p, 6), encode(1, 0));
    }
}

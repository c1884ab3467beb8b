//! Explicit quasiconformal model maps used to move between tongue parameters
//! with different multipliers and critical angles.
//!
//! `h` is the piecewise linear homeomorphism of `[0, π]` sending `ν0` to
//! `ν1`; `χ(r e^{iθ}) = r^{1+α} e^{i h(θ)}` in the upper half-plane, extended
//! to `ℂ` by `χ(z̄) = conj χ(z)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DsmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleMap {
    pub nu0: f64,
    pub nu1: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl AngleMap {
    pub fn new(nu0: f64, nu1: f64) -> Result<AngleMap> {
        for nu in [nu0, nu1] {
            if !(nu > 0.0 && nu < PI) {
                return Err(DsmError::AngleOutOfRange(nu));
            }
        }
        Ok(AngleMap {
            nu0,
            nu1,
            s1: nu1 / nu0,
            s2: (PI - nu1) / (PI - nu0),
            s3: PI * (nu1 - nu0) / (PI - nu0),
        })
    }

    pub fn inverse(&self) -> AngleMap {
        AngleMap::new(self.nu1, self.nu0).expect("angles already validated")
    }

    /// `h` on `[0, π]` without range checks, extended oddly to `[-π, 0)`.
    fn apply(&self, theta: f64) -> f64 {
        let t = theta.abs();
        let v = if t <= self.nu0 {
            self.s1 * t
        } else if t >= PI {
            PI
        } else {
            self.s2 * t + self.s3
        };
        v.copysign(theta)
    }

    fn apply_inverse(&self, phi: f64) -> f64 {
        let t = phi.abs();
        let v = if t <= self.nu1 {
            t / self.s1
        } else if t >= PI {
            PI
        } else {
            (t - self.s3) / self.s2
        };
        v.copysign(phi)
    }
}

pub fn angle_map_eval(m: &AngleMap, theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(DsmError::AngleOutOfRange(theta));
    }
    Ok(m.apply(theta))
}

/// `h^{-1}` on `[0, π]`.
pub fn angle_map_inverse(m: &AngleMap, phi: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&phi) {
        return Err(DsmError::AngleOutOfRange(phi));
    }
    Ok(m.apply_inverse(phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialPowerMap {
    pub alpha: f64,
    pub angle_map: AngleMap,
}

impl RadialPowerMap {
    pub fn new(alpha: f64, angle_map: AngleMap) -> Result<RadialPowerMap> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(DsmError::InvalidParameter(format!("alpha = {alpha} must exceed -1")));
        }
        Ok(RadialPowerMap { alpha, angle_map })
    }

    /// The model map taking multiplier `λ0` and angle `ν0` to `λ1` and `ν1`.
    pub fn between(lambda0: f64, nu0: f64, lambda1: f64, nu1: f64) -> Result<RadialPowerMap> {
        for l in [lambda0, lambda1] {
            if !(l > 0.0 && l < 1.0) {
                return Err(DsmError::InvalidParameter(format!("multiplier {l} not in (0, 1)")));
            }
        }
        let alpha = lambda1.ln() / lambda0.ln() - 1.0;
        RadialPowerMap::new(alpha, AngleMap::new(nu0, nu1)?)
    }

    pub fn exponent(&self) -> f64 {
        1.0 + self.alpha
    }

    /// Parameters of `χ^{-1}`, which is again a model map.
    pub fn inverse(&self) -> RadialPowerMap {
        RadialPowerMap {
            alpha: 1.0 / self.exponent() - 1.0,
            angle_map: self.angle_map.inverse(),
        }
    }

    /// `χ^{-1}` in closed form.
    pub fn invert(&self, w: Complex64) -> Complex64 {
        if w.re == 0.0 && w.im == 0.0 {
            return w;
        }
        let (r, phi) = w.to_polar();
        polar_image(r.powf(1.0 / self.exponent()), self.angle_map.apply_inverse(phi), w.im)
    }
}

/// `ρ e^{iθ}` with the sign of the imaginary part pinned to the sign of
/// `reference`, so points on the real axis stay exactly real.
fn polar_image(rho: f64, theta: f64, reference: f64) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(rho, 0.0);
    }
    if theta.abs() == PI {
        return Complex64::new(-rho, 0.0f64.copysign(reference));
    }
    Complex64::from_polar(rho, theta)
}

pub fn chi_eval(m: &RadialPowerMap, z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return z;
    }
    let (r, theta) = z.to_polar();
    polar_image(r.powf(m.exponent()), m.angle_map.apply(theta), z.im)
}

/// `|μ|` on the sectors `0 < |θ| < ν0` and `ν0 < |θ| < π`.
pub fn sector_dilatations(m: &RadialPowerMap) -> (f64, f64) {
    let p = m.exponent();
    let mu = |s: f64| ((p - s) / (p + s)).abs();
    (mu(m.angle_map.s1), mu(m.angle_map.s2))
}

pub fn dilatation_bound(m: &RadialPowerMap) -> f64 {
    let (inner, outer) = sector_dilatations(m);
    inner.max(outer)
}

pub fn conjugated_multiplier(m: &RadialPowerMap, lambda0: f64) -> Result<f64> {
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(DsmError::InvalidParameter(format!("λ0 = {lambda0} not in (0, 1)")));
    }
    Ok(lambda0.powf(m.exponent()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map(rng: &mut ChaCha8Rng) -> RadialPowerMap {
        let nu0 = rng.gen_range(0.05..PI - 0.05);
        let nu1 = rng.gen_range(0.05..PI - 0.05);
        RadialPowerMap::new(rng.gen_range(-0.8..3.0), AngleMap::new(nu0, nu1).unwrap()).unwrap()
    }

    #[test]
    fn interpolation_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let h = random_map(&mut rng).angle_map;
            assert_eq!(angle_map_eval(&h, 0.0).unwrap(), 0.0);
            assert!((angle_map_eval(&h, h.nu0).unwrap() - h.nu1).abs() < 1e-15);
            assert!((angle_map_eval(&h, PI).unwrap() - PI).abs() < 1e-15);
            assert!((h.s1 * h.nu0 - (h.s2 * h.nu0 + h.s3)).abs() < 1e-13);
        }
        assert!(angle_map_eval(&AngleMap::new(1.0, 2.0).unwrap(), 3.2).is_err());
        assert!(angle_map_eval(&AngleMap::new(1.0, 2.0).unwrap(), -0.1).is_err());
        assert!(AngleMap::new(0.0, 1.0).is_err());
    }

    #[test]
    fn equal_angles_give_identity() {
        let h = AngleMap::new(1.1, 1.1).unwrap();
        assert_eq!((h.s1, h.s2, h.s3), (1.0, 1.0, 0.0));
        let chi = RadialPowerMap::new(0.0, h).unwrap();
        assert_eq!(dilatation_bound(&chi), 0.0);
        assert_eq!(conjugated_multiplier(&chi, 0.3).unwrap(), 0.3);
    }

    #[test]
    fn strictly_increasing() {
        let h = AngleMap::new(0.4, 2.9).unwrap();
        let mut last = -1.0;
        for i in 0..=1000 {
            let v = angle_map_eval(&h, PI * i as f64 / 1000.0).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn disks_rays_and_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let m = random_map(&mut rng);
            let radius: f64 = rng.gen_range(0.1..3.0);
            for k in 0..64 {
                let z = Complex64::from_polar(radius, -PI + 2.0 * PI * k as f64 / 64.0);
                let w = chi_eval(&m, z);
                assert!((w.norm() - radius.powf(1.0 + m.alpha)).abs() < 1e-12 * w.norm().max(1.0));
                assert_eq!(chi_eval(&m, z.conj()), w.conj());
            }
            let r: f64 = rng.gen_range(0.1..2.0);
            let w = chi_eval(&m, Complex64::from_polar(r, m.angle_map.nu0));
            let expected = Complex64::from_polar(r.powf(1.0 + m.alpha), m.angle_map.nu1);
            assert!((w - expected).norm() < 1e-12 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn inverse_round_trip_and_injectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let m = random_map(&mut rng);
            let mut images = Vec::new();
            for i in 1..=30 {
                for j in 0..60 {
                    let z = Complex64::from_polar(0.1 * i as f64, -PI + 2.0 * PI * (j as f64 + 0.5) / 60.0);
                    let w = chi_eval(&m, z);
                    let back = m.invert(w);
                    assert!((back - z).norm() < 1e-12 * z.norm().max(1.0), "{z} {back}");
                    images.push(w);
                }
            }
            images.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
            assert!(images.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn dilatation_matches_beltrami_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..40 {
            let m = random_map(&mut rng);
            let bound = dilatation_bound(&m);
            assert!((0.0..1.0).contains(&bound));
            let (inner, outer) = sector_dilatations(&m);
            let h = 1e-6;
            for (theta, expected) in [(0.5 * m.angle_map.nu0, inner), (0.5 * (m.angle_map.nu0 + PI), outer)] {
                let z = Complex64::from_polar(rng.gen_range(0.5..1.5), theta);
                let dx = (chi_eval(&m, z + h) - chi_eval(&m, z - h)) / (2.0 * h);
                let dy =
                    (chi_eval(&m, z + Complex64::new(0.0, h)) - chi_eval(&m, z - Complex64::new(0.0, h))) / (2.0 * h);
                let dz = 0.5 * (dx - Complex64::i() * dy);
                let dzbar = 0.5 * (dx + Complex64::i() * dy);
                let mu = (dzbar / dz).norm();
                assert!((mu - expected).abs() < 1e-4, "{mu} vs {expected}");
            }
            assert!((dilatation_bound(&m.inverse()) - bound).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplier_and_commuting_square() {
        let m = RadialPowerMap::new(1.0, AngleMap::new(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(conjugated_multiplier(&m, 0.25).unwrap(), 0.0625);
        assert!(conjugated_multiplier(&m, 1.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let m = random_map(&mut rng);
            let l0 = rng.gen_range(0.05..0.95);
            let l1 = conjugated_multiplier(&m, l0).unwrap();
            let x: f64 = rng.gen_range(0.1..3.0);
            let real = Complex64::new(x, 0.0);
            assert_eq!(chi_eval(&m, l0 * real).im, 0.0);
            let z = Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(-PI..PI));
            let lhs = chi_eval(&m, l0 * z);
            assert!((lhs - l1 * chi_eval(&m, z)).norm() < 1e-12 * lhs.norm().max(1.0));
            let rho: f64 = rng.gen_range(0.1..5.0);
            let lhs = rho * chi_eval(&m, z);
            let rhs = chi_eval(&m, rho.powf(1.0 / (1.0 + m.alpha)) * z);
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn between_hits_targets() {
        let m = RadialPowerMap::between(0.3, 1.0, 0.6, 2.0).unwrap();
        assert!((conjugated_multiplier(&m, 0.3).unwrap() - 0.6).abs() < 1e-14);
        let w = chi_eval(&m, Complex64::from_polar(0.3, 1.0));
        assert!((w - Complex64::from_polar(0.6, 2.0)).norm() < 1e-14);
    }
}

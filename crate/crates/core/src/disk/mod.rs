//! Numerical model: the Poincare disk with Mobius isometry groups.
//!
//! The Busemann cocycle at `xi` is `log(P(x, xi) / P(y, xi))` with the Poisson kernel
//! `P(z, xi) = (1 - |z|^2) / |z - xi|^2`, and the visual (harmonic) measure is
//! conformal of dimension 1: `d(g lambda)/d lambda (xi) = P(g(0), xi)`.

mod mobius;
mod orbit;
mod presets;

pub use mobius::{CirclePoint, DiskPoint, MobiusMap};
pub use orbit::{orbit_ball, psl2z_exact_ball_size, OrbitBall, OrbitElement, DEFAULT_BALL_CAP};
pub use presets::{preset, GroupPreset, PresetName, SchottkyParams};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyperbolic::SpaceModel;

const NEAR_BOUNDARY: f64 = 1e-12;

/// Hyperbolic distance `arcosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)))`, evaluated as
/// `2 asinh(|x - y| / sqrt((1-|x|^2)(1-|y|^2)))`.
pub fn hyp_distance(x: &DiskPoint, y: &DiskPoint) -> f64 {
    2.0 * ((x.z() - y.z()).norm() / (x.gap() * y.gap()).sqrt()).asinh()
}

/// Poisson kernel `P(z, xi)`.
pub fn poisson_kernel(z: &DiskPoint, xi: &CirclePoint) -> Result<f64> {
    let d = (z.z() - xi.xi()).norm();
    if d < NEAR_BOUNDARY {
        return Err(Error::NumericDegeneracy(format!(
            "{} is within {NEAR_BOUNDARY:e} of {xi}",
            z.z()
        )));
    }
    Ok(z.gap() / (d * d))
}

/// `beta_xi(x, y) = log P(x, xi) - log P(y, xi)`.
pub fn busemann_poisson(xi: &CirclePoint, x: &DiskPoint, y: &DiskPoint) -> Result<f64> {
    let log_p = |z: &DiskPoint| -> Result<f64> {
        let d = (z.z() - xi.xi()).norm();
        if d < NEAR_BOUNDARY {
            return Err(Error::NumericDegeneracy(format!(
                "{} is within {NEAR_BOUNDARY:e} of {xi}",
                z.z()
            )));
        }
        Ok(z.gap().ln() - 2.0 * d.ln())
    };
    Ok(log_p(x)? - log_p(y)?)
}

/// `d(g lambda)/d lambda (xi) = P(g(0), xi) = 1 / |conj(a) xi - b|^2`.
pub fn visual_density(g: &MobiusMap, xi: &CirclePoint) -> Result<f64> {
    Ok(log_visual_density(g, xi)?.exp())
}

pub fn log_visual_density(g: &MobiusMap, xi: &CirclePoint) -> Result<f64> {
    let d = (g.a().conj() * xi.xi() - g.b()).norm();
    if d < NEAR_BOUNDARY {
        return Err(Error::NumericDegeneracy(format!(
            "orbit point of {g} is within {NEAR_BOUNDARY:e} of {xi}"
        )));
    }
    Ok(-2.0 * d.ln())
}

/// `beta_xi(0, g(0))`, the horoball level of the orbit point `g(0)`.
pub fn orbit_horofunction(g: &MobiusMap, xi: &CirclePoint) -> f64 {
    2.0 * (g.a().conj() * xi.xi() - g.b()).norm().ln()
}

/// Distance from `g(0)` to the geodesic ray from `0` towards `xi`.
pub fn orbit_tube_distance(g: &MobiusMap, xi: &CirclePoint) -> f64 {
    let p = g.orbit_point();
    let rotated = p.z() * xi.xi().conj();
    if rotated.re >= 0.0 {
        (2.0 * rotated.im.abs() / p.gap()).asinh()
    } else {
        g.displacement()
    }
}

/// Stereographic Cayley map sending `2i` in the upper half-plane to `0`.
pub fn cayley(z: Complex64) -> Complex64 {
    let p = Complex64::new(0.0, presets::UPPER_HALF_PLANE_BASE);
    (z - p) / (z - p.conj())
}

/// The Poincare disk as a [`SpaceModel`] with basepoint `0` and radial approach
/// `z_n = (1 - e^{-n}) xi`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DiskModel;

impl SpaceModel for DiskModel {
    type Point = DiskPoint;
    type Boundary = CirclePoint;

    fn basepoint(&self) -> DiskPoint {
        DiskPoint::ORIGIN
    }

    fn distance(&self, x: &DiskPoint, y: &DiskPoint) -> f64 {
        hyp_distance(x, y)
    }

    fn boundary_approach(&self, omega: &CirclePoint, n: usize) -> Result<DiskPoint> {
        DiskPoint::radial(omega, (-(n as f64)).exp())
    }

    fn exact_busemann(&self, omega: &CirclePoint, x: &DiskPoint, y: &DiskPoint) -> Option<Result<f64>> {
        Some(busemann_poisson(omega, x, y))
    }

    fn delta(&self) -> f64 {
        std::f64::consts::LN_2
    }

    fn defect(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(Complex64::new(re, im)).unwrap()
    }

    fn random_map(rng: &mut ChaCha8Rng) -> MobiusMap {
        let b = Complex64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(0.0..6.3));
        let a = Complex64::from_polar((1.0 + b.norm_sqr()).sqrt(), rng.gen_range(0.0..6.3));
        MobiusMap::new(a, b).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng) -> DiskPoint {
        DiskPoint::new(Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..6.3))).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_distance(&DiskPoint::ORIGIN, &DiskPoint::ORIGIN), 0.0);
        assert!((hyp_distance(&DiskPoint::ORIGIN, &pt(0.5, 0.0)) - 3f64.ln()).abs() < 1e-12);
        let (x, y) = (pt(0.3, -0.2), pt(-0.6, 0.1));
        assert_eq!(hyp_distance(&x, &y), hyp_distance(&y, &x));
    }

    #[test]
    fn mobius_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = Complex64::new(0.2, 0.4);
        assert_eq!(MobiusMap::IDENTITY.apply(z).unwrap(), z);
        for _ in 0..200 {
            let (g, h) = (random_map(&mut rng), random_map(&mut rng));
            let origin = g.apply(Complex64::new(0.0, 0.0)).unwrap();
            assert!((origin - g.b() / g.a().conj()).norm() < 1e-14);
            let z = random_point(&mut rng).z();
            let lhs = g.apply(h.apply(z).unwrap()).unwrap();
            let rhs = g.compose(&h).apply(z).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
            assert!((g.compose(&g.inverse()).distance(&MobiusMap::IDENTITY)) < 1e-10);
        }
    }

    #[test]
    fn distance_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let g = random_map(&mut rng);
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            let before = hyp_distance(&x, &y);
            let after = hyp_distance(&g.apply_point(&x).unwrap(), &g.apply_point(&y).unwrap());
            assert!((before - after).abs() < 1e-9, "{before} vs {after}");
        }
    }

    #[test]
    fn poisson_busemann_examples() {
        let one = CirclePoint::from_angle(0.0);
        let minus_one = CirclePoint::from_angle(std::f64::consts::PI);
        let (o, half) = (DiskPoint::ORIGIN, pt(0.5, 0.0));
        assert_eq!(busemann_poisson(&one, &half, &half).unwrap(), 0.0);
        assert!((busemann_poisson(&one, &o, &half).unwrap() + 3f64.ln()).abs() < 1e-12);
        assert!((busemann_poisson(&minus_one, &o, &half).unwrap() - 3f64.ln()).abs() < 1e-12);
        let near = DiskPoint::radial(&one, 1e-14).unwrap();
        assert!(busemann_poisson(&one, &near, &o).is_err());
    }

    #[test]
    fn poisson_cocycle_and_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let xi = CirclePoint::from_angle(rng.gen_range(0.0..6.3));
            let (x, y, z) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            let cyc = busemann_poisson(&xi, &x, &y).unwrap()
                + busemann_poisson(&xi, &y, &z).unwrap()
                + busemann_poisson(&xi, &z, &x).unwrap();
            assert!(cyc.abs() < 1e-9);
            assert!(busemann_poisson(&xi, &x, &y).unwrap().abs() <= hyp_distance(&x, &y) + 1e-9);
            let g = random_map(&mut rng);
            let moved = busemann_poisson(
                &g.apply_boundary(&xi).unwrap(),
                &g.apply_point(&x).unwrap(),
                &g.apply_point(&y).unwrap(),
            )
            .unwrap();
            assert!((moved - busemann_poisson(&xi, &x, &y).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn visual_density_is_conformal() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert_eq!(visual_density(&MobiusMap::IDENTITY, &CirclePoint::from_angle(1.0)).unwrap(), 1.0);
        for _ in 0..1000 {
            let g = random_map(&mut rng);
            let xi = CirclePoint::from_angle(rng.gen_range(0.0..6.3));
            let lhs = log_visual_density(&g, &xi).unwrap();
            let rhs = busemann_poisson(&xi, &g.orbit_point(), &DiskPoint::ORIGIN).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn visual_density_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = random_map(&mut rng);
            // periodic trapezoid rule converges geometrically for the smooth kernel
            let n = 20_000;
            let mean: f64 = (0..n)
                .map(|i| {
                    let xi = CirclePoint::from_angle(2.0 * std::f64::consts::PI * i as f64 / n as f64);
                    visual_density(&g, &xi).unwrap()
                })
                .sum::<f64>()
                / n as f64;
            assert!((mean - 1.0).abs() < 1e-6, "{mean}");
        }
    }

    #[test]
    fn density_composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let (g, h) = (random_map(&mut rng), random_map(&mut rng));
            let xi = CirclePoint::from_angle(rng.gen_range(0.0..6.3));
            // d(gh lambda)/d lambda (xi) = d(g lambda)/d lambda(xi) * d(h lambda)/d lambda(g^-1 xi)
            let lhs = log_visual_density(&g.compose(&h), &xi).unwrap();
            let pulled = g.inverse().apply_boundary(&xi).unwrap();
            let rhs = log_visual_density(&g, &xi).unwrap() + log_visual_density(&h, &pulled).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn determinant_survives_long_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gens: Vec<MobiusMap> = (0..4).map(|_| random_map(&mut rng)).collect();
        let mut g = MobiusMap::IDENTITY;
        for i in 0..10_000 {
            g = g.compose(&gens[(i * 7 + i / 3) % 4]);
            if g.b().norm() > 1e6 {
                g = g.compose(&g.inverse()).compose(&gens[0]);
            }
        }
        assert!((g.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tube_distance_on_axis() {
        let xi = CirclePoint::from_angle(0.0);
        let along = MobiusMap::new(Complex64::new(2f64.cosh(), 0.0), Complex64::new(2f64.sinh(), 0.0)).unwrap();
        assert!(orbit_tube_distance(&along, &xi).abs() < 1e-12);
        let away = along.inverse();
        assert!((orbit_tube_distance(&away, &xi) - away.displacement()).abs() < 1e-12);
    }
}

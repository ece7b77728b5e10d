//! Exact model: `F_k` acting on the boundary of its Cayley tree.
//!
//! All quantities here are integers or rationals. The Busemann cocycle at a ray
//! `w` is `beta_w(x, y) = (|y| - 2 cp(y, w)) - (|x| - 2 cp(x, w))`, where `cp` is the
//! common-prefix length, and the uniform boundary measure is conformal of
//! dimension `log(2k - 1)` with zero defect.

mod horospheric;
mod ray;
mod stallings;
mod word;

pub use horospheric::{
    decide_ep_horospheric, horocycle_counts, EpDecision, HoroVerdict, HorocycleCounts, Witness,
};
pub use ray::BoundaryRay;
pub use stallings::{RayReading, StallingsGraph};
pub use word::{alphabet, shortlex, Letter, ReducedWord, MAX_RANK};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::hyperbolic::SpaceModel;
use crate::error::Result;

/// Horofunction of `x` at `ray`: `|x| - 2 cp(x, ray)`, i.e. `beta_ray(e, x)`.
pub fn horofunction(ray: &BoundaryRay, x: &ReducedWord) -> i64 {
    x.len() as i64 - 2 * ray.common_prefix_len(x) as i64
}

/// Exact Busemann cocycle `beta_ray(x, y)` on the tree.
pub fn tree_busemann(ray: &BoundaryRay, x: &ReducedWord, y: &ReducedWord) -> i64 {
    horofunction(ray, y) - horofunction(ray, x)
}

/// Uniform measure of the cylinder of rays starting with `w`.
pub fn cylinder_mass(rank: usize, w: &ReducedWord) -> BigRational {
    assert!(rank >= 2, "the uniform stream needs rank >= 2");
    if w.is_empty() {
        return BigRational::one();
    }
    let branching = BigInt::from(2 * rank as i64 - 1);
    let denom = BigInt::from(2 * rank as i64) * Pow::pow(&branching, (w.len() - 1) as u32);
    BigRational::new(BigInt::one(), denom)
}

/// `d(g lambda)/d lambda` at `ray` for the uniform measure, as the stabilized ratio
/// `lambda(g^-1 Cyl(w_n)) / lambda(Cyl(w_n))` with `n = |g| + 1`.
pub fn stream_density(rank: usize, g: &ReducedWord, ray: &BoundaryRay) -> BigRational {
    let n = g.len() + 1;
    let cylinder = ray.prefix_word(n);
    let pulled_back = g.inverse().mul(&cylinder);
    cylinder_mass(rank, &pulled_back) / cylinder_mass(rank, &cylinder)
}

/// Closed-form exponent of the uniform stream: `beta_ray(g, e) = 2 cp(g, ray) - |g|`.
pub fn conformal_exponent(g: &ReducedWord, ray: &BoundaryRay) -> i64 {
    -horofunction(ray, g)
}

/// Mass of the image of the uniform measure under `g` relative to it, from the closed form.
pub fn conformal_density(rank: usize, g: &ReducedWord, ray: &BoundaryRay) -> BigRational {
    power_of_branching(rank, conformal_exponent(g, ray))
}

/// `(2k - 1)^e` as an exact rational.
pub fn power_of_branching(rank: usize, exponent: i64) -> BigRational {
    let base = BigInt::from(2 * rank as i64 - 1);
    let p = Pow::pow(&base, exponent.unsigned_abs() as u32);
    if exponent >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// The Cayley tree of `F_k` as a [`SpaceModel`]: vertices are reduced words, the
/// basepoint is the identity and the approach to a ray runs along its prefixes.
#[derive(Clone, Copy, Debug)]
pub struct TreeModel {
    pub rank: usize,
}

impl SpaceModel for TreeModel {
    type Point = ReducedWord;
    type Boundary = BoundaryRay;

    fn basepoint(&self) -> ReducedWord {
        ReducedWord::identity()
    }

    fn distance(&self, x: &ReducedWord, y: &ReducedWord) -> f64 {
        x.inverse().mul(y).len() as f64
    }

    fn boundary_approach(&self, omega: &BoundaryRay, n: usize) -> Result<ReducedWord> {
        Ok(omega.prefix_word(n))
    }

    fn exact_busemann(
        &self,
        omega: &BoundaryRay,
        x: &ReducedWord,
        y: &ReducedWord,
    ) -> Option<Result<f64>> {
        Some(Ok(tree_busemann(omega, x, y) as f64))
    }

    fn delta(&self) -> f64 {
        0.0
    }

    fn defect(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 2).unwrap()
    }

    fn ray(s: &str) -> BoundaryRay {
        BoundaryRay::parse(s, 2).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn busemann_examples() {
        assert_eq!(tree_busemann(&ray("(a)"), &w("ab"), &w("ab")), 0);
        assert_eq!(tree_busemann(&ray("(a)"), &w(""), &w("a")), -1);
        assert_eq!(tree_busemann(&ray("(a)"), &w(""), &w("b")), 1);
    }

    #[test]
    fn busemann_matches_stabilized_distance_differences() {
        let model = TreeModel { rank: 2 };
        let omega = ray("bA(ab)");
        for (x, y) in [("", "a"), ("bA", "b"), ("ab", "BB"), ("bAab", "aaa")] {
            let (x, y) = (w(x), w(y));
            let exact = tree_busemann(&omega, &x, &y);
            for n in x.len() + y.len() + 1..x.len() + y.len() + 8 {
                let z = model.boundary_approach(&omega, n).unwrap();
                let diff = model.distance(&y, &z) - model.distance(&x, &z);
                assert_eq!(diff as i64, exact);
            }
        }
    }

    #[test]
    fn cylinder_masses() {
        assert_eq!(cylinder_mass(2, &w("")), q(1, 1));
        assert_eq!(cylinder_mass(2, &w("B")), q(1, 4));
        assert_eq!(cylinder_mass(2, &w("ab")), q(1, 12));
        // additivity over the 2k - 1 reduced extensions
        for base in ["a", "bA", "abAB"] {
            let parent = w(base);
            let sum: BigRational = alphabet(2)
                .filter(|l| Some(l.inverse()) != parent.last())
                .map(|l| cylinder_mass(2, &parent.mul(&ReducedWord::reduce([l]))))
                .sum();
            assert_eq!(sum, cylinder_mass(2, &parent));
        }
    }

    #[test]
    fn density_examples() {
        assert_eq!(stream_density(2, &w(""), &ray("(ab)")), q(1, 1));
        assert_eq!(stream_density(2, &w("a"), &ray("(a)")), q(3, 1));
        assert_eq!(stream_density(2, &w("a"), &ray("(b)")), q(1, 3));
        assert_eq!(conformal_density(2, &w("a"), &ray("(b)")), q(1, 3));
    }
}

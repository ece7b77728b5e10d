use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const DEGENERATE: f64 = 1e-14;

/// Orientation-preserving isometry `z -> (a z + b) / (conj(b) z + conj(a))` of the
/// Poincare disk, normalized to `|a|^2 - |b|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
}

/// Interior point of the disk together with `1 - |z|^2`, kept separately so that
/// points close to the circle do not lose precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint {
    z: Complex64,
    gap: f64,
}

/// Point of the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirclePoint {
    xi: Complex64,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    /// Builds and renormalizes; fails unless `|a| > |b|`.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > DEGENERATE) || !det.is_finite() {
            return Err(Error::NumericDegeneracy(format!(
                "|a|^2 - |b|^2 = {det:e} is not positive"
            )));
        }
        let s = det.sqrt();
        Ok(MobiusMap { a: a / s, b: b / s })
    }

    /// Rotation `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        MobiusMap {
            a: Complex64::from_polar(1.0, theta / 2.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// `|a|^2 - |b|^2`, equal to one up to rounding.
    pub fn determinant(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Rescales to unit determinant when the drift exceeds the rounding noise of
    /// `|a|^2 - |b|^2`, which grows like `|a|^2`; rescaling large matrices on noise
    /// alone would perturb their entries by `O(|a|^3)` ulps.
    pub fn renormalized(&self) -> Self {
        let det = self.determinant();
        let noise = 64.0 * f64::EPSILON * (self.a.norm_sqr() + self.b.norm_sqr());
        if (det - 1.0).abs() <= noise {
            return *self;
        }
        let s = det.sqrt();
        MobiusMap {
            a: self.a / s,
            b: self.b / s,
        }
    }

    /// `self o other`, renormalized.
    pub fn compose(&self, other: &MobiusMap) -> Self {
        MobiusMap {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
        .renormalized()
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Matrix distance up to the global sign `g ~ -g`.
    pub fn distance(&self, other: &MobiusMap) -> f64 {
        let same = ((self.a - other.a).norm_sqr() + (self.b - other.b).norm_sqr()).sqrt();
        let flipped = ((self.a + other.a).norm_sqr() + (self.b + other.b).norm_sqr()).sqrt();
        same.min(flipped)
    }

    /// Fractional-linear action on the closed disk.
    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let denom = self.b.conj() * z + self.a.conj();
        if denom.norm() < DEGENERATE {
            return Err(Error::NumericDegeneracy(format!(
                "denominator vanishes at z = {z}"
            )));
        }
        Ok((self.a * z + self.b) / denom)
    }

    pub fn apply_point(&self, p: &DiskPoint) -> Result<DiskPoint> {
        let denom = self.b.conj() * p.z + self.a.conj();
        if denom.norm() < DEGENERATE {
            return Err(Error::NumericDegeneracy(format!(
                "denominator vanishes at z = {}",
                p.z
            )));
        }
        Ok(DiskPoint {
            z: (self.a * p.z + self.b) / denom,
            gap: p.gap / denom.norm_sqr(),
        })
    }

    pub fn apply_boundary(&self, xi: &CirclePoint) -> Result<CirclePoint> {
        Ok(CirclePoint::new(self.apply(xi.xi)?))
    }

    /// `g(0) = b / conj(a)`, with `1 - |g(0)|^2 = 1 / |a|^2` exactly.
    pub fn orbit_point(&self) -> DiskPoint {
        DiskPoint {
            z: self.b / self.a.conj(),
            gap: 1.0 / self.a.norm_sqr(),
        }
    }

    /// `d(0, g(0)) = arcosh(|a|^2 + |b|^2)`.
    pub fn displacement(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).max(1.0).acosh()
    }

    /// `|Re a|`: the map is hyperbolic when this exceeds one.
    pub fn half_trace(&self) -> f64 {
        self.a.re.abs()
    }

    /// Translation length `2 arcosh |Re a|` of a hyperbolic map (zero otherwise).
    pub fn translation_length(&self) -> f64 {
        2.0 * self.half_trace().max(1.0).acosh()
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[a={:+.6}{:+.6}i, b={:+.6}{:+.6}i]",
            self.a.re, self.a.im, self.b.re, self.b.im
        )
    }
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint {
        z: Complex64::new(0.0, 0.0),
        gap: 1.0,
    };

    pub fn new(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::InvalidParams(format!(
                "{z} is not inside the unit disk"
            )));
        }
        Ok(DiskPoint {
            z,
            gap: (1.0 - r) * (1.0 + r),
        })
    }

    /// `(1 - eps) xi`, with `1 - |z|^2 = eps (2 - eps)` kept exactly.
    pub fn radial(xi: &CirclePoint, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParams(format!("radial offset {eps} not in (0, 1]")));
        }
        Ok(DiskPoint {
            z: xi.xi * (1.0 - eps),
            gap: eps * (2.0 - eps),
        })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// `1 - |z|^2`.
    pub fn gap(&self) -> f64 {
        self.gap
    }
}

impl CirclePoint {
    /// Projects a nonzero complex number radially onto the circle.
    pub fn new(xi: Complex64) -> Self {
        let r = xi.norm();
        assert!(r > 0.0, "cannot project 0 onto the circle");
        CirclePoint { xi: xi / r }
    }

    pub fn from_angle(theta: f64) -> Self {
        CirclePoint {
            xi: Complex64::from_polar(1.0, theta),
        }
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    pub fn angle(&self) -> f64 {
        self.xi.arg()
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^(i*{:.12})", self.angle())
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.angle())
    }
}

impl Serialize for MobiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.re, self.a.im, self.b.re, self.b.im].serialize(s)
    }
}

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::MobiusMap;
use crate::error::{Error, Result};

/// Imaginary part of the upper half-plane point sent to the origin. The standard
/// fundamental domain of the modular group is the Dirichlet domain centred at `2i`,
/// whose stabilizer is trivial.
pub(crate) const UPPER_HALF_PLANE_BASE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    LatticePsl2z,
    Schottky,
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice-psl2z" => Ok(PresetName::LatticePsl2z),
            "schottky" => Ok(PresetName::Schottky),
            other => Err(Error::InvalidPreset(format!("unknown preset {other:?}"))),
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetName::LatticePsl2z => "lattice-psl2z",
            PresetName::Schottky => "schottky",
        })
    }
}

/// Two hyperbolic generators, each given by the angles of its repelling and
/// attracting fixed points on the circle and its translation length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchottkyParams {
    /// `[repelling, attracting]` angles per generator.
    pub axes: [[f64; 2]; 2],
    pub lengths: [f64; 2],
}

impl Default for SchottkyParams {
    fn default() -> Self {
        SchottkyParams {
            axes: [[PI, 0.0], [1.5 * PI, 0.5 * PI]],
            lengths: [5.0, 5.0],
        }
    }
}

/// A finitely generated Fuchsian group acting on the disk.
#[derive(Clone, Debug)]
pub struct GroupPreset {
    pub name: PresetName,
    pub schottky: Option<SchottkyParams>,
    /// Generators followed by the inverses of those that are not involutions.
    pub generators: Vec<MobiusMap>,
    /// One label per entry of `generators` (`S`, `T`, `t` or `a`, `b`, `A`, `B`).
    pub labels: Vec<char>,
    /// Index of the inverse of each generator.
    pub inverse_of: Vec<usize>,
    /// Integer matrices `(a, b, c, d)` of the generators, for arithmetic groups.
    pub integer_generators: Option<Vec<[i64; 4]>>,
}

impl GroupPreset {
    pub fn generator(&self, label: char) -> Option<&MobiusMap> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| &self.generators[i])
    }
}

/// Disk form of a real unimodular matrix acting on the upper half-plane, conjugated
/// by the Cayley map sending `2i` to `0`.
pub fn from_sl2r(a: f64, b: f64, c: f64, d: f64) -> Result<MobiusMap> {
    if ((a * d - b * c) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPreset(format!(
            "matrix ({a} {b}; {c} {d}) does not have determinant 1"
        )));
    }
    let y = UPPER_HALF_PLANE_BASE;
    let (a, b, c, d) = (a, b / y, c * y, d);
    MobiusMap::new(
        Complex64::new(a + d, b - c) / 2.0,
        Complex64::new(a - d, -(b + c)) / 2.0,
    )
}

/// Hyperbolic map with repelling fixed point `e^{i r}`, attracting fixed point
/// `e^{i s}` and translation length `length`.
pub fn hyperbolic_generator(repelling: f64, attracting: f64, length: f64) -> Result<MobiusMap> {
    if !(length > 0.0) {
        return Err(Error::InvalidPreset(format!(
            "translation length {length} must be positive"
        )));
    }
    let xr = Complex64::from_polar(1.0, repelling);
    let xa = Complex64::from_polar(1.0, attracting);
    let det = xa - xr;
    if det.norm() < 1e-9 {
        return Err(Error::InvalidPreset("axis endpoints coincide".into()));
    }
    // F diag(e^{l/2}, e^{-l/2}) F^{-1} with F(w) = (xa w + xr) / (w + 1)
    let (up, down) = ((length / 2.0).exp(), (-length / 2.0).exp());
    let p = (xa * up - xr * down) / det;
    let q = xa * xr * (down - up) / det;
    let r = (up - down) / det;
    if (r - q.conj()).norm() > 1e-9 * (1.0 + q.norm()) && (r + q.conj()).norm() > 1e-9 * (1.0 + q.norm()) {
        return Err(Error::NumericDegeneracy(
            "hyperbolic generator left SU(1,1)".into(),
        ));
    }
    MobiusMap::new(p, q)
}

/// Centre and radius of the isometric circle `|conj(b) z + conj(a)| = 1`.
fn isometric_circle(g: &MobiusMap) -> (Complex64, f64) {
    (-g.a().conj() / g.b().conj(), 1.0 / g.b().norm())
}

fn schottky(params: &SchottkyParams) -> Result<GroupPreset> {
    let mut maps = Vec::new();
    for i in 0..2 {
        let [r, s] = params.axes[i];
        maps.push(hyperbolic_generator(r, s, params.lengths[i])?);
    }
    let generators = vec![maps[0], maps[1], maps[0].inverse(), maps[1].inverse()];
    let circles: Vec<(Complex64, f64)> = generators.iter().map(isometric_circle).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            let (ci, ri) = circles[i];
            let (cj, rj) = circles[j];
            let gap = (ci - cj).norm() - ri - rj;
            if !(gap > 1e-9) {
                return Err(Error::InvalidPreset(format!(
                    "ping-pong check failed: isometric circles {i} and {j} overlap (gap {gap:.3e})"
                )));
            }
        }
    }
    Ok(GroupPreset {
        name: PresetName::Schottky,
        schottky: Some(params.clone()),
        generators,
        labels: vec!['a', 'b', 'A', 'B'],
        inverse_of: vec![2, 3, 0, 1],
        integer_generators: None,
    })
}

fn lattice() -> Result<GroupPreset> {
    let integer = vec![[0, -1, 1, 0], [1, 1, 0, 1], [1, -1, 0, 1]];
    let generators = integer
        .iter()
        .map(|&[a, b, c, d]| from_sl2r(a as f64, b as f64, c as f64, d as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupPreset {
        name: PresetName::LatticePsl2z,
        schottky: None,
        generators,
        labels: vec!['S', 'T', 't'],
        inverse_of: vec![0, 2, 1],
        integer_generators: Some(integer),
    })
}

/// Builds a preset; Schottky parameters default to [`SchottkyParams::default`].
pub fn preset(name: PresetName, params: Option<&SchottkyParams>) -> Result<GroupPreset> {
    match name {
        PresetName::LatticePsl2z => {
            if params.is_some() {
                return Err(Error::InvalidPreset(
                    "lattice-psl2z takes no parameters".into(),
                ));
            }
            lattice()
        }
        PresetName::Schottky => schottky(&params.cloned().unwrap_or_default()),
    }
}

//! Four-parameter activation units and the conversions between families.
//!
//! Every unit computes `k2 * g(k1 * x + b) + l` for one of four base shapes
//! `g`. The hard-linear shape (a ramp clamped to [0, 1]) is the workhorse:
//! its unit is exactly one chord of a sampled function. The others matter
//! because any unit with a finite center can be rebuilt in another family
//! with the same center point, center value, and center steepness, which is
//! what [`convert_unit`] does.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The four base activation shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    /// Ramp clamped to `[0, 1]`: `min(max(0, u), 1)`.
    HardLinear,
    /// Half-line ramp: `max(0, u)`.
    Relu,
    /// Logistic curve: `1 / (1 + exp(-u))`.
    Sigmoid,
    /// Hyperbolic tangent.
    Tanh,
}

impl ActivationKind {
    /// Applies the base shape at pre-activation `u`.
    pub fn apply(self, u: f64) -> f64 {
        match self {
            ActivationKind::HardLinear => u.clamp(0.0, 1.0),
            ActivationKind::Relu => u.max(0.0),
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-u).exp()),
            ActivationKind::Tanh => u.tanh(),
        }
    }

    /// Derivative of the base shape at `u`.
    ///
    /// The clamped shapes are non-differentiable at their kinks; there the
    /// derivative is pinned to 0, and training inherits that choice as its
    /// subgradient.
    pub fn derivative(self, u: f64) -> f64 {
        match self {
            ActivationKind::HardLinear => {
                if u > 0.0 && u < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Relu => {
                if u > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Sigmoid => {
                let s = 1.0 / (1.0 + (-u).exp());
                s * (1.0 - s)
            }
            ActivationKind::Tanh => {
                let t = u.tanh();
                1.0 - t * t
            }
        }
    }

    pub const ALL: [ActivationKind; 4] = [
        ActivationKind::HardLinear,
        ActivationKind::Relu,
        ActivationKind::Sigmoid,
        ActivationKind::Tanh,
    ];
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActivationKind::HardLinear => "hard-linear",
            ActivationKind::Relu => "relu",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Tanh => "tanh",
        })
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hard-linear" | "hard" | "hardlinear" => Ok(ActivationKind::HardLinear),
            "relu" => Ok(ActivationKind::Relu),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "tanh" => Ok(ActivationKind::Tanh),
            other => Err(Error::Parse(format!("unknown activation '{other}'"))),
        }
    }
}

/// One activation unit: `k2 * g(k1 * x + b) + l`.
///
/// `k1` is the inner slope, `b` the inner bias, `k2` the outer scale, `l`
/// the outer offset. A zero inner slope would make the unit constant, so it
/// is rejected at construction; a zero outer scale is legal (flat chords
/// produce them) but such a unit has no usable center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationUnit {
    kind: ActivationKind,
    k1: f64,
    b: f64,
    k2: f64,
    l: f64,
}

impl ActivationUnit {
    pub fn new(kind: ActivationKind, k1: f64, b: f64, k2: f64, l: f64) -> Result<Self> {
        if !(k1.is_finite() && b.is_finite() && k2.is_finite() && l.is_finite()) {
            return Err(Error::NonFiniteParam);
        }
        if k1 == 0.0 {
            return Err(Error::ZeroInnerSlope);
        }
        Ok(Self { kind, k1, b, k2, l })
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

/// Evaluates the unit at `x`.
pub fn unit_eval(u: &ActivationUnit, x: f64) -> f64 {
    u.k2 * u.kind.apply(u.k1 * x + u.b) + u.l
}

/// Derivative of the unit at `x`; zero at and beyond the kinks of the
/// clamped shapes.
pub fn unit_derivative(u: &ActivationUnit, x: f64) -> f64 {
    u.k2 * u.k1 * u.kind.derivative(u.k1 * x + u.b)
}

/// The two half-line units that sum to one hard-linear unit: a riser
/// `k2 * max(0, k1 x + b) + l` and a capper `-k2 * max(0, k1 x + b - 1)`.
/// Their sum equals the original everywhere, exactly.
pub fn relu_pair_from_hard(u: &ActivationUnit) -> Result<(ActivationUnit, ActivationUnit)> {
    if u.kind != ActivationKind::HardLinear {
        return Err(Error::KindMismatch {
            expected: ActivationKind::HardLinear,
            got: u.kind,
        });
    }
    let riser = ActivationUnit::new(ActivationKind::Relu, u.k1, u.b, u.k2, u.l)?;
    let capper = ActivationUnit::new(ActivationKind::Relu, u.k1, u.b - 1.0, -u.k2, 0.0)?;
    Ok((riser, capper))
}

/// Where a unit is steepest: its center point, the value there, and the
/// slope there. This triple is what survives a family conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterProfile {
    pub x: f64,
    pub value: f64,
    pub slope: f64,
}

/// Center profile of a unit.
///
/// Per family: hard-linear centers at the band midpoint `(1 - 2b) / (2 k1)`
/// with value `k2/2 + l` and slope `k1 k2`; sigmoid at `-b / k1` with value
/// `k2/2 + l` and slope `k1 k2 / 4`; tanh at `-b / k1` with value `l` and
/// slope `k1 k2`. Relu has no finite center.
pub fn unit_center(u: &ActivationUnit) -> Result<CenterProfile> {
    let profile = match u.kind {
        ActivationKind::HardLinear => CenterProfile {
            x: (1.0 - 2.0 * u.b) / (2.0 * u.k1),
            value: u.k2 / 2.0 + u.l,
            slope: u.k1 * u.k2,
        },
        ActivationKind::Sigmoid => CenterProfile {
            x: -u.b / u.k1,
            value: u.k2 / 2.0 + u.l,
            slope: u.k1 * u.k2 / 4.0,
        },
        ActivationKind::Tanh => CenterProfile {
            x: -u.b / u.k1,
            value: u.l,
            slope: u.k1 * u.k2,
        },
        ActivationKind::Relu => return Err(Error::NoCenter { kind: u.kind }),
    };
    Ok(profile)
}

/// Rebuilds `u` in the `target` family with the same center profile.
///
/// Three center equations constrain four parameters. The outer scale is
/// fixed by the convention `k2 := 2 * (center value - l)`; when that is zero
/// (tanh sources, whose center value equals their offset) the source's own
/// outer scale carries over instead, which keeps same-family conversion the
/// identity. The offset then absorbs whatever the value equation leaves.
/// Relu has no center on either side of the map, so it is not a valid
/// target, and units with zero center slope cannot be converted at all.
pub fn convert_unit(u: &ActivationUnit, target: ActivationKind) -> Result<ActivationUnit> {
    if target == ActivationKind::Relu {
        return Err(Error::UnsupportedTarget { kind: target });
    }
    let c = unit_center(u)?;
    if c.slope == 0.0 {
        return Err(Error::DegenerateUnit);
    }
    let spread = 2.0 * (c.value - u.l);
    let k2 = if spread != 0.0 { spread } else { u.k2 };
    let (k1, b, l) = match target {
        ActivationKind::HardLinear => {
            let k1 = c.slope / k2;
            (k1, 0.5 - k1 * c.x, c.value - k2 / 2.0)
        }
        ActivationKind::Sigmoid => {
            let k1 = 4.0 * c.slope / k2;
            (k1, -k1 * c.x, c.value - k2 / 2.0)
        }
        ActivationKind::Tanh => {
            let k1 = c.slope / k2;
            (k1, -k1 * c.x, c.value)
        }
        ActivationKind::Relu => unreachable!(),
    };
    ActivationUnit::new(target, k1, b, k2, l)
}

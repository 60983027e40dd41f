//! Charts and tangent-bundle trivializations of S^2 in exact rational
//! arithmetic, linear and nonlinear flows, and the torus rotation and
//! clock-shift matrices.
//!
//! The tangent bundle of S^1 is the product S^1 x R; [`CircleTangent`]
//! is that product written out, with nothing further to compute.

mod bundle;
mod flow;
mod sphere;
mod torus;
mod verify;

use std::fmt;

use serde::Serialize;

use crate::arith::BigRational;
use crate::error::{Error, Result};

pub use bundle::{
    bundle_inverse, bundle_trivialization, cocycle_product, transition_apply, transition_matrix,
    Mat2, TransitionMatrix,
};
pub use flow::{linear_flow, matrix_exp, nonlinear_flow, FlowResult, MatrixExp, SquareMatrix};
pub use sphere::{chart, chart_inverse, chart_roundtrip, stereographic_transition, Atlas, RoundTrip};
pub use torus::{clock_shift_pair, kronecker_orbit, ClockShift, OrbitStats, HISTOGRAM_BINS};
pub use verify::{sample_points, verify_charts, ChartReport, SampleReport};

/// A point of S^2 with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpherePoint {
    x: [BigRational; 3],
}

impl SpherePoint {
    /// Fails unless x1^2 + x2^2 + x3^2 = 1 exactly.
    pub fn new(x1: BigRational, x2: BigRational, x3: BigRational) -> Result<Self> {
        let x = [x1, x2, x3];
        if norm_squared(&x) != 1 {
            return Err(Error::domain(format!(
                "({}, {}, {}) is not on the unit sphere",
                x[0], x[1], x[2]
            )));
        }
        Ok(SpherePoint { x })
    }

    pub fn from_ints(num: [i64; 3], den: i64) -> Result<Self> {
        let [a, b, c] = num.map(|n| BigRational::from((n, den)));
        SpherePoint::new(a, b, c)
    }

    pub fn coords(&self) -> &[BigRational; 3] {
        &self.x
    }

    /// Coordinate x_i for i in 1..=3.
    pub fn x(&self, i: usize) -> &BigRational {
        &self.x[i - 1]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x[0].to_f64(), self.x[1].to_f64(), self.x[2].to_f64()]
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x[0], self.x[1], self.x[2])
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.x.iter().map(|r| r.to_string()).collect();
        strs.serialize(serializer)
    }
}

pub(crate) fn norm_squared(x: &[BigRational; 3]) -> BigRational {
    x.iter()
        .map(|c| BigRational::from(c * c))
        .fold(BigRational::new(), |acc, c| acc + c)
}

pub(crate) fn dot(x: &[BigRational; 3], t: &[BigRational; 3]) -> BigRational {
    x.iter()
        .zip(t)
        .map(|(a, b)| BigRational::from(a * b))
        .fold(BigRational::new(), |acc, c| acc + c)
}

/// Exact square root of a non-negative rational, if it is rational.
pub(crate) fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if *r < 0 {
        return None;
    }
    let (num, den) = (r.numer(), r.denom());
    if !num.is_perfect_square() || !den.is_perfect_square() {
        return None;
    }
    Some(BigRational::from((num.clone().sqrt(), den.clone().sqrt())))
}

/// Inverse stereographic projection from the north pole:
/// (a, b) -> (2a, 2b, a^2 + b^2 - 1) / (a^2 + b^2 + 1).
///
/// Every rational seed lands on S^2; the north pole itself is never hit.
pub fn rational_sphere_point(seed: (BigRational, BigRational)) -> SpherePoint {
    let (a, b) = seed;
    let r2 = BigRational::from(&a * &a) + BigRational::from(&b * &b);
    let den = BigRational::from(&r2 + 1u32);
    let x1 = BigRational::from(&a * 2u32) / &den;
    let x2 = BigRational::from(&b * 2u32) / &den;
    let x3 = (r2 - 1u32) / den;
    SpherePoint { x: [x1, x2, x3] }
}

/// A point of TS^1 = S^1 x R: an angle in [0, 1) turns and a speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleTangent {
    pub angle: f64,
    pub speed: f64,
}

impl CircleTangent {
    pub fn new(angle: f64, speed: f64) -> Self {
        CircleTangent {
            angle: angle.rem_euclid(1.0),
            speed,
        }
    }
}

use serde::{Deserialize, Serialize};

use super::{non_minimal_at, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::primes::is_prime;

/// Reduction behaviour of a Weierstrass model at a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionType {
    Good,
    Cusp,
    /// Node with both tangents rational over F_p.
    SplitNode,
    /// Node whose tangents are conjugate over F_{p^2}.
    NonsplitNode,
}

impl ReductionType {
    /// Trace forced by the singularity type; `None` for good reduction.
    pub fn singular_trace(self) -> Option<i64> {
        match self {
            ReductionType::Good => None,
            ReductionType::Cusp => Some(0),
            ReductionType::SplitNode => Some(1),
            ReductionType::NonsplitNode => Some(-1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReductionType::Good => "good",
            ReductionType::Cusp => "cusp",
            ReductionType::SplitNode => "split-node",
            ReductionType::NonsplitNode => "nonsplit-node",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "good" => Ok(ReductionType::Good),
            "cusp" => Ok(ReductionType::Cusp),
            "split-node" => Ok(ReductionType::SplitNode),
            "nonsplit-node" => Ok(ReductionType::NonsplitNode),
            other => Err(Error::Parse(format!("unknown reduction type {other:?}"))),
        }
    }
}

/// Point count and trace of Frobenius at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCurveData {
    pub p: u64,
    /// Projective points over F_p, the point at infinity included.
    #[serde(rename = "A_p")]
    pub point_count: u64,
    pub t_p: i64,
    #[serde(rename = "type")]
    pub reduction: ReductionType,
}

/// Coefficients reduced into [0, p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedCurve {
    p: u64,
    a1: u64,
    a2: u64,
    a3: u64,
    a4: u64,
    a6: u64,
}

impl ReducedCurve {
    pub fn new(curve: &WeierstrassCurve, p: u64) -> Self {
        let [a1, a2, a3, a4, a6] = curve.coefficients();
        let m = |a: &crate::arith::BigInt| -> u64 { a.mod_u(p as u32) as u64 };
        ReducedCurve {
            p,
            a1: m(a1),
            a2: m(a2),
            a3: m(a3),
            a4: m(a4),
            a6: m(a6),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    /// x^3 + a2 x^2 + a4 x + a6.
    fn cubic(&self, x: u64) -> u64 {
        let inner = self.add(self.mul(self.add(x, self.a2), x), self.a4);
        self.add(self.mul(inner, x), self.a6)
    }

    /// a1 x + a3.
    fn linear(&self, x: u64) -> u64 {
        self.add(self.mul(self.a1, x), self.a3)
    }

    /// y^2 + (a1 x + a3) y - cubic(x).
    pub fn eval(&self, x: u64, y: u64) -> u64 {
        let lhs = self.mul(y, self.add(y, self.linear(x)));
        self.sub(lhs, self.cubic(x))
    }

    /// (dF/dx, dF/dy).
    fn gradient(&self, x: u64, y: u64) -> (u64, u64) {
        let p = self.p;
        let three_x2 = self.mul(3 % p, self.mul(x, x));
        let two_a2_x = self.mul(2 % p, self.mul(self.a2, x));
        let fx = self.sub(self.mul(self.a1, y), self.add(self.add(three_x2, two_a2_x), self.a4));
        let fy = self.add(self.mul(2 % p, y), self.linear(x));
        (fx, fy)
    }

    /// Affine solutions plus the point at infinity.
    pub fn count_projective(&self) -> u64 {
        let p = self.p;
        if p == 2 {
            let affine = (0..2)
                .flat_map(|x| (0..2).map(move |y| (x, y)))
                .filter(|&(x, y)| self.eval(x, y) == 0)
                .count() as u64;
            return affine + 1;
        }
        // roots in y of y^2 + b y - c: 1 + legendre(b^2 + 4c)
        let mut square = vec![false; p as usize];
        for y in 0..p {
            square[self.mul(y, y) as usize] = true;
        }
        let mut affine = 0u64;
        for x in 0..p {
            let b = self.linear(x);
            let d = self.add(self.mul(b, b), self.mul(4 % p, self.cubic(x)));
            affine += if d == 0 {
                1
            } else if square[d as usize] {
                2
            } else {
                0
            };
        }
        affine + 1
    }

    /// The (unique) affine singular point, if any.
    pub fn singular_point(&self) -> Option<(u64, u64)> {
        let p = self.p;
        let is_singular = |x: u64, y: u64| {
            let (fx, fy) = self.gradient(x, y);
            self.eval(x, y) == 0 && fx == 0 && fy == 0
        };
        if p == 2 {
            return (0..2)
                .flat_map(|x| (0..2).map(move |y| (x, y)))
                .find(|&(x, y)| is_singular(x, y));
        }
        let inv2 = p.div_ceil(2);
        (0..p)
            .map(|x| (x, self.mul(self.sub(0, self.linear(x)), inv2)))
            .find(|&(x, y)| is_singular(x, y))
    }
}

/// Location and type of the singularity on a bad reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularReduction {
    pub point: (u64, u64),
    pub reduction: ReductionType,
}

/// Finds the singular point, moves it to the origin and factors the tangent
/// cone Y^2 + a1 XY - (3 x0 + a2) X^2 over F_p.
pub fn classify_singular(reduced: &ReducedCurve) -> Result<SingularReduction> {
    let (x0, y0) = reduced.singular_point().ok_or_else(|| {
        Error::Internal(format!(
            "no singular point found on a reduction mod {} with p | disc",
            reduced.p
        ))
    })?;
    let p = reduced.p;
    let c = reduced.add(reduced.mul(3 % p, x0), reduced.a2);
    // slopes T = Y/X with T^2 + a1 T - c = 0; X = 0 is never a tangent
    let mut roots = 0;
    let mut repeated = false;
    for t in 0..p {
        let value = reduced.sub(reduced.mul(t, reduced.add(t, reduced.a1)), c);
        if value == 0 {
            roots += 1;
            if reduced.add(reduced.mul(2 % p, t), reduced.a1) == 0 {
                repeated = true;
            }
        }
    }
    let reduction = match (roots, repeated) {
        (1, true) => ReductionType::Cusp,
        (2, false) => ReductionType::SplitNode,
        (0, _) => ReductionType::NonsplitNode,
        other => {
            return Err(Error::Internal(format!(
                "tangent cone mod {p} has inconsistent root data {other:?}"
            )))
        }
    };
    Ok(SingularReduction {
        point: (x0, y0),
        reduction,
    })
}

/// A_p by exhaustive enumeration together with t_p and the reduction type.
pub fn count_points(curve: &WeierstrassCurve, p: u64) -> Result<LocalCurveData> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > u32::MAX as u64 {
        return Err(Error::domain(format!("prime {p} is beyond the enumeration range")));
    }
    let reduced = ReducedCurve::new(curve, p);
    let point_count = reduced.count_projective();
    let t_p = 1 + p as i64 - point_count as i64;
    let bad = curve.discriminant().is_divisible_u(p as u32);
    let reduction = if bad {
        let singular = classify_singular(&reduced)?;
        let expected = singular.reduction.singular_trace().unwrap_or_default();
        if expected != t_p {
            return Err(Error::Internal(format!(
                "mod {p}: {} reduction but t_p = {t_p}",
                singular.reduction.as_str()
            )));
        }
        singular.reduction
    } else {
        ReductionType::Good
    };
    if bad && non_minimal_at(curve, p) {
        log::warn!("model [{curve}] looks non-minimal at p = {p}; local data refer to this model");
    }
    Ok(LocalCurveData {
        p,
        point_count,
        t_p,
        reduction,
    })
}

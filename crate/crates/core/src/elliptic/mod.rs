//! Weierstrass curves y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q,
//! their reductions modulo primes, and the local and global L-data built
//! from point counts.
//!
//! Input models are trusted to be globally minimal; no minimal-model
//! reduction is attempted. [`non_minimal_at`] flags primes where the model
//! is visibly non-minimal.

mod cache;
mod lseries;
mod reduction;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{BigInt, BigRational};
use crate::error::{Error, Result};

pub use cache::ApCache;
pub use lseries::{
    coefficient_tail_bound, dirichlet_coefficients, euler_tail_log_bound, hasse_weil_truncated, local_zeta, HasseWeilValue, LSeriesTruncation,
    LocalZeta,
};
pub use reduction::{
    classify_singular, count_points, LocalCurveData, ReducedCurve, ReductionType,
    SingularReduction,
};

/// Integral Weierstrass coefficients; may be singular over Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    coeffs: [BigInt; 5],
}

/// The standard invariants b2, b4, b6, b8, c4, c6, discriminant and j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TateQuantities {
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub discriminant: BigInt,
    pub j: BigRational,
}

/// b-invariants, c-invariants and discriminant, without the j-invariant.
struct Invariants {
    b2: BigInt,
    b4: BigInt,
    b6: BigInt,
    b8: BigInt,
    c4: BigInt,
    c6: BigInt,
    discriminant: BigInt,
}

impl WeierstrassCurve {
    pub fn new(a1: BigInt, a2: BigInt, a3: BigInt, a4: BigInt, a6: BigInt) -> Self {
        WeierstrassCurve {
            coeffs: [a1, a2, a3, a4, a6],
        }
    }

    pub fn from_i64s(a: [i64; 5]) -> Self {
        WeierstrassCurve {
            coeffs: a.map(BigInt::from),
        }
    }

    /// [a1, a2, a3, a4, a6].
    pub fn coefficients(&self) -> &[BigInt; 5] {
        &self.coeffs
    }

    fn invariants(&self) -> Invariants {
        let [a1, a2, a3, a4, a6] = &self.coeffs;
        let b2 = BigInt::from(a1 * a1) + BigInt::from(a2 * 4u32);
        let b4 = BigInt::from(a4 * 2u32) + BigInt::from(a1 * a3);
        let b6 = BigInt::from(a3 * a3) + BigInt::from(a6 * 4u32);
        let a1sq = BigInt::from(a1 * a1);
        let b8 = BigInt::from(&a1sq * a6) + BigInt::from(a2 * a6) * 4u32
            - BigInt::from(a1 * a3) * a4
            + BigInt::from(a3 * a3) * a2
            - BigInt::from(a4 * a4);
        let c4 = BigInt::from(&b2 * &b2) - BigInt::from(&b4 * 24u32);
        let c6 = -BigInt::from(&b2 * &b2) * &b2 + BigInt::from(&b2 * &b4) * 36u32
            - BigInt::from(&b6 * 216u32);
        let discriminant = -BigInt::from(&b2 * &b2) * &b8 - BigInt::from(&b4 * &b4) * &b4 * 8u32
            - BigInt::from(&b6 * &b6) * 27u32
            + BigInt::from(&b2 * &b4) * &b6 * 9u32;
        Invariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            discriminant,
        }
    }

    pub fn discriminant(&self) -> BigInt {
        self.invariants().discriminant
    }

    pub fn c4(&self) -> BigInt {
        self.invariants().c4
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant() == 0
    }

    pub fn tate_quantities(&self) -> Result<TateQuantities> {
        let inv = self.invariants();
        if inv.discriminant == 0 {
            return Err(Error::Singular);
        }
        let c4_cubed = BigInt::from(&inv.c4 * &inv.c4) * &inv.c4;
        let j = BigRational::from((c4_cubed, inv.discriminant.clone()));
        Ok(TateQuantities {
            b2: inv.b2,
            b4: inv.b4,
            b6: inv.b6,
            b8: inv.b8,
            c4: inv.c4,
            c6: inv.c6,
            discriminant: inv.discriminant,
            j,
        })
    }

    /// Hex digest that keys on-disk caches for this exact model.
    pub fn hash_key(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.coeffs;
        write!(f, "{a1} {a2} {a3} {a4} {a6}")
    }
}

impl FromStr for WeierstrassCurve {
    type Err = Error;

    /// Five whitespace-separated integers "a1 a2 a3 a4 a6".
    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "curve needs five integers a1 a2 a3 a4 a6, got {}",
                parts.len()
            )));
        }
        let mut coeffs: [BigInt; 5] = Default::default();
        for (slot, raw) in coeffs.iter_mut().zip(&parts) {
            *slot = BigInt::from_str(raw)
                .map_err(|e| Error::Parse(format!("bad coefficient {raw:?}: {e}")))?;
        }
        Ok(WeierstrassCurve { coeffs })
    }
}

impl Serialize for WeierstrassCurve {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeierstrassCurve {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A Weierstrass model with nonzero discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct EllipticCurve(WeierstrassCurve);

impl EllipticCurve {
    pub fn new(curve: WeierstrassCurve) -> Result<Self> {
        if curve.is_singular() {
            return Err(Error::Singular);
        }
        Ok(EllipticCurve(curve))
    }

    pub fn from_i64s(a: [i64; 5]) -> Result<Self> {
        Self::new(WeierstrassCurve::from_i64s(a))
    }

    pub fn into_inner(self) -> WeierstrassCurve {
        self.0
    }
}

impl Deref for EllipticCurve {
    type Target = WeierstrassCurve;

    fn deref(&self) -> &WeierstrassCurve {
        &self.0
    }
}

impl FromStr for EllipticCurve {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        EllipticCurve::new(text.parse()?)
    }
}

/// True when p^12 | disc and p^4 | c4, i.e. the model can be scaled down at p.
pub fn non_minimal_at(curve: &WeierstrassCurve, p: u64) -> bool {
    let inv = curve.invariants();
    if inv.discriminant == 0 {
        return false;
    }
    let p = BigInt::from(p);
    let p4 = BigInt::from(rug::ops::Pow::pow(&p, 4u32));
    let p12 = BigInt::from(rug::ops::Pow::pow(&p, 12u32));
    inv.discriminant.is_divisible(&p12) && inv.c4.is_divisible(&p4)
}

//! Exact integers and rationals, precision-parameterised complex floats, and
//! the combinatorial sequences used by the Euler-Maclaurin corrections.

use std::fmt;
use std::sync::RwLock;

use rug::float::Round;
use rug::ops::CompleteRound;
use rug::{Complex, Float};

use crate::error::{Error, Result};

pub use rug::Integer as BigInt;
pub use rug::Rational as BigRational;

/// Environment variable holding the default mantissa precision in bits.
pub const PRECISION_ENV: &str = "ZETALAB_PRECISION";

/// Mantissa precision in bits for [`ComplexF`] arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(64);
    pub const MIN: u32 = 24;
    pub const MAX: u32 = 1 << 16;

    pub fn new(bits: u32) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&bits) {
            Ok(Precision(bits))
        } else {
            Err(Error::Parse(format!(
                "precision must lie in {}..={} bits, got {bits}",
                Self::MIN,
                Self::MAX
            )))
        }
    }

    /// Reads [`PRECISION_ENV`], falling back to [`Precision::DEFAULT`] when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Ok(raw) => {
                let bits = raw.trim().parse::<u32>().map_err(|_| {
                    Error::Parse(format!("{PRECISION_ENV}={raw:?} is not an integer"))
                })?;
                Precision::new(bits)
            }
            Err(_) => Ok(Precision::DEFAULT),
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Unit roundoff 2^-bits.
    pub fn unit_roundoff(self) -> f64 {
        (-(self.0 as f64)).exp2()
    }

    pub(crate) fn with_guard(self, guard: u32) -> Precision {
        Precision((self.0 + guard).min(Self::MAX))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

/// A complex number carried at an explicit binary precision.
#[derive(Clone, PartialEq)]
pub struct ComplexF {
    inner: Complex,
}

impl ComplexF {
    pub fn new(prec: Precision, re: f64, im: f64) -> Self {
        ComplexF {
            inner: Complex::with_val(prec.bits(), (re, im)),
        }
    }

    pub fn real(prec: Precision, re: f64) -> Self {
        Self::new(prec, re, 0.0)
    }

    /// Parses decimal strings for the two parts at the given precision.
    pub fn parse(prec: Precision, re: &str, im: &str) -> Result<Self> {
        let parse_part = |text: &str| -> Result<Float> {
            let parsed = Float::parse(text.trim())
                .map_err(|e| Error::Parse(format!("bad number {text:?}: {e}")))?;
            Ok(parsed.complete(prec.bits()))
        };
        let z = ComplexF {
            inner: Complex::with_val(prec.bits(), (parse_part(re)?, parse_part(im)?)),
        };
        z.check_finite("input")
    }

    pub fn from_complex(inner: Complex) -> Self {
        ComplexF { inner }
    }

    pub fn as_complex(&self) -> &Complex {
        &self.inner
    }

    pub fn into_complex(self) -> Complex {
        self.inner
    }

    pub fn precision(&self) -> Precision {
        Precision(self.inner.prec().0)
    }

    pub fn re(&self) -> &Float {
        self.inner.real()
    }

    pub fn im(&self) -> &Float {
        self.inner.imag()
    }

    pub fn re_f64(&self) -> f64 {
        self.inner.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.inner.imag().to_f64()
    }

    /// |z| rounded towards +inf.
    pub fn abs_upper(&self) -> f64 {
        let modulus = Float::with_val(self.inner.prec().0 + 8, self.inner.abs_ref());
        modulus.to_f64_round(Round::Up)
    }

    pub fn conj(&self) -> Self {
        ComplexF {
            inner: self.inner.clone().conj(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.inner.real().is_finite() && self.inner.imag().is_finite()
    }

    pub(crate) fn check_finite(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::Range(format!("{what} left the floating-point range")))
        }
    }

    /// Decimal rendering of both parts with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        let fmt_part = |f: &Float| f.to_string_radix(10, Some(digits));
        (fmt_part(self.re()), fmt_part(self.im()))
    }
}

impl fmt::Debug for ComplexF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexF({})", self.inner)
    }
}

impl fmt::Display for ComplexF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_decimal(20);
        write!(f, "{re} + {im}i")
    }
}

/// Exact binomial coefficient C(n, j); zero when j > n.
pub fn binomial(n: u64, j: u64) -> BigInt {
    if j > n {
        return BigInt::ZERO;
    }
    let j = j.min(n - j);
    let mut acc = BigInt::from(1);
    for i in 0..j {
        // acc = C(n, i) here; the division is exact
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// s (s+1) ... (s+terms-1), multiplied left to right at the precision of `s`.
pub fn rising_product(s: &ComplexF, terms: u32) -> Result<ComplexF> {
    if terms == 0 {
        return Err(Error::domain("rising_product needs at least one factor"));
    }
    let prec = s.as_complex().prec();
    let mut acc = s.as_complex().clone();
    let mut factor = s.as_complex().clone();
    for _ in 1..terms {
        factor += 1u32;
        acc = Complex::with_val(prec, &acc * &factor);
    }
    ComplexF::from_complex(acc).check_finite("rising product")
}

/// Even-index Bernoulli numbers B_0, B_2, B_4, ..., grown on demand.
static BERNOULLI_EVEN: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

/// B_{2k} with B_1 = -1/2, so B_2 = 1/6 and B_4 = -1/30.
pub fn bernoulli_even(k: usize) -> BigRational {
    if let Some(b) = BERNOULLI_EVEN
        .read()
        .expect("bernoulli cache poisoned")
        .get(k)
    {
        return b.clone();
    }
    let mut cache = BERNOULLI_EVEN.write().expect("bernoulli cache poisoned");
    if cache.is_empty() {
        cache.push(BigRational::from(1));
    }
    while cache.len() <= k {
        let n = 2 * cache.len() as u64;
        // sum_{j<n} C(n+1, j) B_j = -(n+1) B_n, odd B_j vanish except B_1
        let mut sum = BigRational::from(1);
        sum -= BigRational::from((binomial(n + 1, 1), 2));
        for (half, b) in cache.iter().enumerate().skip(1) {
            sum += b.clone() * binomial(n + 1, 2 * half as u64);
        }
        let b_n = -sum / BigInt::from(n + 1);
        cache.push(b_n);
    }
    cache[k].clone()
}

/// Rounds a rational to the nearest float at `prec` bits.
pub(crate) fn rational_to_float(q: &BigRational, prec: u32) -> Float {
    Float::with_val(prec, q)
}

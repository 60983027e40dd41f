//! Riemann zeta on Re(s) >= 1 by Euler-Maclaurin summation:
//!
//! zeta(s) = S(N-1, s) + B(N, k, s) + R,
//!
//! S(N-1, s) = sum_{n<N} n^-s + N^(1-s)/(s-1),
//! B(N, k, s) = N^-s/2 + sum_{j=1..k} B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1),
//!
//! with |R| bounded by |(s+2k+1)/(sigma+2k+1)| times the first omitted
//! Bernoulli term.

use rug::float::Round;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli_even, rational_to_float, BigInt, ComplexF, Precision};
use crate::error::{Error, Result};

/// A computed value together with a rigorous absolute error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedValue<T> {
    pub value: T,
    pub bound: f64,
}

impl<T> BoundedValue<T> {
    pub fn new(value: T, bound: f64) -> Self {
        debug_assert!(bound >= 0.0 && bound.is_finite());
        BoundedValue { value, bound }
    }
}

/// Summation cutoff `N` and number of Bernoulli corrections `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaParams {
    cutoff: u64,
    terms: u32,
}

impl ZetaParams {
    pub fn new(cutoff: u64, terms: u32) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::domain(format!("cutoff N must exceed 1, got {cutoff}")));
        }
        if terms < 1 {
            return Err(Error::domain("at least one Bernoulli correction term (k >= 1) is required"));
        }
        Ok(ZetaParams { cutoff, terms })
    }

    /// N = max(20, ceil(|s|) + 10), k = 10.
    pub fn default_for(s: &ComplexF) -> Self {
        let modulus = s.abs_upper().ceil();
        let cutoff = if modulus.is_finite() {
            (modulus as u64).saturating_add(10).max(20)
        } else {
            20
        };
        ZetaParams { cutoff, terms: 10 }
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn terms(&self) -> u32 {
        self.terms
    }
}

fn is_pole(s: &ComplexF) -> bool {
    *s.re() == 1 && s.im().is_zero()
}

fn check_domain(s: &ComplexF) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::domain("s must be finite"));
    }
    if is_pole(s) {
        return Err(Error::Pole);
    }
    if *s.re() < 1 {
        return Err(Error::domain(format!(
            "Re(s) = {} < 1 is outside the supported half-plane",
            s.re_f64()
        )));
    }
    Ok(())
}

/// n^(-z) = exp(-z ln n) at `prec` bits.
fn int_pow_neg(n: u64, z: &Complex, prec: u32) -> Complex {
    let ln_n = Float::with_val(prec, n).ln();
    let exponent = -Complex::with_val(prec, z * &ln_n);
    exponent.exp()
}

fn abs_f64(z: &Complex) -> f64 {
    Float::with_val(z.prec().0, z.abs_ref()).to_f64_round(Round::Up)
}

struct Pieces {
    partial: Complex,
    correction: Complex,
    /// Sum of the moduli of every term that was added.
    magnitude: f64,
}

fn partial_sum_at(s: &Complex, cutoff: u64, prec: u32, magnitude: &mut f64) -> Complex {
    let mut acc = Complex::with_val(prec, 0);
    for n in 1..cutoff {
        let term = int_pow_neg(n, s, prec);
        *magnitude += abs_f64(&term);
        acc += &term;
    }
    // N^(1-s) / (s-1)
    let s_minus_one = Complex::with_val(prec, s - 1u32);
    let tail = int_pow_neg(cutoff, &s_minus_one, prec) / &s_minus_one;
    *magnitude += abs_f64(&tail);
    acc += &tail;
    acc
}

/// The k-th Bernoulli correction B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1).
fn bernoulli_term(s: &Complex, cutoff: u64, k: u32, rising: &Complex, prec: u32) -> Complex {
    let coeff = bernoulli_even(k as usize) / BigInt::from(BigInt::factorial(2 * k));
    let coeff = rational_to_float(&coeff, prec);
    let shifted = Complex::with_val(prec, s + (2 * k - 1));
    let power = int_pow_neg(cutoff, &shifted, prec);
    Complex::with_val(prec, rising * &power) * coeff
}

fn correction_at(s: &Complex, params: ZetaParams, prec: u32, magnitude: &mut f64) -> (Complex, Complex) {
    let n = params.cutoff;
    let mut acc = int_pow_neg(n, s, prec) / 2u32;
    *magnitude += abs_f64(&acc);
    // rising = s (s+1) ... (s+2j-2), extended by two factors per step
    let mut rising = Complex::with_val(prec, s);
    let mut next_factor = Complex::with_val(prec, s + 1u32);
    for j in 1..=params.terms {
        if j > 1 {
            rising *= &next_factor;
            next_factor += 1u32;
            rising *= &next_factor;
            next_factor += 1u32;
        }
        let term = bernoulli_term(s, n, j, &rising, prec);
        *magnitude += abs_f64(&term);
        acc += &term;
    }
    rising *= &next_factor;
    next_factor += 1u32;
    rising *= &next_factor;
    (acc, rising)
}

fn pieces(s: &Complex, params: ZetaParams, prec: u32) -> (Pieces, Complex) {
    let mut magnitude = 0.0;
    let partial = partial_sum_at(s, params.cutoff, prec, &mut magnitude);
    let (correction, rising_next) = correction_at(s, params, prec, &mut magnitude);
    (
        Pieces {
            partial,
            correction,
            magnitude,
        },
        rising_next,
    )
}

/// S(N-1, s) = sum_{n=1}^{N-1} n^-s + N^(1-s)/(s-1) at the precision of `s`.
pub fn partial_sum(s: &ComplexF, cutoff: u64) -> Result<ComplexF> {
    if cutoff < 2 {
        return Err(Error::domain(format!("cutoff N must exceed 1, got {cutoff}")));
    }
    if is_pole(s) {
        return Err(Error::Pole);
    }
    let prec = s.as_complex().prec().0;
    let mut magnitude = 0.0;
    let value = partial_sum_at(s.as_complex(), cutoff, prec, &mut magnitude);
    ComplexF::from_complex(value).check_finite("partial sum")
}

/// B(N, k, s) at the precision of `s`.
pub fn correction(s: &ComplexF, params: ZetaParams) -> Result<ComplexF> {
    let prec = s.as_complex().prec().0;
    let mut magnitude = 0.0;
    let (value, _) = correction_at(s.as_complex(), params, prec, &mut magnitude);
    ComplexF::from_complex(value).check_finite("Bernoulli correction")
}

/// Upper bound for the Euler-Maclaurin remainder after `k` corrections.
fn remainder_bound(s: &Complex, params: ZetaParams, rising_next: &Complex, prec: u32) -> f64 {
    let k = params.terms;
    let next = bernoulli_term(s, params.cutoff, k + 1, rising_next, prec);
    let sigma = Float::with_val(prec, s.real() + (2 * k + 1));
    let shifted = Complex::with_val(prec, s + (2 * k + 1));
    let ratio = Float::with_val(prec, shifted.abs_ref()) / sigma;
    let bound = Float::with_val(prec, next.abs_ref()) * ratio;
    bound.to_f64_round(Round::Up)
}

/// Operation count that multiplies the unit roundoff in the error estimate.
fn rounding_weight(s: &ComplexF, params: ZetaParams) -> f64 {
    let ln_n = (params.cutoff as f64).ln();
    let k = params.terms as f64;
    2.0 * (params.cutoff as f64 + 6.0 * k + 16.0 + (s.abs_upper() + 2.0 * k + 2.0) * ln_n)
}

/// zeta(s) for Re(s) >= 1, s != 1, with a rigorous bound.
///
/// The bound is the Euler-Maclaurin remainder estimate plus a rounding
/// allowance of 2^-prec, where prec is the precision of `s`. The working
/// precision is raised until the accumulated rounding provably fits inside
/// that allowance, so the returned value may carry more bits than `s`.
pub fn zeta_em(s: &ComplexF, params: ZetaParams) -> Result<BoundedValue<ComplexF>> {
    check_domain(s)?;
    let target = s.precision();
    let weight = rounding_weight(s, params);
    let mut guard = 32 + (weight.log2().ceil() as u32);
    loop {
        let work = target.with_guard(guard);
        let w = work.bits();
        let s_work = Complex::with_val(w, s.as_complex());
        let (parts, rising_next) = pieces(&s_work, params, w);
        let rounding = parts.magnitude * weight * (-(w as f64)).exp2();
        if rounding <= target.unit_roundoff() || w == Precision::MAX {
            let value = ComplexF::from_complex(Complex::with_val(w, &parts.partial + &parts.correction))
                .check_finite("zeta value")?;
            let truncation = remainder_bound(&s_work, params, &rising_next, w);
            let bound = truncation + target.unit_roundoff();
            if !bound.is_finite() {
                return Err(Error::Range("remainder bound overflowed".into()));
            }
            return Ok(BoundedValue::new(value, bound));
        }
        let needed = (parts.magnitude * weight).log2().ceil().max(0.0) as u32 + 2;
        guard = needed.max(guard + 16);
    }
}

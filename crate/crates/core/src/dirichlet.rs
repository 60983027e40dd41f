//! L(1, chi) for the real quadratic field Q(sqrt D), with chi the Kronecker
//! symbol (Delta / .), through the exponentially convergent expansion
//!
//! L(1, chi) = Delta^-1/2 sum_{n<=m} chi(n) E1(A n^2)
//!           + sum_{n<=m} chi(n)/n erfc(n sqrt A) + R_m,     A = pi / Delta,
//!
//! |R_m| < Delta^(3/2) / pi^2 * exp(-A m^2) / m^3.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::zeta::BoundedValue;

/// Absolute tolerance handed to the quadrature routines by default.
pub const DEFAULT_TOLERANCE: f64 = 1e-15;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Distance past `x` at which the E1 integrand is truncated.
const E1_SPAN: f64 = 60.0;

/// Distance past `x` at which the erfc integrand is truncated.
const ERFC_SPAN: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticField {
    d: u64,
    discriminant: u64,
}

fn is_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

impl QuadraticField {
    /// Q(sqrt d) for squarefree d > 1.
    pub fn new(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!("D = {d} does not give a real quadratic field")));
        }
        if !is_squarefree(d) {
            return Err(Error::domain(format!("D = {d} is not squarefree")));
        }
        let discriminant = if d % 4 == 1 { d } else { 4 * d };
        Ok(QuadraticField { d, discriminant })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn discriminant(&self) -> u64 {
        self.discriminant
    }

    /// A = pi / Delta.
    pub fn a(&self) -> f64 {
        PI / self.discriminant as f64
    }
}

/// Jacobi symbol (a / n) for odd n >= 1 and 0 <= a.
fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut sign = 1i8;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        if twos % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol (a / n) for n >= 1.
pub fn kronecker(a: i64, n: u64) -> i8 {
    assert!(n >= 1, "Kronecker symbol needs n >= 1");
    let twos = n.trailing_zeros();
    let odd = n >> twos;
    let mut sign = 1i8;
    if twos > 0 {
        // (a/2) = 0 for even a, +1 for a = +-1 (mod 8), -1 for a = +-3 (mod 8)
        let two_symbol = match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
        if two_symbol == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            sign = two_symbol;
        }
    }
    let reduced = a.rem_euclid(odd as i64) as u64;
    sign * jacobi(reduced, odd)
}

/// chi(n) = (Delta / n).
pub fn kronecker_chi(field: &QuadraticField, n: u64) -> i8 {
    kronecker(field.discriminant as i64, n)
}

/// Series -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!) for 0 < x < 1.
pub fn exp_integral_e1_series(x: f64) -> Result<BoundedValue<f64>> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("series for E1 needs 0 < x < 1, got {x}")));
    }
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut power_over_fact = 1.0; // x^k / k!
    let mut k = 1u32;
    loop {
        power_over_fact *= x / k as f64;
        let term = power_over_fact / k as f64;
        let signed = if k % 2 == 1 { term } else { -term };
        sum += signed;
        abs_sum += term;
        // terms decrease for x < 1, so the truncation error is below the next one
        let next = power_over_fact * x / ((k + 1) as f64 * (k + 1) as f64);
        if next < 1e-20 * abs_sum.max(1.0) {
            let value = -EULER_GAMMA - x.ln() + sum;
            let rounding = 4.0 * (k as f64 + 8.0) * f64::EPSILON * (abs_sum + EULER_GAMMA + x.ln().abs());
            return Ok(BoundedValue::new(value, next + rounding));
        }
        k += 1;
    }
}

/// E1(x) by quadrature of exp(-x) * int_0^60 exp(-u)/(x+u) du.
pub fn exp_integral_e1_quadrature(x: f64, tol: f64) -> Result<BoundedValue<f64>> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("E1 needs x > 0, got {x}")));
    }
    let scale = (-x).exp();
    let q = quad::integrate(|u| (-u).exp() / (x + u), 0.0, E1_SPAN, tol);
    let tail = (-E1_SPAN).exp() / (x + E1_SPAN);
    let value = scale * q.value;
    let bound = scale * (q.error + tail) + 4.0 * f64::EPSILON * value;
    Ok(BoundedValue::new(value, bound.max(f64::from_bits(1))))
}

/// E1(x) = int_x^inf exp(-t)/t dt.
pub fn exp_integral_e(x: f64) -> Result<BoundedValue<f64>> {
    exp_integral_e_with(x, DEFAULT_TOLERANCE)
}

pub fn exp_integral_e_with(x: f64, tol: f64) -> Result<BoundedValue<f64>> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!("E1 needs x > 0, got {x}")));
    }
    if x < 1.0 {
        exp_integral_e1_series(x)
    } else {
        exp_integral_e1_quadrature(x, tol)
    }
}

/// erfc(x) = 2/sqrt(pi) int_x^inf exp(-t^2) dt, for x > 0.
pub fn erfc_fn(x: f64) -> Result<BoundedValue<f64>> {
    erfc_with(x, DEFAULT_TOLERANCE)
}

pub fn erfc_with(x: f64, tol: f64) -> Result<BoundedValue<f64>> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("erfc needs x > 0, got {x}")));
    }
    // t = x + u: exp(-t^2) = exp(-x^2) exp(-2xu - u^2)
    let prefactor = 2.0 / PI.sqrt() * (-x * x).exp();
    let q = quad::integrate(|u| (-2.0 * x * u - u * u).exp(), 0.0, ERFC_SPAN, tol);
    let tail = (-ERFC_SPAN * ERFC_SPAN).exp() / (2.0 * ERFC_SPAN);
    let value = prefactor * q.value;
    let bound = prefactor * (q.error + tail) + 4.0 * f64::EPSILON * value;
    Ok(BoundedValue::new(value, bound.max(f64::from_bits(1))))
}

/// Delta^(3/2) / pi^2 * exp(-A m^2) / m^3.
pub fn remainder_bound(field: &QuadraticField, m: u64) -> f64 {
    let delta = field.discriminant as f64;
    let mf = m as f64;
    delta.powf(1.5) / (PI * PI) * (-field.a() * mf * mf).exp() / (mf * mf * mf)
}

/// L(1, chi) truncated after `m` terms of each sum.
pub fn l_one_chi(field: &QuadraticField, m: u64) -> Result<BoundedValue<f64>> {
    l_one_chi_with(field, m, DEFAULT_TOLERANCE)
}

pub fn l_one_chi_with(field: &QuadraticField, m: u64, tol: f64) -> Result<BoundedValue<f64>> {
    if m < 1 {
        return Err(Error::domain("truncation m must be at least 1"));
    }
    let a = field.a();
    let sqrt_a = a.sqrt();
    let inv_sqrt_delta = 1.0 / (field.discriminant as f64).sqrt();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut special_error = 0.0f64;
    for n in 1..=m {
        let chi = kronecker_chi(field, n);
        if chi == 0 {
            continue;
        }
        let nf = n as f64;
        let e1 = exp_integral_e_with(a * nf * nf, tol)?;
        let ec = erfc_with(nf * sqrt_a, tol)?;
        let term = chi as f64 * (inv_sqrt_delta * e1.value + ec.value / nf);
        special_error += inv_sqrt_delta * e1.bound + ec.bound / nf;
        abs_sum += term.abs();
        // Neumaier summation in fixed index order
        let next = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - next) + term;
        } else {
            comp += (term - next) + sum;
        }
        sum = next;
    }
    let value = sum + comp;
    let rounding = 4.0 * f64::EPSILON * abs_sum;
    let bound = remainder_bound(field, m) + special_error + rounding;
    Ok(BoundedValue::new(value, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn legendre_by_euler(a: i64, p: u64) -> i8 {
        let r = a.rem_euclid(p as i64) as u64;
        if r == 0 {
            return 0;
        }
        let mut acc = 1u64;
        let mut base = r;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    }

    fn odd_primes_below(n: u64) -> Vec<u64> {
        (3..n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
    }

    /// E1 via int_0^1 exp(-x/v)/v dv with composite Simpson.
    fn e1_simpson(x: f64) -> f64 {
        let n = 200_000;
        let h = 1.0 / n as f64;
        let f = |v: f64| if v == 0.0 { 0.0 } else { (-x / v).exp() / v };
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    /// 1 - erf(x) with erf from its Maclaurin series.
    fn erfc_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = x; // (-1)^n x^(2n+1) / n!
        for n in 0..200 {
            sum += term / (2 * n + 1) as f64;
            term *= -x * x / (n + 1) as f64;
        }
        1.0 - 2.0 / PI.sqrt() * sum
    }

    #[test]
    fn discriminants() {
        assert_eq!(QuadraticField::new(5).unwrap().discriminant(), 5);
        assert_eq!(QuadraticField::new(2).unwrap().discriminant(), 8);
        assert_eq!(QuadraticField::new(3).unwrap().discriminant(), 12);
        assert!(QuadraticField::new(12).is_err());
        assert!(QuadraticField::new(1).is_err());
        assert!(QuadraticField::new(0).is_err());
    }

    #[test]
    fn chi_examples() {
        let k = QuadraticField::new(5).unwrap();
        assert_eq!(kronecker_chi(&k, 1), 1);
        assert_eq!(kronecker_chi(&k, 5), 0);
        assert_eq!(kronecker_chi(&k, 2), -1);
    }

    #[test]
    fn kronecker_matches_legendre_table() {
        for p in odd_primes_below(100) {
            for a in -60i64..=120 {
                assert_eq!(kronecker(a, p), legendre_by_euler(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn chi_is_periodic_and_vanishes_on_shared_factors() {
        for d in (2..=100u64).filter(|&d| is_squarefree(d)) {
            let k = QuadraticField::new(d).unwrap();
            let delta = k.discriminant();
            for n in 1..=3 * delta {
                assert_eq!(kronecker_chi(&k, n + delta), kronecker_chi(&k, n), "D={d} n={n}");
                let g = gcd(n, delta);
                assert_eq!(kronecker_chi(&k, n) == 0, g > 1, "D={d} n={n}");
            }
            // real quadratic characters are even
            assert_eq!(kronecker_chi(&k, delta - 1), 1);
        }
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    proptest! {
        #[test]
        fn chi_is_completely_multiplicative(d in 2u64..500, m in 1u64..5000, n in 1u64..5000) {
            prop_assume!(is_squarefree(d));
            let k = QuadraticField::new(d).unwrap();
            prop_assert_eq!(kronecker_chi(&k, m * n), kronecker_chi(&k, m) * kronecker_chi(&k, n));
        }
    }

    #[test]
    fn e1_reference_values() {
        let at1 = exp_integral_e(1.0).unwrap();
        assert!((at1.value - e1_simpson(1.0)).abs() < 1e-12);
        assert!((at1.value - 0.219_383_934_395_520_3).abs() < 1e-12);
        let half = exp_integral_e(0.5).unwrap();
        assert!((half.value - e1_simpson(0.5)).abs() < 1e-12);
        assert!((half.value - 0.559_773_594_776_160_8).abs() < 1e-12);
        let big = exp_integral_e(50.0).unwrap();
        assert!(big.value > 0.0 && big.value <= (-50f64).exp() / 50.0);
        assert!(exp_integral_e(0.0).is_err());
        assert!(exp_integral_e(-1.0).is_err());
    }

    #[test]
    fn e1_methods_agree_on_overlap() {
        for i in 1..100 {
            let x = 0.01 * i as f64;
            let s = exp_integral_e1_series(x).unwrap();
            let q = exp_integral_e1_quadrature(x, DEFAULT_TOLERANCE).unwrap();
            assert!((s.value - q.value).abs() < 1e-12, "x={x}");
            assert!((s.value - q.value).abs() <= s.bound + q.bound, "x={x}");
        }
    }

    #[test]
    fn erfc_reference_values() {
        let one = erfc_fn(1.0).unwrap();
        assert!((one.value - erfc_series(1.0)).abs() < 1e-14);
        assert!((one.value - 0.157_299_207_050_285_1).abs() < 1e-12);
        let half = erfc_fn(0.5).unwrap();
        assert!((half.value - 0.479_500_122_186_953_5).abs() < 1e-12);
        assert!((half.value - erfc_series(0.5)).abs() <= half.bound + 1e-15);
        let ten = erfc_fn(10.0).unwrap();
        assert!(ten.value < (-100f64).exp());
        assert!(erfc_fn(0.0).is_err());
    }

    #[test]
    fn l_values_and_bounds() {
        let k5 = QuadraticField::new(5).unwrap();
        let l = l_one_chi(&k5, 40).unwrap();
        // 2 ln(golden ratio) / sqrt 5
        let exact = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln() / 5f64.sqrt();
        assert!((l.value - exact).abs() <= l.bound + 1e-15);
        assert!((l.value - 0.430_408_9).abs() < 1e-7);
        let b1 = l_one_chi(&k5, 1).unwrap().bound;
        let b10 = l_one_chi(&k5, 10).unwrap().bound;
        assert!(b10 < b1);
        assert!(l_one_chi(&k5, 0).is_err());
    }

    #[test]
    fn l_positive_for_small_fields() {
        for d in (2..=60u64).filter(|&d| is_squarefree(d)) {
            let k = QuadraticField::new(d).unwrap();
            let l = l_one_chi(&k, 60).unwrap();
            assert!(l.value - l.bound > 0.0, "D={d}");
        }
    }
}

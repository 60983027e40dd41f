use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use super::reduction::{count_points, LocalCurveData, ReductionType};
use super::EllipticCurve;
use crate::arith::ComplexF;
use crate::error::{Error, Result};
use crate::primes::{primes_up_to, smallest_prime_factors};

/// Local zeta of a good reduction as a rational function in T = p^-s:
/// (1 - t T + p T^2) / ((1 - T)(1 - p T)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalZeta {
    pub p: u64,
    /// Coefficients of 1, T, T^2 in the numerator.
    pub numerator: [i64; 3],
    /// The two linear denominator factors, each as [constant, T-coefficient].
    pub denominator: [[i64; 2]; 2],
}

impl LocalZeta {
    pub fn trace(&self) -> i64 {
        -self.numerator[1]
    }

    /// Points over F_{p^r}: p^r + 1 - (alpha^r + beta^r), with alpha, beta the
    /// reciprocal roots of the numerator.
    pub fn count_over_extension(&self, r: u32) -> i128 {
        let p = self.p as i128;
        let t = self.trace() as i128;
        // power sums s_r = t s_{r-1} - p s_{r-2}, s_0 = 2, s_1 = t
        let (mut prev, mut cur) = (2i128, t);
        if r == 0 {
            cur = prev;
        }
        for _ in 1..r {
            let next = t * cur - p * prev;
            prev = cur;
            cur = next;
        }
        p.pow(r) + 1 - cur
    }
}

pub fn local_zeta(data: &LocalCurveData) -> Result<LocalZeta> {
    if data.reduction != ReductionType::Good {
        return Err(Error::domain(format!(
            "local zeta is only defined here for good reduction; p = {} is {}",
            data.p,
            data.reduction.as_str()
        )));
    }
    let p = data.p as i64;
    Ok(LocalZeta {
        p: data.p,
        numerator: [1, -data.t_p, p],
        denominator: [[1, -1], [1, -p]],
    })
}

/// Truncated Euler product together with a convergence flag.
#[derive(Debug, Clone)]
pub struct HasseWeilValue {
    pub value: ComplexF,
    /// Set when Re(s) <= 3/2, where the product is not known to converge.
    pub divergent: bool,
    /// Bound on |value - L(E, s)| from the omitted primes; infinite when divergent.
    pub tail_bound: f64,
    pub local: Vec<LocalCurveData>,
}

/// Bound on |log prod_{p > P} L_p(s)| for Re(s) = sigma > 3/2.
///
/// Each factor is 1/((1 - a p^-s)(1 - b p^-s)) with |a|, |b| <= sqrt(p), and
/// |log 1/(1 - x)| <= |x|/(1 - |x|); the sum over primes is dominated by the
/// integral of 2 x^(1/2 - sigma) over x > P.
pub fn euler_tail_log_bound(prime_cutoff: u64, sigma: f64) -> f64 {
    if sigma <= 1.5 {
        return f64::INFINITY;
    }
    let p = prime_cutoff.max(1) as f64;
    let e = 0.5 - sigma;
    let largest = (p + 1.0).max(2.0).powf(e);
    2.0 / (1.0 - largest) * p.powf(e + 1.0) / (sigma - 1.5)
}

/// Bound on sum_{n > M} |a_n| n^-sigma for sigma > 3/2, using |a_n| <= d(n) sqrt(n)
/// and sum_{n <= x} d(n) <= x (ln x + 1) in a partial summation.
pub fn coefficient_tail_bound(m: usize, sigma: f64) -> f64 {
    if sigma <= 1.5 || m == 0 {
        return f64::INFINITY;
    }
    let a = sigma - 1.5;
    let x = m as f64;
    (sigma - 0.5) * x.powf(-a) * (x.ln() / a + 1.0 / (a * a) + 1.0 / a)
}

fn local_data_up_to(curve: &EllipticCurve, cutoff: u64) -> Result<Vec<LocalCurveData>> {
    primes_up_to(cutoff)
        .into_par_iter()
        .map(|p| count_points(curve, p))
        .collect()
}

/// prod_{p <= P, p | disc} 1/(1 - t_p p^-s) * prod_{p <= P, p !| disc} 1/(1 - t_p p^-s + p^(1-2s)).
pub fn hasse_weil_truncated(curve: &EllipticCurve, prime_cutoff: u64, s: &ComplexF) -> Result<HasseWeilValue> {
    let divergent = *s.re() <= 1.5;
    if divergent {
        log::warn!("Re(s) = {} <= 3/2: the Euler product need not converge", s.re_f64());
    }
    let local = local_data_up_to(curve, prime_cutoff)?;
    let prec = s.as_complex().prec().0 + 16;
    let s_work = Complex::with_val(prec, s.as_complex());
    let mut product = Complex::with_val(prec, 1);
    for data in &local {
        let ln_p = Float::with_val(prec, data.p).ln();
        let p_neg_s = (-Complex::with_val(prec, &s_work * &ln_p)).exp();
        let mut factor = Complex::with_val(prec, 1) - Complex::with_val(prec, &p_neg_s * data.t_p);
        if data.reduction == ReductionType::Good {
            // p^(1-2s) = p * (p^-s)^2
            let sq = Complex::with_val(prec, p_neg_s.square_ref());
            factor += sq * data.p;
        }
        product *= factor;
    }
    let value = ComplexF::from_complex(Complex::with_val(s.as_complex().prec(), product.recip()))
        .check_finite("Euler product")?;
    let eps = euler_tail_log_bound(prime_cutoff, s.re_f64());
    let tail_bound = if eps.is_finite() {
        value.abs_upper() * eps.exp_m1()
    } else {
        f64::INFINITY
    };
    Ok(HasseWeilValue {
        value,
        divergent,
        tail_bound,
        local,
    })
}

/// Coefficients a_1..a_M of the Dirichlet series sum a_n n^-s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LSeriesTruncation {
    pub prime_cutoff: u64,
    pub coefficient_cutoff: usize,
    /// a_1, ..., a_M in order.
    pub coefficients: Vec<i64>,
}

impl LSeriesTruncation {
    /// a_n for 1 <= n <= M.
    pub fn a(&self, n: usize) -> i64 {
        self.coefficients[n - 1]
    }

    /// sum_{n <= M} a_n n^-s at the precision of `s`.
    pub fn partial_sum(&self, s: &ComplexF) -> ComplexF {
        let prec = s.as_complex().prec().0 + 16;
        let s_work = Complex::with_val(prec, s.as_complex());
        let mut acc = Complex::with_val(prec, 0);
        for (i, &a) in self.coefficients.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ln_n = Float::with_val(prec, i + 1).ln();
            let term = (-Complex::with_val(prec, &s_work * &ln_n)).exp();
            acc += term * a;
        }
        ComplexF::from_complex(Complex::with_val(s.as_complex().prec(), acc))
    }
}

/// a_n from the traces t_p by multiplicativity and the prime-power rules
/// a_{p^(k+1)} = t_p a_{p^k} - p a_{p^(k-1)} (good p), a_{p^k} = t_p^k (bad p).
pub fn dirichlet_coefficients(curve: &EllipticCurve, m: usize) -> Result<LSeriesTruncation> {
    if m < 1 {
        return Err(Error::domain("coefficient cutoff M must be at least 1"));
    }
    let local = local_data_up_to(curve, m as u64)?;
    let mut trace = vec![0i64; m + 1];
    let mut good = vec![false; m + 1];
    for d in &local {
        trace[d.p as usize] = d.t_p;
        good[d.p as usize] = d.reduction == ReductionType::Good;
    }
    let spf = smallest_prime_factors(m);
    let mut a = vec![0i64; m + 1];
    a[1] = 1;
    for n in 2..=m {
        let p = spf[n] as usize;
        let mut rest = n;
        let mut prime_power = 1usize;
        while rest % p == 0 {
            rest /= p;
            prime_power *= p;
        }
        a[n] = if rest > 1 {
            a[prime_power] * a[rest]
        } else if prime_power == p {
            trace[p]
        } else if good[p] {
            trace[p] * a[n / p] - p as i64 * a[n / (p * p)]
        } else {
            trace[p] * a[n / p]
        };
    }
    a.remove(0);
    Ok(LSeriesTruncation {
        prime_cutoff: m as u64,
        coefficient_cutoff: m,
        coefficients: a,
    })
}

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::Serialize;

use super::flow::{SquareMatrix, C64};
use crate::error::{Error, Result};

pub const HISTOGRAM_BINS: usize = 100;

/// Two orbit points closer than this on the circle count as equal.
const PERIOD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct OrbitStats {
    pub theta: f64,
    pub start: f64,
    pub n: usize,
    /// y_j = start + j theta mod 1, j < n.
    #[serde(skip)]
    pub points: Vec<f64>,
    pub histogram: Vec<u64>,
    /// max over bins of |count - n/100| / (n/100).
    pub max_bin_deviation: f64,
    /// Smallest k < n with y_k = y_0, if any.
    pub period: Option<usize>,
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Orbit of `start` under y -> y + theta mod 1.
pub fn kronecker_orbit(theta: f64, n: usize, start: f64) -> Result<OrbitStats> {
    if n == 0 {
        return Err(Error::domain("orbit length must be at least 1"));
    }
    if !theta.is_finite() || !start.is_finite() {
        return Err(Error::domain("theta and start must be finite"));
    }
    let start = start.rem_euclid(1.0);
    let points: Vec<f64> = (0..n).map(|j| (start + j as f64 * theta).rem_euclid(1.0)).collect();
    let mut histogram = vec![0u64; HISTOGRAM_BINS];
    for &y in &points {
        let bin = ((y * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        histogram[bin] += 1;
    }
    let expected = n as f64 / HISTOGRAM_BINS as f64;
    let max_bin_deviation = histogram
        .iter()
        .map(|&c| (c as f64 - expected).abs() / expected)
        .fold(0.0, f64::max);
    let period = (1..n).find(|&k| circle_distance(points[k], points[0]) < PERIOD_TOL);
    Ok(OrbitStats {
        theta,
        start,
        n,
        points,
        histogram,
        max_bin_deviation,
        period,
    })
}

/// e^{2 pi i r / q}, exact at multiples of a quarter turn.
fn root_of_unity(r: u64, q: u64) -> C64 {
    let r = r % q;
    if (4 * r).is_multiple_of(q) {
        return match 4 * r / q {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let angle = TAU * r as f64 / q as f64;
    C64::new(angle.cos(), angle.sin())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone)]
pub struct ClockShift {
    pub q: u64,
    pub p: i64,
    pub omega: C64,
    pub u: SquareMatrix,
    pub v: SquareMatrix,
}

impl ClockShift {
    /// max entrywise |UV - omega VU|.
    pub fn commutation_residual(&self) -> f64 {
        let uv = self.u.mul(&self.v);
        let vu = self.v.mul(&self.u).scale(self.omega);
        uv.max_abs_diff(&vu)
    }

    /// max entrywise deviation of U*U and V*V from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        let id = SquareMatrix::identity(self.q as usize);
        let du = self.u.adjoint().mul(&self.u).max_abs_diff(&id);
        let dv = self.v.adjoint().mul(&self.v).max_abs_diff(&id);
        du.max(dv)
    }
}

/// Clock U = diag(1, w, ..., w^{q-1}) with w = e^{2 pi i p/q} and shift V e_k = e_{k+1 mod q}.
pub fn clock_shift_pair(q: u64, p: i64) -> Result<ClockShift> {
    if q < 2 {
        return Err(Error::domain(format!("q = {q}; need q >= 2")));
    }
    if gcd(p.unsigned_abs(), q) != 1 {
        return Err(Error::domain(format!("p = {p} and q = {q} are not coprime")));
    }
    let n = q as usize;
    let p_mod = p.rem_euclid(q as i64) as u64;
    let u = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            root_of_unity(p_mod * i as u64, q)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = DMatrix::from_fn(n, n, |i, j| C64::new(if i == (j + 1) % n { 1.0 } else { 0.0 }, 0.0));
    Ok(ClockShift {
        q,
        p,
        omega: root_of_unity(p_mod, q),
        u: SquareMatrix::new(u)?,
        v: SquareMatrix::new(v)?,
    })
}

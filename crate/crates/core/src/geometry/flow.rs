use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Truncation target for the scaled exponential series, kept well under
/// 1e-14 so the squarings do not lift it above rounding level.
const SERIES_TOL: f64 = 1e-17;

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<C64>);

impl SquareMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::domain(format!("matrix is {}x{}, expected non-empty square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Range("matrix has non-finite entries".into()));
        }
        Ok(SquareMatrix(m))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("rows must all have length equal to the row count"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        SquareMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SquareMatrix(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        SquareMatrix(&self.0 * &other.0)
    }

    pub fn scale(&self, z: C64) -> SquareMatrix {
        SquareMatrix(&self.0 * z)
    }

    pub fn adjoint(&self) -> SquareMatrix {
        SquareMatrix(self.0.adjoint())
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!("vector has length {}, matrix is {}x{}", x.len(), self.dim(), self.dim())));
        }
        Ok((&self.0 * DVector::from_column_slice(x)).iter().copied().collect())
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

impl FromStr for SquareMatrix {
    type Err = Error;

    /// Real entries, rows separated by `;`: "0 -1; 1 0".
    fn from_str(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|e| e.parse::<f64>().map_err(|err| Error::Parse(format!("bad matrix entry {e:?}: {err}"))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::Parse(format!("matrix {text:?} is not square")));
        }
        Self::from_real_rows(&rows)
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.0.row_iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, z) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{z}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MatrixExp {
    pub value: SquareMatrix,
    pub squarings: u32,
    pub degree: u32,
    /// Upper bound on the series truncation error after squaring, in the
    /// 1-norm; floating-point rounding is not included.
    pub truncation_bound: f64,
}

/// e^{At} by scaling and squaring a truncated Taylor series.
pub fn matrix_exp(a: &SquareMatrix, t: f64) -> Result<MatrixExp> {
    if !t.is_finite() {
        return Err(Error::Range(format!("time {t} is not finite")));
    }
    let b = a.scale(C64::new(t, 0.0));
    let norm = b.norm_one();
    if !norm.is_finite() {
        return Err(Error::Range("norm of A t overflows".into()));
    }
    let mut squarings = 0u32;
    let mut c_norm = norm;
    while c_norm > 0.5 {
        c_norm *= 0.5;
        squarings += 1;
    }
    if squarings > 1000 {
        return Err(Error::Range(format!("norm {norm:e} of A t is too large")));
    }
    let c = b.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

    // smallest m with c^{m+1}/(m+1)! e^c below the target
    let mut degree = 0u32;
    let mut term = c_norm;
    while term * c_norm.exp() >= SERIES_TOL {
        degree += 1;
        term *= c_norm / (degree + 1) as f64;
    }
    let delta = term * c_norm.exp();

    let n = c.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let mut p = id.clone();
    for k in (1..=degree).rev() {
        p = &id + (&c.0 * &p) / C64::new(k as f64, 0.0);
    }
    for _ in 0..squarings {
        p = &p * &p;
    }
    if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Range("matrix exponential overflowed".into()));
    }
    // ||X^n - Y^n|| <= n ||X - Y|| max(||X||, ||Y||)^(n-1)
    let copies = 2f64.powi(squarings as i32);
    let truncation_bound = if delta == 0.0 {
        0.0
    } else {
        copies * delta * ((copies - 1.0) * (c_norm.exp() + delta).ln()).exp()
    };
    Ok(MatrixExp {
        value: SquareMatrix(p),
        squarings,
        degree,
        truncation_bound,
    })
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub x: Vec<C64>,
    pub truncation_bound: f64,
}

/// x(t) = e^{At} x0 for the linear system x' = Ax.
pub fn linear_flow(a: &SquareMatrix, t: f64, x0: &[C64]) -> Result<FlowResult> {
    let e = matrix_exp(a, t)?;
    let x = e.value.apply(x0)?;
    let scale = x0.iter().map(|z| z.norm()).sum::<f64>();
    Ok(FlowResult {
        x,
        truncation_bound: e.truncation_bound * scale,
    })
}

/// Fixed-step classical Runge-Kutta for x' = F(x).
pub fn nonlinear_flow<F>(field: F, x0: &[f64], t: f64, steps: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if steps == 0 {
        return Err(Error::domain("need at least one step"));
    }
    let h = t / steps as f64;
    let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let mut x = x0.to_vec();
    for _ in 0..steps {
        let k1 = field(&x);
        let k2 = field(&axpy(&x, &k1, 0.5 * h));
        let k3 = field(&axpy(&x, &k2, 0.5 * h));
        let k4 = field(&axpy(&x, &k3, h));
        if [&k1, &k2, &k3, &k4].iter().any(|k| k.len() != x.len()) {
            return Err(Error::domain("vector field changed the dimension"));
        }
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Range("trajectory left the finite range".into()));
        }
    }
    Ok(x)
}

//! Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel |K15 - G7| estimates plus rounding slack.
    pub error: f64,
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for i in 0..7 {
        let dx = half * XGK[i];
        let (lo, hi) = (f(centre - dx), f(centre + dx));
        kronrod += WGK[i] * (lo + hi);
        abs_sum += WGK[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half, abs_sum * half.abs())
}

/// Integrates `f` over [a, b] until the summed error estimate is below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    const MAX_DEPTH: u32 = 48;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut abs_total = 0.0;
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((lo, hi, local_tol, depth)) = stack.pop() {
        let (v, e, abs) = panel(&f, lo, hi);
        if e <= local_tol || depth >= MAX_DEPTH {
            value += v;
            error += e;
            abs_total += abs;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * local_tol, depth + 1));
            stack.push((lo, mid, 0.5 * local_tol, depth + 1));
        }
    }
    Quadrature {
        value,
        error: error + 50.0 * f64::EPSILON * abs_total,
    }
}

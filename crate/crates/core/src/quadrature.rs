//! Adaptive Gauss–Kronrod (7, 15) quadrature.

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

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let x = h * XGK[k];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-9, max_intervals: 4000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Integrates `f` over `[a, b]`, bisecting the interval with the largest
/// error estimate until the total meets the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0, converged: true };
    }
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    while error > tol.abs.max(tol.rel * value.abs()) {
        if pieces.len() >= tol.max_intervals {
            return Integral { value, error, converged: false };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(k, _)| k)
            .unwrap();
        let (lo, hi, pv, pe) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval no longer divisible in floating point.
            return Integral { value, error, converged: false };
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        value += v1 + v2 - pv;
        error += e1 + e2 - pe;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    // Re-sum to shed the drift of the running updates.
    let value = pieces.iter().map(|p| p.2).sum();
    let error = pieces.iter().map(|p| p.3).sum();
    Integral { value, error, converged: true }
}

/// Integrates over `[a, b]` split at the given interior breakpoints.
pub fn integrate_piecewise(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Integral {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&t| t > a && t < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let mut total = Integral { value: 0.0, error: 0.0, converged: true };
    for w in edges.windows(2) {
        let part = integrate(&f, w[0], w[1], tol);
        total.value += part.value;
        total.error += part.error;
        total.converged &= part.converged;
    }
    total
}

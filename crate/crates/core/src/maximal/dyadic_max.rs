use crate::spectral::GridFunction;

/// Averages `values` (an `n × n` array) over axis-parallel blocks of
/// `bx × by` samples aligned to multiples of the block size.
fn block_average(values: &[f64], n: usize, bx: usize, by: usize) -> Vec<f64> {
    // Average along y first, then along x.
    let mut rows = vec![0.0; n * n];
    for i in 0..n {
        let row = &values[i * n..][..n];
        for (b, chunk) in row.chunks(by).enumerate() {
            let mean = chunk.iter().sum::<f64>() / by as f64;
            rows[i * n + b * by..][..by].fill(mean);
        }
    }
    let mut out = vec![0.0; n * n];
    for ib in (0..n).step_by(bx) {
        for j in 0..n {
            let mean = (ib..ib + bx).map(|i| rows[i * n + j]).sum::<f64>() / bx as f64;
            for i in ib..ib + bx {
                out[i * n + j] = mean;
            }
        }
    }
    out
}

/// Dyadic Hardy–Littlewood maximal function of a nonnegative `n × n` array:
/// the largest average over dyadic squares containing each sample.
pub fn dyadic_maximal_values(values: &[f64], level: u32) -> Vec<f64> {
    let n = 1usize << level;
    let mut best = values.to_vec();
    // Bottom-up: the average over a square is the mean of its four children.
    let mut avg = values.to_vec();
    for k in 1..=level {
        let size = 1usize << k;
        let half = size / 2;
        let mut next = vec![0.0; n * n];
        for ib in (0..n).step_by(size) {
            for jb in (0..n).step_by(size) {
                let mean = 0.25
                    * (avg[ib * n + jb]
                        + avg[(ib + half) * n + jb]
                        + avg[ib * n + jb + half]
                        + avg[(ib + half) * n + jb + half]);
                for i in ib..ib + size {
                    next[i * n + jb..][..size].fill(mean);
                }
            }
        }
        for (b, a) in best.iter_mut().zip(&next) {
            *b = b.max(*a);
        }
        avg = next;
    }
    best
}

/// `M f`: dyadic Hardy–Littlewood maximal function of `|f|`.
pub fn hardy_littlewood(f: &GridFunction) -> GridFunction {
    real_grid(f, dyadic_maximal_values(&f.abs(), f.level()))
}

pub fn m2_values(values: &[f64], level: u32) -> Vec<f64> {
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    dyadic_maximal_values(&squares, level).into_iter().map(f64::sqrt).collect()
}

/// `M₂ f = (M |f|²)^{1/2}`.
pub fn m2(f: &GridFunction) -> GridFunction {
    real_grid(f, m2_values(&f.abs(), f.level()))
}

/// Strong maximal function over dyadic rectangles of a nonnegative array.
pub fn strong_maximal_values(values: &[f64], level: u32) -> Vec<f64> {
    let n = 1usize << level;
    let mut best = values.to_vec();
    for a in 0..=level {
        for b in 0..=level {
            let avg = block_average(values, n, 1 << a, 1 << b);
            for (x, y) in best.iter_mut().zip(&avg) {
                *x = x.max(*y);
            }
        }
    }
    best
}

/// `M^* f`: largest average of `|f|` over dyadic rectangles containing each sample.
pub fn strong_maximal(f: &GridFunction) -> GridFunction {
    real_grid(f, strong_maximal_values(&f.abs(), f.level()))
}

fn real_grid(f: &GridFunction, values: Vec<f64>) -> GridFunction {
    GridFunction::from_real(f.level(), f.side(), &values).expect("same lattice as the input")
}

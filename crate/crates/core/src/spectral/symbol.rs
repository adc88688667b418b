use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};

type Profile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// One-dimensional multiplier profile `m(t)`, applied along a direction as
/// `m(v·(ξ, η)/side)`.
///
/// When `singular_at_zero` is set the value at `t = 0` is taken to be zero,
/// the principal-value convention for odd kernels.
#[derive(Clone)]
pub struct Symbol1D {
    profile: Profile,
    singular_at_zero: bool,
    description: String,
}

impl fmt::Debug for Symbol1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol1D")
            .field("description", &self.description)
            .field("singular_at_zero", &self.singular_at_zero)
            .finish()
    }
}

impl Symbol1D {
    pub fn new(
        description: impl Into<String>,
        singular_at_zero: bool,
        profile: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { profile: Arc::new(profile), singular_at_zero, description: description.into() }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if t == 0.0 && self.singular_at_zero {
            Complex64::default()
        } else {
            (self.profile)(t)
        }
    }

    pub fn singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `sgn(t)`, the symbol of the Hilbert transform up to the factor `−i`.
    pub fn sgn() -> Self {
        Self::new("sgn", true, |t| Complex64::new(t.signum(), 0.0))
    }

    pub fn identity() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("const({},{})", c.re, c.im), false, move |_| c)
    }

    pub fn zero() -> Self {
        Self::new("zero", false, |_| Complex64::default())
    }

    /// `|t|^{iα}`.
    pub fn imaginary_power(alpha: f64) -> Self {
        Self::new(format!("imag_power({alpha})"), true, move |t: f64| {
            Complex64::from_polar(1.0, alpha * t.abs().ln())
        })
    }

    /// `m(t) = t`, unbounded; useful as a negative control.
    pub fn linear() -> Self {
        Self::new("linear", false, |t| Complex64::new(t, 0.0))
    }

    /// `base` restricted to `|t| ≥ radius` (zero inside the ball).
    pub fn high_pass(base: &Symbol1D, radius: f64) -> Self {
        let inner = base.clone();
        Self::new(
            format!("high_pass({},{radius})", base.description),
            base.singular_at_zero,
            move |t| if t.abs() < radius { Complex64::default() } else { inner.eval(t) },
        )
    }

    /// Piecewise-constant symbol with `pieces` seeded complex levels of
    /// modulus at most one on cells of width `width`, repeating periodically.
    pub fn piecewise_random(seed: u64, pieces: usize, width: f64) -> Self {
        let mut rng = crate::rng::seeded(seed);
        let levels: Vec<Complex64> = (0..pieces.max(1))
            .map(|_| {
                let r: f64 = rng.gen_range(0.0..1.0);
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, theta)
            })
            .collect();
        Self::new(format!("piecewise_random({seed},{pieces},{width})"), false, move |t| {
            let cell = (t / width).floor() as i64;
            levels[cell.rem_euclid(levels.len() as i64) as usize]
        })
    }

    /// Built-in catalogue used by the command line.
    pub fn from_id(id: &str) -> Result<Self> {
        let (name, arg) = match id.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (id, None),
        };
        let num = |default: f64| -> Result<f64> {
            arg.map(|a| a.parse::<f64>().map_err(|_| invalid(format!("bad symbol argument {a}"))))
                .unwrap_or(Ok(default))
        };
        Ok(match name {
            "sgn" => Self::sgn(),
            "one" | "identity" => Self::identity(),
            "zero" => Self::zero(),
            "const" => Self::constant(Complex64::new(num(1.0)?, 0.0)),
            "imag_power" => Self::imaginary_power(num(1.0)?),
            "linear" => Self::linear(),
            "random" => Self::piecewise_random(num(0.0)? as u64, 8, 0.75),
            "sgn_high_pass" => Self::high_pass(&Self::sgn(), num(4.0)?),
            _ => return Err(invalid(format!("unknown symbol id {id}"))),
        })
    }
}

/// Log-spaced sampling of `t ≠ 0` on both sides of the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { t_min: 1e-4, t_max: 1e4, per_decade: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub alpha: u32,
    /// Estimated `sup |t|^α |∂^α m(t)|` over the samples.
    pub constant: f64,
    /// The per-decade suprema grow towards an end of the sampled range.
    pub diverges: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HmReport {
    pub symbol: String,
    pub orders: Vec<OrderReport>,
}

impl HmReport {
    pub fn is_hormander_mikhlin(&self) -> bool {
        self.orders.iter().all(|o| o.constant.is_finite() && !o.diverges)
    }

    pub fn constant(&self, alpha: u32) -> Option<f64> {
        self.orders.iter().find(|o| o.alpha == alpha).map(|o| o.constant)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Relative finite-difference step for order `alpha`. Orders one and two use
/// `10⁻⁴`; higher orders need a larger step or round-off swamps the estimate.
fn relative_step(alpha: u32) -> f64 {
    if alpha <= 2 {
        1e-4
    } else {
        f64::EPSILON.powf(1.0 / (alpha as f64 + 2.0))
    }
}

fn central_difference(m: &Symbol1D, t: f64, alpha: u32) -> Complex64 {
    if alpha == 0 {
        return m.eval(t);
    }
    let h = t.abs() * relative_step(alpha);
    let mut acc = Complex64::default();
    for k in 0..=alpha {
        let offset = (alpha as f64 / 2.0 - k as f64) * h;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += m.eval(t + offset) * (sign * binomial(alpha, k));
    }
    acc / h.powi(alpha as i32)
}

/// Estimates the Hörmander–Mikhlin constants `C_α` for `α = 0..=alpha_max`.
pub fn verify_hm_symbol(m: &Symbol1D, alpha_max: u32, grid: &SampleSpec) -> Result<HmReport> {
    if alpha_max > 4 {
        return Err(invalid("alpha_max must be at most 4"));
    }
    if !(grid.t_min > 0.0 && grid.t_max > grid.t_min && grid.per_decade > 0) {
        return Err(invalid("sample spec needs 0 < t_min < t_max and per_decade > 0"));
    }
    let decades = (grid.t_max / grid.t_min).log10();
    let count = ((decades * grid.per_decade as f64).ceil() as usize).max(1);
    let ts: Vec<f64> = (0..=count)
        .map(|k| grid.t_min * 10f64.powf(decades * k as f64 / count as f64))
        .collect();
    let n_decades = decades.ceil().max(1.0) as usize;

    let orders = (0..=alpha_max)
        .map(|alpha| {
            let mut per_decade = vec![0.0f64; n_decades];
            for &t in &ts {
                let slot = (((t / grid.t_min).log10()).floor() as usize).min(n_decades - 1);
                for s in [t, -t] {
                    let v = s.abs().powi(alpha as i32) * central_difference(m, s, alpha).norm();
                    per_decade[slot] = per_decade[slot].max(v);
                }
            }
            let constant = per_decade.iter().copied().fold(0.0, f64::max);
            OrderReport { alpha, constant, diverges: diverges(&per_decade) }
        })
        .collect();
    Ok(HmReport { symbol: m.description.clone(), orders })
}

/// A bounded quantity settles; a divergent one keeps growing by a fixed
/// factor per decade at one end of the range.
fn diverges(per_decade: &[f64]) -> bool {
    if per_decade.iter().any(|v| !v.is_finite()) {
        return true;
    }
    if per_decade.len() < 3 {
        return false;
    }
    let growing = |seq: &[f64]| {
        seq.windows(2).all(|w| w[1] > 2.0 * w[0] && w[1] > 1e-12)
    };
    let k = per_decade.len();
    let head: Vec<f64> = per_decade[..3].iter().rev().copied().collect();
    growing(&per_decade[k - 3..]) || growing(&head)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_symbol_vanishes_at_origin() {
        assert_eq!(Symbol1D::sgn().eval(0.0), Complex64::default());
        assert_eq!(Symbol1D::sgn().eval(-3.0).re, -1.0);
        assert_eq!(Symbol1D::identity().eval(0.0).re, 1.0);
    }

    #[test]
    fn sgn_constants() {
        let r = verify_hm_symbol(&Symbol1D::sgn(), 2, &SampleSpec::default()).unwrap();
        assert_eq!(r.constant(0), Some(1.0));
        assert!(r.constant(1).unwrap() < 1e-9);
        assert!(r.is_hormander_mikhlin());
    }

    #[test]
    fn imaginary_power_first_derivative() {
        // |m'(t)| = 1/|t| exactly.
        let r = verify_hm_symbol(&Symbol1D::imaginary_power(1.0), 4, &SampleSpec::default())
            .unwrap();
        assert!((r.constant(0).unwrap() - 1.0).abs() < 1e-12);
        assert!((r.constant(1).unwrap() - 1.0).abs() < 1e-6);
        // |t|² |m''| = |i(i−1)| = √2.
        assert!((r.constant(2).unwrap() - 2f64.sqrt()).abs() < 1e-4);
        assert!(r.is_hormander_mikhlin(), "{r:?}");
    }

    #[test]
    fn unbounded_symbol_is_flagged() {
        let r = verify_hm_symbol(&Symbol1D::linear(), 1, &SampleSpec::default()).unwrap();
        // |t|·|m'(t)| = |t| is unbounded as well.
        assert!(r.orders[0].diverges);
        assert!(r.orders[1].diverges);
        assert!(!r.is_hormander_mikhlin());
    }

    #[test]
    fn order_limit() {
        assert!(verify_hm_symbol(&Symbol1D::sgn(), 5, &SampleSpec::default()).is_err());
    }

    #[test]
    fn catalogue() {
        assert!(Symbol1D::from_id("sgn").unwrap().singular_at_zero());
        assert_eq!(Symbol1D::from_id("const:2").unwrap().eval(5.0).re, 2.0);
        assert!(Symbol1D::from_id("nope").is_err());
        let r = Symbol1D::from_id("random:3").unwrap();
        assert!(r.eval(0.3).norm() <= 1.0);
    }
}

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// Cardinal B-spline of order `k` (degree `k − 1`) supported on `[0, k]`,
/// evaluated by the Cox–de Boor recursion.
pub fn cardinal_bspline(k: usize, x: f64) -> f64 {
    if !(x > 0.0 && x < k as f64) {
        return 0.0;
    }
    let mut b: Vec<f64> = (0..k).map(|j| (x >= j as f64 && x < (j + 1) as f64) as u8 as f64).collect();
    for r in 2..=k {
        for j in 0..=(k - r) {
            let jf = j as f64;
            b[j] = ((x - jf) * b[j] + (jf + r as f64 - x) * b[j + 1]) / (r - 1) as f64;
        }
    }
    b[0]
}

/// Frequency window `ψ̂` of the smooth single-scale operator, supported in
/// `[0, 1]`.
///
/// The default profile is `ψ̂(s) = M₈(8s)`: the self-convolution of the
/// order-four spline `ĝ(s) = M₄(8s)` on `[0, 1/2]`. In time, `ψ = 8g²`, whose
/// modulus `8|g|²` is nonnegative.
#[derive(Clone)]
pub struct SmoothWindow {
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    description: String,
}

impl fmt::Debug for SmoothWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothWindow").field("description", &self.description).finish()
    }
}

impl Default for SmoothWindow {
    fn default() -> Self {
        Self { profile: Arc::new(|s| cardinal_bspline(8, 8.0 * s)), description: "bspline8".into() }
    }
}

impl SmoothWindow {
    /// A user-supplied window; rejected unless it vanishes off `[0, 1]`.
    pub fn custom(
        description: impl Into<String>,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let w = Self { profile: Arc::new(profile), description: description.into() };
        w.validate()?;
        Ok(w)
    }

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "bspline8" | "default" => Ok(Self::default()),
            "bspline4" => Self::custom("bspline4", |s| cardinal_bspline(4, 4.0 * s)),
            _ => Err(invalid(format!("unknown window id {id}"))),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.profile)(s)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn validate(&self) -> Result<()> {
        let samples = 4000;
        for k in 0..=samples {
            let u = k as f64 / samples as f64;
            for s in [-3.0 * u - 1e-9, 1.0 + 1e-9 + 3.0 * u] {
                let v = self.eval(s);
                if v != 0.0 {
                    return Err(invalid(format!(
                        "window {} is {v} at {s}, outside [0, 1]",
                        self.description
                    )));
                }
            }
            if !self.eval(u).is_finite() {
                return Err(invalid(format!("window {} is not finite at {u}", self.description)));
            }
        }
        Ok(())
    }
}

use serde::Serialize;

use super::extremal::{fit_proportional, ProportionalFit};
use super::search::{maximal_norm_search, FamilySpec, MaximalOperator, NormEstimate};
use crate::directions::{DirectionKind, DirectionSet};
use crate::error::Result;

/// Exponent of the power-law comparison model `c·N^{0.1}`.
pub const POWER_EXPONENT: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub operator: String,
    pub n: usize,
    pub level: u32,
    pub seed: u64,
    pub estimate: f64,
    pub source: String,
}

impl GrowthRow {
    pub fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    pub fn sqrt_log_n(&self) -> f64 {
        self.log_n().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub rows: Vec<GrowthRow>,
    pub fit_log: ProportionalFit,
    pub fit_sqrt: ProportionalFit,
    pub fit_power: ProportionalFit,
}

impl GrowthCurve {
    pub fn from_rows(rows: Vec<GrowthRow>) -> Self {
        let y: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
        let col = |f: &dyn Fn(&GrowthRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        let fit_log = fit_proportional(&col(&|r| r.log_n()), &y);
        let fit_sqrt = fit_proportional(&col(&|r| r.sqrt_log_n()), &y);
        let fit_power = fit_proportional(&col(&|r| (r.n as f64).powf(POWER_EXPONENT)), &y);
        Self { rows, fit_log, fit_sqrt, fit_power }
    }

    pub fn degenerate(&self) -> bool {
        self.fit_log.degenerate
    }

    /// `max/min` of `estimate/√ln N` over rows with `N > 1`.
    pub fn sqrt_log_spread(&self) -> f64 {
        let q: Vec<f64> =
            self.rows.iter().filter(|r| r.n > 1).map(|r| r.estimate / r.sqrt_log_n()).collect();
        let (lo, hi) = q.iter().fold((f64::INFINITY, 0.0f64), |a, &x| (a.0.min(x), a.1.max(x)));
        if q.is_empty() {
            f64::NAN
        } else {
            hi / lo
        }
    }

    pub fn nondecreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].estimate >= w[0].estimate - 1e-10)
    }

    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| crate::DmaxError::Format(e.to_string());
        out.write_record([
            "operator", "N", "L", "seed", "estimate", "logN", "sqrtlogN", "fit_c_log", "fit_c_sqrt",
            "resid_log", "resid_sqrt",
        ])
        .map_err(err)?;
        for r in &self.rows {
            out.write_record(&[
                r.operator.clone(),
                r.n.to_string(),
                r.level.to_string(),
                r.seed.to_string(),
                r.estimate.to_string(),
                r.log_n().to_string(),
                r.sqrt_log_n().to_string(),
                self.fit_log.c.to_string(),
                self.fit_sqrt.c.to_string(),
                (r.estimate - self.fit_log.c * r.log_n()).to_string(),
                (r.estimate - self.fit_sqrt.c * r.sqrt_log_n()).to_string(),
            ])
            .map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs [`maximal_norm_search`] for each `N` on equispaced directions, in
/// ascending `N`, seeding each search with the previous witness so the curve
/// is nondecreasing along nested sets.
pub fn growth_curve(
    op: &MaximalOperator,
    n_list: &[usize],
    family: &FamilySpec,
    seed: u64,
) -> Result<(GrowthCurve, Vec<NormEstimate>)> {
    let mut sorted = n_list.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    let mut estimates: Vec<NormEstimate> = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        let set = DirectionSet::make(DirectionKind::Equispaced, n, 0)?;
        let mut spec = family.clone();
        // Warm starts only carry over along nested sets.
        if let Some(prev) = estimates.last().filter(|e| n % e.n == 0) {
            spec.warm_start.extend(prev.witness.clone());
        }
        let est = maximal_norm_search(op, &set, &spec, seed)?;
        rows.push(GrowthRow {
            operator: op.id(),
            n,
            level: family.level,
            seed,
            estimate: est.value,
            source: est.source.clone(),
        });
        estimates.push(est);
    }
    Ok((GrowthCurve::from_rows(rows), estimates))
}

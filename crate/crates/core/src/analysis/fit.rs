use serde::{Deserialize, Serialize};

use crate::analysis::ConvergenceRecord;
use crate::error::{Error, Result};

/// Errors below this are treated as saturated at machine precision.
pub const SATURATION_FLOOR: f64 = 1e-13;

const MIN_ROWS: usize = 4;

/// `error ~ c rho^{-n}` fitted by least squares on `ln(error)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub c: f64,
    pub rho: f64,
    pub r_squared: f64,
    pub fit_range: (usize, usize),
}

pub fn fit_rate(record: &ConvergenceRecord) -> Result<RateFit> {
    let rows: Vec<(usize, f64)> = record.rows.iter().map(|r| (r.degree, r.error)).collect();
    fit_rate_rows(&rows)
}

/// Fits `(degree, error)` pairs.
///
/// Rows with errors below [`SATURATION_FLOOR`] are dropped. The fit then
/// starts at the largest remaining error, so a pre-asymptotic rise is skipped
/// while degree-parity oscillations later on are kept.
pub fn fit_rate_rows(rows: &[(usize, f64)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| e.is_finite() && *e >= SATURATION_FLOOR)
        .map(|&(n, e)| (n as f64, e.ln()))
        .collect();
    let start = usable
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, r)| match best {
            Some((_, top)) if top >= r.1 => best,
            _ => Some((i, r.1)),
        })
        .map_or(0, |(i, _)| i);
    let kept = &usable[start..];
    if kept.len() < MIN_ROWS {
        return Err(Error::InsufficientData { needed: MIN_ROWS, got: kept.len() });
    }

    let len = kept.len() as f64;
    let mean_n = kept.iter().map(|r| r.0).sum::<f64>() / len;
    let mean_y = kept.iter().map(|r| r.1).sum::<f64>() / len;
    let sxx: f64 = kept.iter().map(|r| (r.0 - mean_n).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|r| (r.0 - mean_n) * (r.1 - mean_y)).sum();
    let syy: f64 = kept.iter().map(|r| (r.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_n;
    let ss_res: f64 = kept.iter().map(|r| (r.1 - intercept - slope * r.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };

    Ok(RateFit {
        c: intercept.exp(),
        rho: (-slope).exp(),
        r_squared,
        fit_range: (kept[0].0 as usize, kept[kept.len() - 1].0 as usize),
    })
}

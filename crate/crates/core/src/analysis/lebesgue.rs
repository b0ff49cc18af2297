use crate::analysis::{equispaced, uniform_points};
use crate::error::{Error, Result};
use crate::grid::UnisolventGrid;
use crate::multi_index::{make_lp_set, LpDegree};
use crate::newton::{derivative_tables, transposed_divided_differences};

/// Largest `|A|` accepted by [`lebesgue_estimate`].
pub const DEFAULT_LEBESGUE_CAP: usize = 5000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `(2/pi) (ln(n + 1) + gamma + ln(8/pi))`, the classical asymptotic
/// Lebesgue constant of degree-`n` Chebyshev interpolation.
pub fn brutman_reference(n: usize) -> f64 {
    use std::f64::consts::PI;
    2.0 / PI * (((n + 1) as f64).ln() + EULER_GAMMA + (8.0 / PI).ln())
}

/// Sampled lower bound of the Lebesgue constant of order `k`.
///
/// For `k = 0` this is `max_x sum_alpha |L_alpha(x)|`. For `k > 0` the
/// per-order maxima `max_x sum_alpha |d^beta L_alpha(x)|` are summed over all
/// `|beta|_1 <= k`. In one dimension the samples are `num_samples`
/// equispaced points; otherwise they are seeded uniform draws.
pub fn lebesgue_estimate(grid: &UnisolventGrid, num_samples: usize, seed: u64, k: usize) -> Result<f64> {
    lebesgue_estimate_with_cap(grid, num_samples, seed, k, DEFAULT_LEBESGUE_CAP)
}

pub fn lebesgue_estimate_with_cap(
    grid: &UnisolventGrid,
    num_samples: usize,
    seed: u64,
    k: usize,
    cap: usize,
) -> Result<f64> {
    Ok(lebesgue_profile(grid, num_samples, seed, k, cap)?.iter().sum())
}

/// The per-order maxima behind [`lebesgue_estimate_with_cap`], one entry per
/// `beta` in canonical order of `{|beta|_1 <= k}`.
pub fn lebesgue_profile(
    grid: &UnisolventGrid,
    num_samples: usize,
    seed: u64,
    k: usize,
    cap: usize,
) -> Result<Vec<f64>> {
    if grid.len() > cap {
        return Err(Error::TooLarge { size: grid.len(), cap });
    }
    if num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be positive".into()));
    }
    let m = grid.dim();
    let points = if m == 1 { equispaced(num_samples) } else { uniform_points(m, num_samples, seed) };
    let orders = make_lp_set(m, k, LpDegree::One)?;
    let set = grid.index_set();
    let mut best = vec![0.0f64; orders.len()];
    let mut buf = vec![0.0; grid.len()];

    for x in points.chunks_exact(m) {
        for (slot, beta) in best.iter_mut().zip(orders.iter()) {
            let tables = derivative_tables(grid, beta, x);
            for (b, alpha) in buf.iter_mut().zip(set.iter()) {
                *b = alpha.iter().zip(&tables).map(|(&a, t)| t[a]).product();
            }
            transposed_divided_differences(grid, &mut buf);
            let total: f64 = buf.iter().map(|v| v.abs()).sum();
            *slot = slot.max(total);
        }
    }
    Ok(best)
}

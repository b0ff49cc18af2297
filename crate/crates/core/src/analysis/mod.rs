//! Lebesgue constants, benchmark functions, convergence measurement and
//! geometric rate fitting.

mod benchmark;
mod convergence;
mod fit;
mod lebesgue;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use benchmark::{benchmark_eval, optimal_rho, BenchmarkFunction, FnTarget, Target};
pub use convergence::{
    convergence_run, ConvergenceConfig, ConvergenceMeta, ConvergenceRecord, ConvergenceRow,
    DEFAULT_LEJA_RESOLUTION,
};
pub use fit::{fit_rate, fit_rate_rows, RateFit, SATURATION_FLOOR};
pub use lebesgue::{
    brutman_reference, lebesgue_estimate, lebesgue_estimate_with_cap, lebesgue_profile,
    DEFAULT_LEBESGUE_CAP,
};

/// `count` points drawn uniformly from `[-1, 1]^m`, flattened row by row.
///
/// The stream is a prefix-stable function of `seed`: asking for more points
/// extends the list without changing the earlier ones.
pub fn uniform_points(m: usize, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m * count).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// `count` equispaced points covering `[-1, 1]`, both ends included.
pub fn equispaced(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| -1.0 + 2.0 * i as f64 / (count - 1) as f64).collect(),
    }
}

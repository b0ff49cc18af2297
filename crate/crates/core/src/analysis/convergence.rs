use crate::analysis::{uniform_points, Target};
use crate::error::{Error, Result};
use crate::grid::{build_uniform_grid, lcl_axis, leja_points, NodeFamily, Nodes1D};
use crate::multi_index::{make_lp_set, LpDegree};
use crate::newton::{eval_derivative, eval_recursive, interpolate};

/// Candidate-grid size used when the node family is `leja`.
pub const DEFAULT_LEJA_RESOLUTION: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub p: LpDegree,
    pub family: NodeFamily,
    pub degrees: Vec<usize>,
    pub num_samples: usize,
    pub seed: u64,
    /// Empty means order zero.
    pub deriv_order: Vec<usize>,
    pub leja_resolution: usize,
}

impl ConvergenceConfig {
    pub fn new(p: LpDegree, family: NodeFamily, degrees: Vec<usize>) -> Self {
        ConvergenceConfig {
            p,
            family,
            degrees,
            num_samples: 10_000,
            seed: 0,
            deriv_order: Vec::new(),
            leja_resolution: DEFAULT_LEJA_RESOLUTION,
        }
    }

    pub fn samples(mut self, num_samples: usize) -> Self {
        self.num_samples = num_samples;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn deriv_order(mut self, order: Vec<usize>) -> Self {
        self.deriv_order = order;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceMeta {
    pub function: String,
    pub params: Vec<(String, f64)>,
    pub m: usize,
    pub p: LpDegree,
    pub family: NodeFamily,
    pub num_samples: usize,
    pub seed: u64,
    pub deriv_order: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub num_coeffs: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub meta: ConvergenceMeta,
    pub rows: Vec<ConvergenceRow>,
}

/// Interpolates `f` on `A_{m,n,p}` for every requested degree and records
/// the largest deviation `|d f(x) - d Q(x)|` over seeded uniform samples.
///
/// The samples for degree `n` come from the sub-seed `seed ^ n`, so they are
/// fresh per degree but shared by every family and `p`.
pub fn convergence_run<T: Target + ?Sized>(f: &T, config: &ConvergenceConfig) -> Result<ConvergenceRecord> {
    let m = f.dim();
    let order = if config.deriv_order.is_empty() { vec![0; m] } else { config.deriv_order.clone() };
    if order.len() != m {
        return Err(Error::IndexLength(order.clone(), order.len(), m));
    }
    if !f.supports(&order) {
        return Err(Error::UnsupportedDerivative { function: f.name(), order });
    }
    if config.degrees.is_empty() {
        return Err(Error::InvalidParameter("no degrees requested".into()));
    }
    if config.degrees.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("degrees must be strictly increasing".into()));
    }
    if config.num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be positive".into()));
    }
    let top = *config.degrees.last().unwrap();
    let leja = match config.family {
        NodeFamily::Leja => Some(leja_points(top, config.leja_resolution.max(10 * (top + 1)))?),
        NodeFamily::LejaOrderedChebyshevLobatto | NodeFamily::ChebyshevLobatto => None,
        NodeFamily::Custom => {
            return Err(Error::InvalidParameter("convergence runs need a generated node family".into()))
        }
    };
    let zero_order = order.iter().all(|&o| o == 0);

    let mut rows = Vec::with_capacity(config.degrees.len());
    for &n in &config.degrees {
        let at = |source: Error| Error::AtDegree { degree: n, source: Box::new(source) };
        let axis: Nodes1D = match (&leja, config.family) {
            (Some(points), _) => points.truncated(n + 1).map_err(at)?,
            (None, NodeFamily::ChebyshevLobatto) => crate::grid::chebyshev_lobatto(n),
            (None, _) => lcl_axis(n),
        };
        let set = make_lp_set(m, n, config.p).map_err(at)?;
        let grid = build_uniform_grid(set, &axis).map_err(at)?;
        let poly = interpolate(|x| f.value(x), &grid).map_err(at)?;

        let points = uniform_points(m, config.num_samples, config.seed ^ n as u64);
        let mut error = 0.0f64;
        for x in points.chunks_exact(m) {
            let (exact, approx) = if zero_order {
                (f.value(x), eval_recursive(&poly, x))
            } else {
                (f.derivative(&order, x).map_err(at)?, eval_derivative(&poly, &order, x).map_err(at)?)
            };
            let deviation = (exact - approx).abs();
            if !deviation.is_finite() {
                return Err(at(Error::NonFiniteSample { index: order.clone(), node: x.to_vec(), value: deviation }));
            }
            error = error.max(deviation);
        }
        rows.push(ConvergenceRow { degree: n, num_coeffs: grid.len(), error });
    }

    Ok(ConvergenceRecord {
        meta: ConvergenceMeta {
            function: f.name(),
            params: f.params(),
            m,
            p: config.p,
            family: config.family,
            num_samples: config.num_samples,
            seed: config.seed,
            deriv_order: order,
        },
        rows,
    })
}

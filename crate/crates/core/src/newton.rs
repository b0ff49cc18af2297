//! Newton-form interpolants on unisolvent grids.
//!
//! Coefficients are multivariate divided differences. They are computed in
//! place by running the one-dimensional divided-difference scheme along
//! every grid line, eliminating the last coordinate first.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::UnisolventGrid;

/// Divisors below this magnitude abort the divided-difference pass.
pub const MIN_DIVISOR: f64 = 1e-14;

/// `Q(x) = sum_alpha c_alpha N_alpha(x)` with coefficients in canonical order.
#[derive(Clone, Debug)]
pub struct NewtonPolynomial {
    grid: Arc<UnisolventGrid>,
    coeffs: Vec<f64>,
}

/// Function values at the grid nodes, in canonical order.
#[derive(Clone, Debug)]
pub struct LagrangeCoefficients {
    grid: Arc<UnisolventGrid>,
    values: Vec<f64>,
}

impl NewtonPolynomial {
    pub fn new(grid: Arc<UnisolventGrid>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: coeffs.len() });
        }
        if let Some((position, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient { position, value });
        }
        Ok(NewtonPolynomial { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<UnisolventGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        eval_recursive(self, x)
    }
}

impl LagrangeCoefficients {
    pub fn new(grid: Arc<UnisolventGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some((pos, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index: grid.index_set().get(pos).to_vec(),
                node: grid.node(pos),
                value,
            });
        }
        Ok(LagrangeCoefficients { grid, values })
    }

    pub fn grid(&self) -> &Arc<UnisolventGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Newton coefficients of the interpolant of `samples`.
pub fn divided_differences(samples: &LagrangeCoefficients) -> Result<NewtonPolynomial> {
    let mut coeffs = samples.values.clone();
    divided_differences_in_place(&samples.grid, &mut coeffs)?;
    Ok(NewtonPolynomial { grid: samples.grid.clone(), coeffs })
}

/// Turns node values into Newton coefficients inside `buf`.
///
/// For each axis from the last to the first, every line of the index set
/// along that axis receives the classical 1D column sweep
/// `c_i <- (c_i - c_{j-1}) / (x_i - x_{j-1})`, `i >= j`.
pub fn divided_differences_in_place(grid: &UnisolventGrid, buf: &mut [f64]) -> Result<()> {
    if buf.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: buf.len() });
    }
    for axis in (0..grid.dim()).rev() {
        let x = grid.axes()[axis].points();
        for line in grid.lines(axis).iter() {
            for j in 1..line.len() {
                let pivot = buf[line[j - 1]];
                let base = x[j - 1];
                for (i, &pos) in line.iter().enumerate().skip(j) {
                    let divisor = x[i] - base;
                    if divisor.abs() < MIN_DIVISOR {
                        return Err(Error::DegenerateDivisor { axis, divisor });
                    }
                    buf[pos] = (buf[pos] - pivot) / divisor;
                }
            }
        }
    }
    Ok(())
}

/// Exact inverse of [`divided_differences_in_place`]: Newton coefficients
/// back to node values.
fn undo_divided_differences(grid: &UnisolventGrid, buf: &mut [f64]) {
    for axis in 0..grid.dim() {
        let x = grid.axes()[axis].points();
        for line in grid.lines(axis).iter() {
            for j in (1..line.len()).rev() {
                let pivot = buf[line[j - 1]];
                let base = x[j - 1];
                for (i, &pos) in line.iter().enumerate().skip(j) {
                    buf[pos] = buf[pos] * (x[i] - base) + pivot;
                }
            }
        }
    }
}

/// Applies the transpose of the divided-difference map. Given
/// `(d N_gamma(x))_gamma` it yields `(d L_alpha(x))_alpha` for any linear
/// functional `d`.
pub(crate) fn transposed_divided_differences(grid: &UnisolventGrid, buf: &mut [f64]) {
    for axis in 0..grid.dim() {
        let x = grid.axes()[axis].points();
        for line in grid.lines(axis).iter() {
            for j in (1..line.len()).rev() {
                let base = x[j - 1];
                let mut moved = 0.0;
                for (i, &pos) in line.iter().enumerate().skip(j) {
                    let w = buf[pos] / (x[i] - base);
                    buf[pos] = w;
                    moved += w;
                }
                buf[line[j - 1]] -= moved;
            }
        }
    }
}

/// Samples `f` at every node (exactly `|A|` calls) and interpolates.
pub fn interpolate<F>(f: F, grid: &Arc<UnisolventGrid>) -> Result<NewtonPolynomial>
where
    F: FnMut(&[f64]) -> f64,
{
    let values = sample(f, grid)?;
    let mut coeffs = values;
    divided_differences_in_place(grid, &mut coeffs)?;
    NewtonPolynomial::new(grid.clone(), coeffs)
}

/// Values of `f` at the grid nodes in canonical order.
pub fn sample<F>(mut f: F, grid: &UnisolventGrid) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = vec![0.0; grid.dim()];
    let mut values = Vec::with_capacity(grid.len());
    for pos in 0..grid.len() {
        grid.node_into(pos, &mut x);
        let value = f(&x);
        if !value.is_finite() {
            return Err(Error::NonFiniteSample {
                index: grid.index_set().get(pos).to_vec(),
                node: x,
                value,
            });
        }
        values.push(value);
    }
    Ok(values)
}

/// Horner-type evaluation with one accumulator per dimension.
///
/// Walking the set in reverse canonical order, axis 0 is folded as
/// `acc_0 <- c + (x_0 - p_{a_0,0}) acc_0`; whenever `a_d` reaches zero the
/// finished accumulator is folded into the next dimension the same way.
pub fn eval_recursive(poly: &NewtonPolynomial, x: &[f64]) -> f64 {
    let grid = &*poly.grid;
    let set = grid.index_set();
    let m = grid.dim();
    debug_assert_eq!(x.len(), m);
    let axes = grid.axes();
    let mut acc = vec![0.0; m];
    let p0 = axes[0].points();
    for pos in (0..set.len()).rev() {
        let a = set.get(pos);
        acc[0] = poly.coeffs[pos] + (x[0] - p0[a[0]]) * acc[0];
        let mut d = 0;
        while d + 1 < m && a[d] == 0 {
            let k = a[d + 1];
            acc[d + 1] = acc[d] + (x[d + 1] - axes[d + 1][k]) * acc[d + 1];
            acc[d] = 0.0;
            d += 1;
        }
    }
    acc[m - 1]
}

/// Table-driven evaluation: per axis the partial products
/// `q_{i,k} = prod_{j<k} (x_i - p_{j,i})`, then `sum_alpha c_alpha prod_i q_{i,alpha_i}`.
pub fn eval_iterative(poly: &NewtonPolynomial, x: &[f64]) -> f64 {
    let tables = derivative_tables(&poly.grid, &vec![0; poly.dim()], x);
    weighted_sum(&poly.grid, &poly.coeffs, &tables)
}

/// `d^beta Q(x)` via per-axis derivative tables of the Newton factors.
///
/// For `beta = 0` this is bitwise identical to [`eval_iterative`].
pub fn eval_derivative(poly: &NewtonPolynomial, order: &[usize], x: &[f64]) -> Result<f64> {
    if order.len() != poly.dim() {
        return Err(Error::IndexLength(order.to_vec(), order.len(), poly.dim()));
    }
    let tables = derivative_tables(&poly.grid, order, x);
    Ok(weighted_sum(&poly.grid, &poly.coeffs, &tables))
}

/// `tables[i][k] = d^{beta_i} / dx_i^{beta_i} prod_{j<k} (x_i - p_{j,i})`.
///
/// The product rule gives `d_l <- d_l (x - p_j) + l d_{l-1}` for the running
/// derivatives `d_0..d_{beta_i}` of the partial product.
pub(crate) fn derivative_tables(grid: &UnisolventGrid, order: &[usize], x: &[f64]) -> Vec<Vec<f64>> {
    let set = grid.index_set();
    (0..grid.dim())
        .map(|i| {
            let top = set.max_exponent(i).unwrap_or(0);
            let p = grid.axes()[i].points();
            let b = order[i];
            let mut d = vec![0.0; b + 1];
            d[0] = 1.0;
            let mut table = Vec::with_capacity(top + 1);
            table.push(d[b]);
            for &pj in &p[..top] {
                let t = x[i] - pj;
                for l in (1..=b).rev() {
                    d[l] = d[l] * t + l as f64 * d[l - 1];
                }
                d[0] *= t;
                table.push(d[b]);
            }
            table
        })
        .collect()
}

/// `sum_alpha w_alpha prod_i tables[i][alpha_i]`, factored along the
/// canonical order so each index costs one multiply-add.
pub(crate) fn weighted_sum(grid: &UnisolventGrid, weights: &[f64], tables: &[Vec<f64>]) -> f64 {
    let set = grid.index_set();
    let m = grid.dim();
    let mut acc = vec![0.0; m];
    let t0 = &tables[0];
    for pos in (0..set.len()).rev() {
        let a = set.get(pos);
        acc[0] += weights[pos] * t0[a[0]];
        let mut d = 0;
        while d + 1 < m && a[d] == 0 {
            acc[d + 1] += acc[d] * tables[d + 1][a[d + 1]];
            acc[d] = 0.0;
            d += 1;
        }
    }
    acc[m - 1]
}

/// Values of the interpolant at its own nodes, i.e. its Lagrange coefficients.
pub fn newton_to_lagrange(poly: &NewtonPolynomial) -> LagrangeCoefficients {
    let mut values = poly.coeffs.clone();
    undo_divided_differences(&poly.grid, &mut values);
    LagrangeCoefficients { grid: poly.grid.clone(), values }
}

/// Newton coefficients of the Lagrange polynomial `L_alpha`.
pub fn lagrange_basis_in_newton(grid: &Arc<UnisolventGrid>, alpha: &[usize]) -> Result<NewtonPolynomial> {
    let pos = grid.index_set().position(alpha).ok_or_else(|| Error::NotInSet(alpha.to_vec()))?;
    let mut coeffs = vec![0.0; grid.len()];
    coeffs[pos] = 1.0;
    divided_differences_in_place(grid, &mut coeffs)?;
    Ok(NewtonPolynomial { grid: grid.clone(), coeffs })
}

/// Newton basis function `N_alpha(x) = prod_i prod_{j<alpha_i} (x_i - p_{j,i})`.
pub fn newton_basis(grid: &UnisolventGrid, alpha: &[usize], x: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(x)
        .zip(grid.axes())
        .map(|((&a, &xi), axis)| axis.points()[..a].iter().map(|&p| xi - p).product::<f64>())
        .product()
}

#![allow(dead_code)]

use std::sync::Arc;

use mvinterp::grid::{leja_order, NodeFamily};
use mvinterp::newton::newton_basis;
use mvinterp::{build_grid, MultiIndexSet, NewtonPolynomial, Nodes1D, UnisolventGrid};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// Downward closure of `count` random corners in the box `[0, bound]^m`,
/// shrunk corner by corner until it holds at most `max_len` indices.
pub fn random_downward_closed<R: Rng>(rng: &mut R, m: usize, bound: usize, count: usize, max_len: usize) -> MultiIndexSet {
    let mut corners: Vec<Vec<usize>> =
        (0..count.max(1)).map(|_| (0..m).map(|_| rng.gen_range(0..=bound)).collect()).collect();
    loop {
        let indices = closure(&corners);
        if indices.len() <= max_len {
            return MultiIndexSet::from_indices(m, indices).expect("closure is a valid set");
        }
        let k = rng.gen_range(0..corners.len());
        let axis = rng.gen_range(0..m);
        corners[k][axis] /= 2;
    }
}

fn closure(corners: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let m = corners[0].len();
    let top: Vec<usize> = (0..m).map(|i| corners.iter().map(|c| c[i]).max().unwrap()).collect();
    let mut out = Vec::new();
    let mut alpha = vec![0usize; m];
    loop {
        if corners.iter().any(|c| c.iter().zip(&alpha).all(|(ci, ai)| ai <= ci)) {
            out.push(alpha.clone());
        }
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            if alpha[i] < top[i] {
                alpha[i] += 1;
                break;
            }
            alpha[i] = 0;
            i += 1;
        }
    }
}

/// `len` distinct points: jittered Chebyshev-Lobatto points in random order.
pub fn random_axis<R: Rng>(rng: &mut R, len: usize) -> Nodes1D {
    if len == 1 {
        return Nodes1D::custom(vec![rng.gen_range(-1.0..=1.0)]).unwrap();
    }
    let n = (len - 1) as f64;
    let gap = std::f64::consts::PI / n;
    let mut points: Vec<f64> = (0..len)
        .map(|k| (k as f64 * gap + rng.gen_range(-0.3..0.3) * gap).clamp(0.0, std::f64::consts::PI).cos())
        .collect();
    points.shuffle(rng);
    Nodes1D::custom(points).unwrap()
}

/// Like [`random_axis`], but put in Leja order so Newton sums stay well conditioned.
pub fn random_leja_axis<R: Rng>(rng: &mut R, len: usize) -> Nodes1D {
    let ordered = leja_order(&random_axis(rng, len));
    Nodes1D::new(ordered.points().to_vec(), NodeFamily::Custom).unwrap()
}

pub fn random_grid<R: Rng>(rng: &mut R, set: MultiIndexSet, leja: bool) -> Arc<UnisolventGrid> {
    let axes = (0..set.dim())
        .map(|i| {
            let len = set.max_exponent(i).unwrap() + 1;
            if leja {
                random_leja_axis(rng, len)
            } else {
                random_axis(rng, len)
            }
        })
        .collect();
    build_grid(set, axes).unwrap()
}

pub fn chebyshev_t(degree: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if degree == 0 {
        return t0;
    }
    for _ in 1..degree {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// A member of `Pi_A` written in the tensor Chebyshev basis.
pub struct ChebyshevPoly {
    pub set: MultiIndexSet,
    pub coeffs: Vec<f64>,
}

impl ChebyshevPoly {
    pub fn random<R: Rng>(rng: &mut R, set: &MultiIndexSet) -> Self {
        let coeffs = (0..set.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ChebyshevPoly { set: set.clone(), coeffs }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let m = self.set.dim();
        let tables: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let top = self.set.max_exponent(i).unwrap();
                (0..=top).map(|d| chebyshev_t(d, x[i])).collect()
            })
            .collect();
        self.set
            .iter()
            .zip(&self.coeffs)
            .map(|(beta, c)| c * beta.iter().enumerate().map(|(i, &b)| tables[i][b]).product::<f64>())
            .sum()
    }
}

/// Newton coefficients by a dense solve of `sum_beta c_beta N_beta(p_alpha) = f(p_alpha)`.
pub fn collocation_solve(grid: &UnisolventGrid, values: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let set = grid.index_set();
    let nodes: Vec<Vec<f64>> = grid.nodes().collect();
    let matrix = DMatrix::from_fn(n, n, |row, col| newton_basis(grid, set.get(col), &nodes[row]));
    let rhs = DVector::from_column_slice(values);
    let sol = matrix.lu().solve(&rhs).expect("collocation matrix is triangular with unit diagonal");
    sol.iter().copied().collect()
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = max_abs(b.iter().copied()).max(f64::MIN_POSITIVE);
    max_abs(a.iter().zip(b).map(|(x, y)| x - y)) / scale
}

pub fn coeffs_of(poly: &NewtonPolynomial) -> Vec<f64> {
    poly.coeffs().to_vec()
}

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_index::LpDegree;

/// A function that can be sampled, and optionally differentiated, on the cube.
pub trait Target {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// `d^order f(x)`. The default only supports order zero.
    fn derivative(&self, order: &[usize], x: &[f64]) -> Result<f64> {
        if order.iter().all(|&o| o == 0) {
            Ok(self.value(x))
        } else {
            Err(Error::UnsupportedDerivative { function: self.name(), order: order.to_vec() })
        }
    }

    /// Checks that `order` is available before any work starts.
    fn supports(&self, order: &[usize]) -> bool {
        order.iter().all(|&o| o == 0)
    }

    fn name(&self) -> String {
        "custom".to_string()
    }

    fn params(&self) -> Vec<(String, f64)> {
        Vec::new()
    }
}

/// A closure on `[-1, 1]^m`, without derivatives.
pub struct FnTarget<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnTarget<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnTarget { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64> Target for FnTarget<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum BenchmarkFunction {
    /// `1 / (s^2 + r^2 |x|^2)`.
    Runge { m: usize, r: f64, s: f64 },
    /// `1 / ((x_1 - r)^2 + x_2^2)` on the square, `r > 1`.
    F1ShiftedPole { r: f64 },
    /// `1 / (1 + (sum_i 5 / i^3 x_i)^2)`.
    F3PerturbedRunge { m: usize },
    /// `1 / sum_i (x_i - a)^2`, `a > 1`.
    F4ShiftedRungeM { m: usize, a: f64 },
    /// `cos(pi k1 sum_i x_i) + sin(pi k2 sum_i x_i)`.
    F5Trig { m: usize, k1: f64, k2: f64 },
}

impl BenchmarkFunction {
    pub fn runge(m: usize, r: f64, s: f64) -> Result<Self> {
        Self::Runge { m, r, s }.validated()
    }

    pub fn f1(r: f64) -> Result<Self> {
        Self::F1ShiftedPole { r }.validated()
    }

    pub fn f3(m: usize) -> Result<Self> {
        Self::F3PerturbedRunge { m }.validated()
    }

    pub fn f4(m: usize, a: f64) -> Result<Self> {
        Self::F4ShiftedRungeM { m, a }.validated()
    }

    pub fn f5(m: usize, k1: f64, k2: f64) -> Result<Self> {
        Self::F5Trig { m, k1, k2 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let m = self.dimension();
        if m == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{}: {what}", self.id())));
        match self {
            Self::Runge { r, s, .. } => {
                if !(r.is_finite() && s.is_finite() && s != 0.0) {
                    return bad("needs finite r and nonzero finite s");
                }
            }
            Self::F1ShiftedPole { r } => {
                if !(r.is_finite() && r > 1.0) {
                    return bad("pole parameter r must exceed 1");
                }
            }
            Self::F3PerturbedRunge { .. } => {}
            Self::F4ShiftedRungeM { a, .. } => {
                if !(a.is_finite() && a > 1.0) {
                    return bad("pole parameter a must exceed 1");
                }
            }
            Self::F5Trig { k1, k2, .. } => {
                if !(k1.is_finite() && k2.is_finite()) {
                    return bad("frequencies must be finite");
                }
            }
        }
        Ok(self)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Runge { .. } => "runge",
            Self::F1ShiftedPole { .. } => "f1_shifted_pole",
            Self::F3PerturbedRunge { .. } => "f3_perturbed_runge",
            Self::F4ShiftedRungeM { .. } => "f4_shifted_runge_m",
            Self::F5Trig { .. } => "f5_trig",
        }
    }

    pub fn dimension(&self) -> usize {
        match *self {
            Self::Runge { m, .. }
            | Self::F3PerturbedRunge { m }
            | Self::F4ShiftedRungeM { m, .. }
            | Self::F5Trig { m, .. } => m,
            Self::F1ShiftedPole { .. } => 2,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Self::Runge { r, s, .. } => 1.0 / (s * s + r * r * norm_sq(x)),
            Self::F1ShiftedPole { r } => 1.0 / ((x[0] - r).powi(2) + x[1] * x[1]),
            Self::F3PerturbedRunge { .. } => {
                let u: f64 = x.iter().enumerate().map(|(i, &xi)| f3_weight(i) * xi).sum();
                1.0 / (1.0 + u * u)
            }
            Self::F4ShiftedRungeM { a, .. } => 1.0 / x.iter().map(|&xi| (xi - a).powi(2)).sum::<f64>(),
            Self::F5Trig { k1, k2, .. } => {
                let t: f64 = x.iter().sum();
                (PI * k1 * t).cos() + (PI * k2 * t).sin()
            }
        }
    }

    /// Closed-form `d^order f(x)` for `|order|_1 <= 2`.
    pub fn eval_derivative(&self, order: &[usize], x: &[f64]) -> Result<f64> {
        if order.len() != self.dimension() || x.len() != self.dimension() {
            return Err(Error::IndexLength(order.to_vec(), order.len(), self.dimension()));
        }
        if !self.supports(order) {
            return Err(Error::UnsupportedDerivative {
                function: self.id().to_string(),
                order: order.to_vec(),
            });
        }
        let nz: Vec<usize> = order.iter().enumerate().flat_map(|(i, &o)| std::iter::repeat_n(i, o)).collect();
        Ok(match *self {
            Self::Runge { r, s, .. } => {
                let r2 = r * r;
                let g = s * s + r2 * norm_sq(x);
                reciprocal_derivative(g, |i| 2.0 * r2 * x[i], |i, j| if i == j { 2.0 * r2 } else { 0.0 }, &nz)
            }
            Self::F1ShiftedPole { r } => {
                let shift = [r, 0.0];
                let g = (x[0] - r).powi(2) + x[1] * x[1];
                reciprocal_derivative(g, |i| 2.0 * (x[i] - shift[i]), |i, j| if i == j { 2.0 } else { 0.0 }, &nz)
            }
            Self::F5Trig { k1, k2, .. } => {
                let t: f64 = x.iter().sum();
                let (w1, w2) = (PI * k1, PI * k2);
                match nz.len() {
                    0 => (w1 * t).cos() + (w2 * t).sin(),
                    1 => -w1 * (w1 * t).sin() + w2 * (w2 * t).cos(),
                    _ => -w1 * w1 * (w1 * t).cos() - w2 * w2 * (w2 * t).sin(),
                }
            }
            _ => self.eval(x),
        })
    }

    /// Analytic derivatives exist for `runge`, `f1` and `f5` up to total
    /// order two; the others only evaluate.
    pub fn supports(&self, order: &[usize]) -> bool {
        let total: usize = order.iter().sum();
        match self {
            Self::Runge { .. } | Self::F1ShiftedPole { .. } | Self::F5Trig { .. } => total <= 2,
            _ => total == 0,
        }
    }

    /// Parameters as `(name, value)` pairs, dimension excluded.
    pub fn params(&self) -> Vec<(String, f64)> {
        let named = |v: &[(&str, f64)]| v.iter().map(|(k, x)| (k.to_string(), *x)).collect();
        match *self {
            Self::Runge { r, s, .. } => named(&[("r", r), ("s", s)]),
            Self::F1ShiftedPole { r } => named(&[("r", r)]),
            Self::F3PerturbedRunge { .. } => Vec::new(),
            Self::F4ShiftedRungeM { a, .. } => named(&[("a", a)]),
            Self::F5Trig { k1, k2, .. } => named(&[("k1", k1), ("k2", k2)]),
        }
    }
}

impl fmt::Display for BenchmarkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(m={}", self.id(), self.dimension())?;
        for (k, v) in self.params() {
            write!(f, ", {k}={v}")?;
        }
        f.write_str(")")
    }
}

impl Target for BenchmarkFunction {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn derivative(&self, order: &[usize], x: &[f64]) -> Result<f64> {
        self.eval_derivative(order, x)
    }

    fn supports(&self, order: &[usize]) -> bool {
        BenchmarkFunction::supports(self, order)
    }

    fn name(&self) -> String {
        self.id().to_string()
    }

    fn params(&self) -> Vec<(String, f64)> {
        BenchmarkFunction::params(self)
    }
}

/// Closed-form `d^order f(x)`; free-function form of
/// [`BenchmarkFunction::eval_derivative`].
pub fn benchmark_eval(f: &BenchmarkFunction, x: &[f64], order: &[usize]) -> Result<f64> {
    f.eval_derivative(order, x)
}

fn f3_weight(i: usize) -> f64 {
    5.0 / ((i + 1) as f64).powi(3)
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Derivatives of `1/g` for a quadratic `g`, given `g`, its gradient and its
/// constant Hessian. `axes` lists the differentiation variables (at most two).
fn reciprocal_derivative(
    g: f64,
    grad: impl Fn(usize) -> f64,
    hess: impl Fn(usize, usize) -> f64,
    axes: &[usize],
) -> f64 {
    match *axes {
        [] => 1.0 / g,
        [i] => -grad(i) / (g * g),
        [i, j] => 2.0 * grad(i) * grad(j) / (g * g * g) - hess(i, j) / (g * g),
        _ => unreachable!("order checked by supports"),
    }
}

/// Reference geometric rate for `(f, p)`, when one is known in closed form.
pub fn optimal_rho(f: &BenchmarkFunction, p: LpDegree) -> Option<f64> {
    let runge_rate = |h: f64, m: usize, p: LpDegree| match p {
        LpDegree::One => {
            let m = m as f64;
            Some((h + (h * h + m).sqrt()) / m.sqrt())
        }
        LpDegree::Two | LpDegree::Inf => Some(h + (h * h + 1.0).sqrt()),
        LpDegree::Real(q) if q >= 2.0 => Some(h + (h * h + 1.0).sqrt()),
        LpDegree::Real(_) => None,
    };
    match *f {
        BenchmarkFunction::Runge { m, r, s } => runge_rate((s / r).abs(), m, p),
        BenchmarkFunction::F1ShiftedPole { r } => match p {
            LpDegree::One => Some(r),
            LpDegree::Two | LpDegree::Inf => Some(r - 1.0 + ((r - 1.0).powi(2) + 1.0).sqrt()),
            LpDegree::Real(_) => None,
        },
        BenchmarkFunction::F3PerturbedRunge { m } => match p {
            LpDegree::Two | LpDegree::Inf => runge_rate(1.0 / 5.0, m, p),
            _ => None,
        },
        BenchmarkFunction::F4ShiftedRungeM { m: 2, a: 1.25 } => match p {
            LpDegree::Two => Some(2.0518),
            LpDegree::Inf => Some(2.1531),
            _ => None,
        },
        _ => None,
    }
}

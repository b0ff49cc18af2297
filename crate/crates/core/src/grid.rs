//! One-dimensional node sets and the non-tensorial grids built from them.
//!
//! A grid pairs a downward-closed set `A` with one ordered node set per axis
//! and places a node at `(p_{a_1,1}, ..., p_{a_m,m})` for every `alpha in A`.
//! Position `j` of an axis is semantic: it is the `j`-th Newton node.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_index::{AxisLines, MultiIndexSet};

/// Two log-products closer than this are treated as a tie in Leja selection.
const LEJA_TIE: f64 = 1e-12;
/// Relative smallest-singular-value threshold of the unisolvence oracle.
pub const UNISOLVENCE_RCOND: f64 = 1e-10;
/// Default size cap of the O(|A|^3) unisolvence oracle.
pub const DEFAULT_ORACLE_CAP: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFamily {
    ChebyshevLobatto,
    LejaOrderedChebyshevLobatto,
    Leja,
    Custom,
}

impl NodeFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeFamily::ChebyshevLobatto => "chebyshev_lobatto",
            NodeFamily::LejaOrderedChebyshevLobatto => "leja_ordered_chebyshev_lobatto",
            NodeFamily::Leja => "leja",
            NodeFamily::Custom => "custom",
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev_lobatto" => Ok(NodeFamily::ChebyshevLobatto),
            "leja_ordered_chebyshev_lobatto" | "lcl" => Ok(NodeFamily::LejaOrderedChebyshevLobatto),
            "leja" => Ok(NodeFamily::Leja),
            "custom" => Ok(NodeFamily::Custom),
            other => Err(Error::InvalidParameter(format!("unknown node family '{other}'"))),
        }
    }
}

/// An ordered tuple of distinct points in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nodes1D {
    points: Vec<f64>,
    family: NodeFamily,
}

impl Nodes1D {
    pub fn new(points: Vec<f64>, family: NodeFamily) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        check_points(&points)?;
        Ok(Nodes1D { points, family })
    }

    pub fn custom(points: Vec<f64>) -> Result<Self> {
        Self::new(points, NodeFamily::Custom)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The first `len` points. Leja points are nested, so a prefix of
    /// `leja_points(n)` is `leja_points(len - 1)`.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.points.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate {} points to {len}",
                self.points.len()
            )));
        }
        Ok(Nodes1D { points: self.points[..len].to_vec(), family: self.family })
    }
}

impl std::ops::Index<usize> for Nodes1D {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.points[i]
    }
}

fn check_points(points: &[f64]) -> Result<()> {
    for (position, &value) in points.iter().enumerate() {
        if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
            return Err(Error::NodeOutOfRange { value, position });
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicateNode { value: points[first], first, second });
        }
    }
    Ok(())
}

/// `cos(k pi / n)` for `k = 0..=n`, in that order. The midpoint of an even
/// `n` is exactly zero.
pub fn chebyshev_lobatto(n: usize) -> Nodes1D {
    let points = if n == 0 {
        vec![1.0]
    } else {
        (0..=n)
            .map(|k| if 2 * k == n { 0.0 } else { (k as f64 * PI / n as f64).cos() })
            .collect()
    };
    Nodes1D { points, family: NodeFamily::ChebyshevLobatto }
}

/// Greedy Leja ordering of a finite set: `|p_0|` maximal, then each `p_l`
/// maximises `prod_{j<l} |p_l - p_j|` over the remaining points. Ties go to
/// the numerically largest candidate.
pub fn leja_order(nodes: &Nodes1D) -> Nodes1D {
    let mut remaining: Vec<f64> = nodes.points.clone();
    let mut ordered = Vec::with_capacity(remaining.len());
    // Running sum of ln|x - p_j| over the already chosen points.
    let mut score = vec![0.0f64; remaining.len()];

    let first = argmax_with_tie(&remaining, &remaining.iter().map(|x| x.abs()).collect::<Vec<_>>());
    let mut chosen = remaining.swap_remove(first);
    score.swap_remove(first);
    ordered.push(chosen);

    while !remaining.is_empty() {
        for (s, &x) in score.iter_mut().zip(&remaining) {
            *s += (x - chosen).abs().ln();
        }
        let best = argmax_with_tie(&remaining, &score);
        chosen = remaining.swap_remove(best);
        score.swap_remove(best);
        ordered.push(chosen);
    }

    let family = match nodes.family {
        NodeFamily::ChebyshevLobatto | NodeFamily::LejaOrderedChebyshevLobatto => {
            NodeFamily::LejaOrderedChebyshevLobatto
        }
        other => other,
    };
    Nodes1D { points: ordered, family }
}

/// Index of the largest score; scores within [`LEJA_TIE`] of each other are
/// tied and resolved toward the largest point. Scanning the whole slice first
/// keeps the result independent of candidate order.
fn argmax_with_tie(points: &[f64], scores: &[f64]) -> usize {
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = usize::MAX;
    for (i, (&p, &s)) in points.iter().zip(scores).enumerate() {
        if s >= top - LEJA_TIE * top.abs().max(1.0) && (best == usize::MAX || p > points[best]) {
            best = i;
        }
    }
    best
}

/// Leja points on `[-1, 1]`: `p_0 = 1`, then each `p_l` maximises
/// `prod_{j<l} |p - p_j|` over the interval.
///
/// Each maximisation scans a Chebyshev-distributed candidate grid of
/// `resolution` points, then refines every near-best local maximum inside its
/// bracketing cell. Between two chosen points the log-product is strictly
/// concave, so the refinement bisects its derivative `sum_j 1/(x - p_j)`,
/// which pins the abscissa down to rounding level.
pub fn leja_points(n: usize, resolution: usize) -> Result<Nodes1D> {
    let needed = 10 * (n + 1);
    if resolution < needed {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} below the minimum {needed} for {} Leja points",
            n + 1
        )));
    }
    // Ascending, so cell i is [candidates[i-1], candidates[i+1]].
    let mut candidates: Vec<f64> = chebyshev_lobatto(resolution - 1).points;
    candidates.reverse();
    let mut score = vec![0.0f64; candidates.len()];
    let mut points = vec![1.0];

    for _ in 0..n {
        let last = *points.last().unwrap();
        for (s, &c) in score.iter_mut().zip(&candidates) {
            *s += (c - last).abs().ln();
        }
        let log_product = |x: f64| points.iter().map(|&p| (x - p).abs().ln()).sum::<f64>();

        let top = score.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let near = 1e-8 * top.abs().max(1.0);
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for i in 0..candidates.len() {
            let s = score[i];
            if s < top - near {
                continue;
            }
            let left_ok = i == 0 || score[i - 1] <= s;
            let right_ok = i + 1 == candidates.len() || score[i + 1] <= s;
            if !(left_ok && right_ok) {
                continue;
            }
            let c = candidates[i];
            let mut lo = if i == 0 { c } else { candidates[i - 1] };
            let mut hi = if i + 1 == candidates.len() { c } else { candidates[i + 1] };
            for &p in &points {
                if p > lo && p < c {
                    lo = p;
                }
                if p < hi && p > c {
                    hi = p;
                }
            }
            let x = refine_leja(&points, lo, hi, c);
            xs.push(x);
            vs.push(log_product(x));
        }
        let pick = argmax_with_tie(&xs, &vs);
        points.push(xs[pick]);
    }
    Nodes1D::new(points, NodeFamily::Leja)
}

/// Maximiser of `sum_j ln|x - p_j|` on `[lo, hi]`, a cell free of the `p_j`
/// except possibly at its ends, starting from the candidate `c`.
fn refine_leja(points: &[f64], lo: f64, hi: f64, c: f64) -> f64 {
    let slope = |x: f64| points.iter().map(|&p| 1.0 / (x - p)).sum::<f64>();
    let value = |x: f64| points.iter().map(|&p| (x - p).abs().ln()).sum::<f64>();
    let (mut a, mut b) = (lo, hi);
    let (sa, sb) = (slope(a), slope(b));
    if !(sa > 0.0 && sb < 0.0) {
        // Monotone on the cell: the best of the endpoints and the candidate.
        return [lo, c, hi]
            .into_iter()
            .filter(|x| x.is_finite() && value(*x).is_finite())
            .fold(c, |best, x| if value(x) > value(best) { x } else { best });
    }
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if slope(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    if value(mid) >= value(c) {
        mid
    } else {
        c
    }
}

/// Downward-closed index set plus one node set per axis.
#[derive(Clone, Debug)]
pub struct UnisolventGrid {
    set: MultiIndexSet,
    axes: Vec<Nodes1D>,
    lines: Vec<AxisLines>,
}

impl UnisolventGrid {
    pub fn index_set(&self) -> &MultiIndexSet {
        &self.set
    }

    pub fn axes(&self) -> &[Nodes1D] {
        &self.axes
    }

    /// Lines of the index set along `axis`, as used by the divided-difference
    /// passes.
    pub fn lines(&self, axis: usize) -> &AxisLines {
        &self.lines[axis]
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// Family shared by all axes, or `Custom` when they differ.
    pub fn family(&self) -> NodeFamily {
        let f = self.axes[0].family();
        if self.axes.iter().all(|a| a.family() == f) {
            f
        } else {
            NodeFamily::Custom
        }
    }

    /// The node at canonical position `pos`.
    pub fn node(&self, pos: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(pos, &mut out);
        out
    }

    pub fn node_into(&self, pos: usize, out: &mut [f64]) {
        for ((o, &a), axis) in out.iter_mut().zip(self.set.get(pos)).zip(&self.axes) {
            *o = axis[a];
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|pos| self.node(pos))
    }
}

/// Assembles `P_A = { (p_{a_1,1}, ..., p_{a_m,m}) : alpha in A }`.
pub fn build_grid(set: MultiIndexSet, axes: Vec<Nodes1D>) -> Result<Arc<UnisolventGrid>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if axes.len() != set.dim() {
        return Err(Error::AxisCount { expected: set.dim(), got: axes.len() });
    }
    set.require_downward_closed()?;
    for (axis, nodes) in axes.iter().enumerate() {
        let needed = set.max_exponent(axis)? + 1;
        if nodes.len() < needed {
            return Err(Error::AxisTooShort { axis, needed, got: nodes.len() });
        }
        // Nodes1D already guarantees this; re-checked for hand-assembled axes.
        check_points(nodes.points())?;
    }
    let lines = (0..set.dim()).map(|axis| set.axis_lines(axis)).collect();
    Ok(Arc::new(UnisolventGrid { set, axes, lines }))
}

/// Builds the grid over `A` with the same axis on every dimension.
pub fn build_uniform_grid(set: MultiIndexSet, axis: &Nodes1D) -> Result<Arc<UnisolventGrid>> {
    let m = set.dim();
    build_grid(set, vec![axis.clone(); m])
}

/// Leja-ordered Chebyshev-Lobatto points with `n + 1` entries.
pub fn lcl_axis(n: usize) -> Nodes1D {
    leja_order(&chebyshev_lobatto(n))
}

/// Basis used to assemble the oracle's generalised Vandermonde matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VandermondeBasis {
    /// `x^beta`.
    Monomial,
    /// `prod_i T_{beta_i}(x_i)`. Spans the same space on a downward-closed
    /// set and is far better conditioned.
    #[default]
    Chebyshev,
}

/// Desk-scale unisolvence oracle on a constructed grid.
pub fn vandermonde_unisolvence_check(grid: &UnisolventGrid) -> Result<bool> {
    let nodes: Vec<Vec<f64>> = grid.nodes().collect();
    unisolvence_check_nodes(grid.index_set(), &nodes, VandermondeBasis::default(), DEFAULT_ORACLE_CAP)
}

/// Unisolvence oracle on raw node coordinates, one row per index of `set`.
///
/// Builds `V[alpha, beta] = phi_beta(x_alpha)` and reports whether the
/// smallest singular value exceeds [`UNISOLVENCE_RCOND`] times the largest.
pub fn unisolvence_check_nodes(
    set: &MultiIndexSet,
    nodes: &[Vec<f64>],
    basis: VandermondeBasis,
    cap: usize,
) -> Result<bool> {
    let n = set.len();
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    if nodes.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: nodes.len() });
    }
    let m = set.dim();
    let max_deg = (0..m).map(|i| set.max_exponent(i)).collect::<Result<Vec<_>>>()?;
    let v = DMatrix::from_fn(n, n, |row, col| {
        let x = &nodes[row];
        let beta = set.get(col);
        (0..m).map(|i| basis_value(basis, beta[i], x[i], max_deg[i])).product::<f64>()
    });
    let sv = v.singular_values();
    let largest = sv.max();
    let smallest = sv.min();
    Ok(largest > 0.0 && smallest > UNISOLVENCE_RCOND * largest)
}

fn basis_value(basis: VandermondeBasis, degree: usize, x: f64, _max: usize) -> f64 {
    match basis {
        VandermondeBasis::Monomial => x.powi(degree as i32),
        VandermondeBasis::Chebyshev => {
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
    }
}

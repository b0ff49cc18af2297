//! Downward-closed multi-index sets and the l_p-degree families.
//!
//! Every set is stored in the canonical lexicographic order, which compares
//! the *last* entry first: `(5,3,1) < (1,0,3) < (1,1,3)`. The first entry
//! therefore varies fastest, so lines along axis 0 are contiguous. All
//! coefficient vectors in this crate are indexed positionally against this
//! order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusion slack for the floating-point membership test of general `p`.
const REAL_P_SLACK: f64 = 1e-10;

/// Compare two exponent vectors in the canonical order (last entry most significant).
#[inline]
pub fn lex_cmp(a: &[usize], b: &[usize]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev()).then(a.len().cmp(&b.len()))
}

/// An exponent vector `(a_1, ..., a_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<usize> {
        self.0
    }

    pub fn l1(&self) -> usize {
        self.0.iter().sum()
    }

    /// `self <= other` componentwise.
    pub fn is_below(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The index obtained by replacing entry `axis` with `j`, where
    /// `j < self[axis]`. Axes are 0-based.
    pub fn back_neighbor(&self, axis: usize, j: usize) -> Result<MultiIndex> {
        let dim = self.dim();
        let bound = *self.0.get(axis).ok_or(Error::AxisOutOfRange { axis, dim })?;
        if j >= bound {
            return Err(Error::BackNeighbor { axis, j, bound });
        }
        let mut entries = self.0.clone();
        entries[axis] = j;
        Ok(MultiIndex(entries))
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(entries: &[usize]) -> Self {
        MultiIndex(entries.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// The `p` in `||alpha||_p <= n`.
///
/// `One`, `Two` and `Inf` are decided in exact integer arithmetic; `Real`
/// is a floating-point convenience path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpDegree {
    One,
    Two,
    Inf,
    Real(f64),
}

impl LpDegree {
    /// Normalises `1.0`, `2.0` and `+inf` onto the exact integer paths.
    pub fn from_f64(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidDegreeSelector(p.to_string()));
        }
        Ok(if p == 1.0 {
            LpDegree::One
        } else if p == 2.0 {
            LpDegree::Two
        } else if p.is_infinite() {
            LpDegree::Inf
        } else {
            LpDegree::Real(p)
        })
    }

    pub fn value(&self) -> f64 {
        match *self {
            LpDegree::One => 1.0,
            LpDegree::Two => 2.0,
            LpDegree::Inf => f64::INFINITY,
            LpDegree::Real(p) => p,
        }
    }

    fn admits(&self, alpha: &[usize], n: usize) -> bool {
        match *self {
            LpDegree::One => alpha.iter().sum::<usize>() <= n,
            LpDegree::Two => {
                let n = n as u128;
                alpha.iter().map(|&a| (a as u128) * (a as u128)).sum::<u128>() <= n * n
            }
            LpDegree::Inf => alpha.iter().all(|&a| a <= n),
            LpDegree::Real(p) => {
                let lhs: f64 = alpha.iter().map(|&a| (a as f64).powf(p)).sum();
                lhs <= (n as f64).powf(p) + REAL_P_SLACK
            }
        }
    }
}

impl fmt::Display for LpDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpDegree::One => write!(f, "1"),
            LpDegree::Two => write!(f, "2"),
            LpDegree::Inf => write!(f, "inf"),
            LpDegree::Real(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for LpDegree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(LpDegree::Inf),
            _ => {
                let p: f64 = t.parse().map_err(|_| Error::InvalidDegreeSelector(s.to_string()))?;
                if !p.is_finite() {
                    return Err(Error::InvalidDegreeSelector(s.to_string()));
                }
                LpDegree::from_f64(p)
            }
        }
    }
}

impl Serialize for LpDegree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LpDegree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Records that a set was generated as `A_{m,n,p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpTag {
    pub m: usize,
    pub n: usize,
    pub p: LpDegree,
}

/// A lexicographically sorted set of distinct multi-indices of one dimension.
///
/// Entries are stored flattened, `dim` values per index.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexSet {
    dim: usize,
    entries: Vec<usize>,
    provenance: Option<LpTag>,
}

impl MultiIndexSet {
    /// Sorts and deduplicates `indices`. Downward closure is not required
    /// here; see [`MultiIndexSet::is_downward_closed`].
    pub fn from_indices<I, V>(dim: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[usize]>,
    {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for idx in indices {
            let idx = idx.as_ref();
            if idx.len() != dim {
                return Err(Error::IndexLength(idx.to_vec(), idx.len(), dim));
            }
            rows.push(idx.to_vec());
        }
        rows.sort_by(|a, b| lex_cmp(a, b));
        rows.dedup();
        Ok(MultiIndexSet { dim, entries: rows.concat(), provenance: None })
    }

    /// `A_{m,n,p} = { alpha in N^m : ||alpha||_p <= n }`, generated directly in
    /// canonical order.
    pub fn lp_ball(m: usize, n: usize, p: LpDegree) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if let LpDegree::Real(v) = p {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidDegreeSelector(v.to_string()));
            }
        }
        let mut entries = Vec::new();
        let mut alpha = vec![0usize; m];
        fill_lp(&mut alpha, m - 1, n, p, &mut entries);
        Ok(MultiIndexSet { dim: m, entries, provenance: Some(LpTag { m, n, p }) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Attaches an `l_p`-ball tag after checking that the set is that ball.
    pub fn with_provenance(mut self, tag: LpTag) -> Result<Self> {
        let ball = Self::lp_ball(tag.m, tag.n, tag.p)?;
        if ball.dim != self.dim || ball.entries != self.entries {
            return Err(Error::InvalidParameter(format!(
                "index set is not A_{{{},{},{}}}",
                tag.m, tag.n, tag.p
            )));
        }
        self.provenance = Some(tag);
        Ok(self)
    }

    pub fn provenance(&self) -> Option<LpTag> {
        self.provenance
    }

    /// The index at canonical position `pos`.
    #[inline]
    pub fn get(&self, pos: usize) -> &[usize] {
        &self.entries[pos * self.dim..(pos + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.entries.chunks_exact(self.dim)
    }

    pub fn position(&self, alpha: &[usize]) -> Option<usize> {
        if alpha.len() != self.dim {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match lex_cmp(self.get(mid), alpha) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, alpha: &[usize]) -> bool {
        self.position(alpha).is_some()
    }

    /// `max_{alpha in A} alpha_axis`.
    pub fn max_exponent(&self, axis: usize) -> Result<usize> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        self.iter().map(|a| a[axis]).max().ok_or(Error::EmptySet)
    }

    /// Checks closure through immediate predecessors `alpha - e_i`, which
    /// is equivalent to checking every componentwise-smaller index.
    pub fn is_downward_closed(&self) -> bool {
        self.first_gap().is_none()
    }

    pub(crate) fn first_gap(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut probe = vec![0usize; self.dim];
        for alpha in self.iter() {
            probe.copy_from_slice(alpha);
            for i in 0..self.dim {
                if alpha[i] > 0 {
                    probe[i] -= 1;
                    if !self.contains(&probe) {
                        return Some((alpha.to_vec(), probe.clone()));
                    }
                    probe[i] += 1;
                }
            }
        }
        None
    }

    pub fn require_downward_closed(&self) -> Result<()> {
        match self.first_gap() {
            None => Ok(()),
            Some((index, missing)) => Err(Error::NotDownwardClosed { index, missing }),
        }
    }

    pub fn to_indices(&self) -> Vec<MultiIndex> {
        self.iter().map(MultiIndex::from).collect()
    }

    /// Chains of positions along `axis`: each line holds the positions of
    /// `beta, beta + e_axis, beta + 2 e_axis, ...` for one `beta` with
    /// `beta_axis = 0`. Lines of length one are omitted.
    ///
    /// Requires a downward-closed set.
    pub fn axis_lines(&self, axis: usize) -> AxisLines {
        let dim = self.dim;
        let len = self.len();
        let none = usize::MAX;
        let mut next = vec![none; len];

        // Within a block of equal (alpha_{axis+1}, ..., alpha_m), the groups of
        // equal alpha_axis are contiguous, ascending, and each group's lower
        // tuples are a subset of the previous group's. A merge walk links
        // matching tuples.
        let mut block_start = 0;
        while block_start < len {
            let head = &self.get(block_start)[axis + 1..];
            let mut block_end = block_start + 1;
            while block_end < len && &self.get(block_end)[axis + 1..] == head {
                block_end += 1;
            }
            let mut prev: Option<(usize, usize)> = None;
            let mut g = block_start;
            while g < block_end {
                let k = self.get(g)[axis];
                let mut g_end = g + 1;
                while g_end < block_end && self.get(g_end)[axis] == k {
                    g_end += 1;
                }
                if let Some((ps, pe)) = prev {
                    let mut i = ps;
                    for pos in g..g_end {
                        let low = &self.get(pos)[..axis];
                        while i < pe && lex_cmp(&self.get(i)[..axis], low) == Ordering::Less {
                            i += 1;
                        }
                        if i < pe && &self.get(i)[..axis] == low {
                            next[i] = pos;
                        }
                    }
                }
                prev = Some((g, g_end));
                g = g_end;
            }
            block_start = block_end;
        }

        let mut positions = Vec::new();
        let mut offsets = vec![0];
        for start in 0..len {
            if self.entries[start * dim + axis] != 0 || next[start] == none {
                continue;
            }
            let mut pos = start;
            loop {
                positions.push(pos);
                if next[pos] == none {
                    break;
                }
                pos = next[pos];
            }
            offsets.push(positions.len());
        }
        AxisLines { axis, positions, offsets }
    }
}

/// Lines of one axis, see [`MultiIndexSet::axis_lines`].
#[derive(Clone, Debug)]
pub struct AxisLines {
    axis: usize,
    positions: Vec<usize>,
    offsets: Vec<usize>,
}

impl AxisLines {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.offsets.windows(2).map(|w| &self.positions[w[0]..w[1]])
    }
}

fn fill_lp(alpha: &mut [usize], d: usize, n: usize, p: LpDegree, out: &mut Vec<usize>) {
    // Outer loops over the most significant (last) entry keep the output sorted.
    let mut v = 0;
    loop {
        alpha[d] = v;
        if !p.admits(alpha, n) {
            break;
        }
        if d == 0 {
            out.extend_from_slice(alpha);
        } else {
            fill_lp(alpha, d - 1, n, p, out);
        }
        v += 1;
    }
    alpha[d] = 0;
}

/// Free-function form of [`MultiIndexSet::lp_ball`].
pub fn make_lp_set(m: usize, n: usize, p: LpDegree) -> Result<MultiIndexSet> {
    MultiIndexSet::lp_ball(m, n, p)
}

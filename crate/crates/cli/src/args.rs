use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvinterp::analysis::BenchmarkFunction;
use mvinterp::{LpDegree, NodeFamily};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "mvinterp", version, about = "Multivariate Newton interpolation on non-tensorial grids")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of random (or, in 1D, equispaced) sample points.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,

    /// Output path. Without it the main output goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a grid and write its nodes.
    Nodes(GridArgs),
    /// Interpolate sample values or a builtin function into a polynomial bundle.
    Interpolate(InterpolateArgs),
    /// Evaluate a bundle, or one of its partial derivatives, at query points.
    Eval(EvalArgs),
    /// Measure interpolation errors over a degree range and fit a geometric rate.
    Convergence(ConvergenceArgs),
    /// Estimate Lebesgue constants over a degree sweep.
    Lebesgue(LebesgueArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Leja-ordered Chebyshev-Lobatto points.
    Lcl,
    /// Leja points on [-1, 1].
    Leja,
}

impl From<FamilyArg> for NodeFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Lcl => NodeFamily::LejaOrderedChebyshevLobatto,
            FamilyArg::Leja => NodeFamily::Leja,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct GridArgs {
    /// Spatial dimension.
    #[arg(short = 'm', long = "dim")]
    pub m: usize,

    /// Polynomial degree.
    #[arg(short = 'n', long = "degree")]
    pub n: usize,

    /// l_p degree selector: 1, 2, inf or a positive decimal.
    #[arg(short = 'p', long = "lp", default_value = "2", value_parser = parse_lp)]
    pub p: LpDegree,

    #[arg(long, value_enum, default_value_t = FamilyArg::Lcl)]
    pub family: FamilyArg,

    /// Candidate grid size for Leja points.
    #[arg(long, default_value_t = mvinterp::analysis::DEFAULT_LEJA_RESOLUTION)]
    pub leja_resolution: usize,
}

#[derive(Clone, Debug, Args)]
pub struct FunctionArgs {
    /// Builtin benchmark function.
    #[arg(long = "function", value_enum)]
    pub function: Option<FunctionId>,

    #[arg(long, default_value_t = 1.0)]
    pub r: f64,

    #[arg(long, default_value_t = 1.0)]
    pub s: f64,

    #[arg(long, default_value_t = 1.25)]
    pub a: f64,

    #[arg(long, default_value_t = 1.0)]
    pub k1: f64,

    #[arg(long, default_value_t = 1.0)]
    pub k2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FunctionId {
    Runge,
    F1,
    F3,
    F4,
    F5,
}

impl FunctionArgs {
    pub fn build(&self, m: usize) -> Result<Option<BenchmarkFunction>, CliError> {
        let Some(id) = self.function else { return Ok(None) };
        let f = match id {
            FunctionId::Runge => BenchmarkFunction::runge(m, self.r, self.s)?,
            FunctionId::F1 => {
                if m != 2 {
                    return Err(CliError::usage(format!("f1 is bivariate, got -m {m}")));
                }
                BenchmarkFunction::f1(self.r)?
            }
            FunctionId::F3 => BenchmarkFunction::f3(m)?,
            FunctionId::F4 => BenchmarkFunction::f4(m, self.a)?,
            FunctionId::F5 => BenchmarkFunction::f5(m, self.k1, self.k2)?,
        };
        Ok(Some(f))
    }
}

#[derive(Clone, Debug, Args)]
pub struct InterpolateArgs {
    #[command(flatten)]
    pub grid: GridArgs,

    #[command(flatten)]
    pub function: FunctionArgs,

    /// Node values in grid order, one per row (the last column is used).
    #[arg(long, conflicts_with = "function")]
    pub values: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct EvalArgs {
    /// Polynomial bundle directory.
    #[arg(long)]
    pub bundle: PathBuf,

    /// CSV of query points, one per row.
    #[arg(long)]
    pub points: PathBuf,

    /// Derivative order per coordinate, e.g. `1,0`.
    #[arg(long, value_parser = parse_order)]
    pub order: Option<IndexList>,
}

#[derive(Clone, Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(short = 'm', long = "dim")]
    pub m: usize,

    #[arg(short = 'p', long = "lp", default_value = "2", value_parser = parse_lp)]
    pub p: LpDegree,

    #[arg(long, value_enum, default_value_t = FamilyArg::Lcl)]
    pub family: FamilyArg,

    /// Degrees as `a..b`, `a..b:step` or a comma list.
    #[arg(long, value_parser = parse_degrees)]
    pub degrees: IndexList,

    #[command(flatten)]
    pub function: FunctionArgs,

    /// Derivative order per coordinate, e.g. `1,0,0`.
    #[arg(long, value_parser = parse_order)]
    pub order: Option<IndexList>,

    /// Where to write the fit JSON. Defaults to `<out>.fit.json` when `--out` is set.
    #[arg(long)]
    pub fit_out: Option<PathBuf>,

    #[arg(long, default_value_t = mvinterp::analysis::DEFAULT_LEJA_RESOLUTION)]
    pub leja_resolution: usize,
}

#[derive(Clone, Debug, Args)]
pub struct LebesgueArgs {
    #[arg(short = 'm', long = "dim")]
    pub m: usize,

    /// One or more degree selectors, comma separated.
    #[arg(short = 'p', long = "lp", default_value = "2", value_delimiter = ',', value_parser = parse_lp)]
    pub p: Vec<LpDegree>,

    #[arg(long, value_enum, default_value_t = FamilyArg::Lcl)]
    pub family: FamilyArg,

    #[arg(long, value_parser = parse_degrees)]
    pub degrees: IndexList,

    /// Derivative order of the Lebesgue constant.
    #[arg(short = 'k', long, default_value_t = 0)]
    pub k: usize,

    /// Largest |A| that is still estimated.
    #[arg(long, default_value_t = mvinterp::analysis::DEFAULT_LEBESGUE_CAP)]
    pub cap: usize,

    #[arg(long, default_value_t = mvinterp::analysis::DEFAULT_LEJA_RESOLUTION)]
    pub leja_resolution: usize,
}

/// A comma list or range of non-negative integers, parsed as one argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

impl std::ops::Deref for IndexList {
    type Target = Vec<usize>;

    fn deref(&self) -> &Vec<usize> {
        &self.0
    }
}

fn parse_lp(s: &str) -> Result<LpDegree, String> {
    s.parse::<LpDegree>().map_err(|e| e.to_string())
}

pub fn parse_order(s: &str) -> Result<IndexList, String> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"))).collect::<Result<_, _>>().map(IndexList)
}

/// `a..b` (inclusive), `a..b:step`, a comma list, or a single degree.
pub fn parse_degrees(s: &str) -> Result<IndexList, String> {
    parse_degree_list(s).map(IndexList)
}

fn parse_degree_list(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (num(hi)?, num(step)?),
            None => (num(rest)?, 1),
        };
        let lo = num(lo)?;
        if step == 0 {
            return Err("step must be positive".into());
        }
        if hi < lo {
            return Err(format!("empty range {lo}..{hi}"));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',').map(num).collect()
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use mvinterp::analysis::{
    convergence_run, fit_rate, lebesgue_estimate_with_cap, optimal_rho, ConvergenceConfig,
};
use mvinterp::io::{self, LebesgueRow};
use mvinterp::{
    build_uniform_grid, eval_derivative, interpolate, lcl_axis, leja_points, make_lp_set,
    LagrangeCoefficients, LpDegree, NodeFamily, Nodes1D, UnisolventGrid,
};
use serde::Serialize;

use crate::args::{Cli, Command, ConvergenceArgs, EvalArgs, FamilyArg, Format, GridArgs, InterpolateArgs, LebesgueArgs};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Nodes(args) => nodes(cli, args),
        Command::Interpolate(args) => interpolate_cmd(cli, args),
        Command::Eval(args) => eval(cli, args),
        Command::Convergence(args) => convergence(cli, args),
        Command::Lebesgue(args) => lebesgue(cli, args),
    }
}

fn axis_for(family: FamilyArg, n: usize, leja_resolution: usize) -> Result<Nodes1D> {
    Ok(match family {
        FamilyArg::Lcl => lcl_axis(n),
        FamilyArg::Leja => leja_points(n, leja_resolution.max(10 * (n + 1)))?,
    })
}

fn grid_for(args: &GridArgs) -> Result<Arc<UnisolventGrid>> {
    let set = make_lp_set(args.m, args.n, args.p)?;
    let axis = axis_for(args.family, args.n, args.leja_resolution)?;
    Ok(build_uniform_grid(set, &axis)?)
}

/// Writes `bytes` to `--out`, or to stdout when it is absent.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => Ok(io::write_atomic(path, bytes)?),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Lib(mvinterp::Error::Io { path: PathBuf::from("<stdout>"), source: e }))
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("plain data serialises");
    bytes.push(b'\n');
    bytes
}

/// Summary text goes to stdout when the data went to a file, else stderr.
fn summary(cli: &Cli, text: &str) {
    if cli.out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(io::fmt_f64).collect::<Vec<_>>().join(", ")
}

#[derive(Serialize)]
struct GridJson<'a> {
    m: usize,
    num_coeffs: usize,
    node_family: NodeFamily,
    axes: Vec<&'a [f64]>,
    indices: Vec<&'a [usize]>,
    nodes: Vec<Vec<f64>>,
}

fn nodes(cli: &Cli, args: &GridArgs) -> Result<()> {
    let grid = grid_for(args)?;
    let path = cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let bytes = match cli.format {
        Format::Csv => io::grid_csv(&grid, &path)?,
        Format::Json => json_bytes(&GridJson {
            m: grid.dim(),
            num_coeffs: grid.len(),
            node_family: grid.family(),
            axes: grid.axes().iter().map(|a| a.points()).collect(),
            indices: grid.index_set().iter().collect(),
            nodes: grid.nodes().collect(),
        }),
    };
    emit(cli.out.as_deref(), &bytes)?;
    let axis = &grid.axes()[0];
    summary(cli, &format!("|A| = {}\naxis = [{}]", grid.len(), join(axis.points().iter().copied())));
    Ok(())
}

fn interpolate_cmd(cli: &Cli, args: &InterpolateArgs) -> Result<()> {
    let out = cli.out.as_deref().ok_or_else(|| CliError::usage("interpolate needs --out for the bundle directory"))?;
    let function = args.function.build(args.grid.m)?;
    if function.is_none() && args.values.is_none() {
        return Err(CliError::usage("give either --function or --values"));
    }
    let grid = grid_for(&args.grid)?;
    let poly = match (&function, &args.values) {
        (Some(f), _) => interpolate(|x| f.eval(x), &grid)?,
        (None, Some(path)) => {
            let values = io::read_values(path, &grid)?;
            mvinterp::divided_differences(&LagrangeCoefficients::new(grid.clone(), values)?)?
        }
        (None, None) => unreachable!(),
    };
    io::write_bundle(&poly, out)?;
    let nonzero = poly.coeffs().iter().filter(|c| **c != 0.0).count();
    println!("|A| = {}\nnonzero coefficients = {nonzero}", grid.len());
    Ok(())
}

#[derive(Serialize)]
struct EvalRow<'a> {
    x: &'a [f64],
    value: f64,
}

fn eval(cli: &Cli, args: &EvalArgs) -> Result<()> {
    let poly = io::read_bundle(&args.bundle)?;
    let m = poly.dim();
    let order = args.order.as_ref().map(|o| o.0.clone()).unwrap_or_else(|| vec![0; m]);
    if order.len() != m {
        return Err(CliError::usage(format!("--order has {} entries, the bundle has dimension {m}", order.len())));
    }
    let points = io::read_points(&args.points, m)?;
    let outside = points.iter().filter(|x| x.iter().any(|v| v.abs() > 1.0)).count();
    if outside > 0 {
        eprintln!("warning: {outside} point(s) lie outside [-1, 1]^{m}; the polynomial is extrapolated");
    }
    let values = points.iter().map(|x| eval_derivative(&poly, &order, x)).collect::<mvinterp::Result<Vec<f64>>>()?;
    let path = cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let bytes = match cli.format {
        Format::Csv => io::values_csv(&points, &values, m, &path)?,
        Format::Json => json_bytes(&points.iter().zip(&values).map(|(x, &value)| EvalRow { x, value }).collect::<Vec<_>>()),
    };
    emit(cli.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct RecordJson<'a> {
    function: &'a str,
    params: &'a [(String, f64)],
    m: usize,
    p: LpDegree,
    family: NodeFamily,
    samples: usize,
    seed: u64,
    deriv_order: &'a [usize],
    rows: Vec<(usize, usize, f64)>,
}

fn convergence(cli: &Cli, args: &ConvergenceArgs) -> Result<()> {
    let f = args.function.build(args.m)?.ok_or_else(|| CliError::usage("convergence needs --function"))?;
    if args.degrees.len() < 4 {
        return Err(CliError::usage(format!("a rate fit needs at least 4 degrees, got {}", args.degrees.len())));
    }
    let mut config = ConvergenceConfig::new(args.p, args.family.into(), args.degrees.0.clone())
        .samples(cli.samples)
        .seed(cli.seed);
    if let Some(order) = &args.order {
        config = config.deriv_order(order.0.clone());
    }
    config.leja_resolution = args.leja_resolution;
    let record = convergence_run(&f, &config)?;
    let fit = fit_rate(&record)?;

    let path = cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let bytes = match cli.format {
        Format::Csv => io::record_csv(&record, &path)?,
        Format::Json => {
            let meta = &record.meta;
            json_bytes(&RecordJson {
                function: &meta.function,
                params: &meta.params,
                m: meta.m,
                p: meta.p,
                family: meta.family,
                samples: meta.num_samples,
                seed: meta.seed,
                deriv_order: &meta.deriv_order,
                rows: record.rows.iter().map(|r| (r.degree, r.num_coeffs, r.error)).collect(),
            })
        }
    };
    let fit_path = args.fit_out.clone().or_else(|| {
        cli.out.as_ref().map(|out| {
            let mut name = out.file_stem().unwrap_or_default().to_os_string();
            name.push(".fit.json");
            out.with_file_name(name)
        })
    });
    if let Some(fit_path) = &fit_path {
        io::write_atomic(fit_path, &io::fit_json(&fit))?;
    }
    emit(cli.out.as_deref(), &bytes)?;

    let reference = match optimal_rho(&f, args.p) {
        Some(r) => io::fmt_f64(r),
        None => "unknown".into(),
    };
    summary(
        cli,
        &format!(
            "c = {}\nrho = {}\nr_squared = {}\nfit_range = {}..{}\nreference rho = {reference}",
            io::fmt_f64(fit.c),
            io::fmt_f64(fit.rho),
            io::fmt_f64(fit.r_squared),
            fit.fit_range.0,
            fit.fit_range.1
        ),
    );
    Ok(())
}

fn lebesgue(cli: &Cli, args: &LebesgueArgs) -> Result<()> {
    if args.degrees.is_empty() {
        return Err(CliError::usage("--degrees is empty"));
    }
    if cli.samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let top = *args.degrees.iter().max().unwrap();
    let leja = match args.family {
        FamilyArg::Leja => Some(leja_points(top, args.leja_resolution.max(10 * (top + 1)))?),
        FamilyArg::Lcl => None,
    };
    let mut rows = Vec::new();
    for &p in &args.p {
        for &n in args.degrees.iter() {
            let set = make_lp_set(args.m, n, p)?;
            if set.len() > args.cap {
                eprintln!("warning: skipping m={} p={p} n={n}: |A| = {} exceeds the cap {}", args.m, set.len(), args.cap);
                continue;
            }
            let axis = match &leja {
                Some(points) => points.truncated(n + 1)?,
                None => lcl_axis(n),
            };
            let grid = build_uniform_grid(set, &axis)?;
            let lambda = lebesgue_estimate_with_cap(&grid, cli.samples, cli.seed, args.k, args.cap)?;
            rows.push(LebesgueRow { m: args.m, p, n, num_coeffs: grid.len(), lambda });
        }
    }
    let path = cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let bytes = match cli.format {
        Format::Csv => io::lebesgue_csv(&rows, &path)?,
        Format::Json => json_bytes(&rows),
    };
    emit(cli.out.as_deref(), &bytes)?;
    summary(cli, &format!("{} row(s)", rows.len()));
    Ok(())
}

//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mvinterp::analysis::{
    brutman_reference, convergence_run, fit_rate, lebesgue_estimate, uniform_points, BenchmarkFunction,
    ConvergenceConfig, RateFit,
};
use mvinterp::grid::NodeFamily;
use mvinterp::{
    build_uniform_grid, chebyshev_lobatto, divided_differences, eval_derivative, eval_iterative, eval_recursive,
    interpolate, lcl_axis, make_lp_set, vandermonde_unisolvence_check, LagrangeCoefficients, LpDegree,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const SAMPLES: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    if start.elapsed() > limit {
        return Err(format!("took {secs:.1} s, limit {} s", limit.as_secs()));
    }
    Ok(secs)
}

fn lp_choice(rng: &mut ChaCha8Rng) -> LpDegree {
    [LpDegree::One, LpDegree::Two, LpDegree::Inf][rng.gen_range(0..3)]
}

fn c1_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let (m, n, p) = (rng.gen_range(1..=4), rng.gen_range(0..=8), lp_choice(&mut rng));
        let set = make_lp_set(m, n, p).unwrap();
        let f = common::ChebyshevPoly::random(&mut rng, &set);
        let grid = build_uniform_grid(set, &lcl_axis(n)).unwrap();
        let poly = interpolate(|x| f.eval(x), &grid).unwrap();
        let points = uniform_points(m, 1000, SEED + case);
        let want: Vec<f64> = points.chunks(m).map(|x| f.eval(x)).collect();
        let got: Vec<f64> = points.chunks(m).map(|x| eval_recursive(&poly, x)).collect();
        worst = worst.max(common::rel_diff(&got, &want));
    }
    let secs = within(Duration::from_secs(60), start)?;
    check(worst <= 1e-9, format!("max relative error {worst:.2e} over 50 cases ({secs:.1} s)"))
}

fn c2_collocation_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let m = rng.gen_range(1..=4);
        let set = common::random_downward_closed(&mut rng, m, 8, 3, 60);
        let grid = common::random_grid(&mut rng, set, false);
        let values: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let poly = divided_differences(&LagrangeCoefficients::new(grid.clone(), values.clone()).unwrap()).unwrap();
        worst = worst.max(common::rel_diff(poly.coeffs(), &common::collocation_solve(&grid, &values)));
    }
    let secs = within(Duration::from_secs(60), start)?;
    check(worst <= 1e-9, format!("max relative deviation {worst:.2e} over 30 cases ({secs:.1} s)"))
}

fn c3_unisolvence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut passed = 0;
    let mut largest = 0;
    for _ in 0..30 {
        let m = rng.gen_range(1..=4);
        let set = common::random_downward_closed(&mut rng, m, 10, 4, 400);
        largest = largest.max(set.len());
        let grid = common::random_grid(&mut rng, set, false);
        passed += vandermonde_unisolvence_check(&grid).unwrap() as usize;
    }
    let secs = within(Duration::from_secs(120), start)?;
    check(passed == 30, format!("{passed}/30 unisolvent, largest |A| = {largest} ({secs:.1} s)"))
}

fn rate(f: &BenchmarkFunction, p: LpDegree, degrees: Vec<usize>, order: Option<Vec<usize>>) -> (RateFit, f64) {
    let start = Instant::now();
    let mut config =
        ConvergenceConfig::new(p, NodeFamily::LejaOrderedChebyshevLobatto, degrees).samples(SAMPLES).seed(SEED);
    if let Some(order) = order {
        config = config.deriv_order(order);
    }
    let fit = fit_rate(&convergence_run(f, &config).unwrap()).unwrap();
    (fit, start.elapsed().as_secs_f64())
}

fn describe(fit: &RateFit, secs: f64) -> String {
    format!(
        "rho = {:.4}, R^2 = {:.4}, fit over {}..{} ({secs:.1} s)",
        fit.rho, fit.r_squared, fit.fit_range.0, fit.fit_range.1
    )
}

fn c4_runge_m4() -> Outcome {
    let f = BenchmarkFunction::runge(4, 1.0, 1.0).unwrap();
    let (fit, secs) = rate(&f, LpDegree::Two, (4..=24).collect(), None);
    check((2.25..=2.45).contains(&fit.rho) && fit.r_squared >= 0.98, describe(&fit, secs))
}

fn c5_runge_m3() -> Outcome {
    let f = BenchmarkFunction::runge(3, 10f64.sqrt(), 1.0).unwrap();
    let (fit, secs) = rate(&f, LpDegree::Two, (6..=60).collect(), None);
    check((1.29..=1.40).contains(&fit.rho), describe(&fit, secs))
}

fn c6_shifted_runge() -> Outcome {
    let f = BenchmarkFunction::f4(2, 1.25).unwrap();
    let start = Instant::now();
    let (two, _) = rate(&f, LpDegree::Two, (4..=40).collect(), None);
    let (inf, _) = rate(&f, LpDegree::Inf, (4..=40).collect(), None);
    let secs = within(Duration::from_secs(60), start)?;
    check(
        (1.95..=2.12).contains(&two.rho) && (2.05..=2.22).contains(&inf.rho) && two.rho < inf.rho,
        format!("rho(p=2) = {:.4}, rho(p=inf) = {:.4} ({secs:.1} s)", two.rho, inf.rho),
    )
}

fn c7_derivative_rate() -> Outcome {
    let f = BenchmarkFunction::runge(3, 3.0, 1.0).unwrap();
    let (fit, secs) = rate(&f, LpDegree::Two, (6..=60).collect(), Some(vec![1, 0, 0]));
    check((1.27..=1.40).contains(&fit.rho), describe(&fit, secs))
}

fn c8_lebesgue() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [4, 8, 16, 32] {
        let grid = build_uniform_grid(make_lp_set(1, n, LpDegree::Two).unwrap(), &lcl_axis(n)).unwrap();
        let lambda = lebesgue_estimate(&grid, 100_001, SEED, 0).unwrap();
        let reference = brutman_reference(n);
        let dev = lambda / reference - 1.0;
        ok &= dev.abs() <= 0.05;
        parts.push(format!("n={n}: {lambda:.4} vs {reference:.4} ({:+.1}%)", 100.0 * dev));
    }

    let degrees = [2, 4, 8, 12, 16];
    let mut curves = Vec::new();
    for p in [LpDegree::One, LpDegree::Two, LpDegree::Inf] {
        let curve: Vec<f64> = degrees
            .iter()
            .map(|&n| {
                let grid = build_uniform_grid(make_lp_set(2, n, p).unwrap(), &lcl_axis(n)).unwrap();
                lebesgue_estimate(&grid, SAMPLES, SEED, 0).unwrap()
            })
            .collect();
        curves.push((p, curve));
    }
    let growth = |c: &[f64]| c[c.len() - 1] / c[0];
    let inf = &curves[2].1;
    let slowest = curves[..2].iter().all(|(_, c)| growth(inf) < growth(c) && inf[inf.len() - 1] < c[c.len() - 1]);
    ok &= slowest;
    for (p, c) in &curves {
        parts.push(format!("m=2 p={p}: {:.2} -> {:.2}", c[0], c[c.len() - 1]));
    }
    let secs = within(Duration::from_secs(120), start)?;
    parts.push(format!("({secs:.1} s)"));
    check(ok, parts.join("; "))
}

fn c9_property_invariants() -> Outcome {
    let start = Instant::now();
    let case = (1usize..=3, 1usize..=8, 0usize..3, any::<u64>());
    let grid_of = |m: usize, n: usize, p: usize| {
        let p = [LpDegree::One, LpDegree::Two, LpDegree::Inf][p];
        build_uniform_grid(make_lp_set(m, n, p).unwrap(), &lcl_axis(n)).unwrap()
    };
    let smooth = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (1.0 + 0.5 * i as f64) * v).sum::<f64>().sin();

    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    runner
        .run(&case, |(m, n, p, seed)| {
            let poly = interpolate(smooth, &grid_of(m, n, p)).unwrap();
            let h = 1e-5;
            for x in uniform_points(m, 4, seed).chunks(m) {
                let x: Vec<f64> = x.iter().map(|v| 0.9 * v).collect();
                for j in 0..m {
                    let mut order = vec![0; m];
                    order[j] = 1;
                    let d = eval_derivative(&poly, &order, &x).unwrap();
                    let (mut up, mut down) = (x.clone(), x.clone());
                    up[j] += h;
                    down[j] -= h;
                    let fd = (eval_iterative(&poly, &up) - eval_iterative(&poly, &down)) / (2.0 * h);
                    prop_assert!((d - fd).abs() <= (1e-6 * d.abs()).max(1e-8), "{} vs {}", d, fd);
                }
            }
            Ok(())
        })
        .map_err(|e| format!("derivative vs finite differences: {e}"))?;

    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    runner
        .run(&case, |(m, n, p, seed)| {
            let poly = interpolate(smooth, &grid_of(m + 1, n, p)).unwrap();
            for x in uniform_points(m + 1, 20, seed).chunks(m + 1) {
                let (r, i) = (eval_recursive(&poly, x), eval_iterative(&poly, x));
                prop_assert!((r - i).abs() <= 1e-13 * (1.0 + r.abs()), "{} vs {}", r, i);
            }
            Ok(())
        })
        .map_err(|e| format!("recursive vs iterative: {e}"))?;
    let secs = within(Duration::from_secs(60), start)?;
    Ok(format!("2 x 100 cases ({secs:.1} s)"))
}

fn timed_divided_differences(m: usize, n: usize, p: LpDegree) -> (usize, f64) {
    let axis = if m == 1 { chebyshev_lobatto(n) } else { lcl_axis(n) };
    let grid = build_uniform_grid(make_lp_set(m, n, p).unwrap(), &axis).unwrap();
    let values = LagrangeCoefficients::new(grid.clone(), vec![3.0; grid.len()]).unwrap();
    let best = (0..3)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(divided_differences(std::hint::black_box(&values)).unwrap());
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min);
    (grid.len(), best)
}

fn c10_quadratic_scaling() -> Outcome {
    let (small, t_small) = timed_divided_differences(1, 20_000, LpDegree::Two);
    let (large, t_large) = timed_divided_differences(1, 40_000, LpDegree::Two);
    let ratio = t_large / t_small;
    let (small2, t2_small) = timed_divided_differences(2, 160, LpDegree::Two);
    let (large2, t2_large) = timed_divided_differences(2, 226, LpDegree::Two);
    check(
        (3.0..=5.5).contains(&ratio),
        format!(
            "m=1 |A| {small} -> {large}: {t_small:.3} s -> {t_large:.3} s, ratio {ratio:.2} \
             (m=2 |A| {small2} -> {large2}: ratio {:.2})",
            t2_large / t2_small
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("C1 exactness", c1_exactness),
        ("C2 collocation oracle", c2_collocation_oracle),
        ("C3 unisolvence", c3_unisolvence),
        ("C4 runge m=4 rate", c4_runge_m4),
        ("C5 runge m=3 rate", c5_runge_m3),
        ("C6 shifted runge rates", c6_shifted_runge),
        ("C7 derivative rate", c7_derivative_rate),
        ("C8 lebesgue", c8_lebesgue),
        ("C9 property invariants", c9_property_invariants),
        ("C10 quadratic scaling", c10_quadratic_scaling),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, criterion) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
}

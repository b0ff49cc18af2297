mod common;

use mvinterp::analysis::{
    brutman_reference, convergence_run, fit_rate, fit_rate_rows, lebesgue_estimate, BenchmarkFunction, ConvergenceConfig,
    FnTarget,
};
use mvinterp::grid::NodeFamily;
use mvinterp::io::{read_record_rows, record_csv, write_atomic};
use mvinterp::{build_uniform_grid, chebyshev_lobatto, lcl_axis, make_lp_set, LpDegree};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lebesgue_is_monotone_in_samples(m in 2usize..=3, n in 1usize..=5, seed in any::<u64>()) {
        let grid = build_uniform_grid(make_lp_set(m, n, LpDegree::Two).unwrap(), &lcl_axis(n)).unwrap();
        let mut last = 0.0;
        for samples in [50, 100, 200, 400] {
            let lambda = lebesgue_estimate(&grid, samples, seed, 0).unwrap();
            prop_assert!(lambda >= last);
            last = lambda;
        }
    }

    #[test]
    fn lebesgue_is_at_least_one(m in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = common::random_downward_closed(&mut rng, m, 6, 3, 300);
        let grid = common::random_grid(&mut rng, set, true);
        prop_assert!(lebesgue_estimate(&grid, 200, seed, 0).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn recovers_noiseless_geometric_rates(c in 0.01f64..100.0, rho in 1.05f64..4.0, start in 0usize..10) {
        let len = 12;
        let rows: Vec<(usize, f64)> = (start..start + len).map(|n| (n, c * rho.powi(-(n as i32)))).collect();
        let rows: Vec<(usize, f64)> = rows.into_iter().filter(|r| r.1 >= 1e-13).collect();
        prop_assume!(rows.len() >= 4);
        let fit = fit_rate_rows(&rows).unwrap();
        prop_assert!((fit.c - c).abs() <= 1e-10 * c.max(1.0), "c {} vs {}", fit.c, c);
        prop_assert!((fit.rho - rho).abs() <= 1e-10 * rho, "rho {} vs {}", fit.rho, rho);
        prop_assert!((fit.r_squared - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn tensor_lebesgue_grows_like_a_power_of_log() {
    for (m, degrees, samples) in [(1, vec![2, 4, 8, 16, 32], 4001), (2, vec![2, 4, 8, 16], 3000), (3, vec![2, 4, 6, 8], 600)] {
        let bound = |n: usize| ((n + 1) as f64).ln().powi(m as i32);
        let mut c = None;
        for n in degrees {
            let grid = build_uniform_grid(make_lp_set(m, n, LpDegree::Inf).unwrap(), &lcl_axis(n)).unwrap();
            let ratio = lebesgue_estimate(&grid, samples, 5, 0).unwrap() / bound(n);
            let c = *c.get_or_insert(ratio);
            assert!(ratio <= 1.05 * c, "m={m} n={n}: ratio {ratio} against fitted {c}");
        }
    }
}

#[test]
fn lebesgue_of_small_lobatto_sets() {
    let grid = build_uniform_grid(make_lp_set(1, 1, LpDegree::Two).unwrap(), &chebyshev_lobatto(1)).unwrap();
    assert!((lebesgue_estimate(&grid, 1001, 0, 0).unwrap() - 1.0).abs() < 1e-12);
    // Three Lobatto points: max of |x(x-1)|/2 + |1-x^2| + |x(x+1)|/2 is 5/4 at x = 1/2.
    let grid = build_uniform_grid(make_lp_set(1, 2, LpDegree::Two).unwrap(), &chebyshev_lobatto(2)).unwrap();
    assert!((lebesgue_estimate(&grid, 2001, 0, 0).unwrap() - 1.25).abs() < 1e-12);
    assert!((brutman_reference(4) - std::f64::consts::FRAC_2_PI * (5f64.ln() + 0.5772156649015329 + (8.0 / std::f64::consts::PI).ln())).abs() < 1e-15);
}

#[test]
fn polynomials_are_reproduced_by_convergence_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let set = make_lp_set(3, 6, LpDegree::One).unwrap();
    let f = common::ChebyshevPoly::random(&mut rng, &set);
    let target = FnTarget::new(3, |x: &[f64]| f.eval(x));
    let config = ConvergenceConfig::new(LpDegree::One, NodeFamily::LejaOrderedChebyshevLobatto, vec![6, 7, 8]).samples(500);
    let record = convergence_run(&target, &config).unwrap();
    assert!(record.rows.iter().all(|r| r.error <= 1e-9), "{:?}", record.rows);
}

#[test]
fn convergence_output_is_bitwise_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let f = BenchmarkFunction::runge(2, 2.0, 1.0).unwrap();
    let config = ConvergenceConfig::new(LpDegree::Two, NodeFamily::Leja, (2..=12).collect()).samples(300).seed(9);
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for path in &paths {
        let record = convergence_run(&f, &config).unwrap();
        write_atomic(path, &record_csv(&record, path).unwrap()).unwrap();
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let rows = read_record_rows(&paths[0]).unwrap();
    let record = convergence_run(&f, &config).unwrap();
    assert_eq!(rows.len(), record.rows.len());
    for (row, want) in rows.iter().zip(&record.rows) {
        assert_eq!((row.0, row.1, row.2.to_bits()), (want.degree, want.num_coeffs, want.error.to_bits()));
    }
    assert_ne!(convergence_run(&f, &config.clone().seed(10)).unwrap(), record);
}

#[test]
fn runge_rates_are_near_the_reference() {
    let f = BenchmarkFunction::runge(2, 2.0, 1.0).unwrap();
    let config = ConvergenceConfig::new(LpDegree::Two, NodeFamily::LejaOrderedChebyshevLobatto, (4..=24).collect()).samples(2000);
    let record = convergence_run(&f, &config).unwrap();
    let fit = fit_rate(&record).unwrap_or_else(|e| panic!("{e}: {:?}", record.rows));
    let reference = 0.5 + 1.25f64.sqrt();
    assert!((fit.rho / reference - 1.0).abs() < 0.1, "{} vs {}", fit.rho, reference);
}

#[test]
fn derivative_runs_reject_unsupported_targets() {
    let f = BenchmarkFunction::f4(2, 1.25).unwrap();
    let config = ConvergenceConfig::new(LpDegree::Two, NodeFamily::LejaOrderedChebyshevLobatto, vec![2, 3]).deriv_order(vec![1, 0]);
    assert!(convergence_run(&f, &config).is_err());
}

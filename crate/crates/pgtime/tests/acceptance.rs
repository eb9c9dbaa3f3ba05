//! Acceptance gate: one test per shipped criterion.  Each test prints its
//! per-case outcomes and fails if any case fails, so `cargo test --test
//! acceptance` yields exactly one pass/fail line per criterion.

use pgtime::mc::{self, McModel};
use pgtime::specfun::{bessel_i, ml2, ml3, wright_phi, SeriesControl};
use pgtime::timechange::TcPoissonParams;
use pgtime::levy::CpgParams;
use pgtime::verify::{suite_run, SuiteConfig};

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn grid_20() -> impl Iterator<Item = f64> {
    (0..20).map(|i| 600.0 * i as f64 / 19.0)
}

fn run_suite(name: &str) {
    let cfg = SuiteConfig::default();
    let report = suite_run(name, &cfg).expect("suite execution");
    for c in &report.cases {
        println!("[{}] {} — {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    assert!(report.passed, "suite {name} has failing cases (see output)");
}

#[test]
fn criterion_1_special_function_identities() {
    let ctl = SeriesControl::default();
    let mut worst = 0.0_f64;
    for z in grid_20() {
        worst = worst.max(rel_gap(ml2(1.0, 1.0, z, &ctl).unwrap(), z.exp()));
        let em1 = if z == 0.0 { 1.0 } else { z.exp_m1() / z };
        worst = worst.max(rel_gap(ml2(1.0, 2.0, z, &ctl).unwrap(), em1));
        for (rho, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)] {
            worst = worst.max(rel_gap(
                ml3(1.0, rho, delta, z, &ctl).unwrap(),
                ml2(rho, delta, z, &ctl).unwrap(),
            ));
        }
        worst = worst.max(rel_gap(ml3(2.0, 1.0, 2.0, z, &ctl).unwrap(), z.exp()));
        let root = 2.0 * z.sqrt();
        worst = worst.max(rel_gap(
            wright_phi(1.0, 1.0, z, &ctl).unwrap(),
            bessel_i(0, root, false, &ctl).unwrap(),
        ));
        worst = worst.max(rel_gap(
            wright_phi(1.0, 0.0, z, &ctl).unwrap(),
            z.sqrt() * bessel_i(1, root, false, &ctl).unwrap(),
        ));
    }
    println!("[pass] six identity families on 20-point grids, max rel gap {worst:.2e}");
    assert!(worst <= 1e-12, "max rel gap {worst:.2e}");
}

#[test]
fn criterion_2_normalization() {
    run_suite("normalization");
}

#[test]
fn criterion_3_consistency() {
    run_suite("consistency");
}

#[test]
fn criterion_4_governing_equations() {
    run_suite("ode");
}

#[test]
fn criterion_5_transform_identities() {
    run_suite("laplace-identity");
}

#[test]
fn criterion_6_monte_carlo_gof() {
    run_suite("mc-gof");
}

#[test]
fn criterion_7_moments_and_covariance() {
    run_suite("moments");
    run_suite("covariance");
}

#[test]
fn criterion_8_semigroup() {
    run_suite("semigroup");
}

#[test]
fn criterion_9_reproducibility() {
    let p = CpgParams::new(1.0, 1.0, 1.0).unwrap();
    let tc = TcPoissonParams::new(p, 1.0).unwrap();
    let model = McModel::TcPoisson(&tc);
    let draw = || {
        serde_json::to_string(&mc::sample_batch(&model, "nen", &[("lambda1", 1.0)], 1.0, 200_000, 42))
            .unwrap()
    };
    let pool = |k: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(draw)
    };
    let (one, four) = (pool(1), pool(4));
    assert_eq!(one, four, "sample batches differ across worker counts");
    assert_eq!(four, pool(4), "sample batches differ across runs");
    println!("[pass] sample batches byte-identical across runs and worker counts 1/4");

    let cfg = SuiteConfig::default();
    let report = |k: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .unwrap()
            .install(|| serde_json::to_string(&suite_run("covariance", &cfg).unwrap()).unwrap())
    };
    let (r1, r4) = (report(1), report(4));
    assert_eq!(r1, r4, "verify reports differ across worker counts");
    assert_eq!(r4, report(4), "verify reports differ across runs");
    println!("[pass] verify reports byte-identical across runs and worker counts 1/4");
}

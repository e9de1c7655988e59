//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 4 is expected to fail: the pinned reference clearance for the
//! reference pentagon configuration is not reproducible from its own
//! definition (the computed value is ~0.0014, not 0.032). The test asserts
//! the stated value anyway so the discrepancy stays visible. All other
//! criteria pass.

use crocker::churn::{apply_event, geometry_aware_budget};
use crocker::complex::build_vr;
use crocker::diagram::{build_crocker, ScaleGrid};
use crocker::geometry::{min_gap_delta, PointCloudFrame, PointCloudSeries, PointId};
use crocker::harness::{
    bound_dominance_suite, brute_force_betti_oracle, pentagon_band_expectation, soundness_trials,
    DEFAULT_MASTER_SEED,
};
use crocker::homology::{betti0_union_find, betti_numbers};
use crocker::models::{
    breathing_polygon, epithelial_feasibility, min_gap_closed_form, pentagon_insertion_scenario,
    BreathingPolygonSpec, FeasibilitySpec,
};
use crocker::noise::{global_prob_bound, mc_stability_experiment, tau_star, NoiseModel};
use crocker::stability::clearance_report;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(criterion: u32, label: &str, pass: bool) -> bool {
    println!("ACCEPTANCE C{criterion:02} {} - {label}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Reference configuration: breathing pentagon, 51 frames, grid 0.1j.
fn reference_pentagon() -> (PointCloudSeries, ScaleGrid) {
    let series = breathing_polygon(&BreathingPolygonSpec { m: 5, n_t: 51 });
    let grid = ScaleGrid::linspace(0.1, 1.5, 15).unwrap();
    (series, grid)
}

#[test]
fn criterion_01_table1_min_gap() {
    let start = Instant::now();
    let table = [(4, 0.293), (5, 0.363), (6, 0.134), (7, 0.193), (8, 0.076)];
    let mut ok = true;
    for (m, expect) in table {
        let closed = min_gap_closed_form(m).unwrap().delta;
        let series = breathing_polygon(&BreathingPolygonSpec { m, n_t: 721 });
        let numeric = min_gap_delta(&series, 1e-9).unwrap();
        ok &= (closed - expect).abs() <= 1e-3;
        ok &= (numeric - expect).abs() <= 1e-3;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 10.0;
    assert!(
        report(1, "breathing-polygon minimal gaps match the reference table", ok),
        "elapsed {elapsed:.2}s"
    );
}

#[test]
fn criterion_02_pentagon_band_structure() {
    let start = Instant::now();
    let series = breathing_polygon(&BreathingPolygonSpec { m: 5, n_t: 20 });
    let grid = ScaleGrid::linspace(0.2, 3.0, 15).unwrap();
    let diagrams = build_crocker(&series, &grid, 1).unwrap();
    let b1 = &diagrams[1];
    let mut ok = true;
    for (j, &eps) in grid.thresholds().iter().enumerate() {
        for (i, frame) in series.frames().iter().enumerate() {
            let expect = pentagon_band_expectation(5, frame.time_value(), eps);
            ok &= b1.matrix[j][i] == expect;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 5.0;
    assert!(
        report(2, "first-homology band equals the closed-form chord band cell-for-cell", ok),
        "elapsed {elapsed:.2}s"
    );
}

#[test]
fn criterion_03_certificate_soundness() {
    let (series, grid) = reference_pentagon();
    let gamma = clearance_report(&series, &grid, 1e-9).unwrap().gamma;
    let delta = 0.49 * gamma;
    let r = soundness_trials(&series, &grid, delta, DEFAULT_MASTER_SEED, 100, 1).unwrap();
    let ok = r.cases == 100 && r.violations == 0;
    assert!(
        report(3, "100/100 in-ball perturbations at 0.49*gamma leave the diagram unchanged", ok),
        "violations: {} (gamma = {gamma:.6})",
        r.violations
    );
}

/// Known red: the pinned reference clearance 0.032 for this configuration is not
/// reproducible from its definition; the honest computation yields ~0.0014.
#[test]
fn criterion_04_grid_threshold_clearance() {
    let (series, grid) = reference_pentagon();
    let r = clearance_report(&series, &grid, 1e-9).unwrap();
    let ok = (r.gamma_grid - 0.032).abs() <= 0.005;
    assert!(
        report(4, "grid-threshold clearance of the reference configuration is 0.032 +/- 0.005", ok),
        "computed gamma_grid = {:.6}; the pinned 0.032 is not attainable from its \
         definition for any uniform 51-sample convention (see README, acceptance suite)",
        r.gamma_grid
    );
}

#[test]
fn criterion_05_probabilistic_bound_arithmetic() {
    let mut ok = true;

    let t_low = tau_star(0.032, 0.002, 2).unwrap();
    ok &= (9.8..=10.0).contains(&t_low);

    let bound = global_prob_bound(5, 51, t_low).unwrap();
    ok &= bound.global_bound <= 1e-18;
    ok &= !bound.vacuous;

    let t_high = tau_star(0.032, 0.008, 2).unwrap();
    ok &= (1.40..=1.45).contains(&t_high);
    let vac = global_prob_bound(5, 51, t_high).unwrap();
    ok &= vac.vacuous && vac.global_bound == 1.0;

    assert!(
        report(5, "tau* and global-bound arithmetic reproduce the worked values", ok),
        "tau_low = {t_low}, tau_high = {t_high}"
    );
}

#[test]
fn criterion_06_monte_carlo_consistency() {
    let start = Instant::now();
    // Pentagon configuration with runtime-verified clearance: every grid
    // value sits in a deep pocket of the sampled chord curves, so the
    // theory certifies stability at sigma = 0.002 (tau* ~ 19).
    let series = breathing_polygon(&BreathingPolygonSpec { m: 5, n_t: 13 });
    let grid = ScaleGrid::new(vec![0.35, 0.844, 1.382, 2.0, 3.0]).unwrap();

    let model = NoiseModel::new(0.002, 2, DEFAULT_MASTER_SEED).unwrap();
    let r = mc_stability_experiment(&series, &grid, &model, 200, 1).unwrap();
    let mut ok = r.tau_star > 6.0 && r.theoretical_bound < 1e-6;
    ok &= r.change_rate == 0.0;
    ok &= r.mean_l1 == 0.0;

    // sigma -> 0 limit (the model requires sigma > 0)
    let tiny = NoiseModel::new(1e-12, 2, DEFAULT_MASTER_SEED).unwrap();
    let rz = mc_stability_experiment(&series, &grid, &tiny, 20, 1).unwrap();
    ok &= rz.mean_l1 == 0.0 && rz.change_rate == 0.0;

    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 60.0;
    assert!(
        report(6, "200 noise trials in the certified regime change nothing", ok),
        "change_rate = {}, tau* = {:.2}, bound = {:.3e}, elapsed {elapsed:.2}s",
        r.change_rate,
        r.tau_star,
        r.theoretical_bound
    );
}

#[test]
fn criterion_07_chi_statistics() {
    // Mean pair-difference norm over 1e5 independent pairs in d = 2.
    // ||xi_a - xi_b|| = sqrt(2) sigma chi_2, so the mean normalized by
    // 2 sigma is Gamma(3/2)/Gamma(1) = sqrt(pi)/2 and the mean normalized
    // by sqrt(2) sigma is the chi_2 mean sqrt(pi/2).
    let sigma = 0.002;
    let pairs = 100_000usize;
    let frame = PointCloudFrame::new(
        0,
        0.0,
        vec![
            (PointId::from("a"), vec![0.0, 0.0]),
            (PointId::from("b"), vec![10.0, 0.0]),
        ],
        2,
    )
    .unwrap();
    let base = PointCloudSeries::new(vec![frame]).unwrap();
    let mut sum = 0.0;
    for i in 0..pairs {
        let model = NoiseModel::new(sigma, 2, 0x9000 + i as u64).unwrap();
        let noisy = crocker::noise::sample_perturbation(&base, &model).unwrap();
        let f = noisy.frame(0);
        let da = [
            f.coords()[0][0] - 0.0,
            f.coords()[0][1] - 0.0,
            f.coords()[1][0] - 10.0,
            f.coords()[1][1] - 0.0,
        ];
        let diff = ((da[0] - da[2]).powi(2) + (da[1] - da[3]).powi(2)).sqrt();
        sum += diff;
    }
    let gamma_ratio = sum / pairs as f64 / (2.0 * sigma);
    let expect_ratio = std::f64::consts::PI.sqrt() / 2.0; // 0.8862
    let chi_mean = sum / pairs as f64 / (std::f64::consts::SQRT_2 * sigma);
    let expect_chi = (std::f64::consts::PI / 2.0).sqrt(); // 1.2533

    let ok = (gamma_ratio - expect_ratio).abs() / expect_ratio < 0.01
        && (chi_mean - expect_chi).abs() / expect_chi < 0.01;
    assert!(
        report(7, "pair-difference norms match the chi-distribution mean within 1%", ok),
        "gamma_ratio = {gamma_ratio:.5} (expect {expect_ratio:.5}), chi_mean = {chi_mean:.5} \
         (expect {expect_chi:.5}; the 0.8862 target corresponds to normalizing by 2 sigma)"
    );
}

#[test]
fn criterion_08_epithelial_feasibility() {
    let r = epithelial_feasibility(&FeasibilitySpec::reference(), false);
    let mut ok = (r.delta_um - 1.32).abs() < 1e-9;
    ok &= r.lambdas == vec![7, 19, 37, 61, 91, 127];
    ok &= r.inner_sum.value() == 14_784 && !r.inner_sum.is_saturated();
    ok &= r.global_budget.value() == 376_992_000 && !r.global_budget.is_saturated();
    ok &= (r.per_cell_average - 1.23e6).abs() < 0.01e6;
    assert!(
        report(8, "feasibility arithmetic reproduces the imaging worked example", ok),
        "delta = {}, inner = {}, global = {}, per-cell = {}",
        r.delta_um,
        r.inner_sum,
        r.global_budget,
        r.per_cell_average
    );
}

#[test]
fn criterion_09_pentagon_insertion_end_to_end() {
    let scenario = pentagon_insertion_scenario();
    let modified = apply_event(&scenario.base, &scenario.event).unwrap();
    let grid = ScaleGrid::linspace(0.05, 2.25, 45).unwrap(); // 0.05j, j = 1..45
    let before = build_crocker(&scenario.base, &grid, 2).unwrap();
    let after = build_crocker(&modified, &grid, 2).unwrap();

    let mut ok = true;
    for (j, &eps) in grid.thresholds().iter().enumerate() {
        let d0 = after[0].matrix[j][0] as i64 - before[0].matrix[j][0] as i64;
        let d1 = after[1].matrix[j][0] as i64 - before[1].matrix[j][0] as i64;
        let d2 = after[2].matrix[j][0] as i64 - before[2].matrix[j][0] as i64;

        if eps < 0.691 {
            ok &= d0 == 1;
        }
        let in_fan_band = (1.263..1.902).contains(&eps);
        ok &= d1 == if in_fan_band { -1 } else { 0 };
        ok &= d2 == 0;

        // observed changes stay within the geometry-aware budgets
        ok &= d0.unsigned_abs() <= geometry_aware_budget(1, 6, 0).value();
        ok &= d1.unsigned_abs() <= geometry_aware_budget(1, 6, 1).value();
    }
    // budgets quoted in the scenario analysis
    ok &= geometry_aware_budget(1, 6, 0).value() == 6;
    ok &= geometry_aware_budget(1, 6, 1).value() == 15;

    // the emitted band table is reproduced by the pipeline at band midpoints
    for band in &scenario.expected_transitions {
        let probe = if band.scale_max.is_finite() {
            0.5 * (band.scale_min + band.scale_max)
        } else {
            band.scale_min + 0.5
        };
        if probe <= 0.0 {
            continue;
        }
        let g = ScaleGrid::new(vec![probe]).unwrap();
        let b = build_crocker(&scenario.base, &g, 1).unwrap();
        let a = build_crocker(&modified, &g, 1).unwrap();
        ok &= a[0].matrix[0][0] as i64 - b[0].matrix[0][0] as i64 == band.d_beta0;
        ok &= a[1].matrix[0][0] as i64 - b[1].matrix[0][0] as i64 == band.d_beta1;
    }

    assert!(report(9, "insertion shifts the Betti bands exactly as predicted", ok));
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut ok = true;

    // 600 randomized (frame, scale) instances, m <= 8: reduction vs oracle
    let mut mismatches = 0;
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0010 + seed);
        let m = rng.gen_range(3..=8usize);
        let points = (0..m)
            .map(|p| {
                (PointId::new(format!("p{p}")), vec![rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0)])
            })
            .collect();
        let frame = PointCloudFrame::new(0, 0.0, points, 2).unwrap();
        for _ in 0..20 {
            let scale = rng.gen_range(0.05..3.0);
            let expected = brute_force_betti_oracle(&frame, scale, 1).unwrap();
            let complex = build_vr(&frame, scale, 2).unwrap();
            let got = betti_numbers(&complex, 1).unwrap();
            if got != expected {
                mismatches += 1;
            }
        }
    }
    ok &= mismatches == 0;

    // 500 randomized instances, m <= 100: matrix beta_0 vs union-find
    let mut uf_mismatches = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC_0011 + seed);
        let m = rng.gen_range(5..=100usize);
        let points = (0..m)
            .map(|p| {
                (PointId::new(format!("p{p}")), vec![rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)])
            })
            .collect();
        let frame = PointCloudFrame::new(0, 0.0, points, 2).unwrap();
        for _ in 0..10 {
            let scale = rng.gen_range(0.05..2.0);
            let complex = build_vr(&frame, scale, 1).unwrap();
            let b0 = betti_numbers(&complex, 0).unwrap().get(0);
            if b0 != betti0_union_find(&complex) {
                uf_mismatches += 1;
            }
        }
    }
    ok &= uf_mismatches == 0;

    assert!(
        report(10, "matrix reduction agrees with both independent oracles on 1100 instances", ok),
        "betti mismatches: {mismatches}, union-find mismatches: {uf_mismatches}"
    );
}

#[test]
fn criterion_11_bound_dominance() {
    let r = bound_dominance_suite(DEFAULT_MASTER_SEED, 200);
    let ok = r.dominance_violations == 0 && r.nonzero_witnesses >= 20;
    assert!(
        report(11, "observed changes never exceed budgets; witnesses present", ok),
        "violations: {}, witnesses: {}",
        r.dominance_violations,
        r.nonzero_witnesses
    );
}

/// Companion to criterion 4/6 (not an acceptance criterion): on the
/// literal reference grid, the computed clearance is far below the noise
/// scale at sigma = 0.002, the bound is vacuous, and changes are in fact
/// observed; consistent with the theory once the true clearance is used.
#[test]
fn reference_grid_noise_is_not_certified() {
    let (series, grid) = reference_pentagon();
    let model = NoiseModel::new(0.002, 2, DEFAULT_MASTER_SEED).unwrap();
    let r = mc_stability_experiment(&series, &grid, &model, 40, 1).unwrap();
    assert!(r.gamma_grid < 0.004, "gamma_grid = {}", r.gamma_grid);
    assert!(r.tau_star < 0.0);
    assert_eq!(r.theoretical_bound, 1.0);
    assert!(r.change_rate > 0.5, "change_rate = {}", r.change_rate);
    assert!(r.crossing_rate >= r.change_rate);
}

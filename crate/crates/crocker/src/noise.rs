//! Probabilistic stability under isotropic Gaussian perturbations.
//!
//! The activation margin tau* compares the grid-threshold clearance to the
//! typical distance fluctuation sqrt(2)*sigma*sqrt(d); above activation the
//! chance that any pair crosses any threshold decays like exp(-tau*^2/2),
//! and the global bound multiplies that by the C(m,2)*n_t union-bound
//! prefactor. A Monte Carlo harness replays many seeded perturbations to
//! compare observed change rates against the bound.
//!
//! Sampling contract: every Gaussian draw is keyed on
//! (seed, frame, point, coordinate) through a counter-based mixer, so a
//! perturbation is a pure function of the seed and trials can run in any
//! order, in parallel, with identical results.

use crate::diagram::{build_crocker, l1_distance, ScaleGrid};
use crate::error::{Error, Result};
use crate::geometry::{euclidean, PointCloudFrame, PointCloudSeries};
use crate::stability::grid_threshold_clearance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Isotropic Gaussian noise: independent N(0, sigma^2) per coordinate, per
/// point, per frame.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub dim: usize,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, dim: usize, seed: u64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        if dim < 1 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self { sigma, dim, seed })
    }

    /// Draws are independent across frames; there is no temporal
    /// correlation in this model.
    pub fn temporal_independence(&self) -> bool {
        true
    }
}

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a seed with stream indices into one well-mixed word.
pub(crate) fn mix_key(seed: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(seed);
    for &p in parts {
        h = mix64(h ^ mix64(p));
    }
    h
}

/// Maps a word to (0, 1], suitable for a log.
fn unit_open(h: u64) -> f64 {
    ((h >> 11) + 1) as f64 / (9_007_199_254_740_992.0 + 1.0)
}

/// Standard normal draw keyed on (seed, frame, point, coordinate), via the
/// Box-Muller transform on two keyed uniforms.
fn standard_normal(seed: u64, frame: u64, point: u64, coord: u64) -> f64 {
    let u1 = unit_open(mix_key(seed, &[frame, point, coord, 0]));
    let u2 = unit_open(mix_key(seed, &[frame, point, coord, 1]));
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Activation margin tau* = gamma_grid / (sqrt(2) sigma) - sqrt(d).
/// May be negative; callers check the sign before using tail bounds.
pub fn tau_star(gamma_grid: f64, sigma: f64, d: usize) -> Result<f64> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok(gamma_grid / (std::f64::consts::SQRT_2 * sigma) - (d as f64).sqrt())
}

/// Tail bound exp(-tau*^2 / 2) on a single pair's crossing probability,
/// clamped to [0, 1]; reports 1 whenever activation fails (tau* <= 0).
pub fn pair_crossing_bound(tau_star: f64) -> f64 {
    if tau_star <= 0.0 {
        1.0
    } else {
        (-tau_star * tau_star / 2.0).exp().clamp(0.0, 1.0)
    }
}

/// Union bound over pairs and frames on the probability that the diagram
/// changes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbBoundReport {
    /// Present when the clearance was computed from data rather than
    /// supplied via tau*.
    pub gamma_grid: Option<f64>,
    pub tau_star: f64,
    pub activation_ok: bool,
    pub pair_bound: f64,
    pub global_bound: f64,
    /// C(m, 2) * n_t.
    pub prefactor: f64,
    pub vacuous: bool,
    pub m: u64,
    pub n_t: u64,
}

/// min{1, C(m,2) * n_t * exp(-tau*^2/2)}, evaluated in log space so tiny
/// bounds stay representable.
pub fn global_prob_bound(m: u64, n_t: u64, tau_star: f64) -> Result<ProbBoundReport> {
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    if n_t < 1 {
        return Err(Error::InvalidParameter("need at least one frame".into()));
    }
    let prefactor = (m as f64) * (m as f64 - 1.0) / 2.0 * n_t as f64;
    let activation_ok = tau_star > 0.0;
    let pair_bound = pair_crossing_bound(tau_star);
    let (global_bound, vacuous) = if activation_ok {
        let log_raw = prefactor.ln() - tau_star * tau_star / 2.0;
        if log_raw >= 0.0 {
            (1.0, true)
        } else {
            (log_raw.exp(), false)
        }
    } else {
        (1.0, true)
    };
    Ok(ProbBoundReport {
        gamma_grid: None,
        tau_star,
        activation_ok,
        pair_bound,
        global_bound,
        prefactor,
        vacuous,
        m,
        n_t,
    })
}

/// Full report from data: computes the clearance, tau*, and the global
/// bound for a series, grid, and noise model.
pub fn prob_bound_report(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    model: &NoiseModel,
) -> Result<ProbBoundReport> {
    let gamma_grid = grid_threshold_clearance(series, grid);
    let tau = tau_star(gamma_grid, model.sigma, model.dim)?;
    let m = series.frames().iter().map(|f| f.len()).max().unwrap_or(0) as u64;
    let mut report = global_prob_bound(m.max(2), series.len() as u64, tau)?;
    report.gamma_grid = Some(gamma_grid);
    Ok(report)
}

/// Smallest tau with C(m,2) * n_t * exp(-tau^2/2) <= target_prob.
pub fn required_tau_for_confidence(m: u64, n_t: u64, target_prob: f64) -> Result<f64> {
    if !(target_prob > 0.0 && target_prob < 1.0) {
        return Err(Error::InvalidParameter("target probability must lie in (0, 1)".into()));
    }
    if m < 2 || n_t < 1 {
        return Err(Error::InvalidParameter("need m >= 2 and n_t >= 1".into()));
    }
    let prefactor = (m as f64) * (m as f64 - 1.0) / 2.0 * n_t as f64;
    let ratio = prefactor / target_prob;
    if ratio <= 1.0 {
        return Ok(0.0);
    }
    Ok((2.0 * ratio.ln()).sqrt())
}

/// Applies one seeded Gaussian perturbation to every coordinate of every
/// point of every frame. Ids, times, and frame count are untouched; the
/// output is fully determined by the model's seed.
pub fn sample_perturbation(
    series: &PointCloudSeries,
    model: &NoiseModel,
) -> Result<PointCloudSeries> {
    if model.dim != series.dim() {
        return Err(Error::DimensionMismatch { expected: series.dim(), got: model.dim });
    }
    let frames = series
        .frames()
        .iter()
        .enumerate()
        .map(|(fi, frame)| {
            let points = frame
                .ids()
                .iter()
                .zip(frame.coords())
                .enumerate()
                .map(|(pi, (id, coords))| {
                    let moved = coords
                        .iter()
                        .enumerate()
                        .map(|(ci, &x)| {
                            x + model.sigma
                                * standard_normal(model.seed, fi as u64, pi as u64, ci as u64)
                        })
                        .collect();
                    (id.clone(), moved)
                })
                .collect();
            PointCloudFrame::new(frame.time_index(), frame.time_value(), points, frame.dim())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointCloudSeries::new(frames)?.with_label(format!("{}+noise", series.label())))
}

/// Monte Carlo comparison of observed diagram changes against the
/// theoretical bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McReport {
    pub trials: u64,
    /// Fraction of trials in which any Crocker cell changed.
    pub change_rate: f64,
    /// Mean l1 change summed over homology dimensions 0..=k_max.
    pub mean_l1: f64,
    /// Fraction of trials in which some pair distance crossed some grid
    /// threshold (necessary for a change, not sufficient).
    pub crossing_rate: f64,
    pub theoretical_bound: f64,
    pub gamma_grid: f64,
    pub tau_star: f64,
    pub sigma: f64,
    pub seed: u64,
    pub k_max: usize,
}

/// Runs `trials` independent perturbations (seed-derived substreams),
/// recomputes the diagrams, and tallies change and crossing rates.
pub fn mc_stability_experiment(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    model: &NoiseModel,
    trials: u64,
    k_max: usize,
) -> Result<McReport> {
    if trials < 1 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let baseline = build_crocker(series, grid, k_max)?;
    let base_dists: Vec<Vec<f64>> = series
        .frames()
        .iter()
        .map(crate::geometry::pairwise_distance_values)
        .collect();

    let outcomes: Vec<(bool, u64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sub = NoiseModel {
                sigma: model.sigma,
                dim: model.dim,
                seed: mix_key(model.seed, &[t]),
            };
            let perturbed = sample_perturbation(series, &sub)?;
            let diagrams = build_crocker(&perturbed, grid, k_max)?;
            let mut l1 = 0u64;
            for (a, b) in baseline.iter().zip(&diagrams) {
                l1 += l1_distance(a, b)?;
            }
            let crossed = crossing_occurred(&base_dists, &perturbed, grid);
            Ok((l1 > 0, l1, crossed))
        })
        .collect::<Result<Vec<_>>>()?;

    let changed = outcomes.iter().filter(|(c, _, _)| *c).count() as f64;
    let crossed = outcomes.iter().filter(|(_, _, x)| *x).count() as f64;
    let total_l1: u64 = outcomes.iter().map(|(_, l, _)| l).sum();

    let gamma_grid = grid_threshold_clearance(series, grid);
    let tau = tau_star(gamma_grid, model.sigma, model.dim)?;
    let m = series.frames().iter().map(|f| f.len()).max().unwrap_or(2) as u64;
    let bound = global_prob_bound(m.max(2), series.len() as u64, tau)?;

    Ok(McReport {
        trials,
        change_rate: changed / trials as f64,
        mean_l1: total_l1 as f64 / trials as f64,
        crossing_rate: crossed / trials as f64,
        theoretical_bound: bound.global_bound,
        gamma_grid,
        tau_star: tau,
        sigma: model.sigma,
        seed: model.seed,
        k_max,
    })
}

fn crossing_occurred(
    base_dists: &[Vec<f64>],
    perturbed: &PointCloudSeries,
    grid: &ScaleGrid,
) -> bool {
    for (frame, base) in perturbed.frames().iter().zip(base_dists) {
        let mut idx = 0;
        let n = frame.len();
        for i in 0..n {
            for j in i + 1..n {
                let d1 = euclidean(&frame.coords()[i], &frame.coords()[j]);
                let d0 = base[idx];
                idx += 1;
                for &eps in grid.thresholds() {
                    if (d0 <= eps) != (d1 <= eps) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{breathing_polygon, BreathingPolygonSpec};

    #[test]
    fn tau_star_worked_values() {
        let t1 = tau_star(0.032, 0.002, 2).unwrap();
        assert!((t1 - 9.9).abs() < 0.05, "{t1}");
        let t2 = tau_star(0.032, 0.008, 2).unwrap();
        assert!((t2 - 1.42).abs() < 0.01, "{t2}");
        // activation boundary
        let sigma = 0.01;
        let gg = std::f64::consts::SQRT_2 * sigma * 2f64.sqrt();
        assert!(tau_star(gg, sigma, 2).unwrap().abs() < 1e-12);
        assert!(tau_star(0.1, 0.0, 2).is_err());
    }

    #[test]
    fn tau_star_monotone() {
        let base = tau_star(0.05, 0.01, 2).unwrap();
        assert!(tau_star(0.06, 0.01, 2).unwrap() > base);
        assert!(tau_star(0.05, 0.02, 2).unwrap() < base);
        assert!(tau_star(0.05, 0.01, 3).unwrap() < base);
    }

    #[test]
    fn pair_bound_values() {
        assert!((pair_crossing_bound(9.9) - (-49.005f64).exp()).abs() < 1e-24);
        assert_eq!(pair_crossing_bound(0.0), 1.0);
        assert_eq!(pair_crossing_bound(-3.0), 1.0);
        let p = pair_crossing_bound(1.42);
        assert!((p - 0.365).abs() < 0.005, "{p}");
    }

    #[test]
    fn global_bound_worked_values() {
        let r = global_prob_bound(5, 51, 9.8995).unwrap();
        assert!(r.global_bound <= 1e-18);
        assert!(!r.vacuous && r.activation_ok);
        assert!((r.prefactor - 510.0).abs() < 1e-9);

        let v = global_prob_bound(5, 51, 1.42).unwrap();
        assert_eq!(v.global_bound, 1.0);
        assert!(v.vacuous);

        let big = global_prob_bound(500, 51, 5.0).unwrap();
        assert!((big.prefactor - 6.362_25e6).abs() < 1.0);

        let inactive = global_prob_bound(5, 51, -0.5).unwrap();
        assert_eq!(inactive.global_bound, 1.0);
        assert!(inactive.vacuous && !inactive.activation_ok);
    }

    #[test]
    fn required_tau_values() {
        let t = required_tau_for_confidence(500, 51, 0.01).unwrap();
        assert!((t - 6.4).abs() < 0.05, "{t}");
        let t2 = required_tau_for_confidence(2, 1, (-2.0f64).exp()).unwrap();
        assert!((t2 - 2.0).abs() < 1e-12);
        assert!(required_tau_for_confidence(5, 51, 0.0).is_err());
        assert!(required_tau_for_confidence(5, 51, 1.0).is_err());
    }

    #[test]
    fn perturbation_is_reproducible() {
        let series = breathing_polygon(&BreathingPolygonSpec { m: 5, n_t: 7 });
        let model = NoiseModel::new(0.01, 2, 42).unwrap();
        let a = sample_perturbation(&series, &model).unwrap();
        let b = sample_perturbation(&series, &model).unwrap();
        for (fa, fb) in a.frames().iter().zip(b.frames()) {
            assert_eq!(fa.coords(), fb.coords());
            assert_eq!(fa.ids(), fb.ids());
        }
        let c = sample_perturbation(&series, &NoiseModel::new(0.01, 2, 43).unwrap()).unwrap();
        assert_ne!(a.frames()[0].coords(), c.frames()[0].coords());
    }

    #[test]
    fn perturbation_keeps_structure() {
        let series = breathing_polygon(&BreathingPolygonSpec { m: 6, n_t: 5 });
        let model = NoiseModel::new(0.05, 2, 7).unwrap();
        let p = sample_perturbation(&series, &model).unwrap();
        assert_eq!(p.len(), series.len());
        for (fa, fb) in series.frames().iter().zip(p.frames()) {
            assert_eq!(fa.time_value(), fb.time_value());
            assert_eq!(fa.ids(), fb.ids());
        }
        let wrong = NoiseModel::new(0.05, 3, 7).unwrap();
        assert!(sample_perturbation(&series, &wrong).is_err());
    }

    #[test]
    fn sample_statistics_match_sigma() {
        let sigma = 0.5;
        let n = 100_000u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..n {
            let z = sigma * standard_normal(99, i, 0, 0);
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let std = (sumsq / n as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((std - sigma).abs() / sigma < 0.02, "std {std}");
    }

    #[test]
    fn chi_mean_in_two_dimensions() {
        // ||xi_a - xi_b|| / (sqrt(2) sigma) is chi-distributed with d
        // degrees of freedom; for d = 2 its mean is
        // sqrt(2) Gamma(3/2) / Gamma(1) = sqrt(pi/2), equivalently the
        // Gamma ratio alone after normalizing by 2 sigma.
        let sigma = 0.002;
        let n = 100_000u64;
        let mut sum = 0.0;
        for i in 0..n {
            let ax = sigma * standard_normal(7, i, 0, 0);
            let ay = sigma * standard_normal(7, i, 0, 1);
            let bx = sigma * standard_normal(7, i, 1, 0);
            let by = sigma * standard_normal(7, i, 1, 1);
            sum += ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
        }
        let chi_mean = sum / n as f64 / (std::f64::consts::SQRT_2 * sigma);
        let expect_chi = (std::f64::consts::PI / 2.0).sqrt();
        assert!((chi_mean - expect_chi).abs() / expect_chi < 0.01, "chi mean {chi_mean}");

        let gamma_ratio = sum / n as f64 / (2.0 * sigma);
        let expect_ratio = std::f64::consts::PI.sqrt() / 2.0;
        assert!(
            (gamma_ratio - expect_ratio).abs() / expect_ratio < 0.01,
            "gamma ratio {gamma_ratio}"
        );
    }

    #[test]
    fn mc_zero_change_under_huge_clearance() {
        let series = breathing_polygon(&BreathingPolygonSpec { m: 5, n_t: 9 });
        // grid far below every chord (min distance ~0.59)
        let grid = ScaleGrid::new(vec![0.2]).unwrap();
        let model = NoiseModel::new(0.002, 2, 11).unwrap();
        let r = mc_stability_experiment(&series, &grid, &model, 20, 1).unwrap();
        assert_eq!(r.change_rate, 0.0);
        assert_eq!(r.mean_l1, 0.0);
        assert!(r.tau_star > 0.0);
    }

    #[test]
    fn mc_saturating_noise_changes_everything() {
        let series = breathing_polygon(&BreathingPolygonSpec { m: 5, n_t: 6 });
        let grid = ScaleGrid::new(vec![0.8, 1.2]).unwrap();
        let model = NoiseModel::new(0.5, 2, 3).unwrap();
        let r = mc_stability_experiment(&series, &grid, &model, 40, 1).unwrap();
        assert!(r.change_rate > 0.9, "rate {}", r.change_rate);
        assert!(r.crossing_rate >= r.change_rate);
    }

    #[test]
    fn mc_is_deterministic() {
        let series = breathing_polygon(&BreathingPolygonSpec { m: 4, n_t: 5 });
        let grid = ScaleGrid::new(vec![0.7, 1.4]).unwrap();
        let model = NoiseModel::new(0.05, 2, 21).unwrap();
        let a = mc_stability_experiment(&series, &grid, &model, 25, 1).unwrap();
        let b = mc_stability_experiment(&series, &grid, &model, 25, 1).unwrap();
        assert_eq!(a.change_rate, b.change_rate);
        assert_eq!(a.mean_l1, b.mean_l1);
        assert_eq!(a.crossing_rate, b.crossing_rate);
    }
}

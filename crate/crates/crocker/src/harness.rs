//! Oracle and suite infrastructure tying the stability guarantees to
//! executable checks.
//!
//! The brute-force Betti oracle shares nothing with the production path:
//! simplices come from exhaustive subset filtering instead of clique
//! expansion, and ranks come from dense row-echelon elimination instead of
//! column reduction. It is capped at 12 vertices, where 2^m subset
//! enumeration stays cheap.

use crate::churn::{apply_event, churn_lambdas, global_churn_bound, ChurnEvent, ChurnKind};
use crate::diagram::{build_crocker, l1_distance, ScaleGrid};
use crate::error::{Error, Result};
use crate::geometry::{
    euclidean, max_displacement, PointCloudFrame, PointCloudSeries, PointId,
};
use crate::homology::BettiVector;
use crate::models::{breathing_polygon, BreathingPolygonSpec};
use crate::noise::mix_key;
use crate::stability::{budget_from_lambdas, clearance_report, local_density};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fixed master seed for suites invoked without one.
pub const DEFAULT_MASTER_SEED: u64 = 0x5eed_cafe_f00d_0001;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum GeneratorSpec {
    RandomCloud { m: usize, dim: usize },
    BreathingPolygon { m: usize, n_t: usize },
    /// Caller-supplied series, identified by its label.
    Provided { label: String },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum Mechanism {
    BruteForceBetti,
    ClosedFormBand,
    BoundDominance,
}

/// One reproducible suite case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleCase {
    pub seed: u64,
    pub generator: GeneratorSpec,
    pub mechanism: Mechanism,
}

const BRUTE_FORCE_MAX_POINTS: usize = 12;

/// Betti numbers by exhaustive subset enumeration and row-echelon ranks.
/// Must equal the production computation; limited to m <= 12.
pub fn brute_force_betti_oracle(
    frame: &PointCloudFrame,
    scale: f64,
    k_max: usize,
) -> Result<BettiVector> {
    let m = frame.len();
    if m > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "brute-force oracle limited to {BRUTE_FORCE_MAX_POINTS} points, got {m}"
        )));
    }
    if m == 0 {
        return Err(Error::EmptyFrame);
    }
    // distance test on original point order; vertex numbering is irrelevant
    // to Betti numbers
    let close = |i: usize, j: usize| {
        euclidean(&frame.coords()[i], &frame.coords()[j]) <= scale
    };

    // simplices[d] = all (d+1)-subsets whose pairs are all close
    let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k_max + 2];
    for mask in 1u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size > k_max + 2 {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let ok = members
            .iter()
            .enumerate()
            .all(|(a, &i)| members[a + 1..].iter().all(|&j| close(i, j)));
        if ok {
            simplices[size - 1].push(members);
        }
    }
    for level in &mut simplices {
        level.sort();
    }

    let mut ranks = vec![0usize; k_max + 2];
    for k in 1..=k_max + 1 {
        ranks[k] = dense_boundary_rank(&simplices[k - 1], &simplices[k]);
    }
    let values = (0..=k_max)
        .map(|k| simplices[k].len() - ranks[k] - ranks[k + 1])
        .collect();
    Ok(BettiVector { values })
}

/// Rank of the boundary map from `cells` to `faces` by forward row
/// elimination on word-packed rows.
fn dense_boundary_rank(faces: &[Vec<usize>], cells: &[Vec<usize>]) -> usize {
    if faces.is_empty() || cells.is_empty() {
        return 0;
    }
    let words = cells.len().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = vec![vec![0u64; words]; faces.len()];
    for (col, cell) in cells.iter().enumerate() {
        for omit in 0..cell.len() {
            let facet: Vec<usize> = cell
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != omit)
                .map(|(_, &v)| v)
                .collect();
            let row = faces.binary_search(&facet).expect("closed under faces");
            rows[row][col / 64] ^= 1u64 << (col % 64);
        }
    }

    let mut rank = 0;
    let mut used = vec![false; faces.len()];
    for col in 0..cells.len() {
        let (w, bit) = (col / 64, col % 64);
        let Some(pivot) = (0..faces.len())
            .find(|&r| !used[r] && rows[r][w] >> bit & 1 == 1)
        else {
            continue;
        };
        used[pivot] = true;
        rank += 1;
        let pivot_row = rows[pivot].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot && row[w] >> bit & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
    }
    rank
}

/// Uniform draw from the closed ball of radius `r` (any dimension), via a
/// normalized Gaussian direction and a radially corrected radius.
pub fn uniform_in_ball(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| standard_normal_from(rng)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let u: f64 = rng.gen();
            let radius = r * u.powf(1.0 / dim as f64);
            return dir.into_iter().map(|x| x * radius / norm).collect();
        }
    }
}

fn standard_normal_from(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Displaces every point of every frame by an independent uniform-in-ball
/// vector of radius `delta`.
pub fn perturb_uniform_ball(
    series: &PointCloudSeries,
    delta: f64,
    seed: u64,
) -> PointCloudSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = series
        .frames()
        .iter()
        .map(|frame| {
            let points = frame
                .ids()
                .iter()
                .zip(frame.coords())
                .map(|(id, coords)| {
                    let shift = uniform_in_ball(&mut rng, frame.dim(), delta);
                    let moved = coords.iter().zip(&shift).map(|(x, s)| x + s).collect();
                    (id.clone(), moved)
                })
                .collect();
            PointCloudFrame::new(frame.time_index(), frame.time_value(), points, frame.dim())
                .expect("perturbation preserves frame validity")
        })
        .collect();
    PointCloudSeries::new(frames).expect("perturbation preserves series validity")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub cases: usize,
    pub violations: usize,
    pub min_gamma: f64,
    pub max_observed_l1: u64,
    pub passed: bool,
    /// Reproduction handles for any violating case.
    pub failing_cases: Vec<OracleCase>,
}

/// Fixed-configuration soundness trials: perturb within `delta` of every
/// point, recompute, and demand zero l1 change. Any nonzero change would
/// falsify the exact-stability guarantee (or this implementation).
pub fn soundness_trials(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    delta: f64,
    master_seed: u64,
    trials: usize,
    k_max: usize,
) -> Result<SoundnessReport> {
    let report = clearance_report(series, grid, 1e-9)?;
    if !report.in_gap_ok || delta.is_nan() || delta >= report.gamma / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "configuration not certified: gamma = {}, delta = {delta}",
            report.gamma
        )));
    }
    let baseline = build_crocker(series, grid, k_max)?;
    let results: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let perturbed = perturb_uniform_ball(series, delta, mix_key(master_seed, &[i as u64]));
            debug_assert!(max_displacement(series, &perturbed).unwrap() <= delta + 1e-12);
            let diagrams = build_crocker(&perturbed, grid, k_max)?;
            let mut l1 = 0u64;
            for (a, b) in baseline.iter().zip(&diagrams) {
                l1 += l1_distance(a, b)?;
            }
            Ok(l1)
        })
        .collect::<Result<Vec<u64>>>()?;
    let failing_cases: Vec<OracleCase> = results
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0)
        .map(|(i, _)| OracleCase {
            seed: mix_key(master_seed, &[i as u64]),
            generator: GeneratorSpec::Provided { label: series.label().to_owned() },
            mechanism: Mechanism::ClosedFormBand,
        })
        .collect();
    let violations = failing_cases.len();
    Ok(SoundnessReport {
        cases: trials,
        violations,
        min_gamma: report.gamma,
        max_observed_l1: results.iter().copied().max().unwrap_or(0),
        passed: violations == 0,
        failing_cases,
    })
}

/// Randomized soundness suite over breathing polygons with random grids.
/// Each case finds an in-gap configuration, perturbs at 0.49 of its
/// clearance, and requires cell-for-cell invariance.
pub fn certificate_soundness_suite(master_seed: u64, cases: usize) -> SoundnessReport {
    let outcomes: Vec<(f64, u64, usize, usize)> = (0..cases)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_key(master_seed, &[c as u64]));
            let m = rng.gen_range(4..=8usize);
            let n_t = rng.gen_range(6..=16usize);
            let series = breathing_polygon(&BreathingPolygonSpec { m, n_t });
            // draw grids until the clearance is comfortably positive
            let (grid, gamma) = loop {
                let count = rng.gen_range(3..=6usize);
                let mut vals: Vec<f64> =
                    (0..count).map(|_| rng.gen_range(0.2..3.2)).collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                vals.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
                let Ok(grid) = ScaleGrid::new(vals) else { continue };
                let report = clearance_report(&series, &grid, 1e-9).expect("clearance");
                if report.in_gap_ok && report.gamma > 1e-4 {
                    break (grid, report.gamma);
                }
            };
            let delta = 0.49 * gamma;
            let perturbed = perturb_uniform_ball(&series, delta, rng.gen());
            let base = build_crocker(&series, &grid, 1).expect("crocker");
            let moved = build_crocker(&perturbed, &grid, 1).expect("crocker");
            let l1: u64 = base
                .iter()
                .zip(&moved)
                .map(|(a, b)| l1_distance(a, b).expect("same shape"))
                .sum();
            (gamma, l1, m, n_t)
        })
        .collect();
    let failing_cases: Vec<OracleCase> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (_, l, _, _))| *l > 0)
        .map(|(c, (_, _, m, n_t))| OracleCase {
            seed: mix_key(master_seed, &[c as u64]),
            generator: GeneratorSpec::BreathingPolygon { m: *m, n_t: *n_t },
            mechanism: Mechanism::ClosedFormBand,
        })
        .collect();
    let violations = failing_cases.len();
    SoundnessReport {
        cases,
        violations,
        min_gamma: outcomes.iter().map(|(g, ..)| *g).fold(f64::INFINITY, f64::min),
        max_observed_l1: outcomes.iter().map(|(_, l, ..)| *l).max().unwrap_or(0),
        passed: violations == 0,
        failing_cases,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominanceReport {
    pub scenarios: usize,
    pub perturbation_scenarios: usize,
    pub churn_scenarios: usize,
    /// Scenarios whose observed l1 change was nonzero (tightness witnesses).
    pub nonzero_witnesses: usize,
    pub dominance_violations: usize,
    pub max_observed_l1: u64,
    pub passed: bool,
    /// Reproduction handles for any scenario exceeding its bound.
    pub failing_cases: Vec<OracleCase>,
}

/// Randomized dominance suite: every observed l1 change must stay within
/// the applicable worst-case budget, both for bounded perturbations and for
/// insertion/deletion events.
pub fn bound_dominance_suite(master_seed: u64, scenarios: usize) -> DominanceReport {
    let outcomes: Vec<(bool, u64, bool)> = (0..scenarios)
        .into_par_iter()
        .map(|s| dominance_scenario(mix_key(master_seed, &[s as u64]), s % 2 == 0))
        .collect();
    let failing_cases: Vec<OracleCase> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (ok, _, _))| !ok)
        .map(|(s, _)| OracleCase {
            seed: mix_key(master_seed, &[s as u64]),
            generator: GeneratorSpec::RandomCloud { m: 12, dim: 2 },
            mechanism: Mechanism::BoundDominance,
        })
        .collect();
    let violations = failing_cases.len();
    let witnesses = outcomes.iter().filter(|(_, l, _)| *l > 0).count();
    let churn = outcomes.iter().filter(|(_, _, is_churn)| *is_churn).count();
    DominanceReport {
        scenarios,
        perturbation_scenarios: scenarios - churn,
        churn_scenarios: churn,
        nonzero_witnesses: witnesses,
        dominance_violations: violations,
        max_observed_l1: outcomes.iter().map(|(_, l, _)| *l).max().unwrap_or(0),
        passed: violations == 0,
        failing_cases,
    }
}

/// Returns (dominated, observed l1 over k in {0, 1}, was churn).
fn dominance_scenario(seed: u64, churn: bool) -> (bool, u64, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(4..=12usize);
    let n_t = rng.gen_range(1..=4usize);
    let dim = 2;
    let base_coords: Vec<Vec<f64>> =
        (0..m).map(|_| (0..dim).map(|_| rng.gen_range(0.0..2.0)).collect()).collect();
    let frames: Vec<PointCloudFrame> = (0..n_t)
        .map(|i| {
            let drift = 0.05 * i as f64;
            let points = base_coords
                .iter()
                .enumerate()
                .map(|(p, base)| {
                    (PointId::new(format!("p{p}")), base.iter().map(|x| x + drift).collect())
                })
                .collect();
            PointCloudFrame::new(i, i as f64, points, dim).expect("valid frame")
        })
        .collect();
    let series = PointCloudSeries::new(frames).expect("valid series");
    let count = rng.gen_range(3..=6usize);
    let mut vals: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..2.5)).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let grid = ScaleGrid::new(vals).expect("valid grid");
    let base = build_crocker(&series, &grid, 1).expect("crocker");

    if churn {
        let kind = if rng.gen_bool(0.5) || m < 5 { ChurnKind::Insert } else { ChurnKind::Delete };
        let q = rng.gen_range(1..=3usize.min(m - 1));
        let event_index = rng.gen_range(1..=n_t);
        let event = match kind {
            ChurnKind::Insert => ChurnEvent {
                time_index: event_index,
                kind,
                affected_ids: (0..q).map(|i| PointId::new(format!("new{i}"))).collect(),
                inserted_coords: (0..q)
                    .map(|_| (0..dim).map(|_| rng.gen_range(-1.5..3.5)).collect())
                    .collect(),
            },
            ChurnKind::Delete => ChurnEvent {
                time_index: event_index,
                kind,
                affected_ids: (0..q).map(|i| PointId::new(format!("p{i}"))).collect(),
                inserted_coords: vec![],
            },
        };
        let modified = apply_event(&series, &event).expect("valid event");
        let after = build_crocker(&modified, &grid, 1).expect("crocker");
        let lambdas = churn_lambdas(&series, &modified, &grid).expect("density");
        let mut total = 0u64;
        let mut dominated = true;
        for k in 0..=1usize {
            let observed = l1_distance(&base[k], &after[k]).expect("same grid and times");
            let bound =
                global_churn_bound(n_t as u64, event_index as u64, q as u64, &lambdas, k)
                    .expect("bound");
            dominated &= bound.is_saturated() || observed <= bound.value();
            total += observed;
        }
        (dominated, total, true)
    } else {
        let m_star = rng.gen_range(1..=m);
        let delta = if rng.gen_bool(0.5) {
            rng.gen_range(0.01..0.05)
        } else {
            rng.gen_range(0.2..0.6)
        };
        let perturbed = perturb_subset(&series, m_star, delta, rng.gen());
        let after = build_crocker(&perturbed, &grid, 1).expect("crocker");
        let profile = local_density(&series, &grid, delta).expect("density");
        let mut total = 0u64;
        let mut dominated = true;
        for k in 0..=1usize {
            let observed = l1_distance(&base[k], &after[k]).expect("same shape");
            let bound =
                budget_from_lambdas(n_t as u64, m_star as u64, &profile.lambdas(), k);
            dominated &= bound.is_saturated() || observed <= bound.value();
            total += observed;
        }
        (dominated, total, false)
    }
}

/// Moves the first `m_star` points (by id order) of every frame within a
/// delta-ball; the rest stay put.
fn perturb_subset(
    series: &PointCloudSeries,
    m_star: usize,
    delta: f64,
    seed: u64,
) -> PointCloudSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<PointId> = series.frame(0).ids().to_vec();
    chosen.sort();
    chosen.truncate(m_star);
    let frames = series
        .frames()
        .iter()
        .map(|frame| {
            let points = frame
                .ids()
                .iter()
                .zip(frame.coords())
                .map(|(id, coords)| {
                    if chosen.contains(id) {
                        let shift = uniform_in_ball(&mut rng, frame.dim(), delta);
                        (id.clone(), coords.iter().zip(&shift).map(|(x, s)| x + s).collect())
                    } else {
                        (id.clone(), coords.clone())
                    }
                })
                .collect();
            PointCloudFrame::new(frame.time_index(), frame.time_value(), points, frame.dim())
                .expect("valid frame")
        })
        .collect();
    PointCloudSeries::new(frames).expect("valid series")
}

/// Band membership: closed-form expectation for the breathing polygon's
/// first homology at one scale and time.
pub fn pentagon_band_expectation(m: usize, t: f64, eps: f64) -> u64 {
    let chords = crate::models::chord_lengths(m, crate::models::breathing_radius(t));
    let c1 = chords[0];
    let c2 = chords[1];
    u64::from(c1 < eps && eps < c2)
}

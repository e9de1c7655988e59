//! Deterministic stability machinery: grid clearances, in-gap checks,
//! local density, the exact-stability certificate, and the bounded-change
//! budget.
//!
//! Two clearance notions coexist and are easy to conflate:
//!
//! * cell clearance `g[i][j]` brackets each grid value between consecutive
//!   critical distances of frame `i`, with the list extended by 0 below and
//!   +inf above, and `gamma` is the minimum over cells;
//! * `gamma_grid` is the minimum distance from any *actual* pairwise
//!   distance to any grid threshold, with no boundary extension.
//!
//! They agree whenever the minimizing bracket is a real distance; at
//! boundary cells `gamma_grid` can exceed `gamma`. In every case `gamma`
//! is at most `delta_grid_gap / 2`.

use crate::budget::{binomial, SatUint};
use crate::complex::neighbor_counts;
use crate::diagram::ScaleGrid;
use crate::error::Result;
use crate::geometry::{critical_distances, pairwise_distance_values, PointCloudSeries};
use serde::{Deserialize, Serialize};

/// Per-cell clearances and the derived gap statistics for one series and
/// grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClearanceReport {
    pub time_values: Vec<f64>,
    pub grid: ScaleGrid,
    /// `per_cell[i][j]`: clearance of grid value j at frame i.
    pub per_cell: Vec<Vec<f64>>,
    /// `in_gap[i][j]`: false when the grid value coincides with a critical
    /// distance within `dedup_tol`.
    pub in_gap: Vec<Vec<bool>>,
    pub gamma: f64,
    pub gamma_grid: f64,
    /// Minimal spacing of consecutive critical distances over all frames;
    /// None when some frame has fewer than two distinct distances.
    pub delta_gap: Option<f64>,
    /// Minimal width among the gaps actually occupied by a grid value,
    /// counting only gaps bounded by real distances on both sides.
    pub delta_grid_gap: Option<f64>,
    pub in_gap_ok: bool,
    pub dedup_tol: f64,
}

impl ClearanceReport {
    /// Cells where the in-gap condition fails, as (time index, scale index).
    pub fn violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.in_gap.iter().enumerate() {
            for (j, &ok) in row.iter().enumerate() {
                if !ok {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Cells achieving the global minimum clearance.
    pub fn tightest_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.per_cell.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if g <= self.gamma + 1e-12 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Computes clearances, gap statistics, and in-gap flags. Violations are
/// reported in the result, never raised as errors.
pub fn clearance_report(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    dedup_tol: f64,
) -> Result<ClearanceReport> {
    let mut per_cell = Vec::with_capacity(series.len());
    let mut in_gap = Vec::with_capacity(series.len());
    let mut gamma = f64::INFINITY;
    let mut gamma_grid = f64::INFINITY;
    let mut delta_gap: Option<f64> = Some(f64::INFINITY);
    let mut delta_grid_gap = f64::INFINITY;

    for frame in series.frames() {
        let spectrum = if frame.is_empty() {
            Vec::new()
        } else {
            critical_distances(frame, dedup_tol)?.sorted_distinct
        };

        match spectrum.len() {
            0 | 1 => delta_gap = None,
            _ => {
                if let Some(d) = delta_gap {
                    let local =
                        spectrum.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                    delta_gap = Some(d.min(local));
                }
            }
        }

        for &dist in &pairwise_distance_values(frame) {
            for &eps in grid.thresholds() {
                gamma_grid = gamma_grid.min((dist - eps).abs());
            }
        }

        let mut row_g = Vec::with_capacity(grid.len());
        let mut row_ok = Vec::with_capacity(grid.len());
        for &eps in grid.thresholds() {
            let upper_idx = spectrum.partition_point(|&v| v <= eps);
            let lower = if upper_idx == 0 { 0.0 } else { spectrum[upper_idx - 1] };
            let upper = spectrum.get(upper_idx).copied().unwrap_or(f64::INFINITY);
            let g = (eps - lower).min(upper - eps);
            row_g.push(g);

            let near_lower = upper_idx > 0 && (eps - lower).abs() <= dedup_tol;
            let near_upper = upper.is_finite() && (upper - eps).abs() <= dedup_tol;
            row_ok.push(!(near_lower || near_upper));

            gamma = gamma.min(g);
            if upper_idx > 0 && upper.is_finite() {
                delta_grid_gap = delta_grid_gap.min(upper - lower);
            }
        }
        per_cell.push(row_g);
        in_gap.push(row_ok);
    }

    let in_gap_ok = in_gap.iter().flatten().all(|&b| b);
    Ok(ClearanceReport {
        time_values: series.frames().iter().map(|f| f.time_value()).collect(),
        grid: grid.clone(),
        per_cell,
        in_gap,
        gamma,
        gamma_grid,
        delta_gap,
        delta_grid_gap: delta_grid_gap.is_finite().then_some(delta_grid_gap),
        in_gap_ok,
        dedup_tol,
    })
}

/// Minimum distance from any pairwise distance to any grid threshold,
/// across all frames. The probabilistic bounds consume this directly.
pub fn grid_threshold_clearance(series: &PointCloudSeries, grid: &ScaleGrid) -> f64 {
    let mut best = f64::INFINITY;
    for frame in series.frames() {
        for dist in pairwise_distance_values(frame) {
            for &eps in grid.thresholds() {
                best = best.min((dist - eps).abs());
            }
        }
    }
    best
}

/// Inflated local density: for each grid scale, the maximum number of
/// points (self included) within `scale + 2*delta` of any point at any
/// frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalDensityProfile {
    pub delta: f64,
    /// (threshold, lambda) per grid scale, ascending.
    pub lambda_per_scale: Vec<(f64, u64)>,
}

impl LocalDensityProfile {
    pub fn lambdas(&self) -> Vec<u64> {
        self.lambda_per_scale.iter().map(|&(_, l)| l).collect()
    }
}

pub fn local_density(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    delta: f64,
) -> Result<LocalDensityProfile> {
    if delta.is_nan() || delta < 0.0 {
        return Err(crate::error::Error::InvalidParameter("delta must be >= 0".into()));
    }
    let mut lambda_per_scale = Vec::with_capacity(grid.len());
    for &eps in grid.thresholds() {
        let mut lambda = 1u64;
        for frame in series.frames() {
            if frame.is_empty() {
                continue;
            }
            let counts = neighbor_counts(frame, eps + 2.0 * delta)?;
            lambda = lambda.max(*counts.values().max().expect("nonempty frame") as u64);
        }
        lambda_per_scale.push((eps, lambda));
    }
    Ok(LocalDensityProfile { delta, lambda_per_scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedExact,
    NotCertified,
}

/// Outcome of the exact-stability check `delta < gamma / 2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub verdict: Verdict,
    pub delta_input: f64,
    pub gamma: f64,
    /// The certification threshold, gamma / 2.
    pub threshold: f64,
    /// In-gap violations when present, otherwise the cells achieving the
    /// minimum clearance.
    pub failing_cells: Vec<(usize, usize)>,
    pub in_gap_ok: bool,
}

/// Certifies exact stability for a displacement bound `delta`.
///
/// Refuses (NotCertified) whenever any grid value coincides with a critical
/// distance, since the underlying guarantee assumes the in-gap condition.
pub fn certify_exact(report: &ClearanceReport, delta: f64) -> StabilityCertificate {
    let threshold = report.gamma / 2.0;
    if !report.in_gap_ok {
        return StabilityCertificate {
            verdict: Verdict::NotCertified,
            delta_input: delta,
            gamma: report.gamma,
            threshold,
            failing_cells: report.violations(),
            in_gap_ok: false,
        };
    }
    let verdict = if delta < threshold { Verdict::CertifiedExact } else { Verdict::NotCertified };
    StabilityCertificate {
        verdict,
        delta_input: delta,
        gamma: report.gamma,
        threshold,
        failing_cells: report.tightest_cells(),
        in_gap_ok: true,
    }
}

/// Largest possible change of beta_k from moving one point whose inflated
/// neighborhood holds `lambda` points: C(lambda, k+1).
pub fn per_point_betti_budget(lambda: u64, k: usize) -> SatUint {
    binomial(lambda, k as u64 + 1)
}

/// Cumulative l1 change budget for perturbing `m_star` points across the
/// whole diagram: n_t * m_star * sum_j C(lambda_delta(eps_j), k+1).
pub fn global_change_budget(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    delta: f64,
    m_star: u64,
    k: usize,
) -> Result<SatUint> {
    let profile = local_density(series, grid, delta)?;
    Ok(budget_from_lambdas(series.len() as u64, m_star, &profile.lambdas(), k))
}

/// Same bound from precomputed per-scale densities.
pub fn budget_from_lambdas(n_t: u64, m_star: u64, lambdas: &[u64], k: usize) -> SatUint {
    let inner = lambdas
        .iter()
        .fold(SatUint::zero(), |acc, &l| acc.saturating_add(per_point_betti_budget(l, k)));
    inner.mul_scalar(n_t).mul_scalar(m_star)
}

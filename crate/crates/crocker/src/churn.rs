//! Insertion/deletion stability: exact combinatorial simplex-change counts,
//! worst-case and geometry-aware Betti budgets, the time-propagated global
//! bound, and series editing.

use crate::budget::{binomial, SatUint};
use crate::error::{Error, Result};
use crate::geometry::{PointCloudFrame, PointCloudSeries, PointId};
use crate::stability::local_density;
use crate::diagram::ScaleGrid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChurnKind {
    Insert,
    Delete,
}

/// A single modification event: `q` points inserted or removed starting at
/// a given frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChurnEvent {
    /// 1-based frame position within the series; this frame and every later
    /// one are affected.
    pub time_index: usize,
    pub kind: ChurnKind,
    pub affected_ids: Vec<PointId>,
    /// One coordinate vector per affected id for insertions; empty for
    /// deletions.
    #[serde(default)]
    pub inserted_coords: Vec<Vec<f64>>,
}

impl ChurnEvent {
    pub fn q(&self) -> usize {
        self.affected_ids.len()
    }
}

/// Exact count of k-simplices that a single event touching `q` of `m`
/// points can create or destroy.
///
/// For k = 0 exactly q vertices change. For k >= 1 the count splits into
/// simplices entirely among the modified points, C(q, k+1), plus mixed
/// simplices with i modified and k+1-i surviving vertices; deletions draw
/// the surviving vertices from the remaining m - q points.
pub fn exact_simplex_change_count(q: u64, m: u64, k: usize, kind: ChurnKind) -> Result<SatUint> {
    if q < 1 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    if kind == ChurnKind::Delete && q > m {
        return Err(Error::InvalidParameter(format!("cannot delete {q} of {m} points")));
    }
    if k == 0 {
        return Ok(SatUint::exact(q));
    }
    let survivors = match kind {
        ChurnKind::Insert => m,
        ChurnKind::Delete => m - q,
    };
    let mut total = binomial(q, k as u64 + 1);
    for i in 1..=k as u64 {
        total = total.saturating_add(binomial(q, i).saturating_mul(binomial(survivors, k as u64 + 1 - i)));
    }
    Ok(total)
}

/// Worst-case budget on |change of beta_k|: the exact k- and (k+1)-simplex
/// change counts summed, since each simplex modification moves the Betti
/// number by at most one.
pub fn worst_case_betti_budget(q: u64, m: u64, k: usize, kind: ChurnKind) -> Result<SatUint> {
    Ok(exact_simplex_change_count(q, m, k, kind)?
        .saturating_add(exact_simplex_change_count(q, m, k + 1, kind)?))
}

/// Geometry-aware budget q * C(lambda, k+1), with lambda the local density
/// maximized over the pre- and post-modification clouds.
pub fn geometry_aware_budget(q: u64, lambda: u64, k: usize) -> SatUint {
    binomial(lambda, k as u64 + 1).mul_scalar(q)
}

/// Global l1 budget for one event at frame position `event_index` (1-based)
/// in a series of `n_t` frames: (n_t - i + 1) * q * sum_j C(lambda_j, k+1).
/// Bounds for a sequence of events sum per event.
pub fn global_churn_bound(
    n_t: u64,
    event_index: u64,
    q: u64,
    lambdas: &[u64],
    k: usize,
) -> Result<SatUint> {
    if event_index < 1 || event_index > n_t {
        return Err(Error::InvalidParameter(format!(
            "event index {event_index} outside 1..={n_t}"
        )));
    }
    let affected_frames = n_t - event_index + 1;
    let inner = lambdas
        .iter()
        .fold(SatUint::zero(), |acc, &l| acc.saturating_add(geometry_aware_budget(q, l, k)));
    Ok(inner.mul_scalar(affected_frames))
}

/// Per-scale density maximized over two series, for the geometry-aware
/// bounds that compare pre- and post-event clouds.
pub fn churn_lambdas(
    pre: &PointCloudSeries,
    post: &PointCloudSeries,
    grid: &ScaleGrid,
) -> Result<Vec<u64>> {
    let a = local_density(pre, grid, 0.0)?;
    let b = local_density(post, grid, 0.0)?;
    Ok(a.lambdas().iter().zip(b.lambdas()).map(|(&x, y)| x.max(y)).collect())
}

/// Applies an event: frames at positions >= `time_index` (1-based) gain or
/// lose the affected points; earlier frames are untouched. The input series
/// is not modified.
pub fn apply_event(series: &PointCloudSeries, event: &ChurnEvent) -> Result<PointCloudSeries> {
    if event.affected_ids.is_empty() {
        return Err(Error::InvalidEvent("event affects no points".into()));
    }
    if event.time_index < 1 || event.time_index > series.len() {
        return Err(Error::InvalidEvent(format!(
            "time index {} outside 1..={}",
            event.time_index,
            series.len()
        )));
    }
    let distinct: BTreeSet<&PointId> = event.affected_ids.iter().collect();
    if distinct.len() != event.affected_ids.len() {
        return Err(Error::InvalidEvent("affected ids repeat".into()));
    }
    match event.kind {
        ChurnKind::Insert => {
            if event.inserted_coords.len() != event.affected_ids.len() {
                return Err(Error::InvalidEvent(format!(
                    "{} ids but {} coordinate vectors",
                    event.affected_ids.len(),
                    event.inserted_coords.len()
                )));
            }
            for c in &event.inserted_coords {
                if c.len() != series.dim() {
                    return Err(Error::InvalidEvent(format!(
                        "inserted coords have length {}, series dimension is {}",
                        c.len(),
                        series.dim()
                    )));
                }
            }
        }
        ChurnKind::Delete => {
            if !event.inserted_coords.is_empty() {
                return Err(Error::InvalidEvent("deletion carries coordinates".into()));
            }
        }
    }

    let frames = series
        .frames()
        .iter()
        .enumerate()
        .map(|(pos, frame)| {
            if pos + 1 < event.time_index {
                return Ok(frame.clone());
            }
            let mut points: Vec<(PointId, Vec<f64>)> = frame
                .ids()
                .iter()
                .cloned()
                .zip(frame.coords().iter().cloned())
                .collect();
            match event.kind {
                ChurnKind::Insert => {
                    for (id, coords) in event.affected_ids.iter().zip(&event.inserted_coords) {
                        if frame.position_of(id).is_some() {
                            return Err(Error::InvalidEvent(format!(
                                "id {id} already present in frame {}",
                                frame.time_index()
                            )));
                        }
                        points.push((id.clone(), coords.clone()));
                    }
                }
                ChurnKind::Delete => {
                    for id in &event.affected_ids {
                        if frame.position_of(id).is_none() {
                            return Err(Error::InvalidEvent(format!(
                                "id {id} absent from frame {}",
                                frame.time_index()
                            )));
                        }
                    }
                    points.retain(|(id, _)| !event.affected_ids.contains(id));
                }
            }
            PointCloudFrame::new(frame.time_index(), frame.time_value(), points, frame.dim())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointCloudSeries::new(frames)?.with_label(series.label().to_owned()))
}

//! Point-cloud frames and series, pairwise-distance spectra, and gap
//! statistics.
//!
//! Everything downstream (complex construction, clearances, budgets) reads
//! from these types. Frames and series are immutable after construction and
//! safe to share across threads.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Opaque point label. Ordering is lexicographic on the label text, which
/// fixes the deterministic pair ordering used throughout.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointId(pub String);

impl PointId {
    pub fn new(s: impl Into<String>) -> Self {
        PointId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointId({})", self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_owned())
    }
}

/// One labeled snapshot of the moving cloud.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointCloudFrame {
    time_index: usize,
    time_value: f64,
    ids: Vec<PointId>,
    coords: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloudFrame {
    /// Builds a frame, checking that every coordinate vector has length
    /// `dim` and that labels are unique.
    pub fn new(
        time_index: usize,
        time_value: f64,
        points: Vec<(PointId, Vec<f64>)>,
        dim: usize,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (id, c) in &points {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c.len() });
            }
            if !seen.insert(id.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate point id {id} in frame {time_index}"
                )));
            }
        }
        let (ids, coords) = points.into_iter().unzip();
        Ok(Self { time_index, time_value, ids, coords, dim })
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn time_value(&self) -> f64 {
        self.time_value
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> (&PointId, &[f64]) {
        (&self.ids[i], &self.coords[i])
    }

    pub fn position_of(&self, id: &PointId) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn id_set(&self) -> BTreeSet<PointId> {
        self.ids.iter().cloned().collect()
    }
}

/// Ordered frames sharing one ambient dimension. Frames may share a fixed
/// label set (fixed-cardinality mode) or differ per frame (churn mode).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointCloudSeries {
    frames: Vec<PointCloudFrame>,
    dim: usize,
    label: Option<String>,
}

impl PointCloudSeries {
    pub fn new(frames: Vec<PointCloudFrame>) -> Result<Self> {
        let Some(first) = frames.first() else {
            return Err(Error::InvalidParameter("series needs at least one frame".into()));
        };
        let dim = first.dim;
        for w in frames.windows(2) {
            if w[1].time_index <= w[0].time_index {
                return Err(Error::InvalidParameter(format!(
                    "time_index not strictly increasing at frame {}",
                    w[1].time_index
                )));
            }
            if w[1].time_value < w[0].time_value {
                return Err(Error::InvalidParameter(format!(
                    "time_value decreasing at frame {}",
                    w[1].time_index
                )));
            }
        }
        for f in &frames {
            if f.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.dim });
            }
        }
        Ok(Self { frames, dim, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or("series")
    }

    pub fn frames(&self) -> &[PointCloudFrame] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &PointCloudFrame {
        &self.frames[i]
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when every frame carries the same id set.
    pub fn is_fixed_cardinality(&self) -> bool {
        let first = self.frames[0].id_set();
        self.frames.iter().all(|f| f.id_set() == first)
    }
}

/// Sorted distinct pairwise distances of one frame, with near-equal values
/// merged under an absolute tolerance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub frame_time_index: usize,
    pub sorted_distinct: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub dedup_tol: f64,
}

impl DistanceSpectrum {
    /// Smallest gap between consecutive distinct values, if there are at
    /// least two.
    pub fn min_gap(&self) -> Option<f64> {
        self.sorted_distinct
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// All unordered pairs with their Euclidean distance, ordered
/// lexicographically on the id pair.
pub fn pairwise_distances(frame: &PointCloudFrame) -> Result<Vec<((PointId, PointId), f64)>> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let mut order: Vec<usize> = (0..frame.len()).collect();
    order.sort_by(|&a, &b| frame.ids[a].cmp(&frame.ids[b]));
    let mut out = Vec::with_capacity(frame.len() * (frame.len().saturating_sub(1)) / 2);
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            let d = euclidean(&frame.coords[a], &frame.coords[b]);
            out.push(((frame.ids[a].clone(), frame.ids[b].clone()), d));
        }
    }
    Ok(out)
}

/// Distance values only, in no particular order. Internal fast path for
/// spectra and clearance scans.
pub(crate) fn pairwise_distance_values(frame: &PointCloudFrame) -> Vec<f64> {
    let n = frame.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(euclidean(&frame.coords[i], &frame.coords[j]));
        }
    }
    out
}

/// Critical distances of a frame: sorted pairwise distances with values
/// closer than `dedup_tol` merged into one cluster represented by its mean.
pub fn critical_distances(frame: &PointCloudFrame, dedup_tol: f64) -> Result<DistanceSpectrum> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    if dedup_tol < 0.0 || !dedup_tol.is_finite() {
        return Err(Error::InvalidParameter("dedup_tol must be finite and >= 0".into()));
    }
    let mut values = pairwise_distance_values(frame);
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));

    let mut sorted_distinct = Vec::new();
    let mut multiplicities = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j] - values[j - 1] <= dedup_tol {
            j += 1;
        }
        let cluster = &values[i..j];
        sorted_distinct.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
        multiplicities.push(cluster.len());
        i = j;
    }
    Ok(DistanceSpectrum {
        frame_time_index: frame.time_index,
        sorted_distinct,
        multiplicities,
        dedup_tol,
    })
}

/// Minimal spacing between consecutive critical distances over all frames.
pub fn min_gap_delta(series: &PointCloudSeries, dedup_tol: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for frame in series.frames() {
        let spectrum = critical_distances(frame, dedup_tol)?;
        match spectrum.min_gap() {
            Some(g) => best = best.min(g),
            None => {
                return Err(Error::GapUndefined(format!(
                    "frame {} has fewer than two distinct distances",
                    frame.time_index
                )))
            }
        }
    }
    Ok(best)
}

/// Largest per-point displacement between two series with identical frame
/// counts and id sets.
pub fn max_displacement(original: &PointCloudSeries, perturbed: &PointCloudSeries) -> Result<f64> {
    if original.len() != perturbed.len() {
        return Err(Error::SeriesNotComparable(format!(
            "frame counts differ ({} vs {})",
            original.len(),
            perturbed.len()
        )));
    }
    if original.dim() != perturbed.dim() {
        return Err(Error::SeriesNotComparable("ambient dimensions differ".into()));
    }
    let mut worst = 0.0f64;
    for (a, b) in original.frames().iter().zip(perturbed.frames()) {
        if a.id_set() != b.id_set() {
            return Err(Error::SeriesNotComparable(format!(
                "id sets differ at frame {}",
                a.time_index
            )));
        }
        for (id, pa) in a.ids.iter().zip(&a.coords) {
            let j = b.position_of(id).expect("id checked above");
            worst = worst.max(euclidean(pa, &b.coords[j]));
        }
    }
    Ok(worst)
}

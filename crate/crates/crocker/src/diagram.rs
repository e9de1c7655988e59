//! Crocker diagrams: Betti counts tabulated on a fixed scale grid across
//! the frames of a series, plus entrywise l1 distances and signed
//! difference maps between diagrams of matching shape.

use crate::complex::build_vr;
use crate::error::{Error, Result};
use crate::geometry::PointCloudSeries;
use crate::homology::betti_numbers;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Strictly increasing positive scale thresholds. Serializes as a bare
/// array; deserialization re-validates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScaleGrid {
    thresholds: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ScaleGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ScaleGrid> for Vec<f64> {
    fn from(g: ScaleGrid) -> Self {
        g.thresholds
    }
}

impl ScaleGrid {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidParameter("scale grid must be nonempty".into()));
        }
        for &t in &thresholds {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::InvalidParameter(format!("grid value {t} must be positive")));
            }
        }
        for w in thresholds.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(format!(
                    "grid not strictly increasing at {} >= {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { thresholds })
    }

    /// `count` evenly spaced thresholds from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("grid count must be positive".into()));
        }
        if count == 1 {
            return Self::new(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        Self::new((0..count).map(|i| start + step * i as f64).collect())
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

/// Betti counts for one homology dimension on the scale x time grid.
/// `matrix[j][i]` is the count at scale index j and time index i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrockerDiagram {
    pub k: usize,
    pub grid: ScaleGrid,
    pub time_values: Vec<f64>,
    pub matrix: Vec<Vec<u64>>,
    pub provenance: String,
}

impl CrockerDiagram {
    pub fn n_scales(&self) -> usize {
        self.grid.len()
    }

    pub fn n_times(&self) -> usize {
        self.time_values.len()
    }

    fn same_shape(&self, other: &CrockerDiagram) -> Result<()> {
        if self.k != other.k {
            return Err(Error::ShapeMismatch(format!(
                "homology dimensions differ ({} vs {})",
                self.k, other.k
            )));
        }
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("scale grids differ".into()));
        }
        if self.n_times() != other.n_times() {
            return Err(Error::ShapeMismatch(format!(
                "time counts differ ({} vs {})",
                self.n_times(),
                other.n_times()
            )));
        }
        Ok(())
    }
}

/// Signed per-cell difference `b - a` between two diagrams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffMap {
    pub k: usize,
    pub grid: ScaleGrid,
    pub time_values: Vec<f64>,
    pub values: Vec<Vec<i64>>,
}

impl DiffMap {
    pub fn l1(&self) -> u64 {
        self.values.iter().flatten().map(|v| v.unsigned_abs()).sum()
    }
}

/// Builds one Crocker diagram per homology dimension 0..=k_max.
///
/// Cells are independent; frames are processed in parallel and reassembled
/// in index order, so the result does not depend on scheduling.
pub fn build_crocker(
    series: &PointCloudSeries,
    grid: &ScaleGrid,
    k_max: usize,
) -> Result<Vec<CrockerDiagram>> {
    for f in series.frames() {
        if f.is_empty() {
            return Err(Error::EmptyFrame);
        }
    }
    let dim_cap = k_max + 1;
    // columns[i][j] = Betti vector at frame i, scale j
    let columns: Vec<Vec<Vec<usize>>> = series
        .frames()
        .par_iter()
        .map(|frame| {
            grid.thresholds()
                .iter()
                .map(|&eps| {
                    let complex = build_vr(frame, eps, dim_cap)?;
                    Ok(betti_numbers(&complex, k_max)?.values)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let time_values: Vec<f64> = series.frames().iter().map(|f| f.time_value()).collect();
    let diagrams = (0..=k_max)
        .map(|k| {
            let matrix = (0..grid.len())
                .map(|j| (0..series.len()).map(|i| columns[i][j][k] as u64).collect())
                .collect();
            CrockerDiagram {
                k,
                grid: grid.clone(),
                time_values: time_values.clone(),
                matrix,
                provenance: format!(
                    "{} (m up to {}, k_max {}, dim_cap {})",
                    series.label(),
                    series.frames().iter().map(|f| f.len()).max().unwrap_or(0),
                    k_max,
                    dim_cap
                ),
            }
        })
        .collect();
    Ok(diagrams)
}

/// Entrywise l1 distance between two diagrams of the same shape.
pub fn l1_distance(a: &CrockerDiagram, b: &CrockerDiagram) -> Result<u64> {
    a.same_shape(b)?;
    Ok(a.matrix
        .iter()
        .zip(&b.matrix)
        .flat_map(|(ra, rb)| ra.iter().zip(rb))
        .map(|(&x, &y)| x.abs_diff(y))
        .sum())
}

/// Signed per-cell difference map `b - a`.
pub fn diff_map(a: &CrockerDiagram, b: &CrockerDiagram) -> Result<DiffMap> {
    a.same_shape(b)?;
    let values = a
        .matrix
        .iter()
        .zip(&b.matrix)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| y as i64 - x as i64).collect())
        .collect();
    Ok(DiffMap { k: a.k, grid: a.grid.clone(), time_values: a.time_values.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PointCloudFrame, PointId};

    fn static_square_series() -> PointCloudSeries {
        let f = PointCloudFrame::new(
            0,
            0.0,
            vec![
                (PointId::from("a"), vec![0.0, 0.0]),
                (PointId::from("b"), vec![1.0, 0.0]),
                (PointId::from("c"), vec![0.0, 1.0]),
                (PointId::from("d"), vec![1.0, 1.0]),
            ],
            2,
        )
        .unwrap();
        PointCloudSeries::new(vec![f]).unwrap()
    }

    #[test]
    fn square_columns() {
        let grid = ScaleGrid::new(vec![0.5, 1.2, 1.5]).unwrap();
        let d = build_crocker(&static_square_series(), &grid, 1).unwrap();
        assert_eq!(d.len(), 2);
        let b0: Vec<u64> = d[0].matrix.iter().map(|r| r[0]).collect();
        let b1: Vec<u64> = d[1].matrix.iter().map(|r| r[0]).collect();
        assert_eq!(b0, vec![4, 1, 1]);
        assert_eq!(b1, vec![0, 1, 0]);
    }

    #[test]
    fn below_all_distances_counts_points() {
        let grid = ScaleGrid::new(vec![0.25]).unwrap();
        let d = build_crocker(&static_square_series(), &grid, 0).unwrap();
        assert_eq!(d[0].matrix[0][0], 4);
    }

    #[test]
    fn beta0_row_monotone_in_scale() {
        let grid = ScaleGrid::linspace(0.1, 2.0, 12).unwrap();
        let d = build_crocker(&static_square_series(), &grid, 0).unwrap();
        let col: Vec<u64> = d[0].matrix.iter().map(|r| r[0]).collect();
        for w in col.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn l1_and_diff_agree() {
        let grid = ScaleGrid::new(vec![0.5, 1.2, 1.5]).unwrap();
        let a = build_crocker(&static_square_series(), &grid, 1).unwrap();
        assert_eq!(l1_distance(&a[0], &a[0]).unwrap(), 0);

        let mut b = a[0].clone();
        b.matrix[0][0] += 1;
        b.matrix[2][0] += 2;
        assert_eq!(l1_distance(&a[0], &b).unwrap(), 3);
        let dm = diff_map(&a[0], &b).unwrap();
        assert_eq!(dm.l1(), 3);
        assert_eq!(dm.values[0][0], 1);
        assert_eq!(dm.values[2][0], 2);
        assert_eq!(dm.values[1][0], 0);
    }

    #[test]
    fn empty_frame_rejected() {
        let empty = PointCloudFrame::new(0, 0.0, vec![], 2).unwrap();
        let series = PointCloudSeries::new(vec![empty]).unwrap();
        let grid = ScaleGrid::new(vec![1.0]).unwrap();
        assert!(matches!(build_crocker(&series, &grid, 0), Err(crate::error::Error::EmptyFrame)));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g1 = ScaleGrid::new(vec![0.5, 1.2]).unwrap();
        let g2 = ScaleGrid::new(vec![0.5, 1.3]).unwrap();
        let a = build_crocker(&static_square_series(), &g1, 0).unwrap();
        let b = build_crocker(&static_square_series(), &g2, 0).unwrap();
        assert!(l1_distance(&a[0], &b[0]).is_err());
    }

    #[test]
    fn linspace_inclusive_endpoints() {
        let g = ScaleGrid::linspace(0.1, 1.5, 15).unwrap();
        assert_eq!(g.len(), 15);
        assert!((g.thresholds()[0] - 0.1).abs() < 1e-12);
        assert!((g.thresholds()[14] - 1.5).abs() < 1e-12);
        assert!((g.thresholds()[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(ScaleGrid::new(vec![]).is_err());
        assert!(ScaleGrid::new(vec![0.0, 1.0]).is_err());
        assert!(ScaleGrid::new(vec![1.0, 1.0]).is_err());
        assert!(ScaleGrid::new(vec![2.0, 1.0]).is_err());
        // deserialization re-validates
        assert!(serde_json::from_str::<ScaleGrid>("[2.0, 1.0]").is_err());
        let g: ScaleGrid = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert_eq!(g.thresholds(), &[1.0, 2.0]);
    }

    #[test]
    fn build_is_schedule_independent() {
        let series = crate::models::breathing_polygon(&crate::models::BreathingPolygonSpec {
            m: 5,
            n_t: 13,
        });
        let grid = ScaleGrid::linspace(0.2, 3.0, 9).unwrap();
        let a = build_crocker(&series, &grid, 1).unwrap();
        let b = build_crocker(&series, &grid, 1).unwrap();
        assert_eq!(a, b);
    }
}

//! Vietoris-Rips flag complexes.
//!
//! A frame and a scale determine the edge set (pairs at distance <= scale);
//! higher simplices are the cliques of that graph, enumerated up to a
//! dimension cap by ordered neighbor intersection. Vertex indices follow the
//! lexicographic order of point ids, so simplex tuples and their listing
//! order are deterministic.

use crate::error::{Error, Result};
use crate::geometry::{euclidean, PointCloudFrame, PointId};
use std::collections::BTreeMap;

/// One frame's Vietoris-Rips complex at one scale.
#[derive(Clone, Debug)]
pub struct FlagComplex {
    scale: f64,
    dim_cap: usize,
    vertex_ids: Vec<PointId>,
    /// `simplices[d]` lists the d-simplices as strictly increasing vertex
    /// index tuples, in lexicographic order.
    simplices: Vec<Vec<Vec<u32>>>,
}

impl FlagComplex {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Vertex ids in index order (sorted lexicographically).
    pub fn vertex_ids(&self) -> &[PointId] {
        &self.vertex_ids
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn simplex_count(&self, dim: usize) -> usize {
        self.simplices.get(dim).map_or(0, Vec::len)
    }

    pub fn simplices_by_dim(&self, dim: usize) -> &[Vec<u32>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    /// Edge list as id pairs, lexicographic order.
    pub fn edges(&self) -> Vec<(PointId, PointId)> {
        self.simplices_by_dim(1)
            .iter()
            .map(|e| {
                (self.vertex_ids[e[0] as usize].clone(), self.vertex_ids[e[1] as usize].clone())
            })
            .collect()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let key = if a < b { vec![a, b] } else { vec![b, a] };
        self.simplices_by_dim(1).binary_search(&key).is_ok()
    }

    /// Membership test by vertex index tuple (must be strictly increasing).
    pub fn contains_simplex(&self, tuple: &[u32]) -> bool {
        if tuple.is_empty() || tuple.len() > self.dim_cap + 1 {
            return false;
        }
        self.simplices_by_dim(tuple.len() - 1).binary_search_by(|s| s.as_slice().cmp(tuple)).is_ok()
    }
}

/// Builds the Vietoris-Rips complex of `frame` at `scale`, enumerating
/// simplices up to dimension `dim_cap`. Edge inclusion uses the closed
/// threshold (distance <= scale).
pub fn build_vr(frame: &PointCloudFrame, scale: f64, dim_cap: usize) -> Result<FlagComplex> {
    if dim_cap < 1 {
        return Err(Error::InvalidParameter("dim_cap must be at least 1".into()));
    }
    if scale.is_nan() || scale < 0.0 {
        return Err(Error::InvalidParameter("scale must be >= 0".into()));
    }

    let mut order: Vec<usize> = (0..frame.len()).collect();
    order.sort_by(|&a, &b| frame.ids()[a].cmp(&frame.ids()[b]));
    let vertex_ids: Vec<PointId> = order.iter().map(|&i| frame.ids()[i].clone()).collect();
    let coords: Vec<&[f64]> = order.iter().map(|&i| frame.coords()[i].as_slice()).collect();
    let n = coords.len();

    // Neighbor lists over sorted vertex indices, ascending.
    let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if euclidean(coords[i], coords[j]) <= scale {
                nbrs[i].push(j as u32);
                nbrs[j].push(i as u32);
            }
        }
    }

    let mut simplices: Vec<Vec<Vec<u32>>> = vec![Vec::new(); dim_cap + 1];
    let mut current: Vec<u32> = Vec::with_capacity(dim_cap + 1);
    for v in 0..n as u32 {
        let above: Vec<u32> = nbrs[v as usize].iter().copied().filter(|&w| w > v).collect();
        current.push(v);
        expand(&mut current, &above, &nbrs, dim_cap, &mut simplices);
        current.pop();
    }

    Ok(FlagComplex { scale, dim_cap, vertex_ids, simplices })
}

fn expand(
    current: &mut Vec<u32>,
    candidates: &[u32],
    nbrs: &[Vec<u32>],
    dim_cap: usize,
    out: &mut Vec<Vec<Vec<u32>>>,
) {
    out[current.len() - 1].push(current.clone());
    if current.len() == dim_cap + 1 {
        return;
    }
    for (i, &w) in candidates.iter().enumerate() {
        let next = intersect_sorted(&candidates[i + 1..], &nbrs[w as usize]);
        current.push(w);
        expand(current, &next, nbrs, dim_cap, out);
        current.pop();
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// For each point, the number of points within `radius` (self included).
pub fn neighbor_counts(
    frame: &PointCloudFrame,
    radius: f64,
) -> Result<BTreeMap<PointId, usize>> {
    if radius.is_nan() || radius < 0.0 {
        return Err(Error::InvalidParameter("radius must be >= 0".into()));
    }
    let n = frame.len();
    let mut counts = vec![1usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if euclidean(&frame.coords()[i], &frame.coords()[j]) <= radius {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    Ok(frame.ids().iter().cloned().zip(counts).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloudFrame;

    fn pentagon(a: f64) -> PointCloudFrame {
        let pts = (0..5)
            .map(|v| {
                let ang = 2.0 * std::f64::consts::PI * v as f64 / 5.0;
                (PointId::new(format!("v{v}")), vec![a * ang.cos(), a * ang.sin()])
            })
            .collect();
        PointCloudFrame::new(0, 0.0, pts, 2).unwrap()
    }

    fn pentagon_with_insert() -> PointCloudFrame {
        let mut pts: Vec<(PointId, Vec<f64>)> = (0..5)
            .map(|v| {
                let ang = 2.0 * std::f64::consts::PI * v as f64 / 5.0;
                (PointId::new(format!("v{v}")), vec![ang.cos(), ang.sin()])
            })
            .collect();
        pts.push((PointId::new("vstar"), vec![0.096, 0.294]));
        PointCloudFrame::new(0, 0.0, pts, 2).unwrap()
    }

    #[test]
    fn pentagon_band_is_a_bare_cycle() {
        let c = build_vr(&pentagon(1.0), 1.5, 2).unwrap();
        assert_eq!(c.vertex_count(), 5);
        assert_eq!(c.simplex_count(1), 5);
        assert_eq!(c.simplex_count(2), 0);
    }

    #[test]
    fn closed_threshold_fills_equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let f = PointCloudFrame::new(
            0,
            0.0,
            vec![
                (PointId::from("a"), vec![0.0, 0.0]),
                (PointId::from("b"), vec![1.0, 0.0]),
                (PointId::from("c"), vec![0.5, h]),
            ],
            2,
        )
        .unwrap();
        let c = build_vr(&f, 1.0, 2).unwrap();
        assert_eq!(c.simplex_count(1), 3);
        assert_eq!(c.simplex_count(2), 1);
    }

    #[test]
    fn inserted_point_fans_out() {
        let c = build_vr(&pentagon_with_insert(), 1.263567, 2).unwrap();
        // vstar sorts after v0..v4, index 5
        let star = 5u32;
        for v in 0..5u32 {
            assert!(c.has_edge(v, star), "vstar should reach v{v}");
        }
        let fan = c
            .simplices_by_dim(2)
            .iter()
            .filter(|t| t.contains(&star))
            .count();
        assert_eq!(fan, 5);
    }

    #[test]
    fn monotone_in_scale() {
        let f = pentagon_with_insert();
        let small = build_vr(&f, 0.9, 2).unwrap();
        let large = build_vr(&f, 1.4, 2).unwrap();
        for d in 0..=2 {
            for s in small.simplices_by_dim(d) {
                assert!(large.contains_simplex(s));
            }
        }
    }

    #[test]
    fn extreme_scales() {
        let f = pentagon(1.0);
        let below = build_vr(&f, 0.1, 2).unwrap();
        assert_eq!(below.simplex_count(0), 5);
        assert_eq!(below.simplex_count(1), 0);

        let above = build_vr(&f, 10.0, 4).unwrap();
        for d in 0..=4usize {
            let expect = crate::budget::binomial(5, d as u64 + 1).value() as usize;
            assert_eq!(above.simplex_count(d), expect);
        }
    }

    #[test]
    fn dim_cap_must_be_positive() {
        let f = pentagon(1.0);
        assert!(build_vr(&f, 1.0, 0).is_err());
    }

    #[test]
    fn neighbor_counts_match_staircase() {
        let f = pentagon_with_insert();
        let star = PointId::from("vstar");
        assert_eq!(neighbor_counts(&f, 0.8).unwrap()[&star], 2);
        assert_eq!(neighbor_counts(&f, 1.0).unwrap()[&star], 4);
        assert_eq!(neighbor_counts(&f, 1.3).unwrap()[&star], 6);

        let lone = PointCloudFrame::new(0, 0.0, vec![(PointId::from("x"), vec![0.0])], 1).unwrap();
        assert_eq!(neighbor_counts(&lone, 100.0).unwrap()[&PointId::from("x")], 1);
    }

    #[test]
    fn edge_count_matches_distance_census() {
        let f = pentagon_with_insert();
        for scale in [0.5, 0.7, 1.0, 1.2, 1.9, 2.0] {
            let c = build_vr(&f, scale, 2).unwrap();
            let expect = crate::geometry::pairwise_distances(&f)
                .unwrap()
                .iter()
                .filter(|(_, d)| *d <= scale)
                .count();
            assert_eq!(c.simplex_count(1), expect, "scale {scale}");
        }
    }
}

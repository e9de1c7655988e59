//! Analytic generators and closed-form oracles: the breathing polygon, its
//! chord and gap formulas, the pentagon-insertion scenario, and the
//! hexagonal-packing feasibility arithmetic.

use crate::budget::{binomial, SatUint};
use crate::churn::{ChurnEvent, ChurnKind};
use crate::error::{Error, Result};
use crate::geometry::{euclidean, PointCloudFrame, PointCloudSeries, PointId};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Regular m-gon whose circumradius breathes as a(t) = 1 + sin(t)/2,
/// sampled at n_t uniform times on the half-open interval [0, 2*pi).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BreathingPolygonSpec {
    pub m: usize,
    pub n_t: usize,
}

pub fn breathing_radius(t: f64) -> f64 {
    1.0 + 0.5 * t.sin()
}

/// Generates the breathing polygon series. Vertex v of frame i sits at
/// angle 2*pi*v/m on the circle of radius a(t_i), t_i = 2*pi*i/n_t.
pub fn breathing_polygon(spec: &BreathingPolygonSpec) -> PointCloudSeries {
    assert!(spec.m >= 3, "polygon needs at least 3 vertices");
    assert!(spec.n_t >= 1, "need at least one frame");
    let frames = (0..spec.n_t)
        .map(|i| {
            let t = TAU * i as f64 / spec.n_t as f64;
            let a = breathing_radius(t);
            let points = (0..spec.m)
                .map(|v| {
                    let ang = TAU * v as f64 / spec.m as f64;
                    (PointId::new(format!("v{v}")), vec![a * ang.cos(), a * ang.sin()])
                })
                .collect();
            PointCloudFrame::new(i, t, points, 2).expect("generator produces valid frames")
        })
        .collect();
    PointCloudSeries::new(frames)
        .expect("generator produces a valid series")
        .with_label(format!("breathing-polygon-m{}", spec.m))
}

/// The floor(m/2) distinct chord lengths of a regular m-gon with
/// circumradius a, ascending: c_l = 2 a sin(pi l / m).
pub fn chord_lengths(m: usize, a: f64) -> Vec<f64> {
    assert!(m >= 3 && a > 0.0);
    (1..=m / 2).map(|l| 2.0 * a * (PI * l as f64 / m as f64).sin()).collect()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MinGapClosedForm {
    pub delta: f64,
    pub ell_star: usize,
}

/// Closed-form minimal critical-distance gap of the breathing m-gon.
///
/// Consecutive chord gaps shrink with the chord index, so the tightest gap
/// sits at l* = floor(m/2) - 1 for m >= 5 and at l* = 1 for m = 4; it is
/// attained at the minimum radius a = 1/2. A triangle has a single chord
/// family and no gap.
pub fn min_gap_closed_form(m: usize) -> Result<MinGapClosedForm> {
    if m < 4 {
        return Err(Error::GapUndefined("m = 3 has only one distance".into()));
    }
    let ell_star = if m == 4 { 1 } else { m / 2 - 1 };
    let theta = PI / m as f64;
    let a_min = 0.5;
    let delta = 2.0
        * a_min
        * (((ell_star as f64 + 1.0) * theta).sin() - (ell_star as f64 * theta).sin());
    Ok(MinGapClosedForm { delta, ell_star })
}

/// Expected per-band Betti change after the pentagon insertion, valid for
/// scales in [scale_min, scale_max).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TransitionBand {
    pub scale_min: f64,
    pub scale_max: f64,
    pub d_beta0: i64,
    pub d_beta1: i64,
}

/// The engineered insertion scenario: a unit-circumradius pentagon plus a
/// new point at the rounded midpoint of two non-adjacent vertices.
#[derive(Clone, Debug)]
pub struct PentagonInsertionScenario {
    pub base: PointCloudSeries,
    pub event: ChurnEvent,
    pub expected_transitions: Vec<TransitionBand>,
}

pub const PENTAGON_INSERT_COORDS: [f64; 2] = [0.096, 0.294];

/// Builds the scenario together with the analytically expected change
/// bands. Band edges are the exact distances from the inserted point to the
/// pentagon vertices and the pentagon's own chord lengths.
pub fn pentagon_insertion_scenario() -> PentagonInsertionScenario {
    let verts: Vec<Vec<f64>> = (0..5)
        .map(|v| {
            let ang = TAU * v as f64 / 5.0;
            vec![ang.cos(), ang.sin()]
        })
        .collect();
    let base_points = (0..5).map(|v| (PointId::new(format!("v{v}")), verts[v].clone())).collect();
    let base = PointCloudSeries::new(vec![
        PointCloudFrame::new(0, 0.0, base_points, 2).expect("pentagon frame")
    ])
    .expect("pentagon series")
    .with_label("pentagon-insertion-base");

    let star = PENTAGON_INSERT_COORDS.to_vec();
    let d: Vec<f64> = verts.iter().map(|v| euclidean(&star, v)).collect();
    let chords = chord_lengths(5, 1.0);
    let (c1, c2) = (chords[0], chords[1]);

    // Below d[1] the new point is isolated; at d[1] it reaches v1; at d[0]
    // and d[2] it reaches v0 and v2; the pentagon sides arrive at c1; the
    // fan completes once v4 (d[4]) and v3 (d[3]) are reached, filling the
    // cycle that would otherwise survive until c2.
    let edges = [0.0, d[1], d[0], d[2], c1, d[4], d[3], c2, f64::INFINITY];
    let deltas: [(i64, i64); 8] = [
        (1, 0),  // isolated extra component
        (0, 0),  // merged with v1, pentagon still scattered
        (-1, 0), // bridges v0-v1 into one component
        (-2, 0), // star of v0, v1, v2
        (0, 0),  // sides present, both diagrams see one loop
        (0, 0),  // fan missing v3
        (0, -1), // full fan fills the loop early
        (0, 0),  // diagonal c2 fills it in both
    ];
    let expected_transitions = (0..8)
        .map(|i| TransitionBand {
            scale_min: edges[i],
            scale_max: edges[i + 1],
            d_beta0: deltas[i].0,
            d_beta1: deltas[i].1,
        })
        .collect();

    let event = ChurnEvent {
        time_index: 1,
        kind: ChurnKind::Insert,
        affected_ids: vec![PointId::from("vstar")],
        inserted_coords: vec![star],
    };
    PentagonInsertionScenario { base, event, expected_transitions }
}

/// Hexagonal-packing neighbor count within j rings: 1 + 3 j (j + 1).
pub fn hexagonal_density(j: u64) -> u64 {
    assert!(j >= 1);
    1 + 3 * j * (j + 1)
}

/// Inputs for the imaging feasibility arithmetic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilitySpec {
    /// Cell count per frame.
    pub m: u64,
    /// Frame count.
    pub n_t: u64,
    /// Ring indices standing in for the scale grid.
    pub ring_scales: Vec<u64>,
    /// Physical pixel size in micrometers.
    pub pixel_size_um: f64,
    /// Localization error in pixels.
    pub pixel_error_px: f64,
    /// Homology dimension of interest.
    pub k: usize,
    /// Micrometers per ring step, used only by the inflated variant.
    pub scale_pitch_um: f64,
}

impl FeasibilitySpec {
    /// Reference imaging scenario: 500 cells, 51 frames, rings 1..=6,
    /// 0.44 um pixels, 3 px error, first homology.
    pub fn reference() -> Self {
        Self {
            m: 500,
            n_t: 51,
            ring_scales: (1..=6).collect(),
            pixel_size_um: 0.44,
            pixel_error_px: 3.0,
            k: 1,
            scale_pitch_um: 20.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub delta_um: f64,
    pub lambdas: Vec<u64>,
    pub per_scale_budgets: Vec<SatUint>,
    pub inner_sum: SatUint,
    pub global_budget: SatUint,
    pub per_cell_average: f64,
    /// Budgets recomputed with the displacement-inflated ring index, when
    /// requested.
    pub inflated: Option<Box<FeasibilityReport>>,
}

/// Feasibility arithmetic: localization error, per-ring densities, budgets
/// per scale, and the global change budget n_t * m * sum_j C(lambda_j, k+1).
///
/// Densities use the unperturbed ring counts; with `inflate` a companion
/// report widens each ring index by ceil(2*delta / pitch) to show how much
/// the inflation costs.
pub fn epithelial_feasibility(spec: &FeasibilitySpec, inflate: bool) -> FeasibilityReport {
    let delta_um = spec.pixel_error_px * spec.pixel_size_um;
    let report = feasibility_at(spec, 0);
    if inflate {
        let extra = (2.0 * delta_um / spec.scale_pitch_um).ceil() as u64;
        let mut inflated = feasibility_at(spec, extra);
        inflated.inflated = None;
        FeasibilityReport { inflated: Some(Box::new(inflated)), ..report }
    } else {
        report
    }
}

fn feasibility_at(spec: &FeasibilitySpec, ring_inflation: u64) -> FeasibilityReport {
    let delta_um = spec.pixel_error_px * spec.pixel_size_um;
    let lambdas: Vec<u64> =
        spec.ring_scales.iter().map(|&j| hexagonal_density(j + ring_inflation)).collect();
    let per_scale_budgets: Vec<SatUint> =
        lambdas.iter().map(|&l| binomial(l, spec.k as u64 + 1)).collect();
    let inner_sum = per_scale_budgets.iter().fold(SatUint::zero(), |acc, &b| acc.saturating_add(b));
    let global_budget = inner_sum.mul_scalar(spec.n_t).mul_scalar(spec.m);
    let cells = (spec.ring_scales.len() as u64 * spec.n_t).max(1);
    FeasibilityReport {
        delta_um,
        lambdas,
        per_scale_budgets,
        inner_sum,
        global_budget,
        per_cell_average: global_budget.value() as f64 / cells as f64,
        inflated: None,
    }
}

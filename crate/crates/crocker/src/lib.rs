//! Crocker diagrams for evolving point clouds, with verifiable stability
//! certificates and change budgets.
//!
//! A Crocker diagram tabulates the Betti numbers of a Vietoris-Rips
//! filtration on a fixed grid of scales and times. This crate builds the
//! diagrams and quantifies when they can be trusted:
//!
//! * [`geometry`]: labeled point-cloud frames and series, distance
//!   spectra, critical-distance gaps, displacement measurement;
//! * [`complex`]: Vietoris-Rips flag complexes with a dimension cap;
//! * [`homology`]: Betti numbers over GF(2), with a union-find
//!   cross-check for component counts;
//! * [`diagram`]: diagram assembly, entrywise l1 distance, signed
//!   difference maps;
//! * [`stability`]: grid clearances, the exact-stability certificate
//!   (displacements below half the clearance change nothing), and
//!   density-controlled change budgets;
//! * [`noise`]: Gaussian-noise tail bounds and a seeded Monte Carlo
//!   harness;
//! * [`churn`]: insertion/deletion budgets and series editing;
//! * [`models`]: analytic generators (breathing polygons, the pentagon
//!   insertion scenario, hexagonal-packing feasibility arithmetic);
//! * [`io`]: CSV/JSON serialization and SVG heatmaps;
//! * [`harness`]: independent oracles and randomized validation suites.

pub mod budget;
pub mod churn;
pub mod complex;
pub mod diagram;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod homology;
pub mod io;
pub mod models;
pub mod noise;
pub mod stability;
mod union_find;

pub use budget::SatUint;
pub use churn::{ChurnEvent, ChurnKind};
pub use complex::FlagComplex;
pub use diagram::{CrockerDiagram, DiffMap, ScaleGrid};
pub use error::{Error, Result};
pub use geometry::{DistanceSpectrum, PointCloudFrame, PointCloudSeries, PointId};
pub use homology::BettiVector;
pub use noise::NoiseModel;
pub use stability::{ClearanceReport, LocalDensityProfile, StabilityCertificate, Verdict};

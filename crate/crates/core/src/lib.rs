//! Spherical-function (droplet) representation and Wigner-type tomography of
//! coupled spin-1/2 systems, with an idealized NMR simulator as the
//! measurement back end.

pub mod config;
pub mod droplet;
pub mod error;
pub mod export;
pub mod lisa;
pub mod nmr;
pub mod plan;
pub mod rng;
pub mod sphere;
pub mod spin;
pub mod states;
pub mod tables;
pub mod tomo;

pub use config::ExperimentConfig;
pub use droplet::{DropletFunction, SphericalExpansion};
pub use error::{Error, Result};
pub use lisa::{decompose, full_basis, reconstruct, DropletLabel};
pub use plan::MeasurementPlan;
pub use spin::{Axis, CartesianLabel, Operator, C64};
pub use tomo::{Backend, NoiseModel, SampleSet, SamplingPath, ScanOptions, TomographyGrid};

//! Modeling and analysis toolkit for piezoelectric bulk-acoustic-wave (BAW)
//! resonators coupled to microwave cavities.
//!
//! The crate covers the full quantitative chain of such an experiment:
//!
//! - [`model`] — domain types, SI unit discipline and config ingestion
//!   ([`config`]);
//! - [`effmass`] — effective modal mass by axisymmetric quadrature of an
//!   analytic trapped-mode shape;
//! - [`coupling`] — zero-point fluctuation, piezoelectric coupling constant,
//!   frequency pull factor, single-photon coupling rate and cooperativity;
//! - [`readout`] — driven mechanical response, FM sidebands and simulated
//!   phase-bridge mixer traces;
//! - [`fitting`] — Lorentzian resonance fits, reflection coupling
//!   coefficients and unloaded Q;
//! - [`report`] — trace CSV I/O and the consistency checker that compares
//!   computed quantities against published reference values.
//!
//! Every capability has a runnable demo under `examples/`; the `bawcav`
//! binary exposes the same operations as subcommands (`check`, `coupling`,
//! `effmass`, `simulate`, `fit`).

pub mod config;
pub mod coupling;
pub mod effmass;
mod error;
pub mod fitting;
pub mod model;
pub mod readout;
pub mod report;

pub use config::{load_config, parse_config, save_config, to_config_string};
pub use error::{Error, Result};
pub use model::{
    validate, AcousticMode, BvdBranch, CavityMode, CrystalGeometry, MaterialProperties,
    ModeEntry, ModeFamily, PhysicalConstants, SystemConfig, Violation,
};
pub use readout::Spectrum;
pub use report::{consistency_check, ConsistencyReport, ReportFormat, Status};

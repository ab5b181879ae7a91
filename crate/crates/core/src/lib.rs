//! Quantum heat engines and photocells with lower-level coherence.
//!
//! * [`model`]: constants, baths, level schemes, coherence and populations.
//! * [`lwi`]: the laser as a heat engine; Carnot efficiency, gain, and the
//!   coherence-enhanced threshold efficiency.
//! * [`photocell`]: open-circuit voltage limits and the kinetic P–j model.
//! * [`carnot`]: the phase-controlled photo-Carnot engine.
//! * [`oracle`]: independent brute-force checks of all of the above.

pub mod carnot;
pub mod error;
pub mod kinetics;
pub mod lwi;
pub mod model;
pub mod mpp;
pub mod oracle;
pub mod photocell;

pub use carnot::PhaseoniumConfig;
pub use error::{Error, Result};
pub use kinetics::{Generator, Transition};
pub use lwi::{EfficiencyReport, LaserEngineConfig};
pub use model::{
    boltzmann_ratio, population_ratio_ba, CoherenceSpec, LevelScheme, PhysicalConstants, Reservoir,
    SteadyState, BOLTZMANN_EV_PER_K,
};
pub use mpp::CurveSeries;
pub use photocell::{CellConfig, CellVariant, KineticRates};

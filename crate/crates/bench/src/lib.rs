//! Fixed inputs shared by the benchmarks.

use std::f64::consts::PI;

use qhe_core::{
    CellConfig, CellVariant, CoherenceSpec, KineticRates, LaserEngineConfig, Reservoir,
};

/// 6000 K / 300 K engine at 1 eV with |ρ_bc| = 0.01, phase π.
pub fn reference_laser() -> LaserEngineConfig {
    LaserEngineConfig::new(
        Reservoir::new(6000.0, 1.0).unwrap(),
        300.0,
        CoherenceSpec::new(0.01, PI).unwrap(),
        1.0,
    )
    .unwrap()
}

pub fn reference_cell(variant: CellVariant) -> (CellConfig, KineticRates) {
    (
        CellConfig::reference(variant),
        KineticRates::reference(variant),
    )
}

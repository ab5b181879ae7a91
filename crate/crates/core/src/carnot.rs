//! Photo-Carnot engine driven by phase-coherent atoms.
//!
//! The operating efficiency is η_φ = η − π̄ cos Φ, where η is the ordinary
//! efficiency of the cycle, Φ the phase of the atomic coherence and π̄ a small
//! dimensionless coherence parameter supplied by the caller. With both baths
//! at one temperature (η = 0) a phase with cos Φ < 0 still extracts work.
//! Work is accounted per quasi-static cycle as W = η_φ · Q.

use std::f64::consts::TAU;

use crate::error::{non_negative, positive, Error, Result};
use crate::mpp::CurveSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseoniumConfig {
    base_efficiency: f64,
    coherence_parameter: f64,
    phase: f64,
    heat_in: f64,
}

impl PhaseoniumConfig {
    pub fn new(
        base_efficiency: f64,
        coherence_parameter: f64,
        phase: f64,
        heat_in: f64,
    ) -> Result<Self> {
        non_negative("base_efficiency", base_efficiency)?;
        if base_efficiency >= 1.0 {
            return Err(Error::Domain {
                field: "base_efficiency",
                value: base_efficiency,
                reason: "must be < 1",
            });
        }
        non_negative("coherence_parameter", coherence_parameter)?;
        if !phase.is_finite() {
            return Err(Error::Domain {
                field: "phase",
                value: phase,
                reason: "must be finite",
            });
        }
        positive("heat_in", heat_in)?;
        Ok(Self {
            base_efficiency,
            coherence_parameter,
            phase,
            heat_in,
        })
    }

    /// Engine between two baths at the given temperatures.
    pub fn between(
        hot_temperature: f64,
        cold_temperature: f64,
        coherence_parameter: f64,
        phase: f64,
        heat_in: f64,
    ) -> Result<Self> {
        let eta = crate::lwi::carnot_efficiency(hot_temperature, cold_temperature)?;
        Self::new(eta, coherence_parameter, phase, heat_in)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn base_efficiency(&self) -> f64 {
        self.base_efficiency
    }

    pub fn coherence_parameter(&self) -> f64 {
        self.coherence_parameter
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn heat_in(&self) -> f64 {
        self.heat_in
    }
}

/// η − π̄ cos Φ.
pub fn phi_efficiency(config: &PhaseoniumConfig) -> f64 {
    config.base_efficiency - config.coherence_parameter * config.phase.cos()
}

/// Work per cycle η_φ · Q.
pub fn work_per_cycle(config: &PhaseoniumConfig) -> f64 {
    phi_efficiency(config) * config.heat_in
}

/// Work per cycle from a single bath, −Q π̄ cos Φ.
pub fn single_bath_work(config: &PhaseoniumConfig) -> Result<f64> {
    if config.base_efficiency != 0.0 {
        return Err(Error::Misuse(
            "single_bath_work needs base_efficiency = 0; use phi_efficiency for two baths",
        ));
    }
    Ok(-config.heat_in * config.coherence_parameter * config.phase.cos())
}

/// The phases 2πk/n for k in 0..n.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// η_φ over `phases` points evenly covering [0, 2π).
pub fn phase_sweep(config: &PhaseoniumConfig, phases: usize) -> Result<CurveSeries> {
    if phases == 0 {
        return Err(Error::Domain {
            field: "phases",
            value: 0.0,
            reason: "must be >= 1",
        });
    }
    let points = phase_grid(phases)
        .into_iter()
        .map(|phi| (phi, phi_efficiency(&config.with_phase(phi))))
        .collect();
    CurveSeries::new(points, "phi(rad)", "eta_phi")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg(eta: f64, pi_bar: f64, phase: f64) -> PhaseoniumConfig {
        PhaseoniumConfig::new(eta, pi_bar, phase, 1.0).unwrap()
    }

    #[test]
    fn efficiency_examples() {
        assert!((phi_efficiency(&cfg(0.3, 0.1, FRAC_PI_2)) - 0.3).abs() < 1e-16);
        assert!((phi_efficiency(&cfg(0.3, 0.1, PI)) - 0.4).abs() < 1e-15);
        assert_eq!(phi_efficiency(&cfg(0.0, 0.05, 0.0)), -0.05);
    }

    #[test]
    fn single_bath_examples() {
        assert!(single_bath_work(&cfg(0.0, 0.1, FRAC_PI_2)).unwrap().abs() < 1e-17);
        assert_eq!(single_bath_work(&cfg(0.0, 0.1, PI)).unwrap(), 0.1);
        assert_eq!(single_bath_work(&cfg(0.0, 0.1, 0.0)).unwrap(), -0.1);
        assert!(matches!(
            single_bath_work(&cfg(0.3, 0.1, PI)),
            Err(Error::Misuse(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(PhaseoniumConfig::new(1.0, 0.1, 0.0, 1.0).is_err());
        assert!(PhaseoniumConfig::new(-0.1, 0.1, 0.0, 1.0).is_err());
        assert!(PhaseoniumConfig::new(0.3, -0.1, 0.0, 1.0).is_err());
        assert!(PhaseoniumConfig::new(0.3, 0.1, 0.0, 0.0).is_err());
        let c = PhaseoniumConfig::between(600.0, 300.0, 0.1, PI, 2.0).unwrap();
        assert_eq!(c.base_efficiency(), 0.5);
        assert!((work_per_cycle(&c) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn eight_phase_sweep_peaks_at_pi() {
        let s = phase_sweep(&cfg(0.3, 0.1, 0.0), 8).unwrap();
        assert_eq!(s.len(), 8);
        let (phi, eta) = s.peak();
        assert_eq!(phi, PI);
        assert!((eta - 0.4).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn antisymmetric_under_phase_shift(
            eta in 0.0f64..0.99, pi_bar in 0.0f64..0.2, phi in 0.0f64..TAU,
        ) {
            let a = phi_efficiency(&cfg(eta, pi_bar, phi));
            let b = phi_efficiency(&cfg(eta, pi_bar, phi + PI));
            prop_assert!((a + b - 2.0 * eta).abs() < 1e-12);
        }

        #[test]
        fn extremes_bracket_every_phase(
            eta in 0.0f64..0.99, pi_bar in 0.0f64..0.2, phi in 0.0f64..TAU,
        ) {
            let v = phi_efficiency(&cfg(eta, pi_bar, phi));
            prop_assert!(v <= eta + pi_bar + 1e-15);
            prop_assert!(v >= eta - pi_bar - 1e-15);
        }
    }
}

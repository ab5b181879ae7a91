//! The thermally pumped laser as a quantum heat engine, with and without
//! coherence in the lower laser doublet.
//!
//! Level scheme: ground `g`, upper laser level `a` pumped from `g` by the hot
//! bath (photon energy ħν_s, temperature T_h), and the lower doublet `b`/`c`
//! coupled to `g` by the cold bath (ħν_c, T_c). The laser photon carries
//! ħν_ℓ = ħν_s − ħν_c. Populations of `b` and `c` are taken equal.

use num_complex::Complex64;

use crate::error::{non_negative, positive, Error, Result};
use crate::model::{thermal_energy, CoherenceSpec, Reservoir, SteadyState};

/// Label of the upper laser level in states passed to [`gain_factor`].
pub const UPPER_LEVEL: &str = "a";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserEngineConfig {
    hot: Reservoir,
    cold_temperature: f64,
    coherence: CoherenceSpec,
    gain_constant: f64,
    single_bath: bool,
}

impl LaserEngineConfig {
    /// Engine between a hot pump bath and a colder entropy sink.
    pub fn new(
        hot: Reservoir,
        cold_temperature: f64,
        coherence: CoherenceSpec,
        gain_constant: f64,
    ) -> Result<Self> {
        positive("cold_temperature", cold_temperature)?;
        positive("gain_constant", gain_constant)?;
        if hot.temperature() <= cold_temperature {
            return Err(Error::Domain {
                field: "cold_temperature",
                value: cold_temperature,
                reason: "must be below the hot temperature (use single_bath for T_c = T_h)",
            });
        }
        Ok(Self {
            hot,
            cold_temperature,
            coherence,
            gain_constant,
            single_bath: false,
        })
    }

    /// Both baths at the hot temperature.
    pub fn single_bath(
        hot: Reservoir,
        coherence: CoherenceSpec,
        gain_constant: f64,
    ) -> Result<Self> {
        positive("gain_constant", gain_constant)?;
        Ok(Self {
            hot,
            cold_temperature: hot.temperature(),
            coherence,
            gain_constant,
            single_bath: true,
        })
    }

    pub fn hot(&self) -> &Reservoir {
        &self.hot
    }

    pub fn cold_temperature(&self) -> f64 {
        self.cold_temperature
    }

    pub fn coherence(&self) -> &CoherenceSpec {
        &self.coherence
    }

    pub fn gain_constant(&self) -> f64 {
        self.gain_constant
    }

    pub fn is_single_bath(&self) -> bool {
        self.single_bath
    }

    pub fn with_coherence(mut self, coherence: CoherenceSpec) -> Self {
        self.coherence = coherence;
        self
    }
}

/// Quantum-efficiency breakdown of a laser engine at threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub carnot: f64,
    pub delta_eta_first_order: f64,
    pub eta_exact: f64,
    /// ħν_ℓ in eV.
    pub laser_photon_energy: f64,
    /// ħν_c in eV.
    pub entropy_sink_photon_energy: f64,
}

impl EfficiencyReport {
    /// Carnot value plus the weak-coherence correction.
    pub fn eta_first_order(&self) -> f64 {
        self.carnot + self.delta_eta_first_order
    }
}

/// 1 − T_c / T_h.
pub fn carnot_efficiency(hot_temperature: f64, cold_temperature: f64) -> Result<f64> {
    positive("hot_temperature", hot_temperature)?;
    non_negative("cold_temperature", cold_temperature)?;
    Ok(1.0 - cold_temperature / hot_temperature)
}

/// The bracket of the field equation Ė = κ(2ρ_aa − ρ_bb − ρ_cc − ρ_bc − ρ_cb)E.
///
/// Positive values mean the field grows. With negative Re ρ_bc this can be
/// positive even when ρ_aa does not exceed the lower populations.
pub fn gain_factor(state: &SteadyState) -> Result<f64> {
    let (rho_bb, rho_cc) = state
        .doublet_populations()
        .ok_or_else(|| Error::Configuration("state has no lower-level doublet".into()))?;
    let rho_aa = state.population(UPPER_LEVEL).ok_or_else(|| {
        Error::Configuration(format!("state has no upper laser level `{UPPER_LEVEL}`"))
    })?;
    Ok(gain_from_parts(
        rho_aa,
        rho_bb,
        rho_cc,
        state.coherence_bc(),
    ))
}

fn gain_from_parts(rho_aa: f64, rho_bb: f64, rho_cc: f64, rho_bc: Complex64) -> f64 {
    // ρ_bc + ρ_cb = 2 Re ρ_bc
    2.0 * rho_aa - rho_bb - rho_cc - 2.0 * rho_bc.re
}

/// Field amplitude after evolving Ė = κ g E, by both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAmplitude {
    pub closed_form: f64,
    pub stepped: f64,
}

/// E0 · exp(κ g t).
pub fn field_closed_form(gain: f64, kappa: f64, initial: f64, duration: f64) -> Result<f64> {
    check_field_inputs(kappa, initial, duration)?;
    Ok(initial * (kappa * gain * duration).exp())
}

/// Explicit Euler integration of Ė = κ g E with `steps` equal steps.
pub fn field_stepped(
    gain: f64,
    kappa: f64,
    initial: f64,
    duration: f64,
    steps: usize,
) -> Result<f64> {
    check_field_inputs(kappa, initial, duration)?;
    if steps == 0 {
        return Err(Error::Domain {
            field: "steps",
            value: 0.0,
            reason: "must be >= 1",
        });
    }
    let growth = 1.0 + kappa * gain * duration / steps as f64;
    Ok((0..steps).fold(initial, |field, _| field * growth))
}

fn check_field_inputs(kappa: f64, initial: f64, duration: f64) -> Result<()> {
    positive("kappa", kappa)?;
    non_negative("initial field", initial)?;
    non_negative("duration", duration)?;
    Ok(())
}

/// Evolves the laser field for `duration` at the gain of `state`.
pub fn integrate_field(
    state: &SteadyState,
    kappa: f64,
    initial: f64,
    duration: f64,
    steps: usize,
) -> Result<FieldAmplitude> {
    let gain = gain_factor(state)?;
    Ok(FieldAmplitude {
        closed_form: field_closed_form(gain, kappa, initial, duration)?,
        stepped: field_stepped(gain, kappa, initial, duration, steps)?,
    })
}

/// Cold-bath photon energy at the zero-coherence threshold, ħν_s · T_c / T_h.
pub fn threshold_nu_c(hot: &Reservoir, cold_temperature: f64) -> Result<f64> {
    positive("cold_temperature", cold_temperature)?;
    Ok(hot.photon_energy() * cold_temperature / hot.temperature())
}

/// ρ_bb / ρ_aa set by the two baths when the laser photon carries `laser_photon_energy`.
pub fn lower_to_upper_ratio(config: &LaserEngineConfig, laser_photon_energy: f64) -> Result<f64> {
    let hot = config.hot();
    let sink = hot.photon_energy() - laser_photon_energy;
    let exponent = sink / thermal_energy(config.cold_temperature())
        - hot.photon_energy() / thermal_energy(hot.temperature());
    Ok((-exponent).exp())
}

/// Solves the coherent threshold condition exactly for the laser photon energy.
///
/// The threshold relation is linear in ħν_ℓ, giving
/// ħν_ℓ = ħν_s (1 − T_c/T_h) + kT_c ln(1 − Re ρ_bc / ρ_aa).
pub fn exact_coherent_efficiency(
    config: &LaserEngineConfig,
    rho_aa: f64,
) -> Result<EfficiencyReport> {
    check_rho_aa(rho_aa)?;
    let hot = config.hot();
    let carnot = carnot_efficiency(hot.temperature(), config.cold_temperature())?;
    let kt_cold = thermal_energy(config.cold_temperature());
    let re_coherence = config.coherence().real_part();
    let argument = 1.0 - re_coherence / rho_aa;
    if argument <= 0.0 {
        return Err(Error::CoherenceTooLarge {
            argument,
            re_coherence,
            rho_aa,
        });
    }
    let laser_photon_energy =
        hot.photon_energy() * carnot + kt_cold * (-re_coherence / rho_aa).ln_1p();
    Ok(EfficiencyReport {
        carnot,
        delta_eta_first_order: first_order_delta_eta(config, rho_aa)?,
        eta_exact: laser_photon_energy / hot.photon_energy(),
        laser_photon_energy,
        entropy_sink_photon_energy: hot.photon_energy() - laser_photon_energy,
    })
}

/// Weak-coherence efficiency gain kT_c |ρ_bc| / (ħν_s ρ_aa).
pub fn first_order_delta_eta(config: &LaserEngineConfig, rho_aa: f64) -> Result<f64> {
    check_rho_aa(rho_aa)?;
    let kt_cold = thermal_energy(config.cold_temperature());
    Ok(kt_cold * config.coherence().magnitude() / (config.hot().photon_energy() * rho_aa))
}

fn check_rho_aa(rho_aa: f64) -> Result<()> {
    positive("rho_aa", rho_aa)?;
    if rho_aa > 1.0 {
        return Err(Error::Domain {
            field: "rho_aa",
            value: rho_aa,
            reason: "must be <= 1",
        });
    }
    Ok(())
}

/// Reports for a sweep over coherence magnitudes, in input order.
pub fn efficiency_sweep(
    config: &LaserEngineConfig,
    rho_aa: f64,
    magnitudes: &[f64],
) -> Result<Vec<EfficiencyReport>> {
    let phase = config.coherence().phase();
    magnitudes
        .iter()
        .map(|&m| {
            let c = CoherenceSpec::new(m, phase)?;
            exact_coherent_efficiency(&config.with_coherence(c), rho_aa)
        })
        .collect()
}

/// Four-level state at the populations the baths impose for `laser_photon_energy`,
/// carrying the configured doublet coherence.
pub fn thermal_state(
    config: &LaserEngineConfig,
    rho_aa: f64,
    laser_photon_energy: f64,
) -> Result<SteadyState> {
    check_rho_aa(rho_aa)?;
    let rho_bb = rho_aa * lower_to_upper_ratio(config, laser_photon_energy)?;
    let rho_gg = 1.0 - rho_aa - 2.0 * rho_bb;
    if rho_gg < 0.0 {
        return Err(Error::Configuration(format!(
            "populations rho_aa = {rho_aa}, rho_bb = rho_cc = {rho_bb} exceed unit trace"
        )));
    }
    SteadyState::new(
        [
            ("g", rho_gg),
            ("b", rho_bb),
            ("c", rho_bb),
            (UPPER_LEVEL, rho_aa),
        ],
        Some(("b", "c")),
        config.coherence().value(),
    )
}

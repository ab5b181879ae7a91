//! Shared domain types: constants, thermal baths, level schemes, coherence and
//! steady-state populations.
//!
//! Units throughout the crate: energies in eV, temperatures in K. Transition
//! frequencies are carried as photon energies ħν, so no ħ ever appears.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{finite, non_negative, positive, Error, Result};

/// Boltzmann constant in eV/K (CODATA 2018, exact).
pub const BOLTZMANN_EV_PER_K: f64 = 8.617333262e-5;

/// Tolerance on the doublet positivity bound |ρ_bc| ≤ sqrt(ρ_bb ρ_cc).
const POSITIVITY_SLACK: f64 = 1e-12;

/// Physical constants read by every model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub boltzmann_k: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        boltzmann_k: BOLTZMANN_EV_PER_K,
    };

    /// Thermal energy kT in eV.
    pub fn thermal_energy(&self, temperature: f64) -> f64 {
        self.boltzmann_k * temperature
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Thermal energy kT in eV for a temperature in K.
pub fn thermal_energy(temperature: f64) -> f64 {
    PhysicalConstants::CODATA.thermal_energy(temperature)
}

/// A thermal bath: its temperature and the photon energy of the transition it drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservoir {
    temperature: f64,
    photon_energy: f64,
}

impl Reservoir {
    pub fn new(temperature: f64, photon_energy: f64) -> Result<Self> {
        positive("temperature", temperature)?;
        positive("photon_energy", photon_energy)?;
        Ok(Self {
            temperature,
            photon_energy,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn photon_energy(&self) -> f64 {
        self.photon_energy
    }

    /// ħν / kT for this bath.
    pub fn reduced_energy(&self) -> f64 {
        self.photon_energy / thermal_energy(self.temperature)
    }

    /// Mean photon number of the driven mode, 1 / (exp(ħν/kT) − 1).
    pub fn mean_occupation(&self) -> f64 {
        1.0 / self.reduced_energy().exp_m1()
    }
}

/// Mean photon number of a thermal mode: 1 / (exp(ħν/kT) − 1).
pub fn mean_photon_number(photon_energy: f64, temperature: f64) -> Result<f64> {
    Ok(Reservoir::new(temperature, photon_energy)?.mean_occupation())
}

/// Occupation ratio n_upper / n_lower of two levels in equilibrium at `temperature`.
///
/// Equals `exp(-(upper_energy - lower_energy) / kT)`, and exactly 1 for equal energies.
pub fn boltzmann_ratio(upper_energy: f64, lower_energy: f64, temperature: f64) -> Result<f64> {
    finite("upper_energy", upper_energy)?;
    finite("lower_energy", lower_energy)?;
    positive("temperature", temperature)?;
    Ok((-(upper_energy - lower_energy) / thermal_energy(temperature)).exp())
}

/// Lower-laser-level to upper-laser-level ratio n_b / n_a of the thermally
/// pumped three-level engine.
///
/// The ratio is built as (n_b / n_g)(n_g / n_a): the cold bath sets b against
/// the ground state, the hot bath sets the ground state against a. It equals 1
/// exactly at the zero-coherence lasing threshold ħν_c / kT_c = ħν_s / kT_h.
pub fn population_ratio_ba(hot: &Reservoir, cold: &Reservoir) -> Result<f64> {
    let b_over_g = boltzmann_ratio(cold.photon_energy, 0.0, cold.temperature)?;
    let g_over_a = boltzmann_ratio(0.0, hot.photon_energy, hot.temperature)?;
    Ok(b_over_g * g_over_a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub label: String,
    pub energy: f64,
}

/// Named energy levels plus the pair (if any) forming the coherent doublet.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme {
    levels: Vec<Level>,
    doublet: Option<(usize, usize)>,
}

impl LevelScheme {
    pub fn new<S: Into<String>>(
        levels: impl IntoIterator<Item = (S, f64)>,
        doublet: Option<(&str, &str)>,
    ) -> Result<Self> {
        let levels: Vec<Level> = levels
            .into_iter()
            .map(|(label, energy)| Level {
                label: label.into(),
                energy,
            })
            .collect();
        if levels.is_empty() {
            return Err(Error::Configuration("level scheme has no levels".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            finite("level energy", level.energy)?;
            if levels[..i].iter().any(|l| l.label == level.label) {
                return Err(Error::Configuration(format!(
                    "duplicate level label `{}`",
                    level.label
                )));
            }
        }
        let mut scheme = Self {
            levels,
            doublet: None,
        };
        if let Some((b, c)) = doublet {
            if b == c {
                return Err(Error::Configuration(format!(
                    "doublet needs two distinct levels, got `{b}` twice"
                )));
            }
            let ib = scheme.require(b)?;
            let ic = scheme.require(c)?;
            scheme.doublet = Some((ib, ic));
        }
        Ok(scheme)
    }

    /// Ground `g`, lower doublet `b`/`c` centred on the cold-bath photon energy,
    /// and upper laser level `a` at the pump photon energy.
    pub fn lwi_laser(
        pump_photon_energy: f64,
        sink_photon_energy: f64,
        doublet_splitting: f64,
    ) -> Result<Self> {
        non_negative("doublet_splitting", doublet_splitting)?;
        let half = 0.5 * doublet_splitting;
        Self::new(
            [
                ("g", 0.0),
                ("b", sink_photon_energy + half),
                ("c", sink_photon_energy - half),
                ("a", pump_photon_energy),
            ],
            Some(("b", "c")),
        )
    }

    /// Valence/ground state `g` and a single conduction level `c`.
    pub fn photocell_two_level(gap_energy: f64) -> Result<Self> {
        Self::new([("g", 0.0), ("c", gap_energy)], None)
    }

    /// Ground `g` and the conduction doublet `c1`/`c2` split symmetrically about the gap.
    pub fn photocell_doublet(gap_energy: f64, half_splitting: f64) -> Result<Self> {
        non_negative("half_splitting", half_splitting)?;
        Self::new(
            [
                ("g", 0.0),
                ("c1", gap_energy + half_splitting),
                ("c2", gap_energy - half_splitting),
            ],
            Some(("c1", "c2")),
        )
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.levels.iter().map(|l| l.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.label == label)
    }

    pub fn energy(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.levels[i].energy)
    }

    pub fn doublet(&self) -> Option<(&str, &str)> {
        self.doublet
            .map(|(b, c)| (self.levels[b].label.as_str(), self.levels[c].label.as_str()))
    }

    /// |E_b − E_c| of the doublet, zero when there is none.
    pub fn doublet_splitting(&self) -> f64 {
        self.doublet
            .map(|(b, c)| (self.levels[b].energy - self.levels[c].energy).abs())
            .unwrap_or(0.0)
    }

    fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Configuration(format!("unknown level `{label}`")))
    }
}

/// Off-diagonal doublet element ρ_bc = magnitude · e^{i phase}, plus the drive
/// half-splitting ħν₀ used by the coherently driven photocell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSpec {
    magnitude: f64,
    phase: f64,
    drive_half_splitting: f64,
}

impl CoherenceSpec {
    pub const MAX_MAGNITUDE: f64 = 0.5;

    /// Phase is wrapped into [0, 2π).
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        non_negative("coherence magnitude", magnitude)?;
        if magnitude > Self::MAX_MAGNITUDE {
            return Err(Error::Domain {
                field: "coherence magnitude",
                value: magnitude,
                reason: "must be <= 0.5",
            });
        }
        finite("coherence phase", phase)?;
        Ok(Self {
            magnitude,
            phase: wrap_phase(phase),
            drive_half_splitting: 0.0,
        })
    }

    /// Coherence with the default phase π.
    pub fn with_magnitude(magnitude: f64) -> Result<Self> {
        Self::new(magnitude, std::f64::consts::PI)
    }

    pub fn none() -> Self {
        Self {
            magnitude: 0.0,
            phase: std::f64::consts::PI,
            drive_half_splitting: 0.0,
        }
    }

    /// Pure coherent drive of strength ħν₀ with no lower-level coherence.
    pub fn drive(half_splitting: f64) -> Result<Self> {
        Self::none().with_drive_half_splitting(half_splitting)
    }

    pub fn with_drive_half_splitting(mut self, half_splitting: f64) -> Result<Self> {
        non_negative("drive_half_splitting", half_splitting)?;
        self.drive_half_splitting = half_splitting;
        Ok(self)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn drive_half_splitting(&self) -> f64 {
        self.drive_half_splitting
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    /// Re ρ_bc, the only part that enters the gain.
    pub fn real_part(&self) -> f64 {
        self.magnitude * self.phase.cos()
    }
}

impl Default for CoherenceSpec {
    fn default() -> Self {
        Self::none()
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Normalized level populations plus the single doublet coherence ρ_bc.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    labels: Vec<String>,
    populations: Vec<f64>,
    coherence_bc: Complex64,
    doublet: Option<(usize, usize)>,
    raw_sum: f64,
}

impl SteadyState {
    /// Builds a state from unnormalized populations. The populations are
    /// divided by their sum, which is kept as [`SteadyState::raw_sum`].
    pub fn new<S: Into<String>>(
        populations: impl IntoIterator<Item = (S, f64)>,
        doublet: Option<(&str, &str)>,
        coherence_bc: Complex64,
    ) -> Result<Self> {
        let (labels, values): (Vec<String>, Vec<f64>) =
            populations.into_iter().map(|(l, p)| (l.into(), p)).unzip();
        Self::from_parts(labels, values, doublet, coherence_bc)
    }

    /// Populations only, no doublet.
    pub fn incoherent<S: Into<String>>(
        populations: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self> {
        Self::new(populations, None, Complex64::new(0.0, 0.0))
    }

    pub(crate) fn from_parts(
        labels: Vec<String>,
        mut values: Vec<f64>,
        doublet: Option<(&str, &str)>,
        coherence_bc: Complex64,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Configuration("state has no levels".into()));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::Configuration(format!(
                    "duplicate level label `{label}`"
                )));
            }
        }
        for &p in &values {
            non_negative("population", p)?;
        }
        let raw_sum: f64 = values.iter().sum();
        if raw_sum <= 0.0 {
            return Err(Error::Configuration(
                "populations sum to zero; cannot normalize".into(),
            ));
        }
        if raw_sum != 1.0 {
            values.iter_mut().for_each(|p| *p /= raw_sum);
        }
        let index = |label: &str| {
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::Configuration(format!("unknown doublet level `{label}`")))
        };
        let doublet = match doublet {
            Some((b, c)) => Some((index(b)?, index(c)?)),
            None => None,
        };
        if !(coherence_bc.re.is_finite() && coherence_bc.im.is_finite()) {
            return Err(Error::Domain {
                field: "coherence_bc",
                value: coherence_bc.norm(),
                reason: "must be finite",
            });
        }
        let bound = match doublet {
            Some((b, c)) => (values[b] * values[c]).sqrt(),
            None => 0.0,
        };
        if coherence_bc.norm() > bound + POSITIVITY_SLACK {
            return Err(Error::Domain {
                field: "coherence_bc",
                value: coherence_bc.norm(),
                reason: "exceeds sqrt(rho_bb * rho_cc)",
            });
        }
        Ok(Self {
            labels,
            populations: values,
            coherence_bc,
            doublet,
            raw_sum,
        })
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn population(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.populations[i])
    }

    pub fn coherence_bc(&self) -> Complex64 {
        self.coherence_bc
    }

    pub fn doublet(&self) -> Option<(&str, &str)> {
        self.doublet
            .map(|(b, c)| (self.labels[b].as_str(), self.labels[c].as_str()))
    }

    /// Doublet populations (ρ_bb, ρ_cc), if the state has a doublet.
    pub fn doublet_populations(&self) -> Option<(f64, f64)> {
        self.doublet
            .map(|(b, c)| (self.populations[b], self.populations[c]))
    }

    /// Sum of the populations before normalization.
    pub fn raw_sum(&self) -> f64 {
        self.raw_sum
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }
}

//! Quantum-dot photocell: open-circuit voltage limits and a steady-state
//! kinetic model that turns level populations into j–V and P–j curves.
//!
//! # Kinetic model
//!
//! A ground (valence) state `g` is coupled to the conduction state by the
//! solar mode at the gap energy, with mean occupation n̄ at T_s:
//!
//! * absorption `g -> c` at `pump_rate · n̄`,
//! * emission `c -> g` at `pump_rate · (n̄ + 1)`,
//! * radiative recombination `c -> g` at `radiative_rate`,
//! * extraction `c -> g` through the load at the extraction rate Γ.
//!
//! The current is `j = Γ · ρ_c` and the voltage is the quasi-Fermi splitting
//! `eV = E_gap + kT_a ln(ρ_c / ρ_g)`. With only the solar channel this gives
//! `ρ_c/ρ_g = exp(−E_gap/kT_s)` and hence the radiative open-circuit limit
//! `E_gap (1 − T_a/T_s)`.
//!
//! The three-level variants resolve the conduction state into a doublet
//! `c1`/`c2` that shares the absorbed flux equally. Each sublevel decays
//! through every channel at the per-state rates above, so the lumped
//! conduction population obeys the two-level equations. In the coherent
//! variant the two recombination channels interfere: each sublevel's
//! radiative rate is reduced by `interference_factor · sqrt(γ₁γ₂)`. The
//! factor is bounded to [−1, 1] so that rates stay non-negative.

use std::fmt;
use std::str::FromStr;

use crate::error::{non_negative, positive, Error, Result};
use crate::kinetics::{Generator, Transition};
use crate::lwi::carnot_efficiency;
use crate::model::{thermal_energy, CoherenceSpec, Reservoir, SteadyState};
use crate::mpp::{grid_point, maximize, CurveSeries, MaximizeOptions, Maximum};

pub const DEFAULT_CURVE_SAMPLES: usize = 256;
pub const MIN_CURVE_SAMPLES: usize = 16;

/// Relative width at which the short-circuit bisection stops.
const SHORT_CIRCUIT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellVariant {
    TwoLevel,
    ThreeLevelCoherent,
    ThreeLevelIncoherent,
}

impl CellVariant {
    pub const ALL: [CellVariant; 3] = [
        CellVariant::TwoLevel,
        CellVariant::ThreeLevelCoherent,
        CellVariant::ThreeLevelIncoherent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CellVariant::TwoLevel => "two_level",
            CellVariant::ThreeLevelCoherent => "three_level_coherent",
            CellVariant::ThreeLevelIncoherent => "three_level_incoherent",
        }
    }

    pub fn has_doublet(&self) -> bool {
        !matches!(self, CellVariant::TwoLevel)
    }
}

impl fmt::Display for CellVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CellVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown cell variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellConfig {
    gap_energy: f64,
    sun_temperature: f64,
    ambient_temperature: f64,
    coherent_drive: CoherenceSpec,
    variant: CellVariant,
}

impl CellConfig {
    pub fn new(
        gap_energy: f64,
        sun_temperature: f64,
        ambient_temperature: f64,
        coherent_drive: CoherenceSpec,
        variant: CellVariant,
    ) -> Result<Self> {
        positive("gap_energy", gap_energy)?;
        positive("sun_temperature", sun_temperature)?;
        positive("ambient_temperature", ambient_temperature)?;
        if ambient_temperature > sun_temperature {
            return Err(Error::Domain {
                field: "ambient_temperature",
                value: ambient_temperature,
                reason: "must not exceed the sun temperature",
            });
        }
        if coherent_drive.drive_half_splitting() >= gap_energy {
            return Err(Error::Domain {
                field: "drive_half_splitting",
                value: coherent_drive.drive_half_splitting(),
                reason: "must be below the gap energy",
            });
        }
        Ok(Self {
            gap_energy,
            sun_temperature,
            ambient_temperature,
            coherent_drive,
            variant,
        })
    }

    /// The matched-parameter cell used for the two-level / three-level
    /// comparison: 1 eV gap, 6000 K sun, 300 K ambient, no drive.
    pub fn reference(variant: CellVariant) -> Self {
        Self::new(1.0, 6000.0, 300.0, CoherenceSpec::none(), variant)
            .expect("reference cell is valid")
    }

    pub fn with_variant(mut self, variant: CellVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_drive(self, half_splitting: f64) -> Result<Self> {
        let drive = self
            .coherent_drive
            .with_drive_half_splitting(half_splitting)?;
        Self::new(
            self.gap_energy,
            self.sun_temperature,
            self.ambient_temperature,
            drive,
            self.variant,
        )
    }

    pub fn gap_energy(&self) -> f64 {
        self.gap_energy
    }

    pub fn sun_temperature(&self) -> f64 {
        self.sun_temperature
    }

    pub fn ambient_temperature(&self) -> f64 {
        self.ambient_temperature
    }

    pub fn coherent_drive(&self) -> &CoherenceSpec {
        &self.coherent_drive
    }

    pub fn variant(&self) -> CellVariant {
        self.variant
    }

    /// Mean photon number of the solar mode at the gap energy.
    pub fn solar_occupation(&self) -> f64 {
        Reservoir::new(self.sun_temperature, self.gap_energy)
            .expect("validated on construction")
            .mean_occupation()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticRates {
    pub pump_rate: f64,
    pub radiative_rate: f64,
    pub extraction_rate: f64,
    pub interference_factor: f64,
}

impl KineticRates {
    pub fn new(
        pump_rate: f64,
        radiative_rate: f64,
        extraction_rate: f64,
        interference_factor: f64,
    ) -> Result<Self> {
        let rates = Self {
            pump_rate,
            radiative_rate,
            extraction_rate,
            interference_factor,
        };
        rates.validate()?;
        Ok(rates)
    }

    /// Rates of the matched-parameter comparison. Only the coherent variant
    /// gets a non-zero interference factor.
    pub fn reference(variant: CellVariant) -> Self {
        let interference = match variant {
            CellVariant::ThreeLevelCoherent => 0.8,
            _ => 0.0,
        };
        Self::new(1.0, 1.0, 0.5, interference).expect("reference rates are valid")
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("pump_rate", self.pump_rate)?;
        non_negative("radiative_rate", self.radiative_rate)?;
        non_negative("extraction_rate", self.extraction_rate)?;
        let p = self.interference_factor;
        if !p.is_finite() || p.abs() > 1.0 {
            return Err(Error::Domain {
                field: "interference_factor",
                value: p,
                reason: "must lie in [-1, 1]",
            });
        }
        Ok(())
    }

    pub fn validate_for(&self, variant: CellVariant) -> Result<()> {
        self.validate()?;
        if variant != CellVariant::ThreeLevelCoherent && self.interference_factor != 0.0 {
            return Err(Error::Configuration(format!(
                "interference_factor must be 0 for variant {variant}"
            )));
        }
        Ok(())
    }
}

/// ħν_s (1 − T_a/T_s): the radiative limit on eV at open circuit.
pub fn open_circuit_voltage_basic(cell: &CellConfig) -> f64 {
    let eta = carnot_efficiency(cell.sun_temperature, cell.ambient_temperature)
        .expect("validated on construction");
    cell.gap_energy * eta
}

/// The radiative limit raised by the coherent drive energy ħν₀.
pub fn open_circuit_voltage_coherent(cell: &CellConfig) -> f64 {
    open_circuit_voltage_basic(cell) + cell.coherent_drive.drive_half_splitting()
}

/// Efficiency gain ħν₀ / ħν_s of the coherently driven cell.
pub fn coherent_delta_eta(cell: &CellConfig) -> f64 {
    cell.coherent_drive.drive_half_splitting() / cell.gap_energy
}

/// A solved operating point of the kinetic model.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub state: SteadyState,
    pub extraction_rate: f64,
    /// Γ · ρ_conduction, arbitrary units.
    pub current: f64,
    /// eV in eV.
    pub voltage: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortCircuit {
    pub extraction_rate: f64,
    pub current: f64,
}

/// Kinetic model with the occupation and channel rates resolved once.
#[derive(Debug, Clone)]
pub struct CellModel {
    cell: CellConfig,
    rates: KineticRates,
    occupation: f64,
}

impl CellModel {
    pub fn new(cell: &CellConfig, rates: &KineticRates) -> Result<Self> {
        rates.validate_for(cell.variant)?;
        Ok(Self {
            cell: *cell,
            rates: *rates,
            occupation: cell.solar_occupation(),
        })
    }

    pub fn cell(&self) -> &CellConfig {
        &self.cell
    }

    pub fn rates(&self) -> &KineticRates {
        &self.rates
    }

    fn labels(&self) -> &'static [&'static str] {
        if self.cell.variant.has_doublet() {
            &["g", "c1", "c2"]
        } else {
            &["g", "c"]
        }
    }

    /// Rate generator at extraction rate `extraction`.
    pub fn generator(&self, extraction: f64) -> Result<Generator> {
        non_negative("extraction_rate", extraction)?;
        let r = &self.rates;
        let absorb = r.pump_rate * self.occupation;
        let emit = r.pump_rate * (self.occupation + 1.0);
        let transitions: Vec<Transition> = if self.cell.variant.has_doublet() {
            let gamma = [r.radiative_rate, r.radiative_rate];
            let cross = r.interference_factor * (gamma[0] * gamma[1]).sqrt();
            (1..=2)
                .flat_map(|level| {
                    let radiative = (gamma[level - 1] - cross).max(0.0);
                    [
                        Transition {
                            from: 0,
                            to: level,
                            rate: 0.5 * absorb,
                        },
                        Transition {
                            from: level,
                            to: 0,
                            rate: emit + radiative + extraction,
                        },
                    ]
                })
                .collect()
        } else {
            vec![
                Transition {
                    from: 0,
                    to: 1,
                    rate: absorb,
                },
                Transition {
                    from: 1,
                    to: 0,
                    rate: emit + r.radiative_rate + extraction,
                },
            ]
        };
        Generator::from_transitions(self.labels().iter().copied(), &transitions)
    }

    /// Direct steady-state solve at extraction rate `extraction`.
    pub fn at_extraction(&self, extraction: f64) -> Result<OperatingPoint> {
        let state = self.generator(extraction)?.steady_state()?;
        let (ground, conduction) = split_populations(&state)?;
        let current = extraction * conduction;
        let voltage = self.voltage(ground, conduction);
        Ok(OperatingPoint {
            power: current * voltage,
            state,
            extraction_rate: extraction,
            current,
            voltage,
        })
    }

    fn voltage(&self, ground: f64, conduction: f64) -> f64 {
        self.cell.gap_energy
            + thermal_energy(self.cell.ambient_temperature) * (conduction / ground).ln()
    }

    /// Current at which the voltage falls to zero, by bisection on ln Γ.
    pub fn short_circuit(&self) -> Result<ShortCircuit> {
        let open = self.at_extraction(0.0)?;
        if open.voltage.is_nan() || open.voltage <= 0.0 {
            return Err(Error::Degenerate(format!(
                "open-circuit voltage {} eV is not positive",
                open.voltage
            )));
        }
        let mut lo = self.rate_scale();
        while self.at_extraction(lo)?.voltage < 0.0 {
            lo *= 0.25;
        }
        let mut hi = lo;
        loop {
            hi *= 4.0;
            if self.at_extraction(hi)?.voltage < 0.0 {
                break;
            }
            lo = hi;
            if !hi.is_finite() {
                return Err(Error::Degenerate(
                    "voltage stays positive at any extraction rate".into(),
                ));
            }
        }
        while hi - lo > SHORT_CIRCUIT_TOL * hi {
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if self.at_extraction(mid)?.voltage >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let point = self.at_extraction(lo)?;
        Ok(ShortCircuit {
            extraction_rate: lo,
            current: point.current,
        })
    }

    fn rate_scale(&self) -> f64 {
        let r = &self.rates;
        let s = r.pump_rate * (self.occupation + 1.0) + r.radiative_rate;
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Operating point delivering `load_current`, given the short circuit.
    pub fn at_current(&self, load_current: f64, short: &ShortCircuit) -> Result<OperatingPoint> {
        non_negative("load_current", load_current)?;
        if load_current == 0.0 {
            return self.at_extraction(0.0);
        }
        if load_current > short.current * (1.0 + 1e-12) {
            return Err(Error::Infeasible {
                requested: load_current,
                short_circuit: short.current,
            });
        }
        if load_current >= short.current {
            return self.at_extraction(short.extraction_rate);
        }
        // j(Γ) = Γ ρ(Γ) ≤ Γ ρ(0), so Γ = j / ρ(0) undershoots the target.
        let open = self.at_extraction(0.0)?;
        let (_, conduction_open) = split_populations(&open.state)?;
        let lower = load_current / conduction_open;
        let residual = |ln_rate: f64| -> Result<(f64, OperatingPoint)> {
            let p = self.at_extraction(ln_rate.exp())?;
            Ok((p.current - load_current, p))
        };
        let (mut a, mut b) = (lower.ln(), short.extraction_rate.ln());
        if a >= b {
            return self.at_extraction(short.extraction_rate);
        }
        let (mut fa, pa) = residual(a)?;
        if fa >= 0.0 {
            return Ok(pa);
        }
        let mut fb = short.current - load_current;
        let mut best = pa;
        let mut side = 0i8;
        // Illinois variant of regula falsi on ln Γ.
        for _ in 0..200 {
            let c = if fb != fa {
                b - fb * (b - a) / (fb - fa)
            } else {
                0.5 * (a + b)
            };
            let c = if c > a && c < b { c } else { 0.5 * (a + b) };
            let (fc, pc) = residual(c)?;
            if fc.abs() < (best.current - load_current).abs() {
                best = pc;
            }
            if fc.abs() <= 1e-15 * load_current || (b - a) <= 1e-15 * b.abs().max(1.0) {
                break;
            }
            if fc < 0.0 {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Ok(best)
    }

    /// Power at `load_current`.
    pub fn power_at(&self, load_current: f64, short: &ShortCircuit) -> Result<f64> {
        Ok(load_current * self.at_current(load_current, short)?.voltage)
    }
}

/// (ρ_g, total conduction population) of a photocell state.
fn split_populations(state: &SteadyState) -> Result<(f64, f64)> {
    let ground = state
        .population("g")
        .ok_or_else(|| Error::Configuration("photocell state has no ground level `g`".into()))?;
    let conduction = state
        .labels()
        .zip(state.populations())
        .filter(|(l, _)| *l != "g")
        .map(|(_, p)| p)
        .sum();
    Ok((ground, conduction))
}

/// Steady state at the cell's own `extraction_rate`.
pub fn steady_state_at_rates(cell: &CellConfig, rates: &KineticRates) -> Result<OperatingPoint> {
    CellModel::new(cell, rates)?.at_extraction(rates.extraction_rate)
}

/// Steady state delivering `load_current` to the load.
///
/// The extraction rate is solved for so that Γ · ρ_conduction equals the
/// requested current; the current must lie in [0, j_sc].
pub fn steady_state(
    cell: &CellConfig,
    rates: &KineticRates,
    load_current: f64,
) -> Result<OperatingPoint> {
    let model = CellModel::new(cell, rates)?;
    let short = model.short_circuit()?;
    model.at_current(load_current, &short)
}

pub fn short_circuit_current(cell: &CellConfig, rates: &KineticRates) -> Result<ShortCircuit> {
    CellModel::new(cell, rates)?.short_circuit()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub current: f64,
    pub voltage: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub variant: CellVariant,
    pub samples: Vec<CurveSample>,
    pub short_circuit: ShortCircuit,
    pub series: CurveSeries,
}

/// P–j curve on a uniform current grid over [0, j_sc].
pub fn power_current_curve(
    cell: &CellConfig,
    rates: &KineticRates,
    samples: usize,
) -> Result<PowerCurve> {
    if samples < MIN_CURVE_SAMPLES {
        return Err(Error::Domain {
            field: "samples",
            value: samples as f64,
            reason: "must be >= 16",
        });
    }
    let model = CellModel::new(cell, rates)?;
    let short = model.short_circuit()?;
    let mut points = Vec::with_capacity(samples);
    for k in 0..samples {
        let j = grid_point(0.0, short.current, k, samples);
        let op = model.at_current(j, &short)?;
        points.push(CurveSample {
            current: j,
            voltage: op.voltage,
            power: j * op.voltage,
        });
    }
    let series = CurveSeries::new(
        points.iter().map(|s| (s.current, s.power)).collect(),
        "j(arb)",
        "P(arb)",
    )?;
    Ok(PowerCurve {
        variant: cell.variant,
        samples: points,
        short_circuit: short,
        series,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPowerPoint {
    pub current: f64,
    pub power: f64,
    pub voltage: f64,
    pub search: Maximum,
}

impl MaxPowerPoint {
    /// Set when the grid showed more than one separated local maximum.
    pub fn multiple_peaks(&self) -> bool {
        !self.search.is_unimodal()
    }
}

/// Maximum of P(j) on [0, j_sc]: grid scan, golden-section refinement, polish.
pub fn max_power_point(
    cell: &CellConfig,
    rates: &KineticRates,
    grid: usize,
) -> Result<MaxPowerPoint> {
    let model = CellModel::new(cell, rates)?;
    let short = model.short_circuit()?;
    let options = MaximizeOptions {
        grid,
        ..Default::default()
    };
    let search = maximize(|j| model.power_at(j, &short), 0.0, short.current, options)?;
    let op = model.at_current(search.argmax, &short)?;
    Ok(MaxPowerPoint {
        current: search.argmax,
        power: search.value,
        voltage: op.voltage,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cell(gap: f64, ts: f64, ta: f64) -> CellConfig {
        CellConfig::new(gap, ts, ta, CoherenceSpec::none(), CellVariant::TwoLevel).unwrap()
    }

    #[test]
    fn basic_voltage_examples() {
        assert_eq!(open_circuit_voltage_basic(&cell(1.0, 300.0, 300.0)), 0.0);
        assert!((open_circuit_voltage_basic(&cell(1.0, 6000.0, 300.0)) - 0.95).abs() < 1e-12);
        assert!((open_circuit_voltage_basic(&cell(2.0, 5800.0, 290.0)) - 1.9).abs() < 1e-12);
    }

    #[test]
    fn coherent_voltage_examples() {
        let c = cell(1.0, 6000.0, 300.0);
        assert_eq!(
            open_circuit_voltage_coherent(&c),
            open_circuit_voltage_basic(&c)
        );
        let driven = c.with_drive(0.1).unwrap();
        assert!((open_circuit_voltage_coherent(&driven) - 1.05).abs() < 1e-12);
        assert!((coherent_delta_eta(&driven) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn cell_validation() {
        assert!(CellConfig::new(
            1.0,
            300.0,
            6000.0,
            CoherenceSpec::none(),
            CellVariant::TwoLevel
        )
        .is_err());
        assert!(CellConfig::new(
            0.0,
            6000.0,
            300.0,
            CoherenceSpec::none(),
            CellVariant::TwoLevel
        )
        .is_err());
        assert!(cell(1.0, 6000.0, 300.0).with_drive(1.0).is_err());
    }

    #[test]
    fn rates_validation() {
        assert!(KineticRates::new(-1.0, 1.0, 0.0, 0.0).is_err());
        assert!(KineticRates::new(1.0, 1.0, 0.0, 1.5).is_err());
        let coherent = KineticRates::new(1.0, 1.0, 0.0, 0.5).unwrap();
        assert!(coherent.validate_for(CellVariant::TwoLevel).is_err());
        assert!(coherent
            .validate_for(CellVariant::ThreeLevelIncoherent)
            .is_err());
        assert!(coherent
            .validate_for(CellVariant::ThreeLevelCoherent)
            .is_ok());
    }

    #[test]
    fn detailed_balance_without_extraction() {
        let c = cell(1.0, 6000.0, 300.0);
        let rates = KineticRates::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let op = steady_state_at_rates(&c, &rates).unwrap();
        let n = c.solar_occupation();
        let ratio = op.state.population("c").unwrap() / op.state.population("g").unwrap();
        assert!((ratio - n / (n + 1.0)).abs() < 1e-14);
        // Open circuit then sits exactly at the radiative limit.
        assert!((op.voltage - open_circuit_voltage_basic(&c)).abs() < 1e-12);
    }

    #[test]
    fn generator_columns_sum_to_zero() {
        for variant in CellVariant::ALL {
            let model = CellModel::new(
                &CellConfig::reference(variant),
                &KineticRates::reference(variant),
            )
            .unwrap();
            let g = model.generator(0.7).unwrap();
            for j in 0..g.len() {
                let s: f64 = g.matrix().column(j).iter().sum();
                assert!(s.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn all_zero_rates_are_degenerate() {
        let c = cell(1.0, 6000.0, 300.0);
        let rates = KineticRates::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            steady_state_at_rates(&c, &rates),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn load_current_above_short_circuit_is_infeasible() {
        let c = CellConfig::reference(CellVariant::TwoLevel);
        let r = KineticRates::reference(CellVariant::TwoLevel);
        let sc = short_circuit_current(&c, &r).unwrap();
        assert!(matches!(
            steady_state(&c, &r, sc.current * 1.01),
            Err(Error::Infeasible { .. })
        ));
        assert!(steady_state(&c, &r, -0.1).is_err());
    }

    #[test]
    fn short_circuit_voltage_is_zero() {
        for variant in CellVariant::ALL {
            let c = CellConfig::reference(variant);
            let r = KineticRates::reference(variant);
            let model = CellModel::new(&c, &r).unwrap();
            let sc = model.short_circuit().unwrap();
            let op = model.at_extraction(sc.extraction_rate).unwrap();
            assert!(op.voltage >= 0.0 && op.voltage < 1e-10, "{}", op.voltage);
        }
    }

    #[test]
    fn curve_starts_at_zero_power() {
        let c = CellConfig::reference(CellVariant::TwoLevel);
        let r = KineticRates::reference(CellVariant::TwoLevel);
        let curve = power_current_curve(&c, &r, 32).unwrap();
        assert_eq!(curve.samples[0].power, 0.0);
        assert!(power_current_curve(&c, &r, 8).is_err());
    }

    #[test]
    fn parse_variant_names() {
        for v in CellVariant::ALL {
            assert_eq!(v.name().parse::<CellVariant>().unwrap(), v);
        }
        assert!("four_level".parse::<CellVariant>().is_err());
    }

    proptest! {
        #[test]
        fn drive_adds_exactly(
            gap in 0.5f64..3.0, ts in 1000.0f64..1e4, ta in 100.0f64..400.0, frac in 0.0f64..0.9,
        ) {
            let c = cell(gap, ts, ta).with_drive(frac * gap).unwrap();
            let diff = open_circuit_voltage_coherent(&c) - open_circuit_voltage_basic(&c);
            prop_assert!((diff - frac * gap).abs() < 1e-12);
        }

        #[test]
        fn voltage_monotonicity(
            gap in 0.5f64..3.0, ts in 1000.0f64..1e4, ta in 100.0f64..400.0,
            nu0 in 0.0f64..0.2, bump in 1.0f64..100.0,
        ) {
            let base = cell(gap, ts, ta).with_drive(nu0).unwrap();
            let v = open_circuit_voltage_coherent(&base);
            prop_assert!(open_circuit_voltage_coherent(&base.with_drive(nu0 + 0.01).unwrap()) > v);
            prop_assert!(open_circuit_voltage_coherent(&cell(gap, ts + bump, ta).with_drive(nu0).unwrap()) > v);
            prop_assert!(open_circuit_voltage_coherent(&cell(gap, ts, ta + bump).with_drive(nu0).unwrap()) < v);
        }

        #[test]
        fn current_matches_extraction_times_population(
            frac in 0.0f64..=1.0, variant_idx in 0usize..3,
        ) {
            let variant = CellVariant::ALL[variant_idx];
            let c = CellConfig::reference(variant);
            let r = KineticRates::reference(variant);
            let model = CellModel::new(&c, &r).unwrap();
            let sc = model.short_circuit().unwrap();
            let j = frac * sc.current;
            let op = model.at_current(j, &sc).unwrap();
            let (_, conduction) = split_populations(&op.state).unwrap();
            prop_assert!((op.current - op.extraction_rate * conduction).abs() < 1e-12);
            prop_assert!((op.current - j).abs() < 1e-12);
            let total: f64 = op.state.populations().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

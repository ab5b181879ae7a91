//! Scenario definitions: key validation, parameter resolution and execution.
//!
//! A scenario is read in full and every key checked before anything is
//! computed. Execution returns in-memory artifacts; nothing touches the disk
//! until the caller writes them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use qhe_core::carnot::phase_sweep;
use qhe_core::lwi::efficiency_sweep;
use qhe_core::oracle::{run_all, SuiteReport};
use qhe_core::photocell::{
    max_power_point, open_circuit_voltage_basic, open_circuit_voltage_coherent,
    power_current_curve, DEFAULT_CURVE_SAMPLES,
};
use qhe_core::{
    CellConfig, CellVariant, CoherenceSpec, KineticRates, LaserEngineConfig, PhaseoniumConfig,
    Reservoir,
};

use crate::config::{Config, Entry, ParseError};
use crate::svg::{LinePlot, Series};
use crate::table::Table;

const COMMON_KEYS: [&str; 3] = ["scenario.name", "scenario.output_dir", "scenario.formats"];
const DEFAULT_OUTPUT_DIR: &str = "output";
/// Slack on the sweep point count so `stop` survives rounding in (stop − start)/step.
const GRID_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    LwiEfficiencySweep,
    PhotocellVoltage,
    PowerCurrent,
    PhotoCarnotPhaseSweep,
    Verify,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::LwiEfficiencySweep,
        ScenarioKind::PhotocellVoltage,
        ScenarioKind::PowerCurrent,
        ScenarioKind::PhotoCarnotPhaseSweep,
        ScenarioKind::Verify,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::LwiEfficiencySweep => "lwi-efficiency-sweep",
            ScenarioKind::PhotocellVoltage => "photocell-voltage",
            ScenarioKind::PowerCurrent => "power-current",
            ScenarioKind::PhotoCarnotPhaseSweep => "photo-carnot-phase-sweep",
            ScenarioKind::Verify => "verify",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ScenarioKind::LwiEfficiencySweep => {
                "laser threshold efficiency versus lower-level coherence |rho_bc|"
            }
            ScenarioKind::PhotocellVoltage => {
                "open-circuit voltage limit versus coherent drive energy hbar_nu0"
            }
            ScenarioKind::PowerCurrent => "power-current curves and maximum power points",
            ScenarioKind::PhotoCarnotPhaseSweep => "photo-Carnot efficiency versus coherence phase",
            ScenarioKind::Verify => "brute-force verification suites",
        }
    }

    /// Scenario-specific keys; `(key, required)`.
    fn keys(&self) -> &'static [(&'static str, bool)] {
        match self {
            ScenarioKind::LwiEfficiencySweep => &[
                ("laser.hot_temperature", true),
                ("laser.cold_temperature", true),
                ("laser.pump_photon_energy", true),
                ("laser.rho_aa", true),
                ("laser.phase", false),
                ("laser.gain_constant", false),
                ("sweep.rho_bc_start", true),
                ("sweep.rho_bc_stop", true),
                ("sweep.rho_bc_step", true),
            ],
            ScenarioKind::PhotocellVoltage => &[
                ("cell.gap_energy", true),
                ("cell.sun_temperature", true),
                ("cell.ambient_temperature", true),
                ("sweep.hbar_nu0_start", true),
                ("sweep.hbar_nu0_stop", true),
                ("sweep.hbar_nu0_step", true),
            ],
            ScenarioKind::PowerCurrent => &[
                ("cell.gap_energy", true),
                ("cell.sun_temperature", true),
                ("cell.ambient_temperature", true),
                ("cell.variants", false),
                ("rates.pump_rate", true),
                ("rates.radiative_rate", true),
                ("rates.extraction_rate", false),
                ("rates.interference_factor", false),
                ("curve.samples", false),
            ],
            ScenarioKind::PhotoCarnotPhaseSweep => &[
                ("carnot.base_efficiency", true),
                ("carnot.coherence_parameter", true),
                ("carnot.heat_in", false),
                ("sweep.phases", true),
            ],
            ScenarioKind::Verify => &[("verify.seed", false)],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown scenario `{s}`; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}`; expected csv or svg")),
        }
    }
}

/// Parses `csv,svg`-style lists; duplicates collapse, order is kept.
pub fn parse_formats(text: &str) -> Result<Vec<Format>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let f: Format = item.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err("no output format given".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
struct Sweep {
    start: f64,
    stop: f64,
    step: f64,
}

impl Sweep {
    fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + GRID_SLACK).floor() as usize + 1;
        (0..n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Lwi {
        hot_temperature: f64,
        cold_temperature: f64,
        pump_photon_energy: f64,
        rho_aa: f64,
        phase: f64,
        gain_constant: f64,
        sweep: Sweep,
    },
    Voltage {
        gap_energy: f64,
        sun_temperature: f64,
        ambient_temperature: f64,
        sweep: Sweep,
    },
    PowerCurrent {
        gap_energy: f64,
        sun_temperature: f64,
        ambient_temperature: f64,
        variants: Vec<CellVariant>,
        pump_rate: f64,
        radiative_rate: f64,
        extraction_rate: f64,
        interference_factor: f64,
        samples: usize,
    },
    Carnot {
        base_efficiency: f64,
        coherence_parameter: f64,
        heat_in: f64,
        phases: usize,
    },
    Verify {
        seed: u64,
    },
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub output_dir: String,
    pub formats: Vec<Format>,
    /// Every physics parameter with defaults filled in, as `(key, value)`.
    pub resolved: Vec<(String, String)>,
    params: Params,
}

/// One output file, named relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
    /// False only for a verification scenario with a failing suite.
    pub passed: bool,
}

struct Reader<'a> {
    config: &'a Config,
    resolved: Vec<(String, String)>,
}

impl<'a> Reader<'a> {
    fn entry(&self, key: &str) -> Option<&'a Entry> {
        self.config.get(key)
    }

    fn required(&self, key: &str) -> Result<&'a Entry, ParseError> {
        self.entry(key)
            .ok_or_else(|| ParseError::whole_file(format!("missing required key `{key}`")))
    }

    fn record(&mut self, key: &str, value: impl fmt::Display) {
        self.resolved.push((key.to_string(), value.to_string()));
    }

    fn number(&mut self, key: &str) -> Result<f64, ParseError> {
        let v = self.required(key)?.number()?;
        self.record(key, v);
        Ok(v)
    }

    fn number_or(&mut self, key: &str, default: f64) -> Result<f64, ParseError> {
        let v = match self.entry(key) {
            Some(e) => e.number()?,
            None => default,
        };
        self.record(key, v);
        Ok(v)
    }

    fn count(&mut self, key: &str) -> Result<usize, ParseError> {
        let v = self.required(key)?.count()?;
        self.record(key, v);
        Ok(v)
    }

    fn count_or(&mut self, key: &str, default: usize) -> Result<usize, ParseError> {
        let v = match self.entry(key) {
            Some(e) => e.count()?,
            None => default,
        };
        self.record(key, v);
        Ok(v)
    }

    fn sweep(&mut self, prefix: &str) -> Result<Sweep, ParseError> {
        let start = self.number(&format!("{prefix}_start"))?;
        let stop = self.number(&format!("{prefix}_stop"))?;
        let step_key = format!("{prefix}_step");
        let step = self.number(&step_key)?;
        let step_entry = self.required(&step_key)?;
        if step <= 0.0 {
            return Err(step_entry.value_error("sweep step must be positive"));
        }
        if stop < start {
            let stop_entry = self.required(&format!("{prefix}_stop"))?;
            return Err(stop_entry.value_error("sweep stop must not be below start"));
        }
        if (stop - start) / step > 1e7 {
            return Err(step_entry.value_error("sweep has more than 10^7 points"));
        }
        Ok(Sweep { start, stop, step })
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Self::from_config(&Config::parse(text)?)
    }

    pub fn from_config(config: &Config) -> Result<Self, ParseError> {
        let name = config
            .get("scenario.name")
            .ok_or_else(|| ParseError::whole_file("missing required key `scenario.name`"))?;
        let kind: ScenarioKind = name
            .value
            .parse()
            .map_err(|m: String| name.value_error(m))?;

        let keys = kind.keys();
        for e in config.entries() {
            let known =
                COMMON_KEYS.contains(&e.key.as_str()) || keys.iter().any(|(k, _)| *k == e.key);
            if !known {
                return Err(e.key_error(format!("unknown key `{}` for scenario {kind}", e.key)));
            }
        }
        if let Some((missing, _)) = keys.iter().find(|(k, req)| *req && config.get(k).is_none()) {
            return Err(ParseError::whole_file(format!(
                "missing required key `{missing}` for scenario {kind}"
            )));
        }

        let output_dir = config
            .get("scenario.output_dir")
            .map_or(DEFAULT_OUTPUT_DIR.to_string(), |e| e.value.clone());
        let formats = match config.get("scenario.formats") {
            Some(e) => parse_formats(&e.value).map_err(|m| e.value_error(m))?,
            None => vec![Format::Csv, Format::Svg],
        };

        let mut r = Reader {
            config,
            resolved: vec![("scenario.name".into(), kind.name().into())],
        };
        let params = match kind {
            ScenarioKind::LwiEfficiencySweep => Params::Lwi {
                hot_temperature: r.number("laser.hot_temperature")?,
                cold_temperature: r.number("laser.cold_temperature")?,
                pump_photon_energy: r.number("laser.pump_photon_energy")?,
                rho_aa: r.number("laser.rho_aa")?,
                phase: r.number_or("laser.phase", PI)?,
                gain_constant: r.number_or("laser.gain_constant", 1.0)?,
                sweep: r.sweep("sweep.rho_bc")?,
            },
            ScenarioKind::PhotocellVoltage => Params::Voltage {
                gap_energy: r.number("cell.gap_energy")?,
                sun_temperature: r.number("cell.sun_temperature")?,
                ambient_temperature: r.number("cell.ambient_temperature")?,
                sweep: r.sweep("sweep.hbar_nu0")?,
            },
            ScenarioKind::PowerCurrent => {
                let gap_energy = r.number("cell.gap_energy")?;
                let sun_temperature = r.number("cell.sun_temperature")?;
                let ambient_temperature = r.number("cell.ambient_temperature")?;
                let variants = match r.entry("cell.variants") {
                    Some(e) => {
                        let mut vs = Vec::new();
                        for item in e.list() {
                            let v: CellVariant = item.parse().map_err(|_| {
                                e.value_error(format!(
                                    "unknown cell variant `{item}`; expected two_level, \
                                     three_level_coherent or three_level_incoherent"
                                ))
                            })?;
                            if vs.contains(&v) {
                                return Err(e.value_error(format!("variant `{item}` listed twice")));
                            }
                            vs.push(v);
                        }
                        if vs.is_empty() {
                            return Err(e.value_error("no cell variants listed"));
                        }
                        vs
                    }
                    None => CellVariant::ALL.to_vec(),
                };
                let names: Vec<_> = variants.iter().map(|v| v.name()).collect();
                r.record("cell.variants", names.join(","));
                Params::PowerCurrent {
                    gap_energy,
                    sun_temperature,
                    ambient_temperature,
                    variants,
                    pump_rate: r.number("rates.pump_rate")?,
                    radiative_rate: r.number("rates.radiative_rate")?,
                    extraction_rate: r.number_or("rates.extraction_rate", 0.0)?,
                    interference_factor: r.number_or("rates.interference_factor", 0.0)?,
                    samples: r.count_or("curve.samples", DEFAULT_CURVE_SAMPLES)?,
                }
            }
            ScenarioKind::PhotoCarnotPhaseSweep => Params::Carnot {
                base_efficiency: r.number("carnot.base_efficiency")?,
                coherence_parameter: r.number("carnot.coherence_parameter")?,
                heat_in: r.number_or("carnot.heat_in", 1.0)?,
                phases: r.count("sweep.phases")?,
            },
            ScenarioKind::Verify => {
                let seed = match r.entry("verify.seed") {
                    Some(e) => parse_seed(&e.value)
                        .ok_or_else(|| e.value_error(format!("`{}` is not a u64 seed", e.value)))?,
                    None => qhe_core::oracle::DEFAULT_SEED,
                };
                r.record("verify.seed", seed);
                Params::Verify { seed }
            }
        };

        Ok(Self {
            kind,
            output_dir,
            formats,
            resolved: r.resolved,
            params,
        })
    }

    /// A verification scenario with the given seed.
    pub fn verification(seed: u64) -> Self {
        Self {
            kind: ScenarioKind::Verify,
            output_dir: DEFAULT_OUTPUT_DIR.into(),
            formats: vec![Format::Csv],
            resolved: vec![
                ("scenario.name".into(), ScenarioKind::Verify.name().into()),
                ("verify.seed".into(), seed.to_string()),
            ],
            params: Params::Verify { seed },
        }
    }

    pub fn execute(&self) -> qhe_core::Result<Outcome> {
        match &self.params {
            Params::Lwi {
                hot_temperature,
                cold_temperature,
                pump_photon_energy,
                rho_aa,
                phase,
                gain_constant,
                sweep,
            } => {
                let config = LaserEngineConfig::new(
                    Reservoir::new(*hot_temperature, *pump_photon_energy)?,
                    *cold_temperature,
                    CoherenceSpec::new(0.0, *phase)?,
                    *gain_constant,
                )?;
                let magnitudes = sweep.values();
                let reports = efficiency_sweep(&config, *rho_aa, &magnitudes)?;
                let mut table = self.table([
                    "rho_bc(dimensionless)",
                    "eta_carnot",
                    "delta_eta_first_order",
                    "eta_exact",
                ]);
                for (m, rep) in magnitudes.iter().zip(&reports) {
                    table.push(vec![
                        (*m).into(),
                        rep.carnot.into(),
                        rep.delta_eta_first_order.into(),
                        rep.eta_exact.into(),
                    ]);
                }
                let plot = LinePlot::new(
                    "Threshold efficiency vs coherence",
                    "|rho_bc|",
                    "efficiency",
                )
                .with_series(Series::new(
                    "exact",
                    magnitudes
                        .iter()
                        .zip(&reports)
                        .map(|(m, r)| (*m, r.eta_exact))
                        .collect(),
                ))
                .with_series(Series::new(
                    "Carnot + first order",
                    magnitudes
                        .iter()
                        .zip(&reports)
                        .map(|(m, r)| (*m, r.eta_first_order()))
                        .collect(),
                ));
                let last = reports.last().expect("sweep has at least one point");
                let summary = format!(
                    "{}: {} points, eta_carnot = {:.6}, eta_exact at |rho_bc| = {} is {:.8}",
                    self.kind,
                    reports.len(),
                    last.carnot,
                    magnitudes.last().expect("non-empty"),
                    last.eta_exact
                );
                Ok(self.outcome(
                    vec![(self.kind.name().into(), table, Some(plot))],
                    summary,
                    true,
                ))
            }
            Params::Voltage {
                gap_energy,
                sun_temperature,
                ambient_temperature,
                sweep,
            } => {
                let base = CellConfig::new(
                    *gap_energy,
                    *sun_temperature,
                    *ambient_temperature,
                    CoherenceSpec::none(),
                    CellVariant::ThreeLevelCoherent,
                )?;
                let drives = sweep.values();
                let mut table = self.table(["hbar_nu0(eV)", "eV_basic(eV)", "eV_coherent(eV)"]);
                let mut basic = Vec::with_capacity(drives.len());
                let mut coherent = Vec::with_capacity(drives.len());
                for &d in &drives {
                    let cell = base.with_drive(d)?;
                    let (b, c) = (
                        open_circuit_voltage_basic(&cell),
                        open_circuit_voltage_coherent(&cell),
                    );
                    table.push(vec![d.into(), b.into(), c.into()]);
                    basic.push((d, b));
                    coherent.push((d, c));
                }
                let plot = LinePlot::new("Open-circuit voltage limit", "hbar_nu0 (eV)", "eV (eV)")
                    .with_series(Series::new("coherent", coherent.clone()))
                    .with_series(Series::new("no coherence", basic));
                let (d, c) = *coherent.last().expect("sweep has at least one point");
                let summary = format!(
                    "{}: {} points, eV_basic = {:.6} eV, eV_coherent at hbar_nu0 = {d} eV is {c:.6} eV",
                    self.kind,
                    drives.len(),
                    open_circuit_voltage_basic(&base)
                );
                Ok(self.outcome(
                    vec![(self.kind.name().into(), table, Some(plot))],
                    summary,
                    true,
                ))
            }
            Params::PowerCurrent {
                gap_energy,
                sun_temperature,
                ambient_temperature,
                variants,
                pump_rate,
                radiative_rate,
                extraction_rate,
                interference_factor,
                samples,
            } => {
                let mut outputs = Vec::new();
                let mut plot = LinePlot::new("Power vs current", "j (arb)", "P (arb)");
                let mut mpp_table = self.table([
                    "variant",
                    "j_peak(arb)",
                    "P_peak(arb)",
                    "j_mpp(arb)",
                    "P_mpp(arb)",
                    "V_mpp(eV)",
                    "j_sc(arb)",
                    "unimodal",
                ]);
                let mut parts = Vec::new();
                for &variant in variants {
                    let cell = CellConfig::new(
                        *gap_energy,
                        *sun_temperature,
                        *ambient_temperature,
                        CoherenceSpec::none(),
                        variant,
                    )?;
                    let p = match variant {
                        CellVariant::ThreeLevelCoherent => *interference_factor,
                        _ => 0.0,
                    };
                    let rates =
                        KineticRates::new(*pump_rate, *radiative_rate, *extraction_rate, p)?;
                    let curve = power_current_curve(&cell, &rates, *samples)?;
                    let mpp = max_power_point(&cell, &rates, DEFAULT_CURVE_SAMPLES)?;
                    let mut table = self.table(["j(arb)", "V(eV)", "P(arb)"]);
                    table.comment(format!("variant = {variant}"));
                    for s in &curve.samples {
                        table.push(vec![s.current.into(), s.voltage.into(), s.power.into()]);
                    }
                    let (jp, pp) = curve.series.peak();
                    mpp_table.push(vec![
                        variant.name().into(),
                        jp.into(),
                        pp.into(),
                        mpp.current.into(),
                        mpp.power.into(),
                        mpp.voltage.into(),
                        curve.short_circuit.current.into(),
                        (!mpp.multiple_peaks()).into(),
                    ]);
                    plot = plot
                        .with_series(Series::new(variant.name(), curve.series.points().to_vec()));
                    parts.push(format!(
                        "{variant} P* = {:.6} at j* = {:.6}",
                        mpp.power, mpp.current
                    ));
                    outputs.push((format!("{}-{variant}", self.kind), table, None));
                }
                outputs.push((format!("{}-mpp", self.kind), mpp_table, Some(plot)));
                let summary = format!("{}: {}", self.kind, parts.join("; "));
                Ok(self.outcome(outputs, summary, true))
            }
            Params::Carnot {
                base_efficiency,
                coherence_parameter,
                heat_in,
                phases,
            } => {
                let config =
                    PhaseoniumConfig::new(*base_efficiency, *coherence_parameter, 0.0, *heat_in)?;
                let series = phase_sweep(&config, *phases)?;
                let mut table = self.table(["phi(rad)", "eta_phi"]);
                for &(phi, eta) in series.points() {
                    table.push(vec![phi.into(), eta.into()]);
                }
                let plot =
                    LinePlot::new("Photo-Carnot efficiency vs phase", "phi (rad)", "eta_phi")
                        .with_series(Series::new("eta_phi", series.points().to_vec()));
                let (phi, eta) = series.peak();
                let summary = format!(
                    "{}: {} phases, max eta_phi = {eta:.6} at phi = {phi:.6} rad",
                    self.kind,
                    series.len()
                );
                Ok(self.outcome(
                    vec![(self.kind.name().into(), table, Some(plot))],
                    summary,
                    true,
                ))
            }
            Params::Verify { seed } => {
                let reports = run_all(*seed);
                Ok(self.verification_outcome(&reports))
            }
        }
    }

    fn verification_outcome(&self, reports: &[SuiteReport]) -> Outcome {
        let mut table = self.table(["suite", "cases", "max_deviation", "tolerance", "passed"]);
        for r in reports {
            table.push(vec![
                r.name.into(),
                r.cases.into(),
                r.max_deviation.into(),
                r.tolerance.into(),
                r.passed.into(),
            ]);
        }
        let failed: Vec<_> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name)
            .collect();
        let passed = failed.is_empty();
        let summary = if passed {
            format!("{}: all {} suites passed", self.kind, reports.len())
        } else {
            format!("{}: FAILED {}", self.kind, failed.join(", "))
        };
        self.outcome(
            vec![(self.kind.name().into(), table, None)],
            summary,
            passed,
        )
    }

    fn table<const N: usize>(&self, header: [&str; N]) -> Table {
        let mut t = Table::new(header);
        for (k, v) in &self.resolved {
            t.comment(format!("{k} = {v}"));
        }
        t
    }

    fn outcome(
        &self,
        outputs: Vec<(String, Table, Option<LinePlot>)>,
        summary: String,
        passed: bool,
    ) -> Outcome {
        let mut artifacts = Vec::new();
        for (stem, table, plot) in outputs {
            if self.formats.contains(&Format::Csv) {
                artifacts.push(Artifact {
                    file_name: format!("{stem}.csv"),
                    contents: table.render(),
                });
            }
            if let (Some(plot), true) = (plot, self.formats.contains(&Format::Svg)) {
                artifacts.push(Artifact {
                    file_name: format!("{stem}.svg"),
                    contents: plot.render(),
                });
            }
        }
        Outcome {
            artifacts,
            summary,
            passed,
        }
    }
}

/// Decimal or `0x`-prefixed hexadecimal, underscores allowed.
pub fn parse_seed(text: &str) -> Option<u64> {
    let t = text.trim().replace('_', "");
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => t.parse().ok(),
    }
}

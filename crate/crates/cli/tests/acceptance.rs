//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! worst-case deviation and wall-clock time. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qhe_core::carnot::{phase_grid, phase_sweep, phi_efficiency, single_bath_work};
use qhe_core::lwi::{exact_coherent_efficiency, first_order_delta_eta, gain_factor};
use qhe_core::model::thermal_energy;
use qhe_core::oracle::{
    carnot_recovery_suite, finite_difference_convergence, finite_difference_gain,
    steady_state_suite, threshold_suite, SuiteReport, DEFAULT_FD_STEP, DEFAULT_SEED,
};
use qhe_core::photocell::{
    max_power_point, open_circuit_voltage_basic, open_circuit_voltage_coherent,
    power_current_curve, DEFAULT_CURVE_SAMPLES,
};
use qhe_core::{
    CellConfig, CellVariant, CoherenceSpec, KineticRates, LaserEngineConfig, PhaseoniumConfig,
    Reservoir, SteadyState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn suite(report: SuiteReport, seed: u64) -> Outcome {
    let line = format!(
        "{} cases, seed {seed:#x}, max deviation {:.3e} (tolerance {:.0e})",
        report.cases, report.max_deviation, report.tolerance
    );
    if report.passed {
        Ok(line)
    } else {
        Err(format!("{line} {}", report.detail))
    }
}

fn laser(magnitude: f64, phase: f64) -> LaserEngineConfig {
    LaserEngineConfig::new(
        Reservoir::new(6000.0, 1.0).unwrap(),
        300.0,
        CoherenceSpec::new(magnitude, phase).unwrap(),
        1.0,
    )
    .unwrap()
}

fn carnot_recovery() -> Outcome {
    suite(carnot_recovery_suite(DEFAULT_SEED, 1000), DEFAULT_SEED)
}

fn first_order_gain() -> Outcome {
    let delta = first_order_delta_eta(&laser(0.01, PI), 0.1).map_err(|e| e.to_string())?;
    ensure((delta - 0.00258520).abs() < 1e-7, || {
        format!("delta_eta = {delta}")
    })?;

    let rho_aa = 0.1;
    let prefactor = thermal_energy(300.0) / 1.0;
    let mut worst_margin = f64::INFINITY;
    let n = 2000;
    for k in 1..=n {
        let x = 0.2 * k as f64 / n as f64;
        let r =
            exact_coherent_efficiency(&laser(x * rho_aa, PI), rho_aa).map_err(|e| e.to_string())?;
        let gap = r.eta_first_order() - r.eta_exact;
        let bound = prefactor * x * x / 2.0 + 1e-12;
        ensure(gap >= 0.0 && gap <= bound, || {
            format!("x = {x}: gap {gap:e} outside [0, {bound:e}]")
        })?;
        worst_margin = worst_margin.min(bound - gap);
    }
    Ok(format!(
        "delta_eta = {delta:.10}; gap within bound at {n} points of x in (0, 0.2], min slack {worst_margin:.3e}"
    ))
}

fn oracle_equivalence() -> Outcome {
    suite(threshold_suite(DEFAULT_SEED, 1000), DEFAULT_SEED)
}

fn gain_without_inversion() -> Outcome {
    let state = |phase: f64| {
        SteadyState::new(
            [("g", 0.4), ("b", 0.2), ("c", 0.2), ("a", 0.2)],
            Some(("b", "c")),
            CoherenceSpec::new(0.05, phase).unwrap().value(),
        )
        .unwrap()
    };
    let (lwi, absorbing) = (state(PI), state(0.0));
    let g_pi = gain_factor(&lwi).map_err(|e| e.to_string())?;
    let g_0 = gain_factor(&absorbing).map_err(|e| e.to_string())?;
    ensure(g_pi == 0.1, || format!("phase pi gain = {g_pi:e}"))?;
    ensure(g_0 == -0.1, || format!("phase 0 gain = {g_0:e}"))?;

    let mut worst_fd = 0.0f64;
    let mut ratios = Vec::new();
    for (s, g) in [(&lwi, g_pi), (&absorbing, g_0)] {
        let fd = finite_difference_gain(s, 1.0, DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
        worst_fd = worst_fd.max((fd - g).abs());
        let conv = finite_difference_convergence(s, 1.0, 1e-4).map_err(|e| e.to_string())?;
        ratios.extend(conv.ratios);
    }
    ensure(worst_fd < 1e-6, || {
        format!("finite difference off by {worst_fd:e}")
    })?;
    ensure(ratios.iter().all(|r| (1.8..=2.2).contains(r)), || {
        format!("halving ratios {ratios:?}")
    })?;
    Ok(format!(
        "gain +0.1 / -0.1 exact; FD error {worst_fd:.3e} at h = {DEFAULT_FD_STEP:e}; halving ratios {}",
        ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(", ")
    ))
}

fn photocell_voltages() -> Outcome {
    let base = CellConfig::reference(CellVariant::ThreeLevelCoherent);
    let v1 = open_circuit_voltage_basic(&base);
    let driven = base.with_drive(0.1).map_err(|e| e.to_string())?;
    let v2 = open_circuit_voltage_coherent(&driven);
    ensure((v1 - 0.95).abs() < 1e-12, || format!("eV_basic = {v1}"))?;
    ensure((v2 - 1.05).abs() < 1e-12, || format!("eV_coherent = {v2}"))?;

    let seed = DEFAULT_SEED;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let cases = 1000;
    for _ in 0..cases {
        let gap = rng.gen_range(0.5..3.0);
        let ts = rng.gen_range(1000.0..10000.0);
        let ta = rng.gen_range(100.0..400.0);
        let drive = rng.gen_range(0.0..0.5 * gap);
        let cell = CellConfig::new(
            gap,
            ts,
            ta,
            CoherenceSpec::drive(drive).unwrap(),
            CellVariant::ThreeLevelCoherent,
        )
        .map_err(|e| e.to_string())?;
        let d = open_circuit_voltage_coherent(&cell) - open_circuit_voltage_basic(&cell);
        worst = worst.max((d - drive).abs());
    }
    ensure(worst < 1e-12, || {
        format!("eV_coherent - eV_basic differs from hbar_nu0 by {worst:e}")
    })?;
    Ok(format!(
        "0.95 eV and 1.05 eV exact to 1e-12; difference = hbar_nu0 over {cases} random configs (seed {seed:#x}), worst {worst:.1e}"
    ))
}

fn power_ordering() -> Outcome {
    let mut peaks = Vec::new();
    let mut curves = Vec::new();
    for variant in CellVariant::ALL {
        let cell = CellConfig::reference(variant);
        let rates = KineticRates::reference(variant);
        let curve =
            power_current_curve(&cell, &rates, DEFAULT_CURVE_SAMPLES).map_err(|e| e.to_string())?;
        let mpp =
            max_power_point(&cell, &rates, DEFAULT_CURVE_SAMPLES).map_err(|e| e.to_string())?;
        ensure(!mpp.multiple_peaks(), || {
            format!("{variant}: multiple peaks")
        })?;
        let first = curve.samples[0];
        let last = curve.samples[curve.samples.len() - 1];
        ensure(first.power == 0.0, || {
            format!("{variant}: P(0) = {:e}", first.power)
        })?;
        ensure(last.power.abs() < 1e-6 * mpp.power, || {
            format!(
                "{variant}: P(j_sc) = {:e} vs peak {:e}",
                last.power, mpp.power
            )
        })?;
        peaks.push(mpp.power);
        curves.push(curve);
    }
    let (two, coherent, incoherent) = (peaks[0], peaks[1], peaks[2]);
    ensure(coherent > two, || {
        format!("coherent peak {coherent} <= two-level {two}")
    })?;
    let mut worst = (incoherent - two).abs();
    for (a, b) in curves[0].samples.iter().zip(&curves[2].samples) {
        worst = worst.max((a.power - b.power).abs());
    }
    ensure(worst < 1e-10, || {
        format!("incoherent differs from two-level by {worst:e}")
    })?;
    Ok(format!(
        "P*: two_level {two:.9}, coherent {coherent:.9}, incoherent {incoherent:.9}; incoherent - two_level {worst:.1e}"
    ))
}

fn steady_state_cross_method() -> Outcome {
    suite(steady_state_suite(DEFAULT_SEED, 100), DEFAULT_SEED)
}

fn photo_carnot_phase_law() -> Outcome {
    let (eta, pi_bar) = (0.3, 0.1);
    let config = PhaseoniumConfig::new(eta, pi_bar, 0.0, 1.0).map_err(|e| e.to_string())?;
    let sweep = phase_sweep(&config, 8).map_err(|e| e.to_string())?;
    let at = |phi: f64| {
        sweep
            .points()
            .iter()
            .find(|p| p.0 == phi)
            .map(|p| p.1)
            .ok_or_else(|| format!("phase {phi} missing from sweep"))
    };
    let (max, min) = (at(PI)?, at(0.0)?);
    ensure((max - (eta + pi_bar)).abs() < 1e-12, || {
        format!("eta_phi(pi) = {max}")
    })?;
    ensure((min - (eta - pi_bar)).abs() < 1e-12, || {
        format!("eta_phi(0) = {min}")
    })?;
    ensure(sweep.peak().1 == max, || {
        "sweep maximum is not at pi".into()
    })?;

    let single = PhaseoniumConfig::new(0.0, pi_bar, 0.0, 1.0).map_err(|e| e.to_string())?;
    let grid = phase_grid(1024);
    for &phi in &grid {
        let w = single_bath_work(&single.with_phase(phi)).map_err(|e| e.to_string())?;
        let c = phi.cos();
        ensure((w > 0.0) == (c < 0.0), || {
            format!("phi = {phi}: work {w:e}, cos {c:e}")
        })?;
    }
    let mut worst = 0.0f64;
    for &phi in &grid {
        let a = phi_efficiency(&config.with_phase(phi));
        let b = phi_efficiency(&config.with_phase(phi + PI));
        worst = worst.max((a + b - 2.0 * eta).abs());
    }
    ensure(worst < 1e-12, || format!("antisymmetry off by {worst:e}"))?;
    Ok(format!(
        "extrema {max:.15} / {min:.15}; work sign matches -cos on 1024 phases; antisymmetry {worst:.1e}"
    ))
}

fn bundled_scenarios() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .expect("scenarios directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "conf"))
        .collect();
    files.sort();
    files
}

fn csv_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .expect("output directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn cli_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_qhe");
    let scenarios = bundled_scenarios();
    ensure(scenarios.len() >= 5, || {
        format!("only {} bundled scenarios", scenarios.len())
    })?;
    let mut files = 0;
    for scenario in &scenarios {
        let mut runs = Vec::new();
        for _ in 0..2 {
            let out = tempfile::tempdir().map_err(|e| e.to_string())?;
            let status = Command::new(exe)
                .args(["run", "--config"])
                .arg(scenario)
                .arg("--out")
                .arg(out.path())
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || {
                format!(
                    "{}: {}",
                    scenario.display(),
                    String::from_utf8_lossy(&status.stderr)
                )
            })?;
            runs.push(csv_outputs(out.path()));
        }
        ensure(!runs[0].is_empty(), || {
            format!("{}: no CSV written", scenario.display())
        })?;
        ensure(runs[0] == runs[1], || {
            format!("{}: CSV differs between runs", scenario.display())
        })?;
        files += runs[0].len();
    }
    let verify = Command::new(exe)
        .arg("verify")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(verify.status.code() == Some(0), || {
        format!(
            "verify exited {:?}: {}",
            verify.status.code(),
            String::from_utf8_lossy(&verify.stdout)
        )
    })?;
    Ok(format!(
        "{} scenarios x 2 runs, {files} CSV files byte-identical; `qhe verify` exit 0",
        scenarios.len()
    ))
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "Carnot recovery at zero coherence",
        budget: Some(Duration::from_secs(1)),
        check: carnot_recovery,
    },
    Criterion {
        id: 2,
        title: "first-order efficiency gain",
        budget: Some(Duration::from_secs(1)),
        check: first_order_gain,
    },
    Criterion {
        id: 3,
        title: "threshold root vs closed form",
        budget: Some(Duration::from_secs(10)),
        check: oracle_equivalence,
    },
    Criterion {
        id: 4,
        title: "gain without inversion",
        budget: None,
        check: gain_without_inversion,
    },
    Criterion {
        id: 5,
        title: "photocell open-circuit voltages",
        budget: None,
        check: photocell_voltages,
    },
    Criterion {
        id: 6,
        title: "power-current ordering",
        budget: Some(Duration::from_secs(5)),
        check: power_ordering,
    },
    Criterion {
        id: 7,
        title: "steady state: direct vs integration",
        budget: Some(Duration::from_secs(30)),
        check: steady_state_cross_method,
    },
    Criterion {
        id: 8,
        title: "photo-Carnot phase law",
        budget: None,
        check: photo_carnot_phase_law,
    },
    Criterion {
        id: 9,
        title: "CLI determinism",
        budget: None,
        check: cli_determinism,
    },
];

fn main() {
    let mut failures = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:?}, budget {b:?}")),
            (r, _) => r,
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" / {b:?}"));
        match result {
            Ok(msg) => println!(
                "criterion {}: PASS  {} -- {msg} [{elapsed:.2?}{budget}]",
                c.id, c.title
            ),
            Err(msg) => {
                failures += 1;
                println!(
                    "criterion {}: FAIL  {} -- {msg} [{elapsed:.2?}{budget}]",
                    c.id, c.title
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failures,
        CRITERIA.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

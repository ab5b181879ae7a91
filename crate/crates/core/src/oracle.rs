//! Brute-force verifiers for the closed forms and the direct solver.
//!
//! These routines deliberately avoid the algebra they check: the threshold is
//! re-solved by bisection on the un-linearized gain condition, steady states
//! are reached by explicit time stepping, and the gain is recovered from
//! finite differences of the field evolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{positive, Error, Result};
use crate::kinetics::Generator;
use crate::lwi::{self, LaserEngineConfig};
use crate::model::{CoherenceSpec, Reservoir, SteadyState, BOLTZMANN_EV_PER_K};
use crate::photocell::{CellConfig, CellVariant, KineticRates};

/// Seed of the randomized suites unless the caller picks another.
pub const DEFAULT_SEED: u64 = 0x5EED_2011;

pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    low: f64,
    high: f64,
    tolerance: f64,
}

impl RootBracket {
    pub fn new(low: f64, high: f64, tolerance: f64) -> Result<Self> {
        positive("tolerance", tolerance)?;
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(Error::Domain {
                field: "bracket",
                value: high - low,
                reason: "need finite low < high",
            });
        }
        Ok(Self {
            low,
            high,
            tolerance,
        })
    }

    /// [0, ħν_s]: the laser photon cannot carry more than the pump photon.
    pub fn laser_default(config: &LaserEngineConfig) -> Self {
        Self {
            low: 0.0,
            high: config.hot().photon_energy(),
            tolerance: DEFAULT_ROOT_TOLERANCE,
        }
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Gain 2ρ_aa − ρ_bb − ρ_cc − 2 Re ρ_bc with the doublet populations set by
/// the baths for a laser photon of energy `laser_energy`.
fn threshold_gain(config: &LaserEngineConfig, rho_aa: f64, laser_energy: f64) -> f64 {
    let hot = config.hot();
    let kt_hot = BOLTZMANN_EV_PER_K * hot.temperature();
    let kt_cold = BOLTZMANN_EV_PER_K * config.cold_temperature();
    let sink_energy = hot.photon_energy() - laser_energy;
    let rho_bb = rho_aa * (hot.photon_energy() / kt_hot - sink_energy / kt_cold).exp();
    let rho_cc = rho_bb;
    let rho_bc = config.coherence().value();
    2.0 * rho_aa - rho_bb - rho_cc - (rho_bc + rho_bc.conj()).re
}

/// Laser photon energy at which the gain vanishes, by plain bisection.
pub fn threshold_root_solve(
    config: &LaserEngineConfig,
    rho_aa: f64,
    bracket: &RootBracket,
) -> Result<f64> {
    positive("rho_aa", rho_aa)?;
    let f = |nu: f64| threshold_gain(config, rho_aa, nu);
    let (mut lo, mut hi) = (bracket.low, bracket.high);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            low: lo,
            high: hi,
            f_low: f_lo,
            f_high: f_hi,
        });
    }
    let lo_sign = f_lo.signum();
    while hi - lo > bracket.tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gain at the threshold root; used to confirm the root is a zero of the gain.
pub fn gain_at(config: &LaserEngineConfig, rho_aa: f64, laser_energy: f64) -> f64 {
    threshold_gain(config, rho_aa, laser_energy)
}

/// Explicit Euler stepping of dρ/dt = M ρ until the largest per-step change
/// drops below `tol`.
///
/// The Euler map I + dt·M has exactly the kernel of M as its fixed points, so
/// the result carries no time-step bias, only the stopping residual.
pub fn integrate_to_steady_state(
    generator: &Generator,
    initial: &SteadyState,
    dt: f64,
    max_steps: usize,
    tol: f64,
) -> Result<SteadyState> {
    positive("dt", dt)?;
    positive("tol", tol)?;
    let n = generator.len();
    if initial.len() != n
        || !initial
            .labels()
            .eq(generator.labels().iter().map(String::as_str))
    {
        return Err(Error::Configuration(
            "initial state levels do not match the generator".into(),
        ));
    }
    let m = generator.matrix();
    for j in 0..n {
        if 1.0 + dt * m[(j, j)] <= 0.0 {
            return Err(Error::Domain {
                field: "dt",
                value: dt,
                reason: "too large: 1 + dt * M_jj must stay positive",
            });
        }
    }
    let mut rho: Vec<f64> = initial.populations().to_vec();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_steps {
        residual = 0.0;
        for i in 0..n {
            let mut drift = 0.0;
            for j in 0..n {
                drift += m[(i, j)] * rho[j];
            }
            next[i] = rho[i] + dt * drift;
            residual = f64::max(residual, (next[i] - rho[i]).abs());
        }
        std::mem::swap(&mut rho, &mut next);
        if residual < tol {
            let labels: Vec<String> = generator.labels().to_vec();
            let clamped = rho.iter().map(|p| p.max(0.0)).collect();
            return SteadyState::from_parts(labels, clamped, None, Complex64::new(0.0, 0.0));
        }
    }
    Err(Error::Convergence {
        steps: max_steps,
        residual,
    })
}

/// Uniform initial state over the generator's levels.
pub fn uniform_state(generator: &Generator) -> Result<SteadyState> {
    SteadyState::incoherent(generator.labels().iter().map(|l| (l.clone(), 1.0)))
}

/// Steady state by time stepping with a step safely inside the stability limit.
pub fn relax(generator: &Generator, tol: f64) -> Result<SteadyState> {
    let escape = generator.max_escape_rate();
    let dt = if escape > 0.0 { 0.5 / escape } else { 1.0 };
    integrate_to_steady_state(generator, &uniform_state(generator)?, dt, 10_000_000, tol)
}

/// (E(h) − E(0)) / (h E(0) κ) from the field integrator; tends to the gain as h → 0.
pub fn finite_difference_gain(state: &SteadyState, kappa: f64, h: f64) -> Result<f64> {
    positive("h", h)?;
    let start = lwi::integrate_field(state, kappa, 1.0, 0.0, 1)?.closed_form;
    let after = lwi::integrate_field(state, kappa, 1.0, h, 1)?.closed_form;
    Ok((after - start) / (h * start * kappa))
}

/// Errors of the finite-difference gain at h, h/2, h/4 and the two halving ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConvergence {
    pub errors: [f64; 3],
    pub ratios: [f64; 2],
    /// Error constant C in |error| ≈ C h, from the smallest step.
    pub constant: f64,
}

pub fn finite_difference_convergence(
    state: &SteadyState,
    kappa: f64,
    h: f64,
) -> Result<FdConvergence> {
    let exact = lwi::gain_factor(state)?;
    let mut errors = [0.0; 3];
    for (k, e) in errors.iter_mut().enumerate() {
        let step = h / f64::from(1u32 << k);
        *e = (finite_difference_gain(state, kappa, step)? - exact).abs();
    }
    Ok(FdConvergence {
        errors,
        ratios: [errors[0] / errors[1], errors[1] / errors[2]],
        constant: errors[2] / (h / 4.0),
    })
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl SuiteReport {
    fn new(name: &'static str, cases: usize, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            cases,
            max_deviation,
            tolerance,
            passed: max_deviation < tolerance,
            detail: String::new(),
        }
    }

    fn failed(name: &'static str, cases: usize, tolerance: f64, err: Error) -> Self {
        Self {
            name,
            cases,
            max_deviation: f64::INFINITY,
            tolerance,
            passed: false,
            detail: err.to_string(),
        }
    }
}

/// Random laser configuration from the verification ranges:
/// T_c ∈ [100, 400] K, T_h ∈ [1000, 10000] K, ħν_s ∈ [0.5, 3] eV,
/// |ρ_bc|/ρ_aa ∈ [0, 0.2], ρ_aa ∈ [0.05, 0.3], phase ∈ {0, π}.
pub fn random_laser_case(rng: &mut impl Rng) -> (LaserEngineConfig, f64) {
    let cold = rng.gen_range(100.0..=400.0);
    let hot = rng.gen_range(1000.0..=10_000.0);
    let energy = rng.gen_range(0.5..=3.0);
    let rho_aa = rng.gen_range(0.05..=0.3);
    let ratio = rng.gen_range(0.0..=0.2);
    let phase = if rng.gen_bool(0.5) { PI } else { 0.0 };
    let coherence = CoherenceSpec::new(ratio * rho_aa, phase).expect("in range");
    let config = LaserEngineConfig::new(
        Reservoir::new(hot, energy).expect("in range"),
        cold,
        coherence,
        1.0,
    )
    .expect("hot > cold");
    (config, rho_aa)
}

/// Zero-coherence efficiency versus 1 − T_c/T_h.
pub fn carnot_recovery_suite(seed: u64, cases: usize) -> SuiteReport {
    const NAME: &str = "carnot recovery";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (config, rho_aa) = random_laser_case(&mut rng);
        let config = config.with_coherence(CoherenceSpec::none());
        let hot = config.hot().temperature();
        match lwi::exact_coherent_efficiency(&config, rho_aa) {
            Ok(r) => {
                worst = worst.max((r.eta_exact - (1.0 - config.cold_temperature() / hot)).abs())
            }
            Err(e) => return SuiteReport::failed(NAME, cases, 1e-12, e),
        }
    }
    SuiteReport::new(NAME, cases, worst, 1e-12)
}

/// Bisection on the un-linearized threshold versus the closed form (eV).
pub fn threshold_suite(seed: u64, cases: usize) -> SuiteReport {
    const NAME: &str = "threshold root vs closed form";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (config, rho_aa) = random_laser_case(&mut rng);
        let closed = match lwi::exact_coherent_efficiency(&config, rho_aa) {
            Ok(r) => r.laser_photon_energy,
            Err(e) => return SuiteReport::failed(NAME, cases, 1e-9, e),
        };
        let root = match threshold_root_solve(&config, rho_aa, &RootBracket::laser_default(&config))
        {
            Ok(r) => r,
            Err(e) => return SuiteReport::failed(NAME, cases, 1e-9, e),
        };
        worst = worst.max((root - closed).abs());
    }
    SuiteReport::new(NAME, cases, worst, 1e-9)
}

/// Random irreducible generator on 3 or 4 levels: a directed ring guarantees
/// irreducibility, other pairs are connected with probability 0.7. Rates are
/// log-uniform in [0.1, 10].
pub fn random_generator(rng: &mut impl Rng) -> Generator {
    let n: usize = rng.gen_range(3..=4);
    let labels: Vec<String> = (0..n).map(|i| format!("l{i}")).collect();
    let mut transitions = Vec::new();
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            let ring = to == (from + 1) % n;
            if ring || rng.gen_bool(0.7) {
                let rate = 10f64.powf(rng.gen_range(-1.0..=1.0));
                transitions.push(crate::kinetics::Transition { from, to, rate });
            }
        }
    }
    Generator::from_transitions(labels, &transitions).expect("valid random generator")
}

/// Direct linear solve versus time integration on random rate matrices.
pub fn steady_state_suite(seed: u64, cases: usize) -> SuiteReport {
    const NAME: &str = "direct solve vs time integration";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let generator = random_generator(&mut rng);
        let deviation = generator.steady_state().and_then(|direct| {
            let integrated = relax(&generator, 1e-14)?;
            Ok(max_deviation(&direct, &integrated))
        });
        match deviation {
            Ok(d) => worst = worst.max(d),
            Err(e) => return SuiteReport::failed(NAME, cases, 1e-8, e),
        }
    }
    SuiteReport::new(NAME, cases, worst, 1e-8)
}

/// Largest per-level population difference.
pub fn max_deviation(a: &SteadyState, b: &SteadyState) -> f64 {
    a.populations()
        .iter()
        .zip(b.populations())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Direct solve versus integration on the reference photocell models.
pub fn photocell_kinetics_suite() -> SuiteReport {
    const NAME: &str = "photocell kinetics vs time integration";
    let mut worst = 0.0f64;
    for variant in CellVariant::ALL {
        let cell = CellConfig::reference(variant);
        let rates = KineticRates::reference(variant);
        let result = crate::photocell::CellModel::new(&cell, &rates).and_then(|model| {
            let generator = model.generator(rates.extraction_rate)?;
            let direct = generator.steady_state()?;
            let integrated = relax(&generator, 1e-14)?;
            Ok(max_deviation(&direct, &integrated))
        });
        match result {
            Ok(d) => worst = worst.max(d),
            Err(e) => return SuiteReport::failed(NAME, CellVariant::ALL.len(), 1e-8, e),
        }
    }
    SuiteReport::new(NAME, CellVariant::ALL.len(), worst, 1e-8)
}

/// Finite-difference gain against the analytic bracket, including the
/// first-order convergence of the difference quotient.
pub fn finite_difference_suite() -> SuiteReport {
    const NAME: &str = "finite-difference gain";
    let run = || -> Result<(f64, f64)> {
        let mut worst = 0.0f64;
        let mut worst_ratio = 0.0f64;
        for phase in [PI, 0.0] {
            for magnitude in [0.0, 0.05] {
                let state = SteadyState::new(
                    [("g", 0.4), ("b", 0.2), ("c", 0.2), ("a", 0.2)],
                    Some(("b", "c")),
                    Complex64::from_polar(magnitude, phase),
                )?;
                let exact = lwi::gain_factor(&state)?;
                let fd = finite_difference_gain(&state, 1.0, DEFAULT_FD_STEP)?;
                worst = worst.max((fd - exact).abs());
                if exact != 0.0 {
                    let conv = finite_difference_convergence(&state, 1.0, 1e-4)?;
                    for r in conv.ratios {
                        worst_ratio = worst_ratio.max((r - 2.0).abs());
                    }
                }
            }
        }
        Ok((worst, worst_ratio))
    };
    match run() {
        Ok((worst, ratio_dev)) => {
            let mut report = SuiteReport::new(NAME, 4, worst, 1e-6);
            report.passed &= ratio_dev <= 0.2;
            report.detail = format!("worst halving-ratio deviation from 2: {ratio_dev:.3e}");
            report
        }
        Err(e) => SuiteReport::failed(NAME, 4, 1e-6, e),
    }
}

/// Every suite, in a fixed order.
pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        carnot_recovery_suite(seed, 1000),
        threshold_suite(seed, 1000),
        steady_state_suite(seed, 100),
        photocell_kinetics_suite(),
        finite_difference_suite(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laser(magnitude: f64, phase: f64) -> LaserEngineConfig {
        LaserEngineConfig::new(
            Reservoir::new(6000.0, 1.0).unwrap(),
            300.0,
            CoherenceSpec::new(magnitude, phase).unwrap(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn root_without_coherence_is_carnot() {
        let c = laser(0.0, PI);
        let nu = threshold_root_solve(&c, 0.1, &RootBracket::laser_default(&c)).unwrap();
        assert!((nu - 0.95).abs() < 1e-12);
    }

    #[test]
    fn root_matches_closed_form_reference() {
        let c = laser(0.01, PI);
        let nu = threshold_root_solve(&c, 0.1, &RootBracket::laser_default(&c)).unwrap();
        let closed = lwi::exact_coherent_efficiency(&c, 0.1)
            .unwrap()
            .laser_photon_energy;
        assert!((nu - closed).abs() < 1e-10);
        assert!(gain_at(&c, 0.1, nu).abs() < 1e-10);
    }

    #[test]
    fn phase_zero_root_below_carnot() {
        let c = laser(0.01, 0.0);
        let nu = threshold_root_solve(&c, 0.1, &RootBracket::laser_default(&c)).unwrap();
        assert!(nu < 0.95);
    }

    #[test]
    fn bracket_without_sign_change() {
        let c = laser(0.01, PI);
        let b = RootBracket::new(0.0, 0.5, 1e-12).unwrap();
        match threshold_root_solve(&c, 0.1, &b) {
            Err(Error::Bracket { f_low, f_high, .. }) => assert!(f_low > 0.0 && f_high > 0.0),
            other => panic!("expected bracket error, got {other:?}"),
        }
        assert!(RootBracket::new(1.0, 0.0, 1e-12).is_err());
        assert!(RootBracket::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_generator_keeps_initial_state() {
        let g = Generator::from_transitions(["a", "b", "c"], &[]).unwrap();
        let init = SteadyState::incoherent([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap();
        let out = integrate_to_steady_state(&g, &init, 0.1, 10, 1e-12).unwrap();
        assert_eq!(out.populations(), init.populations());
    }

    #[test]
    fn two_level_thermal_generator() {
        let cell = CellConfig::reference(CellVariant::TwoLevel);
        let rates = KineticRates::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let g = crate::photocell::CellModel::new(&cell, &rates)
            .unwrap()
            .generator(0.0)
            .unwrap();
        let s = relax(&g, 1e-15).unwrap();
        let n = cell.solar_occupation();
        let ratio = s.population("c").unwrap() / s.population("g").unwrap();
        assert!((ratio - n / (n + 1.0)).abs() < 1e-8);
    }

    #[test]
    fn integration_errors() {
        let g = random_generator(&mut ChaCha8Rng::seed_from_u64(1));
        let init = uniform_state(&g).unwrap();
        let too_big = 2.0 / g.max_escape_rate();
        assert!(integrate_to_steady_state(&g, &init, too_big, 10, 1e-12).is_err());
        match integrate_to_steady_state(&g, &init, 1e-6, 3, 1e-15) {
            Err(Error::Convergence { steps, residual }) => {
                assert_eq!(steps, 3);
                assert!(residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
        let wrong = SteadyState::incoherent([("x", 1.0)]).unwrap();
        assert!(integrate_to_steady_state(&g, &wrong, 1e-3, 10, 1e-12).is_err());
    }

    #[test]
    fn finite_difference_examples() {
        let threshold = SteadyState::new(
            [("g", 0.4), ("b", 0.2), ("c", 0.2), ("a", 0.2)],
            Some(("b", "c")),
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        assert!(finite_difference_gain(&threshold, 1.0, 1e-6).unwrap().abs() < 1e-6);
        let lwi_state = SteadyState::new(
            [("g", 0.4), ("b", 0.2), ("c", 0.2), ("a", 0.2)],
            Some(("b", "c")),
            Complex64::from_polar(0.05, PI),
        )
        .unwrap();
        assert!((finite_difference_gain(&lwi_state, 1.0, 1e-6).unwrap() - 0.1).abs() < 1e-6);
        let conv = finite_difference_convergence(&lwi_state, 1.0, 1e-4).unwrap();
        for r in conv.ratios {
            assert!((1.8..=2.2).contains(&r), "{r}");
        }
        // Leading error term is κ g² h / 2.
        assert!((conv.constant - 0.005).abs() < 1e-4);
        assert!(finite_difference_gain(&lwi_state, 1.0, 0.0).is_err());
    }

    #[test]
    fn suites_are_seed_deterministic() {
        let a = threshold_suite(7, 20);
        let b = threshold_suite(7, 20);
        assert_eq!(a, b);
        assert!(a.passed);
    }
}

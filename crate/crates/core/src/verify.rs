//! Randomized invariant suites shared by the `verify` subcommand.
//!
//! Draws come from a ChaCha8 stream seeded with a 64-bit seed: rates are
//! log-uniform on `[1e-2, 1e2]`, phases uniform on `[0, 4 pi)`, delays uniform
//! on `[0, 5]` (zero for Markovian draws), detunings uniform on `[-20, 20]`.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::features::{find_features, linspace};
use crate::analysis::routing::{c_forms, IdealCase};
use crate::closed_form::{amplitudes, amplitudes_port1, amplitudes_port2, rabi_peak_distance, Port};
use crate::model::SystemParams;
use crate::oracle::oracle_solve;

pub const FLUX_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-10;
pub const RECIPROCITY_TOL: f64 = 1e-12;
pub const TABLE_TOL: f64 = 1e-10;
pub const PEAK_DISTANCE_TOL: f64 = 1e-3;
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Markovian,
    NonMarkovian,
    /// Alternate the two, starting Markovian.
    Mixed,
}

/// Seeded stream of parameter points.
pub struct Draws {
    rng: ChaCha8Rng,
    regime: Regime,
    count: u64,
}

impl Draws {
    pub fn new(seed: u64, regime: Regime) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            regime,
            count: 0,
        }
    }

    fn rate(&mut self) -> f64 {
        10f64.powf(self.rng.gen_range(-2.0..2.0))
    }

    fn phase(&mut self) -> f64 {
        self.rng.gen_range(0.0..4.0 * PI)
    }

    fn tau(&mut self, markovian: bool) -> f64 {
        if markovian {
            0.0
        } else {
            self.rng.gen_range(0.0..5.0)
        }
    }

    fn markovian_next(&mut self) -> bool {
        let m = match self.regime {
            Regime::Markovian => true,
            Regime::NonMarkovian => false,
            Regime::Mixed => self.count.is_multiple_of(2),
        };
        self.count += 1;
        m
    }

    /// A generic draw with four independent rates.
    pub fn generic(&mut self) -> (SystemParams, f64) {
        let markovian = self.markovian_next();
        let p = SystemParams {
            gamma_lambda_r: self.rate(),
            gamma_lambda_l: self.rate(),
            gamma_eta_r: self.rate(),
            gamma_eta_l: self.rate(),
            g: self.rate(),
            theta_l: self.phase(),
            theta_d: self.phase(),
            tau_l: self.tau(markovian),
            tau_d: self.tau(markovian),
        };
        (p, self.rng.gen_range(-20.0..20.0))
    }

    /// All four rates equal.
    pub fn symmetric(&mut self) -> (SystemParams, f64) {
        let markovian = self.markovian_next();
        let gamma = self.rate();
        let p = SystemParams {
            g: self.rate(),
            theta_l: self.phase(),
            theta_d: self.phase(),
            tau_l: self.tau(markovian),
            tau_d: self.tau(markovian),
            ..SystemParams::symmetric(gamma, 0.0, 0.0)
        };
        (p, self.rng.gen_range(-20.0..20.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub note: String,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            checked: 0,
            failures: 0,
            worst: 0.0,
            tolerance,
            note: String::new(),
        }
    }

    fn record(&mut self, err: f64) {
        self.checked += 1;
        if !(err < self.tolerance) {
            self.failures += 1;
        }
        if err.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(err);
        }
    }

    fn fail(&mut self, why: String) {
        self.checked += 1;
        self.failures += 1;
        if self.note.is_empty() {
            self.note = why;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<14} checked={} failures={} worst={:.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.failures,
            self.worst,
            self.tolerance
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

/// Four coefficients sum to one for injection at every port.
pub fn flux_suite(draws: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("flux", FLUX_TOL);
    let mut src = Draws::new(seed, Regime::Mixed);
    for _ in 0..draws {
        let (p, delta) = src.generic();
        for port in Port::ALL {
            match amplitudes(&p, delta, port) {
                Ok(a) => out.record(a.coefficients().flux_residual().abs()),
                Err(e) => out.fail(e.to_string()),
            }
        }
    }
    out
}

/// Closed-form amplitudes against the linear solve, ports 1 and 2.
pub fn oracle_suite(draws: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("oracle", ORACLE_TOL);
    let mut src = Draws::new(seed ^ 0x6f72_6163_6c65, Regime::Mixed);
    for _ in 0..draws {
        let (p, delta) = src.generic();
        for port in [Port::P1, Port::P2] {
            match (amplitudes(&p, delta, port), oracle_solve(&p, delta, port)) {
                (Ok(a), Ok(o)) => out.record(a.relative_error(&o.exits)),
                (Err(e), _) | (_, Err(e)) => out.fail(e.to_string()),
            }
        }
    }
    out
}

/// Equal rates: port-1 and port-2 coefficients agree pairwise and
/// `R_N = T_N`.
pub fn reciprocity_suite(draws: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("reciprocity", RECIPROCITY_TOL);
    let mut src = Draws::new(seed ^ 0x7265_6369, Regime::Mixed);
    for _ in 0..draws {
        let (p, delta) = src.symmetric();
        match (amplitudes_port1(&p, delta), amplitudes_port2(&p, delta)) {
            (Ok(a), Ok(b)) => {
                let (c1, c2) = (a.coefficients(), b.coefficients());
                let pair = c1
                    .as_array()
                    .iter()
                    .zip(c2.as_array())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                out.record(pair.max((c1.r_near - c1.t_far).abs()));
            }
            (Err(e), _) | (_, Err(e)) => out.fail(e.to_string()),
        }
    }
    out
}

/// Markovian `theta = pi` on both legs transmits exactly.
pub fn decoupling_suite(points: usize) -> SuiteResult {
    let mut out = SuiteResult::new("decoupling", f64::MIN_POSITIVE);
    let p = SystemParams::symmetric(1.0, 3.0, PI);
    for delta in linspace(-20.0, 20.0, points) {
        match amplitudes_port1(&p, delta) {
            Ok(a) => out.record((a.coefficients().t_same - 1.0).abs()),
            Err(e) => out.fail(e.to_string()),
        }
    }
    out
}

/// The coefficient patterns of the four ideal chiral cases.
pub fn table_suite(points: usize) -> SuiteResult {
    let mut out = SuiteResult::new("ideal_cases", TABLE_TOL);
    let grid = linspace(-10.0, 10.0, points);
    for n in 1..=4u8 {
        let case = IdealCase::from_number(n).expect("case number");
        let (pat1, pat2) = case.pattern().expect("ideal pattern");
        let p = case.params(1.0, 3.0, 0.5 * PI).expect("ideal params");
        for &delta in &grid {
            let (c1, c2) = c_forms(1.0, 3.0, 0.5 * PI, 0.5 * PI, delta);
            out.record((c1 + c2 - 1.0).abs());
            for (pattern, port) in [(pat1, Port::P1), (pat2, Port::P2)] {
                let coeffs = match amplitudes(&p, delta, port) {
                    Ok(a) => a.coefficients().as_array(),
                    Err(e) => {
                        out.fail(e.to_string());
                        continue;
                    }
                };
                for (entry, value) in pattern.iter().zip(coeffs) {
                    use crate::analysis::routing::Entry;
                    let err = match entry {
                        Entry::Zero => value,
                        Entry::One => 1.0 - value,
                        Entry::C1 => (value - c1).abs(),
                        Entry::C2 => (value - c2).abs(),
                    };
                    out.record(err);
                }
            }
        }
    }
    out
}

/// Refined `T_N` peak split near decoupling against `2 sqrt(g^2 - gamma^2 delta^4)`.
pub fn peak_distance_suite() -> SuiteResult {
    let mut out = SuiteResult::new("peak_distance", PEAK_DISTANCE_TOL);
    let g = 3.0;
    for small in [0.02, 0.05, 0.1] {
        let p = SystemParams::symmetric(1.0, g, PI + small);
        let grid = linspace(-6.0, 6.0, 6001);
        let f = |d: f64| amplitudes_port1(&p, d).map(|a| a.coefficients().t_far).unwrap_or(f64::NAN);
        match (find_features(&grid, f), rabi_peak_distance(1.0, g, small)) {
            (Ok(feat), Ok(expected)) => match feat.splitting_distance {
                Some(found) if feat.peaks.len() == 2 => out.record((found - expected).abs()),
                _ => out.fail(format!("expected two peaks at delta = {small}, found {}", feat.peaks.len())),
            },
            (Err(e), _) | (_, Err(e)) => out.fail(e.to_string()),
        }
    }
    out
}

/// `S^dagger S = I` for the assembled S-matrix.
pub fn unitarity_suite(draws: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("unitarity", UNITARITY_TOL);
    let mut src = Draws::new(seed ^ 0x756e_6974, Regime::Mixed);
    for _ in 0..draws {
        let (p, delta) = src.generic();
        match crate::closed_form::build_smatrix(&p, delta) {
            Ok(s) => out.record(s.unitarity_defect()),
            Err(e) => out.fail(e.to_string()),
        }
    }
    out
}

/// Every suite, in reporting order.
pub fn run_all(draws: usize, seed: u64) -> Vec<SuiteResult> {
    vec![
        flux_suite(draws, seed),
        oracle_suite(draws, seed),
        reciprocity_suite(draws, seed),
        unitarity_suite(draws, seed),
        decoupling_suite(10_000),
        table_suite(1_000),
        peak_distance_suite(),
    ]
}

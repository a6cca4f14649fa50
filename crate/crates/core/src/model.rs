//! Physical parameters, leg phases and self-energies.
//!
//! Units: `hbar = 1`, `v_g = 1`. Every rate (decay rates, the inner coupling
//! `g`, the detuning) is expressed in a single reference rate, times in its
//! inverse, phases in radians. The bare transition frequency never appears on
//! its own: it is folded into the constant part `theta` of each leg phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|1 + e^{i phi}|` below this marks a leg as decoupled from its waveguide.
pub const DECOUPLING_TOL: f64 = 1e-9;

/// Full parameter set of the two-waveguide giant-molecule device.
///
/// Atom `a` couples to waveguide M at `x = 0` and `x = l`, atom `b` couples to
/// waveguide N at `x = 0` and `x = d`; the atoms share a transition frequency
/// and interact with strength `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Decay of atom `a` into right-movers of waveguide M.
    pub gamma_lambda_r: f64,
    /// Decay of atom `a` into left-movers of waveguide M.
    pub gamma_lambda_l: f64,
    /// Decay of atom `b` into right-movers of waveguide N.
    pub gamma_eta_r: f64,
    /// Decay of atom `b` into left-movers of waveguide N.
    pub gamma_eta_l: f64,
    /// Atom-atom coupling.
    pub g: f64,
    pub theta_l: f64,
    pub theta_d: f64,
    /// Photon travel time between the coupling points of atom `a`.
    pub tau_l: f64,
    /// Photon travel time between the coupling points of atom `b`.
    pub tau_d: f64,
}

/// Outcome of [`SystemParams::validate`] for admissible parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Ok,
    /// Every decay rate is zero: the device is trivially transparent.
    Transparent,
}

impl SystemParams {
    /// All four decay rates equal to `gamma`, both legs at phase `theta`,
    /// Markovian.
    pub fn symmetric(gamma: f64, g: f64, theta: f64) -> Self {
        Self {
            gamma_lambda_r: gamma,
            gamma_lambda_l: gamma,
            gamma_eta_r: gamma,
            gamma_eta_l: gamma,
            g,
            theta_l: theta,
            theta_d: theta,
            tau_l: 0.0,
            tau_d: 0.0,
        }
    }

    /// Both atoms share the same right/left rates.
    pub fn chiral(gamma_r: f64, gamma_l: f64, g: f64, theta: f64) -> Self {
        Self {
            gamma_lambda_r: gamma_r,
            gamma_lambda_l: gamma_l,
            gamma_eta_r: gamma_r,
            gamma_eta_l: gamma_l,
            ..Self::symmetric(0.0, g, theta)
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau_l = tau;
        self.tau_d = tau;
        self
    }

    pub fn with_thetas(mut self, theta_l: f64, theta_d: f64) -> Self {
        self.theta_l = theta_l;
        self.theta_d = theta_d;
        self
    }

    pub fn leg_l(&self) -> LegPhase {
        LegPhase::new(self.tau_l, self.theta_l)
    }

    pub fn leg_d(&self) -> LegPhase {
        LegPhase::new(self.tau_d, self.theta_d)
    }

    /// Exchange the roles of the two waveguides (`lambda <-> eta`,
    /// `l <-> d`).
    pub fn swapped(&self) -> Self {
        Self {
            gamma_lambda_r: self.gamma_eta_r,
            gamma_lambda_l: self.gamma_eta_l,
            gamma_eta_r: self.gamma_lambda_r,
            gamma_eta_l: self.gamma_lambda_l,
            g: self.g,
            theta_l: self.theta_d,
            theta_d: self.theta_l,
            tau_l: self.tau_d,
            tau_d: self.tau_l,
        }
    }

    pub fn rates(&self) -> [f64; 4] {
        [
            self.gamma_lambda_r,
            self.gamma_lambda_l,
            self.gamma_eta_r,
            self.gamma_eta_l,
        ]
    }

    pub fn is_markovian(&self) -> bool {
        self.tau_l == 0.0 && self.tau_d == 0.0
    }

    /// All four rates equal within `tol` (relative to the largest).
    pub fn is_symmetric_coupling(&self, tol: f64) -> bool {
        let r = self.rates();
        let max = r.iter().cloned().fold(0.0, f64::max);
        r.iter().all(|x| (x - r[0]).abs() <= tol * max.max(f64::MIN_POSITIVE))
    }

    /// Check the sign constraints on rates and times.
    pub fn validate(&self) -> Result<Validity> {
        let fields = [
            ("gamma_lambda_r", self.gamma_lambda_r),
            ("gamma_lambda_l", self.gamma_lambda_l),
            ("gamma_eta_r", self.gamma_eta_r),
            ("gamma_eta_l", self.gamma_eta_l),
            ("g", self.g),
            ("tau_l", self.tau_l),
            ("tau_d", self.tau_d),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.theta_l.is_finite() || !self.theta_d.is_finite() {
            return Err(Error::Domain("phases must be finite".into()));
        }
        if self.rates().iter().all(|&x| x == 0.0) {
            Ok(Validity::Transparent)
        } else {
            Ok(Validity::Ok)
        }
    }
}

/// Phase accumulated between the two coupling points of one atom,
/// `phi(delta) = tau * delta + theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegPhase {
    pub tau: f64,
    pub theta: f64,
}

impl LegPhase {
    pub fn new(tau: f64, theta: f64) -> Self {
        Self { tau, theta }
    }

    pub fn markovian(theta: f64) -> Self {
        Self { tau: 0.0, theta }
    }

    /// Unreduced phase at detuning `delta`.
    pub fn at(&self, delta: f64) -> f64 {
        self.tau * delta + self.theta
    }
}

/// `tau * delta + theta`, not reduced mod 2 pi.
pub fn phase_shift(leg: LegPhase, delta: f64) -> f64 {
    leg.at(delta)
}

/// `1 + e^{i phi}`, evaluated as `2 cos(phi/2) e^{i phi/2}` so that the
/// magnitudes of `1 + e^{i phi}` and `1 + e^{-i phi}` agree bit for bit and
/// the zero at `phi = pi` is resolved to relative accuracy.
pub fn interference_factor(phi: f64) -> Complex64 {
    let half = 0.5 * phi;
    Complex64::from_polar(2.0 * half.cos(), half)
}

/// `phi` reduced into `[0, 2 pi)`.
pub fn reduce_phase(phi: f64) -> f64 {
    phi.rem_euclid(std::f64::consts::TAU)
}

/// True when the leg interferes destructively with itself,
/// `phi = pi (mod 2 pi)`.
pub fn is_decoupled(phi: f64) -> bool {
    let reduced = reduce_phase(phi);
    (2.0 * (0.5 * reduced).cos()).abs() < DECOUPLING_TOL
}

/// Self-energies of the two atoms and the common denominator
/// `D = g^2 - (delta + F_eta)(delta + F_lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergies {
    pub f_lambda: Complex64,
    pub f_eta: Complex64,
    pub denominator: Complex64,
}

pub fn self_energies(params: &SystemParams, delta: f64) -> SelfEnergies {
    let i = Complex64::i();
    let phi_l = params.leg_l().at(delta);
    let phi_d = params.leg_d().at(delta);
    let f_lambda =
        i * interference_factor(phi_l) * (params.gamma_lambda_l + params.gamma_lambda_r);
    let f_eta = i * interference_factor(phi_d) * (params.gamma_eta_l + params.gamma_eta_r);
    let denominator = params.g * params.g - (delta + f_eta) * (delta + f_lambda);
    SelfEnergies {
        f_lambda,
        f_eta,
        denominator,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const EPS: f64 = 1e-14;

    #[test]
    fn phase_shift_examples() {
        assert_eq!(phase_shift(LegPhase::new(0.0, 0.5 * PI), 7.3), 0.5 * PI);
        assert_eq!(phase_shift(LegPhase::new(1.0, 0.0), 0.0), 0.0);
        assert_eq!(phase_shift(LegPhase::new(2.0, 81.0 * PI), 1.5), 3.0 + 81.0 * PI);
    }

    #[test]
    fn self_energy_at_decoupling() {
        let p = SystemParams::symmetric(1.0, 2.0, PI);
        let se = self_energies(&p, 0.7);
        assert!(se.f_lambda.norm() < EPS && se.f_eta.norm() < EPS);
        assert!((se.denominator - Complex64::new(4.0 - 0.49, 0.0)).norm() < EPS);
    }

    #[test]
    fn self_energy_arithmetic() {
        let mut p = SystemParams::symmetric(0.5, 1.0, 0.0);
        let se = self_energies(&p, 0.0);
        assert!((se.f_lambda - Complex64::new(0.0, 2.0)).norm() < EPS);

        p.gamma_lambda_l = 0.25;
        p.gamma_lambda_r = 0.75;
        p.theta_l = 0.5 * PI;
        let se = self_energies(&p, 0.0);
        assert!((se.f_lambda - Complex64::new(-1.0, 1.0)).norm() < EPS);
    }

    #[test]
    fn decoupling_detection_is_mod_two_pi() {
        assert!(is_decoupled(PI));
        assert!(is_decoupled(81.0 * PI));
        assert!(is_decoupled(-PI));
        assert!(!is_decoupled(80.0 * PI));
        assert!(!is_decoupled(PI + 1e-6));
    }

    #[test]
    fn validate_rejects_negative() {
        let mut p = SystemParams::symmetric(1.0, 1.0, 0.0);
        assert_eq!(p.validate(), Ok(Validity::Ok));
        p.tau_d = -1.0;
        assert!(p.validate().is_err());
        let z = SystemParams::symmetric(0.0, 1.0, 0.0);
        assert_eq!(z.validate(), Ok(Validity::Transparent));
    }

    #[test]
    fn swap_is_an_involution() {
        let p = SystemParams {
            gamma_lambda_r: 1.0,
            gamma_lambda_l: 0.3,
            gamma_eta_r: 0.7,
            gamma_eta_l: 0.2,
            g: 2.0,
            theta_l: 0.4,
            theta_d: 1.1,
            tau_l: 0.8,
            tau_d: 1.3,
        };
        assert_eq!(p.swapped().swapped(), p);
        assert_eq!(p.swapped().gamma_lambda_l, 0.2);
    }

    proptest! {
        #[test]
        fn phase_is_affine(tau in 0.0..10.0f64, theta in -20.0..20.0f64,
                           a in -50.0..50.0f64, b in -50.0..50.0f64) {
            let leg = LegPhase::new(tau, theta);
            let lhs = phase_shift(leg, a + b);
            let rhs = phase_shift(leg, a) + phase_shift(leg, b) - theta;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn interference_factor_bounded(phi in -100.0..100.0f64, gl in 0.0..10.0f64, gr in 0.0..10.0f64) {
            let f = interference_factor(phi);
            prop_assert!(f.norm() <= 2.0 + 1e-15);
            let direct = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phi);
            prop_assert!((f - direct).norm() < 1e-13);
            let se = self_energies(&SystemParams { gamma_lambda_l: gl, gamma_lambda_r: gr,
                ..SystemParams::symmetric(1.0, 1.0, phi) }, 0.0);
            prop_assert!(se.f_lambda.norm() <= 2.0 * (gl + gr) + 1e-12);
        }
    }
}

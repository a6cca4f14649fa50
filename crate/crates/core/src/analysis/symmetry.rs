//! Numerical checks of the spectral symmetries of the equal-rate device.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::features::{golden_section_max, linspace};
use crate::closed_form::{amplitudes_port1, Coefficients};
use crate::error::Result;
use crate::model::SystemParams;

/// Residual below which a relation is reported as holding.
pub const RELATION_TOL: f64 = 1e-10;

fn port1(params: &SystemParams, delta: f64) -> Result<Coefficients> {
    Ok(amplitudes_port1(params, delta)?.coefficients())
}

fn max_gap(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest difference of any port-1 coefficient between `delta_1 + x` and
/// `delta_1 - x`, `delta_1 = 2 gamma sin(theta)`, for `x` in `[0, half_width]`
/// (Markovian, equal rates, equal leg phases).
pub fn reflection_asymmetry(
    gamma: f64,
    g: f64,
    theta: f64,
    half_width: f64,
    samples: usize,
) -> Result<f64> {
    let p = SystemParams::symmetric(gamma, g, theta);
    let centre = 2.0 * gamma * theta.sin();
    let mut worst: f64 = 0.0;
    for x in linspace(0.0, half_width, samples) {
        let a = port1(&p, centre + x)?.as_array();
        let b = port1(&p, centre - x)?.as_array();
        worst = worst.max(max_gap(&a, &b));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationVariant {
    /// `R(delta, theta) = R(-delta, 2pi - theta)` and
    /// `T(delta, theta) = T(-delta, 2pi - theta)`.
    TransmissionToTransmission,
    /// `R(delta, theta) = R(-delta, 2pi - theta)` and
    /// `T(delta, theta) = R(-delta, 2pi - theta)`.
    TransmissionToReflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseReversalReport {
    pub tt_residual: f64,
    pub tr_residual: f64,
}

impl PhaseReversalReport {
    /// The single variant that holds, if exactly one does.
    pub fn unique_holding(&self) -> Option<RelationVariant> {
        match (self.tt_residual < RELATION_TOL, self.tr_residual < RELATION_TOL) {
            (true, false) => Some(RelationVariant::TransmissionToTransmission),
            (false, true) => Some(RelationVariant::TransmissionToReflection),
            _ => None,
        }
    }
}

/// Test both readings of the `(delta, theta) -> (-delta, 2pi - theta)`
/// relation on waveguides N and M.
pub fn phase_reversal_relations(
    gamma: f64,
    g: f64,
    thetas: &[f64],
    deltas: &[f64],
) -> Result<PhaseReversalReport> {
    let mut tt: f64 = 0.0;
    let mut tr: f64 = 0.0;
    for &theta in thetas {
        let p = SystemParams::symmetric(gamma, g, theta);
        let q = SystemParams::symmetric(gamma, g, TAU - theta);
        for &delta in deltas {
            let a = port1(&p, delta)?;
            let b = port1(&q, -delta)?;
            let reflections = (a.r_near - b.r_near).abs().max((a.r_same - b.r_same).abs());
            tt = tt
                .max(reflections)
                .max((a.t_far - b.t_far).abs())
                .max((a.t_same - b.t_same).abs());
            tr = tr
                .max(reflections)
                .max((a.t_far - b.r_near).abs())
                .max((a.t_same - b.r_same).abs());
        }
    }
    Ok(PhaseReversalReport {
        tt_residual: tt,
        tr_residual: tr,
    })
}

/// `max |X(delta) - X(-delta)|` over the four port-1 coefficients.
pub fn inversion_asymmetry(params: &SystemParams, deltas: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &delta in deltas {
        let a = port1(params, delta)?.as_array();
        let b = port1(params, -delta)?.as_array();
        worst = worst.max(max_gap(&a, &b));
    }
    Ok(worst)
}

/// Detuning in `[lo, hi]` where the four port-1 coefficients come closest to
/// an equal 1/4 split, with the residual `max |X - 1/4|` there.
pub fn equal_split_point(params: &SystemParams, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let spread = |d: f64| -> f64 {
        port1(params, d)
            .map(|c| c.as_array().iter().map(|x| (x - 0.25).abs()).fold(0.0, f64::max))
            .unwrap_or(f64::INFINITY)
    };
    let grid = linspace(lo, hi, 4001);
    let step = grid[1] - grid[0];
    let (k, _) = grid
        .iter()
        .map(|&d| spread(d))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let (x, neg) = golden_section_max(|d| -spread(d), grid[k] - step, grid[k] + step, 1e-12);
    Ok((x, -neg))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// About `delta_1 = 2 gamma sin(theta)` at `theta = pi/2`.
    pub reflection_asymmetry: f64,
    pub phase_reversal: PhaseReversalReport,
    pub holding_variant: Option<RelationVariant>,
    /// `T(delta) = T(-delta)` at `tau gamma = 1`, `theta = 80 pi`.
    pub nonmarkovian_inversion_asymmetry: f64,
    /// Equal-split point at `theta = 3 pi / 4`.
    pub equal_split: (f64, f64),
}

impl SymmetryReport {
    pub fn passes(&self) -> bool {
        self.reflection_asymmetry < RELATION_TOL
            && self.holding_variant.is_some()
            && self.nonmarkovian_inversion_asymmetry < RELATION_TOL
            && self.equal_split.1 < 0.01
    }
}

/// The standard battery for rate `gamma` and inner coupling `g`.
pub fn symmetry_validators(gamma: f64, g: f64) -> Result<SymmetryReport> {
    let reflection = reflection_asymmetry(gamma, g, 0.5 * PI, 10.0 * gamma, 2001)?;
    let thetas: Vec<f64> = linspace(0.05, 1.95, 20).into_iter().map(|t| t * PI).collect();
    let deltas = linspace(-8.0 * gamma, 8.0 * gamma, 161);
    let reversal = phase_reversal_relations(gamma, g, &thetas, &deltas)?;
    let nm = SystemParams::symmetric(gamma, 2.0, 80.0 * PI).with_tau(1.0 / gamma);
    let inversion = inversion_asymmetry(&nm, &linspace(0.0, 20.0 * gamma, 2001))?;
    let split = equal_split_point(
        &SystemParams::symmetric(gamma, g, 0.75 * PI),
        -8.0 * gamma,
        8.0 * gamma,
    )?;
    Ok(SymmetryReport {
        reflection_asymmetry: reflection,
        phase_reversal: reversal,
        holding_variant: reversal.unique_holding(),
        nonmarkovian_inversion_asymmetry: inversion,
        equal_split: split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectra_symmetric_about_shifted_centre() {
        assert!(reflection_asymmetry(1.0, 3.0, 0.5 * PI, 10.0, 2001).unwrap() < 1e-10);
        assert!(reflection_asymmetry(1.0, 3.0, 0.3 * PI, 10.0, 501).unwrap() < 1e-10);
    }

    #[test]
    fn only_the_transmission_pairing_holds() {
        let thetas = [0.3, 0.5 * PI, 2.0, 1.2 * PI];
        let deltas = linspace(-6.0, 6.0, 61);
        let r = phase_reversal_relations(1.0, 3.0, &thetas, &deltas).unwrap();
        assert_eq!(r.unique_holding(), Some(RelationVariant::TransmissionToTransmission));
        assert!(r.tr_residual > 0.1);
    }

    #[test]
    fn nonmarkovian_integer_theta_is_even() {
        let p = SystemParams::symmetric(1.0, 2.0, 80.0 * PI).with_tau(1.0);
        assert!(inversion_asymmetry(&p, &linspace(0.0, 20.0, 4001)).unwrap() < 1e-10);
        let q = SystemParams::symmetric(1.0, 2.0, 80.5 * PI).with_tau(1.0);
        assert!(inversion_asymmetry(&q, &linspace(0.0, 20.0, 401)).unwrap() > 1e-3);
    }

    #[test]
    fn near_equal_split() {
        let (d, res) = equal_split_point(&SystemParams::symmetric(1.0, 3.0, 0.75 * PI), -8.0, 8.0).unwrap();
        assert!(res < 0.01, "residual {res} at {d}");
    }

    #[test]
    fn battery_passes() {
        let report = symmetry_validators(1.0, 3.0).unwrap();
        assert!(report.passes(), "{report:?}");
    }
}

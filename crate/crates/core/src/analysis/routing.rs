//! Ideal chiral-coupling cases and directional routing.
//!
//! The four ideal cases have every atom coupled to a single propagation
//! direction:
//!
//! | case | nonzero rates | port 1 `(R_N, T_N, R_M, T_M)` | port 2 |
//! |---|---|---|---|
//! | 1 | `eta_R = lambda_R` | `(0, C1, 0, C2)` | `(0, 0, 0, 1)` |
//! | 2 | `eta_L = lambda_L` | `(0, 0, 0, 1)` | `(0, C1, 0, C2)` |
//! | 3 | `eta_R = lambda_L` | `(0, 0, 0, 1)` | `(C1, 0, 0, C2)` |
//! | 4 | `eta_L = lambda_R` | `(C1, 0, 0, C2)` | `(0, 0, 0, 1)` |

use num_complex::Complex64;
use serde::Serialize;

use super::features::{find_features, linspace};
use crate::closed_form::{amplitudes_port1, amplitudes_port2, Port};
use crate::error::Result;
use crate::model::{interference_factor, SystemParams};

/// Rates at or below this count as zero when matching a case.
pub const ZERO_RATE_TOL: f64 = 1e-12;
/// Relative tolerance for the two matched rates to count as equal.
pub const EQUAL_RATE_TOL: f64 = 1e-9;
pub const DEFAULT_ROUTING_THRESHOLD: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdealCase {
    Case1,
    Case2,
    Case3,
    Case4,
    Generic,
}

impl IdealCase {
    pub fn number(self) -> Option<u8> {
        match self {
            IdealCase::Case1 => Some(1),
            IdealCase::Case2 => Some(2),
            IdealCase::Case3 => Some(3),
            IdealCase::Case4 => Some(4),
            IdealCase::Generic => None,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(IdealCase::Case1),
            2 => Some(IdealCase::Case2),
            3 => Some(IdealCase::Case3),
            4 => Some(IdealCase::Case4),
            _ => None,
        }
    }

    /// Parameters realising this case with rate `gamma`.
    pub fn params(self, gamma: f64, g: f64, theta: f64) -> Option<SystemParams> {
        let base = SystemParams::symmetric(0.0, g, theta);
        let p = match self {
            IdealCase::Case1 => SystemParams { gamma_eta_r: gamma, gamma_lambda_r: gamma, ..base },
            IdealCase::Case2 => SystemParams { gamma_eta_l: gamma, gamma_lambda_l: gamma, ..base },
            IdealCase::Case3 => SystemParams { gamma_eta_r: gamma, gamma_lambda_l: gamma, ..base },
            IdealCase::Case4 => SystemParams { gamma_eta_l: gamma, gamma_lambda_r: gamma, ..base },
            IdealCase::Generic => return None,
        };
        Some(p)
    }

    /// Expected coefficient patterns `(port 1, port 2)`, each ordered
    /// `(R_N, T_N, R_M, T_M)`.
    pub fn pattern(self) -> Option<([Entry; 4], [Entry; 4])> {
        use Entry::*;
        let transparent = [Zero, Zero, Zero, One];
        match self {
            IdealCase::Case1 => Some(([Zero, C1, Zero, C2], transparent)),
            IdealCase::Case2 => Some((transparent, [Zero, C1, Zero, C2])),
            IdealCase::Case3 => Some((transparent, [C1, Zero, Zero, C2])),
            IdealCase::Case4 => Some(([C1, Zero, Zero, C2], transparent)),
            IdealCase::Generic => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Entry {
    Zero,
    One,
    C1,
    C2,
}

/// Which ideal case a rate pattern realises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoutingCase {
    pub case: IdealCase,
    /// The common nonzero rate of a matched case.
    pub gamma: Option<f64>,
}

impl RoutingCase {
    pub fn pattern(&self) -> Option<([Entry; 4], [Entry; 4])> {
        self.case.pattern()
    }
}

pub fn classify_routing(params: &SystemParams) -> RoutingCase {
    let zero = |x: f64| x.abs() <= ZERO_RATE_TOL;
    let equal = |a: f64, b: f64| {
        a > ZERO_RATE_TOL && b > ZERO_RATE_TOL && (a - b).abs() <= EQUAL_RATE_TOL * a.max(b)
    };
    let SystemParams {
        gamma_lambda_r: lr,
        gamma_lambda_l: ll,
        gamma_eta_r: er,
        gamma_eta_l: el,
        ..
    } = *params;
    let candidates = [
        (IdealCase::Case1, (er, lr), (el, ll)),
        (IdealCase::Case2, (el, ll), (er, lr)),
        (IdealCase::Case3, (er, ll), (el, lr)),
        (IdealCase::Case4, (el, lr), (er, ll)),
    ];
    for (case, on, off) in candidates {
        if equal(on.0, on.1) && zero(off.0) && zero(off.1) {
            return RoutingCase {
                case,
                gamma: Some(0.5 * (on.0 + on.1)),
            };
        }
    }
    RoutingCase {
        case: IdealCase::Generic,
        gamma: None,
    }
}

/// `(C1, C2)` for an ideal case with rate `gamma`, evaluated at the leg
/// phases `phi_l`, `phi_d` reached at `delta`.
pub fn c_forms(gamma: f64, g: f64, phi_l: f64, phi_d: f64, delta: f64) -> (f64, f64) {
    let i = Complex64::i();
    let cl = interference_factor(phi_l);
    let cd = interference_factor(phi_d);
    let cl_conj = interference_factor(-phi_l);
    let den = g * g - (delta + i * cd * gamma) * (delta + i * cl * gamma);
    let c1 = (i * cd * cl * g * gamma / den).norm_sqr();
    let c2 = ((g * g - (delta + i * cd * gamma) * (delta - i * cl_conj * gamma)) / den).norm_sqr();
    (c1, c2)
}

/// Markovian peak positions `gamma sin(theta) +- sqrt(g^2 - gamma^2 (1 + cos theta)^2)`
/// of the routed coefficient in cases 1 and 4 (`T_N` and `R_N` respectively),
/// where it reaches one. `None` when the radicand is negative.
pub fn routing_peak_positions(gamma: f64, g: f64, theta: f64) -> Option<[f64; 2]> {
    let radicand = g * g
        - 1.5 * gamma * gamma
        - 2.0 * gamma * gamma * theta.cos()
        - 0.5 * gamma * gamma * (2.0 * theta).cos();
    if radicand < 0.0 {
        return None;
    }
    let centre = gamma * theta.sin();
    let half = radicand.sqrt();
    Some([centre - half, centre + half])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingPoint {
    pub delta: f64,
    /// Port-1 injection, probabilities indexed by exit port 1..4.
    pub from_port1: [f64; 4],
    /// Port-2 injection, probabilities indexed by exit port 1..4.
    pub from_port2: [f64; 4],
    /// Most likely exit for port-1 injection.
    pub dominant: Port,
    /// `(C1, C2)` when an ideal case applies.
    pub c_forms: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingReport {
    pub case: RoutingCase,
    pub threshold: f64,
    pub points: Vec<RoutingPoint>,
    /// Detunings where a single exit (port-1 injection) exceeds the threshold.
    pub routed: Vec<(f64, Port)>,
    /// Exit with the largest mean probability over the grid (port-1 injection).
    pub dominant_exit: Option<Port>,
    /// Formula peak positions, when the case and regime admit them.
    pub predicted_peaks: Option<[f64; 2]>,
    /// Refined peaks of the routed coefficient.
    pub found_peaks: Vec<f64>,
}

impl RoutingReport {
    /// Largest distance between a predicted peak and the nearest found one.
    pub fn peak_mismatch(&self) -> Option<f64> {
        let predicted = self.predicted_peaks?;
        if self.found_peaks.is_empty() {
            return None;
        }
        Some(
            predicted
                .iter()
                .map(|p| {
                    self.found_peaks
                        .iter()
                        .map(|f| (f - p).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max),
        )
    }
}

/// Port-1 exit probabilities indexed by exit port.
fn probabilities(params: &SystemParams, delta: f64, port: Port) -> Result<[f64; 4]> {
    let set = match port {
        Port::P1 => amplitudes_port1(params, delta)?,
        _ => amplitudes_port2(params, delta)?,
    };
    Ok(set.by_exit_port().map(|z| z.norm_sqr()))
}

pub fn routing_targets(
    params: &SystemParams,
    delta_grid: &[f64],
    threshold: f64,
) -> Result<RoutingReport> {
    let case = classify_routing(params);
    let mut points = Vec::with_capacity(delta_grid.len());
    let mut routed = Vec::new();
    let mut sums = [0.0; 4];
    for &delta in delta_grid {
        let from_port1 = probabilities(params, delta, Port::P1)?;
        let from_port2 = probabilities(params, delta, Port::P2)?;
        let (best, &pmax) = from_port1
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("four ports");
        let dominant = Port::ALL[best];
        if pmax > threshold {
            routed.push((delta, dominant));
        }
        for (s, p) in sums.iter_mut().zip(from_port1) {
            *s += p;
        }
        let c = case.gamma.map(|gamma| {
            c_forms(gamma, params.g, params.leg_l().at(delta), params.leg_d().at(delta), delta)
        });
        points.push(RoutingPoint {
            delta,
            from_port1,
            from_port2,
            dominant,
            c_forms: c,
        });
    }
    let dominant_exit = if delta_grid.is_empty() {
        None
    } else {
        sums.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| Port::ALL[k])
    };

    // T_N (exit 4) in case 1, R_N (exit 3) in case 4
    let target = match case.case {
        IdealCase::Case1 => Some(Port::P4),
        IdealCase::Case4 => Some(Port::P3),
        _ => None,
    };
    let mut predicted_peaks = None;
    let mut found_peaks = Vec::new();
    if let (Some(exit), Some(gamma)) = (target, case.gamma) {
        if params.is_markovian() && params.theta_l == params.theta_d {
            predicted_peaks = routing_peak_positions(gamma, params.g, params.theta_l);
        }
        if delta_grid.len() >= 3 {
            let grid = if delta_grid.windows(2).all(|w| w[1] > w[0]) {
                delta_grid.to_vec()
            } else {
                linspace(delta_grid[0], delta_grid[delta_grid.len() - 1], delta_grid.len())
            };
            let f = |d: f64| {
                probabilities(params, d, Port::P1)
                    .map(|p| p[exit.index()])
                    .unwrap_or(f64::NAN)
            };
            found_peaks = find_features(&grid, f)?.peaks.iter().map(|e| e.delta).collect();
        }
    }

    Ok(RoutingReport {
        case,
        threshold,
        points,
        routed,
        dominant_exit,
        predicted_peaks,
        found_peaks,
    })
}

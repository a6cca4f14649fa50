//! Analytic single-photon scattering amplitudes.
//!
//! Ports: 1 and 2 are the left and right ends of waveguide M, 3 and 4 the left
//! and right ends of waveguide N. A photon enters with unit amplitude; the
//! injected plane wave is `e^{ikx}` (left ends) or `e^{-ikx}` (right ends),
//! both referenced to `x = 0`.
//!
//! Ports 3 and 4 are obtained from ports 1 and 2 by exchanging the roles of
//! the two waveguides, which is exact because both atoms share one transition
//! frequency.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{interference_factor, is_decoupled, self_energies, LegPhase, SystemParams};

/// `|D|` below `POLE_GUARD * max(g^2, |delta+F_eta||delta+F_lambda|, 1)` is
/// treated as a pole.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    P1,
    P2,
    P3,
    P4,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::P1, Port::P2, Port::P3, Port::P4];

    pub fn from_number(n: u8) -> Option<Port> {
        match n {
            1 => Some(Port::P1),
            2 => Some(Port::P2),
            3 => Some(Port::P3),
            4 => Some(Port::P4),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn index(self) -> usize {
        match self {
            Port::P1 => 0,
            Port::P2 => 1,
            Port::P3 => 2,
            Port::P4 => 3,
        }
    }

    /// Port on the left end of its waveguide.
    pub fn is_left(self) -> bool {
        matches!(self, Port::P1 | Port::P3)
    }

    pub fn on_m(self) -> bool {
        matches!(self, Port::P1 | Port::P2)
    }

    fn from_parts(on_m: bool, left: bool) -> Port {
        match (on_m, left) {
            (true, true) => Port::P1,
            (true, false) => Port::P2,
            (false, true) => Port::P3,
            (false, false) => Port::P4,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// The four exit amplitudes for one injection port.
///
/// Fields are named relative to the injection waveguide: `r_same` and
/// `t_same` stay in it, `r_near` exits the other waveguide on the same side as
/// the injection port and `t_far` on the opposite side. For port 1 these are
/// `(r_N, t_N, r_M, t_M)`, for port 2 the tilde amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSet {
    pub r_near: Complex64,
    pub t_far: Complex64,
    pub r_same: Complex64,
    pub t_same: Complex64,
    pub injection: Port,
}

impl AmplitudeSet {
    /// Perfect transmission through the injection waveguide.
    pub fn transparent(injection: Port) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            r_near: zero,
            t_far: zero,
            r_same: zero,
            t_same: Complex64::new(1.0, 0.0),
            injection,
        }
    }

    /// `[r_near, t_far, r_same, t_same]`.
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.r_near, self.t_far, self.r_same, self.t_same]
    }

    pub fn coefficients(&self) -> Coefficients {
        coefficients(self)
    }

    /// Exit port reached by each field of the set, in `as_array` order.
    pub fn exit_ports(&self) -> [Port; 4] {
        let inj = self.injection;
        let (m, left) = (inj.on_m(), inj.is_left());
        [
            Port::from_parts(!m, left),
            Port::from_parts(!m, !left),
            Port::from_parts(m, left),
            Port::from_parts(m, !left),
        ]
    }

    /// Inverse of [`AmplitudeSet::by_exit_port`].
    pub fn from_exit_ports(injection: Port, by_port: [Complex64; 4]) -> Self {
        let mut set = Self::transparent(injection);
        let ports = set.exit_ports();
        set.r_near = by_port[ports[0].index()];
        set.t_far = by_port[ports[1].index()];
        set.r_same = by_port[ports[2].index()];
        set.t_same = by_port[ports[3].index()];
        set
    }

    /// Amplitudes indexed by exit port (a column of the S-matrix).
    pub fn by_exit_port(&self) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (port, amp) in self.exit_ports().iter().zip(self.as_array()) {
            out[port.index()] = amp;
        }
        out
    }

    /// Largest componentwise deviation from `other`, relative to the 2-norm
    /// of `other`.
    pub fn relative_error(&self, other: &AmplitudeSet) -> f64 {
        let norm = other
            .as_array()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / norm
    }
}

/// Scattering probabilities, named as in [`AmplitudeSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub r_near: f64,
    pub t_far: f64,
    pub r_same: f64,
    pub t_same: f64,
}

impl Coefficients {
    pub fn sum(&self) -> f64 {
        self.r_near + self.t_far + self.r_same + self.t_same
    }

    /// Signed deviation of the total probability from one.
    pub fn flux_residual(&self) -> f64 {
        self.sum() - 1.0
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.r_near, self.t_far, self.r_same, self.t_same]
    }
}

pub fn coefficients(amps: &AmplitudeSet) -> Coefficients {
    Coefficients {
        r_near: amps.r_near.norm_sqr(),
        t_far: amps.t_far.norm_sqr(),
        r_same: amps.r_same.norm_sqr(),
        t_same: amps.t_same.norm_sqr(),
    }
}

/// Per-leg interference factors `1 + e^{+i phi}` and `1 + e^{-i phi}`.
struct Legs {
    phi_l: f64,
    cl: Complex64,
    cl_conj: Complex64,
    cd: Complex64,
    cd_conj: Complex64,
}

impl Legs {
    fn new(phi_l: f64, phi_d: f64) -> Self {
        Self {
            phi_l,
            cl: interference_factor(phi_l),
            cl_conj: interference_factor(-phi_l),
            cd: interference_factor(phi_d),
            cd_conj: interference_factor(-phi_d),
        }
    }
}

/// Returns `Ok(None)` when both legs are decoupled (the device is
/// transparent), `Ok(Some(D))` for a usable denominator.
fn guarded_denominator(
    g: f64,
    delta: f64,
    phi_l: f64,
    phi_d: f64,
    f_lambda: Complex64,
    f_eta: Complex64,
) -> Result<Option<Complex64>> {
    if is_decoupled(phi_l) && is_decoupled(phi_d) {
        return Ok(None);
    }
    let a = delta + f_eta;
    let b = delta + f_lambda;
    let den = g * g - a * b;
    let scale = (g * g).max(a.norm() * b.norm()).max(1.0);
    if den.norm() < POLE_GUARD * scale {
        return Err(Error::Pole {
            delta,
            magnitude: den.norm(),
        });
    }
    Ok(Some(den))
}

/// Amplitudes `(r_N, t_N, r_M, t_M)` for injection at port 1.
pub fn amplitudes_port1(params: &SystemParams, delta: f64) -> Result<AmplitudeSet> {
    let phi_l = params.leg_l().at(delta);
    let phi_d = params.leg_d().at(delta);
    let se = self_energies(params, delta);
    let Some(den) = guarded_denominator(params.g, delta, phi_l, phi_d, se.f_lambda, se.f_eta)?
    else {
        return Ok(AmplitudeSet::transparent(Port::P1));
    };
    let i = Complex64::i();
    let lg = Legs::new(phi_l, phi_d);
    let g = params.g;
    let SystemParams {
        gamma_lambda_r: lr,
        gamma_lambda_l: ll,
        gamma_eta_r: er,
        gamma_eta_l: el,
        ..
    } = *params;

    let r_n = i * lg.cd * lg.cl * g * (el * lr).sqrt() / den;
    let t_n = i * lg.cd_conj * lg.cl * g * (er * lr).sqrt() / den;
    let r_m = i * lg.cl * lg.cl * (delta + se.f_eta) * (ll * lr).sqrt() / den;
    let bracket = i * lg.cl * (ll - Complex64::from_polar(1.0, -lg.phi_l) * lr) + delta;
    let t_m = (g * g - bracket * (se.f_eta + delta)) / den;
    Ok(AmplitudeSet {
        r_near: r_n,
        t_far: t_n,
        r_same: r_m,
        t_same: t_m,
        injection: Port::P1,
    })
}

/// Amplitudes `(r~_N, t~_N, r~_M, t~_M)` for injection at port 2.
pub fn amplitudes_port2(params: &SystemParams, delta: f64) -> Result<AmplitudeSet> {
    let phi_l = params.leg_l().at(delta);
    let phi_d = params.leg_d().at(delta);
    let se = self_energies(params, delta);
    let Some(den) = guarded_denominator(params.g, delta, phi_l, phi_d, se.f_lambda, se.f_eta)?
    else {
        return Ok(AmplitudeSet::transparent(Port::P2));
    };
    let i = Complex64::i();
    let lg = Legs::new(phi_l, phi_d);
    let g = params.g;
    let SystemParams {
        gamma_lambda_r: lr,
        gamma_lambda_l: ll,
        gamma_eta_r: er,
        gamma_eta_l: el,
        ..
    } = *params;

    let r_n = i * lg.cd_conj * lg.cl_conj * g * (er * ll).sqrt() / den;
    let t_n = i * lg.cd * lg.cl_conj * g * (el * ll).sqrt() / den;
    let r_m = i * lg.cl_conj * lg.cl_conj * (delta + se.f_eta) * (ll * lr).sqrt() / den;
    let bracket = i * lg.cl * (lr - Complex64::from_polar(1.0, -lg.phi_l) * ll) + delta;
    let t_m = (g * g - bracket * (se.f_eta + delta)) / den;
    Ok(AmplitudeSet {
        r_near: r_n,
        t_far: t_n,
        r_same: r_m,
        t_same: t_m,
        injection: Port::P2,
    })
}

/// Amplitudes for injection at port 3 or 4, by waveguide exchange.
pub fn amplitudes_port34(params: &SystemParams, delta: f64, port: Port) -> Result<AmplitudeSet> {
    let swapped = params.swapped();
    let mut set = match port {
        Port::P3 => amplitudes_port1(&swapped, delta)?,
        Port::P4 => amplitudes_port2(&swapped, delta)?,
        other => {
            return Err(Error::Domain(format!(
                "amplitudes_port34 needs port 3 or 4, got {other}"
            )))
        }
    };
    set.injection = port;
    Ok(set)
}

/// Amplitudes for any injection port.
pub fn amplitudes(params: &SystemParams, delta: f64, port: Port) -> Result<AmplitudeSet> {
    match port {
        Port::P1 => amplitudes_port1(params, delta),
        Port::P2 => amplitudes_port2(params, delta),
        Port::P3 | Port::P4 => amplitudes_port34(params, delta, port),
    }
}

/// Port-1 amplitudes in the reduced form valid when all four decay rates
/// equal `gamma`. Agrees with [`amplitudes_port1`] under equal rates.
pub fn amplitudes_symmetric(
    gamma: f64,
    g: f64,
    legs: [LegPhase; 2],
    delta: f64,
) -> Result<AmplitudeSet> {
    let i = Complex64::i();
    let phi_l = legs[0].at(delta);
    let phi_d = legs[1].at(delta);
    let lg = Legs::new(phi_l, phi_d);
    let f_l = 2.0 * i * lg.cl * gamma;
    let f_d = 2.0 * i * lg.cd * gamma;
    let Some(den) = guarded_denominator(g, delta, phi_l, phi_d, f_l, f_d)? else {
        return Ok(AmplitudeSet::transparent(Port::P1));
    };
    Ok(AmplitudeSet {
        r_near: i * lg.cd * lg.cl * g * gamma / den,
        t_far: i * lg.cd_conj * lg.cl * g * gamma / den,
        r_same: i * lg.cl * lg.cl * (delta + f_d) * gamma / den,
        t_same: (g * g - (delta - 2.0 * gamma * phi_l.sin()) * (delta + f_d)) / den,
        injection: Port::P1,
    })
}

/// Port-2 amplitudes in the equal-rate case, from the port-1 set through the
/// phase relations `r~_N = e^{-i(phi_d+phi_l)} r_N`,
/// `t~_N = e^{i(phi_d-phi_l)} t_N`, `r~_M = e^{-2i phi_l} r_M`, `t~_M = t_M`.
pub fn amplitudes_symmetric_port2(
    gamma: f64,
    g: f64,
    legs: [LegPhase; 2],
    delta: f64,
) -> Result<AmplitudeSet> {
    let p1 = amplitudes_symmetric(gamma, g, legs, delta)?;
    let phi_l = legs[0].at(delta);
    let phi_d = legs[1].at(delta);
    if p1 == AmplitudeSet::transparent(Port::P1) {
        return Ok(AmplitudeSet::transparent(Port::P2));
    }
    Ok(AmplitudeSet {
        r_near: Complex64::from_polar(1.0, -(phi_d + phi_l)) * p1.r_near,
        t_far: Complex64::from_polar(1.0, phi_d - phi_l) * p1.t_far,
        r_same: Complex64::from_polar(1.0, -2.0 * phi_l) * p1.r_same,
        t_same: p1.t_same,
        injection: Port::P2,
    })
}

/// Near-decoupling approximation of `t_N` for `theta = pi + small_delta`,
/// symmetric coupling.
pub fn rabi_approx_tn(gamma: f64, g: f64, delta: f64, small_delta: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let d2 = small_delta * small_delta;
    let shifted = delta + 2.0 * gamma * small_delta + i * gamma * d2;
    let den = g * g - shifted * shifted;
    if den.norm() == 0.0 {
        return Err(Error::Pole {
            delta,
            magnitude: 0.0,
        });
    }
    Ok(i * g * gamma * d2 / den)
}

/// Peak positions `-2 gamma delta +- sqrt(g^2 - gamma^2 delta^4)` of the
/// approximate `T_N`.
pub fn rabi_peak_positions(gamma: f64, g: f64, small_delta: f64) -> Result<[f64; 2]> {
    let half = 0.5 * rabi_peak_distance(gamma, g, small_delta)?;
    let centre = -2.0 * gamma * small_delta;
    Ok([centre - half, centre + half])
}

/// Separation `2 sqrt(g^2 - gamma^2 delta^4)` of the two split peaks; tends
/// to `2g` as `small_delta -> 0`.
pub fn rabi_peak_distance(gamma: f64, g: f64, small_delta: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::Domain(format!("peak distance needs g > 0, got {g}")));
    }
    let shift = gamma * small_delta * small_delta;
    let radicand = g * g - shift * shift;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "g^2 = {} < gamma^2 delta^4 = {}",
            g * g,
            shift * shift
        )));
    }
    Ok(2.0 * radicand.sqrt())
}

/// 4x4 scattering matrix; `s[i][j]` is the amplitude from port `j+1` to
/// port `i+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMatrix {
    pub s: [[Complex64; 4]; 4],
    pub delta: f64,
}

impl SMatrix {
    pub fn from_columns(columns: [AmplitudeSet; 4], delta: f64) -> Self {
        let mut s = [[Complex64::new(0.0, 0.0); 4]; 4];
        for col in columns {
            let j = col.injection.index();
            for (i, amp) in col.by_exit_port().into_iter().enumerate() {
                s[i][j] = amp;
            }
        }
        Self { s, delta }
    }

    pub fn entry(&self, exit: Port, injection: Port) -> Complex64 {
        self.s[exit.index()][injection.index()]
    }

    pub fn column_norms(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (j, n) in out.iter_mut().enumerate() {
            *n = (0..4).map(|i| self.s[i][j].norm_sqr()).sum::<f64>().sqrt();
        }
        out
    }

    /// `max |(S^dagger S - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..4 {
                    acc += self.s[k][a].conj() * self.s[k][b];
                }
                if a == b {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Largest `| |s_ij| - |s_ji| |` over all pairs.
    pub fn magnitude_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.s[i][j].norm() - self.s[j][i].norm()).abs());
            }
        }
        worst
    }
}

pub fn build_smatrix(params: &SystemParams, delta: f64) -> Result<SMatrix> {
    let columns = [
        amplitudes_port1(params, delta)?,
        amplitudes_port2(params, delta)?,
        amplitudes_port34(params, delta, Port::P3)?,
        amplitudes_port34(params, delta, Port::P4)?,
    ];
    Ok(SMatrix::from_columns(columns, delta))
}

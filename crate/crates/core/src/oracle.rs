//! Boundary-matching solution of the stationary scattering problem.
//!
//! Each waveguide carries a right- and a left-moving plane wave whose
//! amplitude is piecewise constant on the three regions `x < 0`,
//! `0 < x < leg` and `x > leg`. The delta-function couplings impose a jump
//! condition at each coupling point; the atomic equations sample the field at
//! the coupling points with the midpoint rule `phi(x0) = (phi(x0-) + phi(x0+))/2`.
//! Together this is a 10x10 linear system that does not depend on the
//! injection port; only the right-hand side does.
//!
//! Unknown ordering (port-1 names in brackets):
//!
//! | index | unknown |
//! |---|---|
//! | 0 | right-mover inside leg l (`t_l`) |
//! | 1 | left-mover inside leg l (`r_l`) |
//! | 2 | right-mover inside leg d (`t_d`) |
//! | 3 | left-mover inside leg d (`r_d`) |
//! | 4 | right-mover beyond leg l, waveguide M (`t_M`) |
//! | 5 | left-mover before 0, waveguide M (`r_M`) |
//! | 6 | right-mover beyond leg d, waveguide N (`t_N`) |
//! | 7 | left-mover before 0, waveguide N (`r_N`) |
//! | 8 | `u_a` |
//! | 9 | `u_b` |
//!
//! Equation ordering: jump conditions for RM, LM, RN, LN at the first
//! coupling point, then the same four at the second, then atom `a`, atom `b`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::closed_form::{AmplitudeSet, Port, SMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Lu, Matrix};
use crate::model::SystemParams;

pub const SIZE: usize = 10;

/// 1-norm condition numbers above this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Waveguide {
    M,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

/// Plane-wave amplitudes of one waveguide on the regions
/// `[x < 0, inside the leg, beyond the leg]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branches {
    pub right: [Complex64; 3],
    pub left: [Complex64; 3],
}

/// The assembled system for one parameter point.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: Matrix<SIZE>,
    pub phi_l: f64,
    pub phi_d: f64,
    lambda: [f64; 2],
    eta: [f64; 2],
}

/// Incoming amplitudes `[M from left, M from right, N from left, N from right]`.
fn incoming(port: Port) -> [f64; 4] {
    let mut v = [0.0; 4];
    v[port.index()] = 1.0;
    v
}

impl LinearSystem {
    pub fn assemble(params: &SystemParams, delta: f64) -> Self {
        let i = Complex64::i();
        let zero = Complex64::new(0.0, 0.0);
        let phi_l = params.leg_l().at(delta);
        let phi_d = params.leg_d().at(delta);
        let el = Complex64::from_polar(1.0, phi_l);
        let ed = Complex64::from_polar(1.0, phi_d);
        let (lr, ll) = (params.gamma_lambda_r.sqrt(), params.gamma_lambda_l.sqrt());
        let (er, elf) = (params.gamma_eta_r.sqrt(), params.gamma_eta_l.sqrt());
        let mut a = [[zero; SIZE]; SIZE];

        // first coupling point
        a[0][0] = -i;
        a[0][8] = lr.into();
        a[1][1] = i;
        a[1][5] = -i;
        a[1][8] = ll.into();
        a[2][2] = -i;
        a[2][9] = er.into();
        a[3][3] = i;
        a[3][7] = -i;
        a[3][9] = elf.into();
        // second coupling point
        a[4][0] = i * el;
        a[4][4] = -i * el;
        a[4][8] = lr.into();
        a[5][1] = -i / el;
        a[5][8] = ll.into();
        a[6][2] = i * ed;
        a[6][6] = -i * ed;
        a[6][9] = er.into();
        a[7][3] = -i / ed;
        a[7][9] = elf.into();
        // atom a
        a[8][8] = delta.into();
        a[8][9] = (-params.g).into();
        a[8][0] = -0.5 * lr * (1.0 + el);
        a[8][4] = -0.5 * lr * el;
        a[8][5] = (-0.5 * ll).into();
        a[8][1] = -0.5 * ll * (1.0 + 1.0 / el);
        // atom b
        a[9][9] = delta.into();
        a[9][8] = (-params.g).into();
        a[9][2] = -0.5 * er * (1.0 + ed);
        a[9][6] = -0.5 * er * ed;
        a[9][7] = (-0.5 * elf).into();
        a[9][3] = -0.5 * elf * (1.0 + 1.0 / ed);

        Self {
            matrix: a,
            phi_l,
            phi_d,
            lambda: [lr, ll],
            eta: [er, elf],
        }
    }

    pub fn rhs(&self, port: Port) -> [Complex64; SIZE] {
        let i = Complex64::i();
        let [m_left, m_right, n_left, n_right] = incoming(port);
        let el_inv = Complex64::from_polar(1.0, -self.phi_l);
        let ed_inv = Complex64::from_polar(1.0, -self.phi_d);
        let [lr, ll] = self.lambda;
        let [er, elf] = self.eta;
        let mut b = [Complex64::new(0.0, 0.0); SIZE];
        b[0] = -i * m_left;
        b[2] = -i * n_left;
        b[5] = -i * el_inv * m_right;
        b[7] = -i * ed_inv * n_right;
        b[8] = 0.5 * lr * m_left + 0.5 * ll * el_inv * m_right;
        b[9] = 0.5 * er * n_left + 0.5 * elf * ed_inv * n_right;
        b
    }

    /// Row-major text dump: each line holds the ten matrix entries followed
    /// by the right-hand side, as tab-separated `re,im` pairs.
    pub fn dump(&self, port: Port) -> String {
        let b = self.rhs(port);
        let mut out = String::new();
        let _ = writeln!(out, "# boundary-matching system, injection port {port}");
        let _ = writeln!(out, "# columns: t_l r_l t_d r_d t_M r_M t_N r_N u_a u_b | rhs");
        for (row, rhs) in self.matrix.iter().zip(b) {
            let cells: Vec<String> = row
                .iter()
                .chain(std::iter::once(&rhs))
                .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
                .collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }
}

/// Solution of the boundary-matching system for one injection port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSolution {
    pub injection: Port,
    pub m: Branches,
    pub n: Branches,
    pub u_a: Complex64,
    pub u_b: Complex64,
    pub exits: AmplitudeSet,
    /// `max |A x - b|`.
    pub residual: f64,
    /// 1-norm of the system matrix.
    pub system_norm: f64,
    /// 1-norm condition number.
    pub condition: f64,
    pub phi_l: f64,
    pub phi_d: f64,
}

impl OracleSolution {
    /// Right-mover amplitude inside leg l.
    pub fn t_l(&self) -> Complex64 {
        self.m.right[1]
    }

    /// Left-mover amplitude inside leg l.
    pub fn r_l(&self) -> Complex64 {
        self.m.left[1]
    }

    pub fn t_d(&self) -> Complex64 {
        self.n.right[1]
    }

    pub fn r_d(&self) -> Complex64 {
        self.n.left[1]
    }

    /// Field amplitude at position `x`, measured in units of the leg length
    /// of `waveguide` (so the coupling points sit at `x = 0` and `x = 1`).
    /// Exactly at a coupling point the midpoint value is returned.
    pub fn field(&self, waveguide: Waveguide, direction: Direction, x: f64) -> Complex64 {
        let (branches, phi) = match waveguide {
            Waveguide::M => (&self.m, self.phi_l),
            Waveguide::N => (&self.n, self.phi_d),
        };
        let (amps, sign) = match direction {
            Direction::Right => (&branches.right, 1.0),
            Direction::Left => (&branches.left, -1.0),
        };
        let envelope = if x < 0.0 {
            amps[0]
        } else if x == 0.0 {
            0.5 * (amps[0] + amps[1])
        } else if x < 1.0 {
            amps[1]
        } else if x == 1.0 {
            0.5 * (amps[1] + amps[2])
        } else {
            amps[2]
        };
        envelope * Complex64::from_polar(1.0, sign * phi * x)
    }
}

pub fn field_profile(
    sol: &OracleSolution,
    waveguide: Waveguide,
    direction: Direction,
    x: f64,
) -> Complex64 {
    sol.field(waveguide, direction, x)
}

struct Factored {
    system: LinearSystem,
    lu: Lu<SIZE>,
    norm: f64,
    condition: f64,
}

fn factor(params: &SystemParams, delta: f64) -> Result<Factored> {
    let system = LinearSystem::assemble(params, delta);
    let lu = Lu::factor(&system.matrix);
    let norm = linalg::norm1(&system.matrix);
    let condition = norm * lu.inverse_norm1();
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::SingularSystem {
            condition,
            delta,
            params: format!("{params:?}"),
        });
    }
    Ok(Factored {
        system,
        lu,
        norm,
        condition,
    })
}

fn solve_factored(f: &Factored, port: Port) -> OracleSolution {
    let b = f.system.rhs(port);
    let x = f.lu.solve(&b);
    let residual = linalg::residual(&f.system.matrix, &x, &b);
    let inc = incoming(port).map(|v| Complex64::new(v, 0.0));
    let m = Branches {
        right: [inc[0], x[0], x[4]],
        left: [x[5], x[1], inc[1]],
    };
    let n = Branches {
        right: [inc[2], x[2], x[6]],
        left: [x[7], x[3], inc[3]],
    };
    // outgoing waves by exit port
    let by_port = [m.left[0], m.right[2], n.left[0], n.right[2]];
    OracleSolution {
        injection: port,
        m,
        n,
        u_a: x[8],
        u_b: x[9],
        exits: AmplitudeSet::from_exit_ports(port, by_port),
        residual,
        system_norm: f.norm,
        condition: f.condition,
        phi_l: f.system.phi_l,
        phi_d: f.system.phi_d,
    }
}

/// Solve for any injection port.
pub fn oracle_solve(params: &SystemParams, delta: f64, port: Port) -> Result<OracleSolution> {
    Ok(solve_factored(&factor(params, delta)?, port))
}

pub fn oracle_solve_port1(params: &SystemParams, delta: f64) -> Result<OracleSolution> {
    oracle_solve(params, delta, Port::P1)
}

pub fn oracle_solve_port2(params: &SystemParams, delta: f64) -> Result<OracleSolution> {
    oracle_solve(params, delta, Port::P2)
}

/// Full S-matrix from four right-hand sides of one factorisation. Unlike
/// [`crate::closed_form::build_smatrix`] this injects into waveguide N
/// directly instead of using the waveguide exchange.
pub fn oracle_smatrix(params: &SystemParams, delta: f64) -> Result<SMatrix> {
    let f = factor(params, delta)?;
    let cols = Port::ALL.map(|p| solve_factored(&f, p).exits);
    Ok(SMatrix::from_columns(cols, delta))
}

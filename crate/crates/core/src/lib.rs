//! Exact single-photon scattering through a chiral giant molecule: two
//! coupled two-level giant atoms, each attached at two points to its own
//! waveguide, forming a four-port device.
//!
//! * [`model`]: parameters, leg phases, self-energies.
//! * [`closed_form`]: analytic amplitudes for all ports and the S-matrix.
//! * [`oracle`]: the boundary-matching linear system the closed forms are
//!   checked against.
//! * [`analysis`]: contrast ratios, ideal routing, spectral features,
//!   symmetry checks.
//! * [`sweep`]: parameter grids, config files, CSV/JSON tables.
//! * [`verify`]: randomized invariant suites.

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod sweep;
pub mod verify;

pub use closed_form::{
    amplitudes, amplitudes_port1, amplitudes_port2, amplitudes_port34, build_smatrix,
    AmplitudeSet, Coefficients, Port, SMatrix,
};
pub use error::{Error, Result};
pub use model::{LegPhase, SystemParams};

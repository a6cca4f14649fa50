//! Contrast ratios between opposite propagation directions.
//!
//! `I_N` compares port 1 -> 4 with port 2 -> 3 (chirality), `I_M` compares
//! port 1 -> 2 with port 2 -> 1 (nonreciprocity). A ratio whose two
//! directions both carry zero probability is reported as undefined (`None`):
//! there is no channel, which is not the same as a reciprocal one.

use serde::Serialize;

use crate::closed_form::{amplitudes_port1, amplitudes_port2};
use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Allowed gap between `I_N` from coefficients and its closed form.
pub const CHIRALITY_CROSS_CHECK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastRatios {
    pub i_n: Option<f64>,
    pub i_m: Option<f64>,
    pub delta: f64,
}

/// `(forward - backward) / (forward + backward)`, undefined when both vanish.
pub fn contrast(forward: f64, backward: f64) -> Option<f64> {
    let total = forward + backward;
    if total >= f64::MIN_POSITIVE {
        Some((forward - backward) / total)
    } else {
        None
    }
}

/// Detuning- and delay-independent chirality
/// `1 - 2 G_etaL G_lambdaL / (G_etaL G_lambdaL + G_etaR G_lambdaR)`.
pub fn contrast_in_closed(params: &SystemParams) -> Result<f64> {
    let left = params.gamma_eta_l * params.gamma_lambda_l;
    let right = params.gamma_eta_r * params.gamma_lambda_r;
    if left + right <= 0.0 {
        return Err(Error::Domain(
            "no cross-waveguide channel in either direction".into(),
        ));
    }
    Ok(1.0 - 2.0 * left / (left + right))
}

/// Both contrast ratios from the port-1 and port-2 coefficients. `I_N` is
/// checked against [`contrast_in_closed`] whenever it is defined.
pub fn contrast_ratios(params: &SystemParams, delta: f64) -> Result<ContrastRatios> {
    let c1 = amplitudes_port1(params, delta)?.coefficients();
    let c2 = amplitudes_port2(params, delta)?.coefficients();
    let i_n = contrast(c1.t_far, c2.t_far);
    let i_m = contrast(c1.t_same, c2.t_same);
    if let Some(value) = i_n {
        let closed = contrast_in_closed(params)?;
        if (value - closed).abs() > CHIRALITY_CROSS_CHECK {
            return Err(Error::CrossCheck(format!(
                "I_N = {value} from coefficients, {closed} in closed form at delta = {delta}"
            )));
        }
    }
    Ok(ContrastRatios { i_n, i_m, delta })
}

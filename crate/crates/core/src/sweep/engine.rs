//! Grid evaluation.
//!
//! The outermost axis is split into contiguous chunks, one per worker; each
//! chunk buffers its rows and the chunks are concatenated in order, so the
//! output never depends on the worker count.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AxisName, Output, SweepSpec};
use crate::analysis::contrast::contrast;
use crate::analysis::features::{find_features, find_sampled_features, Extremum};
use crate::closed_form::{amplitudes, AmplitudeSet, Port};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::oracle::oracle_solve;

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "GS_THREADS";

/// Why a row has no amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowFailure {
    Pole,
    Singular,
    Error,
}

impl RowFailure {
    fn of(err: &Error) -> Self {
        match err {
            Error::Pole { .. } => RowFailure::Pole,
            Error::SingularSystem { .. } => RowFailure::Singular,
            _ => RowFailure::Error,
        }
    }

    pub fn marker(self) -> &'static str {
        match self {
            RowFailure::Pole => "pole",
            RowFailure::Singular => "singular",
            RowFailure::Error => "error",
        }
    }
}

/// One grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRecord {
    pub delta: f64,
    pub theta_l: f64,
    pub theta_d: f64,
    pub g: f64,
    pub tau_l: f64,
    pub tau_d: f64,
    /// `Gamma_lambdaL / Gamma_lambdaR`.
    pub glr_lambda: f64,
    /// `Gamma_etaL / Gamma_etaR`.
    pub glr_eta: f64,
    /// `R_N, T_N, R_M, T_M` for port-1 injection, NaN when the row failed.
    pub port1: [f64; 4],
    /// The same four for port-2 injection.
    pub port2: [f64; 4],
    pub i_n: Option<f64>,
    pub i_m: Option<f64>,
    pub flux1: std::result::Result<f64, RowFailure>,
    pub flux2: std::result::Result<f64, RowFailure>,
    /// Requested ports, only when amplitudes were asked for.
    pub amplitudes: Vec<(Port, std::result::Result<AmplitudeSet, RowFailure>)>,
}

impl SpectrumRecord {
    /// Larger absolute flux residual of the two ports, if both solved.
    pub fn worst_flux(&self) -> Option<f64> {
        match (self.flux1, self.flux2) {
            (Ok(a), Ok(b)) => Some(a.abs().max(b.abs())),
            _ => None,
        }
    }
}

fn solve(params: &SystemParams, delta: f64, port: Port, oracle: bool) -> Result<AmplitudeSet> {
    if oracle {
        oracle_solve(params, delta, port).map(|s| s.exits)
    } else {
        amplitudes(params, delta, port)
    }
}

/// Evaluate a single point.
pub fn evaluate(spec: &SweepSpec, params: &SystemParams, delta: f64) -> SpectrumRecord {
    let one = solve(params, delta, Port::P1, spec.oracle);
    let two = solve(params, delta, Port::P2, spec.oracle);
    let unpack = |r: &Result<AmplitudeSet>| match r {
        Ok(a) => {
            let c = a.coefficients();
            (c.as_array(), Ok(c.flux_residual()))
        }
        Err(e) => ([f64::NAN; 4], Err(RowFailure::of(e))),
    };
    let (port1, flux1) = unpack(&one);
    let (port2, flux2) = unpack(&two);
    let (i_n, i_m) = if flux1.is_ok() && flux2.is_ok() {
        (contrast(port1[1], port2[1]), contrast(port1[3], port2[3]))
    } else {
        (None, None)
    };

    let amplitudes = if spec.wants(Output::Amplitudes) {
        spec.ports
            .iter()
            .map(|&port| {
                let r = match port {
                    Port::P1 => one.clone(),
                    Port::P2 => two.clone(),
                    _ => solve(params, delta, port, spec.oracle),
                };
                (port, r.map_err(|e| RowFailure::of(&e)))
            })
            .collect()
    } else {
        Vec::new()
    };

    SpectrumRecord {
        delta,
        theta_l: params.theta_l,
        theta_d: params.theta_d,
        g: params.g,
        tau_l: params.tau_l,
        tau_d: params.tau_d,
        glr_lambda: params.gamma_lambda_l / params.gamma_lambda_r,
        glr_eta: params.gamma_eta_l / params.gamma_eta_r,
        port1,
        port2,
        i_n,
        i_m,
        flux1,
        flux2,
        amplitudes,
    }
}

/// Axis values, outermost first.
fn axis_values(spec: &SweepSpec) -> Vec<Vec<f64>> {
    spec.axes.iter().map(|a| a.values()).collect()
}

/// Parameter point for a multi-index.
fn point(spec: &SweepSpec, values: &[Vec<f64>], index: &[usize]) -> (SystemParams, f64) {
    let mut params = spec.base;
    let mut delta = spec.delta;
    // Ratio axes scale the right-moving rates, so apply the others first.
    for (k, axis) in spec.axes.iter().enumerate() {
        if axis.name != AxisName::GammaRatioLR {
            axis.name.apply(&mut params, &mut delta, values[k][index[k]]);
        }
    }
    for (k, axis) in spec.axes.iter().enumerate() {
        if axis.name == AxisName::GammaRatioLR {
            axis.name.apply(&mut params, &mut delta, values[k][index[k]]);
        }
    }
    (params, delta)
}

/// Row-major multi-index of flat position `flat`.
fn unravel(counts: &[usize], mut flat: usize) -> Vec<usize> {
    let mut index = vec![0; counts.len()];
    for k in (0..counts.len()).rev() {
        index[k] = flat % counts[k];
        flat /= counts[k];
    }
    index
}

/// Worker count from [`THREADS_VAR`], capped by the available parallelism.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n >= 1 => n.min(available.max(1)).max(1),
        _ => available,
    }
}

/// Evaluate every grid point in row-major order.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SpectrumRecord> {
    run_sweep_with(spec, worker_count())
}

pub fn run_sweep_with(spec: &SweepSpec, workers: usize) -> Vec<SpectrumRecord> {
    if spec.is_empty() {
        return Vec::new();
    }
    let values = axis_values(spec);
    let counts: Vec<usize> = spec.axes.iter().map(|a| a.count).collect();
    let outer = counts[0];
    let inner: usize = counts[1..].iter().product();
    let workers = workers.clamp(1, outer);

    // contiguous ranges of the outermost axis
    let chunks: Vec<(usize, usize)> = (0..workers)
        .map(|w| (w * outer / workers, (w + 1) * outer / workers))
        .collect();
    let run_chunk = |&(lo, hi): &(usize, usize)| -> Vec<SpectrumRecord> {
        (lo * inner..hi * inner)
            .map(|flat| {
                let (params, delta) = point(spec, &values, &unravel(&counts, flat));
                evaluate(spec, &params, delta)
            })
            .collect()
    };

    let buffers: Vec<Vec<SpectrumRecord>> = if workers == 1 {
        chunks.iter().map(run_chunk).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| chunks.par_iter().map(run_chunk).collect()),
            Err(_) => chunks.iter().map(run_chunk).collect(),
        }
    };
    buffers.into_iter().flatten().collect()
}

/// One refined extremum of a coefficient along the detuning axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRow {
    /// Values of the non-detuning axes, in axis order.
    pub fixed: Vec<(String, f64)>,
    /// `"T_N"` or `"T_M"` (port-1 injection).
    pub series: &'static str,
    /// `"peak"` or `"dip"`.
    pub kind: &'static str,
    pub extremum: Extremum,
}

/// Peaks and dips of `T_N` and `T_M` along the detuning axis, for every
/// combination of the remaining axes. Closed-form sweeps refine peaks
/// off-grid; oracle sweeps stop at the parabolic vertex.
pub fn feature_table(spec: &SweepSpec, records: &[SpectrumRecord]) -> Result<Vec<FeatureRow>> {
    let axis = spec
        .axes
        .iter()
        .position(|a| a.name == AxisName::Delta)
        .ok_or_else(|| Error::Domain("features need a delta axis".into()))?;
    let values = axis_values(spec);
    let counts: Vec<usize> = spec.axes.iter().map(|a| a.count).collect();
    let others: Vec<usize> = (0..counts.len()).filter(|&k| k != axis).collect();
    let groups: usize = others.iter().map(|&k| counts[k]).product();
    let other_counts: Vec<usize> = others.iter().map(|&k| counts[k]).collect();
    let strides: Vec<usize> = (0..counts.len()).map(|k| counts[k + 1..].iter().product()).collect();

    let mut rows = Vec::new();
    for group in 0..groups {
        let sub = unravel(&other_counts, group);
        let mut index = vec![0; counts.len()];
        for (j, &k) in others.iter().enumerate() {
            index[k] = sub[j];
        }
        let fixed: Vec<(String, f64)> = others
            .iter()
            .map(|&k| (spec.axes[k].name.as_str().to_string(), values[k][index[k]]))
            .collect();
        let base_flat: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
        let (params, _) = point(spec, &values, &index);
        let grid = &values[axis];

        for (series, column) in [("T_N", 1usize), ("T_M", 3usize)] {
            let feats = if spec.oracle {
                let series_data: Vec<(f64, f64)> = (0..counts[axis])
                    .map(|i| {
                        let rec = &records[base_flat + i * strides[axis]];
                        (rec.delta, rec.port1[column])
                    })
                    .collect();
                find_sampled_features(&series_data)?
            } else {
                let f = |d: f64| {
                    amplitudes(&params, d, Port::P1)
                        .map(|a| a.coefficients().as_array()[column])
                        .unwrap_or(f64::NAN)
                };
                find_features(grid, f)?
            };
            for (kind, list) in [("peak", feats.peaks), ("dip", feats.dips)] {
                for extremum in list {
                    rows.push(FeatureRow {
                        fixed: fixed.clone(),
                        series,
                        kind,
                        extremum,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::config::{parse_config, Axis};
    use std::f64::consts::PI;

    #[test]
    fn row_major_order() {
        let spec = parse_config("gamma_all=1\ng=2\naxis=theta_both:0:1:3\naxis=delta:-1:1:4").unwrap();
        let rows = run_sweep_with(&spec, 2);
        assert_eq!(rows.len(), 12);
        assert_eq!((rows[0].theta_l, rows[0].delta), (0.0, -1.0));
        assert_eq!((rows[3].theta_l, rows[3].delta), (0.0, 1.0));
        assert_eq!((rows[4].theta_l, rows[4].delta), (0.5, -1.0));
        assert_eq!(rows[11].theta_d, 1.0);
    }

    #[test]
    fn decoupled_row_transmits() {
        let spec = parse_config("gamma_all=1\ng=3\naxis=theta_both:0:2pi:5\naxis=delta:-8:8:161").unwrap();
        let rows = run_sweep(&spec);
        let at_pi: Vec<_> = rows.iter().filter(|r| r.theta_l == PI).collect();
        assert_eq!(at_pi.len(), 161);
        assert!(at_pi.iter().all(|r| r.port1[3] == 1.0));
    }

    #[test]
    fn zero_coupling_never_crosses() {
        let spec = parse_config("gamma_all=1\ng=0\ntheta_both=0.3pi\naxis=delta:-8:8:101").unwrap();
        assert!(run_sweep(&spec).iter().all(|r| r.port1[1] == 0.0));
    }

    #[test]
    fn poles_are_recorded_not_fatal() {
        let mut spec = parse_config("gamma_all=1\ng=0\ntheta_l=pi\ntheta_d=0.2\naxis=delta:-1:1:3").unwrap();
        spec.outputs.push(Output::Amplitudes);
        let rows = run_sweep(&spec);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].flux1, Err(RowFailure::Pole));
        assert!(rows[1].port1[0].is_nan());
        assert_eq!(rows[1].amplitudes[0].1, Err(RowFailure::Pole));
        assert!(rows[0].flux1.is_ok());
    }

    #[test]
    fn oracle_mode_agrees() {
        let text = "gamma_lambda_r=1\ngamma_lambda_l=0.3\ngamma_eta_r=0.7\ngamma_eta_l=1.2\ng=2\ntheta_l=0.4\ntheta_d=1.1\ntau_both=0.8\naxis=delta:-5:5:21";
        let spec = parse_config(text).unwrap();
        let closed = run_sweep_with(&spec, 1);
        let oracle = run_sweep_with(&SweepSpec { oracle: true, ..spec }, 1);
        for (a, b) in closed.iter().zip(&oracle) {
            for k in 0..4 {
                assert!((a.port1[k] - b.port1[k]).abs() < 1e-10);
                assert!((a.port2[k] - b.port2[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn features_per_group() {
        let spec = parse_config("gamma_all=1\ntheta_both=0.5pi\naxis=g:1:3:2\naxis=delta:-8:8:801").unwrap();
        let rows = run_sweep(&spec);
        let table = feature_table(&spec, &rows).unwrap();
        let tn_peaks = |g: f64| {
            table
                .iter()
                .filter(|r| r.series == "T_N" && r.kind == "peak" && r.fixed[0].1 == g)
                .count()
        };
        assert_eq!(tn_peaks(1.0), 1);
        assert_eq!(tn_peaks(3.0), 2);
        let no_delta = SweepSpec::new(spec.base, vec![Axis { name: AxisName::G, start: 0.0, stop: 1.0, count: 2 }]);
        assert!(feature_table(&no_delta, &[]).is_err());
    }
}

//! Peak and dip extraction on sampled spectra.
//!
//! Candidates are grid-local extrema (three-point comparison, flat runs
//! collapsed), filtered by topographic prominence, then refined inside the
//! bracket formed by their grid neighbours: a parabolic vertex gives a first
//! estimate and a golden-section search polishes it.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub delta: f64,
    pub value: f64,
    /// Prominence measured on the sampled grid.
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SpectrumFeatures {
    /// Sorted by `delta`.
    pub peaks: Vec<Extremum>,
    /// Sorted by `delta`.
    pub dips: Vec<Extremum>,
    /// Midpoint of the two highest peaks, or the position of a lone peak.
    pub symmetry_center: Option<f64>,
    /// Gap between the two highest peaks.
    pub splitting_distance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureOptions {
    pub prominence_floor: f64,
    /// Target width of the final refinement bracket.
    pub tolerance: f64,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            prominence_floor: 1e-6,
            tolerance: 1e-9,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximiser of `f` on `[a, b]` by golden-section search, stopping once the
/// bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Vertex of the parabola through three points, if it has one.
pub fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let d1 = (x[1] - x[0]) * (y[1] - y[2]);
    let d2 = (x[1] - x[2]) * (y[1] - y[0]);
    let den = d1 - d2;
    if den == 0.0 || !den.is_finite() {
        return None;
    }
    let num = (x[1] - x[0]) * d1 - (x[1] - x[2]) * d2;
    Some(x[1] - 0.5 * num / den)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("feature grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Grid-local maxima as `(bracket_lo, centre, bracket_hi)` index triples.
fn local_maxima(v: &[f64]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let n = v.len();
    let mut i = 1;
    while i + 1 < n {
        if v[i] > v[i - 1] {
            let mut j = i;
            while j + 1 < n && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < n && v[j + 1] < v[i] {
                out.push((i - 1, (i + j) / 2, j + 1));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(v: &[f64], centre: usize) -> f64 {
    let top = v[centre];
    let mut left_min = top;
    for &x in v[..centre].iter().rev() {
        if x > top {
            break;
        }
        left_min = left_min.min(x);
    }
    let mut right_min = top;
    for &x in &v[centre + 1..] {
        if x > top {
            break;
        }
        right_min = right_min.min(x);
    }
    top - left_min.max(right_min)
}

fn extrema<F: Fn(f64) -> f64>(
    grid: &[f64],
    values: &[f64],
    f: &F,
    opts: &FeatureOptions,
) -> Vec<Extremum> {
    let mut out = Vec::new();
    for (lo, c, hi) in local_maxima(values) {
        let prom = prominence(values, c);
        if prom < opts.prominence_floor {
            continue;
        }
        let (a, b) = (grid[lo], grid[hi]);
        let (mut best_x, mut best_v) = golden_section_max(f, a, b, opts.tolerance);
        if let Some(x) = parabolic_vertex([grid[lo], grid[c], grid[hi]], [values[lo], values[c], values[hi]]) {
            if x > a && x < b {
                let fx = f(x);
                if fx > best_v {
                    best_x = x;
                    best_v = fx;
                }
            }
        }
        if values[c] > best_v {
            best_x = grid[c];
            best_v = values[c];
        }
        out.push(Extremum {
            delta: best_x,
            value: best_v,
            prominence: prom,
        });
    }
    out
}

/// Peaks and dips of `f` sampled on `grid` and refined off-grid.
pub fn find_features<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> Result<SpectrumFeatures> {
    find_features_with(grid, f, FeatureOptions::default())
}

pub fn find_features_with<F: Fn(f64) -> f64>(
    grid: &[f64],
    f: F,
    opts: FeatureOptions,
) -> Result<SpectrumFeatures> {
    check_grid(grid)?;
    if grid.len() < 3 {
        return Ok(SpectrumFeatures::default());
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let peaks = extrema(grid, &values, &f, &opts);

    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let neg_f = |x: f64| -f(x);
    let dips = extrema(grid, &negated, &neg_f, &opts)
        .into_iter()
        .map(|e| Extremum {
            value: -e.value,
            ..e
        })
        .collect();

    Ok(summarise(peaks, dips))
}

/// Features of a series with no underlying function: refinement stops at the
/// parabolic vertex.
pub fn find_sampled_features(series: &[(f64, f64)]) -> Result<SpectrumFeatures> {
    let grid: Vec<f64> = series.iter().map(|p| p.0).collect();
    check_grid(&grid)?;
    let values: Vec<f64> = series.iter().map(|p| p.1).collect();
    let opts = FeatureOptions::default();
    let pick = |vals: &[f64], sign: f64| -> Vec<Extremum> {
        local_maxima(vals)
            .into_iter()
            .filter_map(|(lo, c, hi)| {
                let prom = prominence(vals, c);
                if prom < opts.prominence_floor {
                    return None;
                }
                let (x, y) = ([grid[lo], grid[c], grid[hi]], [vals[lo], vals[c], vals[hi]]);
                let (delta, value) = match parabolic_vertex(x, y) {
                    Some(v) if v > x[0] && v < x[2] => {
                        // Lagrange interpolation at the vertex
                        let l0 = (v - x[1]) * (v - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
                        let l1 = (v - x[0]) * (v - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
                        let l2 = (v - x[0]) * (v - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
                        (v, l0 * y[0] + l1 * y[1] + l2 * y[2])
                    }
                    _ => (x[1], y[1]),
                };
                Some(Extremum {
                    delta,
                    value: sign * value,
                    prominence: prom,
                })
            })
            .collect()
    };
    let peaks = pick(&values, 1.0);
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let dips = pick(&negated, -1.0);
    Ok(summarise(peaks, dips))
}

fn summarise(peaks: Vec<Extremum>, dips: Vec<Extremum>) -> SpectrumFeatures {
    let mut ranked: Vec<&Extremum> = peaks.iter().collect();
    ranked.sort_by(|a, b| b.value.total_cmp(&a.value));
    let (symmetry_center, splitting_distance) = match ranked.as_slice() {
        [] => (None, None),
        [only] => (Some(only.delta), None),
        [a, b, ..] => (Some(0.5 * (a.delta + b.delta)), Some((a.delta - b.delta).abs())),
    };
    SpectrumFeatures {
        peaks,
        dips,
        symmetry_center,
        splitting_distance,
    }
}

/// `n` evenly spaced points on `[start, stop]`.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { stop } else { start + step * k as f64 })
                .collect()
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use giant_molecule::analysis::contrast::{contrast_in_closed, contrast_ratios};
use giant_molecule::analysis::features::{find_features, golden_section_max, linspace};
use giant_molecule::analysis::symmetry::{inversion_asymmetry, phase_reversal_relations, RelationVariant};
use giant_molecule::closed_form::{amplitudes_port1, amplitudes_port2, rabi_peak_distance};
use giant_molecule::oracle::oracle_solve_port1;
use giant_molecule::verify::{decoupling_suite, oracle_suite, reciprocity_suite, table_suite, Draws, Regime};
use giant_molecule::SystemParams;

const SEED: u64 = 20_240_917;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn t_n(p: &SystemParams, delta: f64) -> f64 {
    amplitudes_port1(p, delta).map_or(f64::NAN, |a| a.coefficients().t_far)
}

fn flux() -> Outcome {
    let mut draws = Draws::new(SEED, Regime::Mixed);
    let mut worst: f64 = 0.0;
    let mut errors = 0usize;
    for _ in 0..1_000_000 {
        let (p, delta) = draws.generic();
        for r in [amplitudes_port1(&p, delta), amplitudes_port2(&p, delta)] {
            match r {
                Ok(a) => worst = worst.max(a.coefficients().flux_residual().abs()),
                Err(_) => errors += 1,
            }
        }
    }
    outcome(
        errors == 0 && worst < 1e-10,
        format!("1e6 draws, ports 1 and 2, max |sum - 1| = {worst:.3e}, errors = {errors}"),
    )
}

fn oracle() -> Outcome {
    let r = oracle_suite(10_000, SEED);
    outcome(
        r.passed(),
        format!("{} solves, max relative error = {:.3e} {}", r.checked, r.worst, r.note),
    )
}

fn reciprocity() -> Outcome {
    let r = reciprocity_suite(10_000, SEED);
    outcome(r.passed(), format!("{} draws, max gap = {:.3e}", r.checked, r.worst))
}

fn decoupling() -> Outcome {
    let p = SystemParams::symmetric(1.0, 3.0, PI);
    let exact = linspace(-20.0, 20.0, 10_000)
        .into_iter()
        .all(|d| amplitudes_port1(&p, d).is_ok_and(|a| a.coefficients().t_same == 1.0));
    let r = decoupling_suite(10_000);
    outcome(exact && r.passed(), format!("10^4 points, T_M == 1 exactly: {exact}"))
}

fn rabi() -> Outcome {
    let g = 3.0;
    let mut lines = Vec::new();
    let mut ok = true;
    let mut last_gap = f64::INFINITY;
    for small in [0.1, 0.05, 0.02] {
        let p = SystemParams::symmetric(1.0, g, PI + small);
        let feats = match find_features(&linspace(-6.0, 6.0, 6001), |d| t_n(&p, d)) {
            Ok(f) => f,
            Err(e) => return outcome(false, e.to_string()),
        };
        let expected = rabi_peak_distance(1.0, g, small).unwrap_or(f64::NAN);
        let found = feats.splitting_distance.unwrap_or(f64::NAN);
        let err = (found - expected).abs();
        let gap = (found - 2.0 * g).abs();
        ok &= feats.peaks.len() == 2 && err < 1e-3 && gap < last_gap;
        last_gap = gap;
        lines.push(format!("delta={small}: d={found:.9} err={err:.2e}"));
    }
    outcome(ok, lines.join(", "))
}

fn census() -> Outcome {
    let grid = linspace(-10.0, 10.0, 4001);
    let mut ok = true;
    let mut lines = Vec::new();
    for g in [0.5, 1.0, 1.5, 3.0, 5.0] {
        let p = SystemParams::symmetric(1.0, g, 0.5 * PI);
        let peaks = match find_features(&grid, |d| t_n(&p, d)) {
            Ok(f) => f.peaks,
            Err(e) => return outcome(false, e.to_string()),
        };
        if g < 2.0 {
            ok &= peaks.len() == 1 && (peaks[0].delta - 2.0).abs() < 1e-3;
        } else {
            ok &= peaks.len() == 2;
        }
        let at: Vec<String> = peaks.iter().map(|e| format!("{:.6}", e.delta)).collect();
        lines.push(format!("g={g}: [{}]", at.join(" ")));
    }
    outcome(ok, lines.join(", "))
}

fn chirality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let base = SystemParams {
        gamma_lambda_r: 1.0,
        gamma_lambda_l: 0.3,
        gamma_eta_r: 0.8,
        gamma_eta_l: 0.45,
        ..SystemParams::symmetric(1.0, 2.0, 0.37 * PI)
    }
    .with_thetas(0.37 * PI, 1.21 * PI);
    let closed = contrast_in_closed(&base).unwrap_or(f64::NAN);
    for tau in [0.0, 1.0, 2.0] {
        let p = base.with_tau(tau);
        for delta in linspace(-10.0, 10.0, 2001) {
            let c1 = amplitudes_port1(&p, delta).map(|a| a.coefficients());
            let c2 = amplitudes_port2(&p, delta).map(|a| a.coefficients());
            match (c1, c2) {
                (Ok(a), Ok(b)) if a.t_far + b.t_far > 0.0 => {
                    let i_n = (a.t_far - b.t_far) / (a.t_far + b.t_far);
                    worst = worst.max((i_n - closed).abs());
                }
                (Ok(_), Ok(_)) => {}
                _ => ok = false,
            }
        }
    }
    let equal = contrast_ratios(&SystemParams::symmetric(1.0, 2.0, 0.3 * PI), 0.7)
        .ok()
        .and_then(|c| c.i_n);
    let one_way = contrast_ratios(&SystemParams::chiral(1.0, 0.0, 2.0, 0.3 * PI), 0.7)
        .ok()
        .and_then(|c| c.i_n);
    ok &= worst < 1e-12 && equal.is_some_and(|v| v.abs() < 1e-12) && one_way == Some(1.0);
    outcome(
        ok,
        format!("max |I_N - closed| = {worst:.3e}, I_N(L/R=1) = {equal:?}, I_N(L=0) = {one_way:?}"),
    )
}

fn table() -> Outcome {
    let r = table_suite(1_000);
    outcome(r.passed(), format!("{} checks, worst = {:.3e}", r.checked, r.worst))
}

fn routing() -> Outcome {
    let g = 3.0;
    let theta = 0.5 * PI;
    let base = SystemParams::symmetric(0.0, g, theta);
    let left_only = SystemParams {
        gamma_lambda_l: 1.0,
        gamma_eta_l: 1.0,
        ..base
    };
    let right_only = SystemParams {
        gamma_lambda_r: 1.0,
        gamma_eta_r: 1.0,
        ..base
    };
    let crossed = SystemParams {
        gamma_lambda_r: 1.0,
        gamma_eta_l: 1.0,
        ..base
    };
    let transmits = linspace(-10.0, 10.0, 2001)
        .into_iter()
        .all(|d| amplitudes_port1(&left_only, d).is_ok_and(|a| (a.coefficients().t_same - 1.0).abs() < 1e-12));
    let mut ok = transmits;
    let mut lines = vec![format!("L-only T_M = 1: {transmits}")];
    for delta in [1.0 - 8f64.sqrt(), 1.0 + 8f64.sqrt()] {
        let tn = t_n(&right_only, delta);
        let oracle_tn = oracle_solve_port1(&right_only, delta).map_or(f64::NAN, |s| s.exits.t_far.norm_sqr());
        let rn = amplitudes_port1(&crossed, delta).map_or(f64::NAN, |a| a.coefficients().r_near);
        ok &= tn > 0.999 && oracle_tn > 0.999 && rn > 0.999;
        lines.push(format!("delta={delta:.6}: T_N={tn:.12} oracle={oracle_tn:.12} R_N={rn:.12}"));
    }
    outcome(ok, lines.join(", "))
}

fn nonmarkovian_dips() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for theta in [80.0 * PI, 80.5 * PI, 81.0 * PI] {
        let p = SystemParams::symmetric(1.0, 3.0, theta).with_tau(1.0);
        // detunings with delta + theta an odd multiple of pi, inside [-20, 20]
        let m_lo = ((-20.0 + theta) / PI - 1.0) / 2.0;
        let m_hi = ((20.0 + theta) / PI - 1.0) / 2.0;
        let mut m = m_lo.ceil();
        let mut points = 0;
        while m <= m_hi {
            let delta = (2.0 * m + 1.0) * PI - theta;
            let tn = t_n(&p, delta);
            ok &= tn < 1e-10;
            worst = worst.max(tn);
            m += 1.0;
            points += 1;
        }
        ok &= points > 0;
    }
    let even = SystemParams::symmetric(1.0, 3.0, 80.0 * PI).with_tau(1.0);
    let asym = inversion_asymmetry(&even, &linspace(0.0, 20.0, 4001)).unwrap_or(f64::NAN);
    let grid_hits = linspace(-20.0, 20.0, 4001)
        .into_iter()
        .filter(|&d| {
            let phi = (d + 80.0 * PI).rem_euclid(2.0 * PI);
            (phi - PI).abs() < 1e-12
        })
        .all(|d| t_n(&even, d) < 1e-10);
    ok &= asym < 1e-10 && grid_hits;
    outcome(ok, format!("max T_N at dips = {worst:.3e}, theta=80pi asymmetry = {asym:.3e}"))
}

fn max_abs_im(tau: f64) -> f64 {
    let p = SystemParams::chiral(1.0, 0.5, 2.0, 81.0 * PI).with_tau(tau);
    let im = |d: f64| {
        contrast_ratios(&p, d)
            .ok()
            .and_then(|c| c.i_m)
            .map_or(0.0, f64::abs)
    };
    let grid = linspace(-10.0, 10.0, 8001);
    let step = grid[1] - grid[0];
    let (k, best) = grid
        .iter()
        .map(|&d| im(d))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    let (_, refined) = golden_section_max(im, grid[k] - step, grid[k] + step, 1e-12);
    best.max(refined)
}

fn nonreciprocity() -> Outcome {
    let m: Vec<f64> = [0.0, 1.0, 2.0].into_iter().map(max_abs_im).collect();
    outcome(
        m[0] < 1e-10 && m[1] > m[0] && m[2] > m[1],
        format!("max |I_M| at tau = 0, 1, 2: {:.3e}, {:.6}, {:.6}", m[0], m[1], m[2]),
    )
}

fn symmetry_variant() -> Outcome {
    let thetas: Vec<f64> = linspace(0.05, 1.95, 20).into_iter().map(|t| t * PI).collect();
    let r = match phase_reversal_relations(1.0, 3.0, &thetas, &linspace(-8.0, 8.0, 161)) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let holding = r.unique_holding();
    outcome(
        holding.is_some(),
        format!(
            "T<->T residual {:.3e}, T<->R residual {:.3e}, holding: {}",
            r.tt_residual,
            r.tr_residual,
            match holding {
                Some(RelationVariant::TransmissionToTransmission) => "T<->T",
                Some(RelationVariant::TransmissionToReflection) => "T<->R",
                None => "none",
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("flux conservation", flux),
        ("oracle equivalence", oracle),
        ("symmetric reciprocity", reciprocity),
        ("decoupling", decoupling),
        ("rabi splitting", rabi),
        ("peak census", census),
        ("chirality closed form", chirality),
        ("ideal routing patterns", table),
        ("directional routing", routing),
        ("non-markovian dips", nonmarkovian_dips),
        ("nonreciprocity enhancement", nonreciprocity),
        ("symmetry relation variant", symmetry_variant),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.2}s]",
            if o.passed { "PASS" } else { "FAIL" },
            n + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

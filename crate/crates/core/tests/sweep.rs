use std::f64::consts::PI;

use giant_molecule::sweep::{parse_config, run_sweep_with, write_csv, write_json};

fn csv(text: &str, workers: usize) -> Vec<u8> {
    let spec = parse_config(text).unwrap();
    let mut buf = Vec::new();
    write_csv(&run_sweep_with(&spec, workers), &mut buf).unwrap();
    buf
}

#[test]
fn byte_identical_across_workers() {
    let text = "gamma_lambda_r=1\ngamma_lambda_l=0.5\ngamma_eta_r=1\ngamma_eta_l=0.5\ng=2\ntheta_both=81pi\naxis=tau_both:0:2:5\naxis=delta:-10:10:101\n";
    let reference = csv(text, 1);
    for workers in [2, 3, 5, 16] {
        assert_eq!(csv(text, workers), reference, "workers = {workers}");
    }
}

#[test]
fn theta_map_decoupled_row() {
    let spec = parse_config("gamma_all=1\ng=3\naxis=theta_both:0:2pi:9\naxis=delta:-8:8:201").unwrap();
    let rows = run_sweep_with(&spec, 3);
    assert_eq!(rows.len(), 9 * 201);
    for r in rows.iter().filter(|r| r.theta_l == PI) {
        assert_eq!(r.port1[3], 1.0);
    }
    assert!(rows.iter().all(|r| r.worst_flux().is_some_and(|f| f < 1e-10)));
}

#[test]
fn delay_raises_nonreciprocity_on_grid() {
    let spec = parse_config("gamma_r=1\ngamma_l=0.5\ng=2\ntheta_both=81pi\naxis=tau_both:0:2:3\naxis=delta:-10:10:2001").unwrap();
    let rows = run_sweep_with(&spec, 2);
    let max_im = |tau: f64| {
        rows.iter()
            .filter(|r| r.tau_l == tau)
            .filter_map(|r| r.i_m)
            .map(f64::abs)
            .fold(0.0, f64::max)
    };
    assert!(max_im(0.0) < 1e-10);
    assert!(max_im(1.0) > max_im(0.0));
    assert!(max_im(2.0) > max_im(1.0));
}

#[test]
fn ratio_axis_reaches_one_way_coupling() {
    let spec = parse_config("gamma_r=1\ng=2\ntheta_both=0.5pi\naxis=gamma_ratio_LR:0:1:3\naxis=delta:-3:3:7").unwrap();
    let rows = run_sweep_with(&spec, 1);
    assert_eq!(rows[0].glr_lambda, 0.0);
    assert!(rows[..7].iter().all(|r| r.i_n.is_none_or(|v| v == 1.0)));
    assert!(rows[14..].iter().all(|r| r.i_n.is_some_and(|v| v.abs() < 1e-12)));
}

#[test]
fn empty_sweep_json_and_csv() {
    let mut buf = Vec::new();
    write_csv(&[], &mut buf).unwrap();
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1);
    let mut buf = Vec::new();
    write_json(&[], &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().trim(), "[]");
}

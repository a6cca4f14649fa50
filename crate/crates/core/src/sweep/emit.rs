//! CSV and JSON tables.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64`. Undefined contrasts are written `undefined` (CSV) or `null` (JSON);
//! a row whose amplitudes could not be evaluated carries a failure marker
//! (`pole`, `singular`) in its flux column.

use std::io::{self, Write};

use serde_json::{Map, Value};

use super::engine::{FeatureRow, RowFailure, SpectrumRecord};

pub const HEADER: &str = "delta,theta_l,theta_d,g,tau_l,tau_d,gLR_lambda,gLR_eta,R_N,T_N,R_M,T_M,Rt_N,Tt_N,Rt_M,Tt_M,I_N,I_M,flux1,flux2";

pub const UNDEFINED: &str = "undefined";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn header_fields() -> impl Iterator<Item = &'static str> {
    HEADER.split(',')
}

fn flux_cell(flux: std::result::Result<f64, RowFailure>) -> String {
    match flux {
        Ok(v) => format_f64(v),
        Err(f) => f.marker().to_string(),
    }
}

fn contrast_cell(c: Option<f64>) -> String {
    c.map_or_else(|| UNDEFINED.to_string(), format_f64)
}

fn numeric(r: &SpectrumRecord) -> [f64; 16] {
    let [a, b, c, d] = r.port1;
    let [e, f, g, h] = r.port2;
    [
        r.delta, r.theta_l, r.theta_d, r.g, r.tau_l, r.tau_d, r.glr_lambda, r.glr_eta, a, b, c, d, e, f, g, h,
    ]
}

/// Cells of one CSV row, in header order.
pub fn csv_cells(r: &SpectrumRecord) -> Vec<String> {
    let mut cells: Vec<String> = numeric(r).iter().map(|&x| format_f64(x)).collect();
    cells.push(contrast_cell(r.i_n));
    cells.push(contrast_cell(r.i_m));
    cells.push(flux_cell(r.flux1));
    cells.push(flux_cell(r.flux2));
    cells
}

pub fn write_csv<W: Write>(records: &[SpectrumRecord], mut out: W) -> io::Result<()> {
    out.write_all(HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in records {
        out.write_all(csv_cells(r).join(",").as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

/// Flat JSON object with the CSV field names.
pub fn json_record(r: &SpectrumRecord) -> Value {
    let mut map = Map::new();
    let mut names = header_fields();
    for x in numeric(r) {
        map.insert(names.next().expect("header").to_string(), number(x));
    }
    for c in [r.i_n, r.i_m] {
        map.insert(names.next().expect("header").to_string(), c.map_or(Value::Null, number));
    }
    for f in [r.flux1, r.flux2] {
        let v = match f {
            Ok(x) => number(x),
            Err(e) => Value::String(e.marker().to_string()),
        };
        map.insert(names.next().expect("header").to_string(), v);
    }
    Value::Object(map)
}

pub fn write_json<W: Write>(records: &[SpectrumRecord], mut out: W) -> io::Result<()> {
    let array = Value::Array(records.iter().map(json_record).collect());
    serde_json::to_writer_pretty(&mut out, &array)?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn write_records<W: Write>(records: &[SpectrumRecord], format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(records, out),
    }
}

pub const AMPLITUDE_HEADER: &str =
    "row,injection,exit,re,im";

/// Long-format amplitude table: one line per row, injection and exit port.
pub fn write_amplitudes_csv<W: Write>(records: &[SpectrumRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{AMPLITUDE_HEADER}")?;
    for (row, r) in records.iter().enumerate() {
        for (port, set) in &r.amplitudes {
            match set {
                Ok(a) => {
                    for (exit, z) in a.exit_ports().iter().zip(a.as_array()) {
                        writeln!(
                            out,
                            "{row},{},{},{},{}",
                            port.number(),
                            exit.number(),
                            format_f64(z.re),
                            format_f64(z.im)
                        )?;
                    }
                }
                Err(f) => writeln!(out, "{row},{},{},{},{}", port.number(), f.marker(), f.marker(), f.marker())?,
            }
        }
    }
    out.flush()
}

pub const FEATURE_HEADER: &str = "fixed,series,kind,delta,value,prominence";

/// Feature table; `fixed` lists the non-detuning axes as `name=value` pairs
/// joined by `;`.
pub fn write_features_csv<W: Write>(rows: &[FeatureRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{FEATURE_HEADER}")?;
    for r in rows {
        let fixed: Vec<String> = r.fixed.iter().map(|(k, v)| format!("{k}={}", format_f64(*v))).collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fixed.join(";"),
            r.series,
            r.kind,
            format_f64(r.extremum.delta),
            format_f64(r.extremum.value),
            format_f64(r.extremum.prominence)
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::config::parse_config;
    use crate::sweep::engine::run_sweep_with;

    fn sample() -> Vec<SpectrumRecord> {
        let text = "gamma_lambda_r=1\ngamma_lambda_l=0.3\ngamma_eta_r=0.7\ngamma_eta_l=0\ng=2.5\ntheta_l=0.3pi\ntheta_d=1.7\ntau_l=0.4\naxis=delta:-7:7:57";
        run_sweep_with(&parse_config(text).unwrap(), 1)
    }

    #[test]
    fn header_is_fixed() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "delta,theta_l,theta_d,g,tau_l,tau_d,gLR_lambda,gLR_eta,R_N,T_N,R_M,T_M,Rt_N,Tt_N,Rt_M,Tt_M,I_N,I_M,flux1,flux2\n"
        );
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let records = sample();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(lines.len(), records.len());
        for (line, r) in lines.iter().zip(&records) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 20);
            let parsed: Vec<f64> = cells[..16].iter().map(|c| c.parse().unwrap()).collect();
            for (p, x) in parsed.iter().zip(numeric(r)) {
                assert_eq!(p.to_bits(), x.to_bits());
            }
            assert_eq!(cells[18].parse::<f64>().unwrap().to_bits(), r.flux1.unwrap().to_bits());
            match r.i_m {
                Some(v) => assert_eq!(cells[17].parse::<f64>().unwrap().to_bits(), v.to_bits()),
                None => assert_eq!(cells[17], UNDEFINED),
            }
        }
    }

    #[test]
    fn json_matches_csv_fields() {
        let records = sample();
        let mut buf = Vec::new();
        write_json(&records[..2], &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        let first = v.as_array().unwrap()[0].as_object().unwrap();
        let keys: Vec<&str> = first.keys().map(String::as_str).collect();
        let mut expected: Vec<&str> = HEADER.split(',').collect();
        expected.sort_unstable();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, expected);
        assert_eq!(first["delta"].as_f64().unwrap(), records[0].delta);
    }

    #[test]
    fn undefined_and_pole_markers() {
        let spec = parse_config("gamma_all=1\ng=0\ntheta_l=pi\ntheta_d=0.2\naxis=delta:-1:1:3").unwrap();
        let rows = run_sweep_with(&spec, 1);
        let cells = csv_cells(&rows[1]);
        assert_eq!(cells[18], "pole");
        assert_eq!(cells[16], UNDEFINED);
        let json = json_record(&rows[1]);
        assert_eq!(json["flux1"], Value::String("pole".into()));
        assert_eq!(json["I_N"], Value::Null);
        // g = 0 leaves no cross-waveguide channel
        assert_eq!(csv_cells(&rows[0])[16], UNDEFINED);
    }
}

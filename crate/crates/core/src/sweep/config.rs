//! Line-oriented sweep configuration.
//!
//! ```text
//! # symmetric coupling, theta = pi/2
//! gamma_all = 1
//! g = 3
//! theta_both = 0.5pi
//! axis = delta:-8:8:801
//! ports = 1,2
//! outputs = coefficients,contrasts
//! ```
//!
//! Numbers take an optional `pi` multiplier suffix (`pi`, `-pi`, `0.5pi`,
//! `81*pi`). Later lines override earlier ones, so `gamma_all=1` followed by
//! `gamma_eta_l=0` means what it looks like. Delays default to zero.

use std::fmt;
use std::str::FromStr;

use crate::closed_form::Port;
use crate::error::{Error, Result};
use crate::model::SystemParams;

pub const MAX_AXES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    Delta,
    ThetaL,
    ThetaD,
    ThetaBoth,
    G,
    TauBoth,
    /// `Gamma_L = r Gamma_R` on both atoms, right-moving rates held.
    GammaRatioLR,
}

impl AxisName {
    pub const ALL: [AxisName; 7] = [
        AxisName::Delta,
        AxisName::ThetaL,
        AxisName::ThetaD,
        AxisName::ThetaBoth,
        AxisName::G,
        AxisName::TauBoth,
        AxisName::GammaRatioLR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Delta => "delta",
            AxisName::ThetaL => "theta_l",
            AxisName::ThetaD => "theta_d",
            AxisName::ThetaBoth => "theta_both",
            AxisName::G => "g",
            AxisName::TauBoth => "tau_both",
            AxisName::GammaRatioLR => "gamma_ratio_LR",
        }
    }

    /// Write `value` into a parameter point.
    pub fn apply(self, params: &mut SystemParams, delta: &mut f64, value: f64) {
        match self {
            AxisName::Delta => *delta = value,
            AxisName::ThetaL => params.theta_l = value,
            AxisName::ThetaD => params.theta_d = value,
            AxisName::ThetaBoth => {
                params.theta_l = value;
                params.theta_d = value;
            }
            AxisName::G => params.g = value,
            AxisName::TauBoth => {
                params.tau_l = value;
                params.tau_d = value;
            }
            AxisName::GammaRatioLR => {
                params.gamma_lambda_l = value * params.gamma_lambda_r;
                params.gamma_eta_l = value * params.gamma_eta_r;
            }
        }
    }

    /// Values this axis may not go below.
    fn floor(self) -> Option<f64> {
        match self {
            AxisName::G | AxisName::TauBoth | AxisName::GammaRatioLR => Some(0.0),
            _ => None,
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        AxisName::ALL.into_iter().find(|a| a.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    /// Linear spacing, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        crate::analysis::features::linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Coefficients,
    Amplitudes,
    Contrasts,
    Features,
}

impl Output {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "coefficients" => Some(Output::Coefficients),
            "amplitudes" => Some(Output::Amplitudes),
            "contrasts" => Some(Output::Contrasts),
            "features" => Some(Output::Features),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    /// Detuning when no axis sweeps it.
    pub delta: f64,
    /// Row-major: the first axis is outermost.
    pub axes: Vec<Axis>,
    pub ports: Vec<Port>,
    pub outputs: Vec<Output>,
    /// Evaluate with the linear-system solver instead of the closed forms.
    pub oracle: bool,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>) -> Self {
        Self {
            base,
            delta: 0.0,
            axes,
            ports: vec![Port::P1, Port::P2],
            outputs: vec![Output::Coefficients, Output::Contrasts],
            oracle: false,
        }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn wants(&self, output: Output) -> bool {
        self.outputs.contains(&output)
    }
}

/// Parse a number with an optional `pi` multiplier.
pub fn parse_value(s: &str) -> Option<f64> {
    let s = s.trim();
    let Some(head) = s.strip_suffix("pi") else {
        return s.parse().ok().filter(|v: &f64| v.is_finite());
    };
    let head = head.trim_end();
    let head = head.strip_suffix('*').unwrap_or(head).trim_end();
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().ok()?,
    };
    Some(factor * std::f64::consts::PI).filter(|v| v.is_finite())
}

fn parse_error(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn range_error(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Range {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_axis(line: usize, key: &str, value: &str) -> Result<Axis> {
    let fields: Vec<&str> = value.split(':').map(str::trim).collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(parse_error(line, key, "expected name:start:stop:count[:linear]"));
    }
    let name: AxisName = fields[0]
        .parse()
        .map_err(|_| parse_error(line, key, format!("unknown axis `{}`", fields[0])))?;
    let start = parse_value(fields[1]).ok_or_else(|| parse_error(line, key, "bad start value"))?;
    let stop = parse_value(fields[2]).ok_or_else(|| parse_error(line, key, "bad stop value"))?;
    let count: i64 = fields[3]
        .parse()
        .map_err(|_| parse_error(line, key, "count must be an integer"))?;
    if fields.len() == 5 && fields[4] != "linear" {
        return Err(parse_error(line, key, "only linear spacing is supported"));
    }
    if count < 2 {
        return Err(range_error(line, key, format!("axis count {count} below 2")));
    }
    if let Some(floor) = name.floor() {
        if start < floor || stop < floor {
            return Err(range_error(line, key, format!("{name} cannot be negative")));
        }
    }
    Ok(Axis {
        name,
        start,
        stop,
        count: count as usize,
    })
}

/// Parse and validate a sweep configuration.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut base = SystemParams::symmetric(1.0, 0.0, 0.0);
    let mut spec = SweepSpec::new(base, Vec::new());
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, content, "expected key=value"))?;
        let (key, value) = (key.trim(), value.trim());

        let number = || parse_value(value).ok_or_else(|| parse_error(line, key, format!("bad number `{value}`")));
        let rate = || -> Result<f64> {
            let v = number()?;
            if v < 0.0 {
                return Err(range_error(line, key, format!("negative value {v}")));
            }
            Ok(v)
        };

        match key {
            "gamma_all" => {
                let v = rate()?;
                base.gamma_lambda_r = v;
                base.gamma_lambda_l = v;
                base.gamma_eta_r = v;
                base.gamma_eta_l = v;
            }
            "gamma_r" => {
                let v = rate()?;
                base.gamma_lambda_r = v;
                base.gamma_eta_r = v;
            }
            "gamma_l" => {
                let v = rate()?;
                base.gamma_lambda_l = v;
                base.gamma_eta_l = v;
            }
            "gamma_lambda_r" => base.gamma_lambda_r = rate()?,
            "gamma_lambda_l" => base.gamma_lambda_l = rate()?,
            "gamma_eta_r" => base.gamma_eta_r = rate()?,
            "gamma_eta_l" => base.gamma_eta_l = rate()?,
            "g" => base.g = rate()?,
            "theta_l" => base.theta_l = number()?,
            "theta_d" => base.theta_d = number()?,
            "theta_both" => {
                let v = number()?;
                base.theta_l = v;
                base.theta_d = v;
            }
            "tau_l" => base.tau_l = rate()?,
            "tau_d" => base.tau_d = rate()?,
            "tau_both" => {
                let v = rate()?;
                base.tau_l = v;
                base.tau_d = v;
            }
            "delta" => spec.delta = number()?,
            "axis" => {
                let axis = parse_axis(line, key, value)?;
                if spec.axes.iter().any(|a| a.name == axis.name) {
                    return Err(parse_error(line, key, format!("axis `{}` given twice", axis.name)));
                }
                if spec.axes.len() == MAX_AXES {
                    return Err(range_error(line, key, format!("at most {MAX_AXES} axes")));
                }
                spec.axes.push(axis);
            }
            "ports" => {
                let mut ports = Vec::new();
                for item in value.split(',').map(str::trim) {
                    let port = item
                        .parse::<u8>()
                        .ok()
                        .and_then(Port::from_number)
                        .ok_or_else(|| parse_error(line, key, format!("bad port `{item}`")))?;
                    if !ports.contains(&port) {
                        ports.push(port);
                    }
                }
                spec.ports = ports;
            }
            "outputs" => {
                let mut outputs = Vec::new();
                for item in value.split(',').map(str::trim) {
                    let out = Output::parse(item)
                        .ok_or_else(|| parse_error(line, key, format!("unknown output `{item}`")))?;
                    if !outputs.contains(&out) {
                        outputs.push(out);
                    }
                }
                spec.outputs = outputs;
            }
            "oracle" => {
                spec.oracle = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(parse_error(line, key, "expected true or false")),
                }
            }
            _ => return Err(parse_error(line, key, "unknown key")),
        }
    }

    if spec.axes.is_empty() {
        return Err(parse_error(last_line + 1, "axis", "no sweep axis given"));
    }
    spec.base = base;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_suffix() {
        assert_eq!(parse_value("pi"), Some(PI));
        assert_eq!(parse_value("-pi"), Some(-PI));
        assert_eq!(parse_value("0.5pi"), Some(0.5 * PI));
        assert_eq!(parse_value("81pi"), Some(81.0 * PI));
        assert_eq!(parse_value("2*pi"), Some(2.0 * PI));
        assert_eq!(parse_value(" 1.25 "), Some(1.25));
        assert_eq!(parse_value("-3e-2"), Some(-0.03));
        assert_eq!(parse_value("xpi"), None);
        assert_eq!(parse_value("nan"), None);
    }

    #[test]
    fn symmetric_markovian_config() {
        let spec = parse_config("gamma_all=1\n g=3\n theta_both=0.5pi\n axis=delta:-8:8:801").unwrap();
        assert_eq!(spec.base, SystemParams::symmetric(1.0, 3.0, 0.5 * PI));
        assert_eq!(
            spec.axes,
            vec![Axis {
                name: AxisName::Delta,
                start: -8.0,
                stop: 8.0,
                count: 801
            }]
        );
        assert!(spec.base.is_markovian());
        assert_eq!(spec.len(), 801);
    }

    #[test]
    fn nonmarkovian_config() {
        let spec = parse_config("theta_both=81pi\n tau_both=1\n axis=delta:-20:20:4001").unwrap();
        assert_eq!(spec.base.theta_l, 81.0 * PI);
        assert_eq!(spec.base.tau_l, 1.0);
        assert_eq!(spec.base.tau_d, 1.0);
        assert_eq!(spec.axes[0].count, 4001);
    }

    #[test]
    fn missing_axis() {
        let err = parse_config("gamma_lambda_r=1\n gamma_lambda_l=0\n g=2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { ref key, .. } if key == "axis"), "{err}");
    }

    #[test]
    fn errors_carry_line_and_key() {
        let err = parse_config("g=1\n# note\nfoo=2\naxis=delta:0:1:3").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                key: "foo".into(),
                message: "unknown key".into()
            }
        );
        let err = parse_config("gamma_eta_l=-1\naxis=delta:0:1:3").unwrap_err();
        assert!(matches!(err, Error::Range { line: 1, .. }));
        let err = parse_config("axis=delta:0:1:1").unwrap_err();
        assert!(matches!(err, Error::Range { line: 1, .. }));
        let err = parse_config("axis=delta:0:1:-4").unwrap_err();
        assert!(matches!(err, Error::Range { .. }));
        let err = parse_config("axis=spin:0:1:4").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let four = "axis=delta:0:1:2\naxis=g:0:1:2\naxis=theta_l:0:1:2\naxis=theta_d:0:1:2";
        assert!(matches!(parse_config(four).unwrap_err(), Error::Range { line: 4, .. }));
        assert!(parse_config("axis=g:0:1:2\naxis=g:0:2:2").is_err());
    }

    #[test]
    fn overrides_comments_and_lists() {
        let text = "gamma_all = 2 # all four\ngamma_eta_l = 0\nports = 2, 1, 3\noutputs = amplitudes\noracle = true\naxis = theta_both : 0 : 2pi : 5 : linear\n";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.base.gamma_eta_l, 0.0);
        assert_eq!(spec.base.gamma_lambda_l, 2.0);
        assert_eq!(spec.ports, vec![Port::P2, Port::P1, Port::P3]);
        assert_eq!(spec.outputs, vec![Output::Amplitudes]);
        assert!(spec.oracle);
        assert_eq!(spec.axes[0].values().last().copied(), Some(2.0 * PI));
    }

    #[test]
    fn ratio_axis_scales_left_rates() {
        let mut p = SystemParams::chiral(2.0, 0.0, 1.0, 0.0);
        let mut d = 0.0;
        AxisName::GammaRatioLR.apply(&mut p, &mut d, 0.25);
        assert_eq!(p.gamma_lambda_l, 0.5);
        assert_eq!(p.gamma_eta_l, 0.5);
        assert_eq!(p.gamma_lambda_r, 2.0);
    }
}

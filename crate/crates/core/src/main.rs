//! `gmqed`: command-line front end for the giant-molecule scattering model.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use giant_molecule::analysis::contrast::{contrast_in_closed, contrast_ratios};
use giant_molecule::analysis::features::{find_features, linspace};
use giant_molecule::analysis::routing::{routing_targets, IdealCase, DEFAULT_ROUTING_THRESHOLD};
use giant_molecule::analysis::symmetry::symmetry_validators;
use giant_molecule::closed_form::{amplitudes, build_smatrix, Port};
use giant_molecule::oracle::{oracle_smatrix, LinearSystem};
use giant_molecule::sweep::emit::{format_f64, write_amplitudes_csv, write_features_csv};
use giant_molecule::sweep::{
    feature_table, parse_config, parse_value, run_sweep, write_records, Axis, AxisName, Format, Output,
    SweepSpec,
};
use giant_molecule::verify::run_all;
use giant_molecule::{Error, SystemParams};

#[derive(Parser)]
#[command(name = "gmqed", version, about = "Single-photon scattering through a chiral giant molecule")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering coefficients at one detuning or along a detuning grid.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Solve the boundary-matching system instead of using the closed forms.
        #[arg(long)]
        oracle: bool,
    },
    /// The 4x4 scattering matrix at one detuning.
    Smatrix {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "0", value_parser = number, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        oracle: bool,
        /// Print the linear system for this injection port and stop.
        #[arg(long, value_name = "PORT", value_parser = port)]
        dump_system: Option<Port>,
    },
    /// Chirality and nonreciprocity contrast ratios.
    Contrast {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Routing report for one of the four ideal chiral cases.
    Route {
        /// Ideal case 1-4.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        case: u8,
        #[arg(long, default_value = "1", value_parser = number, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value = "3", value_parser = number, allow_hyphen_values = true)]
        g: f64,
        #[arg(long, default_value = "0.5pi", value_parser = number, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value = "-8", value_parser = number, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value = "8", value_parser = number, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1601)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_ROUTING_THRESHOLD)]
        threshold: f64,
    },
    /// Refined peaks and dips of one coefficient along a detuning grid.
    Features {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "-8", value_parser = number, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value = "8", value_parser = number, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1601)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Series::TN)]
        series: Series,
        #[arg(long, default_value = "1", value_parser = port)]
        port: Port,
    },
    /// Randomized invariant suites; exits 1 if any fails.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a sweep described by a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Main table destination; companion tables go next to it.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Device parameters. Numbers accept a `pi` suffix (`0.5pi`, `-pi`).
#[derive(Args, Clone)]
struct ParamArgs {
    /// All four decay rates.
    #[arg(long, default_value = "1", value_parser = number, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    gamma_lambda_r: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    gamma_lambda_l: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    gamma_eta_r: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    gamma_eta_l: Option<f64>,
    /// Atom-atom coupling.
    #[arg(long, default_value = "3", value_parser = number, allow_hyphen_values = true)]
    g: f64,
    /// Both leg phases.
    #[arg(long, default_value = "0.5pi", value_parser = number, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    theta_l: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    theta_d: Option<f64>,
    /// Both leg delays.
    #[arg(long, default_value = "0", value_parser = number, allow_hyphen_values = true)]
    tau: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    tau_l: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    tau_d: Option<f64>,
}

impl ParamArgs {
    fn params(&self) -> Result<SystemParams, Error> {
        let p = SystemParams {
            gamma_lambda_r: self.gamma_lambda_r.unwrap_or(self.gamma),
            gamma_lambda_l: self.gamma_lambda_l.unwrap_or(self.gamma),
            gamma_eta_r: self.gamma_eta_r.unwrap_or(self.gamma),
            gamma_eta_l: self.gamma_eta_l.unwrap_or(self.gamma),
            g: self.g,
            theta_l: self.theta_l.unwrap_or(self.theta),
            theta_d: self.theta_d.unwrap_or(self.theta),
            tau_l: self.tau_l.unwrap_or(self.tau),
            tau_d: self.tau_d.unwrap_or(self.tau),
        };
        p.validate()?;
        Ok(p)
    }
}

/// A single `--delta`, or a grid from `--from`, `--to`, `--points`.
#[derive(Args, Clone)]
struct GridArgs {
    #[arg(long, value_parser = number, allow_hyphen_values = true, conflicts_with_all = ["from", "to"])]
    delta: Option<f64>,
    #[arg(long, default_value = "-8", value_parser = number, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, default_value = "8", value_parser = number, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 801)]
    points: usize,
}

impl GridArgs {
    fn values(&self) -> Vec<f64> {
        match self.delta {
            Some(d) => vec![d],
            None => linspace(self.from, self.to, self.points),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    #[value(name = "R_N")]
    RN,
    #[value(name = "T_N")]
    TN,
    #[value(name = "R_M")]
    RM,
    #[value(name = "T_M")]
    TM,
}

fn number(s: &str) -> Result<f64, String> {
    parse_value(s).ok_or_else(|| format!("`{s}` is not a number (a `pi` suffix is allowed)"))
}

fn port(s: &str) -> Result<Port, String> {
    s.parse::<u8>()
        .ok()
        .and_then(Port::from_number)
        .ok_or_else(|| format!("`{s}` is not a port (1-4)"))
}

/// Failure of a subcommand after argument parsing.
enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn grid_spec(params: SystemParams, grid: &[f64], oracle: bool) -> SweepSpec {
    let (start, stop) = (grid[0], grid[grid.len() - 1]);
    let mut spec = SweepSpec::new(
        params,
        vec![Axis {
            name: AxisName::Delta,
            start,
            stop,
            count: grid.len().max(2),
        }],
    );
    if grid.len() == 1 {
        // a single point: sweep nothing, evaluate at `delta`
        spec.axes.clear();
        spec.delta = start;
    }
    spec.oracle = oracle;
    spec
}

fn run<W: Write>(command: Command, out: &mut W) -> Result<(), Failure> {
    match command {
        Command::Spectrum {
            params,
            grid,
            format,
            oracle,
        } => {
            let p = params.params()?;
            let values = grid.values();
            if values.is_empty() {
                return Err(Failure::Usage("empty detuning grid".into()));
            }
            let spec = grid_spec(p, &values, oracle);
            let records = if spec.axes.is_empty() {
                vec![giant_molecule::sweep::evaluate(&spec, &p, spec.delta)]
            } else {
                run_sweep(&spec)
            };
            write_records(&records, format.into(), out)?;
        }
        Command::Smatrix {
            params,
            delta,
            oracle,
            dump_system,
        } => {
            let p = params.params()?;
            if let Some(port) = dump_system {
                write!(out, "{}", LinearSystem::assemble(&p, delta).dump(port))?;
                return Ok(());
            }
            let s = if oracle { oracle_smatrix(&p, delta)? } else { build_smatrix(&p, delta)? };
            writeln!(out, "# S[exit][injection] at delta = {}, as re,im", format_f64(delta))?;
            for (i, row) in s.s.iter().enumerate() {
                let cells: Vec<String> = row
                    .iter()
                    .map(|z| format!("{},{}", format_f64(z.re), format_f64(z.im)))
                    .collect();
                writeln!(out, "{}\t{}", i + 1, cells.join("\t"))?;
            }
            writeln!(out, "unitarity_defect\t{}", format_f64(s.unitarity_defect()))?;
            writeln!(out, "magnitude_asymmetry\t{}", format_f64(s.magnitude_asymmetry()))?;
        }
        Command::Contrast { params, grid } => {
            let p = params.params()?;
            match contrast_in_closed(&p) {
                Ok(v) => writeln!(out, "# I_N closed form {}", format_f64(v))?,
                Err(_) => writeln!(out, "# I_N closed form undefined")?,
            }
            writeln!(out, "delta,I_N,I_M")?;
            let cell = |c: Option<f64>| c.map_or_else(|| "undefined".to_string(), format_f64);
            for delta in grid.values() {
                let c = contrast_ratios(&p, delta)?;
                writeln!(out, "{},{},{}", format_f64(delta), cell(c.i_n), cell(c.i_m))?;
            }
        }
        Command::Route {
            case,
            gamma,
            g,
            theta,
            from,
            to,
            points,
            threshold,
        } => route(out, case, gamma, g, theta, &linspace(from, to, points), threshold)?,
        Command::Features {
            params,
            from,
            to,
            points,
            series,
            port,
        } => {
            let p = params.params()?;
            let column = series as usize;
            let f = |d: f64| {
                amplitudes(&p, d, port)
                    .map(|a| a.coefficients().as_array()[column])
                    .unwrap_or(f64::NAN)
            };
            let feats = find_features(&linspace(from, to, points), f)?;
            writeln!(out, "kind,delta,value,prominence")?;
            for (kind, list) in [("peak", &feats.peaks), ("dip", &feats.dips)] {
                for e in list {
                    writeln!(
                        out,
                        "{kind},{},{},{}",
                        format_f64(e.delta),
                        format_f64(e.value),
                        format_f64(e.prominence)
                    )?;
                }
            }
            let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), format_f64);
            writeln!(out, "# symmetry_center {}", opt(feats.symmetry_center))?;
            writeln!(out, "# splitting_distance {}", opt(feats.splitting_distance))?;
        }
        Command::Verify { draws, seed } => {
            let mut ok = true;
            for r in run_all(draws, seed) {
                ok &= r.passed();
                writeln!(out, "{r}")?;
            }
            let report = symmetry_validators(1.0, 3.0)?;
            ok &= report.passes();
            writeln!(
                out,
                "{} symmetry       reflection={:.3e} reversal_tt={:.3e} reversal_tr={:.3e} inversion={:.3e} equal_split={:.3e}@{:.6}",
                if report.passes() { "PASS" } else { "FAIL" },
                report.reflection_asymmetry,
                report.phase_reversal.tt_residual,
                report.phase_reversal.tr_residual,
                report.nonmarkovian_inversion_asymmetry,
                report.equal_split.1,
                report.equal_split.0,
            )?;
            if !ok {
                out.flush()?;
                return Err(Failure::Verification);
            }
        }
        Command::Sweep {
            config,
            format,
            output,
        } => sweep(out, &config, format.into(), output.as_deref())?,
    }
    Ok(())
}

fn route<W: Write>(
    out: &mut W,
    case: u8,
    gamma: f64,
    g: f64,
    theta: f64,
    grid: &[f64],
    threshold: f64,
) -> Result<(), Failure> {
    let ideal = IdealCase::from_number(case).ok_or_else(|| Failure::Usage(format!("no case {case}")))?;
    let p = ideal
        .params(gamma, g, theta)
        .ok_or_else(|| Failure::Usage(format!("case {case} has no parameters")))?;
    let report = routing_targets(&p, grid, threshold)?;
    writeln!(out, "case {case}")?;
    writeln!(
        out,
        "rates gamma_lambda_r={} gamma_lambda_l={} gamma_eta_r={} gamma_eta_l={}",
        p.gamma_lambda_r, p.gamma_lambda_l, p.gamma_eta_r, p.gamma_eta_l
    )?;
    if let Some((one, two)) = ideal.pattern() {
        let show = |e: &[giant_molecule::analysis::routing::Entry; 4]| {
            let names = ["R_N", "T_N", "R_M", "T_M"];
            names
                .iter()
                .zip(e)
                .map(|(n, v)| format!("{n}={v:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "pattern port1 {}", show(&one))?;
        writeln!(out, "pattern port2 {}", show(&two))?;
    }
    match report.predicted_peaks {
        Some([a, b]) => writeln!(out, "predicted_peaks {} {}", format_f64(a), format_f64(b))?,
        None => writeln!(out, "predicted_peaks none")?,
    }
    let found: Vec<String> = report.found_peaks.iter().map(|&x| format_f64(x)).collect();
    writeln!(out, "found_peaks {}", if found.is_empty() { "none".into() } else { found.join(" ") })?;
    match report.dominant_exit {
        Some(port) => writeln!(out, "dominant_exit {port}")?,
        None => writeln!(out, "dominant_exit none")?,
    }
    writeln!(out, "routed_points {} of {} above {threshold}", report.routed.len(), grid.len())?;
    Ok(())
}

fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn sweep<W: Write>(out: &mut W, config: &Path, format: Format, output: Option<&Path>) -> Result<(), Failure> {
    let text = fs::read_to_string(config).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    let spec = parse_config(&text)?;
    let records = run_sweep(&spec);
    let features = if spec.wants(Output::Features) {
        Some(feature_table(&spec, &records)?)
    } else {
        None
    };
    match output {
        Some(path) => {
            write_records(&records, format, BufWriter::new(fs::File::create(path)?))?;
            if spec.wants(Output::Amplitudes) {
                write_amplitudes_csv(&records, BufWriter::new(fs::File::create(companion(path, "amplitudes"))?))?;
            }
            if let Some(rows) = &features {
                write_features_csv(rows, BufWriter::new(fs::File::create(companion(path, "features"))?))?;
            }
        }
        None => {
            write_records(&records, format, &mut *out)?;
            if spec.wants(Output::Amplitudes) {
                writeln!(out)?;
                write_amplitudes_csv(&records, &mut *out)?;
            }
            if let Some(rows) = &features {
                writeln!(out)?;
                write_features_csv(rows, &mut *out)?;
            }
        }
    }
    Ok(())
}

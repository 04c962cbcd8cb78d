//! Command-line front end of the `lossprobe` binary.

pub mod figures;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::channel::LossChannel;
use crate::chernoff::qcb;
use crate::correlations::MutualInfoConvention;
use crate::error::Error;
use crate::probe::{
    channel_output, critical_damping, critical_root, critical_transmissivity, critical_transmissivity_numeric,
    params_from_spec, positive_fraction, random_sweep, threshold_energy, threshold_fit_near_critical, ProbeSpec,
    SweepRanges,
};
use crate::verify::{run_standard, VerifyConfig};
use figures::{linspace, FigureOptions};
use output::{write_file, Cell, Table};

pub const OUT_DIR_ENV: &str = "LOSSPROBE_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lossprobe", version, about = "Chernoff bounds for loss detection with squeezed thermal probes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Chernoff bound and error-probability bounds for one probe
    Qcb(QcbArgs),
    /// Reduction Q1 - Q2 over random (N, beta, Gamma)
    Sweep(SweepArgs),
    /// Threshold energy above which the two-mode probe wins
    Threshold(ThresholdArgs),
    /// Critical transmissivity and the quadratic threshold fit
    Critical(CriticalArgs),
    /// Entanglement, discord and mutual information of the two-mode input
    Correlations(CorrelationArgs),
    /// Data behind one of the figures (ids 2-6)
    Figure(FigureArgs),
    /// Compare the Gaussian formulas with the Fock-basis oracle
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    #[serde(skip)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct ChannelArgs {
    /// Transmissivity in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Damping Gamma = -ln(eta) >= 0
    #[arg(long, allow_negative_numbers = true)]
    pub damping: Option<f64>,
}

impl ChannelArgs {
    fn channel(&self) -> Result<LossChannel, CliError> {
        match (self.eta, self.damping) {
            (Some(e), _) => LossChannel::from_eta(e).map_err(usage),
            (_, Some(g)) => LossChannel::from_gamma(g).map_err(usage),
            _ => Err(CliError::Usage("one of --eta or --damping is required".into())),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QcbArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub modes: u8,
    /// Mean input photon number
    #[arg(long = "n", allow_negative_numbers = true)]
    pub n: f64,
    /// Squeezed fraction of the photons
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Fraction of the thermal photons in the probing mode (two modes)
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub copies: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 5.0)]
    pub n_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 2.0)]
    pub damping_max: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdArgs {
    /// Single transmissivity; overrides the grid
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 99)]
    pub points: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CriticalArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MiArg {
    /// With the 1/2 prefactor
    #[default]
    Printed,
    /// S(A) + S(B) - S(AB)
    Standard,
}

impl From<MiArg> for MutualInfoConvention {
    fn from(m: MiArg) -> Self {
        match m {
            MiArg::Printed => MutualInfoConvention::AsPrinted,
            MiArg::Standard => MutualInfoConvention::Standard,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrelationArgs {
    #[arg(long = "n", allow_negative_numbers = true)]
    pub n: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = figures::FIG6_GAMMA)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = MiArg::Printed)]
    pub mi: MiArg,
    /// Report in bits instead of nats
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigureArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(2..=6))]
    pub id: u8,
    /// Grid resolution along each axis
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of random samples
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Asymmetry parameter (figures 5 and 6)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Squeezed fraction for the correlation curves (figure 6)
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = MiArg::Printed)]
    pub mi: MiArg,
    /// Also write a gnuplot script next to each data file
    #[arg(long)]
    pub gnuplot: bool,
    /// Output directory (default: $LOSSPROBE_OUT_DIR or the current directory)
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    #[serde(skip)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Per-mode Fock cutoff for every case
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = crate::fock::DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    /// Skip the doubled-cutoff convergence check
    #[arg(long)]
    pub no_doubling: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn check_usage(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<i32, CliError> {
    let flags = serde_json::to_value(cmd).map_err(|e| CliError::Failed(e.to_string()))?;
    let header = format!("lossprobe {} {}", env!("CARGO_PKG_VERSION"), serde_json::to_string(&flags).unwrap_or_default());
    match cmd {
        Command::Qcb(a) => emit(&cmd_qcb(a)?, &a.output, &header, &flags).map(|_| EXIT_OK),
        Command::Sweep(a) => emit(&cmd_sweep(a)?, &a.output, &header, &flags).map(|_| EXIT_OK),
        Command::Threshold(a) => emit(&cmd_threshold(a)?, &a.output, &header, &flags).map(|_| EXIT_OK),
        Command::Critical(a) => emit(&cmd_critical()?, &a.output, &header, &flags).map(|_| EXIT_OK),
        Command::Correlations(a) => emit(&cmd_correlations(a)?, &a.output, &header, &flags).map(|_| EXIT_OK),
        Command::Figure(a) => cmd_figure(a, &header, &flags).map(|_| EXIT_OK),
        Command::Verify(a) => {
            let (table, passed) = cmd_verify(a)?;
            emit(&table, &a.output, &header, &flags)?;
            if passed {
                Ok(EXIT_OK)
            } else {
                eprintln!("error: verification failed");
                Ok(EXIT_FAILURE)
            }
        }
    }
}

fn render(table: &Table, format: Format, header: &str, flags: &Value) -> Vec<u8> {
    match format {
        Format::Csv => table.to_csv(header),
        Format::Json => table.to_json(header, flags),
    }
}

fn emit(table: &Table, out: &OutputArgs, header: &str, flags: &Value) -> Result<(), CliError> {
    let bytes = render(table, out.format, header, flags);
    match &out.out {
        Some(path) => write_file(path, &bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn cmd_qcb(a: &QcbArgs) -> Result<Table, CliError> {
    let spec = if a.modes == 1 { ProbeSpec::single(a.n, a.beta) } else { ProbeSpec::two(a.n, a.beta, a.gamma) };
    let spec = spec.map_err(usage)?;
    let ch = a.channel.channel()?;
    let input = params_from_spec(spec)?;
    let report = qcb(input, channel_output(input, &ch)?, a.copies)?;
    let mut t = Table::new(
        "qcb",
        &[
            "modes",
            "N",
            "beta",
            "gamma",
            "eta",
            "Gamma",
            "copies",
            "Q",
            "s_star",
            "fidelity",
            "pe_upper",
            "pe_lower",
            "pe_fidelity_upper",
        ],
    );
    t.push(vec![
        Cell::Int(a.modes.into()),
        a.n.into(),
        a.beta.into(),
        spec.gamma.into(),
        ch.eta().into(),
        ch.gamma().into(),
        Cell::Int(a.copies.into()),
        report.q.into(),
        report.s_star.into(),
        report.fidelity.into(),
        report.pe_upper.into(),
        report.pe_lower.into(),
        report.pe_fidelity_upper.into(),
    ]);
    Ok(t)
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Table, CliError> {
    let ranges = SweepRanges { n: (0.0, a.n_max), beta: (a.beta_min, a.beta_max), damping: (0.0, a.damping_max) };
    ranges.validate().map_err(usage)?;
    check_usage((0.0..=1.0).contains(&a.gamma), || format!("gamma must lie in [0, 1], got {}", a.gamma))?;
    check_usage(a.samples > 0, || "samples must be positive".into())?;
    let records = random_sweep(a.samples, &ranges, a.gamma, a.seed)?;
    let mut t = Table::new("sweep", &["N", "beta", "Gamma", "gamma", "deltaQ_gamma"]);
    t.note("positive_fraction", positive_fraction(&records));
    for r in &records {
        t.push(vec![r.n.into(), r.beta.into(), r.damping.into(), r.gamma.into(), r.delta_q_gamma.into()]);
    }
    Ok(t)
}

pub fn cmd_threshold(a: &ThresholdArgs) -> Result<Table, CliError> {
    let unit = |x: f64| x > 0.0 && x <= 1.0;
    let etas = match a.eta {
        Some(e) => {
            check_usage(unit(e), || format!("eta must lie in (0, 1], got {e}"))?;
            vec![e]
        }
        None => {
            check_usage(unit(a.eta_min) && unit(a.eta_max) && a.eta_min <= a.eta_max, || {
                format!("eta range [{}, {}] must lie in (0, 1]", a.eta_min, a.eta_max)
            })?;
            check_usage(a.points >= 1, || "points must be positive".into())?;
            linspace(a.eta_min, a.eta_max, a.points)
        }
    };
    let mut t = Table::new("threshold", &["eta", "N_th"]);
    t.note("eta_c", critical_transmissivity());
    t.note("Gamma_c", critical_damping());
    let fit = threshold_fit_near_critical()?;
    t.note("fit_c1", fit.c1);
    t.note("fit_c2", fit.c2);
    for eta in etas {
        t.push(vec![eta.into(), threshold_energy(eta)?.into()]);
    }
    Ok(t)
}

pub fn cmd_critical() -> Result<Table, CliError> {
    let x = critical_root();
    let fit = threshold_fit_near_critical()?;
    let mut t = Table::new(
        "critical",
        &["eta_c", "Gamma_c", "eta_c_bisection", "cubic_residual", "fit_c1", "fit_c2", "fit_rms"],
    );
    t.push(vec![
        critical_transmissivity().into(),
        critical_damping().into(),
        critical_transmissivity_numeric().into(),
        (((x + 1.0) * x + 1.0) * x - 1.0).into(),
        fit.c1.into(),
        fit.c2.into(),
        fit.rms.into(),
    ]);
    Ok(t)
}

pub fn cmd_correlations(a: &CorrelationArgs) -> Result<Table, CliError> {
    ProbeSpec::two(a.n, a.beta, a.gamma).map_err(usage)?;
    let mut c = figures::input_correlations(a.n, a.beta, a.gamma, a.mi.into())?;
    if a.bits {
        c = c.in_bits();
    }
    let mut t = Table::new("correlations", &["N", "beta", "gamma", "E", "D", "I", "d_tilde_minus", "entangled"]);
    t.note("unit", if a.bits { "bits" } else { "nats" });
    t.push(vec![
        a.n.into(),
        a.beta.into(),
        a.gamma.into(),
        c.e.into(),
        c.d.into(),
        c.i.into(),
        c.d_tilde_minus.into(),
        c.is_entangled().into(),
    ]);
    Ok(t)
}

fn out_dir(explicit: &Option<PathBuf>) -> PathBuf {
    explicit
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn validate_figure(a: &FigureArgs) -> Result<(), CliError> {
    if let Some(p) = a.points {
        check_usage(p >= 2, || format!("points must be >= 2, got {p}"))?;
    }
    if let Some(s) = a.samples {
        check_usage(s >= 2, || format!("samples must be >= 2, got {s}"))?;
    }
    if let Some(g) = a.gamma {
        check_usage((0.0..=1.0).contains(&g), || format!("gamma must lie in [0, 1], got {g}"))?;
    }
    if let Some(b) = a.beta {
        check_usage((0.0..=1.0).contains(&b), || format!("beta must lie in [0, 1], got {b}"))?;
    }
    Ok(())
}

/// Writes every panel of a figure; returns the paths written.
pub fn cmd_figure(a: &FigureArgs, header: &str, flags: &Value) -> Result<Vec<PathBuf>, CliError> {
    validate_figure(a)?;
    let opts = FigureOptions {
        points: a.points,
        samples: a.samples,
        seed: a.seed,
        gamma: a.gamma,
        beta: a.beta,
        mi: a.mi.into(),
    };
    let tables = figures::figure(a.id, &opts)?;
    let dir = out_dir(&a.out_dir);
    let ext = match a.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut written = Vec::new();
    for t in &tables {
        let path = dir.join(format!("{}.{ext}", t.name));
        write_file(&path, &render(t, a.format, header, flags))?;
        if a.gnuplot {
            let script = dir.join(format!("{}.gp", t.name));
            write_file(&script, t.gnuplot(&file_name(&path)).as_bytes())?;
        }
        println!("{}", path.display());
        written.push(path);
    }
    Ok(written)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(Table, bool), CliError> {
    let cfg = VerifyConfig { dim: a.dim, tail_tol: a.tail_tol, doubling: !a.no_doubling };
    let report = run_standard(&cfg).map_err(usage)?;
    let mut t = Table::new("verify", &["case", "check", "value", "tol", "pass", "error"]);
    for r in &report.rows {
        t.push(vec![
            r.case.as_str().into(),
            r.check.as_str().into(),
            r.value.into(),
            r.tol.into(),
            r.pass.into(),
            r.error.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    Ok((t, report.all_passed()))
}

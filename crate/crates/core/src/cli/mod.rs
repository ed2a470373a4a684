//! Command-line front end.
//!
//! Exit codes: 0 success (or "is a frame"), 1 negative finding, 2 configuration
//! error, 3 dimension error, 4 numerical failure. Every command validates its
//! configuration and computes its full result before writing any file.

pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::TfError;
use crate::gabor::{self, WindowBundle};
use crate::lattice::adjoint_lattice;
use crate::locop::{self, Strategy};
use crate::modnorm::{self, LocalizationNorm, ModulationNorm};
use crate::phase_space::{stft, PhasePoint, Signal, TFMatrix};

use config::{DualSpec, NormKind, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Dimension(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Dimension(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Dimension(m) => write!(f, "dimension error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<TfError> for CliError {
    fn from(e: TfError) -> Self {
        match e {
            TfError::Dimension { .. } => CliError::Dimension(e.to_string()),
            TfError::NotHermitian { .. } | TfError::Numerical(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the ensemble seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also emit CSV tables where a command has one.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// STFT of the input signal.
    Stft(CommonArgs),
    /// Frame bounds and equivalent frame conditions.
    FrameCheck(CommonArgs),
    /// Multi-window frame from eigenfunctions of a localization operator.
    Construct(CommonArgs),
    /// Modulation, localization and coefficient norms per signal.
    Norms(CommonArgs),
    /// Empirical equivalence constants between two norms.
    Equivalence(CommonArgs),
    /// Janssen, Wexler-Raz and Ron-Shen checks.
    Duality(CommonArgs),
    /// Lattice periodization bounds of the symbol.
    PartitionCheck(CommonArgs),
}

#[derive(Debug, Parser)]
#[command(name = "tfloc", version, about = "Finite time-frequency localization toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// A finished command: files to write, the stdout document and the exit code.
struct Outcome {
    files: Vec<(String, String)>,
    stdout: String,
    code: i32,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Numerical(e.to_string()))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = std::env::var("TFL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let (common, outcome) = match &cli.command {
        Command::Stft(a) => (a, load(a).and_then(|c| cmd_stft(&c, a))),
        Command::FrameCheck(a) => (a, load(a).and_then(|c| cmd_frame_check(&c, a))),
        Command::Construct(a) => (a, load(a).and_then(|c| cmd_construct(&c, a))),
        Command::Norms(a) => (a, load(a).and_then(|c| cmd_norms(&c, a))),
        Command::Equivalence(a) => (a, load(a).and_then(|c| cmd_equivalence(&c, a))),
        Command::Duality(a) => (a, load(a).and_then(|c| cmd_duality(&c, a))),
        Command::PartitionCheck(a) => (a, load(a).and_then(|c| cmd_partition(&c, a))),
    };
    match outcome.and_then(|o| write_outputs(&common.out, o)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tfloc: {e}");
            e.exit_code()
        }
    }
}

fn load(args: &CommonArgs) -> Result<RunConfig, CliError> {
    RunConfig::load(&args.config)
}

fn write_outputs(dir: &Path, outcome: Outcome) -> Result<i32, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    for (name, body) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{}", outcome.stdout);
    Ok(outcome.code)
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn grid_csv(m: &TFMatrix) -> String {
    let n = m.n();
    let mut out = String::new();
    for k in 0..n {
        let row: Vec<String> = (0..n).map(|l| fmt_f64(m.get(PhasePoint { k, l }).norm())).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn cmd_stft(cfg: &RunConfig, args: &CommonArgs) -> Result<Outcome, CliError> {
    let window = cfg.window()?;
    let signals = cfg.input_signals()?;
    let [f] = signals.as_slice() else {
        return Err(CliError::Config("stft expects exactly one input signal".into()));
    };
    let v = stft(&window, f)?;
    let body = to_json(&v)?;
    let mut files = vec![("stft.json".to_string(), body.clone())];
    if args.format == Format::Csv {
        files.push(("stft_magnitude.csv".into(), grid_csv(&v)));
    }
    Ok(Outcome { files, stdout: body, code: 0 })
}

fn cmd_frame_check(cfg: &RunConfig, args: &CommonArgs) -> Result<Outcome, CliError> {
    let bundle = cfg.bundle()?;
    let lattice = cfg.lattice()?;
    let s = gabor::frame_operator(&bundle, &lattice)?;
    let frame = gabor::frame_bounds(&s)?;
    let criteria = gabor::frame_criteria_report(&bundle, &lattice)?;
    if !criteria.agree {
        return Err(CliError::Numerical("frame criteria disagree".into()));
    }
    let doc = json!({ "frame": frame, "criteria": criteria });
    let body = to_json(&doc)?;
    let mut files = vec![("frame_report.json".to_string(), body.clone())];
    if args.format == Format::Csv {
        let mut csv = String::from("index,eigenvalue\n");
        for (i, v) in frame.spectrum.iter().enumerate() {
            csv.push_str(&format!("{i},{}\n", fmt_f64(*v)));
        }
        files.push(("frame_spectrum.csv".into(), csv));
    }
    Ok(Outcome { files, stdout: body, code: if frame.is_frame { 0 } else { 1 } })
}

fn cmd_construct(cfg: &RunConfig, _args: &CommonArgs) -> Result<Outcome, CliError> {
    let window = cfg.window()?;
    let lattice = cfg.lattice()?;
    let sigma = cfg.symbol(Some(&lattice))?;
    let strategy = cfg.strategy.unwrap_or(Strategy::First);
    let partition = locop::partition_check(&sigma, &lattice)?;
    match locop::construct_multiwindow_frame(&sigma, &window, &lattice, strategy) {
        Ok(c) => {
            let duals = gabor::dual_windows(&c.bundle, &lattice)?;
            let wr = gabor::wexler_raz_check(&c.bundle.signals(), &duals.signals(), &lattice)?;
            let doc = json!({
                "n": c.n,
                "strategy": strategy,
                "partition": partition,
                "frame": c.report,
                "eigenvalues": c.eigenvalues,
                "search": c.trace,
                "wexler_raz_max_residual": wr.max_residual,
                "verified": c.report.is_frame && wr.passes,
            });
            let body = to_json(&doc)?;
            let files = vec![
                ("construct.json".to_string(), body.clone()),
                ("windows.json".to_string(), to_json(&c.bundle)?),
                ("dual_windows.json".to_string(), to_json(&duals)?),
            ];
            let code = if wr.passes { 0 } else { 4 };
            Ok(Outcome { files, stdout: body, code })
        }
        Err(TfError::Exhausted { n_max, best_condition }) => {
            let doc = json!({
                "n": null,
                "strategy": strategy,
                "partition": partition,
                "exhausted_at": n_max,
                "best_condition": if best_condition.is_finite() { json!(best_condition) } else { json!(null) },
            });
            let body = to_json(&doc)?;
            Ok(Outcome { files: vec![("construct.json".into(), body.clone())], stdout: body, code: 1 })
        }
        Err(e) => Err(e.into()),
    }
}

/// The three norms of one signal.
#[derive(Debug, Serialize)]
struct NormRow {
    index: usize,
    modulation: f64,
    localization: f64,
    coefficient: f64,
}

struct NormSet {
    modulation: ModulationNorm,
    localization: LocalizationNorm,
    bundle: WindowBundle,
    lattice: crate::lattice::Lattice,
    spec: modnorm::NormSpec,
}

impl NormSet {
    fn from_config(cfg: &RunConfig) -> Result<Self, CliError> {
        let window = cfg.window()?;
        let lattice = cfg.lattice()?;
        let sigma = cfg.symbol(Some(&lattice))?;
        let spec = cfg.norm()?;
        let bundle = cfg.bundle()?;
        Ok(NormSet {
            modulation: ModulationNorm::new(&window, spec),
            localization: LocalizationNorm::new(&sigma, &window, &lattice, spec)?,
            bundle,
            lattice,
            spec,
        })
    }

    fn eval(&self, kind: NormKind, f: &Signal) -> crate::Result<f64> {
        match kind {
            NormKind::Modulation => self.modulation.eval(f),
            NormKind::Localization => self.localization.eval(f),
            NormKind::Coefficient => modnorm::multiwindow_coefficient_norm(f, &self.bundle, &self.lattice, &self.spec),
        }
    }
}

fn cmd_norms(cfg: &RunConfig, args: &CommonArgs) -> Result<Outcome, CliError> {
    let norms = NormSet::from_config(cfg)?;
    let signals = match (&cfg.input, &cfg.ensemble) {
        (Some(_), _) => cfg.input_signals()?,
        (None, Some(_)) => {
            let (spec, seed) = cfg.ensemble(args.seed)?;
            modnorm::generate_ensemble(cfg.n, &spec, seed)?
        }
        (None, None) => return Err(CliError::Config("norms needs an input file or an ensemble".into())),
    };
    if let Some(i) = signals.iter().position(Signal::is_zero) {
        return Err(CliError::Config(format!("signal {i} is zero; norms are only compared on nonzero signals")));
    }
    let rows = signals
        .iter()
        .enumerate()
        .map(|(index, f)| {
            Ok(NormRow {
                index,
                modulation: norms.eval(NormKind::Modulation, f)?,
                localization: norms.eval(NormKind::Localization, f)?,
                coefficient: norms.eval(NormKind::Coefficient, f)?,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let doc = json!({
        "norm": norms.spec,
        "partition_lower": norms.localization.partition_lower,
        "rows": rows,
    });
    let body = to_json(&doc)?;
    let mut files = vec![("norms.json".to_string(), body.clone())];
    if args.format == Format::Csv {
        let mut csv = String::from("index,modulation,localization,coefficient\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                r.index,
                fmt_f64(r.modulation),
                fmt_f64(r.localization),
                fmt_f64(r.coefficient)
            ));
        }
        files.push(("norms.csv".into(), csv));
    }
    Ok(Outcome { files, stdout: body, code: 0 })
}

fn cmd_equivalence(cfg: &RunConfig, args: &CommonArgs) -> Result<Outcome, CliError> {
    let norms = NormSet::from_config(cfg)?;
    let (spec, seed) = cfg.ensemble(args.seed)?;
    let pair = cfg.compare.clone().unwrap_or(config::ComparePair { a: NormKind::Modulation, b: NormKind::Localization });
    let report = modnorm::equivalence_estimate(
        |f| norms.eval(pair.a, f),
        |f| norms.eval(pair.b, f),
        cfg.n,
        &spec,
        seed,
    )?;
    let doc = json!({
        "compare": pair,
        "norm": norms.spec,
        "partition_lower": norms.localization.partition_lower,
        "report": report,
    });
    let body = to_json(&doc)?;
    let mut files = vec![("equivalence.json".to_string(), body.clone())];
    if args.format == Format::Csv {
        files.push(("equivalence.csv".into(), report.to_csv()?));
    }
    let code = if report.condition.is_finite() { 0 } else { 1 };
    Ok(Outcome { files, stdout: body, code })
}

fn cmd_duality(cfg: &RunConfig, _args: &CommonArgs) -> Result<Outcome, CliError> {
    let bundle = cfg.bundle()?;
    let lattice = cfg.lattice()?;
    let phi = bundle.signals();
    let s = gabor::frame_operator(&bundle, &lattice)?;
    let frame = gabor::frame_bounds(&s)?;

    let gamma: Option<Vec<Signal>> = match cfg.dual.clone().unwrap_or(DualSpec::Canonical) {
        DualSpec::Zero => Some(vec![Signal::zeros(cfg.n); bundle.len()]),
        DualSpec::Canonical if frame.is_frame => Some(gabor::dual_windows(&bundle, &lattice)?.signals()),
        DualSpec::Canonical => None,
    };

    let janssen = gabor::janssen_representation(&phi, &phi, &lattice)?;
    let janssen_ok = janssen.residual < 1e-10;
    let adjoint = adjoint_lattice(&lattice);
    let g = gabor::gramian(&phi, &adjoint)?;
    let riesz = gabor::riesz_bounds(&g)?;
    let ron_shen_agree = gabor::is_riesz(riesz) == frame.is_frame;

    let wr = match &gamma {
        Some(gm) => Some(gabor::wexler_raz_check(&phi, gm, &lattice)?),
        None => None,
    };
    let wr_ok = wr.as_ref().is_some_and(|r| r.passes);
    let reconstruction = match &gamma {
        Some(gm) => {
            let d = gabor::frame_type_operator(gm, &phi, &lattice)?;
            Some((d - crate::Operator::identity(cfg.n, cfg.n)).norm())
        }
        None => None,
    };

    let doc = json!({
        "frame": { "A": frame.lower_bound, "B": frame.upper_bound, "is_frame": frame.is_frame },
        "janssen": {
            "kappa": janssen.kappa,
            "residual": janssen.residual,
            "adjoint_lattice": adjoint,
            "coefficients": janssen.coefficients,
        },
        "wexler_raz": wr,
        "reconstruction_residual": reconstruction,
        "ron_shen": {
            "riesz_lower": riesz.0,
            "riesz_upper": riesz.1,
            "is_riesz": gabor::is_riesz(riesz),
            "agrees_with_frame": ron_shen_agree,
        },
    });
    let body = to_json(&doc)?;
    let code = if janssen_ok && wr_ok && ron_shen_agree { 0 } else { 1 };
    Ok(Outcome { files: vec![("duality.json".into(), body.clone())], stdout: body, code })
}

fn cmd_partition(cfg: &RunConfig, _args: &CommonArgs) -> Result<Outcome, CliError> {
    let lattice = cfg.lattice()?;
    let sigma = cfg.symbol(Some(&lattice))?;
    let p = locop::partition_check(&sigma, &lattice)?;
    let passes = p.lower > 0.0;
    let body = to_json(&json!({ "A": p.lower, "B": p.upper, "passes": passes }))?;
    Ok(Outcome { files: vec![("partition.json".into(), body.clone())], stdout: body, code: if passes { 0 } else { 1 } })
}

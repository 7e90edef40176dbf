//! The `atiyah` command line.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::closed_forms::{re_det_m_n4, EdgeLengths4};
use crate::determinant::atiyah_det;
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::search::{append_archive, minimize, Objective, SearchProblem};
use crate::sympoly::expand_re_det_m;
use crate::sympoly::interpolate::{interpolate_homogeneous, InterpolationOptions, Target};
use crate::verify::{run_conjecture_scan, run_identity_suite, run_invariance_suite, GeneratorKind, GeneratorSpec, SuiteOptions};

#[derive(Debug, Parser)]
#[command(name = "atiyah", version, about = "Atiyah determinants of point configurations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// det M, |det M|, D and the edge product for a points file.
    Compute(ComputeArgs),
    /// Identity and invariance suites on seeded configurations.
    Verify(VerifyArgs),
    /// Scan of the proved bound and the conjectured gaps for four points.
    Scan(ScanArgs),
    /// Nelder-Mead search for small |D| or small gaps.
    Search(SearchArgs),
    /// Re(det M) for four points as a polynomial in the edge lengths.
    Expand(ExpandArgs),
    /// Recover |det M|^2 (or Re det M) by exact lattice interpolation.
    Interpolate(InterpolateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Points file: {"points": [[t, u, v], ...]}; `-` reads stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value = "uniform-ball")]
    pub kind: GeneratorKind,
    #[arg(long, default_value_t = 0.5)]
    pub degeneracy: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub suite: SuiteArgs,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Relative tolerance shared by every check.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Only four points are supported.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value = "abs-D")]
    pub objective: Objective,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of restarts.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 4000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Largest accepted change of the objective under a similarity.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Result as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Newline-delimited JSON archive the result is appended to.
    #[arg(long)]
    pub archive: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Polynomial text file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    AbsDetSq,
    ReDet,
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    #[arg(long, value_enum, default_value_t = TargetArg::AbsDetSq)]
    pub target: TargetArg,
    /// Fractional bits of the fixed-point evaluation.
    #[arg(long, default_value_t = 256)]
    pub precision: u32,
    /// Seed of the held-out samples.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Largest accepted relative residual on held-out samples.
    #[arg(long, default_value_t = 1e-20)]
    pub tol: f64,
    /// Polynomial text file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    CheckFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Clean => 0,
            Status::CheckFailed => 1,
        }
    }

    fn from_clean(clean: bool) -> Self {
        if clean {
            Status::Clean
        } else {
            Status::CheckFailed
        }
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match run(&cli, out, err) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::ResidualTooLarge { .. } => 1,
                _ => 2,
            }
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    match &cli.command {
        Command::Compute(a) => compute(a, out),
        Command::Verify(a) => verify(a, out, err),
        Command::Scan(a) => scan(a, out, err),
        Command::Search(a) => search(a, out, err),
        Command::Expand(a) => expand(a, out, err),
        Command::Interpolate(a) => interpolate(a, out, err),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize)]
pub struct ComputeRecord {
    pub n: usize,
    pub det_m_re: f64,
    pub det_m_im: f64,
    pub abs_det_m: f64,
    pub d_re: f64,
    pub d_im: f64,
    pub abs_d: f64,
    pub edge_product: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_residual: Option<f64>,
}

impl ComputeRecord {
    pub fn new(cfg: &Configuration) -> Result<Self> {
        let det = atiyah_det(cfg)?;
        let re_closed_form = if cfg.len() == 4 {
            Some(re_det_m_n4(&EdgeLengths4::from_config(cfg)?)?)
        } else {
            None
        };
        Ok(Self {
            n: det.n,
            det_m_re: det.det_m.re,
            det_m_im: det.det_m.im,
            abs_det_m: det.det_m.norm(),
            d_re: det.d.re,
            d_im: det.d.im,
            abs_d: det.d.norm(),
            edge_product: det.edge_product,
            re_closed_form,
            closed_form_residual: re_closed_form.map(|c| (c - det.det_m.re).abs()),
        })
    }

    fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "n,det_m_re,det_m_im,abs_det_m,d_re,d_im,abs_d,edge_product,re_closed_form,closed_form_residual\n\
             {},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}\n",
            self.n,
            self.det_m_re,
            self.det_m_im,
            self.abs_det_m,
            self.d_re,
            self.d_im,
            self.abs_d,
            self.edge_product,
            opt(self.re_closed_form),
            opt(self.closed_form_residual)
        )
    }
}

fn compute(a: &ComputeArgs, out: &mut dyn Write) -> Result<Status> {
    let cfg = Configuration::from_json(&read_input(&a.input)?)?;
    let record = ComputeRecord::new(&cfg)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&record)? + "\n",
        Format::Csv => record.to_csv(),
    };
    emit(a.out.as_deref(), &text, out)?;
    Ok(Status::Clean)
}

fn spec(s: &SuiteArgs, n: usize) -> GeneratorSpec {
    GeneratorSpec::new(s.kind, n, s.seed).with_scale(s.scale).with_degeneracy(s.degeneracy)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let spec = spec(&a.suite, a.n);
    let options = SuiteOptions::new(a.suite.trials, a.tol).with_workers(a.suite.workers);
    let reports = [run_identity_suite(&spec, &options)?, run_invariance_suite(&spec, &options)?];
    for r in &reports {
        write!(err, "{}", r.summary())?;
    }
    let text = match a.suite.format {
        Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
        Format::Csv => {
            let mut s = String::from("suite,trial,check,residual\n");
            for r in &reports {
                for f in &r.failures {
                    s.push_str(&format!("{},{},{},{:e}\n", r.suite, f.trial, f.check, f.residual));
                }
            }
            s
        }
    };
    emit(a.suite.out.as_deref(), &text, out)?;
    Ok(Status::from_clean(reports.iter().all(|r| r.is_clean())))
}

fn scan(a: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let spec = spec(&a.suite, a.n);
    let options = SuiteOptions::new(a.suite.trials, a.tol).with_workers(a.suite.workers);
    let report = run_conjecture_scan(&spec, &options)?;
    write!(err, "{}", report.summary())?;
    let text = match a.suite.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    emit(a.suite.out.as_deref(), &text, out)?;
    Ok(Status::from_clean(report.is_clean()))
}

fn search(a: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let mut problem = SearchProblem::new(a.n, a.objective)
        .with_restarts(a.trials)
        .with_seed(a.seed)
        .with_max_iters(a.max_iters);
    problem.workers = a.workers;
    let result = minimize(&problem)?;
    let worst_gauge = result.restarts.iter().map(|r| r.gauge_residual).fold(0.0, f64::max);
    writeln!(
        err,
        "{} over {} restarts, n = {}: best {:.12e} (restart {}, collinearity {:.3e}, gauge residual {:.1e})",
        a.objective, a.trials, a.n, result.best_value, result.restart, result.collinearity, worst_gauge
    )?;
    if let Some(path) = &a.archive {
        append_archive(path, &problem, &result)?;
    }
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&result)? + "\n"), out)?;
    Ok(Status::from_clean(worst_gauge <= a.tol))
}

fn expand(a: &ExpandArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let p = expand_re_det_m();
    emit(a.out.as_deref(), &p.to_text(), out)?;
    let line = format!("terms: {}\n", p.len());
    if a.out.is_some() {
        out.write_all(line.as_bytes())?;
    } else {
        err.write_all(line.as_bytes())?;
    }
    Ok(Status::Clean)
}

#[derive(Debug, Serialize)]
struct InterpolationSummary<'a> {
    #[serde(flatten)]
    result: &'a crate::sympoly::interpolate::Interpolation,
    holdout: usize,
}

fn interpolate(a: &InterpolateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let (target, degree) = match a.target {
        TargetArg::AbsDetSq => (Target::AbsDetMSquared, 12),
        TargetArg::ReDet => (Target::ReDetM, 6),
    };
    let mut options = InterpolationOptions::new(degree);
    options.precision_bits = a.precision;
    options.seed = a.seed;
    options.residual_tolerance = a.tol;
    let result = interpolate_homogeneous(target, &options)?;
    writeln!(
        err,
        "{} terms of degree {} from {} samples, residual {:.3e}",
        result.terms, result.degree, result.samples, result.residual
    )?;
    let summary = InterpolationSummary { result: &result, holdout: options.holdout };
    match &a.out {
        Some(path) => {
            std::fs::write(path, result.poly.to_text())?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        None => out.write_all(result.poly.to_text().as_bytes())?,
    }
    Ok(Status::Clean)
}

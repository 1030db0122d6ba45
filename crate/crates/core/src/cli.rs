//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or data error, 3 singular design. Errors
//! are written to standard error as a single JSON object; output files are
//! only created on success.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bayes::{posterior_causal_n, posterior_descriptive_n, posterior_super_causal, BayesModel, PosteriorSummary};
use crate::design::{enumerate_exact, monte_carlo};
use crate::error::{Error, Result};
use crate::io::{self, ColumnRoles, CsvSample};
use crate::linalg::to_rows;
use crate::population::FinitePopulation;
use crate::regression::fit_ols;
use crate::variance::{binary_ehw, general_variance, BinaryEhw};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "designreg", version, about = "Regression standard errors under sampling and design uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit OLS on a CSV sample and report all four standard errors.
    Estimate(EstimateArgs),
    /// Monte Carlo over a population spec's sampling and assignment design.
    Simulate(SimulateArgs),
    /// Exact enumeration for a small binary-cause population spec.
    Enumerate(EnumerateArgs),
    /// Posterior means and variances for the normal potential-outcome model.
    Bayes(BayesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimandSelector {
    Descriptive,
    CausalSample,
    Causal,
    All,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    outcome: String,
    /// Comma-separated cause columns.
    #[arg(long, value_delimiter = ',', required = true)]
    causes: Vec<String>,
    /// Comma-separated attribute columns; an intercept is added if none is constant.
    #[arg(long, value_delimiter = ',')]
    attributes: Vec<String>,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long, value_enum, default_value = "all")]
    estimand: EstimandSelector,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Population spec (JSON) including the design.
    #[arg(long)]
    population: PathBuf,
    #[arg(long, default_value_t = 1000)]
    reps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.95)]
    ci: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long)]
    population: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BayesArgs {
    #[arg(long)]
    sigma1: f64,
    #[arg(long)]
    sigma0: f64,
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    /// Population treated count.
    #[arg(long)]
    treated: usize,
    /// Population control count.
    #[arg(long)]
    control: usize,
    #[arg(long)]
    sample_treated: usize,
    #[arg(long)]
    sample_control: usize,
    #[arg(long, allow_hyphen_values = true)]
    ybar1: f64,
    #[arg(long, allow_hyphen_values = true)]
    ybar0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Estimate {
        data: PathBuf,
        roles: ColumnRoles,
        population_size: Option<usize>,
        estimand: EstimandSelector,
        out: Option<PathBuf>,
    },
    Simulate {
        population: PathBuf,
        reps: u64,
        seed: u64,
        ci: f64,
        out: Option<PathBuf>,
    },
    Enumerate {
        population: PathBuf,
        out: Option<PathBuf>,
    },
    Bayes {
        model: BayesModel,
        out: Option<PathBuf>,
    },
}

impl RunConfig {
    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            RunConfig::Estimate { out, .. }
            | RunConfig::Simulate { out, .. }
            | RunConfig::Enumerate { out, .. }
            | RunConfig::Bayes { out, .. } => out.as_ref(),
        }
    }
}

fn config_from(cli: Cli) -> Result<RunConfig> {
    Ok(match cli.command {
        Command::Estimate(a) => {
            let mut seen = std::collections::HashSet::new();
            for name in std::iter::once(&a.outcome).chain(&a.causes).chain(&a.attributes) {
                if !seen.insert(name.as_str()) {
                    return Err(Error::invalid(format!("column '{name}' is given more than one role")));
                }
            }
            RunConfig::Estimate {
                data: a.data,
                roles: ColumnRoles {
                    outcome: a.outcome,
                    causes: a.causes,
                    attributes: a.attributes,
                },
                population_size: a.population_size,
                estimand: a.estimand,
                out: a.out,
            }
        }
        Command::Simulate(a) => {
            if a.reps == 0 {
                return Err(Error::invalid("--reps must be at least 1"));
            }
            if !(a.ci > 0.0 && a.ci < 1.0) {
                return Err(Error::invalid("--ci must lie in (0, 1)"));
            }
            RunConfig::Simulate {
                population: a.population,
                reps: a.reps,
                seed: a.seed,
                ci: a.ci,
                out: a.out,
            }
        }
        Command::Enumerate(a) => RunConfig::Enumerate {
            population: a.population,
            out: a.out,
        },
        Command::Bayes(a) => RunConfig::Bayes {
            model: BayesModel::new(
                a.sigma1,
                a.sigma0,
                a.kappa,
                a.treated,
                a.control,
                a.sample_treated,
                a.sample_control,
                a.ybar1,
                a.ybar0,
            )?,
            out: a.out,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub name: String,
    pub theta_hat: f64,
    pub se_ehw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se_causal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se_causal_sample: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se_descriptive: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMatrices {
    pub lambda_hat: Vec<Vec<f64>>,
    pub h_hat: Vec<Vec<f64>>,
    pub delta_ehw_hat: Vec<Vec<f64>>,
    pub g_hat: Vec<Vec<f64>>,
    pub delta_z_hat: Vec<Vec<f64>>,
    pub v_ehw: Vec<Vec<f64>>,
    pub v_causal: Vec<Vec<f64>>,
    pub v_causal_sample: Vec<Vec<f64>>,
    pub v_descriptive: Vec<Vec<f64>>,
}

/// Difference-in-means view, present for a single 0/1 cause with
/// intercept-only attributes and at least two units per group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinarySection {
    pub treated: usize,
    pub control: usize,
    pub difference_in_means: f64,
    #[serde(flatten)]
    pub ehw: BinaryEhw,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceReport {
    pub sample_size: usize,
    pub population_size: Option<usize>,
    pub rho_hat: f64,
    pub estimand: EstimandSelector,
    pub causes: Vec<String>,
    pub attributes: Vec<String>,
    pub theta_hat: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub coefficients: Vec<CoefficientSummary>,
    pub matrices: ReportMatrices,
    pub binary: Option<BinarySection>,
}

pub fn run_estimate(sample: &CsvSample, estimand: EstimandSelector) -> Result<InferenceReport> {
    let data = &sample.data;
    let fit = fit_ols(data)?;
    let v = general_variance(&fit, data.n_population())?;
    let keep = |which: EstimandSelector| estimand == EstimandSelector::All || estimand == which;
    let coefficients = (0..data.k())
        .map(|j| CoefficientSummary {
            name: sample.cause_names[j].clone(),
            theta_hat: fit.theta_hat[j],
            se_ehw: v.se.ehw[j],
            se_causal: keep(EstimandSelector::Causal).then(|| v.se.causal[j]),
            se_causal_sample: keep(EstimandSelector::CausalSample).then(|| v.se.causal_sample[j]),
            se_descriptive: keep(EstimandSelector::Descriptive).then(|| v.se.descriptive[j]),
        })
        .collect();
    Ok(InferenceReport {
        sample_size: data.len(),
        population_size: data.n_population(),
        rho_hat: v.rho_hat,
        estimand,
        causes: sample.cause_names.clone(),
        attributes: sample.attribute_names.clone(),
        theta_hat: fit.theta_hat.clone(),
        gamma_hat: fit.gamma_hat.clone(),
        coefficients,
        matrices: ReportMatrices {
            lambda_hat: to_rows(&fit.lambda_hat),
            h_hat: to_rows(&v.h_hat),
            delta_ehw_hat: to_rows(&v.delta_ehw_hat),
            g_hat: to_rows(&v.g_hat),
            delta_z_hat: to_rows(&v.delta_z_hat),
            v_ehw: to_rows(&v.v_ehw),
            v_causal: to_rows(&v.v_causal),
            v_causal_sample: to_rows(&v.v_causal_sample),
            v_descriptive: to_rows(&v.v_descriptive),
        },
        binary: binary_section(sample),
    })
}

fn binary_section(sample: &CsvSample) -> Option<BinarySection> {
    let data = &sample.data;
    if data.k() != 1 || data.q() != 1 {
        return None;
    }
    let u = data.u().column(0);
    if u.iter().any(|&v| v != 0.0 && v != 1.0) {
        return None;
    }
    let x: Vec<bool> = u.iter().map(|&v| v == 1.0).collect();
    let r = vec![true; x.len()];
    let ehw = binary_ehw(data.y(), &x, &r).ok()?;
    let mean = |t: bool| {
        let g: Vec<f64> = data.y().iter().zip(&x).filter(|(_, &xi)| xi == t).map(|(y, _)| *y).collect();
        (g.iter().sum::<f64>() / g.len() as f64, g.len())
    };
    let ((m1, n1), (m0, n0)) = (mean(true), mean(false));
    Some(BinarySection {
        treated: n1,
        control: n0,
        difference_in_means: m1 - m0,
        ehw,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BayesReport {
    pub model: BayesModel,
    pub posteriors: Vec<PosteriorSummary>,
}

pub fn run_bayes(model: &BayesModel) -> BayesReport {
    BayesReport {
        model: *model,
        posteriors: vec![
            posterior_super_causal(model),
            posterior_descriptive_n(model),
            posterior_causal_n(model),
        ],
    }
}

fn load_population(path: &std::path::Path) -> Result<(FinitePopulation, crate::population::Design)> {
    let spec = io::read_population_spec(path)?;
    Ok((FinitePopulation::from_spec(&spec)?, spec.design()))
}

/// Executes a validated configuration and returns the JSON text.
pub fn execute(config: &RunConfig) -> Result<String> {
    match config {
        RunConfig::Estimate {
            data,
            roles,
            population_size,
            estimand,
            ..
        } => {
            let sample = io::parse_csv(data, roles, *population_size)?;
            io::to_json(&run_estimate(&sample, *estimand)?)
        }
        RunConfig::Simulate {
            population,
            reps,
            seed,
            ci,
            ..
        } => {
            let (pop, design) = load_population(population)?;
            io::to_json(&monte_carlo(&pop, &design, *reps, *seed, *ci)?)
        }
        RunConfig::Enumerate { population, .. } => {
            let (pop, design) = load_population(population)?;
            io::to_json(&enumerate_exact(&pop, &design)?)
        }
        RunConfig::Bayes { model, .. } => io::to_json(&run_bayes(model)),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_singular() {
        EXIT_SINGULAR
    } else {
        EXIT_DATA
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension(_) => "dimension",
        Error::RankDeficient { .. } => "rank-deficient",
        Error::Singular(_) => "singular",
        Error::InvalidInput(_) => "invalid-input",
        Error::Undefined { .. } => "undefined",
        Error::InvalidPopulation(_) => "invalid-population",
        Error::BudgetExceeded { .. } => "budget-exceeded",
        Error::AllDegenerate { .. } => "all-degenerate",
        Error::Io(_) => "io",
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    exit_code: i32,
}

fn report_error(stderr: &mut dyn Write, kind: &str, message: String, code: i32) -> i32 {
    let body = ErrorReport {
        error: ErrorBody {
            kind,
            message,
            exit_code: code,
        },
    };
    let text = serde_json::to_string(&body).unwrap_or_else(|_| "{\"error\":{}}".into());
    let _ = writeln!(stderr, "{text}");
    code
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            return report_error(stderr, "usage", e.to_string().trim_end().to_string(), EXIT_DATA);
        }
    };
    let result = config_from(cli).and_then(|config| {
        let text = execute(&config)?;
        match config.out() {
            Some(path) => io::write_atomic(path, &text),
            None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(stderr, error_kind(&e), e.to_string(), exit_code(&e)),
    }
}

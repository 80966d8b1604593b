//! Command-line front end: `fit` runs one estimator on a CSV dataset with
//! optional bootstrap inference, `simulate` sweeps Monte Carlo designs over a
//! correlation grid, and `diagnose` reports collinearity and distribution
//! checks. All outputs are deterministic for a fixed seed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use betareg::{
    bootstrap_metrics, condition_number, correlation_scan, fit_estimator, ks_goodness_of_fit,
    load_csv, run_experiment, Cell, CvRule, Dataset, EstimatorSpec, Error, FitOptions, KsFamily,
    LassoPenalty, ReportTable, ResponseScale, RidgeSelector, SimDesign,
};

#[derive(Parser)]
#[command(name = "betareg", version, about = "Beta regression with ridge and lasso shrinkage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one estimator to a CSV dataset.
    Fit(FitArgs),
    /// Run Monte Carlo estimator comparisons over a correlation grid.
    Simulate(SimulateArgs),
    /// Collinearity and distribution diagnostics for a CSV dataset.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Response column name.
    #[arg(long)]
    response: String,
    /// Comma-separated predictor column names.
    #[arg(long, value_delimiter = ',')]
    predictors: Vec<String>,
    /// Response scaling: none | percent (divide by 100).
    #[arg(long, default_value = "none")]
    scale: String,
    /// Estimator: ml | ridge | lasso.
    #[arg(long, default_value = "ml")]
    method: String,
    /// Ridge penalty: hk | med | max | min | a fixed nonnegative number.
    #[arg(long, default_value = "med")]
    ridge_k: String,
    /// Lasso penalty: cv | a fixed nonnegative number.
    #[arg(long, default_value = "cv")]
    lasso_k: String,
    /// Cross-validation rule when --lasso-k cv: fold-sd | 1se | min.
    #[arg(long, default_value = "fold-sd")]
    cv_rule: String,
    /// Bootstrap resamples for t-values (0 disables the bootstrap).
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p_slopes: usize,
    /// Trailing slopes fixed at zero in the generating model.
    #[arg(long, default_value_t = 0)]
    zero_tail: usize,
    #[arg(long)]
    phi: f64,
    /// Comma-separated equicorrelation levels.
    #[arg(long, value_delimiter = ',')]
    rho_grid: Vec<f64>,
    #[arg(long)]
    reps: usize,
    /// Comma-separated estimators: ml, ridge_hk, ridge_med, ridge_max,
    /// ridge_min, lasso_cv.
    #[arg(long, value_delimiter = ',')]
    estimators: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long, value_delimiter = ',')]
    predictors: Vec<String>,
    /// Response scaling: none | percent (divide by 100).
    #[arg(long, default_value = "none")]
    scale: String,
    #[arg(long)]
    out: PathBuf,
}

/// Process failure categories mapped to exit codes.
enum Failure {
    /// Bad flags or bad input data (exit 2).
    Validation(String),
    /// A fit did not converge or an iterative procedure gave up (exit 3).
    Convergence(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Validation(_) => ExitCode::from(2),
            Failure::Convergence(_) => ExitCode::from(3),
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Convergence(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AllFoldsSkipped(_) | Error::RedrawCapExceeded { .. } | Error::DegenerateFit(_) => {
                Failure::Convergence(e.to_string())
            }
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Diagnose(args) => run_diagnose(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn parse_scale(scale: &str) -> Result<ResponseScale, Failure> {
    match scale {
        "none" => Ok(ResponseScale::None),
        "percent" => Ok(ResponseScale::Percent),
        other => Err(Failure::Validation(format!(
            "unknown scale '{other}' (expected none|percent)"
        ))),
    }
}

fn parse_cv_rule(rule: &str) -> Result<CvRule, Failure> {
    match rule {
        "fold-sd" => Ok(CvRule::WithinFoldSd),
        "1se" => Ok(CvRule::OneStdErr),
        "min" => Ok(CvRule::Min),
        other => Err(Failure::Validation(format!(
            "unknown cv rule '{other}' (expected fold-sd|1se|min)"
        ))),
    }
}

fn parse_ridge_selector(token: &str) -> Result<RidgeSelector, Failure> {
    match token {
        "hk" => Ok(RidgeSelector::Hk),
        "med" => Ok(RidgeSelector::Med),
        "max" => Ok(RidgeSelector::Max),
        "min" => Ok(RidgeSelector::Min),
        other => match other.parse::<f64>() {
            Ok(k) if k >= 0.0 && k.is_finite() => Ok(RidgeSelector::Fixed(k)),
            _ => Err(Failure::Validation(format!(
                "ridge penalty '{other}' is neither a named selector nor a nonnegative number"
            ))),
        },
    }
}

fn parse_estimator(token: &str) -> Result<EstimatorSpec, Failure> {
    match token {
        "ml" => Ok(EstimatorSpec::Ml),
        "lasso_cv" => Ok(EstimatorSpec::Lasso(LassoPenalty::Cv)),
        other => match other.strip_prefix("ridge_") {
            Some(sel) => Ok(EstimatorSpec::Ridge(parse_ridge_selector(sel)?)),
            None => Err(Failure::Validation(format!("unknown estimator '{other}'"))),
        },
    }
}

fn manifest_text(command: &str, entries: &[(&str, String)]) -> String {
    let mut out = String::new();
    out.push_str(&format!("command = {command}\n"));
    out.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    for (key, value) in entries {
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}

fn write_manifest(dir: &Path, text: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Validation(e.to_string()))?;
    std::fs::write(dir.join("run_manifest.txt"), text)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    Ok(())
}

fn load_dataset(
    input: &Path,
    response: &str,
    predictors: &[String],
    scale: ResponseScale,
) -> Result<Dataset, Failure> {
    if predictors.is_empty() {
        return Err(Failure::Validation("no predictor columns given".into()));
    }
    let (ds, summary) = load_csv(input, response, predictors, scale)?;
    eprintln!(
        "loaded {} rows, {} predictors, response '{}' (scale {})",
        summary.rows,
        summary.predictors.len(),
        summary.response,
        summary.scale.label()
    );
    Ok(ds)
}

fn run_fit(args: FitArgs) -> Result<(), Failure> {
    let scale = parse_scale(&args.scale)?;
    let ds = load_dataset(&args.input, &args.response, &args.predictors, scale)?;

    let mut opts = FitOptions::default();
    opts.lasso.cv_rule = parse_cv_rule(&args.cv_rule)?;
    let spec = match args.method.as_str() {
        "ml" => EstimatorSpec::Ml,
        "ridge" => EstimatorSpec::Ridge(parse_ridge_selector(&args.ridge_k)?),
        "lasso" => match args.lasso_k.as_str() {
            "cv" => EstimatorSpec::Lasso(LassoPenalty::Cv),
            token => match token.parse::<f64>() {
                Ok(k) if k >= 0.0 && k.is_finite() => {
                    EstimatorSpec::Lasso(LassoPenalty::Fixed(k))
                }
                _ => {
                    return Err(Failure::Validation(format!(
                        "lasso penalty '{token}' is neither 'cv' nor a nonnegative number"
                    )))
                }
            },
        },
        other => {
            return Err(Failure::Validation(format!(
                "unknown method '{other}' (expected ml|ridge|lasso)"
            )))
        }
    };

    let fit = fit_estimator(&ds, &spec, &opts)?;

    // bootstrap runs with the penalty resolved on the full sample, so every
    // resample refits at the same k the reported estimates used
    let resolved = match &spec {
        EstimatorSpec::Ml => EstimatorSpec::Ml,
        EstimatorSpec::Ridge(_) => EstimatorSpec::Ridge(RidgeSelector::Fixed(fit.penalty_k)),
        EstimatorSpec::Lasso(_) => EstimatorSpec::Lasso(LassoPenalty::Fixed(fit.penalty_k)),
    };
    let boot = if args.bootstrap > 0 {
        Some(bootstrap_metrics(&ds, &resolved, args.bootstrap, args.seed, &opts)?)
    } else {
        None
    };

    let mut columns = vec!["term".to_string(), "estimate".to_string()];
    if boot.is_some() {
        columns.push("t_value".to_string());
        columns.push("bootstrap_sd".to_string());
    }
    let mut estimates = ReportTable::new("estimates", columns);
    for (j, name) in ds.predictor_names().iter().enumerate() {
        let value = fit.coef.beta[j];
        let mut row = vec![
            Cell::Text(name.clone()),
            if value == 0.0 { Cell::ExactZero } else { Cell::Number(value) },
        ];
        if let Some(b) = &boot {
            if b.sd[j] == 0.0 {
                row.push(Cell::Text("inf".into()));
            } else {
                row.push(Cell::Number(b.t_values[j]));
            }
            row.push(Cell::Number(b.sd[j]));
        }
        estimates.push_row(row);
    }
    if boot.is_some() {
        estimates.add_footnote("t-values are estimate / bootstrap sd (pairs bootstrap).");
    }

    let mut summary = ReportTable::new("fit_summary", vec!["quantity".into(), "value".into()]);
    let mut push = |k: &str, v: Cell| {
        summary.push_row(vec![Cell::Text(k.into()), v]);
    };
    push("method", Cell::Text(fit.method.to_string()));
    push("penalty_k", Cell::Number(fit.penalty_k));
    push("phi", Cell::Number(fit.coef.phi));
    push("iterations", Cell::Count(fit.iterations));
    push("converged", Cell::Text(fit.converged.to_string()));
    push("degenerate", Cell::Text(fit.degenerate.to_string()));
    push("loglik", Cell::Number(fit.loglik));
    if let Some(b) = &boot {
        push("bootstrap_tmse", Cell::Number(b.tmse));
        push("bootstrap_resamples", Cell::Count(b.resamples));
        push("bootstrap_redraws", Cell::Count(b.redraws));
    }

    betareg::emit_report(&[estimates, summary], &args.out)?;
    let manifest = manifest_text(
        "fit",
        &[
            ("input", args.input.display().to_string()),
            ("response", args.response.clone()),
            ("predictors", args.predictors.join(",")),
            ("scale", scale.label().to_string()),
            ("method", args.method.clone()),
            ("ridge_k", args.ridge_k.clone()),
            ("lasso_k", args.lasso_k.clone()),
            ("cv_rule", args.cv_rule.clone()),
            ("resolved_penalty_k", format!("{}", fit.penalty_k)),
            ("bootstrap", args.bootstrap.to_string()),
            ("seed", args.seed.to_string()),
        ],
    );
    write_manifest(&args.out, &manifest)?;

    if !fit.converged {
        return Err(Failure::Convergence(format!(
            "{} fit did not converge in {} iterations",
            fit.method, fit.iterations
        )));
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), Failure> {
    if args.rho_grid.is_empty() {
        return Err(Failure::Validation("empty --rho-grid".into()));
    }
    let estimators: Vec<EstimatorSpec> = args
        .estimators
        .iter()
        .map(|t| parse_estimator(t))
        .collect::<Result<_, _>>()?;
    if estimators.is_empty() {
        return Err(Failure::Validation("no estimators requested".into()));
    }

    let mut table = ReportTable::new(
        "simulation",
        vec![
            "n".into(),
            "p_slopes".into(),
            "zero_tail".into(),
            "phi".into(),
            "rho".into(),
            "reps".into(),
            "seed".into(),
            "estimator".into(),
            "coef_index".into(),
            "mse".into(),
            "tmse".into(),
            "selection_all_zero".into(),
            "selection_any_zero".into(),
            "failures".into(),
        ],
    );
    let mut plot_rows: Vec<(f64, String, f64)> = Vec::new();

    for &rho in &args.rho_grid {
        let design = SimDesign {
            n: args.n,
            p_slopes: args.p_slopes,
            zero_tail: args.zero_tail,
            phi: args.phi,
            rho,
            n_reps: args.reps,
            seed: args.seed,
            estimators: estimators.clone(),
            options: FitOptions::default(),
        };
        let result = run_experiment(&design)?;
        for est in &result.estimators {
            plot_rows.push((rho, est.label.clone(), est.tmse));
            for (j, mse) in est.mse_per_coef.iter().enumerate() {
                table.push_row(vec![
                    Cell::Count(args.n),
                    Cell::Count(args.p_slopes),
                    Cell::Count(args.zero_tail),
                    Cell::Number(args.phi),
                    Cell::Number(rho),
                    Cell::Count(args.reps),
                    Cell::Count(args.seed as usize),
                    Cell::Text(est.label.clone()),
                    Cell::Count(j),
                    Cell::Number(*mse),
                    Cell::Number(est.tmse),
                    match est.all_zero_rate {
                        Some(r) => Cell::Number(r),
                        None => Cell::Text(String::new()),
                    },
                    match est.any_zero_rate {
                        Some(r) => Cell::Number(r),
                        None => Cell::Text(String::new()),
                    },
                    Cell::Count(est.failures),
                ]);
            }
        }
    }

    betareg::emit_report(&[table], &args.out)?;
    betareg::write_plot_data(&args.out, &plot_rows)?;
    let manifest = manifest_text(
        "simulate",
        &[
            ("n", args.n.to_string()),
            ("p_slopes", args.p_slopes.to_string()),
            ("zero_tail", args.zero_tail.to_string()),
            ("phi", format!("{}", args.phi)),
            (
                "rho_grid",
                args.rho_grid
                    .iter()
                    .map(|r| format!("{r}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("reps", args.reps.to_string()),
            ("estimators", args.estimators.join(",")),
            ("seed", args.seed.to_string()),
        ],
    );
    write_manifest(&args.out, &manifest)
}

fn run_diagnose(args: DiagnoseArgs) -> Result<(), Failure> {
    let scale = parse_scale(&args.scale)?;
    let ds = load_dataset(&args.input, &args.response, &args.predictors, scale)?;

    let h = condition_number(&ds);
    let scan = correlation_scan(&ds)?;

    let mut condition = ReportTable::new("condition", vec!["quantity".into(), "value".into()]);
    condition.push_row(vec![
        Cell::Text("condition_number".into()),
        if h.is_finite() { Cell::Number(h) } else { Cell::Text("inf".into()) },
    ]);
    let (a, b, r) = scan.extreme_pair;
    condition.push_row(vec![
        Cell::Text("largest_correlation_pair".into()),
        Cell::Text(format!("{}~{}", scan.names[a], scan.names[b])),
    ]);
    condition.push_row(vec![
        Cell::Text("largest_correlation".into()),
        Cell::Number(r),
    ]);

    let mut corr = ReportTable::new(
        "correlations",
        std::iter::once("predictor".to_string())
            .chain(scan.names.iter().cloned())
            .collect(),
    );
    for (i, name) in scan.names.iter().enumerate() {
        let mut row = vec![Cell::Text(name.clone())];
        for j in 0..scan.names.len() {
            row.push(Cell::Number(scan.matrix.get(i, j)));
        }
        corr.push_row(row);
    }

    let mut ks = ReportTable::new(
        "ks_tests",
        vec![
            "family".into(),
            "statistic".into(),
            "p_value".into(),
            "param1".into(),
            "param2".into(),
        ],
    );
    for (family, label) in [(KsFamily::Normal, "normal"), (KsFamily::Beta, "beta")] {
        let test = ks_goodness_of_fit(ds.response(), family)?;
        ks.push_row(vec![
            Cell::Text(label.into()),
            Cell::Number(test.statistic),
            Cell::Number(test.p_value),
            Cell::Number(test.params.0),
            Cell::Number(test.params.1),
        ]);
    }
    ks.add_footnote(
        "p-values are approximate: asymptotic Kolmogorov distribution with estimated parameters.",
    );

    betareg::emit_report(&[condition, corr, ks], &args.out)?;
    let manifest = manifest_text(
        "diagnose",
        &[
            ("input", args.input.display().to_string()),
            ("response", args.response.clone()),
            ("predictors", args.predictors.join(",")),
            ("scale", scale.label().to_string()),
        ],
    );
    write_manifest(&args.out, &manifest)
}

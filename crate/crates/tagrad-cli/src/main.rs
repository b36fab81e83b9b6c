//! `tagrad`: command line front end for the optimizer benchmark harness.
//!
//! Subcommands:
//!   run      execute a campaign from a TOML config and write CSV/JSON artifacts
//!   oracle   integrate the scalar energy flows and compare against closed forms
//!   dataset  emit or import the sine-product regression dataset CSV
//!   check    fast invariant suite over the library's core contracts
//!
//! Exit codes: 0 on success, 1 on a runtime failure (a method that diverged
//! on every seed, an oracle sweep over budget, a failed check, an io error
//! while writing artifacts), 2 on bad input (config parse or validation
//! errors, malformed dataset files, bad flags).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tagrad::eval::{evaluate, GradEval, Objective};
use tagrad::harness::report::label_slug;
use tagrad::harness::{
    curve_to_csv, emit_campaign, run_campaign, ConfigError, ExperimentConfig, ReportError,
};
use tagrad::integrator::{Method, OptConfig, Outcome};
use tagrad::objectives::{gen_dataset, Dataset, DatasetError, MlpSine, TwoWell};
use tagrad::rate::{omega_fta, omega_ta, sigmoid};
use tagrad::scalar::{
    classify_attractor, fta_flow_time, integrate_scalar_flow, ta_flow_time, AttractorClass,
    OmegaForm, ScalarError, ScalarFlowSpec,
};
use tagrad::vector::ParamVector;
use tagrad::LrRule;

/// Environment variable consulted for the artifact directory when no
/// `--out-dir` flag is given. The config file's `out_dir` ranks below both.
const OUT_DIR_ENV: &str = "TAGRAD_OUT_DIR";

#[derive(Parser)]
#[command(name = "tagrad", version, about = "Benchmark harness for terminal-attractor learning-rate rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark campaign from a TOML config and write its artifacts.
    Run(RunArgs),
    /// Integrate scalar energy flows and check reach times against the closed forms.
    Oracle(OracleArgs),
    /// Emit or import the regression dataset CSV.
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
    /// Run the fast invariant suite and report one line per check.
    Check,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Artifact directory. Overrides TAGRAD_OUT_DIR and the config's out_dir.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Run seeds 0..N. Overrides the config (config default: 20).
    #[arg(long, value_name = "N")]
    seeds: Option<u32>,
    /// Iteration cap per run. Overrides the config.
    #[arg(long, value_name = "N")]
    max_iters: Option<u32>,
    /// Energy threshold that counts as converged. Overrides the config.
    #[arg(long, value_name = "E")]
    stop_energy: Option<f64>,
    /// Step factor eta. Overrides the config.
    #[arg(long, value_name = "ETA")]
    eta: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    /// Starting energy for every flow.
    #[arg(long, default_value_t = 1.0)]
    e0: f64,
    /// Relative reach-time error budget; exceeding it is a failure.
    #[arg(long, default_value_t = 1e-2)]
    budget: f64,
    /// Write one t,E curve CSV per grid point into this directory.
    /// TAGRAD_OUT_DIR applies when the flag is absent; with neither set the
    /// sweep prints its table only.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DatasetAction {
    /// Generate the dataset and write it as CSV ("-" for stdout).
    Emit {
        #[arg(long, value_name = "FILE", default_value = "-")]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Parse a dataset CSV and print its summary statistics.
    Import {
        #[arg(value_name = "FILE")]
        file: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Dataset(#[from] DatasetError),
    #[error("{0}")]
    Report(#[from] ReportError),
    #[error("{0}")]
    Scalar(#[from] ScalarError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// Runtime failure with a clean message; maps to exit code 1.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Dataset(_) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Dataset { action } => cmd_dataset(action),
        Command::Check => cmd_check(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

/// Flag beats environment beats config file beats the built-in default.
fn resolve_out_dir(flag: Option<PathBuf>, from_config: Option<&Path>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| from_config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("tagrad-out"))
}

fn median_u32(mut xs: Vec<u32>) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] as f64 + xs[n / 2] as f64) / 2.0
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    if let Some(n) = args.seeds {
        config.n_seeds = n;
    }
    if let Some(n) = args.max_iters {
        config.max_iters = n;
    }
    if let Some(e) = args.stop_energy {
        config.stop_energy = e;
    }
    if let Some(eta) = args.eta {
        config.eta = eta;
    }

    let methods = config.validate()?;
    let objective = config.build_objective()?;
    let result = run_campaign(&*objective, &methods, &config.opt_config(), config.n_seeds);

    let n = config.n_seeds;
    for method in &result.methods {
        let mut converged = 0;
        let mut capped = 0;
        let mut diverged = 0;
        let mut iters = Vec::new();
        for record in &method.records {
            match record.outcome {
                Outcome::Converged(iter) => {
                    converged += 1;
                    iters.push(iter);
                }
                Outcome::MaxIters => capped += 1,
                Outcome::Diverged(_) => diverged += 1,
            }
        }
        let median = if iters.is_empty() {
            "-".to_string()
        } else {
            format!("{}", median_u32(iters))
        };
        println!(
            "{}: converged {converged}/{n}, max-iters {capped}/{n}, diverged {diverged}/{n}, median converge iter {median}",
            method.label
        );
    }

    let dir = resolve_out_dir(args.out_dir, config.out_dir.as_deref());
    let written = emit_campaign(&dir, &result)?;
    println!("wrote {} files to {}", written.len(), dir.display());

    if result.any_method_all_diverged() {
        return Err(CliError::Failed(
            "at least one method diverged on every seed".into(),
        ));
    }
    Ok(())
}

fn class_name(class: AttractorClass) -> &'static str {
    match class {
        AttractorClass::Terminal => "terminal",
        AttractorClass::Marginal => "marginal",
        AttractorClass::Asymptotic => "asymptotic",
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    if !(args.e0.is_finite() && args.e0 > 0.0) {
        return Err(CliError::Failed(format!("e0 must be positive, got {}", args.e0)));
    }
    let curve_dir = args
        .out_dir
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = &curve_dir {
        std::fs::create_dir_all(dir)?;
    }

    // The validation grid: three decay exponents crossed with three rate
    // scales for the power-law form, plus two linear-term strengths for the
    // combined form. Reach time is to the integrator's default 1e-12 level
    // and the closed forms are evaluated as transit times down to the same
    // level, so the comparison is tolerance-consistent at every q/p.
    let mut sweeps: Vec<(String, OmegaForm)> = Vec::new();
    for (p, q) in [(3.0, 1.0), (100.0, 65.0), (10.0, 9.0)] {
        for beta in [0.1, 1.0, 10.0] {
            sweeps.push((
                format!("ta(beta={beta},q/p={:.2})", q / p),
                OmegaForm::Ta { beta, p, q },
            ));
            for alpha in [0.1, 1.0] {
                sweeps.push((
                    format!("fta(alpha={alpha},beta={beta},q/p={:.2})", q / p),
                    OmegaForm::Fta { alpha, beta, p, q },
                ));
            }
        }
    }

    const TOL: f64 = 1e-12;
    let mut worst: f64 = 0.0;
    for (label, form) in &sweeps {
        let (outcome, curve) = integrate_scalar_flow(&ScalarFlowSpec::new(*form, args.e0))?;
        let reach = outcome.reach_time().ok_or_else(|| {
            CliError::Failed(format!("{label}: flow failed to reach {TOL:.0e}"))
        })?;
        let predicted = match *form {
            OmegaForm::Ta { beta, p, q } => ta_flow_time(args.e0, TOL, beta, p, q)?,
            OmegaForm::Fta { alpha, beta, p, q } => {
                fta_flow_time(args.e0, TOL, alpha, beta, p, q)?
            }
        };
        let rel = (reach - predicted).abs() / predicted;
        worst = worst.max(rel);
        println!(
            "{label:<34} class {:<10} reach {reach:<12.6} predicted {predicted:<12.6} rel err {rel:.2e}",
            class_name(classify_attractor(form))
        );
        if let Some(dir) = &curve_dir {
            curve.write_csv_path(&dir.join(format!("{}.csv", label_slug(label))))?;
        }
    }

    println!(
        "worst relative reach-time error {worst:.2e} (budget {:.0e})",
        args.budget
    );
    if let Some(dir) = &curve_dir {
        println!("wrote {} curve files to {}", sweeps.len(), dir.display());
    }
    if worst > args.budget {
        return Err(CliError::Failed(format!(
            "reach-time error {worst:.2e} exceeds budget {:.0e}",
            args.budget
        )));
    }
    Ok(())
}

fn cmd_dataset(action: DatasetAction) -> Result<(), CliError> {
    match action {
        DatasetAction::Emit { out, samples, seed } => {
            let data = gen_dataset(samples, seed);
            if out.as_os_str() == "-" {
                print!("{}", data.to_csv_string());
            } else {
                data.write_csv_path(&out)?;
                println!("wrote {} samples to {}", data.len(), out.display());
            }
            Ok(())
        }
        DatasetAction::Import { file } => {
            let data = Dataset::read_csv_path(&file)?;
            let text = std::fs::read_to_string(&file)?;
            // Canonical means byte-identical to what emit would write for
            // these rows; re-imports of our own artifacts always are.
            let canonical = text == data.to_csv_string();
            println!(
                "{}: {} samples, mean squared target {:.6}, canonical: {}",
                file.display(),
                data.len(),
                data.mean_sq_target(),
                if canonical { "yes" } else { "no" }
            );
            Ok(())
        }
    }
}

/// Central finite-difference gradient; duplicated from the test oracles so
/// the field check stays independent of the analytic derivatives.
fn fd_gradient(objective: &dyn Objective, w: &ParamVector, h: f64) -> ParamVector {
    let base = w.as_slice();
    let mut out = Vec::with_capacity(w.dim());
    for i in 0..w.dim() {
        let mut plus = base.to_vec();
        let mut minus = base.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let ep = objective.eval(&ParamVector::new(plus)).unwrap().energy;
        let em = objective.eval(&ParamVector::new(minus)).unwrap().energy;
        out.push((ep - em) / (2.0 * h));
    }
    ParamVector::new(out)
}

fn cmd_check() -> Result<(), CliError> {
    let mut failures = 0u32;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!(
            "check {name:<28} {} ({detail})",
            if pass { "ok" } else { "FAILED" }
        );
        if !pass {
            failures += 1;
        }
    };

    // Decay rates factor through the closed energy forms when the clamp is
    // out of the way.
    {
        let ta = LrRule::ta(0.5, 3.0, 1.0).with_gamma_max(f64::INFINITY);
        let fta = LrRule::fta(0.4, 0.5, 3.0, 1.0).with_gamma_max(f64::INFINITY);
        let mut worst: f64 = 0.0;
        for ke in (-12..=4).step_by(4) {
            for kg in (-8..=8).step_by(4) {
                let e = 10f64.powi(ke);
                let g = GradEval::new(e, ParamVector::new(vec![10f64.powi(kg)])).unwrap();
                let want_ta = omega_ta(e, 0.5, 3.0, 1.0).unwrap();
                let got_ta = ta.rate(&g).gamma * g.grad_norm * g.grad_norm;
                let want_fta = omega_fta(e, 0.4, 0.5, 3.0, 1.0).unwrap();
                let got_fta = fta.rate(&g).gamma * g.grad_norm * g.grad_norm;
                worst = worst
                    .max((got_ta - want_ta).abs() / want_ta)
                    .max((got_fta - want_fta).abs() / want_fta);
            }
        }
        check("rate-closed-forms", worst <= 1e-12, format!("worst rel err {worst:.1e}"));
    }

    // Placid rules keep the step factor at or below the energy form no
    // matter how small the gradient is.
    {
        let pta = LrRule::pta(0.09, 10.0, 7.0);
        let pfta = LrRule::pfta(0.03, 0.1, 100.0, 65.0);
        let mut worst: f64 = f64::NEG_INFINITY;
        for ke in -20..=4 {
            for kg in (-300..=300).step_by(20) {
                let e = 10f64.powi(ke);
                let g = GradEval::new(e, ParamVector::new(vec![10f64.powi(kg)])).unwrap();
                let slack_pta = pta.rate(&g).gamma * g.grad_norm - omega_ta(e, 0.09, 10.0, 7.0).unwrap();
                let slack_pfta =
                    pfta.rate(&g).gamma * g.grad_norm - omega_fta(e, 0.03, 0.1, 100.0, 65.0).unwrap();
                worst = worst.max(slack_pta).max(slack_pfta);
            }
        }
        check("placid-bound", worst <= 1e-12, format!("worst slack {worst:.1e}"));
    }

    // Sigmoid saturates exactly at the extremes and is centered at 1/2.
    check(
        "sigmoid-saturation",
        sigmoid(50.0) == 1.0 && sigmoid(-50.0) == 0.0 && sigmoid(0.0) == 0.5,
        format!("delta(50)={}, delta(-50)={}, delta(0)={}", sigmoid(50.0), sigmoid(-50.0), sigmoid(0.0)),
    );

    // The three decay classes fall out of the exponent ratio.
    {
        let t = classify_attractor(&OmegaForm::Ta { beta: 1.0, p: 3.0, q: 1.0 });
        let m = classify_attractor(&OmegaForm::Ta { beta: 1.0, p: 3.0, q: 3.0 });
        let a = classify_attractor(&OmegaForm::Fta { alpha: 1.0, beta: 1.0, p: 3.0, q: 5.0 });
        check(
            "attractor-classes",
            t == AttractorClass::Terminal && m == AttractorClass::Marginal && a == AttractorClass::Asymptotic,
            format!("{}/{}/{}", class_name(t), class_name(m), class_name(a)),
        );
    }

    // Reach times match the closed forms on a one-row slice of the grid.
    {
        let mut worst: f64 = 0.0;
        for beta in [0.1, 1.0, 10.0] {
            let form = OmegaForm::Ta { beta, p: 3.0, q: 1.0 };
            let (outcome, _) = integrate_scalar_flow(&ScalarFlowSpec::new(form, 1.0))?;
            let reach = outcome.reach_time().unwrap();
            let predicted = ta_flow_time(1.0, 1e-12, beta, 3.0, 1.0)?;
            worst = worst.max((reach - predicted).abs() / predicted);

            let form = OmegaForm::Fta { alpha: 1.0, beta, p: 3.0, q: 1.0 };
            let (outcome, _) = integrate_scalar_flow(&ScalarFlowSpec::new(form, 1.0))?;
            let reach = outcome.reach_time().unwrap();
            let predicted = fta_flow_time(1.0, 1e-12, 1.0, beta, 3.0, 1.0)?;
            worst = worst.max((reach - predicted).abs() / predicted);
        }
        check("reach-times", worst <= 1e-2, format!("worst rel err {worst:.1e}"));
    }

    // Dataset emit -> import -> emit is byte-identical.
    {
        let data = gen_dataset(100, 42);
        let csv = data.to_csv_string();
        let pass = match Dataset::from_csv_str(&csv) {
            Ok(back) => back.to_csv_string() == csv,
            Err(_) => false,
        };
        check("dataset-round-trip", pass, format!("{} samples", data.len()));
    }

    // Analytic network gradient agrees with central finite differences.
    {
        let objective = MlpSine::with_defaults();
        let mut worst: f64 = 0.0;
        for seed in 0..3 {
            let w = objective.initial_point(seed);
            let exact = evaluate(&objective, &w).unwrap().gradient;
            let approx = fd_gradient(&objective, &w, 1e-5);
            worst = worst.max(approx.distance(&exact) / exact.norm().max(1e-12));
        }
        check("network-gradient", worst <= 1e-6, format!("worst rel err {worst:.1e}"));
    }

    // Same config, same seeds, same bytes.
    {
        let objective = TwoWell::new();
        let methods = vec![(
            "pta".to_string(),
            Method::Rule(LrRule::pta(0.9, 10.0, 7.0)),
        )];
        let config = OptConfig::new(0.5, 60, 1e-10);
        let a = run_campaign(&objective, &methods, &config, 3);
        let b = run_campaign(&objective, &methods, &config, 3);
        let pass = curve_to_csv(&a.methods[0].curve) == curve_to_csv(&b.methods[0].curve)
            && a.methods[0]
                .records
                .iter()
                .zip(b.methods[0].records.iter())
                .all(|(x, y)| x.dynamics_eq(y));
        check("campaign-determinism", pass, "3 seeds, 60 iters".to_string());
    }

    if failures > 0 {
        Err(CliError::Failed(format!("{failures} check(s) failed")))
    } else {
        println!("all checks passed");
        Ok(())
    }
}

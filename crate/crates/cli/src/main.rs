use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mlccp::error::ErrorKind;
use mlccp::experiment::{run_experiment, DataSource, ExperimentConfig, FoldRule, ReportFormat};
use mlccp::prediction::{forced, prediction_set};
use mlccp::{CcpModel, RbfConfig};
use serde_json::json;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] mlccp::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => 1,
                ErrorKind::Data => 2,
                ErrorKind::Numeric => 3,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "mlccp", version, args_override_self = true, about = "Multi-label cross-conformal prediction with an ML-RBF underlying model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on one dataset, evaluate on another and write reports
    Run(RunArgs),
    /// Print the forced prediction (and optionally a prediction set) for one instance
    Predict(PredictArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Mulan,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Training data (ARFF for mulan, feature CSV for csv)
    #[arg(long)]
    train: PathBuf,
    /// Test data (ARFF for mulan, feature CSV for csv)
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum, default_value = "mulan")]
    format: Format,
    /// Mulan label definition file
    #[arg(long)]
    labels_xml: Option<PathBuf>,
    /// Training label CSV (csv format)
    #[arg(long)]
    train_labels: Option<PathBuf>,
    /// Test label CSV (csv format)
    #[arg(long)]
    test_labels: Option<PathBuf>,
    /// Number of folds, or "auto" for about 100 training instances per fold
    #[arg(long, default_value = "auto", value_parser = parse_folds)]
    folds: FoldRule,
    #[arg(long, default_value_t = 4.0)]
    d: f64,
    /// Co-occurrence penalty; a comma-separated list evaluates each value
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    lambda: Vec<f64>,
    /// Fraction of positive instances per label used as cluster centers
    #[arg(long, default_value_t = 0.01)]
    fraction: f64,
    /// Multiplier on the mean pairwise center distance giving the RBF width
    #[arg(long, default_value_t = 1.0)]
    scaling: f64,
    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,
    #[arg(long, default_value_t = 100)]
    kmeans_iters: usize,
    /// Z-score features using training statistics
    #[arg(long)]
    standardize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.95,0.9,0.8")]
    confidence: Vec<f64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json,csv,text")]
    report: Vec<Report>,
    /// Skip writing per-lambda model files
    #[arg(long)]
    no_models: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct PredictArgs {
    /// Model file written by `run`
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated feature values
    #[arg(long, allow_hyphen_values = true)]
    instance: String,
    /// Significance level in (0, 1); also prints the prediction set
    #[arg(long, value_parser = parse_delta)]
    delta: Option<f64>,
    /// Maximum number of set members listed
    #[arg(long, default_value_t = 20)]
    max_members: usize,
}

fn parse_folds(s: &str) -> Result<FoldRule, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(FoldRule::Auto);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 2 => Ok(FoldRule::Fixed(k)),
        _ => Err(format!("expected \"auto\" or an integer >= 2, got {:?}", s)),
    }
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{}", e))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("delta must lie in (0, 1), got {}", v))
    }
}

fn source(data: &Path, format: Format, xml: Option<&PathBuf>, labels: Option<&PathBuf>, flag: &str) -> Result<DataSource, CliError> {
    match format {
        Format::Mulan => Ok(DataSource::Mulan {
            arff: data.to_path_buf(),
            xml: xml.ok_or_else(|| CliError::Config("--labels-xml is required for mulan format".into()))?.clone(),
        }),
        Format::Csv => Ok(DataSource::Csv {
            features: data.to_path_buf(),
            labels: labels.ok_or_else(|| CliError::Config(format!("{} is required for csv format", flag)))?.clone(),
        }),
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let train = source(&args.train, args.format, args.labels_xml.as_ref(), args.train_labels.as_ref(), "--train-labels")?;
    let test = source(&args.test, args.format, args.labels_xml.as_ref(), args.test_labels.as_ref(), "--test-labels")?;
    let mut config = ExperimentConfig::new(train, test);
    config.folds = args.folds;
    config.d = args.d;
    config.lambdas = args.lambda;
    config.rbf = RbfConfig {
        fraction: args.fraction,
        scaling: args.scaling,
        ridge: args.ridge,
        kmeans_iters: args.kmeans_iters,
        standardize: args.standardize,
        ..RbfConfig::default()
    };
    config.seed = args.seed;
    config.confidence_levels = args.confidence;
    config.formats = args
        .report
        .iter()
        .map(|r| match r {
            Report::Json => ReportFormat::Json,
            Report::Csv => ReportFormat::Csv,
            Report::Text => ReportFormat::Text,
        })
        .collect();
    config.save_models = !args.no_models;
    config.threads = args.threads;

    let report = run_experiment(&config, Some(&args.out))?;
    for run in &report.ccp {
        let m = &run.forced;
        println!(
            "CCP lambda={}: HL {:.4}  CA {:.4}  F-macro {:.4}  F-micro {:.4}",
            run.lambda, m.hamming_loss, m.accuracy, m.f_macro, m.f_micro
        );
        for c in &run.sets {
            println!("  {}% confidence: error rate {:.4}", c.confidence * 100.0, c.report.error_rate);
        }
    }
    let m = &report.native;
    println!(
        "ML-RBF: HL {:.4}  CA {:.4}  F-macro {:.4}  F-micro {:.4}",
        m.hamming_loss, m.accuracy, m.f_macro, m.f_micro
    );
    println!("reports written to {}", args.out.display());
    Ok(())
}

fn predict(args: PredictArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.model).map_err(|source| mlccp::Error::Io {
        path: args.model.clone(),
        source,
    })?;
    let model = CcpModel::from_json(&text)?;
    let x = args
        .instance
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("--instance: {}", e)))?;
    let table = model.p_values(&x)?;
    let names = model.label_names();
    let mut out = json!({ "forced": forced(&table).to_record(names) });
    if let Some(delta) = args.delta {
        out["set"] = serde_json::to_value(prediction_set(&table, delta)?.to_record(names, Some(args.max_members)))
            .expect("record serializes");
    }
    println!("{}", serde_json::to_string_pretty(&out).expect("record serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Predict(args) => predict(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}

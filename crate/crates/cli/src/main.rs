use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use clickbait_its::detector::{load_labeled_csv, train_logistic, TrainParams};
use clickbait_its::its::load_events;
use clickbait_its::report::{
    cmd_aggregate, cmd_analyze, cmd_diagnose, cmd_ingest, cmd_report, cmd_score, fits_table_text,
    PipelineConfig,
};
use clickbait_its::{Detector, Error, ErrorKind, FeatureExtractor};

#[derive(Debug, Parser)]
#[command(name = "clickbait-its", version, about = "Clickbait scoring and interrupted time series analysis of crawled news pages")]
struct Cli {
    /// Pipeline configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// SQLite score store
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Events file: JSON array of {name, date}
    #[arg(long, global = true)]
    events: Option<PathBuf>,
    /// AR order of the GLS error model
    #[arg(long, global = true)]
    ar_order: Option<usize>,
    /// Family-wise significance level before Bonferroni correction
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Accepted for reproducible invocations; no stage currently draws random numbers
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports
    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,
    /// Detector model (JSON)
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse WARC files, filter and score the texts, append them to the store
    Ingest {
        #[arg(required = false)]
        warc: Vec<PathBuf>,
    },
    /// Re-score every stored row with the current model
    Score,
    /// Write the daily mean series
    Aggregate,
    /// ACF/PACF and ADF/KPSS tests of the daily series
    Diagnose,
    /// Fit one segmented GLS model per event
    Analyze,
    /// Summary table, histogram and fit plots
    Report,
    /// Train a detector from a labeled CSV with columns text,label
    Train {
        corpus: PathBuf,
        /// Where to write the model; defaults to --model or model.json
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        l2: Option<f64>,
    },
}

fn exit_code(kind: ErrorKind) -> ExitCode {
    match kind {
        ErrorKind::Usage => ExitCode::from(1),
        ErrorKind::Data => ExitCode::from(2),
        ErrorKind::Numerical => ExitCode::from(3),
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(store) = &cli.store {
        config.store_path = store.clone();
    }
    if let Some(events) = &cli.events {
        config.events = load_events(events)?;
    }
    if let Some(p) = cli.ar_order {
        config.ar_order = p;
    }
    if let Some(alpha) = cli.alpha {
        config.base_alpha = alpha;
    }
    if let Some(model) = &cli.model {
        config.model_path = Some(model.clone());
    }
    config.validate()?;
    Ok(config)
}

fn load_detector(config: &PipelineConfig) -> Result<Detector, Error> {
    match &config.model_path {
        Some(path) => Detector::load(path),
        None => Ok(Detector::default()),
    }
}

fn require_store(config: &PipelineConfig) -> Result<(), Error> {
    if config.store_path.exists() {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "store {} does not exist; run ingest first",
            config.store_path.display()
        )))
    }
}

fn written(out: &Path) {
    println!("reports written to {}", out.display());
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let config = load_config(cli)?;
    if let Some(seed) = cli.seed {
        info!("seed {seed}");
    }
    match &cli.command {
        Command::Ingest { warc } => {
            let detector = load_detector(&config)?;
            let report = cmd_ingest(warc, &config, &detector)?;
            print!("{}", report.to_text());
            if report.rows_stored == 0 {
                eprintln!("error: no rows were stored");
                return Ok(exit_code(ErrorKind::Data));
            }
        }
        Command::Score => {
            require_store(&config)?;
            let detector = load_detector(&config)?;
            println!("rows re-scored: {}", cmd_score(&config, &detector)?);
        }
        Command::Aggregate => {
            require_store(&config)?;
            let series = cmd_aggregate(&config, &cli.out)?;
            println!("days: {}", series.len());
            written(&cli.out);
        }
        Command::Diagnose => {
            require_store(&config)?;
            let report = cmd_diagnose(&config, &cli.out)?;
            print!("{}", report.stationarity_text());
            written(&cli.out);
        }
        Command::Analyze => {
            require_store(&config)?;
            let report = cmd_analyze(&config, &cli.out)?;
            print!("{}", fits_table_text(&report.fits, report.alpha));
            for skipped in &report.skipped {
                eprintln!("skipped {}: {}", skipped.name, skipped.reason);
            }
            written(&cli.out);
            if !report.unconverged.is_empty() {
                eprintln!(
                    "error: optimizer did not converge for: {}",
                    report.unconverged.join(", ")
                );
                return Ok(exit_code(ErrorKind::Numerical));
            }
        }
        Command::Report => {
            require_store(&config)?;
            let output = cmd_report(&config, &cli.out)?;
            print!("{}", output.summary);
            for missing in &output.missing {
                warn!("{missing}");
                eprintln!("not plotted: {missing}");
            }
            written(&cli.out);
        }
        Command::Train {
            corpus,
            output,
            learning_rate,
            iterations,
            l2,
        } => {
            let defaults = TrainParams::default();
            let params = TrainParams {
                learning_rate: learning_rate.unwrap_or(defaults.learning_rate),
                iterations: iterations.unwrap_or(defaults.iterations),
                l2: l2.unwrap_or(defaults.l2),
            };
            let corpus = load_labeled_csv(corpus)?;
            let extractor = FeatureExtractor::default();
            let trained = train_logistic(&extractor, &corpus, params)?;
            let detector = Detector::new(extractor, trained.weights)?;
            let correct = corpus
                .iter()
                .map(|(text, label)| Ok((detector.score_text(text)?.1.score_1 >= 0.5) == *label))
                .collect::<Result<Vec<bool>, Error>>()?
                .into_iter()
                .filter(|ok| *ok)
                .count();
            let path = output
                .clone()
                .or_else(|| config.model_path.clone())
                .unwrap_or_else(|| PathBuf::from("model.json"));
            detector.save(&path)?;
            println!(
                "trained on {} texts in {} iterations; final loss {:.6}; training accuracy {:.4}",
                corpus.len(),
                trained.iterations,
                trained.loss_history.last().copied().unwrap_or(f64::NAN),
                correct as f64 / corpus.len() as f64
            );
            println!("model written to {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}

//! Command-line front end: prepare, tune, train, evaluate and report.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 when every search trial failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mhtext::corpus::{write_csv, SchemeKind};
use mhtext::harness::{
    emit_distribution, emit_report, preset_variants, prepare, run_search, summarize, train_single, CorpusSource, ExperimentConfig, Features, ModelBundle,
    ModelFamily, ParamSet, ReportFormat, SearchResult, SearchStatus, SplitName, SyntheticSpec,
};
use mhtext::metrics::roc_to_csv;
use mhtext::Error;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "mhtext", version, about = "Mental-health text classification experiments")]
struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = "MHTEXT_OUTPUT_ROOT", default_value = ".")]
    output_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean, label and split a corpus; writes an experiment config, the
    /// split manifest and the class distribution.
    Prepare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = ["binary", "multiclass"])]
        scheme: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Preserve class proportions in every split.
        #[arg(long)]
        stratified: bool,
        /// Comma-separated multiclass label order.
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<String>>,
    },
    /// Write a synthetic two-class corpus as CSV.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        n_docs: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Search a model family's hyperparameters by validation weighted F1.
    Tune {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = family_parser)]
        model: ModelFamily,
        /// Output directory (default: `<output root>/<model>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Config override, `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Train one configuration and evaluate it on the test split.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = family_parser)]
        model: ModelFamily,
        /// Parameter object, or a search result whose best parameters to use.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        params: Option<PathBuf>,
        /// Use a published preset (`table`, or `balanced` for binary logistic).
        #[arg(long, num_args = 0..=1, default_missing_value = "table")]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Evaluate a saved model bundle on one split of its corpus.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "test", value_parser = ["train", "validation", "test"])]
        split: String,
        /// Also write `evaluation_<split>.json` (and ROC CSV) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a search result as JSON, CSV or SVG.
    Report {
        #[arg(long)]
        result: PathBuf,
        #[arg(long, value_parser = ["json", "csv", "svg"])]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn family_parser(s: &str) -> Result<ModelFamily, String> {
    ModelFamily::parse(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Data(String),
    AllTrialsFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::InvalidSearchSpace(_) => Failure::Usage(e.to_string()),
            Error::AllTrialsFailed(_) => Failure::AllTrialsFailed(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::AllTrialsFailed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e).into())
}

fn write(path: &Path, contents: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_config(path: &Path, overrides: &[String]) -> CliResult<ExperimentConfig> {
    let mut config = ExperimentConfig::from_json(&read(path)?)?;
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| Failure::Usage(format!("override `{o}` is not KEY=VALUE")))?;
        config.apply_override(k.trim(), v.trim())?;
    }
    Ok(config)
}

fn run(cli: Cli) -> CliResult {
    let root = cli.output_root;
    let under_root = |p: &Path| root.join(p);
    match cli.command {
        Command::Prepare {
            input,
            scheme,
            seed,
            out,
            stratified,
            classes,
        } => {
            let scheme = if scheme == "binary" { SchemeKind::Binary } else { SchemeKind::Multiclass };
            let input = fs::canonicalize(&input).map_err(|e| Error::io(&input, e))?;
            let mut config = ExperimentConfig::new(CorpusSource::Csv(input), scheme, seed);
            config.stratified = stratified;
            config.classes = classes;
            config.validate()?;
            let corpus = prepare(&config)?;
            let dir = under_root(&out);
            write(&dir.join("experiment.json"), &config.to_json())?;
            write(&dir.join("split.json"), &corpus.manifest().to_json())?;
            for p in emit_distribution(&corpus.distribution(), &dir)? {
                println!("wrote {}", p.display());
            }
            let s = &corpus.split;
            println!(
                "{} documents ({} empty dropped): train {}, validation {}, test {}",
                corpus.documents.len(),
                corpus.dropped_empty,
                s.train.len(),
                s.validation.len(),
                s.test.len()
            );
        }
        Command::Synth { out, n_docs, seed } => {
            let spec = SyntheticSpec {
                n_docs,
                seed,
                ..SyntheticSpec::default()
            };
            let records = mhtext::harness::generate(&spec)?;
            let mut buf = Vec::new();
            write_csv(&records, &mut buf)?;
            write(&under_root(&out), &String::from_utf8(buf).expect("csv output is utf-8"))?;
        }
        Command::Tune {
            config,
            model,
            out,
            overrides,
        } => {
            let config = load_config(&config, &overrides)?;
            let corpus = prepare(&config)?;
            let features = Features::build(&corpus, &config)?;
            let (result, bundle) = run_search(&config, model, &corpus, &features)?;
            finish_run(&result, bundle, &under_root(&out.unwrap_or_else(|| model.name().into())))?;
        }
        Command::Train {
            config,
            model,
            params,
            preset,
            out,
            overrides,
        } => {
            let config = load_config(&config, &overrides)?;
            let params = match (params, preset) {
                (Some(path), _) => params_from_file(&path)?,
                (None, Some(name)) => preset_variants(config.scheme, model)
                    .into_iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, p)| p)
                    .ok_or_else(|| Failure::Usage(format!("no preset `{name}` for {}", model.name())))?,
                (None, None) => return Err(Failure::Usage("either --params or --preset is required".into())),
            };
            let corpus = prepare(&config)?;
            let features = Features::build(&corpus, &config)?;
            let (result, bundle) = train_single(&config, model, params, &corpus, &features)?;
            let default_dir = format!("{}-train", model.name());
            finish_run(&result, bundle, &under_root(&out.unwrap_or_else(|| default_dir.into())))?;
        }
        Command::Evaluate { model, split, out } => {
            let bundle = ModelBundle::from_json(&read(&model)?)?;
            let split_name = SplitName::parse(&split)?;
            let report = bundle.evaluate_split(split_name)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{json}");
            if let Some(out) = out {
                let dir = under_root(&out);
                write(&dir.join(format!("evaluation_{split}.json")), &json)?;
                if let Some(roc) = &report.roc {
                    write(&dir.join(format!("roc_{split}.csv")), &roc_to_csv(roc))?;
                }
            }
        }
        Command::Report { result, format, out } => {
            let r = SearchResult::from_json(&read(&result)?)?;
            let format = ReportFormat::parse(&format).expect("clap restricts the format");
            let dir = under_root(&out.unwrap_or_else(|| "report".into()));
            for p in emit_report(&r, format, &dir)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

/// Accepts either a bare parameter object or a search result, in which case
/// its best parameters are used.
fn params_from_file(path: &Path) -> CliResult<ParamSet> {
    let value: Value = serde_json::from_slice(&read(path)?).map_err(Error::from)?;
    let target = match value.get("best_params") {
        Some(Value::Null) => return Err(Failure::Data(format!("{}: result has no successful trial", path.display()))),
        Some(best) => best.clone(),
        None => value,
    };
    serde_json::from_value(target).map_err(|e| Failure::Usage(format!("{}: parameters must be a JSON object ({e})", path.display())))
}

fn finish_run(result: &SearchResult, bundle: Option<ModelBundle>, dir: &Path) -> CliResult {
    write(&dir.join("result.json"), &result.to_json())?;
    let summary = serde_json::to_string_pretty(&summarize(result)).expect("summary serializes");
    write(&dir.join("report.json"), &summary)?;
    if let Some(b) = bundle {
        write(&dir.join("model.json"), &b.to_json())?;
    }
    match (result.status, &result.test) {
        (SearchStatus::Ok, Some(t)) => {
            println!(
                "{}: validation weighted F1 {:.4}, test weighted F1 {:.4}, test AUROC {}",
                result.family.name(),
                result.validation_weighted_f1.unwrap_or(f64::NAN),
                t.weighted_f1,
                t.auroc.map_or("n/a".to_string(), |a| format!("{a:.4}"))
            );
            Ok(())
        }
        _ => {
            for t in &result.trials {
                if let Some(e) = &t.error {
                    eprintln!("trial {}: {e}", t.index);
                }
            }
            Err(Error::AllTrialsFailed(result.trials.len()).into())
        }
    }
}

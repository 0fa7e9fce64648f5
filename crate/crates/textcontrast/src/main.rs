use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use chrono::NaiveDate;
use clap::{CommandFactory, Parser, Subcommand};
use textcontrast::archive::{build_prompt, filter_articles, filter_dates, parse_archive_json, summarize_metadata, Prompt};
use textcontrast::client::{generate_corpus, BatchError, CompletionClient, EndpointConfig, GenerationParams};
use textcontrast::config::{config_path, merge_args, parse_config};
use textcontrast::formats::{
    load_corpus, parse_embeddings, parse_emotion_labels, parse_jsonl, read_text, to_jsonl, write_text,
};
use textcontrast::render::{render, Format};
use textcontrast::report::{analyze, compare, AnalysisBundle, AnalysisOptions, ComparisonReport, ExternalInputs};

/// Contrast annotated text corpora: ingest news archives, generate machine
/// text, compute the metric battery and report the differences.
#[derive(Parser)]
#[command(name = "textcontrast", version)]
struct Cli {
    /// File of `key = value` lines mirroring the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Archive JSON files to article records, prompts and metadata shares.
    Ingest {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        records_out: Option<PathBuf>,
        #[arg(long)]
        prompts_out: Option<PathBuf>,
        /// Section and material-type percentages as JSON.
        #[arg(long)]
        summary_out: Option<PathBuf>,
        /// First publication day kept (YYYY-MM-DD).
        #[arg(long)]
        from: Option<NaiveDate>,
        /// Last publication day kept (YYYY-MM-DD).
        #[arg(long)]
        to: Option<NaiveDate>,
        /// Joiner between headline and lead words; `\n` and `\t` are unescaped.
        #[arg(long, default_value = "\\n")]
        separator: String,
    },
    /// Prompts to completions through an external endpoint.
    Generate {
        #[arg(long)]
        prompts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        failures_out: Option<PathBuf>,
        #[arg(long)]
        endpoint: String,
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 4)]
        max_in_flight: usize,
        #[arg(long, default_value_t = 0.7)]
        temperature: f64,
        #[arg(long, default_value_t = 0.9)]
        top_p: f64,
        #[arg(long, default_value_t = 1.1)]
        rep_penalty: f64,
        #[arg(long, default_value_t = 200)]
        max_tokens: u32,
        #[arg(long, default_value_t = 5)]
        max_attempts: u32,
        /// Base of the exponential backoff, in milliseconds.
        #[arg(long, default_value_t = 1000)]
        backoff_ms: u64,
    },
    /// One annotated corpus to an analysis bundle.
    Analyze {
        #[arg(long)]
        conllu: PathBuf,
        /// Bracketed constituency trees, one per sentence in corpus order.
        #[arg(long)]
        trees: Option<PathBuf>,
        /// Emotion JSONL: {doc_id, label} or {doc_id, scores}.
        #[arg(long)]
        emotions: Option<PathBuf>,
        /// Embedding JSONL of this corpus: {doc_id, vector}.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Embedding JSONL of the reference corpus to pair against.
        #[arg(long)]
        reference_embeddings: Option<PathBuf>,
        /// Corpus name; defaults to the CoNLL-U file stem.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        exclude_punct: bool,
        /// Label arcs whose dependent follows the head as Left.
        #[arg(long)]
        swap_directions: bool,
        #[arg(long, default_value_t = 1000)]
        segment_size: usize,
        #[arg(long, default_value_t = 0.72)]
        mtld_threshold: f64,
        /// Longest sentence shown in the length histogram; 0 keeps all.
        #[arg(long, default_value_t = 80)]
        plot_cap: usize,
        #[arg(long, default_value_t = 0.05)]
        omega_bin_width: f64,
        #[arg(long, default_value_t = 0.05)]
        similarity_bin_width: f64,
    },
    /// Reference bundle against model bundles.
    Compare {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long = "model", required = true)]
        models: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Deprel and span categories must exceed this share in the reference.
        #[arg(long, default_value_t = 1.0)]
        min_ref_pct: f64,
    },
    /// A comparison report as markdown, tsv or json.
    Render {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Endpoint(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => Ok(write_text(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn unescape(s: &str) -> String {
    s.replace("\\n", "\n").replace("\\t", "\t")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Ingest {
            inputs,
            records_out,
            prompts_out,
            summary_out,
            from,
            to,
            separator,
        } => {
            let mut records = Vec::new();
            for path in &inputs {
                let bytes = std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                records.extend(parse_archive_json(&bytes)?);
            }
            let total = records.len();
            let records = filter_dates(filter_articles(records), from, to)?;
            log::info!("kept {} of {total} articles", records.len());
            let sep = unescape(&separator);
            let prompts: Vec<Prompt> = records.iter().map(|r| build_prompt(r, &sep)).collect();
            if let Some(p) = &records_out {
                write_text(p, &to_jsonl(&records))?;
            }
            if let Some(p) = &summary_out {
                let (sections, materials) = summarize_metadata(&records)?;
                let json = serde_json::json!({"section_name": sections, "type_of_material": materials});
                write_text(p, &format!("{}\n", serde_json::to_string_pretty(&json)?))?;
            }
            match &prompts_out {
                Some(p) => write_text(p, &to_jsonl(&prompts))?,
                None if records_out.is_none() && summary_out.is_none() => print!("{}", to_jsonl(&prompts)),
                None => {}
            }
            Ok(())
        }
        Cmd::Generate {
            prompts,
            out,
            failures_out,
            endpoint,
            model,
            max_in_flight,
            temperature,
            top_p,
            rep_penalty,
            max_tokens,
            max_attempts,
            backoff_ms,
        } => {
            let prompts: Vec<Prompt> = parse_jsonl(&read_text(&prompts)?)?;
            let params = GenerationParams {
                temperature,
                top_p,
                repetition_penalty: rep_penalty,
                max_new_tokens: max_tokens,
            };
            params.validate()?;
            let mut config = EndpointConfig::new(&endpoint, &model).with_env_credential();
            config.retry.max_attempts = max_attempts.max(1);
            config.retry.base_delay = Duration::from_millis(backoff_ms);
            let client = CompletionClient::new(config).map_err(|e| Failure::Endpoint(e.to_string()))?;
            let rt = tokio::runtime::Runtime::new()?;
            let outcome = rt
                .block_on(generate_corpus(&client, &prompts, &params, max_in_flight))
                .map_err(|e| match e {
                    BatchError::AllFailed { .. } => Failure::Endpoint(e.to_string()),
                    _ => Failure::Input(e.to_string()),
                })?;
            write_text(&out, &to_jsonl(&outcome.docs))?;
            if let Some(p) = &failures_out {
                write_text(p, &to_jsonl(&outcome.failures))?;
            }
            if !outcome.failures.is_empty() {
                log::warn!("{} of {} prompts failed", outcome.failures.len(), prompts.len());
            }
            Ok(())
        }
        Cmd::Analyze {
            conllu,
            trees,
            emotions,
            embeddings,
            reference_embeddings,
            name,
            out,
            exclude_punct,
            swap_directions,
            segment_size,
            mtld_threshold,
            plot_cap,
            omega_bin_width,
            similarity_bin_width,
        } => {
            let name = name.unwrap_or_else(|| {
                conllu
                    .file_stem()
                    .map_or_else(|| "corpus".into(), |s| s.to_string_lossy().into_owned())
            });
            let trees = trees.as_deref().map(read_text).transpose()?;
            let (corpus, _) = load_corpus(&read_text(&conllu)?, trees.as_deref(), &name)?;
            let inputs = ExternalInputs {
                emotions: emotions.as_deref().map(|p| read_text(p).and_then(|t| parse_emotion_labels(&t))).transpose()?,
                embeddings: embeddings.as_deref().map(|p| read_text(p).and_then(|t| parse_embeddings(&t))).transpose()?,
                reference_embeddings: reference_embeddings
                    .as_deref()
                    .map(|p| read_text(p).and_then(|t| parse_embeddings(&t)))
                    .transpose()?,
            };
            let mut options = AnalysisOptions::default();
            options.lexical.exclude_punct = exclude_punct;
            options.lexical.segment_size = segment_size;
            options.lexical.plot_cap = (plot_cap > 0).then_some(plot_cap);
            options.lexical.mtld.threshold = mtld_threshold;
            options.geometry.exclude_punct = exclude_punct;
            options.geometry.swap_directions = swap_directions;
            options.omega_bin_width = omega_bin_width;
            options.similarity_bin_width = similarity_bin_width;
            let bundle = analyze(&corpus, &inputs, &options)?;
            emit(out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&bundle)?))
        }
        Cmd::Compare {
            reference,
            models,
            out,
            min_ref_pct,
        } => {
            let reference: AnalysisBundle = read_json(&reference)?;
            let models = models.iter().map(|p| read_json(p)).collect::<Result<Vec<AnalysisBundle>, _>>()?;
            let report = compare(&reference, &models, min_ref_pct)?;
            emit(out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&report)?))
        }
        Cmd::Render { report, format, out } => {
            let format: Format = format.parse()?;
            let report: ComparisonReport = read_json(&report)?;
            emit(out.as_deref(), &render(&report, format)?)
        }
    }
}

fn parse_cli() -> Result<Cli, Failure> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let argv = match config_path(&argv) {
        Some(path) => {
            let entries = parse_config(&read_text(Path::new(&path))?)?;
            merge_args(&Cli::command(), argv, &entries)?
        }
        None => argv,
    };
    Cli::try_parse_from(argv).map_err(|e| {
        if e.use_stderr() {
            Failure::Input(e.to_string().trim_end().to_owned())
        } else {
            let _ = e.print();
            std::process::exit(0)
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match parse_cli().and_then(run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Endpoint(msg)) => {
            eprintln!("endpoint error: {msg}");
            ExitCode::from(2)
        }
    }
}

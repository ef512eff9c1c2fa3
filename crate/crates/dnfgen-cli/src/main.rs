//! Command-line front end for training, applying, and inspecting DNF
//! decision rule models.
//!
//! Exit codes: 0 success, 1 runtime failure (data or training problems),
//! 2 usage and configuration errors.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::ConfigFile;
use dnfgen::binarizer::{binarize_corpus, build_vocabulary};
use dnfgen::corpus::{filter_rare_labels, load_corpus, save_corpus, CorpusFormat, LabeledCorpus};
use dnfgen::eval::{evaluate, k_sweep, render_text, restrict_to_frequent_labels};
use dnfgen::model::{load_model, save_model};
use dnfgen::predictor::{candidate_list_opts, top_k as truncate};
use dnfgen::synth::{generate, PlantedSpec};
use dnfgen::trainer::{train_all, LabelTrainStats};
use dnfgen::{ModelBundle, WeightedClause};

#[derive(Parser)]
#[command(
    name = "dnfgen",
    version,
    about = "Interpretable DNF decision rules for short-text classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from a TOML config and write it as JSON
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict ranked, explained candidate labels for messages
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// A single message to classify
        #[arg(long, conflicts_with = "input")]
        message: Option<String>,
        /// A file with one message per line
        #[arg(long)]
        input: Option<PathBuf>,
        /// Candidate list truncation (defaults to the trained top_k)
        #[arg(long)]
        top_k: Option<usize>,
        /// Count negative-weight clauses as zero in the ranking score
        #[arg(long)]
        clip_negative_weights: bool,
    },
    /// Evaluate a model on a labeled dataset
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// csv or jsonl (inferred from the extension when omitted)
        #[arg(long)]
        format: Option<String>,
        /// Report accuracy for every K up to this bound
        #[arg(long, default_value_t = 10)]
        k_sweep: usize,
        /// Truncate candidate lists for the headline accuracy
        #[arg(long)]
        top_k: Option<usize>,
        /// Only score messages whose label had at least this many training
        /// positives
        #[arg(long)]
        min_train_count: Option<usize>,
        /// Also write the report as JSON
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Print learned rules with their clause weights
    Inspect {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, conflicts_with = "all")]
        label: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Generate a planted-rule synthetic corpus
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        labels: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Approximate corpus vocabulary size (triggers plus background)
        #[arg(long, default_value_t = 50)]
        vocab: usize,
        /// Label-flip noise rate in [0, 0.5)
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn runtime(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Train { config, out } => cmd_train(&config, &out),
        Command::Predict {
            model,
            message,
            input,
            top_k,
            clip_negative_weights,
        } => cmd_predict(&model, message, input, top_k, clip_negative_weights),
        Command::Evaluate {
            model,
            data,
            format,
            k_sweep,
            top_k,
            min_train_count,
            json_out,
        } => cmd_evaluate(&model, &data, format, k_sweep, top_k, min_train_count, json_out),
        Command::Inspect { model, label, all } => cmd_inspect(&model, label, all),
        Command::Synth {
            out,
            labels,
            samples,
            vocab,
            noise,
            seed,
        } => cmd_synth(&out, labels, samples, vocab, noise, seed),
    }
}

fn parse_format(path: &Path, flag: Option<String>) -> Result<CorpusFormat, Failure> {
    match flag.as_deref() {
        Some("csv") => Ok(CorpusFormat::Csv),
        Some("jsonl") => Ok(CorpusFormat::Jsonl),
        Some(other) => Err(usage(anyhow::anyhow!(
            "unknown format '{other}' (expected csv or jsonl)"
        ))),
        None => CorpusFormat::from_path(path).ok_or_else(|| {
            usage(anyhow::anyhow!(
                "cannot infer format of {}; pass --format",
                path.display()
            ))
        }),
    }
}

fn cmd_train(config_path: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = ConfigFile::load(config_path).map_err(usage)?;
    let mut hyper = cfg.hyperparameters();
    if let Some(w) = config::workers_from_env() {
        hyper.workers = w;
    }
    hyper.validate().map_err(usage)?;

    let data_path = cfg.data_path(config_path);
    let format = cfg.data_format(&data_path).map_err(usage)?;
    let corpus = load_corpus(&data_path, format).map_err(usage)?;
    println!(
        "loaded {} records, {} labels from {}",
        corpus.len(),
        corpus.label_counts().len(),
        data_path.display()
    );

    let cleaned = corpus.cleaned();
    let filtered = filter_rare_labels(&cleaned, hyper.min_label_count);
    println!(
        "after dropping labels with fewer than {} examples: {} records, {} labels",
        hyper.min_label_count,
        filtered.len(),
        filtered.label_counts().len()
    );
    if filtered.is_empty() {
        return Err(runtime(anyhow::anyhow!(
            "no label reaches min_label_count = {}",
            hyper.min_label_count
        )));
    }

    let train_corpus = match cfg.data.split {
        None => filtered,
        Some([rt, rv, rs]) => {
            let split_seed = cfg.data.split_seed.unwrap_or(hyper.seed);
            let (train, valid, test) =
                dnfgen::corpus::split(&filtered, (rt, rv, rs), split_seed).map_err(runtime)?;
            for (part, name) in [(&valid, "valid"), (&test, "test")] {
                let path = sibling(out, name, format);
                save_corpus(part, &path, format).map_err(runtime)?;
                println!("wrote {} held-out records to {}", part.len(), path.display());
            }
            println!(
                "split {}/{}/{} (seed {split_seed})",
                train.len(),
                valid.len(),
                test.len()
            );
            train
        }
    };

    let vocab = build_vocabulary(&train_corpus, hyper.vocab_budget, hyper.vocab_frequency)
        .map_err(runtime)?;
    let examples = binarize_corpus(&train_corpus, &vocab);
    println!(
        "vocabulary: {} words; training on {} examples",
        vocab.len(),
        examples.len()
    );

    let started = Instant::now();
    let output = train_all(&vocab, &examples, &hyper).map_err(runtime)?;
    let elapsed = started.elapsed().as_secs_f64();
    print_training_summary(&output.stats, elapsed);

    save_model(&output.bundle, out).map_err(runtime)?;
    println!("model written to {}", out.display());
    Ok(())
}

fn sibling(out: &Path, tag: &str, format: CorpusFormat) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string());
    let ext = match format {
        CorpusFormat::Csv => "csv",
        CorpusFormat::Jsonl => "jsonl",
    };
    out.with_file_name(format!("{stem}-{tag}.{ext}"))
}

fn print_training_summary(stats: &[LabelTrainStats], wall_secs: f64) {
    println!(
        "{:<12} {:>6} {:>6} {:>5} {:>6} {:>7} {:>7} {:>8} {:>8} {:>9}",
        "label", "pos", "neg", "iter", "proof", "cols(h)", "cols(e)", "clauses", "avg len", "objective"
    );
    for s in stats {
        let avg_len = if s.clause_count == 0 {
            0.0
        } else {
            s.total_clause_len as f64 / s.clause_count as f64
        };
        println!(
            "{:<12} {:>6} {:>6} {:>5} {:>6} {:>7} {:>7} {:>8} {:>8.2} {:>9.1}",
            s.label,
            s.positives,
            s.negatives,
            s.cg_iterations,
            if s.terminated_by_proof { "yes" } else { "no" },
            s.columns_from_heuristic,
            s.columns_from_exact,
            s.clause_count,
            avg_len,
            s.objective,
        );
    }
    let n = stats.len().max(1) as f64;
    let sum = |f: &dyn Fn(&LabelTrainStats) -> f64| stats.iter().map(|s| f(s)).sum::<f64>();
    println!(
        "labels: {}  solved to proof: {}  avg columns/label: {:.2} heuristic + {:.2} exact",
        stats.len(),
        stats.iter().filter(|s| s.terminated_by_proof).count(),
        sum(&|s| s.columns_from_heuristic as f64) / n,
        sum(&|s| s.columns_from_exact as f64) / n,
    );
    println!(
        "avg time/label: rmp {:.3}s  heuristic {:.3}s  exact {:.3}s  integer {:.3}s  (wall {:.1}s)",
        sum(&|s| s.rmp_secs) / n,
        sum(&|s| s.heuristic_secs) / n,
        sum(&|s| s.exact_secs) / n,
        sum(&|s| s.integer_secs) / n,
        wall_secs,
    );
}

fn render_dnf(clauses: &[WeightedClause], model: &ModelBundle) -> String {
    clauses
        .iter()
        .map(|w| {
            let words: Vec<String> = w
                .clause
                .features()
                .iter()
                .map(|&j| format!("'{}'", model.vocabulary.word(j)))
                .collect();
            format!("[{}]", words.join(" AND "))
        })
        .collect::<Vec<_>>()
        .join(" OR ")
}

fn cmd_predict(
    model_path: &Path,
    message: Option<String>,
    input: Option<PathBuf>,
    top_k: Option<usize>,
    clip: bool,
) -> Result<(), Failure> {
    let model = load_model(model_path).map_err(usage)?;
    let k = top_k.unwrap_or(model.hyper.top_k).max(1);

    let messages: Vec<String> = match (message, input) {
        (Some(m), None) => vec![m],
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(usage)?;
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect()
        }
        _ => {
            return Err(usage(anyhow::anyhow!(
                "provide exactly one of --message or --input"
            )))
        }
    };

    for message in &messages {
        println!("> {message}");
        let candidates = truncate(&candidate_list_opts(message, &model, clip), k);
        if candidates.is_empty() {
            println!("  no candidates");
        } else {
            for (rank, c) in candidates.iter().enumerate() {
                println!(
                    "  {}. {}  {:.2}  {}",
                    rank + 1,
                    c.label,
                    c.score,
                    render_dnf(&c.satisfied_clauses, &model)
                );
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    model_path: &Path,
    data_path: &Path,
    format: Option<String>,
    k_sweep_max: usize,
    top_k: Option<usize>,
    min_train_count: Option<usize>,
    json_out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut model = load_model(model_path).map_err(usage)?;
    if let Some(w) = config::workers_from_env() {
        model.hyper.workers = w;
    }
    let format = parse_format(data_path, format)?;
    let dataset = load_corpus(data_path, format).map_err(usage)?;
    let dataset = match min_train_count {
        Some(threshold) => restrict_to_frequent_labels(&dataset, &model, threshold),
        None => dataset,
    };

    let mut report = evaluate(&dataset, &model, top_k).map_err(runtime)?;
    if k_sweep_max >= 1 && !report.per_k_accuracy.contains_key(&k_sweep_max) {
        report.per_k_accuracy = k_sweep(&dataset, &model, k_sweep_max).map_err(runtime)?;
    } else {
        report.per_k_accuracy.retain(|&k, _| k <= k_sweep_max);
    }
    print!("{}", render_text(&report));

    if let Some(path) = json_out {
        let json = serde_json::to_vec_pretty(&report).expect("report serializes");
        std::fs::write(&path, json)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(runtime)?;
        println!("json report written to {}", path.display());
    }
    Ok(())
}

fn print_rule(model: &ModelBundle, label: &str) {
    let rule = &model.rules[label];
    println!(
        "label {label}  (n_k {}, positives {}, objective {}, proof {})",
        rule.n_k,
        rule.train_positives,
        rule.train_objective,
        if rule.cg_terminated_by_proof { "yes" } else { "no" }
    );
    if rule.clauses.is_empty() {
        println!("  no clauses: this rule never fires");
        return;
    }
    let rendered: Vec<String> = rule
        .clauses
        .iter()
        .map(|w| {
            w.clause
                .features()
                .iter()
                .map(|&j| format!("'{}'", model.vocabulary.word(j)))
                .collect::<Vec<_>>()
                .join(" AND ")
        })
        .collect();
    let width = rendered.iter().map(|s| s.len()).max().unwrap_or(6).max(6);
    println!("  {:<width$}  {:>9} {:>9} {:>12}", "clause", "pos acc", "neg acc", "weight");
    for (text, w) in rendered.iter().zip(&rule.clauses) {
        println!(
            "  {:<width$}  {:>9.3} {:>9.3} {:>12.2}",
            text, w.pos_acc, w.neg_acc, w.weight
        );
    }
}

fn cmd_inspect(model_path: &Path, label: Option<String>, all: bool) -> Result<(), Failure> {
    let model = load_model(model_path).map_err(usage)?;
    match (label, all) {
        (Some(label), false) => {
            if !model.rules.contains_key(&label) {
                let available: Vec<&String> = model.rules.keys().collect();
                return Err(usage(anyhow::anyhow!(
                    "unknown label '{label}'; available labels: {available:?}"
                )));
            }
            print_rule(&model, &label);
            Ok(())
        }
        (None, true) => {
            for label in model.rules.keys() {
                print_rule(&model, label);
                println!();
            }
            Ok(())
        }
        _ => Err(usage(anyhow::anyhow!("provide exactly one of --label or --all"))),
    }
}

fn cmd_synth(
    out: &Path,
    labels: usize,
    samples: usize,
    vocab: usize,
    noise: f64,
    seed: u64,
) -> Result<(), Failure> {
    if labels == 0 {
        return Err(usage(anyhow::anyhow!("need at least one label")));
    }
    let background = vocab.saturating_sub(3 * labels).max(1);
    let spec = PlantedSpec::symmetric(labels, samples, background, noise, seed);
    let corpus = generate(&spec).map_err(usage)?;
    let format = CorpusFormat::from_path(out).unwrap_or(CorpusFormat::Csv);
    save_corpus(&corpus, out, format).map_err(runtime)?;
    println!(
        "wrote {} records over {} labels to {} (noise {noise}, seed {seed})",
        corpus.len(),
        labels,
        out.display()
    );
    Ok(())
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tdm", version, about = "Mine (task, dataset, metric) leaderboards from empirical AI papers")]
pub struct Cli {
    /// TOML pipeline configuration; its values take precedence over flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for per-paper stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert papers to structured documents and DocTAET context features.
    Ingest(IngestArgs),
    /// Build the label vocabulary, entailment instances and fold manifest.
    BuildCorpus(BuildCorpusArgs),
    /// Score every vocabulary triple against each paper and keep the accepted ones.
    Predict(PredictArgs),
    /// Score predictions against gold annotations.
    Evaluate(EvaluateArgs),
    /// Write accepted predictions as knowledge-graph statements.
    Export(ExportArgs),
    /// Print corpus or feature-length statistics.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory of input papers.
    pub input: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// latex | pdf | tei
    #[arg(long)]
    pub source: Option<String>,
    /// Token cap of the context feature (512 or 2000 for the model profiles).
    #[arg(long, conflicts_with = "uncapped")]
    pub cap: Option<usize>,
    /// Measure features without any cap or component budget.
    #[arg(long)]
    pub uncapped: bool,
    /// Converter command line with {input}, {output}, {template}, {filter} placeholders.
    #[arg(long)]
    pub converter: Option<String>,
    /// Base URL of the PDF parsing service.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[command(flatten)]
    pub replay: ReplayArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Serve remote responses from recorded fixtures in this directory.
    #[arg(long, conflicts_with = "record")]
    pub replay: Option<PathBuf>,
    /// Record remote responses into this directory.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildCorpusArgs {
    /// Papers file (paper_id, title, abstract, url[, split]).
    #[arg(long)]
    pub papers: PathBuf,
    /// Evaluation-table file (paper_id, task, dataset, metric).
    #[arg(long)]
    pub evaluations: PathBuf,
    /// Context features written by `ingest`.
    #[arg(long)]
    pub features: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// False triples sampled per paper (default 50).
    #[arg(long)]
    pub num_false: Option<usize>,
    /// Seed for negative sampling and fold assignment (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum number of papers a triple needs to enter the vocabulary.
    #[arg(long)]
    pub min_frequency: Option<usize>,
    /// Also print corpus statistics.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Context features written by `ingest`.
    #[arg(long)]
    pub features: PathBuf,
    /// Label vocabulary written by `build-corpus`.
    #[arg(long)]
    pub vocab: PathBuf,
    /// Output prediction file.
    #[arg(long, short)]
    pub out: PathBuf,
    /// baseline | remote
    #[arg(long)]
    pub scorer: Option<String>,
    /// Model service base URL (remote scorer).
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Minimum entailment probability for a triple to be kept (default 0.5).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Keep at most this many triples per paper.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Only score triples sharing a word with the context.
    #[arg(long)]
    pub lexical_prefilter: bool,
    #[command(flatten)]
    pub replay: ReplayArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Prediction file written by `predict`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Gold annotations (annotations.jsonl from build-corpus).
    #[arg(long)]
    pub gold: PathBuf,
    /// with-unknown | without-unknown | both
    #[arg(long)]
    pub setting: Option<String>,
    /// per-paper | per-label
    #[arg(long = "macro")]
    pub macro_mode: Option<String>,
    /// Fold manifest; each fold is scored separately and the two are averaged.
    #[arg(long, conflicts_with = "split")]
    pub folds: Option<PathBuf>,
    /// Restrict gold papers to one predefined split.
    #[arg(long)]
    pub split: Option<String>,
    /// Directory for report.txt and report.json.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Prediction file written by `predict`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Gold annotations, used for paper titles and URLs.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// ntriples | jsonlines
    #[arg(long)]
    pub format: Option<String>,
    /// Namespace for minted IRIs (default https://example.org/tdm/).
    #[arg(long)]
    pub base_iri: Option<String>,
    /// Output file.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Papers file of the dump.
    #[arg(long, requires = "evaluations")]
    pub papers: Option<PathBuf>,
    /// Evaluation-table file of the dump.
    #[arg(long, requires = "papers")]
    pub evaluations: Option<PathBuf>,
    /// Released train split (label, paper_id, triple, context per line).
    #[arg(long)]
    pub released_train: Option<PathBuf>,
    /// Released test split.
    #[arg(long)]
    pub released_test: Option<PathBuf>,
    /// Context features written by `ingest`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Print JSON instead of tables.
    #[arg(long)]
    pub json: bool,
}

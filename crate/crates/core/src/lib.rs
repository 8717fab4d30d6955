//! Leaderboard mining from empirical AI papers.
//!
//! The pipeline turns papers (LaTeX via pandoc, PDF via a GROBID-compatible
//! service, or TEI directly) into structured documents, condenses each into a
//! DocTAET context, pairs contexts with candidate (Task, Dataset, Metric)
//! triples, scores the pairs, evaluates the accepted triples against gold
//! annotations and exports them as knowledge-graph statements.

pub mod corpus;
pub mod doctaet;
pub mod eval;
pub mod export;
pub mod ingest;
pub mod predict;
pub mod records;
pub mod replay;
pub mod scorer;

pub use corpus::{Concept, LabelVocabulary, PaperAnnotation, Split, TdmTriple};
pub use doctaet::{extract_doctaet, ContextFeature, DocTaetConfig};
pub use eval::{evaluate, EvaluationReport, MacroMode, Setting};
pub use export::{export_triples, BenchmarkRecord, ExportFormat};
pub use ingest::{SourceKind, StructuredDoc};
pub use predict::{predict_corpus, PredictConfig, PredictionSet};
pub use scorer::{BaselineScorer, RemoteScorer, Scorer};

//! Distant-supervision corpus: gold annotations, the label vocabulary,
//! "unknown" assignment, negative sampling and fold splitting.

mod dump;
mod folds;
pub mod released;
mod sampling;
mod stats;
mod vocab;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::records::RecordError;

pub use dump::{load_annotations, LoadWarning, LoadedAnnotations};
pub use folds::{make_folds, read_fold_manifest, Fold, FoldSplit};
pub use sampling::{generate_instances, paper_rng, InferenceInstance, InstanceRecord, SamplingConfig};
pub use stats::{corpus_stats, CorpusStats};
pub use vocab::{assign_unknown, build_vocabulary, LabelVocabulary, VocabEntry};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed dump: {0}")]
    MalformedDump(#[from] RecordError),
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("no annotations given")]
    EmptyAnnotations,
    #[error("label filtering removed every triple")]
    EmptyVocabulary,
    #[error("need at least 2 papers for two folds, got {0}")]
    TooFewPapers(usize),
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
}

/// Literal used for the Unknown label in record files.
pub const UNKNOWN_LITERAL: &str = "unknown";

/// A (task, dataset, metric) label, or the distinguished Unknown label.
///
/// Texts are trimmed with internal whitespace collapsed; case is kept, so
/// `F1` and `f1` are different metrics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct TdmTriple {
    task: String,
    dataset: String,
    metric: String,
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl TdmTriple {
    pub fn new(task: &str, dataset: &str, metric: &str) -> Result<Self, CorpusError> {
        let (task, dataset, metric) = (normalize(task), normalize(dataset), normalize(metric));
        for (name, value) in [("task", &task), ("dataset", &dataset), ("metric", &metric)] {
            if value.is_empty() {
                return Err(CorpusError::InvalidTriple(format!("empty {name}")));
            }
        }
        Ok(TdmTriple {
            task,
            dataset,
            metric,
        })
    }

    pub fn unknown() -> Self {
        TdmTriple {
            task: String::new(),
            dataset: String::new(),
            metric: String::new(),
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.task.is_empty()
    }

    pub fn task(&self) -> &str {
        &self.task
    }

    pub fn dataset(&self) -> &str {
        &self.dataset
    }

    pub fn metric(&self) -> &str {
        &self.metric
    }

    /// The single concept this triple projects onto; Unknown projects to
    /// the empty string.
    pub fn concept(&self, concept: Concept) -> &str {
        match concept {
            Concept::Task => &self.task,
            Concept::Dataset => &self.dataset,
            Concept::Metric => &self.metric,
        }
    }
}

impl fmt::Display for TdmTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unknown() {
            f.write_str(UNKNOWN_LITERAL)
        } else {
            write!(f, "({}, {}, {})", self.task, self.dataset, self.metric)
        }
    }
}

/// Wire form: Unknown carries the literal "unknown" in all three fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawTriple {
    pub task: String,
    pub dataset: String,
    pub metric: String,
}

impl TryFrom<RawTriple> for TdmTriple {
    type Error = CorpusError;

    fn try_from(raw: RawTriple) -> Result<Self, Self::Error> {
        if [&raw.task, &raw.dataset, &raw.metric]
            .iter()
            .all(|s| s.trim() == UNKNOWN_LITERAL)
        {
            return Ok(TdmTriple::unknown());
        }
        TdmTriple::new(&raw.task, &raw.dataset, &raw.metric)
    }
}

impl From<TdmTriple> for RawTriple {
    fn from(t: TdmTriple) -> Self {
        if t.is_unknown() {
            RawTriple {
                task: UNKNOWN_LITERAL.into(),
                dataset: UNKNOWN_LITERAL.into(),
                metric: UNKNOWN_LITERAL.into(),
            }
        } else {
            RawTriple {
                task: t.task,
                dataset: t.dataset,
                metric: t.metric,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Concept {
    Task,
    Dataset,
    Metric,
}

impl Concept {
    pub const ALL: [Concept; 3] = [Concept::Task, Concept::Dataset, Concept::Metric];
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concept::Task => "Task",
            Concept::Dataset => "Dataset",
            Concept::Metric => "Metric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Gold labels of one paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperAnnotation {
    pub paper_id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    pub triples: BTreeSet<TdmTriple>,
}

impl PaperAnnotation {
    pub fn new(paper_id: impl Into<String>, triples: impl IntoIterator<Item = TdmTriple>) -> Self {
        PaperAnnotation {
            paper_id: paper_id.into(),
            title: String::new(),
            url: String::new(),
            split: None,
            triples: triples.into_iter().collect(),
        }
    }

    /// True when the paper carries no TDM triple (empty or `{Unknown}`).
    pub fn is_unknown(&self) -> bool {
        self.triples.iter().all(TdmTriple::is_unknown)
    }

    /// Triples other than Unknown.
    pub fn tdm_triples(&self) -> impl Iterator<Item = &TdmTriple> {
        self.triples.iter().filter(|t| !t.is_unknown())
    }
}

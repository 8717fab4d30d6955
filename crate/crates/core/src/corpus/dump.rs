use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::Deserialize;

use super::{CorpusError, PaperAnnotation, Split, TdmTriple};
use crate::records::read_records;

#[derive(Debug, Deserialize)]
struct PaperRow {
    paper_id: String,
    #[serde(default)]
    title: String,
    #[serde(default, rename = "abstract")]
    _abstract: Option<String>,
    #[serde(default)]
    url: String,
    #[serde(default)]
    split: Option<Split>,
}

#[derive(Debug, Deserialize)]
struct EvaluationRow {
    paper_id: String,
    #[serde(default)]
    task: String,
    #[serde(default)]
    dataset: String,
    #[serde(default)]
    metric: String,
}

/// Per-record problems that do not abort loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    DuplicatePaper(String),
    UnknownPaper { paper_id: String },
    InvalidTriple { paper_id: String, reason: String },
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadWarning::DuplicatePaper(id) => write!(f, "paper {id} listed more than once"),
            LoadWarning::UnknownPaper { paper_id } => {
                write!(f, "evaluation row references unknown paper {paper_id}")
            }
            LoadWarning::InvalidTriple { paper_id, reason } => {
                write!(f, "paper {paper_id}: invalid triple: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedAnnotations {
    pub papers: Vec<PaperAnnotation>,
    pub warnings: Vec<LoadWarning>,
}

/// Join a papers file and an evaluations file into per-paper annotations.
///
/// Papers keep file order. Evaluation rows that reference an unknown paper
/// or carry an empty field are skipped and reported as warnings.
pub fn load_annotations(papers_file: &Path, evaluations_file: &Path) -> Result<LoadedAnnotations, CorpusError> {
    let paper_rows: Vec<PaperRow> = read_records(papers_file)?;
    let eval_rows: Vec<EvaluationRow> = read_records(evaluations_file)?;

    let mut warnings = Vec::new();
    let mut papers: Vec<PaperAnnotation> = Vec::with_capacity(paper_rows.len());
    let mut index: HashMap<String, usize> = HashMap::new();
    for row in paper_rows {
        let id = row.paper_id.trim().to_owned();
        if id.is_empty() || index.contains_key(&id) {
            warnings.push(LoadWarning::DuplicatePaper(id));
            continue;
        }
        index.insert(id.clone(), papers.len());
        papers.push(PaperAnnotation {
            paper_id: id,
            title: row.title.split_whitespace().collect::<Vec<_>>().join(" "),
            url: row.url.trim().to_owned(),
            split: row.split,
            triples: Default::default(),
        });
    }

    // Count unknown-paper references once per id to keep warnings compact.
    let mut unknown: BTreeSet<String> = BTreeSet::new();
    for row in eval_rows {
        let id = row.paper_id.trim();
        let Some(&i) = index.get(id) else {
            unknown.insert(id.to_owned());
            continue;
        };
        match TdmTriple::new(&row.task, &row.dataset, &row.metric) {
            Ok(t) => {
                papers[i].triples.insert(t);
            }
            Err(e) => warnings.push(LoadWarning::InvalidTriple {
                paper_id: id.to_owned(),
                reason: e.to_string(),
            }),
        }
    }
    warnings.extend(
        unknown
            .into_iter()
            .map(|paper_id| LoadWarning::UnknownPaper { paper_id }),
    );
    Ok(LoadedAnnotations { papers, warnings })
}

//! Reader for the tab-separated entailment files shipped with the released
//! corpus: `label<TAB>paper_id<TAB>task; dataset; metric<TAB>context`, where
//! the triple column is the literal `unknown` for papers without labels.
//!
//! The gold annotations are the `true` rows; each paper's context column is
//! its precomputed context feature, so feature lengths can be verified from
//! the same file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{CorpusError, LoadWarning, PaperAnnotation, Split, TdmTriple, UNKNOWN_LITERAL};
use crate::records::read_text;

#[derive(Debug, Clone)]
pub struct ReleasedSplit {
    pub annotations: Vec<PaperAnnotation>,
    /// Whitespace-token length of each paper's shipped context.
    pub context_lengths: BTreeMap<String, usize>,
    pub warnings: Vec<LoadWarning>,
}

pub fn load_released_split(path: &Path, split: Split) -> Result<ReleasedSplit, CorpusError> {
    let text = read_text(path)?;
    parse_released(&text, split)
}

pub fn parse_released(text: &str, split: Split) -> Result<ReleasedSplit, CorpusError> {
    let mut papers: BTreeMap<String, BTreeSet<TdmTriple>> = BTreeMap::new();
    let mut lengths = BTreeMap::new();
    let mut warnings = Vec::new();

    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.splitn(4, '\t').collect();
        if cols.len() < 3 {
            warnings.push(LoadWarning::InvalidTriple {
                paper_id: cols.get(1).unwrap_or(&"").to_string(),
                reason: format!("expected 4 tab-separated columns, got {}", cols.len()),
            });
            continue;
        }
        let paper_id = cols[1].trim().to_owned();
        let entry = papers.entry(paper_id.clone()).or_default();
        if let Some(ctx) = cols.get(3) {
            lengths
                .entry(paper_id.clone())
                .or_insert_with(|| ctx.split_whitespace().count());
        }
        if !cols[0].trim().eq_ignore_ascii_case("true") {
            continue;
        }
        let label = cols[2].trim();
        if label.eq_ignore_ascii_case(UNKNOWN_LITERAL) {
            entry.insert(TdmTriple::unknown());
            continue;
        }
        let parts: Vec<&str> = label.split(';').collect();
        let parsed = match parts.as_slice() {
            [t, d, m] => TdmTriple::new(t, d, m),
            _ => Err(CorpusError::InvalidTriple(format!(
                "expected `task; dataset; metric`, got `{label}`"
            ))),
        };
        match parsed {
            Ok(t) => {
                entry.insert(t);
            }
            Err(e) => warnings.push(LoadWarning::InvalidTriple {
                paper_id,
                reason: e.to_string(),
            }),
        }
    }

    let annotations = papers
        .into_iter()
        .map(|(paper_id, mut triples)| {
            if triples.len() > 1 {
                triples.remove(&TdmTriple::unknown());
            }
            PaperAnnotation {
                split: Some(split),
                ..PaperAnnotation::new(paper_id, triples)
            }
        })
        .collect();
    Ok(ReleasedSplit {
        annotations,
        context_lengths: lengths,
        warnings,
    })
}

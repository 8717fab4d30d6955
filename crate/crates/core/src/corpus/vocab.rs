use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Concept, CorpusError, PaperAnnotation, TdmTriple};

/// Distinct candidate labels, ordered lexicographically by
/// (task, dataset, metric), with the number of papers carrying each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVocabulary {
    triples: Vec<TdmTriple>,
    frequency: Vec<usize>,
}

/// One line of a vocabulary file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VocabEntry {
    #[serde(flatten)]
    pub triple: TdmTriple,
    pub frequency: usize,
}

impl LabelVocabulary {
    pub fn from_entries(entries: Vec<VocabEntry>) -> Result<Self, CorpusError> {
        let mut map = BTreeMap::new();
        for e in entries {
            if e.triple.is_unknown() {
                return Err(CorpusError::InvalidTriple("Unknown cannot be a vocabulary label".into()));
            }
            *map.entry(e.triple).or_insert(0) += e.frequency;
        }
        if map.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        let (triples, frequency) = map.into_iter().unzip();
        Ok(LabelVocabulary { triples, frequency })
    }

    pub fn entries(&self) -> Vec<VocabEntry> {
        self.iter()
            .map(|(t, f)| VocabEntry {
                triple: t.clone(),
                frequency: f,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[TdmTriple] {
        &self.triples
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TdmTriple, usize)> {
        self.triples.iter().zip(self.frequency.iter().copied())
    }

    pub fn index_of(&self, triple: &TdmTriple) -> Option<usize> {
        self.triples.binary_search(triple).ok()
    }

    pub fn contains(&self, triple: &TdmTriple) -> bool {
        self.index_of(triple).is_some()
    }

    pub fn frequency(&self, triple: &TdmTriple) -> Option<usize> {
        self.index_of(triple).map(|i| self.frequency[i])
    }

    /// Distinct values of one concept across the vocabulary.
    pub fn distinct(&self, concept: Concept) -> BTreeSet<&str> {
        self.triples.iter().map(|t| t.concept(concept)).collect()
    }
}

/// Distinct triples whose paper frequency is at least `min_frequency`.
pub fn build_vocabulary(annotations: &[PaperAnnotation], min_frequency: usize) -> Result<LabelVocabulary, CorpusError> {
    if annotations.is_empty() {
        return Err(CorpusError::EmptyAnnotations);
    }
    let mut counts: BTreeMap<&TdmTriple, usize> = BTreeMap::new();
    for paper in annotations {
        // `triples` is a set, so each paper counts once per triple.
        for t in paper.tdm_triples() {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    let (triples, frequency): (Vec<_>, Vec<_>) = counts
        .into_iter()
        .filter(|&(_, n)| n >= min_frequency)
        .map(|(t, n)| (t.clone(), n))
        .unzip();
    if triples.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    Ok(LabelVocabulary { triples, frequency })
}

/// Intersect every paper's triples with the vocabulary; papers left with
/// nothing are labelled `{Unknown}`.
pub fn assign_unknown(annotations: &[PaperAnnotation], vocab: &LabelVocabulary) -> Vec<PaperAnnotation> {
    annotations
        .iter()
        .map(|paper| {
            let kept: BTreeSet<TdmTriple> = paper
                .tdm_triples()
                .filter(|t| vocab.contains(t))
                .cloned()
                .collect();
            let triples = if kept.is_empty() {
                BTreeSet::from([TdmTriple::unknown()])
            } else {
                kept
            };
            PaperAnnotation {
                triples,
                ..paper.clone()
            }
        })
        .collect()
}

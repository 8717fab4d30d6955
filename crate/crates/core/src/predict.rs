//! Per-paper prediction: score every vocabulary triple against the paper's
//! context, keep those at or above the threshold, fall back to Unknown.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{LabelVocabulary, TdmTriple, UNKNOWN_LITERAL};
use crate::doctaet::ContextFeature;
use crate::scorer::{render_hypothesis, score_baseline, ScoreError, ScoreRequest, Scorer};

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),
    #[error("top_k must be at least 1")]
    InvalidTopK,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("scoring paper {paper_id}: {source}")]
    Scorer {
        paper_id: String,
        #[source]
        source: ScoreError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictConfig {
    pub threshold: f64,
    pub top_k: Option<usize>,
    /// Only score triples sharing at least one word with the context.
    pub lexical_prefilter: bool,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            threshold: 0.5,
            top_k: None,
            lexical_prefilter: false,
        }
    }
}

impl PredictConfig {
    pub fn validate(&self) -> Result<(), PredictError> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(PredictError::InvalidThreshold(self.threshold));
        }
        if self.top_k == Some(0) {
            return Err(PredictError::InvalidTopK);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub paper_id: String,
    pub predicted: BTreeSet<TdmTriple>,
    pub scores: BTreeMap<TdmTriple, f64>,
}

impl PredictionSet {
    pub fn is_unknown(&self) -> bool {
        self.predicted.iter().all(TdmTriple::is_unknown)
    }

    /// Rows of the prediction file for this paper.
    pub fn records(&self) -> Vec<PredictionRecord> {
        let best = self.scores.values().copied().fold(0.0_f64, f64::max);
        self.predicted
            .iter()
            .map(|t| {
                let score = if t.is_unknown() {
                    best
                } else {
                    self.scores.get(t).copied().unwrap_or(0.0)
                };
                PredictionRecord::new(&self.paper_id, t, score)
            })
            .collect()
    }
}

/// One line of the prediction file. Unknown rows carry `unknown` in all
/// three label fields and the best (sub-threshold) score seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub paper_id: String,
    pub task: String,
    pub dataset: String,
    pub metric: String,
    pub score: f64,
}

impl PredictionRecord {
    pub fn new(paper_id: &str, triple: &TdmTriple, score: f64) -> Self {
        let field = |s: &str| {
            if triple.is_unknown() {
                UNKNOWN_LITERAL.to_owned()
            } else {
                s.to_owned()
            }
        };
        PredictionRecord {
            paper_id: paper_id.to_owned(),
            task: field(triple.task()),
            dataset: field(triple.dataset()),
            metric: field(triple.metric()),
            score,
        }
    }

    pub fn triple(&self) -> Result<TdmTriple, crate::corpus::CorpusError> {
        crate::corpus::RawTriple {
            task: self.task.clone(),
            dataset: self.dataset.clone(),
            metric: self.metric.clone(),
        }
        .try_into()
    }
}

/// Regroup prediction-file rows into per-paper sets, ordered by paper id.
pub fn group_records(records: &[PredictionRecord]) -> Result<Vec<PredictionSet>, crate::corpus::CorpusError> {
    let mut by_paper: BTreeMap<&str, PredictionSet> = BTreeMap::new();
    for r in records {
        let triple = r.triple()?;
        let set = by_paper.entry(&r.paper_id).or_insert_with(|| PredictionSet {
            paper_id: r.paper_id.clone(),
            predicted: BTreeSet::new(),
            scores: BTreeMap::new(),
        });
        if !triple.is_unknown() {
            set.scores.insert(triple.clone(), r.score);
        }
        set.predicted.insert(triple);
    }
    Ok(by_paper.into_values().collect())
}

/// The decision rule. `scored` must be in vocabulary order; ties at the
/// top-k boundary keep the earlier vocabulary entry.
pub fn select(scored: &[(&TdmTriple, f64)], threshold: f64, top_k: Option<usize>) -> BTreeSet<TdmTriple> {
    let mut passing: Vec<(usize, &TdmTriple, f64)> = scored
        .iter()
        .enumerate()
        .filter(|(_, (_, p))| *p >= threshold)
        .map(|(i, (t, p))| (i, *t, *p))
        .collect();
    if let Some(k) = top_k {
        passing.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        passing.truncate(k);
    }
    let chosen: BTreeSet<TdmTriple> = passing.into_iter().map(|(_, t, _)| t.clone()).collect();
    if chosen.is_empty() {
        BTreeSet::from([TdmTriple::unknown()])
    } else {
        chosen
    }
}

pub fn predict_paper(
    context: &ContextFeature,
    vocab: &LabelVocabulary,
    scorer: &dyn Scorer,
    cfg: &PredictConfig,
) -> Result<PredictionSet, PredictError> {
    cfg.validate()?;
    if vocab.is_empty() {
        return Err(PredictError::EmptyVocabulary);
    }
    let wrap = |source| PredictError::Scorer {
        paper_id: context.paper_id.clone(),
        source,
    };

    let mut candidates = Vec::with_capacity(vocab.len());
    for t in vocab.triples() {
        let req = ScoreRequest::new(context.text.clone(), render_hypothesis(t).map_err(wrap)?).map_err(wrap)?;
        if cfg.lexical_prefilter && score_baseline(&req).probability_true <= 0.0 {
            continue;
        }
        candidates.push((t, req));
    }

    let mut scored: Vec<(&TdmTriple, f64)> = Vec::with_capacity(candidates.len());
    for chunk in candidates.chunks(scorer.max_batch().max(1)) {
        let requests: Vec<ScoreRequest> = chunk.iter().map(|(_, r)| r.clone()).collect();
        let results = scorer.score_batch(&requests).map_err(wrap)?;
        scored.extend(chunk.iter().zip(results).map(|((t, _), r)| (*t, r.probability_true)));
    }

    Ok(PredictionSet {
        paper_id: context.paper_id.clone(),
        predicted: select(&scored, cfg.threshold, cfg.top_k),
        scores: scored.into_iter().map(|(t, p)| (t.clone(), p)).collect(),
    })
}

/// Predict every paper in parallel; results come back ordered by paper id.
pub fn predict_corpus(
    features: &[ContextFeature],
    vocab: &LabelVocabulary,
    scorer: &dyn Scorer,
    cfg: &PredictConfig,
) -> Vec<Result<PredictionSet, PredictError>> {
    let mut order: Vec<&ContextFeature> = features.iter().collect();
    order.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
    order
        .into_par_iter()
        .map(|f| predict_paper(f, vocab, scorer, cfg))
        .collect()
}

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CorpusError, LabelVocabulary, PaperAnnotation, TdmTriple};
use crate::doctaet::ContextFeature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// False triples drawn per paper.
    pub num_false: usize,
    pub rng_seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            num_false: 50,
            rng_seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.num_false == 0 {
            return Err(CorpusError::InvalidConfig("num_false must be at least 1".into()));
        }
        Ok(())
    }
}

/// Generator seeded from `(seed, paper_id)` alone, so results do not depend
/// on the order papers are processed in.
pub fn paper_rng(seed: u64, paper_id: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(paper_id.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// One (label, triple, context) entailment example.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceInstance {
    pub paper_id: String,
    pub triple: TdmTriple,
    pub context: Arc<ContextFeature>,
    pub label: bool,
}

/// Line format of the instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub paper_id: String,
    pub label: bool,
    pub task: String,
    pub dataset: String,
    pub metric: String,
    pub context: String,
}

impl From<&InferenceInstance> for InstanceRecord {
    fn from(i: &InferenceInstance) -> Self {
        InstanceRecord {
            paper_id: i.paper_id.clone(),
            label: i.label,
            task: i.triple.task().to_owned(),
            dataset: i.triple.dataset().to_owned(),
            metric: i.triple.metric().to_owned(),
            context: i.context.text.clone(),
        }
    }
}

/// True instances for the paper's gold triples found in the vocabulary,
/// then `min(num_false, |vocab \ gold|)` false instances drawn uniformly
/// without replacement. Both groups are emitted in vocabulary order.
pub fn generate_instances(
    paper: &PaperAnnotation,
    context: &Arc<ContextFeature>,
    vocab: &LabelVocabulary,
    cfg: &SamplingConfig,
) -> Result<Vec<InferenceInstance>, CorpusError> {
    cfg.validate()?;
    if vocab.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    let mut is_true = vec![false; vocab.len()];
    for t in paper.tdm_triples() {
        if let Some(i) = vocab.index_of(t) {
            is_true[i] = true;
        }
    }
    let pool: Vec<usize> = (0..vocab.len()).filter(|&i| !is_true[i]).collect();
    let amount = cfg.num_false.min(pool.len());
    let mut rng = paper_rng(cfg.rng_seed, &paper.paper_id);
    let mut chosen: Vec<usize> = rand::seq::index::sample(&mut rng, pool.len(), amount)
        .into_iter()
        .map(|k| pool[k])
        .collect();
    chosen.sort_unstable();

    let make = |i: usize, label: bool| InferenceInstance {
        paper_id: paper.paper_id.clone(),
        triple: vocab.triples()[i].clone(),
        context: Arc::clone(context),
        label,
    };
    let trues = (0..vocab.len()).filter(|&i| is_true[i]).map(|i| make(i, true));
    let falses = chosen.into_iter().map(|i| make(i, false));
    Ok(trues.chain(falses).collect())
}

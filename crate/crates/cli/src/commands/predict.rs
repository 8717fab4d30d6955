use serde::Serialize;
use tdm_core::corpus::{LabelVocabulary, VocabEntry};
use tdm_core::doctaet::ContextFeature;
use tdm_core::predict::{predict_corpus, PredictConfig};
use tdm_core::records::{read_records, write_jsonl};
use tdm_core::replay::ReplayMode;
use tdm_core::scorer::{BaselineScorer, RemoteConfig, RemoteScorer, Scorer};

use super::{parent_dir, replay_mode, write_failures, Failure};
use crate::args::PredictArgs;
use crate::config::{pick, pick_flag, FileConfig};
use crate::manifest::{sibling, RunManifest};
use crate::{Outcome, UsageError};

/// Bearer token for the model service.
pub const TOKEN_ENV: &str = "TDM_ENDPOINT_TOKEN";

#[derive(Debug, Serialize)]
struct PredictRunConfig<'a> {
    scorer: &'a str,
    endpoint: Option<&'a str>,
    predict: PredictConfig,
}

pub fn run(args: PredictArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let predict = PredictConfig {
        threshold: pick(file.threshold, args.threshold, PredictConfig::default().threshold),
        top_k: file.top_k.or(args.top_k),
        lexical_prefilter: pick_flag(file.lexical_prefilter, args.lexical_prefilter),
    };
    predict.validate().map_err(|e| UsageError(e.to_string()))?;
    let scorer_name = pick(file.scorer.clone(), args.scorer.clone(), "baseline".into());
    let endpoint = file.endpoint.clone().or(args.endpoint.clone());
    let replay = replay_mode(file.replay.clone().or(args.replay.replay), file.record.clone().or(args.replay.record))?;

    let scorer: Box<dyn Scorer> = match scorer_name.as_str() {
        "baseline" => Box::new(BaselineScorer),
        "remote" => {
            let base = match (&endpoint, &replay) {
                (Some(e), _) => e.clone(),
                (None, Some(ReplayMode::Replay(_))) => "http://127.0.0.1:9".into(),
                (None, _) => return Err(UsageError("--scorer remote needs --endpoint (or --replay)".into()).into()),
            };
            let cfg = RemoteConfig {
                token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
                ..RemoteConfig::new(base)
            };
            let mut remote = RemoteScorer::new(cfg)?;
            if let Some(mode) = replay {
                remote = remote.with_replay(mode);
            }
            Box::new(remote)
        }
        other => return Err(UsageError(format!("--scorer: unknown scorer `{other}` (baseline | remote)")).into()),
    };

    let features: Vec<ContextFeature> = read_records(&args.features)?;
    let vocab = LabelVocabulary::from_entries(read_records::<VocabEntry>(&args.vocab)?)?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (feature, result) in sorted_ids(&features).iter().zip(predict_corpus(&features, &vocab, scorer.as_ref(), &predict)) {
        match result {
            Ok(set) => rows.extend(set.records()),
            Err(e) => failures.push(Failure {
                paper_id: feature.to_string(),
                stage: "predict",
                error: e.to_string(),
            }),
        }
    }

    parent_dir(&args.out)?;
    write_jsonl(&args.out, &rows)?;
    write_failures(&sibling(&args.out, "failures.jsonl"), &mut failures)?;

    let run_cfg = PredictRunConfig {
        scorer: scorer.name(),
        endpoint: endpoint.as_deref().filter(|_| scorer_name == "remote"),
        predict,
    };
    let mut manifest = RunManifest::new("predict", &run_cfg, None)?;
    manifest.input(&args.features)?;
    manifest.input(&args.vocab)?;
    manifest.outputs = vec![file_name(&args.out)];
    manifest.records = rows.len();
    manifest.failures = failures.len();
    manifest.write_beside(&args.out)?;

    eprintln!(
        "predicted {} paper(s) with the {} scorer, {} failure(s)",
        features.len() - failures.len(),
        scorer.name(),
        failures.len()
    );
    Ok(Outcome {
        failures: failures.len(),
    })
}

/// Paper ids in the order `predict_corpus` returns results.
fn sorted_ids(features: &[ContextFeature]) -> Vec<&str> {
    let mut ids: Vec<&str> = features.iter().map(|f| f.paper_id.as_str()).collect();
    ids.sort();
    ids
}

pub fn file_name(path: &std::path::Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

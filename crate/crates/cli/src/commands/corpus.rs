use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use tdm_core::corpus::{
    assign_unknown, build_vocabulary, generate_instances, load_annotations, make_folds, InstanceRecord,
    SamplingConfig,
};
use tdm_core::doctaet::ContextFeature;
use tdm_core::records::{read_records, write_jsonl};

use super::stats::split_table;
use super::{ensure_dir, write_failures, Failure};
use crate::args::BuildCorpusArgs;
use crate::config::{pick, FileConfig};
use crate::manifest::RunManifest;
use crate::{Outcome, UsageError};

#[derive(Debug, Serialize)]
struct CorpusConfig {
    num_false: usize,
    seed: u64,
    min_frequency: usize,
}

#[derive(Debug, Serialize)]
struct Warning {
    warning: String,
}

pub fn run(args: BuildCorpusArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let cfg = CorpusConfig {
        num_false: pick(file.num_false, args.num_false, SamplingConfig::default().num_false),
        seed: pick(file.seed, args.seed, 0),
        min_frequency: pick(file.min_frequency, args.min_frequency, 1),
    };
    let sampling = SamplingConfig {
        num_false: cfg.num_false,
        rng_seed: cfg.seed,
    };
    sampling.validate().map_err(|e| UsageError(e.to_string()))?;
    if cfg.min_frequency == 0 {
        return Err(UsageError("--min-frequency must be at least 1".into()).into());
    }

    let loaded = load_annotations(&args.papers, &args.evaluations)?;
    let features: Vec<ContextFeature> = read_records(&args.features)?;
    let features: BTreeMap<&str, Arc<ContextFeature>> = features
        .iter()
        .map(|f| (f.paper_id.as_str(), Arc::new(f.clone())))
        .collect();

    let vocab = build_vocabulary(&loaded.papers, cfg.min_frequency).context("building the label vocabulary")?;
    let mut annotations = assign_unknown(&loaded.papers, &vocab);
    annotations.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));

    let per_paper: Vec<Result<Vec<InstanceRecord>, Failure>> = annotations
        .par_iter()
        .map(|paper| {
            let fail = |stage, error: String| Failure {
                paper_id: paper.paper_id.clone(),
                stage,
                error,
            };
            let ctx = features
                .get(paper.paper_id.as_str())
                .ok_or_else(|| fail("instances", "no context feature for this paper".into()))?;
            generate_instances(paper, ctx, &vocab, &sampling)
                .map(|v| v.iter().map(InstanceRecord::from).collect())
                .map_err(|e| fail("instances", e.to_string()))
        })
        .collect();
    let mut instances = Vec::new();
    let mut failures = Vec::new();
    for r in per_paper {
        match r {
            Ok(rows) => instances.extend(rows),
            Err(f) => failures.push(f),
        }
    }

    // A predefined split is honoured; otherwise papers are halved at random.
    let folds = if annotations.iter().all(|a| a.split.is_some()) {
        annotations
            .iter()
            .map(|a| format!("{}\t{}\n", a.paper_id, a.split.expect("checked above")))
            .collect::<String>()
    } else {
        make_folds(&annotations, cfg.seed)?.to_manifest()
    };

    ensure_dir(&args.out)?;
    write_jsonl(&args.out.join("annotations.jsonl"), &annotations)?;
    write_jsonl(&args.out.join("vocab.jsonl"), &vocab.entries())?;
    write_jsonl(&args.out.join("instances.jsonl"), &instances)?;
    std::fs::write(args.out.join("folds.tsv"), folds)?;
    let warnings: Vec<Warning> = loaded
        .warnings
        .iter()
        .map(|w| {
            log::warn!("{w}");
            Warning { warning: w.to_string() }
        })
        .collect();
    write_jsonl(&args.out.join("warnings.jsonl"), &warnings)?;
    write_failures(&args.out.join("failures.jsonl"), &mut failures)?;

    let mut manifest = RunManifest::new("build-corpus", &cfg, Some(cfg.seed))?;
    manifest.input(&args.papers)?;
    manifest.input(&args.evaluations)?;
    manifest.input(&args.features)?;
    manifest.outputs = ["annotations.jsonl", "vocab.jsonl", "instances.jsonl", "folds.tsv", "warnings.jsonl", "failures.jsonl"]
        .map(String::from)
        .to_vec();
    manifest.records = instances.len();
    manifest.failures = failures.len();
    manifest.write_in(&args.out)?;

    if args.stats {
        print!("{}", split_table(&loaded.papers));
    }
    eprintln!(
        "{} paper(s), {} vocabulary triple(s), {} instance(s), {} failure(s)",
        annotations.len(),
        vocab.len(),
        instances.len(),
        failures.len()
    );
    Ok(Outcome {
        failures: failures.len(),
    })
}

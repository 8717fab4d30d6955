use std::collections::BTreeMap;

use serde::Serialize;
use tdm_core::corpus::released::load_released_split;
use tdm_core::corpus::{corpus_stats, load_annotations, CorpusStats, PaperAnnotation, Split};
use tdm_core::doctaet::{feature_length_stats, length_stats, ContextFeature, LengthStats};
use tdm_core::records::read_records;

use crate::args::StatsArgs;
use crate::{Outcome, UsageError};

#[derive(Debug, Default, Serialize)]
struct StatsOutput {
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    corpus: BTreeMap<String, CorpusStats>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    feature_lengths: BTreeMap<String, LengthStats>,
}

/// Papers grouped by predefined split; `all` when no split is recorded.
pub fn by_split(papers: &[PaperAnnotation]) -> Vec<(String, Vec<PaperAnnotation>)> {
    if papers.iter().all(|p| p.split.is_none()) {
        return vec![("All".into(), papers.to_vec())];
    }
    let mut out = Vec::new();
    for split in [Some(Split::Train), Some(Split::Test), None] {
        let members: Vec<PaperAnnotation> = papers.iter().filter(|p| p.split == split).cloned().collect();
        if !members.is_empty() {
            let name = match split {
                Some(Split::Train) => "Train",
                Some(Split::Test) => "Test",
                None => "Unsplit",
            };
            out.push((name.to_owned(), members));
        }
    }
    out
}

pub fn split_table(papers: &[PaperAnnotation]) -> String {
    let stats: Vec<(String, CorpusStats)> = by_split(papers)
        .into_iter()
        .map(|(name, members)| (name, corpus_stats(&members)))
        .collect();
    let columns: Vec<(&str, &CorpusStats)> = stats.iter().map(|(n, s)| (n.as_str(), s)).collect();
    CorpusStats::table(&columns)
}

pub fn run(args: StatsArgs) -> anyhow::Result<Outcome> {
    let mut out = StatsOutput::default();
    let mut text = String::new();

    if let (Some(papers), Some(evals)) = (&args.papers, &args.evaluations) {
        let loaded = load_annotations(papers, evals)?;
        for w in &loaded.warnings {
            log::warn!("{w}");
        }
        for (name, members) in by_split(&loaded.papers) {
            out.corpus.insert(name, corpus_stats(&members));
        }
        text.push_str(&split_table(&loaded.papers));
    }

    let released = [(Split::Train, &args.released_train), (Split::Test, &args.released_test)];
    let mut released_stats: Vec<(String, CorpusStats)> = Vec::new();
    for (split, path) in released {
        let Some(path) = path else { continue };
        let r = load_released_split(path, split)?;
        for w in &r.warnings {
            log::warn!("{w}");
        }
        let name = if split == Split::Train { "Train" } else { "Test" };
        let s = corpus_stats(&r.annotations);
        out.corpus.insert(format!("released-{}", name.to_lowercase()), s.clone());
        released_stats.push((name.to_owned(), s));
        if let Ok(l) = length_stats(r.context_lengths.values().copied()) {
            out.feature_lengths.insert(format!("released-{}", name.to_lowercase()), l);
            text.push_str(&format!("{name} context lengths: {l}\n"));
        }
    }
    if !released_stats.is_empty() {
        let columns: Vec<(&str, &CorpusStats)> = released_stats.iter().map(|(n, s)| (n.as_str(), s)).collect();
        text.push_str(&CorpusStats::table(&columns));
    }

    if let Some(path) = &args.features {
        let features: Vec<ContextFeature> = read_records(path)?;
        let l = feature_length_stats(&features).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        out.feature_lengths.insert("features".into(), l);
        text.push_str(&format!("feature lengths: {l}\n"));
    }

    if out.corpus.is_empty() && out.feature_lengths.is_empty() {
        return Err(UsageError("nothing to report: pass --papers/--evaluations, --released-train/--released-test or --features".into()).into());
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        print!("{text}");
    }
    Ok(Outcome::default())
}

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Concept, PaperAnnotation, TdmTriple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub papers: usize,
    pub unknown_papers: usize,
    pub total_triples: usize,
    /// Mean triples over papers that carry at least one triple.
    pub avg_triples_per_paper: f64,
    pub distinct_triples: usize,
    pub distinct_tasks: usize,
    pub distinct_datasets: usize,
    pub distinct_metrics: usize,
}

pub fn corpus_stats(annotations: &[PaperAnnotation]) -> CorpusStats {
    let mut distinct: BTreeSet<&TdmTriple> = BTreeSet::new();
    let mut total = 0;
    let mut unknown = 0;
    for paper in annotations {
        let before = total;
        for t in paper.tdm_triples() {
            total += 1;
            distinct.insert(t);
        }
        if total == before {
            unknown += 1;
        }
    }
    let count = |c: Concept| distinct.iter().map(|t| t.concept(c)).collect::<BTreeSet<_>>().len();
    let labelled = annotations.len() - unknown;
    CorpusStats {
        papers: annotations.len(),
        unknown_papers: unknown,
        total_triples: total,
        avg_triples_per_paper: if labelled == 0 {
            0.0
        } else {
            total as f64 / labelled as f64
        },
        distinct_triples: distinct.len(),
        distinct_tasks: count(Concept::Task),
        distinct_datasets: count(Concept::Dataset),
        distinct_metrics: count(Concept::Metric),
    }
}

impl CorpusStats {
    /// Render several columns (e.g. train and test) as one plain-text table.
    pub fn table(columns: &[(&str, &CorpusStats)]) -> String {
        type Row = (&'static str, fn(&CorpusStats) -> String);
        let rows: [Row; 8] = [
            ("Papers", |s| s.papers.to_string()),
            ("\"unknown\" annotations", |s| s.unknown_papers.to_string()),
            ("Total TDM-triples", |s| s.total_triples.to_string()),
            ("Avg. number of TDM-triples per paper", |s| format!("{:.1}", s.avg_triples_per_paper)),
            ("Distinct TDM-triples", |s| s.distinct_triples.to_string()),
            ("Distinct Tasks", |s| s.distinct_tasks.to_string()),
            ("Distinct Datasets", |s| s.distinct_datasets.to_string()),
            ("Distinct Metrics", |s| s.distinct_metrics.to_string()),
        ];
        let mut out = format!("{:<38}", "");
        for (name, _) in columns {
            let _ = write!(out, "{name:>10}");
        }
        out.push('\n');
        for (label, f) in rows {
            let _ = write!(out, "{label:<38}");
            for (_, s) in columns {
                let _ = write!(out, "{:>10}", f(s));
            }
            out.push('\n');
        }
        out
    }
}

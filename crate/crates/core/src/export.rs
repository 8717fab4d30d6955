//! Knowledge-graph export of accepted predictions.
//!
//! Each exported record yields three relation statements from the paper
//! resource and one `rdfs:label` statement per task, dataset and metric
//! node. Node IRIs are slugs of the label, so papers sharing a label share
//! the node.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Concept, PaperAnnotation};
use crate::predict::PredictionSet;

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const DEFAULT_BASE_IRI: &str = "https://example.org/tdm/";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("invalid base IRI `{0}`")]
    InvalidBaseIri(String),
    #[error("failed to serialize record: {0}")]
    Serialize(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    NTriples,
    JsonLines,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ntriples" | "nt" => Ok(ExportFormat::NTriples),
            "jsonlines" | "jsonl" => Ok(ExportFormat::JsonLines),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub paper_id: String,
    pub paper_title: String,
    pub paper_url: String,
    pub task: String,
    pub dataset: String,
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportWarning {
    pub paper_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportOutput {
    pub text: String,
    pub records: usize,
    pub warnings: Vec<ExportWarning>,
}

/// Lowercase, every non-alphanumeric character becomes `-`.
pub fn slug(label: &str) -> String {
    label
        .chars()
        .flat_map(|c| {
            if c.is_alphanumeric() {
                c.to_lowercase().collect::<Vec<_>>()
            } else {
                vec!['-']
            }
        })
        .collect()
}

/// Slugs for a set of labels. Distinct labels that collapse to the same
/// slug get `-2`, `-3`, ... suffixes in label order so nodes stay distinct.
fn slug_table<'a>(labels: impl IntoIterator<Item = &'a str>) -> BTreeMap<&'a str, String> {
    let sorted: BTreeSet<&str> = labels.into_iter().collect();
    let mut taken: HashSet<String> = HashSet::new();
    let mut out = BTreeMap::new();
    // Plain slugs are reserved first so a suffixed slug never steals one.
    let plain: Vec<(&str, String)> = sorted.iter().map(|l| (*l, slug(l))).collect();
    let mut first_owner: BTreeMap<&str, &str> = BTreeMap::new();
    for (label, s) in &plain {
        first_owner.entry(s.as_str()).or_insert(label);
    }
    for (s, label) in &first_owner {
        taken.insert((*s).to_owned());
        out.insert(*label, (*s).to_owned());
    }
    for (label, s) in plain {
        if out.contains_key(label) {
            continue;
        }
        let mut n = 2;
        let unique = loop {
            let candidate = format!("{s}-{n}");
            if !taken.contains(&candidate) {
                break candidate;
            }
            n += 1;
        };
        taken.insert(unique.clone());
        out.insert(label, unique);
    }
    out
}

fn validate_base_iri(base: &str) -> Result<String, ExportError> {
    let bad = |c: char| c.is_control() || c.is_whitespace() || "<>\"{}|^`\\".contains(c);
    let scheme_ok = base
        .split_once(':')
        .is_some_and(|(s, _)| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)));
    if !scheme_ok || base.chars().any(bad) {
        return Err(ExportError::InvalidBaseIri(base.to_owned()));
    }
    let mut b = base.to_owned();
    if !b.ends_with('/') && !b.ends_with('#') {
        b.push('/');
    }
    Ok(b)
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            _ => out.push(c),
        }
    }
    out
}

/// Accepted predictions joined with paper metadata, Unknown excluded,
/// sorted and deduplicated.
pub fn benchmark_records(predictions: &[PredictionSet], annotations: &[PaperAnnotation]) -> Vec<BenchmarkRecord> {
    let meta: BTreeMap<&str, &PaperAnnotation> = annotations.iter().map(|a| (a.paper_id.as_str(), a)).collect();
    let mut out: BTreeSet<BenchmarkRecord> = BTreeSet::new();
    for p in predictions {
        let a = meta.get(p.paper_id.as_str());
        for t in p.predicted.iter().filter(|t| !t.is_unknown()) {
            out.insert(BenchmarkRecord {
                paper_id: p.paper_id.clone(),
                paper_title: a.map(|a| a.title.clone()).unwrap_or_default(),
                paper_url: a.map(|a| a.url.clone()).unwrap_or_default(),
                task: t.task().to_owned(),
                dataset: t.dataset().to_owned(),
                metric: t.metric().to_owned(),
                model_name: None,
                score: None,
            });
        }
    }
    out.into_iter().collect()
}

fn unserializable(r: &BenchmarkRecord) -> Option<String> {
    for (field, v) in [
        ("paper_id", &r.paper_id),
        ("task", &r.task),
        ("dataset", &r.dataset),
        ("metric", &r.metric),
    ] {
        if v.trim().is_empty() {
            return Some(format!("empty {field}"));
        }
        if v.chars().any(char::is_control) {
            return Some(format!("control character in {field}"));
        }
    }
    None
}

pub fn export_triples(
    predictions: &[PredictionSet],
    annotations: &[PaperAnnotation],
    format: ExportFormat,
    base_iri: &str,
) -> Result<ExportOutput, ExportError> {
    export_records(&benchmark_records(predictions, annotations), format, base_iri)
}

pub fn export_records(
    records: &[BenchmarkRecord],
    format: ExportFormat,
    base_iri: &str,
) -> Result<ExportOutput, ExportError> {
    let base = validate_base_iri(base_iri)?;
    let mut warnings = Vec::new();
    let mut kept: Vec<&BenchmarkRecord> = Vec::with_capacity(records.len());
    for r in records {
        match unserializable(r) {
            Some(reason) => {
                log::warn!("skipping record of paper {}: {reason}", r.paper_id);
                warnings.push(ExportWarning {
                    paper_id: r.paper_id.clone(),
                    reason,
                });
            }
            None => kept.push(r),
        }
    }

    let text = match format {
        ExportFormat::JsonLines => {
            let mut out = String::new();
            for r in &kept {
                let line = serde_json::to_string(r).map_err(|e| ExportError::Serialize(e.to_string()))?;
                out.push_str(&line);
                out.push('\n');
            }
            out
        }
        ExportFormat::NTriples => ntriples(&kept, &base),
    };
    Ok(ExportOutput {
        text,
        records: kept.len(),
        warnings,
    })
}

fn ntriples(records: &[&BenchmarkRecord], base: &str) -> String {
    let papers = slug_table(records.iter().map(|r| r.paper_id.as_str()));
    let owned: Vec<[String; 3]> = records
        .iter()
        .map(|r| [r.task.clone(), r.dataset.clone(), r.metric.clone()])
        .collect();
    let tables: Vec<BTreeMap<&str, String>> = (0..3)
        .map(|i| slug_table(owned.iter().map(|f| f[i].as_str())))
        .collect();

    let mut seen: HashSet<String> = HashSet::new();
    let mut out = String::new();
    let mut emit = |out: &mut String, line: String| {
        if seen.insert(line.clone()) {
            out.push_str(&line);
        }
    };
    for (r, labels) in records.iter().zip(&owned) {
        let subject = format!("{base}paper/{}", papers[r.paper_id.as_str()]);
        let nodes: Vec<String> = Concept::ALL
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{base}{}/{}", namespace(*c), tables[i][labels[i].as_str()]))
            .collect();
        for (i, c) in Concept::ALL.iter().enumerate() {
            let mut line = String::new();
            let _ = writeln!(line, "<{subject}> <{base}vocab/{}> <{}> .", predicate(*c), nodes[i]);
            emit(&mut out, line);
        }
        for (i, node) in nodes.iter().enumerate() {
            let mut line = String::new();
            let _ = writeln!(line, "<{node}> <{RDFS_LABEL}> \"{}\" .", escape_literal(&labels[i]));
            emit(&mut out, line);
        }
    }
    out
}

fn namespace(c: Concept) -> &'static str {
    match c {
        Concept::Task => "task",
        Concept::Dataset => "dataset",
        Concept::Metric => "metric",
    }
}

fn predicate(c: Concept) -> &'static str {
    match c {
        Concept::Task => "hasResearchProblem",
        Concept::Dataset => "evaluatesOnDataset",
        Concept::Metric => "evaluatesWithMetric",
    }
}

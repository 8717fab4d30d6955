use serde::Serialize;
use tdm_core::corpus::PaperAnnotation;
use tdm_core::export::{export_triples, ExportFormat, DEFAULT_BASE_IRI};
use tdm_core::predict::{group_records, PredictionRecord};
use tdm_core::records::read_records;

use super::predict::file_name;
use super::{parent_dir, write_failures, Failure};
use crate::args::ExportArgs;
use crate::config::{parse_value, pick, FileConfig};
use crate::manifest::{sibling, RunManifest};
use crate::{Outcome, UsageError};

#[derive(Debug, Serialize)]
struct ExportConfig {
    format: ExportFormat,
    base_iri: String,
}

pub fn run(args: ExportArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let cfg = ExportConfig {
        format: parse_value("format", &pick(file.format.clone(), args.format.clone(), "ntriples".into()))?,
        base_iri: pick(file.base_iri.clone(), args.base_iri.clone(), DEFAULT_BASE_IRI.into()),
    };
    let records: Vec<PredictionRecord> = read_records(&args.predictions)?;
    let predictions = group_records(&records)?;
    let gold: Vec<PaperAnnotation> = match &args.gold {
        Some(p) => read_records(p)?,
        None => Vec::new(),
    };

    let out = export_triples(&predictions, &gold, cfg.format, &cfg.base_iri).map_err(|e| UsageError(e.to_string()))?;
    parent_dir(&args.out)?;
    std::fs::write(&args.out, &out.text)?;
    let mut failures: Vec<Failure> = out
        .warnings
        .iter()
        .map(|w| Failure {
            paper_id: w.paper_id.clone(),
            stage: "export",
            error: w.reason.clone(),
        })
        .collect();
    write_failures(&sibling(&args.out, "failures.jsonl"), &mut failures)?;

    let mut manifest = RunManifest::new("export", &cfg, None)?;
    manifest.input(&args.predictions)?;
    if let Some(g) = &args.gold {
        manifest.input(g)?;
    }
    manifest.outputs = vec![file_name(&args.out)];
    manifest.records = out.records;
    manifest.failures = failures.len();
    manifest.write_beside(&args.out)?;

    eprintln!("exported {} record(s), skipped {}", out.records, failures.len());
    Ok(Outcome {
        failures: failures.len(),
    })
}

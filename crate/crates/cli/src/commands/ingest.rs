use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;
use tdm_core::doctaet::{extract_doctaet, ContextFeature, DocTaetConfig};
use tdm_core::ingest::{
    convert_latex, parse_tei, ConverterConfig, PdfParserClient, SourceKind, StructuredDoc, DEFAULT_CONVERTER_COMMAND,
};
use tdm_core::records::write_jsonl;

use super::{ensure_dir, replay_mode, write_failures, Failure};
use crate::args::IngestArgs;
use crate::config::{parse_value, pick, pick_flag, FileConfig};
use crate::manifest::RunManifest;
use crate::{Outcome, UsageError};

const PDF_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Serialize)]
struct IngestConfig {
    source: SourceKind,
    cap: Option<usize>,
    exp_table_budget: Option<usize>,
    converter: Option<String>,
    parser_endpoint: Option<String>,
}

enum Converter {
    Tei,
    Latex(ConverterConfig),
    Pdf(PdfParserClient),
}

impl Converter {
    fn tei(&self, path: &Path) -> Result<Vec<u8>, (&'static str, String)> {
        match self {
            Converter::Tei => std::fs::read(path).map_err(|e| ("read", e.to_string())),
            Converter::Latex(cfg) => convert_latex(path, cfg)
                .map(String::into_bytes)
                .map_err(|e| ("convert", e.to_string())),
            Converter::Pdf(client) => client
                .convert_pdf(path)
                .map(String::into_bytes)
                .map_err(|e| ("convert", e.to_string())),
        }
    }
}

pub fn run(args: IngestArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let source_raw = pick(file.source.clone(), args.source.clone(), "tei".into());
    let source: SourceKind = parse_value("source", &source_raw)?;
    let uncapped = pick_flag(file.uncapped, args.uncapped);
    let doctaet = if uncapped {
        DocTaetConfig::uncapped()
    } else {
        DocTaetConfig::with_cap(pick(file.cap, args.cap, 512))
    };
    doctaet.validate().map_err(|e| UsageError(e.to_string()))?;

    let converter_cmd = pick(file.converter.clone(), args.converter.clone(), DEFAULT_CONVERTER_COMMAND.into());
    let endpoint = file.parser_endpoint.clone().or(args.endpoint.clone());
    let replay = replay_mode(file.replay.clone().or(args.replay.replay), file.record.clone().or(args.replay.record))?;

    let converter = match source {
        SourceKind::Tei => Converter::Tei,
        SourceKind::Latex => Converter::Latex(ConverterConfig {
            command: converter_cmd.clone(),
        }),
        SourceKind::Pdf => {
            let base = match (&endpoint, &replay) {
                (Some(e), _) => e.clone(),
                (None, Some(tdm_core::replay::ReplayMode::Replay(_))) => "http://127.0.0.1:9".into(),
                (None, _) => return Err(UsageError("--source pdf needs --endpoint (or --replay)".into()).into()),
            };
            let mut client = PdfParserClient::new(base, PDF_TIMEOUT)?;
            if let Some(mode) = replay {
                client = client.with_replay(mode);
            }
            Converter::Pdf(client)
        }
    };

    let inputs = collect_inputs(&args.input, source)?;
    if inputs.is_empty() {
        return Err(UsageError(format!(
            "no {source} inputs ({}) in {}",
            source.extensions().join(", "),
            args.input.display()
        ))
        .into());
    }

    let results: Vec<Result<(StructuredDoc, ContextFeature), Failure>> = inputs
        .par_iter()
        .map(|(paper_id, path)| {
            let fail = |(stage, error): (&'static str, String)| Failure {
                paper_id: paper_id.clone(),
                stage,
                error,
            };
            let tei = converter.tei(path).map_err(fail)?;
            let doc = parse_tei(paper_id, &tei).map_err(|e| fail(("parse", e.to_string())))?;
            let feature = extract_doctaet(&doc, &doctaet).map_err(|e| fail(("doctaet", e.to_string())))?;
            Ok((doc, feature))
        })
        .collect();

    let mut docs = Vec::new();
    let mut features = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((d, f)) => {
                docs.push(d);
                features.push(f);
            }
            Err(f) => failures.push(f),
        }
    }

    ensure_dir(&args.out)?;
    write_jsonl(&args.out.join("docs.jsonl"), &docs)?;
    write_jsonl(&args.out.join("features.jsonl"), &features)?;
    write_failures(&args.out.join("failures.jsonl"), &mut failures)?;

    let cfg = IngestConfig {
        source,
        cap: doctaet.cap,
        exp_table_budget: doctaet.exp_table_budget,
        converter: (source == SourceKind::Latex).then_some(converter_cmd),
        parser_endpoint: if source == SourceKind::Pdf { endpoint } else { None },
    };
    let mut manifest = RunManifest::new("ingest", &cfg, None)?;
    let paths: Vec<PathBuf> = inputs.into_iter().map(|(_, p)| p).collect();
    manifest.input_dir(&args.input, &paths)?;
    manifest.outputs = vec!["docs.jsonl".into(), "features.jsonl".into(), "failures.jsonl".into()];
    manifest.records = features.len();
    manifest.failures = failures.len();
    manifest.write_in(&args.out)?;

    eprintln!("ingested {} paper(s), {} failure(s)", features.len(), failures.len());
    Ok(Outcome {
        failures: failures.len(),
    })
}

/// `(paper_id, path)` of every input file in `dir`, sorted by paper id.
/// LaTeX papers may also be subdirectories holding a single `.tex` root
/// (`<id>/main.tex` or `<id>/<id>.tex`).
fn collect_inputs(dir: &Path, source: SourceKind) -> anyhow::Result<Vec<(String, PathBuf)>> {
    let entries = std::fs::read_dir(dir).with_context(|| format!("reading input directory {}", dir.display()))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() && source == SourceKind::Latex {
            let Some(id) = path.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
                continue;
            };
            let root = [path.join("main.tex"), path.join(format!("{id}.tex"))]
                .into_iter()
                .find(|p| p.is_file());
            if let Some(root) = root {
                out.push((id, root));
            }
        } else if path.is_file() {
            if let Some(id) = source.paper_id_for(&path) {
                out.push((id, path));
            }
        }
    }
    out.sort();
    if let Some(w) = out.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(UsageError(format!("duplicate paper id `{}` in {}", w[0].0, dir.display())).into());
    }
    Ok(out)
}

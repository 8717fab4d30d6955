use std::collections::BTreeMap;

use serde::Serialize;
use tdm_core::corpus::{read_fold_manifest, PaperAnnotation, Split};
use tdm_core::eval::{crossfold_average, EvalError, evaluate_with, EvaluationReport, MacroMode, Setting};
use tdm_core::predict::{group_records, PredictionRecord, PredictionSet};
use tdm_core::records::read_records;

use super::ensure_dir;
use crate::args::EvaluateArgs;
use crate::config::{parse_value, pick, FileConfig};
use crate::manifest::RunManifest;
use crate::{Outcome, UsageError};

#[derive(Debug, Serialize)]
struct EvalConfig {
    settings: Vec<Setting>,
    macro_mode: MacroMode,
    split: Option<Split>,
    cross_fold: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    /// Per evaluation group: `all`, a split name, or a fold name.
    groups: BTreeMap<String, Vec<EvaluationReport>>,
    /// Mean of the two fold reports, when folds were given.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    average: Vec<EvaluationReport>,
}

fn settings(raw: &str) -> Result<Vec<Setting>, UsageError> {
    if raw == "both" {
        return Ok(vec![Setting::WithUnknown, Setting::WithoutUnknown]);
    }
    Ok(vec![parse_value("setting", raw)?])
}

pub fn run(args: EvaluateArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let cfg = EvalConfig {
        settings: settings(&pick(file.setting.clone(), args.setting.clone(), "both".into()))?,
        macro_mode: parse_value("macro", &pick(file.macro_mode.clone(), args.macro_mode.clone(), "per-paper".into()))?,
        split: args.split.as_deref().map(|s| parse_value("split", s)).transpose()?,
        cross_fold: args.folds.is_some(),
    };

    let records: Vec<PredictionRecord> = read_records(&args.predictions)?;
    let predictions = group_records(&records)?;
    let gold: Vec<PaperAnnotation> = read_records(&args.gold)?;

    let gold_ids: std::collections::HashSet<&str> = gold.iter().map(|g| g.paper_id.as_str()).collect();
    if let Some(p) = predictions.iter().find(|p| !gold_ids.contains(p.paper_id.as_str())) {
        return Err(EvalError::UnknownPaperId(p.paper_id.clone()).into());
    }

    let mut groups: BTreeMap<String, Vec<PaperAnnotation>> = BTreeMap::new();
    match (&args.folds, cfg.split) {
        (Some(path), _) => {
            let folds = read_fold_manifest(path)?;
            for g in &gold {
                if let Some(fold) = folds.get(&g.paper_id) {
                    groups.entry(fold.clone()).or_default().push(g.clone());
                }
            }
            if groups.len() != 2 {
                return Err(UsageError(format!("fold manifest must name exactly two groups, found {}", groups.len())).into());
            }
        }
        (None, Some(split)) => {
            let kept: Vec<PaperAnnotation> = gold.iter().filter(|g| g.split == Some(split)).cloned().collect();
            groups.insert(split.to_string(), kept);
        }
        (None, None) => {
            groups.insert("all".into(), gold.clone());
        }
    }

    let mut report = Report {
        groups: BTreeMap::new(),
        average: Vec::new(),
    };
    let mut text = String::new();
    for (name, members) in &groups {
        let preds = restrict(&predictions, members);
        let mut reports = Vec::new();
        for &setting in &cfg.settings {
            let r = evaluate_with(&preds, members, setting, cfg.macro_mode)?;
            text.push_str(&r.to_table(name));
            text.push('\n');
            reports.push(r);
        }
        report.groups.insert(name.clone(), reports);
    }
    if cfg.cross_fold {
        let folds: Vec<&Vec<EvaluationReport>> = report.groups.values().collect();
        for (a, b) in folds[0].iter().zip(folds[1]) {
            let avg = crossfold_average(a, b)?;
            text.push_str(&avg.to_table("two-fold average"));
            text.push('\n');
            report.average.push(avg);
        }
    }

    ensure_dir(&args.out)?;
    std::fs::write(args.out.join("report.txt"), &text)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    std::fs::write(args.out.join("report.json"), json)?;

    let mut manifest = RunManifest::new("evaluate", &cfg, None)?;
    manifest.input(&args.predictions)?;
    manifest.input(&args.gold)?;
    if let Some(f) = &args.folds {
        manifest.input(f)?;
    }
    manifest.outputs = vec!["report.txt".into(), "report.json".into()];
    manifest.records = groups.values().map(Vec::len).sum();
    manifest.write_in(&args.out)?;

    print!("{text}");
    Ok(Outcome::default())
}

/// Predictions of the papers in `members`; predictions for other papers
/// belong to another group.
fn restrict(predictions: &[PredictionSet], members: &[PaperAnnotation]) -> Vec<PredictionSet> {
    let ids: std::collections::HashSet<&str> = members.iter().map(|m| m.paper_id.as_str()).collect();
    predictions
        .iter()
        .filter(|p| ids.contains(p.paper_id.as_str()))
        .cloned()
        .collect()
}

//! Micro/macro precision, recall and F1 of predicted label sets against gold.
//!
//! Micro scores pool TP/FP/FN over every (paper, label) decision. Macro
//! scores average per-paper precision and recall by default; a per-label
//! average is available through [`MacroMode::PerLabel`]. In both cases the
//! reported F1 is the harmonic mean of the reported precision and recall.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Concept, PaperAnnotation, TdmTriple};
use crate::predict::PredictionSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("prediction for paper {0} has no gold annotation")]
    UnknownPaperId(String),
    #[error("no papers left to evaluate")]
    EmptyEvaluation,
    #[error("cannot average reports with different settings")]
    SettingMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Unknown is an ordinary label and every paper counts.
    WithUnknown,
    /// Papers whose gold label is Unknown are excluded, and a predicted
    /// Unknown counts as predicting nothing.
    WithoutUnknown,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::WithUnknown => "with_unknown",
            Setting::WithoutUnknown => "without_unknown",
        })
    }
}

impl FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "with_unknown" => Ok(Setting::WithUnknown),
            "without_unknown" => Ok(Setting::WithoutUnknown),
            other => Err(format!("unknown evaluation setting `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacroMode {
    #[default]
    PerPaper,
    PerLabel,
}

impl FromStr for MacroMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "per_paper" | "paper" => Ok(MacroMode::PerPaper),
            "per_label" | "label" => Ok(MacroMode::PerLabel),
            other => Err(format!("unknown macro mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }

    pub fn from_counts(c: Counts) -> Self {
        Prf::from_pr(ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn_))
    }

    fn mean(a: &Prf, b: &Prf) -> Prf {
        Prf {
            precision: (a.precision + b.precision) / 2.0,
            recall: (a.recall + b.recall) / 2.0,
            f1: (a.f1 + b.f1) / 2.0,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    #[serde(rename = "macro")]
    pub macro_avg: Prf,
    pub micro: Prf,
}

impl Scores {
    fn mean(a: &Scores, b: &Scores) -> Scores {
        Scores {
            macro_avg: Prf::mean(&a.macro_avg, &b.macro_avg),
            micro: Prf::mean(&a.micro, &b.micro),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub setting: Setting,
    pub macro_mode: MacroMode,
    pub papers: usize,
    pub overall: Scores,
    pub per_concept: BTreeMap<Concept, Scores>,
}

/// (gold, predicted) label sets of one paper.
type PaperSets<L> = (BTreeSet<L>, BTreeSet<L>);

/// Core tally over any label type.
pub fn score_label_sets<L: Ord + Clone + std::hash::Hash>(papers: &[PaperSets<L>], mode: MacroMode) -> Scores {
    let mut micro = Counts::default();
    let mut per_label: HashMap<&L, Counts> = HashMap::new();
    let (mut p_sum, mut r_sum) = (0.0, 0.0);

    for (gold, pred) in papers {
        let tp = gold.intersection(pred).count();
        let c = Counts {
            tp,
            fp: pred.len() - tp,
            fn_: gold.len() - tp,
        };
        micro += c;
        p_sum += ratio(c.tp, c.tp + c.fp);
        r_sum += ratio(c.tp, c.tp + c.fn_);
        if mode == MacroMode::PerLabel {
            for l in gold.union(pred) {
                let e = per_label.entry(l).or_default();
                match (gold.contains(l), pred.contains(l)) {
                    (true, true) => e.tp += 1,
                    (false, true) => e.fp += 1,
                    (true, false) => e.fn_ += 1,
                    (false, false) => unreachable!(),
                }
            }
        }
    }

    let macro_avg = match mode {
        MacroMode::PerPaper => {
            let n = papers.len().max(1) as f64;
            Prf::from_pr(p_sum / n, r_sum / n)
        }
        MacroMode::PerLabel => {
            let n = per_label.len().max(1) as f64;
            let (p, r) = per_label.values().fold((0.0, 0.0), |(p, r), c| {
                (p + ratio(c.tp, c.tp + c.fp), r + ratio(c.tp, c.tp + c.fn_))
            });
            Prf::from_pr(p / n, r / n)
        }
    };
    Scores {
        macro_avg,
        micro: Prf::from_counts(micro),
    }
}

/// Pair gold and predicted triple sets per paper under `setting`, in
/// paper-id order.
fn paired_sets(
    predictions: &[PredictionSet],
    gold: &[PaperAnnotation],
    setting: Setting,
) -> Result<Vec<PaperSets<TdmTriple>>, EvalError> {
    let gold_by_id: BTreeMap<&str, &PaperAnnotation> =
        gold.iter().map(|g| (g.paper_id.as_str(), g)).collect();
    let mut pred_by_id: HashMap<&str, &PredictionSet> = HashMap::new();
    for p in predictions {
        if !gold_by_id.contains_key(p.paper_id.as_str()) {
            return Err(EvalError::UnknownPaperId(p.paper_id.clone()));
        }
        pred_by_id.insert(&p.paper_id, p);
    }

    let unknown_only = || BTreeSet::from([TdmTriple::unknown()]);
    let mut out = Vec::with_capacity(gold_by_id.len());
    for (id, g) in gold_by_id {
        let mut gold_set: BTreeSet<TdmTriple> = g.triples.clone();
        if gold_set.is_empty() {
            gold_set = unknown_only();
        }
        let mut pred_set = pred_by_id
            .get(id)
            .map(|p| p.predicted.clone())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(unknown_only);
        if setting == Setting::WithoutUnknown {
            if g.is_unknown() {
                continue;
            }
            gold_set.remove(&TdmTriple::unknown());
            pred_set.remove(&TdmTriple::unknown());
        }
        out.push((gold_set, pred_set));
    }
    if out.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    Ok(out)
}

/// Project triples onto one concept; Unknown maps to `None`.
fn project(sets: &[PaperSets<TdmTriple>], concept: Concept) -> Vec<PaperSets<Option<String>>> {
    let proj = |s: &BTreeSet<TdmTriple>| -> BTreeSet<Option<String>> {
        s.iter()
            .map(|t| (!t.is_unknown()).then(|| t.concept(concept).to_owned()))
            .collect()
    };
    sets.iter().map(|(g, p)| (proj(g), proj(p))).collect()
}

pub fn evaluate(
    predictions: &[PredictionSet],
    gold: &[PaperAnnotation],
    setting: Setting,
) -> Result<EvaluationReport, EvalError> {
    evaluate_with(predictions, gold, setting, MacroMode::PerPaper)
}

pub fn evaluate_with(
    predictions: &[PredictionSet],
    gold: &[PaperAnnotation],
    setting: Setting,
    mode: MacroMode,
) -> Result<EvaluationReport, EvalError> {
    let sets = paired_sets(predictions, gold, setting)?;
    let per_concept = Concept::ALL
        .iter()
        .map(|&c| (c, score_label_sets(&project(&sets, c), mode)))
        .collect();
    Ok(EvaluationReport {
        setting,
        macro_mode: mode,
        papers: sets.len(),
        overall: score_label_sets(&sets, mode),
        per_concept,
    })
}

pub fn evaluate_concept(
    predictions: &[PredictionSet],
    gold: &[PaperAnnotation],
    concept: Concept,
    setting: Setting,
) -> Result<Scores, EvalError> {
    let sets = paired_sets(predictions, gold, setting)?;
    Ok(score_label_sets(&project(&sets, concept), MacroMode::PerPaper))
}

/// Field-wise arithmetic mean of the two fold reports.
pub fn crossfold_average(a: &EvaluationReport, b: &EvaluationReport) -> Result<EvaluationReport, EvalError> {
    if a.setting != b.setting || a.macro_mode != b.macro_mode {
        return Err(EvalError::SettingMismatch);
    }
    let per_concept = Concept::ALL
        .iter()
        .map(|c| {
            let x = a.per_concept.get(c).copied().unwrap_or_default();
            let y = b.per_concept.get(c).copied().unwrap_or_default();
            (*c, Scores::mean(&x, &y))
        })
        .collect();
    Ok(EvaluationReport {
        setting: a.setting,
        macro_mode: a.macro_mode,
        papers: a.papers + b.papers,
        overall: Scores::mean(&a.overall, &b.overall),
        per_concept,
    })
}

impl EvaluationReport {
    /// Plain-text table: Ma-P, Ma-R, Ma-F1, Mi-P, Mi-R, Mi-F1.
    pub fn to_table(&self, title: &str) -> String {
        let mut out = String::new();
        let mode = match self.macro_mode {
            MacroMode::PerPaper => "per-paper",
            MacroMode::PerLabel => "per-label",
        };
        let _ = writeln!(
            out,
            "{title} [setting={}, macro={mode}, papers={}]",
            self.setting, self.papers
        );
        let _ = writeln!(
            out,
            "{:<10}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}",
            "", "Ma-P", "Ma-R", "Ma-F1", "Mi-P", "Mi-R", "Mi-F1"
        );
        let row = |out: &mut String, name: &str, s: &Scores| {
            let _ = writeln!(
                out,
                "{name:<10}{:>8.4}{:>8.4}{:>8.4}{:>8.4}{:>8.4}{:>8.4}",
                s.macro_avg.precision,
                s.macro_avg.recall,
                s.macro_avg.f1,
                s.micro.precision,
                s.micro.recall,
                s.micro.f1
            );
        };
        row(&mut out, "Overall", &self.overall);
        for (c, s) in &self.per_concept {
            row(&mut out, &c.to_string(), s);
        }
        out
    }
}

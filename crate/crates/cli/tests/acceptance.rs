//! Acceptance report: one line per criterion, exit status 1 if any fails.
//!
//! Criteria that need the released corpus read it from the environment:
//! `TDM_RELEASED_TRAIN` / `TDM_RELEASED_TEST` (entailment TSVs) and
//! `TDM_GROBID_FEATURES` / `TDM_LATEX_FEATURES` (uncapped `features.jsonl`
//! from `tdm ingest --uncapped`, or a released TSV whose contexts are
//! measured instead). Without them those lines read SKIP.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdm_core::corpus::released::load_released_split;
use tdm_core::corpus::{
    build_vocabulary, corpus_stats, generate_instances, Concept, InstanceRecord, PaperAnnotation, SamplingConfig, Split,
    TdmTriple,
};
use tdm_core::doctaet::{extract_doctaet, length_stats, ContextFeature, DocTaetConfig, LengthStats};
use tdm_core::eval::{evaluate, Prf, Scores, Setting};
use tdm_core::ingest::{Section, StructuredDoc, Table};
use tdm_core::predict::PredictionSet;
use tdm_core::records::{read_records, to_jsonl};

const AVG_TOLERANCE: f64 = 0.05;
const STATS_RUNTIME_LIMIT: Duration = Duration::from_secs(120);
const MEAN_LENGTH_TOLERANCE: f64 = 1.0;
const CAP_CASES: usize = 1000;
const CAPS: [usize; 2] = [512, 2000];
const SAMPLING_CORPORA_PER_SIZE: usize = 40;
const NUM_FALSE: [usize; 3] = [10, 50, 100];
const ORACLE_CORPORA: usize = 200;
const ORACLE_MAX_PAPERS: usize = 20;
const METRIC_TOLERANCE: f64 = 1e-12;
const SEED: u64 = 0x7D3_2024;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn report(name: &str, v: &Verdict) -> bool {
    match v {
        Verdict::Pass(d) => println!("PASS  {name}: {d}"),
        Verdict::Fail(d) => println!("FAIL  {name}: {d}"),
        Verdict::Skip(d) => println!("SKIP  {name}: {d}"),
    }
    !matches!(v, Verdict::Fail(_))
}

fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).map(PathBuf::from).filter(|p| !p.as_os_str().is_empty())
}

// Corpus statistics of the released split.

struct Expected {
    papers: usize,
    unknown: usize,
    total: usize,
    avg: f64,
}

const TRAIN: Expected = Expected { papers: 2946, unknown: 2359, total: 9614, avg: 4.3 };
const TEST: Expected = Expected { papers: 1262, unknown: 992, total: 4096, avg: 4.2 };
const TRAIN_DISTINCT: [usize; 4] = [1668, 262, 853, 528];

fn corpus_statistics() -> Verdict {
    let (Some(train), Some(test)) = (env_path("TDM_RELEASED_TRAIN"), env_path("TDM_RELEASED_TEST")) else {
        return Verdict::Skip("released corpus not available (set TDM_RELEASED_TRAIN and TDM_RELEASED_TEST)".into());
    };
    let start = Instant::now();
    let load = |p: &Path, split| load_released_split(p, split).map(|r| corpus_stats(&r.annotations));
    let (tr, te) = match (load(&train, Split::Train), load(&test, Split::Test)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Verdict::Fail(format!("loading released split: {e}")),
    };
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    for (name, got, want) in [("train", &tr, &TRAIN), ("test", &te, &TEST)] {
        for (field, g, w) in [
            ("papers", got.papers, want.papers),
            ("unknown", got.unknown_papers, want.unknown),
            ("triples", got.total_triples, want.total),
        ] {
            if g != w {
                problems.push(format!("{name} {field} {g} != {w}"));
            }
        }
        if (got.avg_triples_per_paper - want.avg).abs() > AVG_TOLERANCE {
            problems.push(format!("{name} avg {:.3} not within {AVG_TOLERANCE} of {}", got.avg_triples_per_paper, want.avg));
        }
    }
    let distinct = [tr.distinct_triples, tr.distinct_tasks, tr.distinct_datasets, tr.distinct_metrics];
    if distinct != TRAIN_DISTINCT {
        problems.push(format!("train distinct triples/tasks/datasets/metrics {distinct:?} != {TRAIN_DISTINCT:?}"));
    }
    if elapsed > STATS_RUNTIME_LIMIT {
        problems.push(format!("took {elapsed:?}"));
    }
    if problems.is_empty() {
        Verdict::Pass(format!("all counts exact, {elapsed:.2?}"))
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

// Feature-length statistics.

fn measured_lengths(path: &Path) -> Result<LengthStats, String> {
    let is_jsonl = path.extension().is_some_and(|e| e == "jsonl");
    let counts: Vec<usize> = if is_jsonl {
        let feats: Vec<ContextFeature> = read_records(path).map_err(|e| e.to_string())?;
        feats.iter().map(|f| f.token_count).collect()
    } else {
        let r = load_released_split(path, Split::Train).map_err(|e| e.to_string())?;
        r.context_lengths.into_values().collect()
    };
    length_stats(counts).map_err(|e| e.to_string())
}

fn feature_lengths(var: &str, max: usize, min: usize, mean: f64) -> Verdict {
    let Some(path) = env_path(var) else {
        return Verdict::Skip(format!("uncapped features not available (set {var})"));
    };
    match measured_lengths(&path) {
        Err(e) => Verdict::Fail(e),
        Ok(s) => {
            let ok = s.max == max && s.min == min && (s.mean - mean).abs() <= MEAN_LENGTH_TOLERANCE;
            let detail = format!("max {} min {} mean {:.2} (expected {max}/{min}/{mean:.2})", s.max, s.min, s.mean);
            if ok {
                Verdict::Pass(detail)
            } else {
                Verdict::Fail(detail)
            }
        }
    }
}

// Token cap invariant.

const HEADINGS: [&str; 7] = ["Introduction", "Experimental Setup", "Experiments", "Results", "Evaluation", "Data", ""];

fn random_words(rng: &mut ChaCha8Rng, max: usize) -> String {
    let n = rng.random_range(0..=max);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let len = rng.random_range(1..9);
        let mut w: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
        match rng.random_range(0..10) {
            0 => w.push('.'),
            1 => w.push(','),
            2 => w.push('?'),
            _ => {}
        }
        out.push(w);
    }
    out.join(if rng.random_bool(0.1) { " \n " } else { " " })
}

fn random_doc(rng: &mut ChaCha8Rng) -> StructuredDoc {
    let sections = (0..rng.random_range(0..8))
        .map(|_| {
            let heading = HEADINGS[rng.random_range(0..HEADINGS.len())];
            let paragraphs = (0..rng.random_range(0..5)).map(|_| random_words(rng, 250)).collect();
            Section {
                depth: rng.random_range(1..4),
                ..Section::new(heading, paragraphs)
            }
        })
        .collect();
    let tables = (0..rng.random_range(0..5))
        .map(|_| {
            let caption = random_words(rng, 40);
            let cells = (0..rng.random_range(0..80)).map(|_| random_words(rng, 3)).collect();
            Table::new(caption, cells)
        })
        .collect();
    let title = random_words(rng, 30);
    StructuredDoc {
        paper_id: "doc".into(),
        title: if title.trim().is_empty() { "Untitled".into() } else { title },
        abstract_text: random_words(rng, 600),
        sections,
        tables,
    }
}

fn cap_invariant() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = Vec::new();
    let mut at_cap = 0;
    for case in 0..CAP_CASES {
        let doc = random_doc(&mut rng);
        for cap in CAPS {
            match extract_doctaet(&doc, &DocTaetConfig::with_cap(cap)) {
                Ok(f) => {
                    let words = f.text.split_whitespace().count();
                    if f.token_count > cap || words != f.token_count {
                        violations.push(format!("case {case} cap {cap}: token_count {} words {words}", f.token_count));
                    }
                    at_cap += usize::from(f.token_count == cap);
                }
                Err(e) => violations.push(format!("case {case} cap {cap}: {e}")),
            }
        }
    }
    if violations.is_empty() {
        Verdict::Pass(format!("{CAP_CASES} documents x caps {CAPS:?}, 0 violations ({at_cap} features filled to the cap)"))
    } else {
        Verdict::Fail(format!("{} violations, first: {}", violations.len(), violations[0]))
    }
}

// Negative sampling.

fn random_corpus(rng: &mut ChaCha8Rng) -> Vec<PaperAnnotation> {
    (0..rng.random_range(2..40))
        .map(|i| {
            let triples: BTreeSet<TdmTriple> = (0..rng.random_range(0..9))
                .map(|_| {
                    let (t, d, m) = (rng.random_range(0..12), rng.random_range(0..15), rng.random_range(0..4));
                    TdmTriple::new(&format!("Task {t}"), &format!("Data {d}"), &format!("Metric {m}")).unwrap()
                })
                .collect();
            let id = format!("paper-{i:03}");
            if triples.is_empty() {
                PaperAnnotation::new(id, [TdmTriple::unknown()])
            } else {
                PaperAnnotation::new(id, triples)
            }
        })
        .collect()
}

fn context(id: &str) -> Arc<ContextFeature> {
    Arc::new(ContextFeature {
        paper_id: id.into(),
        token_count: 3,
        text: format!("context for {id}"),
        spans: Default::default(),
    })
}

fn instance_file(papers: &[PaperAnnotation], cfg: &SamplingConfig) -> Result<String, String> {
    let vocab = build_vocabulary(papers, 1).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for p in papers {
        let inst = generate_instances(p, &context(&p.paper_id), &vocab, cfg).map_err(|e| e.to_string())?;
        rows.extend(inst.iter().map(InstanceRecord::from));
    }
    Ok(to_jsonl(&rows))
}

fn sampling_case(papers: &[PaperAnnotation], num_false: usize, seed: u64) -> Result<(), String> {
    let vocab = build_vocabulary(papers, 1).map_err(|e| e.to_string())?;
    let cfg = SamplingConfig { num_false, rng_seed: seed };
    for p in papers {
        let inst = generate_instances(p, &context(&p.paper_id), &vocab, &cfg).map_err(|e| e.to_string())?;
        let gold: HashSet<&TdmTriple> = p.tdm_triples().collect();
        let trues: HashSet<&TdmTriple> = inst.iter().filter(|i| i.label).map(|i| &i.triple).collect();
        let falses: Vec<&TdmTriple> = inst.iter().filter(|i| !i.label).map(|i| &i.triple).collect();
        let want_true = gold.iter().filter(|t| vocab.contains(t)).count();
        let want_false = num_false.min(vocab.len() - want_true);
        if trues.len() != want_true || falses.len() != want_false {
            return Err(format!(
                "{}: {} true / {} false, expected {want_true} / {want_false}",
                p.paper_id,
                trues.len(),
                falses.len()
            ));
        }
        let distinct: HashSet<&TdmTriple> = falses.iter().copied().collect();
        if distinct.len() != falses.len() || falses.iter().any(|t| gold.contains(t) || trues.contains(t)) {
            return Err(format!("{}: false instances overlap gold or repeat", p.paper_id));
        }
    }
    let a = instance_file(papers, &cfg)?;
    let mut reversed = papers.to_vec();
    reversed.reverse();
    let b = instance_file(papers, &cfg)?;
    if a != b {
        return Err("same seed gave different instance files".into());
    }
    let c = instance_file(&reversed, &cfg)?;
    let (mut la, mut lc): (Vec<&str>, Vec<&str>) = (a.lines().collect(), c.lines().collect());
    la.sort_unstable();
    lc.sort_unstable();
    if la != lc {
        return Err("instances depend on paper order".into());
    }
    Ok(())
}

fn sampling_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut cases = 0;
    for num_false in NUM_FALSE {
        for _ in 0..SAMPLING_CORPORA_PER_SIZE {
            let papers = random_corpus(&mut rng);
            if papers.iter().all(PaperAnnotation::is_unknown) {
                continue;
            }
            let seed = rng.random();
            if let Err(e) = sampling_case(&papers, num_false, seed) {
                return Verdict::Fail(format!("num_false {num_false}: {e}"));
            }
            cases += 1;
        }
    }
    Verdict::Pass(format!("{cases} corpora over num_false {NUM_FALSE:?}; counts, disjointness and byte-identical reruns hold"))
}

// Metric oracle.

/// Labels as plain strings, with `None` for Unknown.
type Label = Option<String>;

fn project(t: &TdmTriple, concept: Option<Concept>) -> Label {
    (!t.is_unknown()).then(|| match concept {
        None => format!("{} | {} | {}", t.task(), t.dataset(), t.metric()),
        Some(c) => t.concept(c).to_owned(),
    })
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Tally TP/FP/FN with set intersections and differences.
fn tally(gold: &[PaperAnnotation], preds: &[PredictionSet], setting: Setting, concept: Option<Concept>) -> Option<[f64; 6]> {
    let by_id: BTreeMap<&str, &BTreeSet<TdmTriple>> = preds.iter().map(|p| (p.paper_id.as_str(), &p.predicted)).collect();
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    let (mut p_sum, mut r_sum, mut n) = (0.0, 0.0, 0usize);
    for g in gold {
        if setting == Setting::WithoutUnknown && g.triples.iter().all(TdmTriple::is_unknown) {
            continue;
        }
        let mut gs: BTreeSet<Label> = g.triples.iter().map(|t| project(t, concept)).collect();
        let mut ps: BTreeSet<Label> = by_id
            .get(g.paper_id.as_str())
            .map(|p| p.iter().map(|t| project(t, concept)).collect())
            .unwrap_or_default();
        if gs.is_empty() {
            gs.insert(None);
        }
        if ps.is_empty() {
            ps.insert(None);
        }
        if setting == Setting::WithoutUnknown {
            gs.remove(&None);
            ps.remove(&None);
        }
        let hit = gs.intersection(&ps).count();
        let (extra, missed) = (ps.difference(&gs).count(), gs.difference(&ps).count());
        tp += hit;
        fp += extra;
        fn_ += missed;
        p_sum += ratio(hit, hit + extra);
        r_sum += ratio(hit, hit + missed);
        n += 1;
    }
    (n > 0).then(|| {
        let (map, mar) = (p_sum / n as f64, r_sum / n as f64);
        let (mip, mir) = (ratio(tp, tp + fp), ratio(tp, tp + fn_));
        [map, mar, harmonic(map, mar), mip, mir, harmonic(mip, mir)]
    })
}

fn six(s: &Scores) -> [f64; 6] {
    let Prf { precision: a, recall: b, f1: c } = s.macro_avg;
    let Prf { precision: d, recall: e, f1: f } = s.micro;
    [a, b, c, d, e, f]
}

fn random_label(rng: &mut ChaCha8Rng) -> TdmTriple {
    // Nine triples plus Unknown: ten labels.
    if rng.random_range(0..10) == 0 {
        TdmTriple::unknown()
    } else {
        let (t, d) = (rng.random_range(0..3), rng.random_range(0..3));
        TdmTriple::new(&format!("task{t}"), &format!("data{d}"), &format!("metric{}", (t + d) % 2)).unwrap()
    }
}

fn random_label_set(rng: &mut ChaCha8Rng) -> BTreeSet<TdmTriple> {
    (0..rng.random_range(0..5)).map(|_| random_label(rng)).collect()
}

fn metric_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut compared = 0;
    for case in 0..ORACLE_CORPORA {
        let mut gold = Vec::new();
        let mut preds = Vec::new();
        for i in 0..rng.random_range(1..=ORACLE_MAX_PAPERS) {
            let id = format!("p{i:02}");
            gold.push(PaperAnnotation::new(&id, random_label_set(&mut rng)));
            if rng.random_bool(0.9) {
                preds.push(PredictionSet { paper_id: id, predicted: random_label_set(&mut rng), scores: BTreeMap::new() });
            }
        }
        for setting in [Setting::WithUnknown, Setting::WithoutUnknown] {
            let report = evaluate(&preds, &gold, setting).ok();
            let views: Vec<(Option<Concept>, Option<[f64; 6]>)> = std::iter::once(None)
                .chain(Concept::ALL.map(Some))
                .map(|c| (c, report.as_ref().map(|r| six(c.map_or(&r.overall, |c| &r.per_concept[&c])))))
                .collect();
            for (concept, got) in views {
                let want = tally(&gold, &preds, setting, concept);
                let agree = match (got, want) {
                    (Some(g), Some(w)) => g.iter().zip(w).all(|(a, b)| (a - b).abs() <= METRIC_TOLERANCE),
                    (None, None) => true,
                    _ => false,
                };
                if !agree {
                    return Verdict::Fail(format!("corpus {case} {setting} {concept:?}: got {got:?}, oracle {want:?}"));
                }
                compared += 1;
            }
        }
    }
    Verdict::Pass(format!("{ORACLE_CORPORA} corpora, {compared} metric sets equal the oracle within {METRIC_TOLERANCE:e}"))
}

// End-to-end run against the frozen goldens.

fn end_to_end() -> Verdict {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let run = match std::panic::catch_unwind(|| common::run_pipeline(dir.path())) {
        Ok(r) => r,
        Err(_) => return Verdict::Fail("pipeline command failed".into()),
    };
    let mismatches = common::golden_mismatches(&run);
    if !mismatches.is_empty() {
        return Verdict::Fail(format!("differs from golden: {}", mismatches.join(", ")));
    }
    let nt = std::fs::read_to_string(dir.path().join("export/export.nt")).unwrap_or_default();
    match common::reparse_ntriples(&nt) {
        Ok(n) if n == nt.lines().count() => {
            Verdict::Pass(format!("{} outputs byte-identical to goldens; {n} N-Triples statements re-parse", run.files.len()))
        }
        Ok(n) => Verdict::Fail(format!("{n} statements parsed from {} lines", nt.lines().count())),
        Err(e) => Verdict::Fail(format!("N-Triples re-parse: {e}")),
    }
}

fn main() {
    // The test runner passes libtest flags; this harness has none to honour
    // except a listing request, which must print nothing.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 7] = [
        ("corpus statistics (released split)", corpus_statistics),
        ("context lengths, GROBID workflow", || feature_lengths("TDM_GROBID_FEATURES", 2686, 101, 513.37)),
        ("context lengths, LaTeX workflow", || feature_lengths("TDM_LATEX_FEATURES", 7374, 100, 685.25)),
        ("token cap invariant", cap_invariant),
        ("negative sampling", sampling_suite),
        ("metric oracle equivalence", metric_oracle),
        ("end-to-end baseline run", end_to_end),
    ];
    let mut ok = true;
    for (name, check) in criteria {
        ok &= report(name, &check());
    }
    for (target, value) in [
        ("micro-F1, XLNet on GROBID features", "94.8"),
        ("per-concept F1 Task / Dataset / Metric", "96.4 / 95.8 / 95.6"),
    ] {
        println!("NOT GATED  transformer stretch target, {target}: {value} (needs GPU fine-tuning of the model service)");
    }
    if !ok {
        std::process::exit(1);
    }
}

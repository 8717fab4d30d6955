//! Helpers shared by the CLI integration targets.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_tdm");

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/e2e")
}

pub fn goldens() -> PathBuf {
    fixtures().join("goldens")
}

/// Converter command that serves the recorded pandoc output for each paper.
pub fn fake_converter() -> String {
    format!("sh {} {{input}} {{output}}", fixtures().join("fake-pandoc.sh").display())
}

pub fn tdm(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("TDM_ENDPOINT_TOKEN")
        .output()
        .expect("spawn tdm")
}

pub fn tdm_ok(args: &[&str]) -> Output {
    let out = tdm(args);
    assert!(
        out.status.success(),
        "tdm {args:?} exited with {:?}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Outputs of one full baseline run, keyed by golden file name.
pub struct Run {
    pub root: PathBuf,
    pub files: Vec<(&'static str, PathBuf)>,
}

/// ingest -> build-corpus -> predict -> evaluate -> export over the LaTeX fixtures.
pub fn run_pipeline(root: &Path) -> Run {
    let fx = fixtures();
    let ingest = root.join("ingest");
    let corpus = root.join("corpus");
    let pred = root.join("pred/predictions.jsonl");
    let eval = root.join("eval");
    let nt = root.join("export/export.nt");
    let jl = root.join("export/export.jsonl");
    let conv = fake_converter();

    tdm_ok(&["ingest", "--source", "latex", "--converter", &conv, s(&fx.join("papers")), "-o", s(&ingest)]);
    let features = ingest.join("features.jsonl");
    tdm_ok(&[
        "build-corpus",
        "--papers",
        s(&fx.join("papers.jsonl")),
        "--evaluations",
        s(&fx.join("evaluations.jsonl")),
        "--features",
        s(&features),
        "-o",
        s(&corpus),
        "--num-false",
        "3",
    ]);
    tdm_ok(&["predict", "--features", s(&features), "--vocab", s(&corpus.join("vocab.jsonl")), "-o", s(&pred)]);
    let gold = corpus.join("annotations.jsonl");
    tdm_ok(&["evaluate", "--predictions", s(&pred), "--gold", s(&gold), "-o", s(&eval)]);
    for (format, out) in [("ntriples", &nt), ("jsonlines", &jl)] {
        tdm_ok(&["export", "--predictions", s(&pred), "--gold", s(&gold), "--format", format, "-o", s(out)]);
    }

    Run {
        root: root.to_owned(),
        files: vec![
            ("docs.jsonl", ingest.join("docs.jsonl")),
            ("features.jsonl", features),
            ("annotations.jsonl", gold),
            ("vocab.jsonl", corpus.join("vocab.jsonl")),
            ("instances.jsonl", corpus.join("instances.jsonl")),
            ("folds.tsv", corpus.join("folds.tsv")),
            ("predictions.jsonl", pred),
            ("report.txt", eval.join("report.txt")),
            ("report.json", eval.join("report.json")),
            ("export.nt", nt),
            ("export.jsonl", jl),
        ],
    }
}

/// Names of outputs that differ from their golden, with the first differing line.
pub fn golden_mismatches(run: &Run) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, path) in &run.files {
        let want = std::fs::read(goldens().join(name)).expect("golden");
        let got = std::fs::read(path).unwrap_or_default();
        if got != want {
            let (w, g) = (String::from_utf8_lossy(&want), String::from_utf8_lossy(&got));
            let line = w
                .lines()
                .zip(g.lines())
                .position(|(a, b)| a != b)
                .map(|i| i + 1)
                .unwrap_or(w.lines().count().min(g.lines().count()) + 1);
            bad.push(format!("{name} (line {line})"));
        }
    }
    bad
}

/// Parse N-Triples text, returning the statement count.
pub fn reparse_ntriples(text: &str) -> Result<usize, String> {
    use rio_api::parser::TriplesParser;
    let mut n = 0;
    rio_turtle::NTriplesParser::new(text.as_bytes())
        .parse_all(&mut |_| {
            n += 1;
            Ok::<_, rio_turtle::TurtleError>(())
        })
        .map_err(|e| e.to_string())?;
    Ok(n)
}

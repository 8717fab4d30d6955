use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;

use super::{paper_rng, CorpusError, PaperAnnotation};
use crate::records::{read_text, RecordError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fold {
    Fold0,
    Fold1,
}

impl Fold {
    pub const BOTH: [Fold; 2] = [Fold::Fold0, Fold::Fold1];

    pub fn other(self) -> Fold {
        match self {
            Fold::Fold0 => Fold::Fold1,
            Fold::Fold1 => Fold::Fold0,
        }
    }
}

impl fmt::Display for Fold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fold::Fold0 => "fold0",
            Fold::Fold1 => "fold1",
        })
    }
}

impl FromStr for Fold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fold0" => Ok(Fold::Fold0),
            "fold1" => Ok(Fold::Fold1),
            other => Err(format!("unknown fold `{other}`")),
        }
    }
}

/// Two-fold partition of the papers. In round `f`, fold `f` is the test set
/// and the other fold trains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    assignment: BTreeMap<String, Fold>,
}

impl FoldSplit {
    pub fn fold_of(&self, paper_id: &str) -> Option<Fold> {
        self.assignment.get(paper_id).copied()
    }

    pub fn papers_in(&self, fold: Fold) -> impl Iterator<Item = &str> {
        self.assignment
            .iter()
            .filter(move |(_, &f)| f == fold)
            .map(|(id, _)| id.as_str())
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// `paper_id<TAB>fold` lines, sorted by paper id.
    pub fn to_manifest(&self) -> String {
        self.assignment
            .iter()
            .map(|(id, f)| format!("{id}\t{f}\n"))
            .collect()
    }
}

/// Randomly halve the papers. With an odd count the second fold gets the
/// extra paper.
pub fn make_folds(annotations: &[PaperAnnotation], rng_seed: u64) -> Result<FoldSplit, CorpusError> {
    if annotations.len() < 2 {
        return Err(CorpusError::TooFewPapers(annotations.len()));
    }
    let mut ids: Vec<&str> = annotations.iter().map(|a| a.paper_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(CorpusError::TooFewPapers(ids.len()));
    }
    let mut rng = paper_rng(rng_seed, "\u{0}folds");
    ids.shuffle(&mut rng);
    let half = ids.len() / 2;
    let assignment = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.to_string(), if i < half { Fold::Fold0 } else { Fold::Fold1 }))
        .collect();
    Ok(FoldSplit { assignment })
}

/// Read a fold manifest. Group labels are free-form (`fold0`, `fold1`,
/// `train`, `test`).
pub fn read_fold_manifest(path: &Path) -> Result<BTreeMap<String, String>, RecordError> {
    let text = read_text(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, group) = line.split_once('\t').ok_or_else(|| RecordError::Malformed {
            path: path.to_owned(),
            line: i + 1,
            message: "expected `paper_id<TAB>fold`".into(),
        })?;
        out.insert(id.to_owned(), group.trim().to_owned());
    }
    Ok(out)
}

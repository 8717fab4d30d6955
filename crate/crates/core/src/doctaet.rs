//! The DocTAET context feature: document title, abstract, the opening
//! sentences of the experimental-setup section, and table captions and
//! content, concatenated and trimmed to a whitespace-token budget.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::StructuredDoc;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DocTaetError {
    #[error("paper {0} has neither a title nor an abstract")]
    EmptyDocument(String),
    #[error("cannot compute length statistics over zero features")]
    EmptyCollection,
    #[error("invalid DocTAET configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    Title,
    Abstract,
    ExpSetup,
    TableInfo,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Title,
        Component::Abstract,
        Component::ExpSetup,
        Component::TableInfo,
    ];
}

/// Half-open byte range into [`ContextFeature::text`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ComponentSpans {
    pub title: Span,
    #[serde(rename = "abstract")]
    pub abstract_text: Span,
    pub exp_setup: Span,
    pub table_info: Span,
}

impl ComponentSpans {
    pub fn get(&self, component: Component) -> Span {
        match component {
            Component::Title => self.title,
            Component::Abstract => self.abstract_text,
            Component::ExpSetup => self.exp_setup,
            Component::TableInfo => self.table_info,
        }
    }

    fn get_mut(&mut self, component: Component) -> &mut Span {
        match component {
            Component::Title => &mut self.title,
            Component::Abstract => &mut self.abstract_text,
            Component::ExpSetup => &mut self.exp_setup,
            Component::TableInfo => &mut self.table_info,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextFeature {
    pub paper_id: String,
    pub token_count: usize,
    pub text: String,
    #[serde(default)]
    pub spans: ComponentSpans,
}

impl ContextFeature {
    pub fn component_text(&self, component: Component) -> &str {
        let span = self.spans.get(component);
        &self.text[span.start..span.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocTaetConfig {
    /// Maximum whitespace tokens of the whole feature; `None` measures
    /// uncapped lengths.
    pub cap: Option<usize>,
    /// Budget applied separately to ExpSetup and to TableInfo; `None`
    /// disables it.
    pub exp_table_budget: Option<usize>,
    pub exp_section_sentences: usize,
    /// Case-insensitive substrings identifying the experimental section.
    pub exp_heading_patterns: Vec<String>,
}

impl Default for DocTaetConfig {
    fn default() -> Self {
        DocTaetConfig {
            cap: Some(512),
            exp_table_budget: Some(150),
            exp_section_sentences: 5,
            exp_heading_patterns: ["experiment", "setup", "evaluation", "implementation"]
                .map(String::from)
                .to_vec(),
        }
    }
}

impl DocTaetConfig {
    pub fn with_cap(cap: usize) -> Self {
        DocTaetConfig {
            cap: Some(cap),
            ..Default::default()
        }
    }

    /// Measurement mode: no cap and no per-component budgets, for raw
    /// feature-length statistics.
    pub fn uncapped() -> Self {
        DocTaetConfig {
            cap: None,
            exp_table_budget: None,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), DocTaetError> {
        if self.cap == Some(0) {
            return Err(DocTaetError::InvalidConfig("cap must be at least 1".into()));
        }
        if self.exp_section_sentences == 0 {
            return Err(DocTaetError::InvalidConfig(
                "exp_section_sentences must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn truncate<T>(mut v: Vec<T>, limit: Option<usize>) -> Vec<T> {
    if let Some(limit) = limit {
        v.truncate(limit);
    }
    v
}

/// Split a token stream into sentences. A sentence ends at a token ending in
/// `.`, `?` or `!` when the next token starts with an uppercase letter.
fn sentences<'a>(tokens: &[&'a str]) -> Vec<Vec<&'a str>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        current.push(*tok);
        let ends = tok.ends_with(['.', '?', '!']);
        let next_upper = tokens
            .get(i + 1)
            .and_then(|t| t.chars().next())
            .is_some_and(char::is_uppercase);
        if ends && next_upper {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn exp_setup_tokens<'a>(doc: &'a StructuredDoc, cfg: &DocTaetConfig) -> Vec<&'a str> {
    let patterns: Vec<String> = cfg
        .exp_heading_patterns
        .iter()
        .map(|p| p.to_lowercase())
        .collect();
    let Some(start) = doc.sections.iter().position(|s| {
        let heading = s.heading.to_lowercase();
        patterns.iter().any(|p| heading.contains(p.as_str()))
    }) else {
        return Vec::new();
    };
    let depth = doc.sections[start].depth;
    // The matched section plus its subsections.
    let tokens: Vec<&str> = std::iter::once(&doc.sections[start])
        .chain(doc.sections[start + 1..].iter().take_while(|s| s.depth > depth))
        .flat_map(|s| s.paragraphs.iter())
        .flat_map(|p| p.split_whitespace())
        .collect();
    let taken: Vec<&str> = sentences(&tokens)
        .into_iter()
        .take(cfg.exp_section_sentences)
        .flatten()
        .collect();
    truncate(taken, cfg.exp_table_budget)
}

fn table_tokens<'a>(doc: &'a StructuredDoc, cfg: &DocTaetConfig) -> Vec<&'a str> {
    let tokens: Vec<&str> = doc
        .tables
        .iter()
        .flat_map(|t| std::iter::once(&t.caption).chain(t.cells.iter()))
        .flat_map(|s| s.split_whitespace())
        .collect();
    truncate(tokens, cfg.exp_table_budget)
}

/// Compute the context feature of one document.
pub fn extract_doctaet(doc: &StructuredDoc, cfg: &DocTaetConfig) -> Result<ContextFeature, DocTaetError> {
    cfg.validate()?;
    if doc.title.trim().is_empty() && doc.abstract_text.trim().is_empty() {
        return Err(DocTaetError::EmptyDocument(doc.paper_id.clone()));
    }

    let parts = [
        (Component::Title, doc.title.split_whitespace().collect::<Vec<_>>()),
        (Component::Abstract, doc.abstract_text.split_whitespace().collect()),
        (Component::ExpSetup, exp_setup_tokens(doc, cfg)),
        (Component::TableInfo, table_tokens(doc, cfg)),
    ];

    let mut remaining = cfg.cap.unwrap_or(usize::MAX);
    let mut text = String::new();
    let mut spans = ComponentSpans::default();
    let mut token_count = 0;
    for (component, tokens) in parts {
        let take = tokens.len().min(remaining);
        remaining -= take;
        let span = spans.get_mut(component);
        if take == 0 {
            *span = Span {
                start: text.len(),
                end: text.len(),
            };
            continue;
        }
        if !text.is_empty() {
            text.push(' ');
        }
        span.start = text.len();
        for (i, tok) in tokens[..take].iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            text.push_str(tok);
        }
        span.end = text.len();
        token_count += take;
    }

    Ok(ContextFeature {
        paper_id: doc.paper_id.clone(),
        token_count,
        text,
        spans,
    })
}

/// Max, min and mean token counts of a feature collection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub count: usize,
    pub max: usize,
    pub min: usize,
    pub mean: f64,
}

impl fmt::Display for LengthStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "features={} max={} min={} mean={:.2}",
            self.count, self.max, self.min, self.mean
        )
    }
}

pub fn length_stats<I>(token_counts: I) -> Result<LengthStats, DocTaetError>
where
    I: IntoIterator<Item = usize>,
{
    let mut count = 0usize;
    let mut max = 0usize;
    let mut min = usize::MAX;
    let mut sum = 0u128;
    for n in token_counts {
        count += 1;
        max = max.max(n);
        min = min.min(n);
        sum += n as u128;
    }
    if count == 0 {
        return Err(DocTaetError::EmptyCollection);
    }
    Ok(LengthStats {
        count,
        max,
        min,
        mean: sum as f64 / count as f64,
    })
}

pub fn feature_length_stats(features: &[ContextFeature]) -> Result<LengthStats, DocTaetError> {
    length_stats(features.iter().map(|f| f.token_count))
}

//! Document ingestion: LaTeX sources and PDFs are both brought into TEI XML
//! and parsed into a [`StructuredDoc`].

mod latex;
mod pdf;
mod tei;
pub(crate) mod xml;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use latex::{convert_latex, ConverterConfig, DEFAULT_CONVERTER_COMMAND};
pub use pdf::{PdfParserClient, FULLTEXT_PATH};
pub use tei::{parse_tei, to_tei};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("converter not found: {0}")]
    ConverterNotFound(String),
    #[error("converter exited with {status}: {stderr}")]
    ConverterFailed { status: String, stderr: String },
    #[error("converter output is not usable TEI: {0}")]
    MalformedOutput(String),
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("TEI document has no body")]
    MissingBody,
    #[error("parser endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("parser returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("no recorded response for request {0}")]
    ReplayMiss(String),
    #[error("empty paper id")]
    EmptyPaperId,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which publishing workflow an input document comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Latex,
    Pdf,
    Tei,
}

impl SourceKind {
    /// File extensions recognised for this kind, longest first.
    pub fn extensions(self) -> &'static [&'static str] {
        match self {
            SourceKind::Latex => &[".tex"],
            SourceKind::Pdf => &[".pdf"],
            SourceKind::Tei => &[".tei.xml", ".xml", ".tei"],
        }
    }

    /// Paper id for `path` if its name carries one of this kind's extensions.
    pub fn paper_id_for(self, path: &Path) -> Option<String> {
        let name = path.file_name()?.to_str()?;
        self.extensions().iter().find_map(|ext| {
            name.strip_suffix(ext)
                .filter(|stem| !stem.is_empty())
                .map(str::to_owned)
        })
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Latex => "latex",
            SourceKind::Pdf => "pdf",
            SourceKind::Tei => "tei",
        })
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "latex" | "tex" => Ok(SourceKind::Latex),
            "pdf" => Ok(SourceKind::Pdf),
            "tei" | "xml" => Ok(SourceKind::Tei),
            other => Err(format!("unknown source kind `{other}`")),
        }
    }
}

/// A parsed paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredDoc {
    pub paper_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub sections: Vec<Section>,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub paragraphs: Vec<String>,
    /// Nesting level, 1 for top-level divisions. Subsections follow their
    /// parent in `sections` with a larger depth.
    #[serde(default = "default_depth")]
    pub depth: u32,
}

fn default_depth() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub caption: String,
    /// Cell texts in row-major order.
    pub cells: Vec<String>,
}

impl Section {
    pub fn new(heading: impl Into<String>, paragraphs: Vec<String>) -> Self {
        Section {
            heading: heading.into(),
            paragraphs,
            depth: 1,
        }
    }
}

impl Table {
    pub fn new(caption: impl Into<String>, cells: Vec<String>) -> Self {
        Table {
            caption: caption.into(),
            cells,
        }
    }
}

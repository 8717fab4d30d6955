use std::path::Path;
use std::time::Duration;

use reqwest::blocking::{multipart, Client};

use super::{parse_tei, IngestError};
use crate::replay::{self, ReplayMode};

/// GROBID full-text endpoint, relative to the service base URL.
pub const FULLTEXT_PATH: &str = "api/processFulltextDocument";

/// Client for a GROBID-compatible PDF parsing service. Cheap to clone and
/// safe to share across threads; each call carries its own state.
#[derive(Debug, Clone)]
pub struct PdfParserClient {
    base_url: String,
    client: Client,
    replay: Option<ReplayMode>,
}

impl PdfParserClient {
    pub fn new(base_url: impl Into<String>, timeout: Duration) -> Result<Self, IngestError> {
        let client = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| IngestError::EndpointUnreachable(e.to_string()))?;
        Ok(PdfParserClient {
            base_url: base_url.into(),
            client,
            replay: None,
        })
    }

    pub fn with_replay(mut self, mode: ReplayMode) -> Self {
        self.replay = Some(mode);
        self
    }

    fn url(&self) -> String {
        format!("{}/{}", self.base_url.trim_end_matches('/'), FULLTEXT_PATH)
    }

    /// Upload `pdf` and return the TEI document the service produces.
    pub fn convert_pdf(&self, pdf: &Path) -> Result<String, IngestError> {
        let bytes = std::fs::read(pdf)?;
        let key = replay::request_key(FULLTEXT_PATH, &bytes);

        if let Some(ReplayMode::Replay(dir)) = &self.replay {
            let body = replay::load(dir, &key).ok_or(IngestError::ReplayMiss(key))?;
            return validate(body);
        }

        let file_name = pdf
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input.pdf".into());
        let part = multipart::Part::bytes(bytes)
            .file_name(file_name)
            .mime_str("application/pdf")
            .map_err(|e| IngestError::EndpointUnreachable(e.to_string()))?;
        let form = multipart::Form::new().part("input", part);

        let response = self
            .client
            .post(self.url())
            .multipart(form)
            .send()
            .map_err(|e| IngestError::EndpointUnreachable(e.to_string()))?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| IngestError::MalformedOutput(e.to_string()))?;
        if !status.is_success() {
            return Err(IngestError::Http {
                status: status.as_u16(),
                body,
            });
        }
        if let Some(ReplayMode::Record(dir)) = &self.replay {
            replay::store(dir, &key, &body)?;
        }
        validate(body)
    }
}

fn validate(body: String) -> Result<String, IngestError> {
    parse_tei("parser-check", body.as_bytes())
        .map_err(|e| IngestError::MalformedOutput(e.to_string()))?;
    Ok(body)
}

use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use super::{parse_tei, IngestError};

/// Default LaTeX to TEI command. `{template}` and `{filter}` resolve to the
/// bundled pandoc template and Lua filter: stock pandoc TEI output omits the
/// abstract and drops table captions.
pub const DEFAULT_CONVERTER_COMMAND: &str =
    "pandoc {input} -s -t tei --template {template} --lua-filter {filter} -o {output}";

const TEI_TEMPLATE: &str = include_str!("../../assets/pandoc-tei.template");
const CAPTION_FILTER: &str = include_str!("../../assets/pandoc-tei-captions.lua");

/// External converter invocation. The command is split with shell quoting
/// rules; it is never run through a shell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverterConfig {
    pub command: String,
}

impl Default for ConverterConfig {
    fn default() -> Self {
        ConverterConfig {
            command: DEFAULT_CONVERTER_COMMAND.to_owned(),
        }
    }
}

/// Convert the main `.tex` file of one paper into TEI XML.
pub fn convert_latex(tex_root: &Path, converter: &ConverterConfig) -> Result<String, IngestError> {
    if !tex_root.is_file() {
        return Err(IngestError::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} is not a file", tex_root.display()),
        )));
    }
    let input = tex_root.canonicalize()?;
    let work = tempfile::tempdir()?;
    let output = work.path().join("out.tei.xml");
    let template = work.path().join("tei.template");
    let filter = work.path().join("tei-captions.lua");
    std::fs::write(&template, TEI_TEMPLATE)?;
    std::fs::write(&filter, CAPTION_FILTER)?;

    let words = shell_words::split(&converter.command)
        .map_err(|e| IngestError::ConverterNotFound(format!("bad command template: {e}")))?;
    let mut words = words.into_iter().map(|w| {
        w.replace("{input}", &input.to_string_lossy())
            .replace("{output}", &output.to_string_lossy())
            .replace("{template}", &template.to_string_lossy())
            .replace("{filter}", &filter.to_string_lossy())
    });
    let program = words
        .next()
        .ok_or_else(|| IngestError::ConverterNotFound("empty command template".into()))?;

    let mut cmd = Command::new(&program);
    cmd.args(words);
    if let Some(dir) = input.parent() {
        // \input and \include resolve relative to the main file.
        cmd.current_dir(dir);
    }
    let result = cmd.output().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IngestError::ConverterNotFound(program.clone()),
        _ => IngestError::Io(e),
    })?;
    if !result.status.success() {
        return Err(IngestError::ConverterFailed {
            status: result.status.to_string(),
            stderr: String::from_utf8_lossy(&result.stderr).trim().to_owned(),
        });
    }

    let tei = std::fs::read(&output)
        .map_err(|e| IngestError::MalformedOutput(format!("no output file: {e}")))?;
    let doc = parse_tei("converter-check", &tei).map_err(|e| IngestError::MalformedOutput(e.to_string()))?;
    if doc.title.is_empty() && doc.abstract_text.is_empty() && doc.sections.is_empty() && doc.tables.is_empty() {
        return Err(IngestError::MalformedOutput("converter produced an empty document".into()));
    }
    String::from_utf8(tei).map_err(|e| IngestError::MalformedOutput(e.to_string()))
}

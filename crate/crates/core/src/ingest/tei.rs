use std::fmt::Write as _;

use super::xml::{escape, normalize_ws, parse_document, Element, Node};
use super::{IngestError, Section, StructuredDoc, Table};

/// Subtrees that never contribute to paragraph text.
const NON_PROSE: &[&str] = &["figure", "table", "head"];

/// Parse a TEI document produced by pandoc or GROBID.
///
/// Elements are matched on local names only, so namespace prefixes and the
/// differing nesting of the two producers are both accepted.
pub fn parse_tei(paper_id: &str, tei: &[u8]) -> Result<StructuredDoc, IngestError> {
    if paper_id.trim().is_empty() {
        return Err(IngestError::EmptyPaperId);
    }
    let root = parse_document(tei)?;

    let title = find_title(&root).unwrap_or_default();
    let abstract_text = find_abstract(&root).unwrap_or_default();

    let body = if root.name == "body" {
        &root
    } else {
        root.find("body").ok_or(IngestError::MissingBody)?
    };

    let mut sections = Vec::new();
    collect_sections(body, &mut sections);

    // Tables can sit in <body> or <back>; scan the whole text element.
    let scope = root.find("text").unwrap_or(&root);
    let mut tables = Vec::new();
    collect_tables(scope, &mut tables);

    Ok(StructuredDoc {
        paper_id: paper_id.to_owned(),
        title,
        abstract_text,
        sections,
        tables,
    })
}

fn find_title(root: &Element) -> Option<String> {
    let header = root.find("teiHeader").unwrap_or(root);
    let stmt = header.find("titleStmt").unwrap_or(header);
    let mut titles = Vec::new();
    stmt.find_all("title", &mut titles);
    let chosen = titles
        .iter()
        .find(|t| t.attr("type") == Some("main"))
        .or_else(|| titles.first())?;
    Some(normalize_ws(&chosen.text()))
}

fn find_abstract(root: &Element) -> Option<String> {
    if let Some(abs) = root.find("abstract") {
        return Some(normalize_ws(&abs.text()));
    }
    let mut divs = Vec::new();
    root.find_all("div", &mut divs);
    divs.into_iter()
        .find(|d| d.attr("type") == Some("abstract"))
        .map(|d| normalize_ws(&d.text_excluding(&["head"])))
}

fn paragraph_text(p: &Element) -> String {
    normalize_ws(&p.text_excluding(NON_PROSE))
}

fn collect_sections(body: &Element, out: &mut Vec<Section>) {
    let mut loose: Vec<String> = Vec::new();
    for node in &body.children {
        let Node::Element(el) = node else { continue };
        match el.name.as_str() {
            "p" => {
                let text = paragraph_text(el);
                if !text.is_empty() {
                    loose.push(text);
                }
            }
            "div" => {
                flush_loose(&mut loose, out);
                push_division(el, 1, out);
            }
            _ => {}
        }
    }
    flush_loose(&mut loose, out);
}

/// Push `div` as a section, then its nested divisions one level deeper.
fn push_division(div: &Element, depth: u32, out: &mut Vec<Section>) {
    if div.attr("type") == Some("abstract") {
        return;
    }
    let heading = div
        .child("head")
        .map(|h| normalize_ws(&h.text()))
        .unwrap_or_default();
    let paragraphs: Vec<String> = div
        .child_elements()
        .filter(|c| c.name == "p")
        .map(paragraph_text)
        .filter(|t| !t.is_empty())
        .collect();
    if !heading.is_empty() || !paragraphs.is_empty() {
        out.push(Section {
            heading,
            paragraphs,
            depth,
        });
    }
    for child in div.child_elements().filter(|c| c.name == "div") {
        push_division(child, depth + 1, out);
    }
}

fn flush_loose(loose: &mut Vec<String>, out: &mut Vec<Section>) {
    if !loose.is_empty() {
        out.push(Section::new(String::new(), std::mem::take(loose)));
    }
}

fn collect_tables(parent: &Element, out: &mut Vec<Table>) {
    for el in parent.child_elements() {
        if el.name == "figure" && el.attr("type") == Some("table") {
            let caption = el
                .child("figDesc")
                .or_else(|| el.child("head"))
                .map(|c| normalize_ws(&c.text()))
                .unwrap_or_default();
            out.push(Table {
                caption,
                cells: cells_of(el),
            });
        } else if el.name == "table" {
            let caption = el
                .child("head")
                .or_else(|| el.child("caption"))
                .map(|c| normalize_ws(&c.text()))
                .unwrap_or_default();
            out.push(Table {
                caption,
                cells: cells_of(el),
            });
        } else {
            collect_tables(el, out);
        }
    }
}

fn cells_of(el: &Element) -> Vec<String> {
    let mut cells = Vec::new();
    el.find_all("cell", &mut cells);
    cells
        .into_iter()
        .map(|c| normalize_ws(&c.text()))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Serialize a [`StructuredDoc`] as TEI in the layout pandoc produces.
/// `parse_tei` reads it back to an identical document.
pub fn to_tei(doc: &StructuredDoc) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str("<TEI xmlns=\"http://www.tei-c.org/ns/1.0\">\n<teiHeader>\n  <fileDesc>\n    <titleStmt>\n");
    let _ = writeln!(out, "      <title>{}</title>", escape(&doc.title));
    out.push_str("    </titleStmt>\n  </fileDesc>\n");
    if !doc.abstract_text.is_empty() {
        let _ = writeln!(
            out,
            "  <profileDesc>\n    <abstract>\n<p>{}</p>\n    </abstract>\n  </profileDesc>",
            escape(&doc.abstract_text)
        );
    }
    out.push_str("</teiHeader>\n<text>\n<body>\n");

    // Number of currently open divs; a section at depth d sits inside d - 1
    // ancestors, padded with empty divs when the document skips a level.
    let mut open = 0usize;
    for section in &doc.sections {
        let depth = section.depth.max(1) as usize;
        while open >= depth {
            open -= 1;
            out.push_str("</div>\n");
        }
        while open + 1 < depth {
            open += 1;
            out.push_str("<div>\n");
        }
        out.push_str("<div>\n");
        if !section.heading.is_empty() {
            let _ = writeln!(out, "<head>{}</head>", escape(&section.heading));
        }
        for p in &section.paragraphs {
            let _ = writeln!(out, "<p>{}</p>", escape(p));
        }
        open += 1;
    }
    for _ in 0..open {
        out.push_str("</div>\n");
    }

    for table in &doc.tables {
        out.push_str("<figure type=\"table\">\n");
        let _ = writeln!(out, "<figDesc>{}</figDesc>", escape(&table.caption));
        out.push_str("<table>\n<row>\n");
        for cell in &table.cells {
            let _ = writeln!(out, "<cell>{}</cell>", escape(cell));
        }
        out.push_str("</row>\n</table>\n</figure>\n");
    }
    out.push_str("</body>\n</text>\n</TEI>\n");
    out
}

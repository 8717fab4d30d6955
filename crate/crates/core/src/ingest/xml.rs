//! Minimal element tree over quick-xml events.
//!
//! TEI from pandoc and GROBID differs in paths and namespaces, so the parser
//! works on local names over a small in-memory tree instead of streaming
//! state machines.

use quick_xml::events::Event;
use quick_xml::Reader;

use super::IngestError;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone)]
pub(crate) struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

impl Element {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    pub fn child(&self, name: &str) -> Option<&Element> {
        self.child_elements().find(|e| e.name == name)
    }

    /// First descendant (pre-order, excluding self) with the given local name.
    pub fn find(&self, name: &str) -> Option<&Element> {
        for child in self.child_elements() {
            if child.name == name {
                return Some(child);
            }
            if let Some(found) = child.find(name) {
                return Some(found);
            }
        }
        None
    }

    /// All descendants with the given local name, in document order. Does not
    /// descend into matches.
    pub fn find_all<'a>(&'a self, name: &str, out: &mut Vec<&'a Element>) {
        for child in self.child_elements() {
            if child.name == name {
                out.push(child);
            } else {
                child.find_all(name, out);
            }
        }
    }

    /// Concatenated descendant text. Block-level boundaries are separated by
    /// a space so that `<p>a</p><p>b</p>` does not fuse into `ab`.
    pub fn text(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out, &[]);
        out
    }

    /// Like [`Element::text`] but skips subtrees whose local name is listed.
    pub fn text_excluding(&self, skip: &[&str]) -> String {
        let mut out = String::new();
        self.collect_text(&mut out, skip);
        out
    }

    fn collect_text(&self, out: &mut String, skip: &[&str]) {
        for child in &self.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => {
                    if skip.contains(&e.name.as_str()) {
                        continue;
                    }
                    let block = is_block(&e.name);
                    if block {
                        out.push(' ');
                    }
                    e.collect_text(out, skip);
                    if block {
                        out.push(' ');
                    }
                }
            }
        }
    }
}

fn is_block(name: &str) -> bool {
    matches!(
        name,
        "p" | "div" | "head" | "note" | "cell" | "row" | "item" | "list" | "figDesc" | "lb" | "s"
    )
}

/// Collapse whitespace runs to single spaces and trim.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn local(name: &[u8]) -> String {
    let name = match name.iter().rposition(|&b| b == b':') {
        Some(i) => &name[i + 1..],
        None => name,
    };
    String::from_utf8_lossy(name).into_owned()
}

fn start_element(e: &quick_xml::events::BytesStart<'_>) -> Result<Element, IngestError> {
    let mut attrs = Vec::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| IngestError::MalformedXml(err.to_string()))?;
        let value = attr
            .unescape_value()
            .map_err(|err| IngestError::MalformedXml(err.to_string()))?;
        attrs.push((local(attr.key.as_ref()), value.into_owned()));
    }
    Ok(Element {
        name: local(e.name().as_ref()),
        attrs,
        children: Vec::new(),
    })
}

/// Parse a whole XML document into its root element.
pub(crate) fn parse_document(bytes: &[u8]) -> Result<Element, IngestError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| IngestError::MalformedXml(format!("input is not UTF-8: {e}")))?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(false);

    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    loop {
        let event = reader.read_event().map_err(|e| {
            IngestError::MalformedXml(format!(
                "at byte {}: {e}",
                reader.buffer_position()
            ))
        })?;
        match event {
            Event::Start(e) => stack.push(start_element(&e)?),
            Event::Empty(e) => {
                let el = start_element(&e)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(IngestError::MalformedXml("multiple root elements".into())),
                }
            }
            Event::End(_) => {
                let el = stack
                    .pop()
                    .ok_or_else(|| IngestError::MalformedXml("unbalanced end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(IngestError::MalformedXml("multiple root elements".into())),
                }
            }
            Event::Text(t) => {
                let s = t
                    .unescape()
                    .map_err(|e| IngestError::MalformedXml(e.to_string()))?;
                if let Some(parent) = stack.last_mut() {
                    parent.children.push(Node::Text(s.into_owned()));
                } else if !s.trim().is_empty() {
                    return Err(IngestError::MalformedXml("text outside root element".into()));
                }
            }
            Event::CData(c) => {
                let s = String::from_utf8_lossy(&c.into_inner()).into_owned();
                if let Some(parent) = stack.last_mut() {
                    parent.children.push(Node::Text(s));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(IngestError::MalformedXml("unclosed element at end of input".into()));
    }
    root.ok_or_else(|| IngestError::MalformedXml("document has no root element".into()))
}

/// Escape text for element content.
pub(crate) fn escape(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

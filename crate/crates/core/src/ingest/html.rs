use std::borrow::Cow;

use ego_tree::iter::Edge;
use encoding_rs::Encoding;
use scraper::{Html, Node};

use super::IngestConfig;
use crate::text;

const META_SNIFF_BYTES: usize = 1024;

/// Decodes a page using the HTTP charset if given, then a `<meta>` charset
/// declaration near the top of the document, then UTF-8 with replacement.
pub fn decode_html<'a>(bytes: &'a [u8], http_charset: Option<&str>) -> Cow<'a, str> {
    let encoding = http_charset
        .and_then(|label| Encoding::for_label(label.as_bytes()))
        .or_else(|| sniff_meta_charset(bytes));
    match encoding {
        Some(enc) if enc != encoding_rs::UTF_8 => enc.decode(bytes).0,
        _ => String::from_utf8_lossy(bytes),
    }
}

fn sniff_meta_charset(bytes: &[u8]) -> Option<&'static Encoding> {
    let head = &bytes[..bytes.len().min(META_SNIFF_BYTES)];
    let head = String::from_utf8_lossy(head).to_ascii_lowercase();
    let at = head.find("charset")?;
    let rest = head[at + "charset".len()..].trim_start();
    let rest = rest.strip_prefix('=')?.trim_start();
    let label: String = rest
        .trim_start_matches(['"', '\''])
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | ':' | '.'))
        .collect();
    Encoding::for_label(label.as_bytes())
}

/// Every element in `config.tag_set` with non-empty text, in document order,
/// before the word-count filter. Nested matches each produce an entry; text
/// inside `script` and `style` is never collected.
pub fn extract_tagged_texts(html: &str, config: &IngestConfig) -> Vec<(String, String)> {
    let document = Html::parse_document(html);
    // Slots are reserved when an element opens so that outer elements precede
    // the elements nested in them.
    let mut slots: Vec<(String, String)> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut open_flags: Vec<bool> = Vec::new();
    let mut suppressed = 0usize;

    for edge in document.tree.root().traverse() {
        match edge {
            Edge::Open(node) => match node.value() {
                Node::Element(el) => {
                    let name = el.name();
                    let is_raw = matches!(name, "script" | "style");
                    let matched = suppressed == 0 && config.accepts_tag(name);
                    if is_raw {
                        suppressed += 1;
                    }
                    if matched {
                        open.push(slots.len());
                        slots.push((name.to_string(), String::new()));
                    }
                    open_flags.push(matched);
                }
                Node::Text(t) if suppressed == 0 => {
                    for &slot in &open {
                        slots[slot].1.push_str(t);
                    }
                }
                _ => {}
            },
            Edge::Close(node) => {
                if let Node::Element(el) = node.value() {
                    if matches!(el.name(), "script" | "style") {
                        suppressed = suppressed.saturating_sub(1);
                    }
                    if open_flags.pop() == Some(true) {
                        open.pop();
                    }
                }
            }
        }
    }

    slots
        .into_iter()
        .filter_map(|(tag, raw)| {
            let text = text::normalize_whitespace(&raw);
            (!text.is_empty()).then_some((tag, text))
        })
        .collect()
}

/// Candidate headline texts: tagged texts that meet the minimum word count.
pub fn extract_candidate_texts(html: &[u8], config: &IngestConfig) -> Vec<(String, String)> {
    let decoded = decode_html(html, None);
    extract_tagged_texts(&decoded, config)
        .into_iter()
        .filter(|(_, t)| text::word_count(t) >= config.min_words)
        .collect()
}

//! Minimal XML pull reader, just enough for the MusicXML subset we honor:
//! start/end/self-closing tags, text with the five named entities plus
//! numeric references, comments, processing instructions, and DOCTYPE.
//! Attributes are scanned past but not exposed; no namespace handling.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum XmlEvent {
    Start(String),
    End(String),
    Text(String),
    Eof,
}

pub(super) struct XmlReader<'a> {
    input: &'a [u8],
    pos: usize,
    line: usize,
    pending_end: Option<String>,
}

impl<'a> XmlReader<'a> {
    pub(super) fn new(input: &'a str) -> Self {
        XmlReader {
            input: input.as_bytes(),
            pos: 0,
            line: 1,
            pending_end: None,
        }
    }

    pub(super) fn line(&self) -> usize {
        self.line
    }

    /// Next event; whitespace-only text between tags is skipped.
    pub(super) fn next(&mut self) -> Result<XmlEvent> {
        if let Some(name) = self.pending_end.take() {
            return Ok(XmlEvent::End(name));
        }
        loop {
            if self.pos >= self.input.len() {
                return Ok(XmlEvent::Eof);
            }
            if self.peek() == b'<' {
                match self.input.get(self.pos + 1) {
                    Some(b'?') => self.skip_until("?>")?,
                    Some(b'!') => self.skip_markup_decl()?,
                    Some(b'/') => return self.read_end_tag(),
                    _ => return self.read_start_tag(),
                }
            } else {
                let text = self.read_text()?;
                if !text.trim().is_empty() {
                    return Ok(XmlEvent::Text(text));
                }
            }
        }
    }

    fn peek(&self) -> u8 {
        self.input[self.pos]
    }

    fn bump(&mut self) -> u8 {
        let b = self.input[self.pos];
        if b == b'\n' {
            self.line += 1;
        }
        self.pos += 1;
        b
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, message)
    }

    fn skip_until(&mut self, terminator: &str) -> Result<()> {
        let term = terminator.as_bytes();
        while self.pos + term.len() <= self.input.len() {
            if &self.input[self.pos..self.pos + term.len()] == term {
                for _ in 0..term.len() {
                    self.bump();
                }
                return Ok(());
            }
            self.bump();
        }
        Err(self.error(format!("unterminated markup, expected '{terminator}'")))
    }

    /// `<!-- -->` comments and `<!DOCTYPE >` declarations (with optional
    /// internal subset in brackets).
    fn skip_markup_decl(&mut self) -> Result<()> {
        if self.input[self.pos..].starts_with(b"<!--") {
            return self.skip_until("-->");
        }
        let mut depth = 0usize;
        while self.pos < self.input.len() {
            match self.bump() {
                b'[' => depth += 1,
                b']' => depth = depth.saturating_sub(1),
                b'>' if depth == 0 => return Ok(()),
                _ => {}
            }
        }
        Err(self.error("unterminated <! declaration"))
    }

    fn read_name(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.input.len() {
            let b = self.peek();
            if b.is_ascii_whitespace() || b == b'>' || b == b'/' {
                break;
            }
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("empty tag name"));
        }
        String::from_utf8(self.input[start..self.pos].to_vec())
            .map_err(|_| self.error("tag name is not UTF-8"))
    }

    fn read_start_tag(&mut self) -> Result<XmlEvent> {
        self.bump(); // '<'
        let name = self.read_name()?;
        // scan past attributes, honoring quoted values
        let mut quote: Option<u8> = None;
        while self.pos < self.input.len() {
            let b = self.bump();
            match quote {
                Some(q) if b == q => quote = None,
                Some(_) => {}
                None => match b {
                    b'"' | b'\'' => quote = Some(b),
                    b'/' if self.pos < self.input.len() && self.peek() == b'>' => {
                        self.bump();
                        self.pending_end = Some(name.clone());
                        return Ok(XmlEvent::Start(name));
                    }
                    b'>' => return Ok(XmlEvent::Start(name)),
                    _ => {}
                },
            }
        }
        Err(self.error(format!("unterminated <{name} tag")))
    }

    fn read_end_tag(&mut self) -> Result<XmlEvent> {
        self.bump(); // '<'
        self.bump(); // '/'
        let name = self.read_name()?;
        while self.pos < self.input.len() {
            if self.bump() == b'>' {
                return Ok(XmlEvent::End(name));
            }
        }
        Err(self.error(format!("unterminated </{name} tag")))
    }

    fn read_text(&mut self) -> Result<String> {
        let mut out = String::new();
        while self.pos < self.input.len() && self.peek() != b'<' {
            let b = self.bump();
            if b == b'&' {
                out.push(self.read_entity()?);
            } else {
                out.push(b as char);
            }
        }
        Ok(out)
    }

    fn read_entity(&mut self) -> Result<char> {
        let start = self.pos;
        while self.pos < self.input.len() && self.peek() != b';' {
            if self.pos - start > 10 {
                return Err(self.error("unterminated entity reference"));
            }
            self.bump();
        }
        if self.pos >= self.input.len() {
            return Err(self.error("unterminated entity reference"));
        }
        let name = std::str::from_utf8(&self.input[start..self.pos])
            .map_err(|_| self.error("entity reference is not UTF-8"))?
            .to_string();
        self.bump(); // ';'
        match name.as_str() {
            "amp" => Ok('&'),
            "lt" => Ok('<'),
            "gt" => Ok('>'),
            "quot" => Ok('"'),
            "apos" => Ok('\''),
            _ => {
                let code = if let Some(hex) = name.strip_prefix("#x") {
                    u32::from_str_radix(hex, 16).ok()
                } else if let Some(dec) = name.strip_prefix('#') {
                    dec.parse().ok()
                } else {
                    None
                };
                code.and_then(char::from_u32)
                    .ok_or_else(|| self.error(format!("unknown entity '&{name};'")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drain(input: &str) -> Vec<XmlEvent> {
        let mut reader = XmlReader::new(input);
        let mut events = Vec::new();
        loop {
            let ev = reader.next().unwrap();
            if ev == XmlEvent::Eof {
                return events;
            }
            events.push(ev);
        }
    }

    #[test]
    fn tags_text_and_self_closing() {
        let events = drain("<note><chord/><step>C</step></note>");
        assert_eq!(
            events,
            vec![
                XmlEvent::Start("note".into()),
                XmlEvent::Start("chord".into()),
                XmlEvent::End("chord".into()),
                XmlEvent::Start("step".into()),
                XmlEvent::Text("C".into()),
                XmlEvent::End("step".into()),
                XmlEvent::End("note".into()),
            ]
        );
    }

    #[test]
    fn prolog_doctype_comments_attributes_skipped() {
        let doc = "<?xml version=\"1.0\"?>\n\
                   <!DOCTYPE score-partwise PUBLIC \"-//X//EN\" \"http://x/y.dtd\">\n\
                   <!-- a comment -->\n\
                   <score-partwise version=\"3.1\"><part id=\"P1\"/></score-partwise>";
        let events = drain(doc);
        assert_eq!(
            events,
            vec![
                XmlEvent::Start("score-partwise".into()),
                XmlEvent::Start("part".into()),
                XmlEvent::End("part".into()),
                XmlEvent::End("score-partwise".into()),
            ]
        );
    }

    #[test]
    fn entities_decode() {
        let events = drain("<t>a&amp;b &lt;x&gt; &#65;&#x42;</t>");
        assert_eq!(events[1], XmlEvent::Text("a&b <x> AB".into()));
        let mut reader = XmlReader::new("<t>&bogus;</t>");
        reader.next().unwrap();
        assert!(reader.next().is_err());
    }

    #[test]
    fn line_numbers_track_newlines() {
        let mut reader = XmlReader::new("<a>\n<b>\n<unclosed");
        reader.next().unwrap();
        reader.next().unwrap();
        let err = reader.next().unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn quoted_gt_inside_attribute() {
        let events = drain("<a title=\"x > y\">t</a>");
        assert_eq!(events[0], XmlEvent::Start("a".into()));
        assert_eq!(events[1], XmlEvent::Text("t".into()));
    }
}

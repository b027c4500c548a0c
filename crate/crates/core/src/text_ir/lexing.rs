use std::borrow::Cow;

use super::{ParseError, ParseErrorKind};

/// Blanks out `//` line comments and, when `block` is set, `/* ... */`
/// block comments. Newlines are kept so line numbers survive.
pub(super) fn strip_comments(text: &str, block: bool) -> Result<Cow<'_, str>, ParseError> {
    if !text.contains("//") && !(block && text.contains("/*")) {
        return Ok(Cow::Borrowed(text));
    }
    let bytes = text.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut line = 1;
    let mut i = 0;
    while i < bytes.len() {
        match (bytes[i], bytes.get(i + 1)) {
            (b'/', Some(b'/')) => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            (b'/', Some(b'*')) if block => {
                let start_line = line;
                i += 2;
                loop {
                    match (bytes.get(i), bytes.get(i + 1)) {
                        (None, _) => {
                            return Err(ParseError::new(
                                start_line,
                                ParseErrorKind::UnterminatedComment,
                            ))
                        }
                        (Some(b'*'), Some(b'/')) => {
                            i += 2;
                            break;
                        }
                        (Some(b'\n'), _) => {
                            out.push(b'\n');
                            line += 1;
                            i += 1;
                        }
                        _ => i += 1,
                    }
                }
                out.push(b' ');
            }
            (c, _) => {
                if c == b'\n' {
                    line += 1;
                }
                out.push(c);
                i += 1;
            }
        }
    }
    // Only ASCII bytes were removed or inserted, so the buffer stays UTF-8.
    Ok(Cow::Owned(
        String::from_utf8(out).expect("comment stripping preserves UTF-8"),
    ))
}

/// A byte cursor over one statement's operand text. Whitespace between
/// tokens is skipped.
pub(super) struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    /// `[A-Za-z_][A-Za-z0-9_]*`
    pub fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let first = *self.src.get(self.pos)?;
        if !(first.is_ascii_alphabetic() || first == b'_') {
            return None;
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()
    }

    pub fn index(&mut self) -> Option<usize> {
        self.skip_ws();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(d) = self.src.get(self.pos).filter(|b| b.is_ascii_digit()) {
            value = value.checked_mul(10)?.checked_add((d - b'0') as usize)?;
            self.pos += 1;
        }
        (self.pos > start).then_some(value)
    }

    /// Raw text up to (not including) the first byte in `stops`.
    pub fn until(&mut self, stops: &[u8]) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && !stops.contains(&self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap_or("")
            .trim_end()
    }
}

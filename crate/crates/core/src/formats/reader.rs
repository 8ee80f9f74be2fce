//! Line and token readers over `BufRead` that track positions for error
//! reporting. Only the current line is held in memory.

use std::io::BufRead;

use super::{FormatTag, ParseError, Position};

pub(crate) struct LineReader<R> {
    reader: R,
    buf: String,
    format: FormatTag,
    line_no: usize,
    line_offset: usize,
    next_offset: usize,
}

impl<R: BufRead> LineReader<R> {
    pub fn new(reader: R, format: FormatTag) -> Self {
        Self { reader, buf: String::new(), format, line_no: 0, line_offset: 0, next_offset: 0 }
    }

    pub fn format(&self) -> FormatTag {
        self.format
    }

    /// Next line without its terminator (LF or CRLF).
    pub fn next_line(&mut self) -> Result<Option<&str>, ParseError> {
        self.buf.clear();
        let read = self.reader.read_line(&mut self.buf).map_err(|e| {
            ParseError::new(self.format, self.end_position(), format!("read failed: {e}"))
        })?;
        if read == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        self.line_offset = self.next_offset;
        self.next_offset += read;
        if self.buf.ends_with('\n') {
            self.buf.pop();
            if self.buf.ends_with('\r') {
                self.buf.pop();
            }
        }
        Ok(Some(&self.buf))
    }

    pub fn current(&self) -> &str {
        &self.buf
    }

    /// Position of byte `col` (0-based) within the current line.
    pub fn position_at(&self, col: usize) -> Position {
        Position { line: self.line_no.max(1), column: col + 1, offset: self.line_offset + col }
    }

    /// Position of `token`, which must be a slice of the current line.
    pub fn position_of(&self, token: &str) -> Position {
        let start = self.buf.as_ptr() as usize;
        let at = token.as_ptr() as usize;
        let col = if at >= start && at <= start + self.buf.len() { at - start } else { 0 };
        self.position_at(col)
    }

    pub fn line_position(&self) -> Position {
        self.position_at(0)
    }

    /// Position just past the end of the consumed input.
    pub fn end_position(&self) -> Position {
        Position { line: self.line_no.max(1), column: self.buf.len() + 1, offset: self.next_offset }
    }

    pub fn error_at(&self, at: Position, message: impl Into<String>) -> ParseError {
        ParseError::new(self.format, at, message)
    }

    pub fn error_token(&self, token: &str, message: impl Into<String>) -> ParseError {
        ParseError::new(self.format, self.position_of(token), message)
    }

    pub fn error_line(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.format, self.line_position(), message)
    }
}

/// Whitespace-separated tokens spanning lines.
pub(crate) struct TokenReader<R> {
    lines: LineReader<R>,
    pos: usize,
    started: bool,
    eof: bool,
}

impl<R: BufRead> TokenReader<R> {
    pub fn new(reader: R, format: FormatTag) -> Self {
        Self { lines: LineReader::new(reader, format), pos: 0, started: false, eof: false }
    }

    pub fn format(&self) -> FormatTag {
        self.lines.format()
    }

    /// Moves to the start of the next token; false at end of input.
    fn seek(&mut self) -> Result<bool, ParseError> {
        loop {
            if self.eof {
                return Ok(false);
            }
            if self.started {
                let line = self.lines.current().as_bytes();
                while self.pos < line.len() && line[self.pos].is_ascii_whitespace() {
                    self.pos += 1;
                }
                if self.pos < line.len() {
                    return Ok(true);
                }
            }
            if self.lines.next_line()?.is_none() {
                self.eof = true;
                return Ok(false);
            }
            self.started = true;
            self.pos = 0;
        }
    }

    pub fn next_token(&mut self) -> Result<Option<(Position, &str)>, ParseError> {
        if !self.seek()? {
            return Ok(None);
        }
        let start = self.pos;
        let line = self.lines.current().as_bytes();
        let mut end = start;
        while end < line.len() && !line[end].is_ascii_whitespace() {
            end += 1;
        }
        self.pos = end;
        let at = self.lines.position_at(start);
        Ok(Some((at, &self.lines.current()[start..end])))
    }

    /// Whether the next token equals `word`, without consuming it.
    pub fn peek_is(&mut self, word: &str) -> Result<bool, ParseError> {
        if !self.seek()? {
            return Ok(false);
        }
        let line = &self.lines.current()[self.pos..];
        let end = line.find(|c: char| c.is_ascii_whitespace()).unwrap_or(line.len());
        Ok(&line[..end] == word)
    }

    pub fn end_position(&self) -> Position {
        self.lines.end_position()
    }

    pub fn error(&self, at: Position, message: impl Into<String>) -> ParseError {
        self.lines.error_at(at, message)
    }

    /// Next token, or an error naming `what` at end of input.
    pub fn expect(&mut self, what: &str) -> Result<(Position, &str), ParseError> {
        let end = self.end_position();
        let format = self.format();
        match self.next_token()? {
            Some(tok) => Ok(tok),
            None => Err(ParseError::new(format, end, format!("unexpected end of input, expected {what}"))),
        }
    }

    pub fn expect_usize(&mut self, what: &str) -> Result<(Position, usize), ParseError> {
        let format = self.format();
        let (at, tok) = self.expect(what)?;
        tok.parse::<usize>()
            .map(|v| (at, v))
            .map_err(|_| ParseError::new(format, at, format!("expected {what} (non-negative integer), found `{tok}`")))
    }

    pub fn expect_keyword(&mut self, word: &str) -> Result<Position, ParseError> {
        let format = self.format();
        let (at, tok) = self.expect(word)?;
        if tok == word {
            Ok(at)
        } else {
            Err(ParseError::new(format, at, format!("expected `{word}`, found `{tok}`")))
        }
    }

    /// Fails if any token remains.
    pub fn expect_end(&mut self) -> Result<(), ParseError> {
        let format = self.format();
        match self.next_token()? {
            None => Ok(()),
            Some((at, tok)) => Err(ParseError::new(format, at, format!("unexpected trailing token `{tok}`"))),
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

use super::ast::Span;
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Str(String),
    Kw(Kw),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Def,
    If,
    Elif,
    Else,
    For,
    In,
    While,
    Return,
    Pass,
    And,
    Or,
    Not,
    True,
    False,
}

fn keyword(s: &str) -> Option<Kw> {
    Some(match s {
        "def" => Kw::Def,
        "if" => Kw::If,
        "elif" => Kw::Elif,
        "else" => Kw::Else,
        "for" => Kw::For,
        "in" => Kw::In,
        "while" => Kw::While,
        "return" => Kw::Return,
        "pass" => Kw::Pass,
        "and" => Kw::And,
        "or" => Kw::Or,
        "not" => Kw::Not,
        "True" => Kw::True,
        "False" => Kw::False,
        _ => return None,
    })
}

// Longest first.
const IMP_OPS: &[&str] = &[
    "**=", "**", "+=", "-=", "*=", "/=", "==", "!=", "<=", ">=", "(", ")", "[", "]", ",", ":", ".", "=", "+", "-", "*", "/", "<",
    ">",
];
const EML_OPS: &[&str] = &["->", "'", "?", "~", "{", "}", "|", ";"];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Tokenizer for IMP source and, with `eml` set, for error-model files.
///
/// IMP mode produces `Indent`/`Dedent` tokens from leading whitespace. EML
/// mode has no indentation structure: every logical line ends in `Newline`.
pub fn tokenize(src: &str, eml: bool) -> Result<Vec<Token>, SyntaxError> {
    Lexer { src, pos: 0, line: 1, line_start: 0, eml, out: Vec::new(), indents: vec![0], depth: 0 }.run()
}

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    line: u32,
    line_start: usize,
    eml: bool,
    out: Vec<Token>,
    indents: Vec<usize>,
    depth: usize,
}

impl Lexer<'_> {
    fn col(&self, pos: usize) -> u32 {
        self.src[self.line_start..pos].chars().count() as u32 + 1
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { line: self.line, col: self.col(pos), message: msg.into() }
    }

    fn push(&mut self, tok: Tok, start: usize, end: usize) {
        let span = Span::new(start, end, self.line, self.col(start));
        self.out.push(Token { tok, span });
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        let bytes = self.src.as_bytes();
        let mut at_line_start = true;
        while self.pos < bytes.len() {
            if at_line_start && self.depth == 0 {
                at_line_start = false;
                if !self.indentation()? {
                    continue;
                }
            }
            let c = bytes[self.pos];
            match c {
                b'\n' => {
                    if self.depth == 0 && !matches!(self.out.last().map(|t| &t.tok), Some(Tok::Newline) | None) {
                        self.push(Tok::Newline, self.pos, self.pos);
                    }
                    self.pos += 1;
                    self.line += 1;
                    self.line_start = self.pos;
                    at_line_start = self.depth == 0;
                }
                b' ' | b'\r' => self.pos += 1,
                b'\t' => return Err(self.err(self.pos, "tab characters are not allowed")),
                b'#' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b'0'..=b'9' => {
                    let start = self.pos;
                    while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let text = &self.src[start..self.pos];
                    let n = text.parse::<i64>().map_err(|_| self.err(start, "integer literal too large"))?;
                    self.push(Tok::Int(n), start, self.pos);
                }
                c if c == b'_' || c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while self.pos < bytes.len() && (bytes[self.pos] == b'_' || bytes[self.pos].is_ascii_alphanumeric()) {
                        self.pos += 1;
                    }
                    let text = &self.src[start..self.pos];
                    let tok = match keyword(text) {
                        Some(k) => Tok::Kw(k),
                        None => Tok::Name(text.to_string()),
                    };
                    self.push(tok, start, self.pos);
                }
                b'"' if self.eml => self.string()?,
                _ => self.operator()?,
            }
        }
        if !matches!(self.out.last().map(|t| &t.tok), Some(Tok::Newline) | None) {
            self.push(Tok::Newline, self.pos, self.pos);
        }
        if self.depth > 0 {
            return Err(self.err(self.pos, "unexpected end of input inside brackets"));
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, self.pos, self.pos);
        }
        self.push(Tok::Eof, self.pos, self.pos);
        Ok(self.out)
    }

    /// Handles leading whitespace. Returns false when the line is blank or a
    /// comment, in which case it has been consumed up to its newline.
    fn indentation(&mut self) -> Result<bool, SyntaxError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        while self.pos < bytes.len() && bytes[self.pos] == b' ' {
            self.pos += 1;
        }
        match bytes.get(self.pos) {
            None => return Ok(false),
            Some(b'\t') => return Err(self.err(self.pos, "tab characters are not allowed")),
            Some(b'#') => {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                return Ok(false);
            }
            Some(b'\n') | Some(b'\r') => return Ok(false),
            _ => {}
        }
        if self.eml {
            return Ok(true);
        }
        let width = self.pos - start;
        let cur = *self.indents.last().unwrap();
        if width > cur {
            self.indents.push(width);
            self.push(Tok::Indent, start, self.pos);
        } else {
            while width < *self.indents.last().unwrap() {
                self.indents.pop();
                self.push(Tok::Dedent, self.pos, self.pos);
            }
            if width != *self.indents.last().unwrap() {
                return Err(self.err(self.pos, "inconsistent dedent"));
            }
        }
        Ok(true)
    }

    fn string(&mut self) -> Result<(), SyntaxError> {
        let start = self.pos;
        self.pos += 1;
        let mut text = String::new();
        let mut chars = self.src[self.pos..].char_indices();
        loop {
            match chars.next() {
                None | Some((_, '\n')) => return Err(self.err(start, "unterminated string")),
                Some((i, '"')) => {
                    self.pos += i + 1;
                    break;
                }
                Some((_, '\\')) => match chars.next() {
                    Some((_, 'n')) => text.push('\n'),
                    Some((_, c @ ('"' | '\\'))) => text.push(c),
                    _ => return Err(self.err(start, "bad escape in string")),
                },
                Some((_, c)) => text.push(c),
            }
        }
        self.push(Tok::Str(text), start, self.pos);
        Ok(())
    }

    fn operator(&mut self) -> Result<(), SyntaxError> {
        let rest = &self.src[self.pos..];
        let found = IMP_OPS
            .iter()
            .chain(if self.eml { EML_OPS } else { &[] })
            .filter(|op| rest.starts_with(**op))
            .max_by_key(|op| op.len());
        let Some(&op) = found else {
            let c = rest.chars().next().unwrap();
            return Err(self.err(self.pos, format!("unexpected character {c:?}")));
        };
        match op {
            "(" | "[" | "{" => self.depth += 1,
            ")" | "]" | "}" => {
                if self.depth == 0 {
                    return Err(self.err(self.pos, format!("unbalanced '{op}'")));
                }
                self.depth -= 1;
            }
            _ => {}
        }
        let start = self.pos;
        self.pos += op.len();
        self.push(Tok::Op(op), start, self.pos);
        Ok(())
    }
}

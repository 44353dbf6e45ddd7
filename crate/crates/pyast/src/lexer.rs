//! Tokenizer producing the logical-line token stream (`NEWLINE`, `INDENT`,
//! `DEDENT`) the parser consumes.

use crate::ast::Loc;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Number(String),
    Str(StrTok),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    EndMarker,
}

/// A single string literal token. `body` is the text between the quotes,
/// escapes undecoded.
#[derive(Debug, Clone, PartialEq)]
pub struct StrTok {
    pub raw: bool,
    pub bytes: bool,
    pub fstring: bool,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub loc: Loc,
}

const OPS3: [&str; 5] = ["**=", "//=", ">>=", "<<=", "..."];
const OPS2: [&str; 19] = [
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "@=",
];
const OPS1: [&str; 23] = [
    "+", "-", "*", "/", "%", "@", "&", "|", "^", "~", "<", ">", "(", ")", "[", "]", "{", "}", ",",
    ":", ".", ";", "=",
];

const TABSIZE: u32 = 8;

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    line_start: usize,
    depth: u32,
    indents: Vec<u32>,
    at_line_start: bool,
    tokens: Vec<Token>,
}

/// Tokenize a complete module.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    tokenize_from_line(src, 1)
}

/// Tokenize with line numbers starting at `first_line` (used for f-string
/// replacement fields).
pub fn tokenize_from_line(src: &str, first_line: u32) -> Result<Vec<Token>, ParseError> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let chars: Vec<char> = if src.contains('\r') {
        src.replace("\r\n", "\n")
            .replace('\r', "\n")
            .chars()
            .collect()
    } else {
        src.chars().collect()
    };
    let mut lx = Lexer {
        chars,
        pos: 0,
        line: first_line,
        line_start: 0,
        depth: 0,
        indents: vec![0],
        at_line_start: true,
        tokens: Vec::new(),
    };
    lx.run()?;
    Ok(lx.tokens)
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

impl Lexer {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn loc(&self) -> Loc {
        Loc {
            line: self.line,
            col: (self.pos - self.line_start) as u32,
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.loc(), msg)
    }

    fn push(&mut self, tok: Tok, loc: Loc) {
        self.tokens.push(Token { tok, loc });
    }

    fn newline_consumed(&mut self) {
        self.line += 1;
        self.line_start = self.pos;
    }

    fn run(&mut self) -> Result<(), ParseError> {
        loop {
            if self.at_line_start && self.depth == 0 {
                if !self.handle_indentation()? {
                    break;
                }
                continue;
            }
            let Some(c) = self.peek(0) else { break };
            match c {
                ' ' | '\t' | '\x0c' => self.pos += 1,
                '#' => self.skip_comment(),
                '\\' if self.peek(1) == Some('\n') => {
                    self.pos += 2;
                    self.newline_consumed();
                }
                '\n' => {
                    let loc = self.loc();
                    self.pos += 1;
                    if self.depth == 0 {
                        self.push(Tok::Newline, loc);
                        self.at_line_start = true;
                    }
                    self.newline_consumed();
                }
                '0'..='9' => self.number()?,
                '.' if matches!(self.peek(1), Some('0'..='9')) => self.number()?,
                '"' | '\'' => self.string(false, false, false)?,
                c if is_ident_start(c) => self.name_or_prefixed_string()?,
                _ => self.operator()?,
            }
        }
        if self.depth > 0 {
            return Err(self.err("unexpected EOF inside brackets"));
        }
        let loc = self.loc();
        if !matches!(
            self.tokens.last().map(|t| &t.tok),
            None | Some(Tok::Newline) | Some(Tok::Dedent) | Some(Tok::Indent)
        ) {
            self.push(Tok::Newline, loc);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, loc);
        }
        self.push(Tok::EndMarker, loc);
        Ok(())
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                break;
            }
            self.pos += 1;
        }
    }

    /// Measures indentation of a new logical line. Returns false at EOF.
    fn handle_indentation(&mut self) -> Result<bool, ParseError> {
        let mut col = 0u32;
        loop {
            match self.peek(0) {
                Some(' ') => col += 1,
                Some('\t') => col = (col / TABSIZE + 1) * TABSIZE,
                Some('\x0c') => col = 0,
                _ => break,
            }
            self.pos += 1;
        }
        match self.peek(0) {
            None => return Ok(false),
            Some('#') => {
                self.skip_comment();
                return Ok(true);
            }
            Some('\n') => {
                self.pos += 1;
                self.newline_consumed();
                return Ok(true);
            }
            Some('\\') if self.peek(1) == Some('\n') => {
                // Continuation on an otherwise empty line joins with the next.
                self.pos += 2;
                self.newline_consumed();
                return Ok(true);
            }
            _ => {}
        }
        let loc = self.loc();
        let top = *self.indents.last().expect("indent stack never empty");
        if col > top {
            self.indents.push(col);
            self.push(Tok::Indent, loc);
        } else if col < top {
            while *self.indents.last().expect("indent stack never empty") > col {
                self.indents.pop();
                self.push(Tok::Dedent, loc);
            }
            if *self.indents.last().expect("indent stack never empty") != col {
                return Err(ParseError::new(
                    loc,
                    "unindent does not match any outer indentation level",
                ));
            }
        }
        self.at_line_start = false;
        Ok(true)
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let loc = self.loc();
        let start = self.pos;
        let radix = matches!(self.peek(0), Some('0'))
            && matches!(self.peek(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B'));
        if radix {
            self.pos += 2;
            while matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                self.pos += 1;
            }
        } else {
            self.digits();
            if self.peek(0) == Some('.') {
                self.pos += 1;
                self.digits();
            }
            if matches!(self.peek(0), Some('e' | 'E')) {
                let sign = matches!(self.peek(1), Some('+' | '-'));
                let digit_at = if sign { 2 } else { 1 };
                if matches!(self.peek(digit_at), Some('0'..='9')) {
                    self.pos += digit_at;
                    self.digits();
                }
            }
            if matches!(self.peek(0), Some('j' | 'J')) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(0), Some(c) if is_ident_start(c)) {
            return Err(self.err("invalid numeric literal"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        self.push(Tok::Number(text), loc);
        Ok(())
    }

    fn digits(&mut self) {
        while matches!(self.peek(0), Some(c) if c.is_ascii_digit() || c == '_') {
            self.pos += 1;
        }
    }

    fn name_or_prefixed_string(&mut self) -> Result<(), ParseError> {
        let loc = self.loc();
        let start = self.pos;
        while matches!(self.peek(0), Some(c) if is_ident_continue(c)) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if matches!(self.peek(0), Some('"' | '\'')) && text.len() <= 2 {
            let lower = text.to_ascii_lowercase();
            let valid = matches!(
                lower.as_str(),
                "r" | "u" | "b" | "f" | "br" | "rb" | "fr" | "rf"
            );
            if valid {
                let raw = lower.contains('r');
                let bytes = lower.contains('b');
                let fstring = lower.contains('f');
                return self.string_at(loc, raw, bytes, fstring);
            }
        }
        self.push(Tok::Name(text), loc);
        Ok(())
    }

    fn string(&mut self, raw: bool, bytes: bool, fstring: bool) -> Result<(), ParseError> {
        let loc = self.loc();
        self.string_at(loc, raw, bytes, fstring)
    }

    fn string_at(
        &mut self,
        loc: Loc,
        raw: bool,
        bytes: bool,
        fstring: bool,
    ) -> Result<(), ParseError> {
        let quote = self.peek(0).expect("caller checked quote");
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        let mut body = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                return Err(ParseError::new(loc, "unterminated string literal"));
            };
            if c == '\\' {
                body.push(c);
                self.pos += 1;
                if let Some(next) = self.peek(0) {
                    body.push(next);
                    self.pos += 1;
                    if next == '\n' {
                        self.newline_consumed();
                    }
                }
                continue;
            }
            if c == quote {
                if !triple {
                    self.pos += 1;
                    break;
                }
                if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
                    self.pos += 3;
                    break;
                }
            }
            if c == '\n' {
                if !triple {
                    return Err(ParseError::new(loc, "unterminated string literal"));
                }
                body.push(c);
                self.pos += 1;
                self.newline_consumed();
                continue;
            }
            body.push(c);
            self.pos += 1;
        }
        self.push(
            Tok::Str(StrTok {
                raw,
                bytes,
                fstring,
                body,
            }),
            loc,
        );
        Ok(())
    }

    fn operator(&mut self) -> Result<(), ParseError> {
        let loc = self.loc();
        let c0 = self.peek(0).unwrap_or('\0');
        let c1 = self.peek(1).unwrap_or('\0');
        let c2 = self.peek(2).unwrap_or('\0');
        let found = OPS3
            .iter()
            .find(|op| op.chars().eq([c0, c1, c2]))
            .map(|op| (*op, 3))
            .or_else(|| {
                OPS2.iter()
                    .find(|op| op.chars().eq([c0, c1]))
                    .map(|op| (*op, 2))
            })
            .or_else(|| {
                OPS1.iter()
                    .find(|op| op.chars().eq([c0]))
                    .map(|op| (*op, 1))
            });
        let Some((op, len)) = found else {
            return Err(self.err(format!("invalid character {c0:?}")));
        };
        match op {
            "(" | "[" | "{" => self.depth += 1,
            ")" | "]" | "}" => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        self.pos += len;
        self.push(Tok::Op(op), loc);
        Ok(())
    }
}

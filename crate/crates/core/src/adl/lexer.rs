use std::iter::Peekable;
use std::str::Chars;

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    Dot,
    Eq,
    Arrow,
    FatArrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number `{n:?}`"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

pub(crate) struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    file: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(text: &'a str, file: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            file,
            line: 1,
            column: 1,
        }
    }

    fn span(&self) -> SourceSpan {
        SourceSpan::new(self.file, self.line, self.column)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// Next token and the span of its first character.
    pub(crate) fn next_token(&mut self) -> Result<(Tok, SourceSpan), ParseError> {
        self.skip_trivia();
        let span = self.span();
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, span));
        };
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            self.bump();
            return Ok((tok, span));
        }
        match c {
            '=' => {
                self.bump();
                if self.peek() == Some('>') {
                    self.bump();
                    Ok((Tok::FatArrow, span))
                } else {
                    Ok((Tok::Eq, span))
                }
            }
            '-' if self.peek2() == Some('>') => {
                self.bump();
                self.bump();
                Ok((Tok::Arrow, span))
            }
            '-' => self.number(span),
            '"' => self.string(span),
            c if c.is_ascii_digit() => self.number(span),
            c if is_ident_start(c) => Ok((Tok::Ident(self.ident()), span)),
            other => Err(ParseError::new(span, format!("unexpected character `{other}`"))),
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !is_ident_continue(c) || (c == '-' && self.peek2() == Some('>')) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn digits(&mut self, out: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            out.push(c);
            self.bump();
            n += 1;
        }
        n
    }

    fn number(&mut self, span: SourceSpan) -> Result<(Tok, SourceSpan), ParseError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            text.push('-');
            self.bump();
            if self.peek().is_some_and(is_ident_start) {
                let word = self.ident();
                return if word == "inf" {
                    Ok((Tok::Number(f64::NEG_INFINITY), span))
                } else {
                    Err(ParseError::new(span, format!("malformed number `-{word}`")).expecting("a number"))
                };
            }
        }
        if self.digits(&mut text) == 0 {
            return Err(ParseError::new(span, "malformed number").expecting("a digit"));
        }
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            self.digits(&mut text);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            text.push('e');
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                text.push(sign);
                self.bump();
            }
            if self.digits(&mut text) == 0 {
                return Err(ParseError::new(span, "malformed exponent").expecting("a digit"));
            }
        }
        if self.peek().is_some_and(is_ident_start) {
            return Err(ParseError::new(self.span(), "unexpected character after number"));
        }
        text.parse::<f64>()
            .map(|n| (Tok::Number(n), span.clone()))
            .map_err(|_| ParseError::new(span, format!("malformed number `{text}`")))
    }

    fn string(&mut self, span: SourceSpan) -> Result<(Tok, SourceSpan), ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            let here = self.span();
            match self.bump() {
                None => return Err(ParseError::new(span, "unterminated string").expecting("`\"`")),
                Some('"') => return Ok((Tok::Str(s), span)),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => s.push(c),
                    Some(c) => return Err(ParseError::new(here, format!("unknown escape `\\{c}`")).expecting("`\\\"` or `\\\\`")),
                    None => return Err(ParseError::new(span, "unterminated string").expecting("`\"`")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

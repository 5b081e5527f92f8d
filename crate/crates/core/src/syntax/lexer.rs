//! Tokenizer shared by all five languages and by the expression parser.

use std::sync::Arc;

use crate::diagnostic::{Diagnostic, SourcePos};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Keyword(Keyword),
    Int(i64),
    Double(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    Arrow,
    Assign,
    Star,
    Slash,
    Plus,
    Minus,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

macro_rules! keywords {
    ($($variant:ident => $text:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword { $($variant),* }

        impl Keyword {
            pub fn text(self) -> &'static str {
                match self { $(Keyword::$variant => $text),* }
            }

            pub fn from_text(s: &str) -> Option<Keyword> {
                match s { $($text => Some(Keyword::$variant),)* _ => None }
            }
        }
    };
}

keywords! {
    Action => "action",
    Skill => "skill",
    Task => "task",
    Process => "process",
    DomainModel => "domainmodel",
    Interface => "interface",
    Type => "type",
    Record => "record",
    Parameters => "parameters",
    Execution => "execution",
    Entry => "entry",
    Exit => "exit",
    Nodes => "nodes",
    Initial => "initial",
    Transitions => "transitions",
    End => "end",
    When => "when",
    With => "with",
    Result => "result",
    True => "true",
    False => "false",
    Void => "void",
    Double => "Double",
    Int => "Int",
    Bool => "Bool",
    String => "String",
}

impl Tok {
    /// Human-readable rendering for "expected X, found Y" messages.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Keyword(k) => format!("keyword `{}`", k.text()),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Double(d) => format!("number `{d}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of file".to_string(),
            other => format!("`{}`", other.punct_text()),
        }
    }

    fn punct_text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Assign => "=",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    file: Arc<str>,
    line: u32,
    col: u32,
}

/// Splits `src` into tokens, ending with `Tok::Eof`. Stops at the first lexical error.
pub fn tokenize(src: &str, file: &Arc<str>) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer {
        src,
        chars: src.char_indices().peekable(),
        file: file.clone(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia()?;
        let pos = lx.pos();
        let Some(&(start, c)) = lx.chars.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = match c {
            'a'..='z' | 'A'..='Z' | '_' => {
                let word = lx.take_while(start, |c| c.is_ascii_alphanumeric() || c == '_');
                match Keyword::from_text(word) {
                    Some(k) => Tok::Keyword(k),
                    None => Tok::Ident(word.to_string()),
                }
            }
            '0'..='9' => lx.number(start, &pos)?,
            '"' => lx.string(&pos)?,
            _ => {
                lx.bump();
                let next = lx.chars.peek().map(|&(_, c)| c);
                let two = |lx: &mut Lexer, t: Tok| {
                    lx.bump();
                    t
                };
                match (c, next) {
                    ('-', Some('>')) => two(&mut lx, Tok::Arrow),
                    ('<', Some('=')) => two(&mut lx, Tok::Le),
                    ('>', Some('=')) => two(&mut lx, Tok::Ge),
                    ('=', Some('=')) => two(&mut lx, Tok::EqEq),
                    ('!', Some('=')) => two(&mut lx, Tok::NotEq),
                    ('&', Some('&')) => two(&mut lx, Tok::AndAnd),
                    ('|', Some('|')) => two(&mut lx, Tok::OrOr),
                    ('{', _) => Tok::LBrace,
                    ('}', _) => Tok::RBrace,
                    ('(', _) => Tok::LParen,
                    (')', _) => Tok::RParen,
                    (';', _) => Tok::Semi,
                    (':', _) => Tok::Colon,
                    (',', _) => Tok::Comma,
                    ('.', _) => Tok::Dot,
                    ('=', _) => Tok::Assign,
                    ('*', _) => Tok::Star,
                    ('/', _) => Tok::Slash,
                    ('+', _) => Tok::Plus,
                    ('-', _) => Tok::Minus,
                    ('<', _) => Tok::Lt,
                    ('>', _) => Tok::Gt,
                    ('!', _) => Tok::Bang,
                    _ => {
                        return Err(Diagnostic::error(
                            "PARSE",
                            pos,
                            format!("unexpected character {c:?}"),
                        ))
                    }
                }
            }
        };
        out.push(Token { tok, pos });
    }
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> SourcePos {
        SourcePos {
            file: self.file.clone(),
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn take_while(&mut self, start: usize, pred: impl Fn(char) -> bool) -> &'a str {
        while matches!(self.chars.peek(), Some(&(_, c)) if pred(c)) {
            self.bump();
        }
        let end = self.offset();
        &self.src[start..end]
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            let next = self.chars.peek().map(|&(_, c)| c);
            match next {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek2() == Some('/') => {
                    while !matches!(self.chars.peek(), None | Some(&(_, '\n'))) {
                        self.bump();
                    }
                }
                Some('/') if self.peek2() == Some('*') => {
                    let open = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            None => {
                                return Err(Diagnostic::error(
                                    "PARSE",
                                    open,
                                    "unterminated block comment",
                                ))
                            }
                            Some('*') if matches!(self.chars.peek(), Some(&(_, '/'))) => {
                                self.bump();
                                break;
                            }
                            _ => {}
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn number(&mut self, start: usize, pos: &SourcePos) -> Result<Tok, Diagnostic> {
        self.take_while(start, |c| c.is_ascii_digit());
        let is_double = matches!(self.chars.peek(), Some(&(_, '.')))
            && self.peek2().is_some_and(|c| c.is_ascii_digit());
        if is_double {
            self.bump();
            let frac_start = self.offset();
            self.take_while(frac_start, |c| c.is_ascii_digit());
        }
        let end = self.offset();
        let text = &self.src[start..end];
        if is_double {
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Tok::Double(v)),
                _ => Err(Diagnostic::error(
                    "PARSE",
                    pos.clone(),
                    format!("number literal `{text}` is out of range"),
                )),
            }
        } else {
            text.parse::<i64>().map(Tok::Int).map_err(|_| {
                Diagnostic::error(
                    "PARSE",
                    pos.clone(),
                    format!("integer literal `{text}` is out of range"),
                )
            })
        }
    }

    fn string(&mut self, pos: &SourcePos) -> Result<Tok, Diagnostic> {
        self.bump();
        let mut s = String::new();
        loop {
            let here = self.pos();
            match self.bump() {
                None | Some('\n') => {
                    return Err(Diagnostic::error(
                        "PARSE",
                        pos.clone(),
                        "unterminated string literal",
                    ))
                }
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    other => {
                        return Err(Diagnostic::error(
                            "PARSE",
                            here,
                            format!("unknown escape sequence \\{}", other.unwrap_or(' ')),
                        ))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }
}

//! Lexer for FSP-lite.

use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Const,
    Range,
    Property,
    Progress,
    When,
    Stop,
    End,
    Error,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Self> {
        Some(match s {
            "const" => Keyword::Const,
            "range" => Keyword::Range,
            "property" => Keyword::Property,
            "progress" => Keyword::Progress,
            "when" => Keyword::When,
            "STOP" => Keyword::Stop,
            "END" => Keyword::End,
            "ERROR" => Keyword::Error,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    Arrow,
    Dot,
    DotDot,
    Comma,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    /// `|`
    Bar,
    /// `||`
    BarBar,
    /// `&` or `&&`
    And,
    Assign,
    EqEq,
    NotEq,
    Not,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Arrow => "->",
            Punct::Dot => ".",
            Punct::DotDot => "..",
            Punct::Comma => ",",
            Punct::Colon => ":",
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Bar => "|",
            Punct::BarBar => "||",
            Punct::And => "&&",
            Punct::Assign => "=",
            Punct::EqEq => "==",
            Punct::NotEq => "!=",
            Punct::Not => "!",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::Slash => "/",
            Punct::Percent => "%",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    /// Starts with a lowercase letter: action words, variables.
    Ident,
    /// Starts with an uppercase letter: process, range and constant names.
    UpperIdent,
    Int,
    Punct(Punct),
    Keyword(Keyword),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.text)
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(text).run()
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
    out: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            column: 1,
            out: Vec::new(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        while let Some(c) = self.peek() {
            let (line, column) = (self.line, self.column);
            if c.is_whitespace() {
                self.bump();
            } else if c == '/' && self.peek2() == Some('/') {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = self.offset();
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.bump();
                }
                let text = &self.src[start..self.offset()];
                let kind = match Keyword::from_ident(text) {
                    Some(k) => TokenKind::Keyword(k),
                    None if c.is_ascii_uppercase() => TokenKind::UpperIdent,
                    None if c.is_ascii_lowercase() => TokenKind::Ident,
                    None => return Err(ParseError::UnknownCharacter { line, column, ch: c }),
                };
                self.push(kind, text.to_string(), line, column);
            } else if c.is_ascii_digit() {
                let start = self.offset();
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
                let text = self.src[start..self.offset()].to_string();
                self.push(TokenKind::Int, text, line, column);
            } else {
                let p = self.punct(c).ok_or(ParseError::UnknownCharacter { line, column, ch: c })?;
                let start = self.offset();
                for _ in 0..self.punct_len(c) {
                    self.bump();
                }
                let text = self.src[start..self.offset()].to_string();
                self.push(TokenKind::Punct(p), text, line, column);
            }
        }
        Ok(self.out)
    }

    fn push(&mut self, kind: TokenKind, text: String, line: usize, column: usize) {
        self.out.push(Token { kind, text, line, column });
    }

    fn two(&self, c: char, next: char) -> bool {
        let mut it = self.chars.clone();
        it.next().map(|(_, x)| x) == Some(c) && it.next().map(|(_, x)| x) == Some(next)
    }

    fn punct_len(&self, c: char) -> usize {
        let doubled = matches!(
            (c, self.peek2()),
            ('-', Some('>'))
                | ('.', Some('.'))
                | ('|', Some('|'))
                | ('&', Some('&'))
                | ('=', Some('='))
                | ('!', Some('='))
                | ('<', Some('='))
                | ('>', Some('='))
        );
        if doubled {
            2
        } else {
            1
        }
    }

    fn punct(&self, c: char) -> Option<Punct> {
        let p = match c {
            '-' if self.two('-', '>') => Punct::Arrow,
            '-' => Punct::Minus,
            '.' if self.two('.', '.') => Punct::DotDot,
            '.' => Punct::Dot,
            ',' => Punct::Comma,
            ':' => Punct::Colon,
            '(' => Punct::LParen,
            ')' => Punct::RParen,
            '[' => Punct::LBracket,
            ']' => Punct::RBracket,
            '{' => Punct::LBrace,
            '}' => Punct::RBrace,
            '|' if self.two('|', '|') => Punct::BarBar,
            '|' => Punct::Bar,
            '&' => Punct::And,
            '=' if self.two('=', '=') => Punct::EqEq,
            '=' => Punct::Assign,
            '!' if self.two('!', '=') => Punct::NotEq,
            '!' => Punct::Not,
            '<' if self.two('<', '=') => Punct::Le,
            '<' => Punct::Lt,
            '>' if self.two('>', '=') => Punct::Ge,
            '>' => Punct::Gt,
            '+' => Punct::Plus,
            '*' => Punct::Star,
            '/' => Punct::Slash,
            '%' => Punct::Percent,
            _ => return None,
        };
        Some(p)
    }
}

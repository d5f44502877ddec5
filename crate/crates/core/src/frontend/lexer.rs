//! Tokenizer for the Java-like subset.

use super::ParseError;

/// A lexical token. Keywords are not distinguished from identifiers; the
/// parser matches them contextually, which keeps words like `var` usable as
/// plain identifiers where the grammar allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// An identifier or keyword.
    Ident(String),
    /// An integer or decimal literal, stored as written (suffix included).
    Number(String),
    /// A string literal, stored with its surrounding double quotes.
    Str(String),
    /// `(`
    LParen,
    /// `)`
    RParen,
    /// `{`
    LBrace,
    /// `}`
    RBrace,
    /// `;`
    Semi,
    /// `,`
    Comma,
    /// `.`
    Dot,
    /// `=`
    Assign,
    /// `*`
    Star,
}

impl Tok {
    /// Short description used in error messages.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".to_owned(),
            Tok::LParen => "`(`".to_owned(),
            Tok::RParen => "`)`".to_owned(),
            Tok::LBrace => "`{`".to_owned(),
            Tok::RBrace => "`}`".to_owned(),
            Tok::Semi => "`;`".to_owned(),
            Tok::Comma => "`,`".to_owned(),
            Tok::Dot => "`.`".to_owned(),
            Tok::Assign => "`=`".to_owned(),
            Tok::Star => "`*`".to_owned(),
        }
    }
}

/// A token together with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

/// Splits `src` into tokens, skipping whitespace and `//` / `/* */` comments.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tok_line, tok_col) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' {
            bump!();
            match chars.peek() {
                Some('/') => {
                    while let Some(&n) = chars.peek() {
                        if n == '\n' {
                            break;
                        }
                        bump!();
                    }
                    continue;
                }
                Some('*') => {
                    bump!();
                    let mut closed = false;
                    while let Some(n) = bump!() {
                        if n == '*' && chars.peek() == Some(&'/') {
                            bump!();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        return Err(ParseError::Syntax {
                            line: tok_line,
                            col: tok_col,
                            message: "unterminated block comment".to_owned(),
                        });
                    }
                    continue;
                }
                _ => {
                    return Err(ParseError::Syntax {
                        line: tok_line,
                        col: tok_col,
                        message: "unexpected character `/`".to_owned(),
                    })
                }
            }
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut ident = String::new();
            while let Some(&n) = chars.peek() {
                if n.is_alphanumeric() || n == '_' || n == '$' {
                    ident.push(n);
                    bump!();
                } else {
                    break;
                }
            }
            tokens.push(Token { tok: Tok::Ident(ident), line: tok_line, col: tok_col });
            continue;
        }
        if c.is_ascii_digit() {
            let mut lit = String::new();
            while let Some(&n) = chars.peek() {
                if n.is_ascii_digit() || n == '.' || n.is_ascii_alphabetic() {
                    lit.push(n);
                    bump!();
                } else {
                    break;
                }
            }
            tokens.push(Token { tok: Tok::Number(lit), line: tok_line, col: tok_col });
            continue;
        }
        if c == '"' {
            bump!();
            let mut lit = String::from("\"");
            let mut closed = false;
            while let Some(n) = bump!() {
                if n == '\\' {
                    lit.push(n);
                    if let Some(esc) = bump!() {
                        lit.push(esc);
                    }
                    continue;
                }
                lit.push(n);
                if n == '"' {
                    closed = true;
                    break;
                }
                if n == '\n' {
                    break;
                }
            }
            if !closed {
                return Err(ParseError::Syntax {
                    line: tok_line,
                    col: tok_col,
                    message: "unterminated string literal".to_owned(),
                });
            }
            tokens.push(Token { tok: Tok::Str(lit), line: tok_line, col: tok_col });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' => Tok::Assign,
            '*' => Tok::Star,
            other => {
                return Err(ParseError::Syntax {
                    line: tok_line,
                    col: tok_col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        bump!();
        tokens.push(Token { tok, line: tok_line, col: tok_col });
    }
    Ok(tokens)
}

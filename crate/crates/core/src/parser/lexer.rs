use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Eq,
    EqEq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,
    Bang,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub fn lex(text: &str, file: &str) -> Result<Vec<Token>, super::ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();

    macro_rules! span {
        () => {
            SourceSpan::new(file, line, col)
        };
    }

    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '/' {
            // Comment or division: peek ahead by cloning.
            let mut ahead = chars.clone();
            ahead.next();
            if ahead.peek() == Some(&'/') {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
                continue;
            }
        }
        let start = span!();
        if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    ident.push(c2);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(ident),
                span: start,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut num = String::new();
            let mut seen_dot = false;
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_digit() || (c2 == '.' && !seen_dot) {
                    if c2 == '.' {
                        // A dot must be followed by a digit to belong to the
                        // number.
                        let mut ahead = chars.clone();
                        ahead.next();
                        match ahead.peek() {
                            Some(d) if d.is_ascii_digit() => seen_dot = true,
                            _ => break,
                        }
                    }
                    num.push(c2);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Number(num),
                span: start,
            });
            continue;
        }
        if c == '"' {
            chars.next();
            col += 1;
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') => {
                        col += 1;
                        break;
                    }
                    Some('\n') | None => {
                        return Err(super::ParseError::new(
                            "unterminated string literal",
                            start,
                            vec!["`\"`".into()],
                        ));
                    }
                    Some(c2) => {
                        s.push(c2);
                        col += 1;
                    }
                }
            }
            out.push(Token {
                tok: Tok::Str(s),
                span: start,
            });
            continue;
        }
        chars.next();
        col += 1;
        let two = |chars: &mut std::iter::Peekable<std::str::Chars>, col: &mut u32, next: char| {
            if chars.peek() == Some(&next) {
                chars.next();
                *col += 1;
                true
            } else {
                false
            }
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '=' => {
                if two(&mut chars, &mut col, '=') {
                    Tok::EqEq
                } else {
                    Tok::Eq
                }
            }
            '!' => {
                if two(&mut chars, &mut col, '=') {
                    Tok::Ne
                } else {
                    Tok::Bang
                }
            }
            '<' => {
                if two(&mut chars, &mut col, '=') {
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            '>' => {
                if two(&mut chars, &mut col, '=') {
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '-' => {
                if two(&mut chars, &mut col, '>') {
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            other => {
                return Err(super::ParseError::new(
                    format!("unexpected character `{other}`"),
                    start,
                    vec![],
                ));
            }
        };
        out.push(Token { tok, span: start });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span!(),
    });
    Ok(out)
}

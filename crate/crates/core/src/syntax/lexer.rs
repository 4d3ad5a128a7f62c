use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Num(u64),
    Ident(String),
    /// Raw text of a `w[...]` write command.
    Write(String),
    ColonEq,
    Eq,
    Le,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBrack,
    RBrack,
    AndAnd,
    OrOr,
    Bang,
    Semi,
    Question,
    CondL,
    CondR,
    Hash,
    Caret,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Write(s) => format!("write command w[{s}]"),
            Tok::Eof => "end of input".to_string(),
            t => format!("{:?}", symbol(t)),
        }
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::ColonEq => ":=",
        Tok::Eq => "=",
        Tok::Le => "<=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::AndAnd => "&&",
        Tok::OrOr => "||",
        Tok::Bang => "!",
        Tok::Semi => ";",
        Tok::Question => "?",
        Tok::CondL => "<|",
        Tok::CondR => "|>",
        Tok::Hash => "#",
        Tok::Caret => "^",
        _ => "?",
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };

    while i < chars.len() {
        let c = chars[i];
        let (sl, sc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<u64>()
                .map_err(|_| err(sl, sc, format!("numeral {text} is too large")))?;
            col += i - start;
            out.push(Spanned { tok: Tok::Num(n), line: sl, col: sc });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            if text == "w" && chars.get(i) == Some(&'[') {
                let mut depth = 0usize;
                let body_start = i + 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(sl, sc, "unterminated write command".into())),
                        Some('[') => depth += 1,
                        Some(']') => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        Some('\n') => {
                            return Err(err(sl, sc, "write command spans lines".into()))
                        }
                        _ => {}
                    }
                    i += 1;
                    col += 1;
                }
                let body: String = chars[body_start..i].iter().collect();
                i += 1;
                col += 1;
                out.push(Spanned { tok: Tok::Write(body), line: sl, col: sc });
            } else {
                out.push(Spanned { tok: Tok::Ident(text), line: sl, col: sc });
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: sl, col: sc });
            *i += len;
            *col += len;
        };
        match (c, next) {
            (':', Some('=')) => push(Tok::ColonEq, 2, &mut i, &mut col),
            ('<', Some('=')) => push(Tok::Le, 2, &mut i, &mut col),
            ('<', Some('|')) => push(Tok::CondL, 2, &mut i, &mut col),
            ('|', Some('>')) => push(Tok::CondR, 2, &mut i, &mut col),
            ('|', Some('|')) => push(Tok::OrOr, 2, &mut i, &mut col),
            ('&', Some('&')) => push(Tok::AndAnd, 2, &mut i, &mut col),
            ('=', _) => push(Tok::Eq, 1, &mut i, &mut col),
            ('+', _) => push(Tok::Plus, 1, &mut i, &mut col),
            ('-', _) => push(Tok::Minus, 1, &mut i, &mut col),
            ('*', _) => push(Tok::Star, 1, &mut i, &mut col),
            ('(', _) => push(Tok::LParen, 1, &mut i, &mut col),
            (')', _) => push(Tok::RParen, 1, &mut i, &mut col),
            ('[', _) => push(Tok::LBrack, 1, &mut i, &mut col),
            (']', _) => push(Tok::RBrack, 1, &mut i, &mut col),
            ('!', _) => push(Tok::Bang, 1, &mut i, &mut col),
            (';', _) => push(Tok::Semi, 1, &mut i, &mut col),
            ('?', _) => push(Tok::Question, 1, &mut i, &mut col),
            ('#', _) => push(Tok::Hash, 1, &mut i, &mut col),
            ('^', _) => push(Tok::Caret, 1, &mut i, &mut col),
            _ => return Err(err(sl, sc, format!("unexpected character {c:?}"))),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(String),
    Backslash,
    Dot,
    Slash,
    Comma,
    Plus,
    Amp,
    Arrow,
    DashDash,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '\\' | 'λ' => Some(Tok::Backslash),
            '.' => Some(Tok::Dot),
            '/' => Some(Tok::Slash),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '&' | '∧' => Some(Tok::Amp),
            ':' => Some(Tok::Colon),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push(Token { tok, pos });
            continue;
        }
        if c == '-' {
            chars.next();
            match chars.peek() {
                Some(&(_, '>')) => {
                    chars.next();
                    out.push(Token { tok: Tok::Arrow, pos });
                }
                Some(&(_, '-')) => {
                    chars.next();
                    out.push(Token { tok: Tok::DashDash, pos });
                }
                _ => return Err(SyntaxError::parse(pos, "unexpected '-'")),
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Number(s), pos });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d != 'λ' && (d.is_alphanumeric() || d == '_' || d == '\'') {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(s), pos });
            continue;
        }
        return Err(SyntaxError::parse(pos, format!("unexpected character {c:?}")));
    }
    out.push(Token { tok: Tok::Eof, pos: text.len() });
    Ok(out)
}

/// A cursor over a token vector.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Cursor, SyntaxError> {
        Ok(Cursor { toks: tokenize(text)?, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.at + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {}", describe(&other)))),
        }
    }

    pub fn number(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Number(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected a number, found {}", describe(&other)))),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", describe(self.peek()))))
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::parse(self.pos(), msg)
    }
}

pub(crate) fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Number(s) => format!("number `{s}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("`{}`", symbol_text(other)),
    }
}

fn symbol_text(tok: &Tok) -> &'static str {
    match tok {
        Tok::Backslash => "\\",
        Tok::Dot => ".",
        Tok::Slash => "/",
        Tok::Comma => ",",
        Tok::Plus => "+",
        Tok::Amp => "&",
        Tok::Arrow => "->",
        Tok::DashDash => "--",
        Tok::Colon => ":",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Ident(_) | Tok::Number(_) | Tok::Eof => "",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_choice_and_lambda() {
        let toks: Vec<Tok> = tokenize("λx. x (+1/2) y").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Backslash,
                Tok::Ident("x".into()),
                Tok::Dot,
                Tok::Ident("x".into()),
                Tok::LParen,
                Tok::Plus,
                Tok::Number("1".into()),
                Tok::Slash,
                Tok::Number("2".into()),
                Tok::RParen,
                Tok::Ident("y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(tokenize("x ? y").is_err());
    }
}

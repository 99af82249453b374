//! Tokenizer shared by documents, configuration literals and trace files.

use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// A name or a number. Bracketed segments such as `[q,!a,q']` are part
    /// of the word, so compiled intermediary states round-trip.
    Word(String),
    Punct(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const PUNCT: &[&str] = &[
    "->", "=>", "..", ":", ";", ",", "{", "}", "(", ")", "!", "?", "@", "=", "+", "*",
];

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '#' | '\'' | '~' | '$')
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if rest.starts_with("//") {
            i += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        if word_char(c) || c == '[' {
            let start = i;
            let mut depth = 0usize;
            while i < src.len() {
                let c = src[i..].chars().next().unwrap();
                if c == '[' {
                    depth += 1;
                } else if c == ']' {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                } else if (depth == 0 && !word_char(c)) || c == '\n' {
                    break;
                }
                i += c.len_utf8();
            }
            if depth > 0 {
                return Err(Diagnostic::error(
                    "unterminated `[` in name",
                    Span::new(start, i),
                ));
            }
            out.push(Token {
                tok: Tok::Word(src[start..i].to_string()),
                span: Span::new(start, i),
            });
            continue;
        }
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Token {
                    tok: Tok::Punct(p),
                    span: Span::new(i, i + p.len()),
                });
                i += p.len();
            }
            None => {
                return Err(Diagnostic::error(
                    format!("unexpected character `{c}`"),
                    Span::new(i, i + c.len_utf8()),
                ));
            }
        }
    }
    Ok(out)
}

/// True if `name` is read back as exactly one word.
pub fn is_plain_name(name: &str) -> bool {
    matches!(tokenize(name).as_deref(), Ok([Token { tok: Tok::Word(w), .. }]) if w == name)
}

/// A token stream with one-token lookahead.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: Span,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, Diagnostic> {
        Self::at_offset(src, 0)
    }

    /// Tokenizes `src`, shifting every span by `offset`.
    pub fn at_offset(src: &str, offset: usize) -> Result<Self, Diagnostic> {
        let shift = |s: Span| Span::new(s.start + offset, s.end + offset);
        let toks = tokenize(src)
            .map_err(|mut d| {
                d.span = shift(d.span);
                d
            })?
            .into_iter()
            .map(|t| Token {
                span: shift(t.span),
                ..t
            })
            .collect();
        let e = offset + src.len();
        Ok(Self {
            toks,
            pos: 0,
            end: Span::new(e, e),
        })
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Span of the next token, or an empty span at the end of input.
    pub fn here(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.span)
    }

    pub fn peek_punct(&self, p: &str) -> bool {
        matches!(self.toks.get(self.pos), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    pub fn peek_word(&self, w: &str) -> bool {
        matches!(self.toks.get(self.pos), Some(Token { tok: Tok::Word(v), .. }) if v == w)
    }

    /// Whether the token after the next one is the punctuation `p`.
    pub fn second_is_punct(&self, p: &str) -> bool {
        matches!(self.toks.get(self.pos + 1), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.peek_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn found(&self) -> String {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Word(w), .. }) => format!("`{w}`"),
            Some(Token { tok: Tok::Punct(p), .. }) => format!("`{p}`"),
            None => "end of input".into(),
        }
    }

    pub fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {wanted}, found {}", self.found()), self.here())
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<Span, Diagnostic> {
        let span = self.here();
        if self.eat_punct(p) {
            Ok(span)
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    pub fn word(&mut self, what: &str) -> Result<(String, Span), Diagnostic> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Word(w),
                span,
            }) => {
                let r = (w.clone(), *span);
                self.pos += 1;
                Ok(r)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<Span, Diagnostic> {
        if self.peek_word(kw) {
            let span = self.here();
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn nat(&mut self) -> Result<(u64, Span), Diagnostic> {
        let (w, span) = self.word("a number")?;
        w.parse::<u64>()
            .map(|n| (n, span))
            .map_err(|_| Diagnostic::error(format!("`{w}` is not a natural number"), span))
    }

    pub fn expect_end(&self) -> Result<(), Diagnostic> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        tokenize(s)
            .unwrap()
            .into_iter()
            .map(|t| match t.tok {
                Tok::Word(w) => w,
                Tok::Punct(p) => p.to_string(),
            })
            .collect()
    }

    #[test]
    fn brackets_stay_in_one_word() {
        assert_eq!(words("[q,!a,q'] ?# q"), ["[q,!a,q']", "?", "#", "q"]);
        assert_eq!(words("[p,W(a),[x]]:1"), ["[p,W(a),[x]]", ":", "1"]);
    }

    #[test]
    fn ranges_and_arrows() {
        assert_eq!(words("a: 0..inf; p @ q -> r"), ["a", ":", "0", "..", "inf", ";", "p", "@", "q", "->", "r"]);
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(words("a // b c\nd"), ["a", "d"]);
    }

    #[test]
    fn errors_carry_spans() {
        let e = tokenize("a % b").unwrap_err();
        assert_eq!(e.span, Span::new(2, 3));
        assert!(tokenize("[a, b").is_err());
    }

    #[test]
    fn cursor_offsets_spans() {
        let mut c = Cursor::at_offset("a ; b", 10).unwrap();
        assert_eq!(c.word("name").unwrap(), ("a".to_string(), Span::new(10, 11)));
        let e = c.expect_punct(",").unwrap_err();
        assert_eq!(e.span, Span::new(12, 13));
        assert!(e.message.contains("found `;`"));
    }

    #[test]
    fn plain_names() {
        assert!(is_plain_name("~a'"));
        assert!(is_plain_name("[q,?a,q']"));
        assert!(!is_plain_name("a b"));
        assert!(!is_plain_name(""));
        assert!(!is_plain_name("a-b"));
    }
}

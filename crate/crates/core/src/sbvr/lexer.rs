use serde::{Deserialize, Serialize};

use super::parser::ParseDiagnostic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    KeywordPhrase,
    Word,
    Number,
    StringLiteral,
    Period,
    Punct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    /// Surface text; multi-word keyword phrases are joined by single spaces.
    pub text: String,
    pub line: usize,
    pub col: usize,
}

impl Token {
    /// Lowercased keyword phrase, if this token is one.
    pub fn keyword(&self) -> Option<String> {
        (self.kind == TokenKind::KeywordPhrase).then(|| self.text.to_ascii_lowercase())
    }

    pub fn is_keyword(&self, phrase: &str) -> bool {
        self.kind == TokenKind::KeywordPhrase && self.text.eq_ignore_ascii_case(phrase)
    }

    pub fn is_word(&self, word: &str) -> bool {
        self.kind == TokenKind::Word && self.text.eq_ignore_ascii_case(word)
    }
}

/// Keyword phrases, longest first so that matching is greedy.
const KEYWORDS: &[&str] = &[
    "it is not the case that",
    "it is necessary that",
    "it is impossible that",
    "it is obligatory that",
    "it is prohibited that",
    "at least one",
    "greater than",
    "at least",
    "at most",
    "more than",
    "equal to",
    "less than",
    "only if",
    "exactly",
    "each",
    "some",
    "then",
    "true",
    "false",
    "and",
    "the",
    "if",
    "an",
    "no",
    "or",
    "of",
    "a",
];

/// Raw word or other lexeme before keyword grouping.
#[derive(Debug)]
struct Raw {
    kind: TokenKind,
    text: String,
    line: usize,
    col: usize,
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '\'')
}

fn scan(source: &str) -> Vec<Result<Raw, ParseDiagnostic>> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if is_word_start(c) {
            let mut text = String::new();
            while let Some(&c) = chars.peek().filter(|&&c| is_word_char(c)) {
                text.push(c);
                bump(&mut chars);
            }
            out.push(Ok(Raw { kind: TokenKind::Word, text, line: start_line, col: start_col }));
        } else if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                text.push(c);
                bump(&mut chars);
            }
            out.push(Ok(Raw { kind: TokenKind::Number, text, line: start_line, col: start_col }));
        } else if c == '"' {
            let mut text = String::from('"');
            bump(&mut chars);
            let mut closed = false;
            while let Some(c) = bump(&mut chars) {
                if c == '\n' {
                    break;
                }
                text.push(c);
                if c == '"' {
                    closed = true;
                    break;
                }
            }
            if closed {
                out.push(Ok(Raw {
                    kind: TokenKind::StringLiteral,
                    text,
                    line: start_line,
                    col: start_col,
                }));
            } else {
                out.push(Err(ParseDiagnostic::error(
                    "E_SYNTAX",
                    "unterminated string literal",
                    start_line,
                    start_col,
                )));
            }
        } else if c == '.' {
            bump(&mut chars);
            out.push(Ok(Raw { kind: TokenKind::Period, text: ".".into(), line: start_line, col: start_col }));
        } else if matches!(c, ',' | ';' | ':') {
            bump(&mut chars);
            out.push(Ok(Raw { kind: TokenKind::Punct, text: c.to_string(), line: start_line, col: start_col }));
        } else {
            bump(&mut chars);
            out.push(Err(ParseDiagnostic::error(
                "E_BAD_CHAR",
                format!("unexpected character `{c}`"),
                start_line,
                start_col,
            )));
        }
    }
    out
}

/// Lex `source` into tokens, keeping lexical errors in stream order so the
/// parser can attribute them to sentences.
pub(crate) fn lex(source: &str) -> Vec<Result<Token, ParseDiagnostic>> {
    let raw = scan(source);
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        let Ok(first) = &raw[i] else {
            out.push(Err(raw[i].as_ref().unwrap_err().clone()));
            i += 1;
            continue;
        };
        if first.kind == TokenKind::Word {
            let matched = KEYWORDS.iter().find_map(|kw| {
                let words: Vec<&str> = kw.split(' ').collect();
                let fits = words.iter().enumerate().all(|(k, w)| {
                    matches!(raw.get(i + k), Some(Ok(r)) if r.kind == TokenKind::Word && r.text.eq_ignore_ascii_case(w))
                });
                fits.then_some(words.len())
            });
            if let Some(n) = matched {
                let text = raw[i..i + n]
                    .iter()
                    .map(|r| r.as_ref().unwrap().text.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push(Ok(Token { kind: TokenKind::KeywordPhrase, text, line: first.line, col: first.col }));
                i += n;
                continue;
            }
        }
        out.push(Ok(Token { kind: first.kind, text: first.text.clone(), line: first.line, col: first.col }));
        i += 1;
    }
    out
}

/// Split Structured-English text into tokens. Keyword phrases are matched
/// case-insensitively and greedily ("at least one" before "at least").
pub fn tokenize(source: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let (tokens, errors): (Vec<_>, Vec<_>) = lex(source).into_iter().partition(Result::is_ok);
    if errors.is_empty() {
        Ok(tokens.into_iter().map(Result::unwrap).collect())
    } else {
        Err(errors.into_iter().map(Result::unwrap_err).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    fn kw(s: &str) -> (TokenKind, String) {
        (TokenKind::KeywordPhrase, s.into())
    }

    fn word(s: &str) -> (TokenKind, String) {
        (TokenKind::Word, s.into())
    }

    #[test]
    fn necessity_rule() {
        assert_eq!(
            kinds("It is necessary that each customer has at least one account."),
            vec![
                kw("It is necessary that"),
                kw("each"),
                word("customer"),
                word("has"),
                kw("at least one"),
                word("account"),
                (TokenKind::Period, ".".into()),
            ]
        );
    }

    #[test]
    fn at_least_numeral() {
        assert_eq!(kinds("at least 2"), vec![kw("at least"), (TokenKind::Number, "2".into())]);
    }

    #[test]
    fn bad_character() {
        let err = tokenize("¤").unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, "E_BAD_CHAR");
        assert_eq!((err[0].line, err[0].col), (1, 1));
    }

    #[test]
    fn keywords_are_case_insensitive_and_span_lines() {
        let toks = tokenize("IT IS   obligatory\nthat  Each").unwrap();
        assert_eq!(toks[0].text, "IT IS obligatory that");
        assert!(toks[0].is_keyword("it is obligatory that"));
        assert!(toks[1].is_keyword("each"));
        assert_eq!((toks[1].line, toks[1].col), (2, 7));
    }

    #[test]
    fn strings_numbers_comments() {
        assert_eq!(
            kinds("# heading\nname equal to \"Ann Lee\" , 42 # trailing"),
            vec![
                word("name"),
                kw("equal to"),
                (TokenKind::StringLiteral, "\"Ann Lee\"".into()),
                (TokenKind::Punct, ",".into()),
                (TokenKind::Number, "42".into()),
            ]
        );
        assert_eq!(tokenize("\"open").unwrap_err()[0].code, "E_SYNTAX");
    }

    #[test]
    fn hyphenated_words_stay_whole() {
        assert_eq!(kinds("is-part-of"), vec![word("is-part-of")]);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Number,
    Ident,
    Time,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Character offset of the first character of the lexeme.
    pub position: usize,
}

impl Token {
    /// Numeric value of a `Number` token.
    pub fn number(&self) -> Option<f64> {
        match self.kind {
            TokenKind::Number => self.lexeme.parse().ok(),
            _ => None,
        }
    }
}

/// Splits `source` into tokens, skipping whitespace.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            _ if c.is_ascii_digit() || c == '.' => {
                i = scan_number(&chars, i)?;
                tokens.push(Token {
                    kind: TokenKind::Number,
                    lexeme: chars[start..i].iter().collect(),
                    position: start,
                });
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let lexeme: String = chars[start..i].iter().collect();
                let kind = if lexeme == "t" {
                    TokenKind::Time
                } else {
                    TokenKind::Ident
                };
                tokens.push(Token {
                    kind,
                    lexeme,
                    position: start,
                });
                continue;
            }
            _ => {
                return Err(Error::Lex {
                    position: start,
                    found: c,
                })
            }
        };
        tokens.push(Token {
            kind,
            lexeme: c.to_string(),
            position: start,
        });
        i += 1;
    }
    Ok(tokens)
}

// digits ["." digits] [("e"|"E") ["+"|"-"] digits], or "." digits ...
fn scan_number(chars: &[char], mut i: usize) -> Result<usize> {
    let start = i;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    let mut mantissa = digits(&mut i);
    if i < chars.len() && chars[i] == '.' {
        i += 1;
        mantissa += digits(&mut i);
    }
    if mantissa == 0 {
        return Err(Error::Lex {
            position: start,
            found: chars[start],
        });
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        let exp_start = j;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            let position = j.min(chars.len().saturating_sub(1));
            return Err(Error::Lex {
                position: j,
                found: chars.get(position).copied().unwrap_or('e'),
            });
        }
        i = j;
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn call_tokens() {
        use TokenKind::*;
        assert_eq!(kinds("sin(t)"), vec![Ident, LParen, Time, RParen]);
        assert_eq!(tokenize("sin(t)").unwrap()[0].lexeme, "sin");
    }

    #[test]
    fn arithmetic_tokens() {
        use TokenKind::*;
        let toks = tokenize("2*t^2 - 1").unwrap();
        assert_eq!(
            toks.iter().map(|t| t.kind).collect::<Vec<_>>(),
            vec![Number, Star, Time, Caret, Number, Minus, Number]
        );
        assert_eq!(toks[0].number(), Some(2.0));
        assert_eq!(toks[6].number(), Some(1.0));
        let positions: Vec<usize> = toks.iter().map(|t| t.position).collect();
        assert_eq!(positions, vec![0, 1, 2, 3, 4, 6, 8]);
    }

    #[test]
    fn invalid_character_reports_offset() {
        assert_eq!(
            tokenize("3 $ t"),
            Err(Error::Lex {
                position: 2,
                found: '$'
            })
        );
    }

    #[test]
    fn number_forms() {
        for (src, v) in [("1.5", 1.5), (".25", 0.25), ("3.", 3.0), ("1e-3", 1e-3), ("2.5E+2", 250.0)] {
            let toks = tokenize(src).unwrap();
            assert_eq!(toks.len(), 1, "{src}");
            assert_eq!(toks[0].number(), Some(v));
        }
        assert!(tokenize("1e").is_err());
        assert!(tokenize(".").is_err());
    }

    #[test]
    fn offsets_count_characters_not_bytes() {
        let err = tokenize("t + é").unwrap_err();
        assert_eq!(
            err,
            Error::Lex {
                position: 4,
                found: 'é'
            }
        );
    }
}

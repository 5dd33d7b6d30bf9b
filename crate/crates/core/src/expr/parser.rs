use super::lexer::{Token, TokenKind};
use super::{Expr, Func};
use crate::error::{Error, Result};

/// Builds an expression tree from a token stream produced by [`tokenize`](super::tokenize).
pub fn parse(tokens: &[Token]) -> Result<Expr> {
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(tok) if tok.kind == TokenKind::RParen => Err(Error::Syntax {
            position: tok.position,
            message: "unbalanced parentheses: unmatched ')'".into(),
        }),
        Some(tok) => Err(Error::Syntax {
            position: tok.position,
            message: format!("unexpected token `{}`", tok.lexeme),
        }),
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let tok = self.tokens.get(self.pos);
        self.pos += 1;
        tok
    }

    fn end_position(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.position + t.lexeme.chars().count())
            .unwrap_or(0)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(kind @ (TokenKind::Plus | TokenKind::Minus)) = self.peek_kind() {
            self.bump();
            let rhs = self.term()?;
            lhs = if kind == TokenKind::Plus {
                Expr::add(lhs, rhs)
            } else {
                Expr::sub(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(kind @ (TokenKind::Star | TokenKind::Slash)) = self.peek_kind() {
            self.bump();
            let rhs = self.unary()?;
            lhs = if kind == TokenKind::Star {
                Expr::mul(lhs, rhs)
            } else {
                Expr::div(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_kind() == Some(TokenKind::Minus) {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_kind() == Some(TokenKind::Caret) {
            self.bump();
            // right operand may itself be signed or another power
            let exponent = self.unary()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let end = self.end_position();
        let tok = self.bump().ok_or_else(|| Error::Syntax {
            position: end,
            message: "unexpected end of input".into(),
        })?;
        match tok.kind {
            TokenKind::Number => {
                let v: f64 = tok.lexeme.parse().map_err(|_| Error::Syntax {
                    position: tok.position,
                    message: format!("malformed number `{}`", tok.lexeme),
                })?;
                if !v.is_finite() {
                    return Err(Error::Syntax {
                        position: tok.position,
                        message: format!("number `{}` is out of range", tok.lexeme),
                    });
                }
                Ok(Expr::Const(v))
            }
            TokenKind::Time => Ok(Expr::Time),
            TokenKind::Ident => {
                let func = Func::from_name(&tok.lexeme).ok_or_else(|| Error::Syntax {
                    position: tok.position,
                    message: format!("unknown function `{}`", tok.lexeme),
                })?;
                self.expect_lparen(&tok.lexeme)?;
                let arg = self.expr()?;
                self.expect_rparen(tok.position)?;
                Ok(Expr::call(func, arg))
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen(tok.position)?;
                Ok(inner)
            }
            TokenKind::RParen => Err(Error::Syntax {
                position: tok.position,
                message: "unbalanced parentheses: unmatched ')'".into(),
            }),
            _ => Err(Error::Syntax {
                position: tok.position,
                message: format!("unexpected token `{}`", tok.lexeme),
            }),
        }
    }

    fn expect_lparen(&mut self, name: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::LParen => {
                self.bump();
                Ok(())
            }
            Some(t) => Err(Error::Syntax {
                position: t.position,
                message: format!("expected '(' after `{name}`"),
            }),
            None => Err(Error::Syntax {
                position: self.end_position(),
                message: format!("expected '(' after `{name}`"),
            }),
        }
    }

    fn expect_rparen(&mut self, open_position: usize) -> Result<()> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::RParen => {
                self.bump();
                Ok(())
            }
            Some(t) => Err(Error::Syntax {
                position: t.position,
                message: format!("expected ')', found `{}`", t.lexeme),
            }),
            None => Err(Error::Syntax {
                position: open_position,
                message: "unbalanced parentheses: '(' is never closed".into(),
            }),
        }
    }
}

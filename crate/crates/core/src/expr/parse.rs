//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (("+"|"-") term)* ;
//! term     := factor (("*"|"/") factor)* ;
//! factor   := ("-")? base ("^" int)? ;
//! base     := rational | ident | "(" expr ")" ;
//! rational := int ("/" int)? ;
//! ```
//!
//! Exponents may carry a leading minus sign (`x^-2`).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{ExprError, RatFun, Rational};
use crate::jet::JetContext;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    Other(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            if i < chars.len() && chars[i].1 == '.' {
                return Err(ExprError::Syntax {
                    pos: chars[i].0,
                    msg: "decimal literals are not supported".into(),
                });
            }
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Ident(s)));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            out.push((pos, Tok::Other(c)));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ctx: &'a JetContext,
    env: &'a HashMap<String, RatFun>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<RatFun, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFun, ExprError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.factor()?;
                acc = acc.div(&d).map_err(|_| ExprError::Syntax {
                    pos,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<RatFun, ExprError> {
        let negate = self.eat('-');
        let base = self.base()?;
        let value = if self.eat('^') {
            let pos = self.pos();
            let neg_exp = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = n.clone();
                    self.at += 1;
                    n
                }
                _ => return Err(ExprError::NonIntegerExponent { pos }),
            };
            let e = e.to_i64().ok_or(ExprError::ExponentTooLarge)?;
            let e = if neg_exp { -e } else { e };
            base.pow(e).map_err(|_| ExprError::Syntax {
                pos,
                msg: "negative power of zero".into(),
            })?
        } else {
            base
        };
        Ok(if negate { value.neg() } else { value })
    }

    fn base(&mut self) -> Result<RatFun, ExprError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                // rational literal `p/q`
                if self.peek() == Some(&Tok::Op('/')) {
                    if let Some((_, Tok::Int(d))) = self.toks.get(self.at + 1).cloned() {
                        let exponent_follows =
                            matches!(self.toks.get(self.at + 2), Some((_, Tok::Op('^'))));
                        if !exponent_follows {
                            if d == BigInt::from(0) {
                                return Err(ExprError::Syntax {
                                    pos,
                                    msg: "division by zero".into(),
                                });
                            }
                            self.at += 2;
                            return Ok(RatFun::constant(Rational::new(n, d)));
                        }
                    }
                }
                Ok(RatFun::constant(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if let Some(v) = self.env.get(&name) {
                    return Ok(v.clone());
                }
                match self.ctx.resolve(&name) {
                    Some(v) => Ok(RatFun::var(v)),
                    None => Err(ExprError::UnknownVariable { name, pos }),
                }
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(Tok::Other(c)) => Err(self.err(&format!("unexpected character `{c}`"))),
            Some(t) => Err(self.err(&format!("unexpected token {t:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses an expression over the coordinates of `ctx`.
pub fn parse(src: &str, ctx: &JetContext) -> Result<RatFun, ExprError> {
    parse_with(src, ctx, &HashMap::new())
}

/// Parses with additional named values (identifiers looked up in `env`
/// before the context).
pub fn parse_with(
    src: &str,
    ctx: &JetContext,
    env: &HashMap<String, RatFun>,
) -> Result<RatFun, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
        ctx,
        env,
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

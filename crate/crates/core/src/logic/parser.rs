//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Precedence from loosest to tightest: `<->`, `->` (right associative),
//! `|`, `&`, `!`. Atoms are `xi=xj`, `xi!=xj`, `P(xi,...)` and `T`.

use std::sync::Arc;

use super::{Expr, Formula};
use crate::error::{Error, Result};
use crate::structure::Language;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    language: &'a Language,
    k: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            (
                start,
                std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier"),
            )
        })
    }

    fn as_var(&self, name: &str, at: usize) -> Result<Option<usize>> {
        let Some(digits) = name.strip_prefix('x') else {
            return Ok(None);
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Ok(None);
        }
        let index: usize = digits.parse().map_err(|_| Error::Syntax {
            pos: at,
            msg: "variable index overflow".into(),
        })?;
        if index == 0 || index > self.k {
            return Err(Error::VariableOutOfRange { index, k: self.k });
        }
        Ok(Some(index - 1))
    }

    fn var(&mut self) -> Result<usize> {
        let Some((at, name)) = self.ident() else {
            return self.err("expected a variable");
        };
        match self.as_var(name, at)? {
            Some(v) => Ok(v),
            None => {
                self.pos = at;
                self.err(format!("`{name}` is not a variable"))
            }
        }
    }

    fn iff(&mut self) -> Result<Expr> {
        let mut lhs = self.implies()?;
        while self.eat("<->") {
            let rhs = self.implies()?;
            lhs = Expr::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.implies()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            let rhs = self.and()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut lhs = self.not()?;
        while self.eat("&") {
            let rhs = self.not()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"!") && !self.src[self.pos..].starts_with(b"!=") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        if self.eat("(") {
            let e = self.iff()?;
            self.expect(")")?;
            return Ok(e);
        }
        let Some((at, name)) = self.ident() else {
            return self.err("expected an atom");
        };
        if let Some(a) = self.as_var(name, at)? {
            if self.eat("!=") {
                let b = self.var()?;
                return Ok(Expr::Not(Box::new(Expr::Eq(a, b))));
            }
            self.expect("=")?;
            let b = self.var()?;
            return Ok(Expr::Eq(a, b));
        }
        let save = self.pos;
        if name == "T" && !self.eat("(") {
            self.pos = save;
            return Ok(Expr::True);
        }
        self.pos = save;
        let p = self
            .language
            .index_of(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))?;
        self.expect("(")?;
        let mut args = vec![self.var()?];
        while self.eat(",") {
            args.push(self.var()?);
        }
        self.expect(")")?;
        let arity = self.language.arity(p);
        if args.len() != arity {
            return Err(Error::Arity {
                predicate: name.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        Ok(Expr::Pred(p, args))
    }
}

/// Parses `text` as a formula over `language` with free variables `x1..xk`.
pub fn parse_formula(text: &str, language: &Arc<Language>, k: usize) -> Result<Formula> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        language,
        k,
    };
    let expr = p.iff()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(Formula {
        language: language.clone(),
        k,
        expr,
    })
}

//! Textual round-trip format for polynomials: fully parenthesized infix
//! with integer coefficients and named variable symbols, e.g.
//! `((2*x1) / ((1 + 2*x1)))` or `J(0;1;11)*x1^2 - (1/2)`.

use std::iter::Peekable;
use std::str::Chars;

use crate::error::CoreError;
use crate::localized::LocalizedPoly;
use crate::poly::{MultiIdx, Poly, Rational, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    Var(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(msg: impl Into<String>) -> CoreError {
    CoreError::Parse(msg.into())
}

fn lex(s: &str) -> Result<Vec<Tok>, CoreError> {
    let mut toks = Vec::new();
    let mut it = s.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            ' ' | '\t' | '\n' => {
                it.next();
            }
            '+' => {
                it.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                it.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                it.next();
                toks.push(Tok::Star);
            }
            '/' => {
                it.next();
                toks.push(Tok::Slash);
            }
            '^' => {
                it.next();
                toks.push(Tok::Caret);
            }
            '(' => {
                it.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                it.next();
                toks.push(Tok::RParen);
            }
            '0'..='9' => {
                toks.push(Tok::Num(lex_number(&mut it)?));
            }
            't' | 'x' => {
                it.next();
                let idx = lex_number(&mut it)? as u8;
                toks.push(Tok::Var(if c == 't' { Var::T(idx) } else { Var::X(idx) }));
            }
            'y' | 'J' | 'g' => {
                it.next();
                let parts = lex_paren_parts(&mut it)?;
                toks.push(Tok::Var(var_from_parts(c, &parts)?));
            }
            _ => return Err(err(format!("unexpected character `{}`", c))),
        }
    }
    Ok(toks)
}

fn lex_number(it: &mut Peekable<Chars>) -> Result<u64, CoreError> {
    let mut n: u64 = 0;
    let mut any = false;
    while let Some(&c) = it.peek() {
        if let Some(d) = c.to_digit(10) {
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add(d as u64))
                .ok_or_else(|| err("integer literal overflow"))?;
            any = true;
            it.next();
        } else {
            break;
        }
    }
    if any {
        Ok(n)
    } else {
        Err(err("expected digits"))
    }
}

fn lex_paren_parts(it: &mut Peekable<Chars>) -> Result<Vec<String>, CoreError> {
    if it.next() != Some('(') {
        return Err(err("expected `(` after variable symbol"));
    }
    let mut parts = vec![String::new()];
    for c in it.by_ref() {
        match c {
            ')' => return Ok(parts),
            ';' => parts.push(String::new()),
            '0'..='9' => parts.last_mut().unwrap().push(c),
            _ => return Err(err(format!("bad character `{}` in variable symbol", c))),
        }
    }
    Err(err("unterminated variable symbol"))
}

fn var_from_parts(kind: char, parts: &[String]) -> Result<Var, CoreError> {
    let num = |s: &String| -> Result<u8, CoreError> {
        s.parse::<u8>().map_err(|_| err("bad index"))
    };
    let digits = |s: &String| -> Result<MultiIdx, CoreError> {
        let ds: Vec<u8> = s
            .chars()
            .map(|c| c.to_digit(10).unwrap() as u8)
            .collect();
        if ds.len() > 8 {
            return Err(err("multi-index too long"));
        }
        Ok(MultiIdx::new(&ds))
    };
    match (kind, parts.len()) {
        ('y', 2) => Ok(Var::Y(num(&parts[0])?, num(&parts[1])?)),
        ('J', 3) => Ok(Var::Jet {
            diffeo: num(&parts[0])?,
            comp: num(&parts[1])?,
            mu: digits(&parts[2])?,
        }),
        ('g', 4) => Ok(Var::Gamma {
            leg: num(&parts[0])?,
            i: num(&parts[1])?,
            j: num(&parts[2])?,
            k: num(&parts[3])?,
            ls: MultiIdx::new(&[]),
        }),
        ('g', 5) => Ok(Var::Gamma {
            leg: num(&parts[0])?,
            i: num(&parts[1])?,
            j: num(&parts[2])?,
            k: num(&parts[3])?,
            ls: digits(&parts[4])?,
        }),
        _ => Err(err(format!("malformed variable `{}(...)`", kind))),
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<LocalizedPoly, CoreError> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LocalizedPoly, CoreError> {
        let mut acc = self.factor()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Star => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Slash => {
                    self.next();
                    let d = self.factor()?;
                    acc = acc.mul(&d.invert()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LocalizedPoly, CoreError> {
        let mut sign = 1i64;
        while self.peek() == Some(&Tok::Minus) {
            self.next();
            sign = -sign;
        }
        let mut base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.next();
            match self.next() {
                Some(Tok::Num(e)) => base = base.pow(e as i64)?,
                _ => return Err(err("expected integer exponent after `^`")),
            }
        }
        if sign < 0 {
            base = base.neg();
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<LocalizedPoly, CoreError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(LocalizedPoly::constant(Rational::from_integer(n.into()))),
            Some(Tok::Var(v)) => Ok(LocalizedPoly::var(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(err("missing `)`")),
                }
            }
            other => Err(err(format!("unexpected token {:?}", other))),
        }
    }
}

/// Parse the textual polynomial format.  Division is only meaningful
/// against constants and registered denominators.
pub fn parse(s: &str) -> Result<LocalizedPoly, CoreError> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err("trailing input"));
    }
    Ok(e)
}

pub fn parse_poly(s: &str) -> Result<Poly, CoreError> {
    let lp = parse(s)?;
    let lp = lp.normalize();
    if !lp.denominators().is_empty() {
        return Err(err("expected a plain polynomial, found denominators"));
    }
    Ok(lp.numerator().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localized::register;
    use crate::poly::{rat_int, Var};

    #[test]
    fn roundtrip_poly() {
        let p = parse_poly("x1^2 + 2*x1 + 1").unwrap();
        let printed = p.to_string();
        let q = parse_poly(&printed).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn roundtrip_jet_symbol() {
        let p = parse_poly("J(0;1;11)*x1 - (1/2)*t1").unwrap();
        let q = parse_poly(&p.to_string()).unwrap();
        assert_eq!(p, q);
        assert!(p.vars().contains(&Var::T(1)));
    }

    #[test]
    fn roundtrip_localized() {
        let d = Poly::one().add(&Poly::var(Var::X(1)).scale(&rat_int(2)));
        register(&d, "det-rt").unwrap();
        let f = parse("(2*x1) / (1 + 2*x1)").unwrap();
        let g = parse(&f.to_string()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn unregistered_denominator_rejected() {
        assert!(parse("1 / (x1 + 123456)").is_err());
    }
}

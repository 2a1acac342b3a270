//! Recursive-descent parser for map expressions over Q(x).
//!
//! Grammar: expr := [+|-] term ((+|-) term)*
//!          term := factor ((* | /) factor | factor)*   (juxtaposition = *)
//!          factor := atom (^ [-] uint)?
//!          atom := uint | 'x' | '(' expr ')'

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::map::{MapError, RationalMap};
use super::poly::QPoly;
use super::rat::Rat;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end_pos: usize,
}

fn lex(s: &str) -> Result<Lexer, MapError> {
    let bytes = s.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = s[start..i].parse().unwrap();
                toks.push((Tok::Num(n), start));
            }
            'x' => {
                toks.push((Tok::X, i));
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            _ => {
                return Err(MapError::Syntax {
                    pos: i,
                    msg: format!("unexpected character '{}'", c),
                })
            }
        }
    }
    Ok(Lexer {
        toks,
        at: 0,
        end_pos: s.len(),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end_pos, |t| t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t.map(|x| x.0)
    }
}

/// Rational function kept reduced so intermediate degrees stay small.
#[derive(Clone)]
struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    fn from_const(c: Rat) -> Self {
        RatFunc {
            num: QPoly::constant(c),
            den: QPoly::one(),
        }
    }

    fn x() -> Self {
        RatFunc {
            num: QPoly::from_coeffs(vec![Rat::zero(), Rat::one()]),
            den: QPoly::one(),
        }
    }

    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den = QPoly::one();
            return self;
        }
        let g = self.num.gcd_monic(&self.den);
        if !g.is_zero() && g.deg() > 0 {
            self.num = self.num.divrem(&g).0;
            self.den = self.den.divrem(&g).0;
        }
        self
    }

    fn add(&self, o: &Self) -> Self {
        RatFunc {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .reduce()
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        RatFunc {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
        .reduce()
    }

    fn div(&self, o: &Self, pos: usize) -> Result<Self, MapError> {
        if o.num.is_zero() {
            return Err(MapError::Syntax {
                pos,
                msg: "division by zero".into(),
            });
        }
        Ok(RatFunc {
            num: self.num.mul(&o.den),
            den: self.den.mul(&o.num),
        }
        .reduce())
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_const(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

const MAX_EXPONENT: u32 = 64;

fn parse_expr(lx: &mut Lexer) -> Result<RatFunc, MapError> {
    let mut negate = false;
    match lx.peek() {
        Some(Tok::Plus) => {
            lx.next();
        }
        Some(Tok::Minus) => {
            lx.next();
            negate = true;
        }
        _ => {}
    }
    let mut acc = parse_term(lx)?;
    if negate {
        acc = acc.neg();
    }
    loop {
        match lx.peek() {
            Some(Tok::Plus) => {
                lx.next();
                let t = parse_term(lx)?;
                acc = acc.add(&t);
            }
            Some(Tok::Minus) => {
                lx.next();
                let t = parse_term(lx)?;
                acc = acc.sub(&t);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(lx: &mut Lexer) -> Result<RatFunc, MapError> {
    let mut acc = parse_factor(lx)?;
    loop {
        match lx.peek() {
            Some(Tok::Star) => {
                lx.next();
                let f = parse_factor(lx)?;
                acc = acc.mul(&f);
            }
            Some(Tok::Slash) => {
                let pos = lx.pos();
                lx.next();
                let f = parse_factor(lx)?;
                acc = acc.div(&f, pos)?;
            }
            // Juxtaposition: "2x^2", "2(x+1)", "x(x-1)".
            Some(Tok::Num(_)) | Some(Tok::X) | Some(Tok::LParen) => {
                let f = parse_factor(lx)?;
                acc = acc.mul(&f);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_factor(lx: &mut Lexer) -> Result<RatFunc, MapError> {
    let base = parse_atom(lx)?;
    if lx.peek() != Some(&Tok::Caret) {
        return Ok(base);
    }
    lx.next();
    let mut invert = false;
    if lx.peek() == Some(&Tok::Minus) {
        lx.next();
        invert = true;
    }
    let pos = lx.pos();
    match lx.next() {
        Some(Tok::Num(n)) => {
            let e: u32 = n.to_string().parse().map_err(|_| MapError::Syntax {
                pos,
                msg: format!("exponent {} exceeds the limit {}", n, MAX_EXPONENT),
            })?;
            if e > MAX_EXPONENT {
                return Err(MapError::Syntax {
                    pos,
                    msg: format!("exponent {} exceeds the limit {}", e, MAX_EXPONENT),
                });
            }
            let p = base.pow(e);
            if invert {
                RatFunc::from_const(Rat::one()).div(&p, pos)
            } else {
                Ok(p)
            }
        }
        _ => Err(MapError::Syntax {
            pos,
            msg: "expected an integer exponent after '^'".into(),
        }),
    }
}

fn parse_atom(lx: &mut Lexer) -> Result<RatFunc, MapError> {
    let pos = lx.pos();
    match lx.next() {
        Some(Tok::Num(n)) => Ok(RatFunc::from_const(Rat::from_integer(n))),
        Some(Tok::X) => Ok(RatFunc::x()),
        Some(Tok::LParen) => {
            let inner = parse_expr(lx)?;
            let pos2 = lx.pos();
            match lx.next() {
                Some(Tok::RParen) => Ok(inner),
                _ => Err(MapError::Syntax {
                    pos: pos2,
                    msg: "expected ')'".into(),
                }),
            }
        }
        Some(t) => Err(MapError::Syntax {
            pos,
            msg: format!("unexpected token {:?}", t),
        }),
        None => Err(MapError::Syntax {
            pos,
            msg: "unexpected end of input".into(),
        }),
    }
}

/// Parses an expression in x into a normalized rational map.
pub fn parse_map(s: &str) -> Result<RationalMap, MapError> {
    let mut lx = lex(s)?;
    if lx.peek().is_none() {
        return Err(MapError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let rf = parse_expr(&mut lx)?;
    if let Some(t) = lx.peek() {
        return Err(MapError::Syntax {
            pos: lx.pos(),
            msg: format!("trailing input {:?}", t),
        });
    }
    RationalMap::from_qpolys(&rf.num, &rf.den)
}

/// Parses a polynomial in x; rejects expressions with poles.
pub fn parse_poly(s: &str) -> Result<super::poly::IntPoly, MapError> {
    let mut lx = lex(s)?;
    if lx.peek().is_none() {
        return Err(MapError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let rf = parse_expr(&mut lx)?;
    if let Some(t) = lx.peek() {
        return Err(MapError::Syntax {
            pos: lx.pos(),
            msg: format!("trailing input {:?}", t),
        });
    }
    if rf.den.is_zero() || rf.den.deg() > 0 {
        return Err(MapError::Degenerate(
            "expected a polynomial, found a denominator in x".into(),
        ));
    }
    let inv = Rat::one() / rf.den.coeff(0);
    Ok(rf.num.mul_scalar(&inv).clear_denominators())
}

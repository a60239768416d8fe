//! Text syntax for superpolynomials.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' int)?
//! base   := rational | 'i' | 'sqrt2' | var | '(' expr ')'
//! ```
//!
//! Variables are `z, t1, t2, …` on the chart `U` and `w, p1, p2, …` on `V`
//! (`z1, z2, …` and `w1, w2, …` when the even dimension is at least 2).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};
use crate::superalgebra::{SuperPolynomial, Var, VarContext};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
    /// Base, exponent and byte offset of the base.
    Power(Box<Expr>, i64, usize),
    Scalar(Scalar),
    /// Name and byte offset.
    Variable(String, usize),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { offset, message: message.into() })
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i < b.len() && b[i] == b'/' {
                i += 1;
                let d = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if d == i {
                    return err(d, "expected a denominator");
                }
            }
            out.push((s, Tok::Num(text[s..i].to_string())));
        } else if c.is_ascii_alphabetic() {
            let s = i;
            while i < b.len() && b[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((s, Tok::Ident(text[s..i].to_string())));
        } else if b"+-*^()".contains(&c) {
            out.push((i, Tok::Op(c as char)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap();
            return err(i, format!("unexpected character {ch:?}"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            terms.push((neg, self.term()?));
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 && !terms[0].0 { terms.pop().unwrap().1 } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.factor()?];
        while self.eat('*') {
            fs.push(self.factor()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) })
    }

    fn factor(&mut self) -> Result<Expr> {
        let start = self.offset();
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(s)) if !s.contains('/') => {
                self.pos += 1;
                let e: i64 = s.parse().or_else(|_| err(at, "exponent out of range"))?;
                Ok(Expr::Power(Box::new(base), if neg { -e } else { e }, start))
            }
            _ => err(at, "expected an integer exponent"),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let r = parse_rational(&s).ok_or(Error::Parse { offset: at, message: format!("bad rational {s}") })?;
                Ok(Expr::Scalar(Scalar::from_rational(r)))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(match s.as_str() {
                    "i" => Expr::Scalar(Scalar::i()),
                    "sqrt2" => Expr::Scalar(Scalar::sqrt2()),
                    _ => Expr::Variable(s, at),
                })
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return err(self.offset(), "expected ')'");
                }
                Ok(e)
            }
            Some(t) => err(at, format!("unexpected {t:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parses `text` into an AST, keeping byte offsets of variables.
fn parse_ast(text: &str) -> Result<(Expr, Vec<(usize, String)>)> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, end: text.len() };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return err(p.offset(), "trailing input");
    }
    let vars = toks
        .iter()
        .filter_map(|(o, t)| match t {
            Tok::Ident(s) if s != "i" && s != "sqrt2" => Some((*o, s.clone())),
            _ => None,
        })
        .collect();
    Ok((e, vars))
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_ast(text).map(|(e, _)| e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    U,
    V,
}

/// `(chart, even index, odd?)`, with index 0 for an unsubscripted `z`/`w`.
fn classify(name: &str) -> Option<(Chart, usize, bool)> {
    let (head, tail) = name.split_at(1);
    let (chart, odd) = match head {
        "z" => (Chart::U, false),
        "w" => (Chart::V, false),
        "t" => (Chart::U, true),
        "p" => (Chart::V, true),
        _ => return None,
    };
    if tail.is_empty() {
        return (!odd).then_some((chart, 0, false));
    }
    if tail.starts_with('0') || !tail.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    tail.parse().ok().map(|k| (chart, k, odd))
}

/// Chart and dimensions read off the variables used; defaults to `V` when none appear.
fn infer(vars: &[(usize, String)]) -> Result<(Chart, usize, usize)> {
    let mut chart = None;
    let (mut n, mut m, mut plain, mut indexed) = (1, 0, false, false);
    for (o, v) in vars {
        let Some((c, k, odd)) = classify(v) else {
            return err(*o, format!("unknown variable {v}"));
        };
        match chart {
            None => chart = Some((c, v.clone())),
            Some((c0, ref first)) if c0 != c => {
                return err(*o, format!("{v} and {first} belong to different charts"));
            }
            _ => {}
        }
        if odd {
            m = m.max(k);
        } else if k == 0 {
            plain = true;
        } else {
            indexed = true;
            n = n.max(k);
        }
        if plain && indexed {
            return err(*o, "mixes unsubscripted and subscripted even variables");
        }
    }
    if indexed && n == 1 {
        n = 2;
    }
    Ok((chart.map_or(Chart::V, |c| c.0), n, m))
}

fn context(chart: Chart, n: usize, m: usize) -> Arc<VarContext> {
    VarContext::projective_chart(n, m, if chart == Chart::U { 0 } else { 1 })
}

fn lower(e: &Expr, ctx: &Arc<VarContext>) -> Result<SuperPolynomial> {
    Ok(match e {
        Expr::Scalar(c) => SuperPolynomial::constant(ctx, c.clone()),
        Expr::Variable(name, at) => match ctx.lookup(name) {
            Some(v) => SuperPolynomial::var(ctx, v),
            None => return err(*at, format!("unknown variable {name}")),
        },
        Expr::Sum(ts) => {
            let mut acc = SuperPolynomial::zero(ctx);
            for (neg, t) in ts {
                let p = lower(t, ctx)?;
                acc = if *neg { &acc - &p } else { &acc + &p };
            }
            acc
        }
        Expr::Product(fs) => {
            let mut acc = SuperPolynomial::one(ctx);
            for f in fs {
                acc = &acc * &lower(f, ctx)?;
            }
            acc
        }
        Expr::Power(b, k, at) => {
            let at = *at;
            if let Expr::Variable(name, _) = &**b {
                if matches!(ctx.lookup(name), Some(Var::Odd(_))) && (*k >= 2 || *k < 0) {
                    return err(at, format!("{name}^{k}: odd variables are nilpotent of order 2"));
                }
            }
            let p = lower(b, ctx)?;
            power(&p, *k).map_err(|m| Error::Parse { offset: at, message: m })?
        }
    })
}

fn power(p: &SuperPolynomial, k: i64) -> std::result::Result<SuperPolynomial, String> {
    let ctx = p.ctx();
    let base = if k >= 0 {
        p.clone()
    } else {
        let (m, c) = match p.terms().iter().next() {
            Some(t) if p.len() == 1 && t.0.mask == 0 => t,
            _ => return Err(format!("negative power of {p}, which is not an even monomial")),
        };
        let inv = c.inv().map_err(|_| "negative power of zero".to_string())?;
        let mut mi = m.clone();
        mi.exps.iter_mut().for_each(|e| *e = -*e);
        SuperPolynomial::from_terms(ctx, [(mi, inv)])
    };
    let e = k.unsigned_abs();
    if e > 4096 {
        return Err("exponent too large".into());
    }
    let mut acc = SuperPolynomial::one(ctx);
    for _ in 0..e {
        acc = &acc * &base;
    }
    Ok(acc)
}

/// Parses with chart and dimensions inferred from the variables.
pub fn parse_superpoly(text: &str) -> Result<SuperPolynomial> {
    let (e, vars) = parse_ast(text)?;
    let (chart, n, m) = infer(&vars)?;
    lower(&e, &context(chart, n, m))
}

/// Parses on `P^{n|m}`; the chart is inferred and indices beyond `n`, `m` are rejected.
pub fn parse_on(text: &str, n: usize, m: usize) -> Result<SuperPolynomial> {
    let (e, vars) = parse_ast(text)?;
    let (chart, _, _) = infer(&vars)?;
    lower(&e, &context(chart, n, m))
}

/// Parses over an explicit context (which may carry parameters).
pub fn parse_in(text: &str, ctx: &Arc<VarContext>) -> Result<SuperPolynomial> {
    lower(&parse_expr(text)?, ctx)
}

/// The canonical rendering, which [`parse_in`] reads back exactly.
pub fn render(p: &SuperPolynomial) -> String {
    p.render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::SuperMonomial;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p = parse_superpoly("1 + (p1*p2 + p1*p3 + p2*p3)*w^-1").unwrap();
        let v = VarContext::v_chart(3);
        let mono = |o: &[usize]| SuperPolynomial::monomial(&v, Scalar::one(), &[-1], o);
        let expected = &(&(&SuperPolynomial::one(&v) + &mono(&[0, 1])) + &mono(&[0, 2])) + &mono(&[1, 2]);
        assert_eq!(p, expected);
        assert_eq!(p.render(), "1 + w^-1*p1*p2 + w^-1*p1*p3 + w^-1*p2*p3");
        let q = parse_superpoly("p2*p1").unwrap();
        assert_eq!(q.render(), "-p1*p2");
        assert_eq!(parse_superpoly("i*i").unwrap(), SuperPolynomial::constant(&VarContext::v_chart(0), Scalar::from_int(-1)));
        assert_eq!(parse_superpoly("sqrt2^2").unwrap().render(), "2");
        assert_eq!(parse_superpoly("-3/2*z^2 + t1").unwrap().render(), "t1 - 3/2*z^2");
        assert_eq!(parse_superpoly("z2*t3").unwrap().ctx().even, vec!["z1", "z2"]);
        assert_eq!(parse_on("t1", 1, 4).unwrap().ctx().n_odd(), 4);
    }

    fn offset(r: Result<SuperPolynomial>) -> usize {
        match r {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors() {
        assert_eq!(offset(parse_superpoly("z + t1^2")), 4);
        assert_eq!(offset(parse_superpoly("z*p1")), 2);
        assert_eq!(offset(parse_superpoly("1 + x")), 4);
        assert_eq!(offset(parse_superpoly("1 + ")), 4);
        assert_eq!(offset(parse_superpoly("(z + 1")), 6);
        assert_eq!(offset(parse_superpoly("z ^ t1")), 4);
        assert_eq!(offset(parse_superpoly("z # 2")), 2);
        assert_eq!(offset(parse_superpoly("(1 + z)^-1")), 0);
        assert_eq!(offset(parse_on("t5", 1, 3)), 0);
        assert_eq!(offset(parse_superpoly("z*z1")), 2);
        assert!(parse_superpoly("t1*t1").unwrap().is_zero());
    }

    fn arb_poly() -> impl Strategy<Value = SuperPolynomial> {
        let term = (-3i64..=3, 1i64..=3, 0u8..4, -3i32..=3, 0u64..16);
        proptest::collection::vec(term, 0..6).prop_map(|ts| {
            let ctx = VarContext::u_chart(4);
            let basis = [Scalar::one(), Scalar::sqrt2(), Scalar::i(), &Scalar::i() * &Scalar::sqrt2()];
            SuperPolynomial::from_terms(
                &ctx,
                ts.into_iter()
                    .filter(|t| t.0 != 0)
                    .map(|(a, b, k, e, mask)| (SuperMonomial { exps: vec![e], mask }, &Scalar::from_frac(a, b) * &basis[k as usize])),
            )
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(p in arb_poly()) {
            let text = render(&p);
            let q = parse_in(&text, p.ctx()).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(render(&q), text);
        }
    }
}
